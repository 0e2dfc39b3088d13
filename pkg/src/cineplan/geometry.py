"""Core 3D math: vectors, rigid camera poses, pinhole projection, Bezier curves.

Conventions (used everywhere in this package):

* right-handed world coordinates, +Y up, units are meters;
* a camera looks along its local -Z axis; the pose rotation's columns are the
  camera's right / up / back axes expressed in world coordinates;
* poses are camera-to-world transforms and serialize to a 4x4 row-major
  matrix (rotation block, translation column, bottom row ``0 0 0 1``);
* NDC is the [-1, 1] square with +x right and +y up; pixel coordinates have
  the origin at the top-left corner with y pointing down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BehindCameraError, DegenerateError, DomainError,
                     SchemaError, ValidationError)

_EPS = 1e-12

WORLD_UP = np.array([0.0, 1.0, 0.0])


def vec3(x, y, z) -> np.ndarray:
    """Build a float64 3-vector, rejecting non-finite components."""
    v = np.array([x, y, z], dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise DomainError(f"vector components must be finite, got {v.tolist()}")
    return v


def as_vec3(value) -> np.ndarray:
    """Coerce an array-like of length 3 into a validated float64 vector."""
    v = np.asarray(value, dtype=np.float64)
    if v.shape != (3,):
        raise DomainError(f"expected a 3-vector, got shape {v.shape}")
    return vec3(v[0], v[1], v[2])


def normalize(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n < _EPS):
        raise DegenerateError("cannot normalize a zero-length vector")
    return v / n


def cross3(a, b) -> np.ndarray:
    """Cross product of two plain 3-vectors (faster than np.cross here)."""
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def rotation_about_axis(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis (right-hand rule)."""
    x, y, z = axis
    c, s = math.cos(angle), math.sin(angle)
    t = 1.0 - c
    return np.array([
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ])


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid camera-to-world transform.

    ``rotation`` columns are the camera's right, up and back (-forward) axes
    in world coordinates; ``translation`` is the camera origin in the world.
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return (np.array_equal(self.rotation, other.rotation)
                and np.array_equal(self.translation, other.translation))

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=np.float64))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=np.float64))
        if self.rotation.shape != (3, 3) or self.translation.shape != (3,):
            raise ValidationError("pose needs a 3x3 rotation and a 3-vector translation")

    @property
    def right(self) -> np.ndarray:
        return self.rotation[:, 0]

    @property
    def up(self) -> np.ndarray:
        return self.rotation[:, 1]

    @property
    def forward(self) -> np.ndarray:
        return -self.rotation[:, 2]

    def rigidity_error(self) -> float:
        """max(|R^T R - I|_inf, |det R - 1|); 0 for a perfect rotation."""
        r = self.rotation
        ortho = np.max(np.abs(r.T @ r - np.eye(3)))
        return max(float(ortho), abs(float(np.linalg.det(r)) - 1.0))

    def require_rigid(self, tol: float = 1e-9) -> "Pose":
        err = self.rigidity_error()
        if err > tol:
            raise ValidationError(f"rotation is not rigid (error {err:.3e} > {tol:.0e})")
        return self

    def matrix(self) -> np.ndarray:
        """4x4 camera-to-world matrix (row-major when flattened)."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def flat(self) -> list:
        """The 16-number row-major wire form of :meth:`matrix`."""
        return [float(v) for v in self.matrix().reshape(16)]

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-9) -> "Pose":
        m = np.asarray(m, dtype=np.float64)
        if m.size != 16:
            raise SchemaError("pose matrix needs 16 numbers")
        m = m.reshape(4, 4)
        if np.max(np.abs(m[3] - np.array([0.0, 0.0, 0.0, 1.0]))) > tol:
            raise ValidationError("pose matrix bottom row must be 0 0 0 1")
        return cls(m[:3, :3], m[:3, 3]).require_rigid(tol)

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        """Map world points (..., 3) into camera coordinates."""
        d = np.asarray(points, dtype=np.float64) - self.translation
        return d @ self.rotation


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics; FOV derives from focal length and sensor width."""

    focal_mm: float = 36.0
    sensor_width_mm: float = 36.0
    aspect: float = 16.0 / 9.0
    near_m: float = 0.1
    far_m: float = 1000.0

    def __post_init__(self):
        if not (self.focal_mm > 0 and math.isfinite(self.focal_mm)):
            raise DomainError("focal_mm must be positive")
        if not (self.sensor_width_mm > 0 and math.isfinite(self.sensor_width_mm)):
            raise DomainError("sensor_width_mm must be positive")
        if not (self.aspect > 0 and math.isfinite(self.aspect)):
            raise DomainError("aspect must be positive")
        if not (0 < self.near_m < self.far_m):
            raise DomainError("need 0 < near < far")

    @property
    def hfov(self) -> float:
        """Horizontal field of view in radians, in (0, pi)."""
        return 2.0 * math.atan(self.sensor_width_mm / (2.0 * self.focal_mm))

    @property
    def tan_half_hfov(self) -> float:
        return self.sensor_width_mm / (2.0 * self.focal_mm)

    def with_focal(self, focal_mm: float) -> "CameraIntrinsics":
        return CameraIntrinsics(focal_mm, self.sensor_width_mm, self.aspect,
                                self.near_m, self.far_m)


@dataclass(frozen=True, eq=False)
class BezierCurve:
    """Chain of cubic Bezier segments: 3k+1 control points for k segments."""

    control_points: tuple = field(default=())

    def __eq__(self, other):
        if not isinstance(other, BezierCurve):
            return NotImplemented
        return np.array_equal(self.control_points, other.control_points)

    def __post_init__(self):
        pts = np.asarray(self.control_points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError("control_points must be an Nx3 array of positions")
        n = pts.shape[0]
        if n < 4 or n % 3 != 1:
            raise ValidationError(
                f"a cubic chain needs 3k+1 control points (k >= 1), got {n}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("control points must be finite")
        object.__setattr__(self, "control_points", pts)

    @property
    def segments(self) -> int:
        return (len(self.control_points) - 1) // 3

    def to_doc(self) -> dict:
        return {"control_points": [[float(c) for c in p] for p in self.control_points]}

    @classmethod
    def from_doc(cls, doc: dict) -> "BezierCurve":
        return cls(tuple(map(tuple, doc["control_points"])))


def _segment_params(curve: BezierCurve, u: float):
    if not (0.0 <= u <= 1.0):
        raise DomainError(f"curve parameter must be in [0, 1], got {u}")
    k = curve.segments
    s = u * k
    i = min(int(s), k - 1)
    return i, s - i


def bezier_point(curve: BezierCurve, u: float) -> np.ndarray:
    """Evaluate the chain at global u in [0, 1], mapped uniformly per segment.

    De Casteljau on the active segment; u=0 and u=1 hit the end control
    points exactly.
    """
    i, t = _segment_params(curve, u)
    p = curve.control_points[3 * i:3 * i + 4].copy()
    for level in range(3):
        p = p[:-1] * (1.0 - t) + p[1:] * t
    return p[0]


def bezier_tangent(curve: BezierCurve, u: float) -> np.ndarray:
    """Derivative of the chain with respect to the segment-local parameter."""
    i, t = _segment_params(curve, u)
    p = curve.control_points[3 * i:3 * i + 4]
    d = 3.0 * (p[1:] - p[:-1])
    for level in range(2):
        d = d[:-1] * (1.0 - t) + d[1:] * t
    return d[0]


def look_at_rotation(eye: np.ndarray, target: np.ndarray,
                     up_hint: np.ndarray = WORLD_UP) -> np.ndarray:
    """Zero-roll aiming rotation(s); broadcasts over leading axes.

    Returns (..., 3, 3) rotations whose columns are right/up/back. Raises if
    any eye coincides with its target or any forward is parallel to the hint.
    """
    eye = np.asarray(eye, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if eye.ndim == 1 and target.ndim == 1:
        fwd = target - eye
        n = math.sqrt(fwd[0] ** 2 + fwd[1] ** 2 + fwd[2] ** 2)
        if n < 1e-9:
            raise DegenerateError("look_at: eye and target coincide")
        fwd = fwd / n
        right = cross3(fwd, up_hint)
        rn = math.sqrt(right[0] ** 2 + right[1] ** 2 + right[2] ** 2)
        if rn < 1e-9:
            raise DegenerateError("look_at: forward is parallel to the up hint")
        right = right / rn
        up = cross3(right, fwd)
        return np.stack([right, up, -fwd], axis=-1)
    fwd = target - eye
    n = np.linalg.norm(fwd, axis=-1, keepdims=True)
    if np.any(n < 1e-9):
        raise DegenerateError("look_at: eye and target coincide")
    fwd = fwd / n
    right = np.cross(fwd, np.broadcast_to(up_hint, fwd.shape))
    rn = np.linalg.norm(right, axis=-1, keepdims=True)
    if np.any(rn < 1e-9):
        raise DegenerateError("look_at: forward is parallel to the up hint")
    right = right / rn
    up = np.cross(right, fwd)
    return np.stack([right, up, -fwd], axis=-1)


def look_at(eye, target, up_hint=WORLD_UP) -> Pose:
    """Place a camera at ``eye`` aiming at ``target`` with zero roll."""
    eye = as_vec3(eye)
    return Pose(look_at_rotation(eye, as_vec3(target), as_vec3(up_hint)), eye)


def project_points(points, rotation, translation, intr: CameraIntrinsics):
    """Pinhole-project points; broadcasts points against camera batches.

    Returns ``(ndc_x, ndc_y, depth)`` arrays where depth is the camera-space
    distance along -Z in meters. No behind-camera check is made here: depth
    can be zero or negative, and NDC is computed against max(depth, tiny) so
    callers can mask invalid entries (see :func:`frustum_mask`).
    """
    points = np.asarray(points, dtype=np.float64)
    rotation = np.asarray(rotation, dtype=np.float64)
    translation = np.asarray(translation, dtype=np.float64)
    d = points - translation
    cam = np.einsum("...ji,...j->...i", rotation, d)
    depth = -cam[..., 2]
    safe = np.maximum(depth, _EPS)
    kx = intr.tan_half_hfov
    ndc_x = cam[..., 0] / (safe * kx)
    ndc_y = cam[..., 1] * intr.aspect / (safe * kx)
    return ndc_x, ndc_y, depth


def project_to_ndc(p_world, pose: Pose, intr: CameraIntrinsics):
    """Project one world point, raising if it is at or behind the camera."""
    x, y, depth = project_points(as_vec3(p_world), pose.rotation, pose.translation, intr)
    if depth <= _EPS:
        raise BehindCameraError(f"point at camera-space depth {float(depth):.6g} m")
    return float(x), float(y), float(depth)


def unproject_ndc(ndc_x: float, ndc_y: float, depth: float, pose: Pose,
                  intr: CameraIntrinsics) -> np.ndarray:
    """Inverse of :func:`project_to_ndc`: walk the pixel ray to ``depth``."""
    if depth <= 0:
        raise DomainError("depth must be positive")
    kx = intr.tan_half_hfov
    cam = np.array([ndc_x * depth * kx, ndc_y * depth * kx / intr.aspect, -depth])
    return pose.rotation @ cam + pose.translation


def ndc_to_pixel(ndc_x, ndc_y, width_px: int, height_px: int):
    """Continuous pixel coordinates; top-left origin, y down, no rounding."""
    px = (np.asarray(ndc_x) + 1.0) / 2.0 * width_px
    py = (1.0 - np.asarray(ndc_y)) / 2.0 * height_px
    if np.isscalar(ndc_x) or getattr(ndc_x, "ndim", 0) == 0:
        return float(px), float(py)
    return px, py


def frustum_mask(points, rotation, translation, intr: CameraIntrinsics):
    """Boolean array: which points project inside the image and depth range."""
    x, y, depth = project_points(points, rotation, translation, intr)
    return ((depth >= intr.near_m) & (depth <= intr.far_m)
            & (np.abs(x) <= 1.0) & (np.abs(y) <= 1.0))


def in_frustum(p_world, pose: Pose, intr: CameraIntrinsics) -> bool:
    """True iff the point lands in the [-1,1] NDC square within near..far."""
    return bool(frustum_mask(as_vec3(p_world), pose.rotation, pose.translation, intr))
