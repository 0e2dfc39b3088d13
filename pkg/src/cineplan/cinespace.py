"""Two-subject camera rig and its (d, theta, phi) orbital parameter space.

A :class:`CineRig` anchors the space on two subjects A and B; the space
center Q sits at ``(1-blend)*A + blend*B`` and the whole horizontal frame may
be re-oriented with ``rig_yaw``. A camera is then placed by
:class:`CineSpaceParams`:

* ``d`` — distance from the camera to Q, meters;
* ``theta`` — horizontal angle around the subjects, measured from the
  horizontal direction perpendicular to the A-B line (so theta=0 is the
  profile two-shot and theta=+-pi/2 looks along the A-B axis);
* ``phi`` — vertical angle, positive above the subjects' plane;
* ``focal_mm`` — focal length driving the field of view;
* ``screen_offset`` — post-aim yaw about the camera's own up axis, shifting
  the subjects horizontally in frame without moving the camera.

Orbits keep the camera aimed at Q, which is what keeps both subjects in
frame across the whole parameter range (see tests for the guarantee regime).
When A and B coincide the rig degenerates to a single-subject spherical
orbit around A with the same three coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import docio
from .errors import DegenerateError, DomainError
from .geometry import (WORLD_UP, Pose, as_vec3, cross3, look_at_rotation,
                       rotation_about_axis)

TWO_PI = 2.0 * math.pi

# |B - A| below this means single-subject (spherical) mode.
DEGENERATE_BASELINE_M = 1e-6

# AB within this of vertical uses the documented fallback h1 = +Z.
_VERTICAL_DOT_LIMIT = 1.0 - 1e-6

_X_AXIS = np.array([1.0, 0.0, 0.0])
_Z_AXIS = np.array([0.0, 0.0, 1.0])


def wrap_angle(angle: float) -> float:
    """Wrap into [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    return a + TWO_PI if a < 0 else a


class Easing(Enum):
    LINEAR = "LINEAR"
    SMOOTHSTEP = "SMOOTHSTEP"

    def apply(self, s: float) -> float:
        if not (0.0 <= s <= 1.0):
            raise DomainError(f"easing parameter must be in [0, 1], got {s}")
        if self is Easing.LINEAR:
            return s
        return s * s * (3.0 - 2.0 * s)


class ShotPreset(Enum):
    LONG = "LONG"
    MEDIUM = "MEDIUM"
    CLOSE_UP = "CLOSE_UP"


# Camera distance as a multiple of subject height, per preset. Chosen so the
# default 36 mm focal yields the named framings; verified by projection in
# the test suite rather than asserted here.
PRESET_DISTANCE_MULTIPLIER = {
    ShotPreset.LONG: 4.0,
    ShotPreset.MEDIUM: 1.5,
    ShotPreset.CLOSE_UP: 0.6,
}


@dataclass(frozen=True, eq=False)
class CineRig:
    """Two subject anchors plus the placement of the orbit center Q."""

    subject_a: np.ndarray
    subject_b: np.ndarray
    blend: float = 0.5
    rig_yaw: float = 0.0

    def __eq__(self, other):
        if not isinstance(other, CineRig):
            return NotImplemented
        return (np.array_equal(self.subject_a, other.subject_a)
                and np.array_equal(self.subject_b, other.subject_b)
                and self.blend == other.blend and self.rig_yaw == other.rig_yaw)

    def __post_init__(self):
        object.__setattr__(self, "subject_a", as_vec3(self.subject_a))
        object.__setattr__(self, "subject_b", as_vec3(self.subject_b))
        if not (0.0 <= self.blend <= 1.0):
            raise DomainError(f"blend must be in [0, 1], got {self.blend}")
        if not math.isfinite(self.rig_yaw):
            raise DomainError("rig_yaw must be finite")
        object.__setattr__(self, "_frame_cache", None)

    @property
    def baseline(self) -> float:
        """Subject separation |B - A| in meters."""
        delta = self.subject_b - self.subject_a
        return math.sqrt(float(delta @ delta))

    @property
    def is_degenerate(self) -> bool:
        return self.baseline < DEGENERATE_BASELINE_M

    def to_doc(self) -> dict:
        return {
            "subject_a": self.subject_a.tolist(),
            "subject_b": self.subject_b.tolist(),
            "blend": self.blend,
            "rig_yaw": self.rig_yaw,
        }

    @classmethod
    def from_doc(cls, doc: dict, path: str = "rig") -> "CineRig":
        return cls(
            subject_a=docio.require_list(doc, "subject_a", path),
            subject_b=docio.require_list(doc, "subject_b", path),
            blend=docio.require_number(doc, "blend", path) if "blend" in doc else 0.5,
            rig_yaw=docio.require_number(doc, "rig_yaw", path) if "rig_yaw" in doc else 0.0,
        )


@dataclass(frozen=True)
class CineSpaceParams:
    """A camera placement around a rig, plus focal and framing offset."""

    d: float
    theta: float
    phi: float
    focal_mm: float = 36.0
    screen_offset: float = 0.0

    def __post_init__(self):
        if not (self.d > 0 and math.isfinite(self.d)):
            raise DomainError(f"d must be a positive distance, got {self.d}")
        if not (abs(self.phi) < math.pi / 2):
            raise DomainError(f"phi must lie strictly inside +-pi/2, got {self.phi}")
        if not (self.focal_mm > 0 and math.isfinite(self.focal_mm)):
            raise DomainError(f"focal_mm must be positive, got {self.focal_mm}")
        for name in ("theta", "phi", "screen_offset"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def to_doc(self) -> dict:
        return {
            "d": self.d,
            "theta": self.theta,
            "phi": self.phi,
            "focal": self.focal_mm,
            "screen_offset": self.screen_offset,
        }

    @classmethod
    def from_doc(cls, doc: dict, path: str = "params") -> "CineSpaceParams":
        return cls(
            d=docio.require_number(doc, "d", path),
            theta=docio.require_number(doc, "theta", path),
            phi=docio.require_number(doc, "phi", path),
            focal_mm=docio.require_number(doc, "focal", path) if "focal" in doc else 36.0,
            screen_offset=(docio.require_number(doc, "screen_offset", path)
                           if "screen_offset" in doc else 0.0),
        )


@dataclass(frozen=True)
class RigFrame:
    """Orthonormal basis of a rig: two horizontal axes and world up."""

    h1: np.ndarray
    h2: np.ndarray
    w: np.ndarray
    center: np.ndarray


@dataclass(frozen=True)
class RigCoords:
    """Inverse-mapping result: orbital coordinates of an existing camera.

    ``at_pole`` flags a camera (anti)parallel to world up from Q, where theta
    is reported as 0 by convention and phi sits at the clamp.
    """

    d: float
    theta: float
    phi: float
    at_pole: bool = False


def rig_center(rig: CineRig) -> np.ndarray:
    """The orbit center Q = (1-blend)*A + blend*B."""
    return (1.0 - rig.blend) * rig.subject_a + rig.blend * rig.subject_b


def rig_frame(rig: CineRig) -> RigFrame:
    """Compute the rig basis {h1, h2, w} and center Q (cached per rig).

    h1 is horizontal and perpendicular to the A-B line (theta's zero
    direction), h2 is the horizontal projection of A->B, w is world up.
    Both horizontal axes are then rotated about w by rig_yaw. A vertical
    A-B line falls back to h1 = +Z before yaw; a degenerate rig (A == B)
    uses +X in place of the A-B direction.
    """
    cached = rig._frame_cache
    if cached is not None:
        return cached
    w = WORLD_UP
    if rig.is_degenerate:
        u = _X_AXIS
    else:
        u = (rig.subject_b - rig.subject_a) / rig.baseline
    if abs(float(u[1])) > _VERTICAL_DOT_LIMIT:  # u . w with w = +Y
        h1 = _Z_AXIS.copy()
    else:
        h1 = cross3(u, w)
        h1 = h1 / math.sqrt(float(h1 @ h1))
    h2 = cross3(w, h1)
    h2 = h2 / math.sqrt(float(h2 @ h2))
    if rig.rig_yaw != 0.0:
        r = rotation_about_axis(w, rig.rig_yaw)
        h1 = r @ h1
        h2 = r @ h2
    frame = RigFrame(h1=h1, h2=h2, w=w, center=rig_center(rig))
    object.__setattr__(rig, "_frame_cache", frame)
    return frame


def orbit_direction(frame: RigFrame, theta, phi) -> np.ndarray:
    """Unit direction(s) from Q toward the camera; broadcasts over angles."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    horiz = (cp * ct)[..., None] * frame.h1 + (cp * st)[..., None] * frame.h2
    return horiz + sp[..., None] * frame.w


def orbit_position(frame: RigFrame, d, theta, phi) -> np.ndarray:
    """Camera position(s) Q + d * direction; broadcasts over all arguments."""
    d = np.asarray(d, dtype=np.float64)
    return frame.center + d[..., None] * orbit_direction(frame, theta, phi)


def to_pose(rig: CineRig, params: CineSpaceParams) -> Pose:
    """Realize the orbital coordinates as a camera pose aimed at Q.

    The camera is aimed at Q with zero roll, then yawed about its own up
    axis by screen_offset; a positive offset pushes the subjects toward the
    right edge of frame without moving the camera.
    """
    frame = rig_frame(rig)
    p = orbit_position(frame, params.d, params.theta, params.phi)
    rot = look_at_rotation(p, frame.center)
    if params.screen_offset != 0.0:
        rot = rotation_about_axis(rot[:, 1], params.screen_offset) @ rot
    return Pose(rot, p)


def from_pose(rig: CineRig, pose: Pose) -> RigCoords:
    """Recover (d, theta, phi) of an existing camera relative to a rig."""
    frame = rig_frame(rig)
    v = pose.translation - frame.center
    d = math.sqrt(float(v @ v))
    if d < 1e-9:
        raise DegenerateError("camera position coincides with the rig center")
    direction = v / d
    vert = float(direction @ frame.w)
    if abs(vert) > 1.0 - 1e-9:
        phi = math.asin(max(-1.0, min(1.0, vert)))
        return RigCoords(d=d, theta=0.0, phi=phi, at_pole=True)
    phi = math.asin(vert)
    theta = math.atan2(float(direction @ frame.h2), float(direction @ frame.h1))
    return RigCoords(d=d, theta=wrap_angle(theta), phi=phi)


def interpolate(a: CineSpaceParams, b: CineSpaceParams, s: float,
                easing: Easing = Easing.LINEAR) -> CineSpaceParams:
    """Blend two placements at eased parameter e(s); theta takes the
    shortest angular arc. Endpoints are returned exactly."""
    e = easing.apply(s)
    if e == 0.0:
        return a
    if e == 1.0:
        return b
    dtheta = math.remainder(b.theta - a.theta, TWO_PI)
    return CineSpaceParams(
        d=a.d + (b.d - a.d) * e,
        theta=wrap_angle(a.theta + dtheta * e),
        phi=a.phi + (b.phi - a.phi) * e,
        focal_mm=a.focal_mm + (b.focal_mm - a.focal_mm) * e,
        screen_offset=a.screen_offset + (b.screen_offset - a.screen_offset) * e,
    )


def preset_params(preset: ShotPreset, subject_height_m: float) -> float:
    """Camera distance d realizing a framing preset for a subject height."""
    if not (subject_height_m > 0 and math.isfinite(subject_height_m)):
        raise DomainError(f"subject height must be positive, got {subject_height_m}")
    return PRESET_DISTANCE_MULTIPLIER[preset] * subject_height_m
