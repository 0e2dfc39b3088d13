"""Software z-buffer rasterizer producing metric depth and object-id buffers.

Everything renders through one triangle pipeline: static meshes directly,
characters via tessellated bone capsules. Pixels sample at their centers
(i+0.5, j+0.5); depth is the camera-space distance along -Z in meters and
interpolates perspective-correctly (linear in 1/z in screen space), so a
planar triangle's rasterized depth equals the exact ray-plane intersection
up to floating-point rounding. No anti-aliasing, no backface culling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..geometry import CameraIntrinsics, Pose
from ..scene import SceneDoc, bone_capsules

BACKGROUND = -1

# Capsule tessellation: 12 verts per ring, hemispherical caps in 3 latitude
# steps each (6 axial steps over the two caps) plus the cylinder band.
RADIAL_SEGMENTS = 12
CAP_SEGMENTS = 3


@dataclass(frozen=True)
class DepthBuffer:
    """Row-major metric depth in meters; +inf marks background."""

    values: np.ndarray  # (H, W) float32

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class IdBuffer:
    """Per-pixel index into ``object_ids``; BACKGROUND (-1) elsewhere.

    ``object_ids`` lists every object of the rendered scene, covered or not,
    so masks for fully occluded objects are valid (empty) rather than errors.
    """

    indices: np.ndarray  # (H, W) int32
    object_ids: tuple

    @property
    def width(self) -> int:
        return self.indices.shape[1]

    @property
    def height(self) -> int:
        return self.indices.shape[0]


def tessellate_capsule(p0, p1, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Triangulate a capsule from p0 to p1 (vertices, faces)."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    axis = p1 - p0
    length = float(np.linalg.norm(axis))
    if length > 1e-12:
        az = axis / length
    else:
        az = np.array([0.0, 1.0, 0.0])
    helper = np.array([1.0, 0.0, 0.0]) if abs(az[0]) < 0.9 else np.array([0.0, 0.0, 1.0])
    ax = np.cross(az, helper)
    ax /= np.linalg.norm(ax)
    ay = np.cross(az, ax)

    angles = np.linspace(0.0, 2.0 * math.pi, RADIAL_SEGMENTS, endpoint=False)
    circle = np.cos(angles)[:, None] * ax + np.sin(angles)[:, None] * ay

    vertices = [p0 - radius * az]
    rings = []
    for k in range(1, CAP_SEGMENTS + 1):
        lat = -math.pi / 2 + (math.pi / 2) * k / CAP_SEGMENTS
        center = p0 + radius * math.sin(lat) * az
        rings.append(center + radius * math.cos(lat) * circle)
    for k in range(0, CAP_SEGMENTS):
        lat = (math.pi / 2) * k / CAP_SEGMENTS
        center = p1 + radius * math.sin(lat) * az
        rings.append(center + radius * math.cos(lat) * circle)
    for ring in rings:
        vertices.extend(ring)
    vertices.append(p1 + radius * az)
    vertices = np.asarray(vertices)

    n = RADIAL_SEGMENTS
    faces = []
    ring_start = lambda r: 1 + r * n
    for j in range(n):  # bottom fan
        faces.append((0, ring_start(0) + j, ring_start(0) + (j + 1) % n))
    for r in range(len(rings) - 1):  # bands (cap steps + cylinder)
        a, b = ring_start(r), ring_start(r + 1)
        for j in range(n):
            j1 = (j + 1) % n
            faces.append((a + j, b + j, b + j1))
            faces.append((a + j, b + j1, a + j1))
    top = len(vertices) - 1
    last = ring_start(len(rings) - 1)
    for j in range(n):  # top fan
        faces.append((top, last + (j + 1) % n, last + j))
    return vertices, np.asarray(faces, dtype=np.int64)


def _scene_triangles(scene: SceneDoc, t_s: float):
    """Yield (object_index, world vertices (N,3), faces (M,3)) per object."""
    for index, obj in enumerate(scene.objects):
        if hasattr(obj, "world_vertices"):
            yield index, obj.world_vertices(), obj.faces
        else:
            verts, faces = [], []
            offset = 0
            for p0, p1, radius in bone_capsules(obj, t_s):
                v, f = tessellate_capsule(p0, p1, radius)
                verts.append(v)
                faces.append(f + offset)
                offset += len(v)
            if verts:
                yield index, np.vstack(verts), np.vstack(faces)


def _clip_near(tri_cam: np.ndarray, near: float) -> list:
    """Sutherland-Hodgman clip of one camera-space triangle against z = -near.

    Returns 0..2 triangles entirely in front of the near plane.
    """
    keep = tri_cam[:, 2] <= -near
    if np.all(keep):
        return [tri_cam]
    if not np.any(keep):
        return []
    poly = []
    for i in range(3):
        a, b = tri_cam[i], tri_cam[(i + 1) % 3]
        ka, kb = keep[i], keep[(i + 1) % 3]
        if ka:
            poly.append(a)
        if ka != kb:
            t = (-near - a[2]) / (b[2] - a[2])
            poly.append(a + t * (b - a))
    tris = []
    for i in range(1, len(poly) - 1):
        tris.append(np.stack([poly[0], poly[i], poly[i + 1]]))
    return tris


def rasterize(scene: SceneDoc, t_s: float, pose: Pose, intr: CameraIntrinsics,
              width: int, height: int) -> tuple[DepthBuffer, IdBuffer]:
    """Z-buffer render of every triangle and bone capsule; nearest wins."""
    if width <= 0 or height <= 0:
        raise DomainError(f"image dimensions must be positive, got {width}x{height}")
    depth = np.full((height, width), np.inf, dtype=np.float64)
    ids = np.full((height, width), BACKGROUND, dtype=np.int32)

    k = intr.tan_half_hfov
    rot, trans = pose.rotation, pose.translation
    half_w, half_h = width / 2.0, height / 2.0

    for obj_index, world_verts, faces in _scene_triangles(scene, t_s):
        cam = (world_verts - trans) @ rot
        for face in faces:
            for tri in _clip_near(cam[face], intr.near_m):
                _raster_triangle(tri, obj_index, depth, ids, k, intr.aspect,
                                 half_w, half_h)

    return (DepthBuffer(values=depth.astype(np.float32)),
            IdBuffer(indices=ids, object_ids=scene.object_ids))


def _raster_triangle(tri_cam, obj_index, depth, ids, k, aspect, half_w, half_h):
    z = -tri_cam[:, 2]  # positive metric depth, >= near after clipping
    px = (tri_cam[:, 0] / (z * k) + 1.0) * half_w
    py = (1.0 - tri_cam[:, 1] * aspect / (z * k)) * half_h

    height, width = depth.shape
    i0 = max(0, int(math.ceil(py.min() - 0.5)))
    i1 = min(height - 1, int(math.floor(py.max() - 0.5)))
    j0 = max(0, int(math.ceil(px.min() - 0.5)))
    j1 = min(width - 1, int(math.floor(px.max() - 0.5)))
    if i0 > i1 or j0 > j1:
        return

    area = (px[1] - px[0]) * (py[2] - py[0]) - (px[2] - px[0]) * (py[1] - py[0])
    if abs(area) < 1e-12:
        return

    jj, ii = np.meshgrid(np.arange(j0, j1 + 1, dtype=np.float64),
                         np.arange(i0, i1 + 1, dtype=np.float64))
    cx, cy = jj + 0.5, ii + 0.5
    w0 = (px[2] - px[1]) * (cy - py[1]) - (py[2] - py[1]) * (cx - px[1])
    w1 = (px[0] - px[2]) * (cy - py[2]) - (py[0] - py[2]) * (cx - px[2])
    w2 = (px[1] - px[0]) * (cy - py[0]) - (py[1] - py[0]) * (cx - px[0])
    if area > 0:
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
    else:
        inside = (w0 <= 0) & (w1 <= 0) & (w2 <= 0)
    if not inside.any():
        return

    l0, l1, l2 = w0 / area, w1 / area, w2 / area
    inv_z = l0 / z[0] + l1 / z[1] + l2 / z[2]
    with np.errstate(divide="ignore"):
        pixel_depth = 1.0 / inv_z

    window_d = depth[i0:i1 + 1, j0:j1 + 1]
    window_i = ids[i0:i1 + 1, j0:j1 + 1]
    win = inside & (pixel_depth < window_d)
    window_d[win] = pixel_depth[win]
    window_i[win] = obj_index


def masks_from_ids(ids: IdBuffer, object_id: str) -> np.ndarray:
    """Binary mask (uint8, 255 = object) for one object of the buffer's scene."""
    if object_id not in ids.object_ids:
        raise DomainError(f"object {object_id!r} is not in the rendered scene")
    index = ids.object_ids.index(object_id)
    return np.where(ids.indices == index, 255, 0).astype(np.uint8)


def encode_depth16(depth, near: float, far: float) -> np.ndarray:
    """Normalize metric depth to 16 bits, inverse-depth style (near = bright).

    v = round(65535 * clamp((1/z - 1/far) / (1/near - 1/far), 0, 1));
    the background sentinel maps to 0.
    """
    if not (0 < near < far):
        raise DomainError(f"need 0 < near < far, got {near}, {far}")
    values = depth.values if isinstance(depth, DepthBuffer) else np.asarray(depth)
    z = values.astype(np.float64)
    with np.errstate(divide="ignore"):
        t = (1.0 / z - 1.0 / far) / (1.0 / near - 1.0 / far)
    t = np.clip(t, 0.0, 1.0)
    t[~np.isfinite(z)] = 0.0
    return np.rint(65535.0 * t).astype(np.uint16)


def color_ids(ids: IdBuffer) -> np.ndarray:
    """Stable distinct color per object index; background stays black."""
    h, w = ids.indices.shape
    canvas = np.zeros((h, w, 3), dtype=np.uint8)
    for index in range(len(ids.object_ids)):
        canvas[ids.indices == index] = _distinct_color(index)
    return canvas


def _distinct_color(index: int) -> tuple:
    hue = (index * 0.618033988749895) % 1.0
    i = int(hue * 6.0)
    f = hue * 6.0 - i
    v, p, q, t = 255, int(255 * 0.25), int(255 * (1 - 0.75 * f)), int(255 * (0.25 + 0.75 * f))
    return [(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)][i % 6]
