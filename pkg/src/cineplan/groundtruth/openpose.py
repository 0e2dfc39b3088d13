"""OpenPose 18-joint template: projection of skeletons and pose-map drawing.

The template is the standard 18-keypoint body layout used by pose-conditioned
diffusion pipelines. Joint order, the RGB palette, and the limb list below
are the canonical ones, committed explicitly so the rendered pose maps are
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..geometry import CameraIntrinsics, Pose, ndc_to_pixel, project_points
from ..openpose_template import (OPENPOSE_JOINT_NAMES, OPENPOSE_LIMBS,
                                 OPENPOSE_PALETTE)
from ..scene import joints_at_time

KEYPOINT_RADIUS_PX = 4.0
LIMB_THICKNESS_PX = 4.0


@dataclass(frozen=True)
class Keypoint:
    name: str
    x: float
    y: float
    visible: bool


@dataclass(frozen=True)
class KeypointSet:
    """Exactly 18 keypoints, in template order; unmapped joints are invisible."""

    keypoints: tuple

    def __post_init__(self):
        kp = tuple(self.keypoints)
        if len(kp) != 18:
            raise ValidationError(f"a keypoint set has 18 slots, got {len(kp)}")
        for k, expected in zip(kp, OPENPOSE_JOINT_NAMES):
            if k.name != expected:
                raise ValidationError(
                    f"keypoint order mismatch: got {k.name!r}, expected {expected!r}")
        object.__setattr__(self, "keypoints", kp)

    def __getitem__(self, name: str) -> Keypoint:
        return self.keypoints[OPENPOSE_JOINT_NAMES.index(name)]

    def to_doc(self) -> list:
        return [{"name": k.name, "x": k.x, "y": k.y, "visible": k.visible}
                for k in self.keypoints]

    @classmethod
    def from_doc(cls, joints: list) -> "KeypointSet":
        return cls(tuple(Keypoint(j["name"], float(j["x"]), float(j["y"]),
                                  bool(j["visible"])) for j in joints))


def project_keypoints(char, t_s: float, pose: Pose, intr: CameraIntrinsics,
                      width: int, height: int) -> KeypointSet:
    """Project a character's mapped joints onto the template.

    A slot is visible when its joint is mapped, in front of the camera, and
    inside the image rectangle; unmapped or behind-camera slots report (0, 0).
    """
    positions = joints_at_time(char, t_s)
    keypoints = []
    for name in OPENPOSE_JOINT_NAMES:
        joint_name = char.joint_map.get(name)
        if joint_name is None:
            keypoints.append(Keypoint(name, 0.0, 0.0, False))
            continue
        p = positions[char.joint_index(joint_name)]
        ndc_x, ndc_y, depth = project_points(p, pose.rotation, pose.translation, intr)
        if depth <= 1e-9:
            keypoints.append(Keypoint(name, 0.0, 0.0, False))
            continue
        px, py = ndc_to_pixel(float(ndc_x), float(ndc_y), width, height)
        visible = 0.0 <= px <= width and 0.0 <= py <= height
        keypoints.append(Keypoint(name, px, py, visible))
    return KeypointSet(tuple(keypoints))


def _paint_disc(canvas: np.ndarray, x: float, y: float, radius: float, color) -> None:
    h, w = canvas.shape[:2]
    i0 = max(0, int(np.floor(y - radius - 1.0)))
    i1 = min(h - 1, int(np.ceil(y + radius)))
    j0 = max(0, int(np.floor(x - radius - 1.0)))
    j1 = min(w - 1, int(np.ceil(x + radius)))
    if i0 > i1 or j0 > j1:
        return
    jj, ii = np.meshgrid(np.arange(j0, j1 + 1), np.arange(i0, i1 + 1))
    cx, cy = jj + 0.5, ii + 0.5
    hit = (cx - x) ** 2 + (cy - y) ** 2 <= radius * radius
    canvas[i0:i1 + 1, j0:j1 + 1][hit] = color


def _paint_segment(canvas: np.ndarray, x0, y0, x1, y1, thickness: float, color) -> None:
    h, w = canvas.shape[:2]
    half = thickness / 2.0
    i0 = max(0, int(np.floor(min(y0, y1) - half - 1.0)))
    i1 = min(h - 1, int(np.ceil(max(y0, y1) + half)))
    j0 = max(0, int(np.floor(min(x0, x1) - half - 1.0)))
    j1 = min(w - 1, int(np.ceil(max(x0, x1) + half)))
    if i0 > i1 or j0 > j1:
        return
    jj, ii = np.meshgrid(np.arange(j0, j1 + 1), np.arange(i0, i1 + 1))
    cx, cy = jj + 0.5, ii + 0.5
    dx, dy = x1 - x0, y1 - y0
    seg_len2 = dx * dx + dy * dy
    if seg_len2 < 1e-12:
        t = np.zeros_like(cx)
    else:
        t = np.clip(((cx - x0) * dx + (cy - y0) * dy) / seg_len2, 0.0, 1.0)
    dist2 = (cx - (x0 + t * dx)) ** 2 + (cy - (y0 + t * dy)) ** 2
    canvas[i0:i1 + 1, j0:j1 + 1][dist2 <= half * half] = color


def render_pose_map(keypoint_sets: list, width: int, height: int) -> np.ndarray:
    """Draw skeletons on black, in list order (later sets paint over earlier).

    Per set: limbs with both endpoints visible first, then the visible
    keypoint discs on top, colors from the canonical palette.
    """
    canvas = np.zeros((height, width, 3), dtype=np.uint8)
    for kp_set in keypoint_sets:
        kp = kp_set.keypoints
        for limb_index, (a, b) in enumerate(OPENPOSE_LIMBS):
            ka, kb = kp[a], kp[b]
            if ka.visible and kb.visible:
                _paint_segment(canvas, ka.x, ka.y, kb.x, kb.y,
                               LIMB_THICKNESS_PX, OPENPOSE_PALETTE[limb_index])
        for joint_index, k in enumerate(kp):
            if k.visible:
                _paint_disc(canvas, k.x, k.y, KEYPOINT_RADIUS_PX,
                            OPENPOSE_PALETTE[joint_index])
    return canvas
