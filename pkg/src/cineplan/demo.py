"""Built-in demo assets: a small walking-hero scene and one storyboard per
camera move. Everything is generated from closed-form expressions, so demo
outputs are bit-reproducible and tests can rely on them.

``python -m cineplan.demo OUT_DIR`` writes the same assets as JSON/OBJ files
for use with the CLI and the studio frontend.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np

from .behaviors import BehaviorKind, CameraBehavior, OrientationMode, ShotState
from .cinespace import CineRig, CineSpaceParams, Easing, to_pose
from .geometry import BezierCurve
from .scene import (AnimationClip, Character, SceneDoc, StaticMesh,
                    scene_to_doc)
from .storyboard import BoardMode, Keyframe, Storyboard, Timeline

DEMO_FPS = 24
DEMO_CLIP_FRAMES = 48

HERO_JOINTS = [
    ("hips", -1), ("spine", 0), ("neck", 1), ("head", 2),
    ("l_shoulder", 2), ("l_elbow", 4), ("l_wrist", 5),
    ("r_shoulder", 2), ("r_elbow", 7), ("r_wrist", 8),
    ("l_hip", 0), ("l_knee", 10), ("l_ankle", 11),
    ("r_hip", 0), ("r_knee", 13), ("r_ankle", 14),
]

HERO_JOINT_MAP = {
    "nose": "head", "neck": "neck",
    "right_shoulder": "r_shoulder", "right_elbow": "r_elbow",
    "right_wrist": "r_wrist",
    "left_shoulder": "l_shoulder", "left_elbow": "l_elbow",
    "left_wrist": "l_wrist",
    "right_hip": "r_hip", "right_knee": "r_knee", "right_ankle": "r_ankle",
    "left_hip": "l_hip", "left_knee": "l_knee", "left_ankle": "l_ankle",
}

# Rest pose: hero stands at the origin facing +X; left side is +Z.
_REST = {
    "hips": (0.0, 0.95, 0.0), "spine": (0.0, 1.2, 0.0),
    "neck": (0.0, 1.45, 0.0), "head": (0.0, 1.62, 0.0),
    "l_shoulder": (0.0, 1.42, 0.18), "l_elbow": (0.0, 1.16, 0.21),
    "l_wrist": (0.0, 0.92, 0.23),
    "r_shoulder": (0.0, 1.42, -0.18), "r_elbow": (0.0, 1.16, -0.21),
    "r_wrist": (0.0, 0.92, -0.23),
    "l_hip": (0.0, 0.92, 0.1), "l_knee": (0.0, 0.52, 0.11),
    "l_ankle": (0.0, 0.1, 0.12),
    "r_hip": (0.0, 0.92, -0.1), "r_knee": (0.0, 0.52, -0.11),
    "r_ankle": (0.0, 0.1, -0.12),
}

# Swing amplitude along the facing axis (+X) per joint, walking in place.
_SWING = {
    "l_elbow": -0.12, "l_wrist": -0.24, "r_elbow": 0.12, "r_wrist": 0.24,
    "l_knee": 0.14, "l_ankle": 0.3, "r_knee": -0.14, "r_ankle": -0.3,
}

ROCK_VERTICES = [
    [0.0, 0.0, 0.35], [0.3, 0.0, -0.2], [-0.3, 0.0, -0.2], [0.0, 0.55, 0.0],
]
ROCK_FACES = [[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]]


def _hero_clip() -> AnimationClip:
    names = [name for name, _ in HERO_JOINTS]
    frames = np.zeros((DEMO_CLIP_FRAMES, len(names), 3))
    for f in range(DEMO_CLIP_FRAMES):
        phase = 2.0 * math.pi * f / DEMO_FPS  # one stride per second
        bob = 0.02 * math.sin(2.0 * phase)
        for j, name in enumerate(names):
            x, y, z = _REST[name]
            x += _SWING.get(name, 0.0) * math.sin(phase)
            if name in ("l_ankle", "r_ankle"):
                lift = math.cos(phase) if name == "l_ankle" else -math.cos(phase)
                y += 0.05 * max(0.0, lift)
            frames[f, j] = (x, y + bob, z)
    return AnimationClip(fps=DEMO_FPS, frames=frames)


def _box(object_id, name, center, size) -> StaticMesh:
    cx, cy, cz = center
    sx, sy, sz = size[0] / 2.0, size[1] / 2.0, size[2] / 2.0
    verts = [(cx + dx * sx, cy + dy * sy, cz + dz * sz)
             for dx in (-1, 1) for dy in (-1, 1) for dz in (-1, 1)]
    faces = [
        (0, 1, 3), (0, 3, 2), (4, 6, 7), (4, 7, 5),  # x faces
        (0, 4, 5), (0, 5, 1), (2, 3, 7), (2, 7, 6),  # y faces
        (0, 2, 6), (0, 6, 4), (1, 5, 7), (1, 7, 3),  # z faces
    ]
    return StaticMesh(object_id=object_id, name=name, vertices=verts, faces=faces)


def build_demo_scene() -> SceneDoc:
    ground = StaticMesh(
        object_id="ground", name="Ground",
        vertices=[(-10.0, 0.0, -10.0), (10.0, 0.0, -10.0),
                  (10.0, 0.0, 10.0), (-10.0, 0.0, 10.0)],
        faces=[(0, 1, 2), (0, 2, 3)],
    )
    pillar = _box("pillar", "Pillar", center=(1.5, 0.9, 0.0), size=(0.6, 1.8, 0.6))
    rock = StaticMesh(object_id="rock", name="Rock", vertices=ROCK_VERTICES,
                      faces=ROCK_FACES, translation=np.array([-1.2, 0.0, 0.9]))
    hero = Character(
        object_id="hero", name="Hero",
        joint_names=[n for n, _ in HERO_JOINTS],
        joint_parents=[p for _, p in HERO_JOINTS],
        clip=_hero_clip(),
        joint_map=dict(HERO_JOINT_MAP),
        bone_radius_m=0.06,
        subject_height_m=1.7,
    )
    return SceneDoc(objects=(ground, pillar, rock, hero))


def build_demo_rig() -> CineRig:
    return CineRig(subject_a=(0.0, 0.9, 0.0), subject_b=(1.5, 0.9, 0.0), blend=0.5)


def demo_initial_state(d: float = 5.0) -> ShotState:
    return ShotState(cine=CineSpaceParams(d=d, theta=0.0, phi=0.25, focal_mm=36.0))


def build_push_in_board() -> Storyboard:
    return Storyboard(
        id="push_in", rig=build_demo_rig(), initial=demo_initial_state(5.0),
        behaviors=(CameraBehavior(BehaviorKind.PUSH_IN, duration_s=2.0,
                                  magnitude=0.5),),
        fps=DEMO_FPS,
    )


def build_frame_board() -> Storyboard:
    return Storyboard(
        id="keyframed", rig=build_demo_rig(), initial=demo_initial_state(4.0),
        mode=BoardMode.FRAME,
        keyframes=(
            Keyframe(frame=0, params=CineSpaceParams(d=4.0, theta=0.0, phi=0.2),
                     easing_to_next=Easing.LINEAR),
            Keyframe(frame=24, params=CineSpaceParams(d=5.0, theta=math.pi / 4,
                                                      phi=0.3)),
            Keyframe(frame=48, params=CineSpaceParams(d=3.5, theta=math.pi / 2,
                                                      phi=0.15, focal_mm=45.0)),
        ),
        fps=DEMO_FPS,
    )


_BEHAVIOR_RECIPES = {
    BehaviorKind.STATIC: dict(magnitude=0.0),
    BehaviorKind.PUSH_IN: dict(magnitude=0.5),
    BehaviorKind.PULL_OUT: dict(magnitude=0.5),
    BehaviorKind.ZOOM_IN: dict(magnitude=1.5),
    BehaviorKind.ZOOM_OUT: dict(magnitude=1.5),
    BehaviorKind.DOLLY_ZOOM: dict(magnitude=1.8),
    BehaviorKind.PAN_LEFT: dict(magnitude=0.4),
    BehaviorKind.PAN_RIGHT: dict(magnitude=0.4),
    BehaviorKind.TILT_UP: dict(magnitude=0.3),
    BehaviorKind.TILT_DOWN: dict(magnitude=0.3),
    BehaviorKind.TRUCK: dict(magnitude=0.8),
    BehaviorKind.BOOM_UP: dict(magnitude=0.6),
    BehaviorKind.BOOM_DOWN: dict(magnitude=0.4),
    BehaviorKind.ARC: dict(magnitude=math.pi / 2),
}


def build_board_for(kind: BehaviorKind, duration_s: float = 1.0) -> Storyboard:
    """A one-behavior SHOT board exercising the given kind on the demo rig."""
    rig = build_demo_rig()
    initial = demo_initial_state(5.0)
    if kind is BehaviorKind.TRACKING:
        start = to_pose(rig, initial.cine).translation
        track = BezierCurve((
            tuple(start),
            (start[0] - 1.0, start[1], start[2] - 1.0),
            (start[0] - 2.5, start[1] + 0.3, start[2] - 1.5),
            (start[0] - 4.0, start[1] + 0.5, start[2] - 1.0),
        ))
        behavior = CameraBehavior(kind, duration_s=duration_s, track=track,
                                  orientation_mode=OrientationMode.LOOK_AT_Q)
    else:
        behavior = CameraBehavior(kind, duration_s=duration_s,
                                  **_BEHAVIOR_RECIPES[kind])
    return Storyboard(id=f"demo_{kind.value.lower()}", rig=rig, initial=initial,
                      behaviors=(behavior,), fps=DEMO_FPS)


def build_demo_timeline() -> Timeline:
    return Timeline(storyboard_ids=("push_in", "demo_arc"), fps=DEMO_FPS)


def default_prompts() -> list:
    return [
        {"target": "shot", "prompt": "cinematic previsualization, soft light"},
        {"target": "environment", "prompt": "stone courtyard at dusk"},
        {"target": "hero", "prompt": "a wandering knight in worn armor"},
        {"target": "pillar", "prompt": "an ancient carved pillar"},
    ]


def write_demo_files(out_dir) -> dict:
    """Write scene + storyboards + timeline as CLI-consumable files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    obj_lines = ["# demo rock"]
    for v in ROCK_VERTICES:
        obj_lines.append(f"v {v[0]} {v[1]} {v[2]}")
    for f in ROCK_FACES:
        obj_lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    (out / "rock.obj").write_text("\n".join(obj_lines) + "\n")

    scene_doc = scene_to_doc(build_demo_scene())
    for obj in scene_doc["objects"]:
        if obj["object_id"] == "rock":
            for key in ("vertices", "faces"):
                del obj[key]
            obj["obj_file"] = "rock.obj"
    paths = {"scene": out / "scene.json"}
    paths["scene"].write_text(json.dumps(scene_doc, indent=2) + "\n")

    boards = [build_push_in_board(), build_frame_board(),
              build_board_for(BehaviorKind.ARC, duration_s=2.0)]
    for board in boards:
        path = out / f"board_{board.id}.json"
        path.write_text(json.dumps(board.to_doc(), indent=2) + "\n")
        paths[board.id] = path
    paths["timeline"] = out / "timeline.json"
    paths["timeline"].write_text(json.dumps(build_demo_timeline().to_doc(),
                                            indent=2) + "\n")
    paths["prompts"] = out / "prompts.json"
    paths["prompts"].write_text(json.dumps(default_prompts(), indent=2) + "\n")
    return paths


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "demo"
    written = write_demo_files(target)
    for name, path in written.items():
        print(f"{name}: {path}")
