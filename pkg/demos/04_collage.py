"""Collaging ground truth from different times into new frames.

Exports the demo hero twice, offset in time, then composites both layers:
per pixel the nearer surface wins, so the two "copies" of the hero occlude
each other correctly, and the pose maps follow their masks.
"""

import sys
from dataclasses import replace
from pathlib import Path

from cineplan import CameraIntrinsics, generate
from cineplan.behaviors import BehaviorKind
from cineplan.demo import build_board_for, build_demo_scene, build_push_in_board
from cineplan.groundtruth import CollageLayer, collage, export_bundle

root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_collage")
scene = build_demo_scene()
intr = CameraIntrinsics(focal_mm=36.0, aspect=1.0)

push = generate(replace(build_push_in_board(), fps=4))   # 8 frames
arc = generate(replace(build_board_for(BehaviorKind.ARC, duration_s=2.0),
                       fps=4))                            # 8 frames

m_push = export_bundle(scene, push, intr, 256, 256, [], root / "push")
m_arc = export_bundle(scene, arc, intr, 256, 256, [], root / "arc")

doc = collage(
    [
        # environment from the push-in at its final, closest frames
        CollageLayer(manifest=m_push, frames=(7,) * 8,
                     objects=("ground", "pillar", "rock")),
        # the hero as seen by the arcing camera, all 8 frames
        CollageLayer(manifest=m_arc, frames=tuple(range(8)),
                     objects=("hero",)),
    ],
    256, 256, root / "composite",
)
print(f"composited {doc['frames']} frames into {root / 'composite'}/")
print("  a still environment from one shot now hosts a hero filmed by another")
