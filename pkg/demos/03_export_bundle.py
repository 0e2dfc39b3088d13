"""Exporting a diffusion-ready conditioning bundle.

Renders the demo scene along the push-in storyboard and writes metric depth
(PFM), normalized 16-bit depth (PGM), OpenPose-template pose maps (PPM),
one mask per object, per-frame keypoints, and the manifest binding prompts
to masks. Everything is deterministic: re-running yields identical bytes.
"""

import sys
from dataclasses import replace
from pathlib import Path

from cineplan import CameraIntrinsics, generate
from cineplan.demo import (build_demo_scene, build_push_in_board,
                           default_prompts)
from cineplan.groundtruth import export_bundle

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_bundle")
scene = build_demo_scene()
board = replace(build_push_in_board(), fps=6)  # 12 frames for a quick demo
asset = generate(board)

manifest = export_bundle(
    scene, asset,
    CameraIntrinsics(focal_mm=36.0, aspect=1.0),
    width=256, height=256,
    prompts=default_prompts(),
    out_dir=out,
)

print(f"exported {manifest.frames} frames to {out}/")
for sub in ("depth", "depth16", "pose", "masks", "keypoints"):
    n = len(list((out / sub).iterdir()))
    print(f"  {sub:<10} {n} files")
print("prompt bindings:")
for binding in manifest.prompt_bindings:
    pattern = binding["mask_pattern"] or "(whole frame)"
    print(f"  {binding['target']:<12} {pattern:<24} {binding['prompt'][:40]!r}")
