"""Tour of the two-subject camera space.

Places a camera around two subjects with (d, theta, phi), shows that both
subjects stay in frame across the whole orbit grid, inverts an existing
camera back to its coordinates, and applies the framing presets.
"""

import math

import numpy as np

from cineplan import (CameraIntrinsics, CineRig, CineSpaceParams, ShotPreset,
                      from_pose, in_frustum, preset_params, to_pose)

rig = CineRig(subject_a=(-0.8, 0.9, 0.0), subject_b=(0.8, 0.9, 0.4), blend=0.5)
intr = CameraIntrinsics(focal_mm=36.0 / (2 * math.tan(math.radians(30))),
                        aspect=16 / 9)

print("== orbit grid keeps both subjects framed ==")
misses = 0
for theta in np.linspace(0.0, 2.0 * math.pi, 36, endpoint=False):
    for phi in np.radians(np.linspace(-80, 80, 9)):
        pose = to_pose(rig, CineSpaceParams(d=4.5, theta=theta, phi=phi))
        if not (in_frustum(rig.subject_a, pose, intr)
                and in_frustum(rig.subject_b, pose, intr)):
            misses += 1
print(f"  checked 324 placements, subjects out of frame: {misses}")

print("== placing and inverting a camera ==")
params = CineSpaceParams(d=5.0, theta=0.7, phi=0.3, focal_mm=36.0)
pose = to_pose(rig, params)
print(f"  camera position: {np.round(pose.translation, 3)}")
coords = from_pose(rig, pose)
print(f"  recovered (d, theta, phi) = "
      f"({coords.d:.6f}, {coords.theta:.6f}, {coords.phi:.6f})")

print("== framing presets (distance as a multiple of subject height) ==")
for preset in ShotPreset:
    d = preset_params(preset, subject_height_m=1.8)
    print(f"  {preset.value:<9} -> d = {d:.2f} m")
