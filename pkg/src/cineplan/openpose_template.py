"""The 18-joint OpenPose body template: names, palette, limb list.

This is the canonical layout used by pose-conditioned diffusion pipelines.
Kept dependency-free so both the scene schema (joint mapping validation) and
the pose-map renderer can import it.
"""

OPENPOSE_JOINT_NAMES = (
    "nose", "neck",
    "right_shoulder", "right_elbow", "right_wrist",
    "left_shoulder", "left_elbow", "left_wrist",
    "right_hip", "right_knee", "right_ankle",
    "left_hip", "left_knee", "left_ankle",
    "right_eye", "left_eye", "right_ear", "left_ear",
)

# Canonical 18-entry RGB palette; joint i draws in OPENPOSE_PALETTE[i] and
# limb k draws in OPENPOSE_PALETTE[k].
OPENPOSE_PALETTE = (
    (255, 0, 0), (255, 85, 0), (255, 170, 0), (255, 255, 0),
    (170, 255, 0), (85, 255, 0), (0, 255, 0), (0, 255, 85),
    (0, 255, 170), (0, 255, 255), (0, 170, 255), (0, 85, 255),
    (0, 0, 255), (85, 0, 255), (170, 0, 255), (255, 0, 255),
    (255, 0, 170), (255, 0, 85),
)

# Canonical limb list as (joint, joint) index pairs into the template.
OPENPOSE_LIMBS = (
    (1, 2), (1, 5), (2, 3), (3, 4), (5, 6), (6, 7),
    (1, 8), (8, 9), (9, 10), (1, 11), (11, 12), (12, 13),
    (1, 0), (0, 14), (14, 16), (0, 15), (15, 17),
)
