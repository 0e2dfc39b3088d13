"""Ground-truth conditioning exports: rasterizer, image codecs, bundles."""

from .collage import CollageLayer, collage
from .export import (BundleManifest, FrameRender, export_bundle,
                     keypoints_doc, keypoints_from_doc, render_frame,
                     validate_prompts)
from .netpbm import (decode_pfm, decode_pnm, encode_pfm, encode_pgm8,
                     encode_pgm16, encode_ppm, read_pfm, read_pnm, write_bytes)
from .openpose import (KEYPOINT_RADIUS_PX, LIMB_THICKNESS_PX, OPENPOSE_JOINT_NAMES,
                       OPENPOSE_LIMBS, OPENPOSE_PALETTE, Keypoint, KeypointSet,
                       project_keypoints, render_pose_map)
from .raster import (BACKGROUND, DepthBuffer, IdBuffer, color_ids,
                     encode_depth16, masks_from_ids, rasterize,
                     tessellate_capsule)

__all__ = [
    "BACKGROUND", "BundleManifest", "CollageLayer", "DepthBuffer",
    "FrameRender", "IdBuffer", "KEYPOINT_RADIUS_PX", "Keypoint",
    "KeypointSet", "LIMB_THICKNESS_PX", "OPENPOSE_JOINT_NAMES",
    "OPENPOSE_LIMBS", "OPENPOSE_PALETTE", "collage", "color_ids",
    "decode_pfm", "decode_pnm", "encode_depth16", "encode_pfm",
    "encode_pgm16", "encode_pgm8", "encode_ppm", "export_bundle",
    "keypoints_doc", "keypoints_from_doc", "masks_from_ids",
    "project_keypoints", "rasterize", "read_pfm", "read_pnm",
    "render_frame", "render_pose_map", "tessellate_capsule",
    "validate_prompts", "write_bytes",
]
