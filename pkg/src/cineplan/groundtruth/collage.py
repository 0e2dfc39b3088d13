"""Compositing exported bundles from different shots/times into new frames.

Each collage layer selects a frame range and an object subset from one
exported bundle. Per output pixel, among the layers whose selected-object
masks cover it, the layer with the smallest metric depth wins; the composite
inherits that layer's depth and object identity. Pose maps are re-rendered
from every selected character's keypoint document, in layer order, so
skeletons ride along with their masks. Collaging a single full layer
reproduces its depth16, pose map and mask files byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DomainError, ValidationError
from . import netpbm
from .export import BundleManifest, keypoints_from_doc
from .raster import encode_depth16


@dataclass(frozen=True)
class CollageLayer:
    manifest: BundleManifest
    frames: tuple  # explicit frame indices into the bundle
    objects: tuple  # object subset contributing to the composite

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(int(f) for f in self.frames))
        object.__setattr__(self, "objects", tuple(self.objects))


def _as_layer(entry) -> CollageLayer:
    if isinstance(entry, CollageLayer):
        return entry
    manifest, frames, objects = entry
    return CollageLayer(manifest=manifest, frames=tuple(frames), objects=tuple(objects))


def collage(layers: list, width: int, height: int, out_dir) -> dict:
    """Composite layer stacks into a new conditioning sequence on disk."""
    layers = [_as_layer(entry) for entry in layers]
    if not layers:
        raise ValidationError("collage needs at least one layer")
    n = len(layers[0].frames)
    for li, layer in enumerate(layers):
        m = layer.manifest
        if (m.width, m.height) != (width, height):
            raise DomainError(
                f"layers[{li}] bundle is {m.width}x{m.height}, collage wants "
                f"{width}x{height}")
        if len(layer.frames) != n:
            raise DomainError(
                f"layers[{li}] selects {len(layer.frames)} frames, "
                f"layers[0] selects {n}")
        for f in layer.frames:
            if not (0 <= f < m.frames):
                raise DomainError(f"layers[{li}] frame {f} out of range 0..{m.frames - 1}")
        for oid in layer.objects:
            if oid not in m.frame_records[0]["files"]["masks"]:
                raise DomainError(f"layers[{li}] object {oid!r} has no masks in bundle")

    near = layers[0].manifest.intrinsics["near_m"]
    far = layers[0].manifest.intrinsics["far_m"]
    out = Path(out_dir)
    for sub in ("depth16", "pose", "masks"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    frame_records = []
    for k in range(n):
        record = _composite_frame(layers, k, width, height, near, far, out)
        frame_records.append(record)

    doc = {
        "frames": n,
        "width": width,
        "height": height,
        "near_m": near,
        "far_m": far,
        "layers": [{"frames": list(l.frames), "objects": list(l.objects)}
                   for l in layers],
        "frame_records": frame_records,
    }
    (out / "collage.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def _composite_frame(layers, k, width, height, near, far, out: Path) -> dict:
    depth_stack = []
    object_masks = []  # (layer_index, object_id, bool mask)
    keypoint_sets = []
    for li, layer in enumerate(layers):
        fi = layer.frames[k]
        m = layer.manifest
        depth = netpbm.read_pfm(m.frame_file(fi, "depth_pfm"))
        selected = np.zeros(depth.shape, dtype=bool)
        for oid in layer.objects:
            mask = netpbm.read_pnm(m.frame_file(fi, "masks", oid)) > 0
            object_masks.append((li, oid, mask))
            selected |= mask
        depth_stack.append(np.where(selected, depth.astype(np.float64), np.inf))
        kp_doc = json.loads(m.frame_file(fi, "keypoints").read_text())
        for oid, ks in keypoints_from_doc(kp_doc):
            if oid in layer.objects:
                keypoint_sets.append(ks)

    stack = np.stack(depth_stack)
    winner = np.argmin(stack, axis=0)
    composite_depth = np.min(stack, axis=0)
    covered = np.isfinite(composite_depth)
    composite_depth32 = np.where(covered, composite_depth, np.inf).astype(np.float32)

    files = {
        "depth16": f"depth16/depth16_{k:06d}.pgm",
        "pose_map": f"pose/pose_{k:06d}.ppm",
        "masks": {},
    }
    depth16 = encode_depth16(composite_depth32, near, far)
    netpbm.write_bytes(out / files["depth16"], netpbm.encode_pgm16(depth16))

    from .openpose import render_pose_map

    pose_map = render_pose_map(keypoint_sets, width, height)
    netpbm.write_bytes(out / files["pose_map"], netpbm.encode_ppm(pose_map))

    merged = {}
    for li, oid, mask in object_masks:
        wins = covered & (winner == li) & mask
        merged[oid] = merged.get(oid, np.zeros(mask.shape, dtype=bool)) | wins
    for oid, mask in merged.items():
        rel = f"masks/{oid}_{k:06d}.pgm"
        files["masks"][oid] = rel
        netpbm.write_bytes(out / rel,
                           netpbm.encode_pgm8(np.where(mask, 255, 0).astype(np.uint8)))
    return {"files": files}
