"""Per-shot conditioning bundle export: depth, pose maps, masks, manifest.

A bundle is one directory per shot::

    out_dir/
      depth/depth_000000.pfm        float32 metric depth (background = +inf)
      depth16/depth16_000000.pgm    16-bit normalized inverse depth
      pose/pose_000000.ppm          OpenPose-template pose map
      masks/<object>_000000.pgm     one binary mask per scene object
      keypoints/keypoints_000000.json
      manifest.json                 written last: its presence marks a
                                    complete export

The manifest binds prompts to masks so a downstream diffusion pipeline can
constrain each prompt to its own region, and records the exact camera matrix
and focal used per frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DomainError, ExportError, SchemaError, ValidationError
from ..geometry import CameraIntrinsics, Pose
from ..scene import Character, SceneDoc
from ..storyboard import ShotAsset
from . import netpbm
from .openpose import KeypointSet, project_keypoints, render_pose_map
from .raster import DepthBuffer, IdBuffer, encode_depth16, masks_from_ids, rasterize

PROMPT_TARGET_SHOT = "shot"
PROMPT_TARGET_ENVIRONMENT = "environment"


@dataclass
class FrameRender:
    """One rendered frame before any file encoding."""

    depth: DepthBuffer
    ids: IdBuffer
    keypoint_sets: list  # [(object_id, KeypointSet)] in scene order


def render_frame(scene: SceneDoc, t_s: float, pose: Pose, intr: CameraIntrinsics,
                 width: int, height: int) -> FrameRender:
    """Rasterize one frame and project every character's keypoints."""
    depth, ids = rasterize(scene, t_s, pose, intr, width, height)
    keypoint_sets = [
        (obj.object_id, project_keypoints(obj, t_s, pose, intr, width, height))
        for obj in scene.objects if isinstance(obj, Character)
    ]
    return FrameRender(depth=depth, ids=ids, keypoint_sets=keypoint_sets)


def keypoints_doc(keypoint_sets: list) -> dict:
    return {"characters": [{"object_id": oid, "joints": ks.to_doc()}
                           for oid, ks in keypoint_sets]}


def keypoints_from_doc(doc: dict) -> list:
    return [(entry["object_id"], KeypointSet.from_doc(entry["joints"]))
            for entry in doc.get("characters", [])]


def _dump_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


@dataclass
class BundleManifest:
    """Everything a consumer needs to drive a diffusion pipeline per frame."""

    fps: int
    frames: int
    width: int
    height: int
    intrinsics: dict
    frame_records: list
    prompt_bindings: list = field(default_factory=list)
    creation_tag: str = ""
    root: Path | None = None  # directory containing the files; not serialized

    def to_doc(self) -> dict:
        return {
            "fps": self.fps,
            "frames": self.frames,
            "width": self.width,
            "height": self.height,
            "intrinsics": self.intrinsics,
            "frame_records": self.frame_records,
            "prompt_bindings": self.prompt_bindings,
            "creation_tag": self.creation_tag,
        }

    @classmethod
    def from_doc(cls, doc: dict, root=None) -> "BundleManifest":
        for key in ("fps", "frames", "width", "height", "intrinsics", "frame_records"):
            if key not in doc:
                raise SchemaError(f"manifest missing field {key}", field_path=key)
        return cls(
            fps=doc["fps"], frames=doc["frames"], width=doc["width"],
            height=doc["height"], intrinsics=doc["intrinsics"],
            frame_records=doc["frame_records"],
            prompt_bindings=doc.get("prompt_bindings", []),
            creation_tag=doc.get("creation_tag", ""),
            root=Path(root) if root else None,
        )

    @classmethod
    def load(cls, path) -> "BundleManifest":
        path = Path(path)
        return cls.from_doc(json.loads(path.read_text()), root=path.parent)

    def frame_file(self, frame: int, kind: str, object_id: str | None = None) -> Path:
        if self.root is None:
            raise ValidationError("manifest has no root directory")
        files = self.frame_records[frame]["files"]
        rel = files["masks"][object_id] if kind == "masks" else files[kind]
        return self.root / rel


def validate_prompts(prompts: list, scene: SceneDoc) -> list:
    """Check prompt bindings against the scene; returns normalized bindings."""
    bindings = []
    for i, entry in enumerate(prompts or []):
        target = entry.get("target")
        text = entry.get("prompt", "")
        if target is None:
            raise ValidationError(f"prompts[{i}]: missing target",
                                  field_path=f"prompts[{i}].target")
        if target not in (PROMPT_TARGET_SHOT, PROMPT_TARGET_ENVIRONMENT):
            if target not in scene.object_ids:
                raise ValidationError(
                    f"prompts[{i}]: target {target!r} is not a scene object",
                    field_path=f"prompts[{i}].target")
            mask_pattern = f"masks/{target}_%06d.pgm"
        else:
            mask_pattern = None
        bindings.append({"target": target, "prompt": text,
                         "mask_pattern": mask_pattern})
    return bindings


def export_bundle(scene: SceneDoc, asset: ShotAsset, intr: CameraIntrinsics,
                  width: int, height: int, prompts: list | None, out_dir,
                  creation_tag: str = "",
                  progress=None) -> BundleManifest:
    """Export the full conditioning bundle for a generated shot.

    Frames are rendered at t = frame / fps with the frame's own pose and
    focal. Any frame failure aborts with an :class:`ExportError` naming the
    frame and how many frames completed; the manifest is written only after
    every frame succeeded, so its presence marks a complete bundle.
    """
    if width <= 0 or height <= 0:
        raise DomainError(f"resolution must be positive, got {width}x{height}")
    bindings = validate_prompts(prompts, scene)
    out = Path(out_dir)
    try:
        for sub in ("depth", "depth16", "pose", "masks", "keypoints"):
            (out / sub).mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise ExportError(f"cannot create output directory {out}: {err}") from err

    frame_records = []
    for i in range(asset.frames):
        try:
            record = _export_frame(scene, asset, intr, width, height, out, i)
        except ExportError:
            raise
        except Exception as err:
            raise ExportError(
                f"frame {i}: {err} ({i} of {asset.frames} frames completed in {out})",
                frame=i, completed_frames=i) from err
        frame_records.append(record)
        if progress is not None:
            progress(i + 1, asset.frames)

    manifest = BundleManifest(
        fps=asset.fps,
        frames=asset.frames,
        width=width,
        height=height,
        intrinsics={
            "sensor_width_mm": intr.sensor_width_mm,
            "aspect": intr.aspect,
            "near_m": intr.near_m,
            "far_m": intr.far_m,
        },
        frame_records=frame_records,
        prompt_bindings=bindings,
        creation_tag=creation_tag,
        root=out,
    )
    _dump_json(out / "manifest.json", manifest.to_doc())
    return manifest


def _export_frame(scene, asset, intr, width, height, out: Path, i: int) -> dict:
    t_s = i / asset.fps
    pose = asset.poses[i]
    frame_intr = intr.with_focal(asset.focals[i])
    render = render_frame(scene, t_s, pose, frame_intr, width, height)

    files = {
        "depth_pfm": f"depth/depth_{i:06d}.pfm",
        "depth16": f"depth16/depth16_{i:06d}.pgm",
        "pose_map": f"pose/pose_{i:06d}.ppm",
        "keypoints": f"keypoints/keypoints_{i:06d}.json",
        "masks": {},
    }
    netpbm.write_bytes(out / files["depth_pfm"], netpbm.encode_pfm(render.depth.values))
    depth16 = encode_depth16(render.depth, intr.near_m, intr.far_m)
    netpbm.write_bytes(out / files["depth16"], netpbm.encode_pgm16(depth16))
    pose_map = render_pose_map([ks for _, ks in render.keypoint_sets], width, height)
    netpbm.write_bytes(out / files["pose_map"], netpbm.encode_ppm(pose_map))
    for oid in scene.object_ids:
        rel = f"masks/{oid}_{i:06d}.pgm"
        files["masks"][oid] = rel
        netpbm.write_bytes(out / rel, netpbm.encode_pgm8(masks_from_ids(render.ids, oid)))
    _dump_json(out / files["keypoints"], keypoints_doc(render.keypoint_sets))

    return {"pose": pose.flat(), "focal_mm": asset.focals[i], "files": files}
