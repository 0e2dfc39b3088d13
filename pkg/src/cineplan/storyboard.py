"""Storyboards compile camera behaviors or keyframes into per-frame poses.

A storyboard is one shot. In SHOT mode it plays an ordered list of camera
behaviors, each behavior starting from the state the previous one ended in;
in FRAME mode it interpolates camera coordinates between explicit keyframes.
Generation produces an immutable :class:`ShotAsset`: one pose (4x4 rigid
matrix) and one focal length per frame, which later drive a separate
rendering camera. Assets concatenate on a :class:`Timeline`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from . import docio
from .behaviors import CameraBehavior, ShotState, require_valid, resolve_pose, sample
from .cinespace import CineRig, CineSpaceParams, Easing, interpolate, to_pose
from .errors import SchemaError, ValidationError
from .geometry import Pose


class BoardMode(Enum):
    SHOT = "SHOT"
    FRAME = "FRAME"


@dataclass(frozen=True)
class Keyframe:
    frame: int
    params: CineSpaceParams
    easing_to_next: Easing = Easing.SMOOTHSTEP

    def to_doc(self) -> dict:
        return {"frame": self.frame, "params": self.params.to_doc(),
                "easing_to_next": self.easing_to_next.value}

    @classmethod
    def from_doc(cls, doc: dict, path: str = "keyframe") -> "Keyframe":
        return cls(
            frame=docio.require_int(doc, "frame", path),
            params=CineSpaceParams.from_doc(docio.require(doc, "params", path),
                                            f"{path}.params"),
            easing_to_next=Easing(doc.get("easing_to_next", "SMOOTHSTEP")),
        )


@dataclass(frozen=True)
class Storyboard:
    """One shot: a bound rig + initial camera state and its motion plan."""

    id: str
    rig: CineRig
    initial: ShotState
    mode: BoardMode = BoardMode.SHOT
    behaviors: tuple = ()
    keyframes: tuple = ()
    fps: int = 24

    def __post_init__(self):
        object.__setattr__(self, "behaviors", tuple(self.behaviors))
        object.__setattr__(self, "keyframes", tuple(self.keyframes))

    def validate(self) -> list[str]:
        problems = []
        if not self.id:
            problems.append("id must be non-empty")
        if not (isinstance(self.fps, int) and self.fps > 0):
            problems.append("fps must be a positive integer")
        if self.mode is BoardMode.SHOT:
            if not self.behaviors:
                problems.append("SHOT mode needs at least one behavior")
            from .behaviors import validate as validate_behavior
            for i, b in enumerate(self.behaviors):
                for p in validate_behavior(b):
                    problems.append(f"behaviors[{i}]: {p}")
        else:
            if len(self.keyframes) < 2:
                problems.append("FRAME mode needs at least two keyframes")
            else:
                if self.keyframes[0].frame != 0:
                    problems.append("keyframes[0] must sit at frame 0")
                for i in range(1, len(self.keyframes)):
                    if self.keyframes[i].frame <= self.keyframes[i - 1].frame:
                        problems.append(
                            f"keyframes[{i}]: frame indices must strictly increase")
        return problems

    def require_valid(self) -> "Storyboard":
        problems = self.validate()
        if problems:
            raise ValidationError(f"storyboard {self.id!r}: " + "; ".join(problems),
                                  field_path=f"storyboard[{self.id}]",
                                  violations=problems)
        return self

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "fps": self.fps,
            "mode": self.mode.value,
            "rig": self.rig.to_doc(),
            "initial": self.initial.to_doc(),
        }
        if self.mode is BoardMode.SHOT:
            doc["behaviors"] = [b.to_doc() for b in self.behaviors]
        else:
            doc["keyframes"] = [k.to_doc() for k in self.keyframes]
        return doc

    @classmethod
    def from_doc(cls, doc: dict, path: str = "storyboard") -> "Storyboard":
        mode_name = docio.require_str(doc, "mode", path)
        try:
            mode = BoardMode(mode_name)
        except ValueError:
            raise SchemaError(f"unknown mode {mode_name!r}", field_path=f"{path}.mode")
        behaviors = tuple(
            CameraBehavior.from_doc(b, f"{path}.behaviors[{i}]")
            for i, b in enumerate(doc.get("behaviors", [])))
        keyframes = tuple(
            Keyframe.from_doc(k, f"{path}.keyframes[{i}]")
            for i, k in enumerate(doc.get("keyframes", [])))
        return cls(
            id=docio.require_str(doc, "id", path),
            rig=CineRig.from_doc(docio.require(doc, "rig", path), f"{path}.rig"),
            initial=ShotState.from_doc(docio.require(doc, "initial", path),
                                       f"{path}.initial"),
            mode=mode,
            behaviors=behaviors,
            keyframes=keyframes,
            fps=docio.require_int(doc, "fps", path) if "fps" in doc else 24,
        )


@dataclass(frozen=True)
class ShotAsset:
    """Immutable generation output: per-frame poses, focals and coordinates."""

    storyboard_id: str
    fps: int
    poses: tuple
    focals: tuple
    cine_params: tuple
    provenance: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        object.__setattr__(self, "focals", tuple(float(f) for f in self.focals))
        object.__setattr__(self, "cine_params", tuple(self.cine_params))
        prov = self.provenance or tuple(
            (self.storyboard_id, i) for i in range(len(self.poses)))
        object.__setattr__(self, "provenance", tuple(prov))
        n = len(self.poses)
        if not (len(self.focals) == len(self.cine_params) == len(self.provenance) == n):
            raise ValidationError("asset per-frame lists must share one length")

    @property
    def frames(self) -> int:
        return len(self.poses)


def behavior_frame_count(duration_s: float, fps: int) -> int:
    """Frames a behavior contributes: round(duration*fps), at least 2."""
    return max(2, round(duration_s * fps))


def generate_shot_mode(board: Storyboard) -> ShotAsset:
    """Play the behavior chain, sampling each behavior at endpoint-exact u."""
    board.require_valid()
    if board.mode is not BoardMode.SHOT:
        raise ValidationError("generate_shot_mode needs a SHOT-mode storyboard")
    states = []
    start = board.initial
    for k, behavior in enumerate(board.behaviors):
        require_valid(behavior, f"behaviors[{k}]")
        n_k = behavior_frame_count(behavior.duration_s, board.fps)
        for j in range(n_k):
            states.append(sample(behavior, start, board.rig, j / (n_k - 1)))
        start = states[-1]
    return ShotAsset(
        storyboard_id=board.id,
        fps=board.fps,
        poses=[resolve_pose(s, board.rig) for s in states],
        focals=[s.cine.focal_mm for s in states],
        cine_params=[s.cine for s in states],
    )


def generate_frame_mode(board: Storyboard) -> ShotAsset:
    """Interpolate keyframed coordinates; keyframe frames are reproduced exactly."""
    board.require_valid()
    if board.mode is not BoardMode.FRAME:
        raise ValidationError("generate_frame_mode needs a FRAME-mode storyboard")
    keys = board.keyframes
    total = keys[-1].frame + 1
    params_per_frame = []
    seg = 0
    for j in range(total):
        while keys[seg + 1].frame < j:
            seg += 1
        a, b = keys[seg], keys[seg + 1]
        s = (j - a.frame) / (b.frame - a.frame)
        params_per_frame.append(interpolate(a.params, b.params, s, a.easing_to_next))
    return ShotAsset(
        storyboard_id=board.id,
        fps=board.fps,
        poses=[to_pose(board.rig, p) for p in params_per_frame],
        focals=[p.focal_mm for p in params_per_frame],
        cine_params=params_per_frame,
    )


def generate(board: Storyboard) -> ShotAsset:
    if board.mode is BoardMode.SHOT:
        return generate_shot_mode(board)
    return generate_frame_mode(board)


@dataclass(frozen=True)
class Timeline:
    """Ordered storyboard ids played back to back at a uniform fps."""

    storyboard_ids: tuple
    fps: int = 24

    def __post_init__(self):
        object.__setattr__(self, "storyboard_ids", tuple(self.storyboard_ids))

    def to_doc(self) -> dict:
        return {"storyboards": list(self.storyboard_ids), "fps": self.fps}

    @classmethod
    def from_doc(cls, doc: dict, path: str = "timeline") -> "Timeline":
        return cls(storyboard_ids=docio.require_list(doc, "storyboards", path),
                   fps=docio.require_int(doc, "fps", path) if "fps" in doc else 24)


def assemble_timeline(timeline: Timeline, assets: dict) -> ShotAsset:
    """Concatenate generated assets in timeline order, keeping provenance."""
    ids = timeline.storyboard_ids
    if not ids:
        raise ValidationError("timeline is empty", field_path="timeline")
    if len(set(ids)) != len(ids):
        raise ValidationError("timeline storyboard ids must be unique",
                              field_path="timeline")
    poses, focals, cine, prov = [], [], [], []
    for sid in ids:
        if sid not in assets:
            raise ValidationError(f"timeline references unknown storyboard {sid!r}",
                                  field_path="timeline")
        asset = assets[sid]
        if asset.fps != timeline.fps:
            raise ValidationError(
                f"asset {sid!r} fps {asset.fps} != timeline fps {timeline.fps}",
                field_path="timeline.fps")
        poses.extend(asset.poses)
        focals.extend(asset.focals)
        cine.extend(asset.cine_params)
        prov.extend(asset.provenance)
    return ShotAsset(storyboard_id="timeline", fps=timeline.fps, poses=poses,
                     focals=focals, cine_params=cine, provenance=prov)


def save_asset(asset: ShotAsset) -> dict:
    """Lossless document form; floats survive a JSON round trip bit-exactly."""
    return {
        "id": asset.storyboard_id,
        "fps": asset.fps,
        "frames": asset.frames,
        "poses": [pose.flat() for pose in asset.poses],
        "focals": list(asset.focals),
        "cine_params": [p.to_doc() for p in asset.cine_params],
        "provenance": [{"storyboard": sid, "frame": j} for sid, j in asset.provenance],
    }


def load_asset(doc: dict) -> ShotAsset:
    frames = docio.require_int(doc, "frames", "asset")
    poses_doc = docio.require_list(doc, "poses", "asset")
    focals = docio.require_list(doc, "focals", "asset")
    cine_doc = docio.require_list(doc, "cine_params", "asset")
    if not (len(poses_doc) == len(focals) == len(cine_doc) == frames):
        raise SchemaError(
            f"asset.frames = {frames} but lists have lengths "
            f"{len(poses_doc)}/{len(focals)}/{len(cine_doc)}",
            field_path="asset.frames")
    poses = []
    for i, flat in enumerate(poses_doc):
        try:
            poses.append(Pose.from_matrix(flat))
        except (ValidationError, ValueError) as err:
            raise SchemaError(f"asset.poses[{i}]: {err}",
                              field_path=f"asset.poses[{i}]") from err
    cine = [CineSpaceParams.from_doc(c, f"asset.cine_params[{i}]")
            for i, c in enumerate(cine_doc)]
    prov_doc = doc.get("provenance")
    prov = tuple((docio.require_str(p, "storyboard", f"asset.provenance[{i}]"),
                  docio.require_int(p, "frame", f"asset.provenance[{i}]"))
                 for i, p in enumerate(prov_doc)) if prov_doc else ()
    return ShotAsset(
        storyboard_id=docio.require_str(doc, "id", "asset"),
        fps=docio.require_int(doc, "fps", "asset"),
        poses=poses, focals=focals, cine_params=cine, provenance=prov)


def asset_hash(asset: ShotAsset) -> str:
    """Stable content hash of an asset's document form."""
    blob = json.dumps(save_asset(asset), sort_keys=True,
                      separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
