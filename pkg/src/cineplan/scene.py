"""Minimal 3D world: static triangle meshes and capsule-skinned characters.

Scenes load from a structured-text document (plus optional OBJ files for
mesh geometry) and are immutable afterwards, so render workers can share
them freely. Characters store world-space joint positions per clip frame;
between frames the positions interpolate linearly and clamp at the clip
ends. For depth/mask rendering a character's geometry is one capsule per
(joint, parent) bone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import docio
from .errors import DomainError, SchemaError, ValidationError
from .openpose_template import OPENPOSE_JOINT_NAMES

_IDENTITY3 = np.eye(3)


@dataclass(frozen=True)
class StaticMesh:
    """Indexed triangles under a rigid + uniform-scale world transform."""

    object_id: str
    name: str
    vertices: np.ndarray
    faces: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation: np.ndarray = field(default_factory=lambda: _IDENTITY3.copy())
    scale: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        f = np.asarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3 or not np.all(np.isfinite(v)):
            raise ValidationError(f"mesh {self.object_id!r}: vertices must be finite Nx3")
        if f.ndim != 2 or f.shape[1] != 3 or f.shape[0] < 1:
            raise ValidationError(f"mesh {self.object_id!r}: needs at least one triangle")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValidationError(f"mesh {self.object_id!r}: face index out of range")
        r = np.asarray(self.rotation, dtype=np.float64)
        if r.shape != (3, 3) or np.max(np.abs(r.T @ r - np.eye(3))) > 1e-6:
            raise ValidationError(f"mesh {self.object_id!r}: rotation must be orthonormal")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValidationError(f"mesh {self.object_id!r}: scale must be positive")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation",
                           np.asarray(self.translation, dtype=np.float64))

    def world_vertices(self) -> np.ndarray:
        return self.scale * (self.vertices @ self.rotation.T) + self.translation


@dataclass(frozen=True)
class AnimationClip:
    """World-space joint positions per frame, sampled at a fixed rate."""

    fps: int
    frames: np.ndarray  # (n_frames, n_joints, 3)

    def __post_init__(self):
        f = np.asarray(self.frames, dtype=np.float64)
        if f.ndim != 3 or f.shape[2] != 3 or f.shape[0] < 1:
            raise ValidationError("clip frames must be (n_frames, n_joints, 3)")
        if not (isinstance(self.fps, int) and self.fps > 0):
            raise ValidationError("clip fps must be a positive integer")
        if not np.all(np.isfinite(f)):
            raise ValidationError("clip frames must be finite")
        object.__setattr__(self, "frames", f)


@dataclass(frozen=True)
class Character:
    """Skeletal character: joint tree, clip, and its OpenPose joint mapping."""

    object_id: str
    name: str
    joint_names: tuple
    joint_parents: tuple
    clip: AnimationClip
    joint_map: dict
    bone_radius_m: float = 0.05
    subject_height_m: float = 1.7

    def __post_init__(self):
        names = tuple(self.joint_names)
        parents = tuple(int(p) for p in self.joint_parents)
        object.__setattr__(self, "joint_names", names)
        object.__setattr__(self, "joint_parents", parents)
        if len(names) != len(parents) or not names:
            raise ValidationError(f"character {self.object_id!r}: joint lists mismatch")
        if len(set(names)) != len(names):
            raise ValidationError(f"character {self.object_id!r}: duplicate joint name")
        if parents[0] != -1:
            raise ValidationError(f"character {self.object_id!r}: joints[0] must be the root")
        for i, p in enumerate(parents[1:], start=1):
            if not (0 <= p < i):
                raise ValidationError(
                    f"character {self.object_id!r}: joints[{i}] parent {p} must "
                    "reference an earlier joint (tree order)")
        if self.clip.frames.shape[1] != len(names):
            raise ValidationError(
                f"character {self.object_id!r}: clip has {self.clip.frames.shape[1]} "
                f"joints per frame, skeleton has {len(names)}")
        for template_name, joint in self.joint_map.items():
            if template_name not in OPENPOSE_JOINT_NAMES:
                raise ValidationError(
                    f"character {self.object_id!r}: joint_map key "
                    f"{template_name!r} is not an OpenPose template joint")
            if joint not in names:
                raise ValidationError(
                    f"character {self.object_id!r}: joint_map entry "
                    f"{template_name!r} -> {joint!r} names a missing joint")
        if not (self.bone_radius_m > 0 and math.isfinite(self.bone_radius_m)):
            raise ValidationError(f"character {self.object_id!r}: bone_radius must be positive")
        if not (self.subject_height_m > 0 and math.isfinite(self.subject_height_m)):
            raise ValidationError(f"character {self.object_id!r}: subject_height must be positive")

    def joint_index(self, name: str) -> int:
        return self.joint_names.index(name)


@dataclass(frozen=True)
class SceneDoc:
    """An immutable collection of meshes and characters with unique ids.

    Loaded scenes always contain at least one object; the constructor itself
    tolerates an empty list so renderers can be exercised on nothing.
    """

    objects: tuple
    units: str = "meters"

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        ids = [o.object_id for o in self.objects]
        seen = set()
        for oid in ids:
            if oid in seen:
                raise ValidationError(f"duplicate object_id {oid!r}")
            seen.add(oid)
        object.__setattr__(self, "_index", {o.object_id: o for o in self.objects})

    @property
    def object_ids(self) -> tuple:
        return tuple(o.object_id for o in self.objects)

    def __getitem__(self, object_id: str):
        try:
            return self._index[object_id]
        except KeyError:
            raise KeyError(f"no object {object_id!r} in scene") from None

    @property
    def characters(self) -> tuple:
        return tuple(o for o in self.objects if isinstance(o, Character))

    @property
    def meshes(self) -> tuple:
        return tuple(o for o in self.objects if isinstance(o, StaticMesh))


def load_obj(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse the supported OBJ subset: ``v`` records and triangular ``f``.

    Any other record type is ignored. Faces may use the ``v/vt/vn`` slash
    syntax; only the vertex index is read. Errors carry the 1-based line
    number.
    """
    vertices, faces = [], []
    path = Path(path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v":
            if len(parts) < 4:
                raise SchemaError(f"{path.name}:{lineno}: vertex needs 3 coordinates")
            try:
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError:
                raise SchemaError(f"{path.name}:{lineno}: malformed vertex coordinate")
        elif parts[0] == "f":
            refs = parts[1:]
            if len(refs) != 3:
                raise SchemaError(f"{path.name}:{lineno}: triangles only "
                                  f"(face has {len(refs)} vertices)")
            idx = []
            for ref in refs:
                head = ref.split("/")[0]
                try:
                    i = int(head)
                except ValueError:
                    raise SchemaError(f"{path.name}:{lineno}: malformed face index {ref!r}")
                if i < 1:
                    raise SchemaError(f"{path.name}:{lineno}: face indices must be "
                                      "positive (1-based)")
                idx.append(i - 1)
            faces.append(idx)
    v = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    f = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if f.size and f.max() >= len(v):
        raise SchemaError(f"{path.name}: face references vertex {int(f.max()) + 1} "
                          f"but only {len(v)} vertices exist")
    return v, f


def _mesh_from_doc(doc: dict, path: str, base_dir: Path | None) -> StaticMesh:
    object_id = docio.require_str(doc, "object_id", path)
    if "obj_file" in doc:
        rel = docio.require_str(doc, "obj_file", path)
        obj_path = (base_dir / rel) if base_dir else Path(rel)
        if not obj_path.exists():
            raise SchemaError(f"{path}: obj_file {rel!r} not found",
                              field_path=f"{path}.obj_file")
        vertices, faces = load_obj(obj_path)
    else:
        vertices = docio.require_list(doc, "vertices", path)
        faces = docio.require_list(doc, "faces", path)
    rotation = np.asarray(doc["rotation"], dtype=np.float64) if "rotation" in doc \
        else _IDENTITY3.copy()
    return StaticMesh(
        object_id=object_id,
        name=doc.get("name", object_id),
        vertices=vertices,
        faces=faces,
        translation=np.asarray(doc.get("translation", (0.0, 0.0, 0.0)), dtype=np.float64),
        rotation=rotation,
        scale=float(doc.get("scale", 1.0)),
    )


def _character_from_doc(doc: dict, path: str) -> Character:
    object_id = docio.require_str(doc, "object_id", path)
    skeleton = docio.require_list(doc, "skeleton", path)
    names = [docio.require_str(j, "name", f"{path}.skeleton[{i}]")
             for i, j in enumerate(skeleton)]
    parents = [docio.require_int(j, "parent", f"{path}.skeleton[{i}]")
               for i, j in enumerate(skeleton)]
    clip_doc = docio.require(doc, "clip", path)
    clip = AnimationClip(
        fps=docio.require_int(clip_doc, "fps", f"{path}.clip"),
        frames=np.asarray(docio.require_list(clip_doc, "frames", f"{path}.clip"),
                          dtype=np.float64),
    )
    joint_map = docio.require(doc, "joint_map", path)
    if not isinstance(joint_map, dict):
        raise SchemaError(f"{path}.joint_map must be an object",
                          field_path=f"{path}.joint_map")
    return Character(
        object_id=object_id,
        name=doc.get("name", object_id),
        joint_names=names,
        joint_parents=parents,
        clip=clip,
        joint_map=dict(joint_map),
        bone_radius_m=float(doc.get("bone_radius_m", 0.05)),
        subject_height_m=float(doc.get("subject_height_m", 1.7)),
    )


def load_scene(source, base_dir=None) -> SceneDoc:
    """Load and fully validate a scene document.

    ``source`` may be a dict, a JSON string, or a path to a JSON file; OBJ
    references resolve against ``base_dir`` (defaulting to the document's
    directory when loading from a path).
    """
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        source_path = Path(source)
        doc = json.loads(source_path.read_text())
        base_dir = Path(base_dir) if base_dir else source_path.parent
    elif isinstance(source, str):
        doc = json.loads(source)
        base_dir = Path(base_dir) if base_dir else None
    else:
        doc = source
        base_dir = Path(base_dir) if base_dir else None
    units = doc.get("units", "meters")
    if units != "meters":
        raise SchemaError(f"unsupported units {units!r} (only meters)",
                          field_path="units")
    objects_doc = docio.require_list(doc, "objects", "")
    if not objects_doc:
        raise SchemaError("scene must declare at least one object",
                          field_path="objects")
    objects = []
    for i, obj in enumerate(objects_doc):
        path = f"objects[{i}]"
        kind = docio.require_str(obj, "type", path)
        if kind == "mesh":
            objects.append(_mesh_from_doc(obj, path, base_dir))
        elif kind == "character":
            objects.append(_character_from_doc(obj, path))
        else:
            raise SchemaError(f"{path}: unknown object type {kind!r}",
                              field_path=f"{path}.type")
    return SceneDoc(objects=objects, units=units)


def scene_to_doc(scene: SceneDoc) -> dict:
    """Document form of a scene; meshes are inlined (no OBJ references)."""
    objects = []
    for obj in scene.objects:
        if isinstance(obj, StaticMesh):
            objects.append({
                "type": "mesh",
                "object_id": obj.object_id,
                "name": obj.name,
                "vertices": obj.vertices.tolist(),
                "faces": obj.faces.tolist(),
                "translation": obj.translation.tolist(),
                "rotation": obj.rotation.tolist(),
                "scale": obj.scale,
            })
        else:
            objects.append({
                "type": "character",
                "object_id": obj.object_id,
                "name": obj.name,
                "skeleton": [{"name": n, "parent": p}
                             for n, p in zip(obj.joint_names, obj.joint_parents)],
                "clip": {"fps": obj.clip.fps, "frames": obj.clip.frames.tolist()},
                "joint_map": dict(obj.joint_map),
                "bone_radius_m": obj.bone_radius_m,
                "subject_height_m": obj.subject_height_m,
            })
    return {"units": scene.units, "objects": objects}


def joints_at_time(char: Character, t_s: float) -> np.ndarray:
    """World joint positions at time t: linear between frames, clamped at ends."""
    if t_s < 0:
        raise DomainError(f"time must be non-negative, got {t_s}")
    frames = char.clip.frames
    x = t_s * char.clip.fps
    i0 = min(int(math.floor(x)), len(frames) - 1)
    i1 = min(i0 + 1, len(frames) - 1)
    frac = min(x - i0, 1.0)
    if i0 == i1 or frac == 0.0:
        return frames[i0].copy()
    return (1.0 - frac) * frames[i0] + frac * frames[i1]


def bone_capsules(char: Character, t_s: float) -> list:
    """One (p0, p1, radius) capsule per (parent, joint) bone at time t."""
    positions = joints_at_time(char, t_s)
    return [(positions[parent], positions[j], char.bone_radius_m)
            for j, parent in enumerate(char.joint_parents) if parent >= 0]


def scene_bounds(scene: SceneDoc, t_s: float = 0.0):
    """Axis-aligned box (lo, hi) containing all geometry at time t."""
    los, his = [], []
    for mesh in scene.meshes:
        w = mesh.world_vertices()
        los.append(w.min(axis=0))
        his.append(w.max(axis=0))
    for char in scene.characters:
        positions = joints_at_time(char, t_s)
        r = char.bone_radius_m
        los.append(positions.min(axis=0) - r)
        his.append(positions.max(axis=0) + r)
    if not los:
        raise ValidationError("cannot bound an empty scene")
    return np.min(los, axis=0), np.max(his, axis=0)
