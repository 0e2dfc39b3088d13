"""The camera-behavior catalog and the sampler that animates shot states.

A behavior is one named cinematographic move (push in, arc, boom...) with a
duration and a magnitude whose meaning depends on the kind:

=============  =====================================================
kind           magnitude
=============  =====================================================
STATIC         ignored
PUSH_IN        fraction of the current distance d removed by u=1;
               must stay below 1 or the camera would cross the subject
PULL_OUT       fraction of d added by u=1
ZOOM_IN/OUT    focal ratio (1.0 = no change); ZOOM_OUT must stay < 2
DOLLY_ZOOM     target distance ratio d(1)/d(0); focal compensates to
               hold subject size while perspective shifts
PAN_*/TILT_*   sweep angle in radians (positive)
TRUCK          lateral travel in meters, positive = camera's left
BOOM_UP/DOWN   vertical travel in meters (positive)
ARC            orbit angle added to theta, radians, signed
               (positive = increasing theta)
TRACKING       ignored; position follows the attached Bezier track
=============  =====================================================

Behaviors act on a :class:`ShotState`, which combines the rig-space camera
coordinates with pose-level offsets so that in-place moves (pan, truck)
compose with the orbital ones and persist into later behaviors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from . import docio
from .cinespace import CineRig, CineSpaceParams, Easing, rig_frame, to_pose
from .errors import DomainError, ValidationError
from .geometry import (WORLD_UP, BezierCurve, Pose, bezier_point,
                       bezier_tangent, look_at_rotation, rotation_about_axis)


class BehaviorKind(Enum):
    STATIC = "STATIC"
    PUSH_IN = "PUSH_IN"
    PULL_OUT = "PULL_OUT"
    ZOOM_IN = "ZOOM_IN"
    ZOOM_OUT = "ZOOM_OUT"
    DOLLY_ZOOM = "DOLLY_ZOOM"
    PAN_LEFT = "PAN_LEFT"
    PAN_RIGHT = "PAN_RIGHT"
    TILT_UP = "TILT_UP"
    TILT_DOWN = "TILT_DOWN"
    TRUCK = "TRUCK"
    BOOM_UP = "BOOM_UP"
    BOOM_DOWN = "BOOM_DOWN"
    ARC = "ARC"
    TRACKING = "TRACKING"


class OrientationMode(Enum):
    """How a tracking camera aims while riding its curve."""

    LOOK_AT_Q = "LOOK_AT_Q"
    FIXED = "FIXED"
    TANGENT = "TANGENT"


# Drop-down presets for PUSH_IN / PULL_OUT magnitude.
PUSH_RANGE_PRESETS = {"SMALL": 0.25, "MEDIUM": 0.5, "LARGE": 0.75}


@dataclass(frozen=True)
class CameraBehavior:
    kind: BehaviorKind
    duration_s: float
    magnitude: float = 0.0
    track: BezierCurve | None = None
    orientation_mode: OrientationMode = OrientationMode.LOOK_AT_Q
    easing: Easing = Easing.SMOOTHSTEP

    def to_doc(self) -> dict:
        doc = {
            "kind": self.kind.value,
            "duration_s": self.duration_s,
            "magnitude": self.magnitude,
            "easing": self.easing.value,
        }
        if self.track is not None:
            doc["track"] = self.track.to_doc()
            doc["orientation_mode"] = self.orientation_mode.value
        return doc

    @classmethod
    def from_doc(cls, doc: dict, path: str = "behavior") -> "CameraBehavior":
        kind_name = docio.require_str(doc, "kind", path)
        try:
            kind = BehaviorKind(kind_name)
        except ValueError:
            raise ValidationError(f"unknown behavior kind {kind_name!r}",
                                  field_path=f"{path}.kind")
        track = BezierCurve.from_doc(doc["track"]) if doc.get("track") else None
        return cls(
            kind=kind,
            duration_s=docio.require_number(doc, "duration_s", path),
            magnitude=docio.require_number(doc, "magnitude", path) if "magnitude" in doc else 0.0,
            track=track,
            orientation_mode=OrientationMode(doc.get("orientation_mode", "LOOK_AT_Q")),
            easing=Easing(doc.get("easing", "SMOOTHSTEP")),
        )


@dataclass(frozen=True)
class ShotState:
    """Full camera state: orbital coordinates plus pose-level offsets.

    Resolution order (see :func:`resolve_pose`): place the camera from the
    rig coordinates (or from the tracking curve when ``track_u`` is set),
    translate by ``truck_offset`` along camera right and ``boom_offset``
    along world up, then rotate by ``pan_offset`` about camera up and
    ``tilt_offset`` about camera right.
    """

    cine: CineSpaceParams
    pan_offset: float = 0.0
    tilt_offset: float = 0.0
    truck_offset: float = 0.0
    boom_offset: float = 0.0
    track_u: float | None = None
    track: BezierCurve | None = None
    track_orientation: OrientationMode = OrientationMode.LOOK_AT_Q

    def to_doc(self) -> dict:
        doc = {
            "cine": self.cine.to_doc(),
            "pan_offset": self.pan_offset,
            "tilt_offset": self.tilt_offset,
            "truck_offset": self.truck_offset,
            "boom_offset": self.boom_offset,
        }
        if self.track_u is not None:
            doc["track_u"] = self.track_u
            doc["track"] = self.track.to_doc() if self.track else None
            doc["track_orientation"] = self.track_orientation.value
        return doc

    @classmethod
    def from_doc(cls, doc: dict, path: str = "initial") -> "ShotState":
        cine = CineSpaceParams.from_doc(docio.require(doc, "cine", path), f"{path}.cine")
        track = BezierCurve.from_doc(doc["track"]) if doc.get("track") else None
        return cls(
            cine=cine,
            pan_offset=doc.get("pan_offset", 0.0),
            tilt_offset=doc.get("tilt_offset", 0.0),
            truck_offset=doc.get("truck_offset", 0.0),
            boom_offset=doc.get("boom_offset", 0.0),
            track_u=doc.get("track_u"),
            track=track,
            track_orientation=OrientationMode(doc.get("track_orientation", "LOOK_AT_Q")),
        )


_ANGULAR = {BehaviorKind.PAN_LEFT, BehaviorKind.PAN_RIGHT,
            BehaviorKind.TILT_UP, BehaviorKind.TILT_DOWN}
_VERTICAL = {BehaviorKind.BOOM_UP, BehaviorKind.BOOM_DOWN}


def validate(behavior: CameraBehavior) -> list[str]:
    """Collect every invariant violation; an empty list means valid."""
    problems = []
    if not (behavior.duration_s > 0 and math.isfinite(behavior.duration_s)):
        problems.append("duration must be positive")
    if not math.isfinite(behavior.magnitude):
        problems.append("magnitude must be finite")
    kind, m = behavior.kind, behavior.magnitude
    if kind is BehaviorKind.TRACKING:
        if behavior.track is None:
            problems.append("missing track")
    elif behavior.track is not None:
        problems.append(f"track is only valid for TRACKING, not {kind.value}")
    if kind is BehaviorKind.PUSH_IN and not (0.0 < m < 1.0):
        problems.append("PUSH_IN magnitude must be in (0, 1); "
                        ">= 1 would cross the subject")
    if kind is BehaviorKind.PULL_OUT and not m > 0.0:
        problems.append("PULL_OUT magnitude must be positive")
    if kind is BehaviorKind.ZOOM_IN and not m >= 1.0:
        problems.append("ZOOM_IN focal ratio must be >= 1")
    if kind is BehaviorKind.ZOOM_OUT and not (1.0 <= m < 2.0):
        problems.append("ZOOM_OUT focal ratio must be in [1, 2) to keep focal positive")
    if kind is BehaviorKind.DOLLY_ZOOM and not m > 0.0:
        problems.append("DOLLY_ZOOM distance ratio must be positive")
    if kind in _ANGULAR and m < 0.0:
        problems.append(f"{kind.value} magnitude must be non-negative "
                        "(direction is in the kind)")
    if kind in _VERTICAL and m < 0.0:
        problems.append(f"{kind.value} magnitude must be non-negative "
                        "(direction is in the kind)")
    return problems


def require_valid(behavior: CameraBehavior, path: str = "behavior") -> None:
    problems = validate(behavior)
    if problems:
        raise ValidationError(f"{path}: " + "; ".join(problems),
                              field_path=path, violations=problems)


def dolly_zoom_focal(f0: float, d0: float, d: float) -> float:
    """Focal length compensating a dolly from d0 to d.

    f = f0 * d / d0 holds the projected size of subjects near the aim point
    constant while the perspective shifts.
    """
    if not (f0 > 0 and d0 > 0 and d > 0):
        raise DomainError("dolly_zoom_focal needs positive focal and distances")
    return f0 * d / d0


def sample(behavior: CameraBehavior, start: ShotState, rig: CineRig,
           u: float) -> ShotState:
    """Camera state of a behavior at normalized time u in [0, 1].

    u=0 returns ``start`` unchanged for every kind; u=1 is the behavior's
    end state and the natural start for whatever follows it.
    """
    if not (0.0 <= u <= 1.0):
        raise DomainError(f"u must be in [0, 1], got {u}")
    require_valid(behavior)
    if u == 0.0:
        return start
    e = behavior.easing.apply(u)
    kind, m = behavior.kind, behavior.magnitude
    cine = start.cine

    if kind is BehaviorKind.STATIC:
        return start
    if kind is BehaviorKind.PUSH_IN:
        return replace(start, cine=replace(cine, d=cine.d * (1.0 - m * e)))
    if kind is BehaviorKind.PULL_OUT:
        return replace(start, cine=replace(cine, d=cine.d * (1.0 + m * e)))
    if kind is BehaviorKind.ZOOM_IN:
        return replace(start, cine=replace(
            cine, focal_mm=cine.focal_mm * (1.0 + (m - 1.0) * e)))
    if kind is BehaviorKind.ZOOM_OUT:
        return replace(start, cine=replace(
            cine, focal_mm=cine.focal_mm * (1.0 - (m - 1.0) * e)))
    if kind is BehaviorKind.DOLLY_ZOOM:
        d = cine.d * (1.0 + (m - 1.0) * e)
        focal = dolly_zoom_focal(cine.focal_mm, cine.d, d)
        return replace(start, cine=replace(cine, d=d, focal_mm=focal))
    if kind is BehaviorKind.PAN_LEFT:
        return replace(start, pan_offset=start.pan_offset + m * e)
    if kind is BehaviorKind.PAN_RIGHT:
        return replace(start, pan_offset=start.pan_offset - m * e)
    if kind is BehaviorKind.TILT_UP:
        return replace(start, tilt_offset=start.tilt_offset + m * e)
    if kind is BehaviorKind.TILT_DOWN:
        return replace(start, tilt_offset=start.tilt_offset - m * e)
    if kind is BehaviorKind.TRUCK:
        # positive magnitude trucks left; the offset is stored along +right
        return replace(start, truck_offset=start.truck_offset - m * e)
    if kind is BehaviorKind.BOOM_UP:
        return replace(start, boom_offset=start.boom_offset + m * e)
    if kind is BehaviorKind.BOOM_DOWN:
        return replace(start, boom_offset=start.boom_offset - m * e)
    if kind is BehaviorKind.ARC:
        return replace(start, cine=replace(cine, theta=cine.theta + m * e))
    if kind is BehaviorKind.TRACKING:
        return replace(start, track_u=e, track=behavior.track,
                       track_orientation=behavior.orientation_mode)
    raise AssertionError(f"unhandled kind {kind}")


def chain_end_state(behaviors: list[CameraBehavior], start: ShotState,
                    rig: CineRig) -> ShotState:
    """End state of a behavior sequence: fold each behavior's u=1 state."""
    if not behaviors:
        raise ValidationError("behavior list must not be empty",
                              field_path="behaviors")
    state = start
    for i, behavior in enumerate(behaviors):
        try:
            state = sample(behavior, state, rig, 1.0)
        except ValidationError as err:
            raise ValidationError(f"behaviors[{i}]: {err}",
                                  field_path=f"behaviors[{i}]",
                                  violations=err.violations) from err
    return state


def resolve_pose(state: ShotState, rig: CineRig) -> Pose:
    """Deterministically realize a shot state as a camera pose."""
    if state.track_u is not None:
        if state.track is None:
            raise ValidationError("state has track_u but no track curve",
                                  field_path="track")
        pos = bezier_point(state.track, state.track_u)
        rot = _tracking_rotation(state, rig, pos)
    else:
        base = to_pose(rig, state.cine)
        pos, rot = base.translation, base.rotation

    if state.truck_offset != 0.0 or state.boom_offset != 0.0:
        pos = pos + state.truck_offset * rot[:, 0] + state.boom_offset * WORLD_UP
    if state.pan_offset != 0.0:
        rot = rotation_about_axis(rot[:, 1], state.pan_offset) @ rot
    if state.tilt_offset != 0.0:
        rot = rotation_about_axis(rot[:, 0], state.tilt_offset) @ rot
    return Pose(rot, pos)


def _tracking_rotation(state: ShotState, rig: CineRig, pos):
    mode = state.track_orientation
    if mode is OrientationMode.FIXED:
        return to_pose(rig, state.cine).rotation
    if mode is OrientationMode.TANGENT:
        tangent = bezier_tangent(state.track, state.track_u)
        norm = math.sqrt(float(tangent @ tangent))
        horiz = math.hypot(float(tangent[0]), float(tangent[2]))
        if norm > 1e-9 and horiz > 1e-9 * norm:
            return look_at_rotation(pos, pos + tangent)
        # zero or vertical tangent: fall back to aiming at Q
    rot = look_at_rotation(pos, rig_frame(rig).center)
    if state.cine.screen_offset != 0.0:
        rot = rotation_about_axis(rot[:, 1], state.cine.screen_offset) @ rot
    return rot
