import math

import numpy as np
import pytest

from cineplan.behaviors import (BehaviorKind, CameraBehavior, OrientationMode,
                                PUSH_RANGE_PRESETS, ShotState, chain_end_state,
                                dolly_zoom_focal, resolve_pose, sample,
                                validate)
from cineplan.cinespace import CineRig, CineSpaceParams, Easing, rig_center, to_pose
from cineplan.errors import DomainError, ValidationError
from cineplan.geometry import (BezierCurve, CameraIntrinsics, bezier_point,
                               project_to_ndc)

RIG = CineRig((-1.0, 0.0, 0.0), (1.0, 0.0, 0.0))
START = ShotState(cine=CineSpaceParams(d=5.0, theta=0.0, phi=0.2, focal_mm=36.0))

ALL_KINDS_MAGNITUDE = {
    BehaviorKind.STATIC: 0.0,
    BehaviorKind.PUSH_IN: 0.5,
    BehaviorKind.PULL_OUT: 0.5,
    BehaviorKind.ZOOM_IN: 1.5,
    BehaviorKind.ZOOM_OUT: 1.5,
    BehaviorKind.DOLLY_ZOOM: 1.8,
    BehaviorKind.PAN_LEFT: 0.4,
    BehaviorKind.PAN_RIGHT: 0.4,
    BehaviorKind.TILT_UP: 0.3,
    BehaviorKind.TILT_DOWN: 0.3,
    BehaviorKind.TRUCK: 0.8,
    BehaviorKind.BOOM_UP: 0.6,
    BehaviorKind.BOOM_DOWN: 0.4,
    BehaviorKind.ARC: math.pi / 2,
}


def behavior_of(kind, **kw):
    kw.setdefault("duration_s", 1.0)
    if kind is BehaviorKind.TRACKING and "track" not in kw:
        start_pos = to_pose(RIG, START.cine).translation
        kw["track"] = BezierCurve((tuple(start_pos),
                                   (0.0, 1.0, 3.0), (-2.0, 1.2, 2.0),
                                   (-4.0, 1.5, 1.0)))
    else:
        kw.setdefault("magnitude", ALL_KINDS_MAGNITUDE[kind])
    return CameraBehavior(kind=kind, **kw)


class TestCatalog:
    def test_exactly_fifteen_kinds(self):
        assert len(BehaviorKind) == 15

    def test_push_range_presets(self):
        assert PUSH_RANGE_PRESETS == {"SMALL": 0.25, "MEDIUM": 0.5, "LARGE": 0.75}


class TestSample:
    @pytest.mark.parametrize("kind", list(BehaviorKind))
    def test_start_anchoring(self, kind):
        behavior = behavior_of(kind)
        assert sample(behavior, START, RIG, 0.0) == START

    def test_push_in_endpoint(self):
        behavior = behavior_of(BehaviorKind.PUSH_IN, magnitude=0.5)
        assert sample(behavior, START, RIG, 1.0).cine.d == pytest.approx(2.5)

    def test_push_in_smoothstep_midpoint(self):
        behavior = behavior_of(BehaviorKind.PUSH_IN, magnitude=0.5,
                               easing=Easing.SMOOTHSTEP)
        assert sample(behavior, START, RIG, 0.5).cine.d == pytest.approx(3.75)

    def test_push_in_monotone(self):
        behavior = behavior_of(BehaviorKind.PUSH_IN, magnitude=0.7)
        ds = [sample(behavior, START, RIG, u).cine.d
              for u in np.linspace(0, 1, 33)]
        assert all(b < a for a, b in zip(ds, ds[1:]))

    def test_pull_out_endpoint(self):
        behavior = behavior_of(BehaviorKind.PULL_OUT, magnitude=1.0)
        assert sample(behavior, START, RIG, 1.0).cine.d == pytest.approx(10.0)

    def test_arc_endpoint_other_coords_fixed(self):
        behavior = behavior_of(BehaviorKind.ARC, magnitude=math.pi / 2)
        end = sample(behavior, START, RIG, 1.0)
        assert end.cine.theta == pytest.approx(math.pi / 2)
        assert end.cine.d == START.cine.d and end.cine.phi == START.cine.phi

    def test_arc_sign_monotone(self):
        behavior = behavior_of(BehaviorKind.ARC, magnitude=-1.0)
        thetas = [sample(behavior, START, RIG, u).cine.theta
                  for u in np.linspace(0, 1, 17)]
        assert all(b < a for a, b in zip(thetas, thetas[1:]))

    def test_zoom_leaves_pose_bit_identical(self):
        behavior = behavior_of(BehaviorKind.ZOOM_IN, magnitude=2.0)
        focals = []
        base = resolve_pose(START, RIG)
        for u in np.linspace(0, 1, 9):
            state = sample(behavior, START, RIG, u)
            pose = resolve_pose(state, RIG)
            assert np.array_equal(pose.translation, base.translation)
            assert np.array_equal(pose.rotation, base.rotation)
            focals.append(state.cine.focal_mm)
        assert all(b >= a for a, b in zip(focals, focals[1:]))
        assert focals[-1] == pytest.approx(72.0)

    def test_zoom_out_endpoint(self):
        behavior = behavior_of(BehaviorKind.ZOOM_OUT, magnitude=1.5)
        end = sample(behavior, START, RIG, 1.0)
        assert end.cine.focal_mm == pytest.approx(18.0)

    def test_pan_left_positive_offset(self):
        behavior = behavior_of(BehaviorKind.PAN_LEFT, magnitude=0.4)
        assert sample(behavior, START, RIG, 1.0).pan_offset == pytest.approx(0.4)

    def test_pan_rotates_in_place(self):
        behavior = behavior_of(BehaviorKind.PAN_LEFT, magnitude=0.4)
        end = resolve_pose(sample(behavior, START, RIG, 1.0), RIG)
        base = resolve_pose(START, RIG)
        assert np.array_equal(end.translation, base.translation)
        assert not np.allclose(end.rotation, base.rotation)

    def test_tilt_down_negative_offset(self):
        behavior = behavior_of(BehaviorKind.TILT_DOWN, magnitude=0.3)
        assert sample(behavior, START, RIG, 1.0).tilt_offset == pytest.approx(-0.3)

    def test_truck_positive_moves_camera_left(self):
        behavior = behavior_of(BehaviorKind.TRUCK, magnitude=0.8)
        base = resolve_pose(START, RIG)
        end = resolve_pose(sample(behavior, START, RIG, 1.0), RIG)
        shift = end.translation - base.translation
        assert float(shift @ base.right) == pytest.approx(-0.8)
        assert np.array_equal(end.rotation, base.rotation)

    def test_boom_up_moves_along_world_up(self):
        behavior = behavior_of(BehaviorKind.BOOM_UP, magnitude=0.6)
        base = resolve_pose(START, RIG)
        end = resolve_pose(sample(behavior, START, RIG, 1.0), RIG)
        assert end.translation - base.translation == \
            pytest.approx((0.0, 0.6, 0.0), abs=1e-12)

    def test_tracking_endpoint_on_curve(self):
        behavior = behavior_of(BehaviorKind.TRACKING)
        end = sample(behavior, START, RIG, 1.0)
        pose = resolve_pose(end, RIG)
        assert np.max(np.abs(pose.translation -
                             behavior.track.control_points[-1])) < 1e-12

    def test_tracking_look_at_q_aims_at_center(self):
        behavior = behavior_of(BehaviorKind.TRACKING)
        state = sample(behavior, START, RIG, 0.6)
        pose = resolve_pose(state, RIG)
        to_center = rig_center(RIG) - pose.translation
        to_center /= np.linalg.norm(to_center)
        assert float(pose.forward @ to_center) == pytest.approx(1.0, abs=1e-12)

    def test_tracking_tangent_mode(self):
        behavior = behavior_of(BehaviorKind.TRACKING,
                               orientation_mode=OrientationMode.TANGENT)
        state = sample(behavior, START, RIG, 0.5)
        pose = resolve_pose(state, RIG)
        from cineplan.geometry import bezier_tangent
        tangent = bezier_tangent(behavior.track, state.track_u)
        tangent /= np.linalg.norm(tangent)
        assert float(pose.forward @ tangent) == pytest.approx(1.0, abs=1e-12)

    def test_u_out_of_range(self):
        with pytest.raises(DomainError):
            sample(behavior_of(BehaviorKind.STATIC), START, RIG, 1.5)

    def test_push_in_magnitude_too_large(self):
        behavior = CameraBehavior(BehaviorKind.PUSH_IN, 1.0, magnitude=1.0)
        with pytest.raises(ValidationError):
            sample(behavior, START, RIG, 0.5)

    def test_tracking_without_track(self):
        behavior = CameraBehavior(BehaviorKind.TRACKING, 1.0)
        with pytest.raises(ValidationError):
            sample(behavior, START, RIG, 0.5)


class TestDollyZoom:
    def test_linear_compensation(self):
        assert dolly_zoom_focal(35.0, 4.0, 8.0) == pytest.approx(70.0)

    def test_identity(self):
        assert dolly_zoom_focal(35.0, 4.0, 4.0) == pytest.approx(35.0)

    def test_non_positive_rejected(self):
        with pytest.raises(DomainError):
            dolly_zoom_focal(35.0, 0.0, 4.0)

    def test_constancy_over_sweep(self):
        # projection oracle: 0.5 m vertical segment at Q keeps its NDC height
        behavior = behavior_of(BehaviorKind.DOLLY_ZOOM, magnitude=1.8,
                               duration_s=2.0)
        start = ShotState(cine=CineSpaceParams(d=4.0, theta=0.3, phi=0.0,
                                               focal_mm=35.0))
        q = rig_center(RIG)
        head, foot = q + (0, 0.25, 0), q - (0, 0.25, 0)
        spans = []
        for j in range(48):
            state = sample(behavior, start, RIG, j / 47.0)
            pose = resolve_pose(state, RIG)
            intr = CameraIntrinsics(focal_mm=state.cine.focal_mm, aspect=16 / 9)
            _, y_head, _ = project_to_ndc(head, pose, intr)
            _, y_foot, _ = project_to_ndc(foot, pose, intr)
            spans.append(y_head - y_foot)
        ref = spans[0]
        assert all(abs(s - ref) / ref < 1e-6 for s in spans)
        # distance and focal do change underneath
        end = sample(behavior, start, RIG, 1.0)
        assert end.cine.d == pytest.approx(7.2)
        assert end.cine.focal_mm == pytest.approx(63.0)


class TestChain:
    def test_static_identity(self):
        assert chain_end_state([behavior_of(BehaviorKind.STATIC)], START, RIG) == START

    def test_push_then_pull_by_hand(self):
        start = ShotState(cine=CineSpaceParams(d=4.0, theta=0.0, phi=0.2))
        chain = [behavior_of(BehaviorKind.PUSH_IN, magnitude=0.5),
                 behavior_of(BehaviorKind.PULL_OUT, magnitude=1.0)]
        assert chain_end_state(chain, start, RIG).cine.d == pytest.approx(4.0)

    def test_arc_additivity(self):
        chain = [behavior_of(BehaviorKind.ARC, magnitude=math.pi / 2),
                 behavior_of(BehaviorKind.ARC, magnitude=math.pi / 2)]
        assert chain_end_state(chain, START, RIG).cine.theta == pytest.approx(math.pi)

    def test_empty_chain_rejected(self):
        with pytest.raises(ValidationError):
            chain_end_state([], START, RIG)

    def test_invalid_behavior_reports_index(self):
        chain = [behavior_of(BehaviorKind.STATIC),
                 CameraBehavior(BehaviorKind.PUSH_IN, 1.0, magnitude=2.0)]
        with pytest.raises(ValidationError) as exc:
            chain_end_state(chain, START, RIG)
        assert "behaviors[1]" in str(exc.value)


class TestValidate:
    def test_tracking_missing_track(self):
        violations = validate(CameraBehavior(BehaviorKind.TRACKING, 1.0))
        assert any("missing track" in v for v in violations)

    def test_negative_duration(self):
        violations = validate(CameraBehavior(BehaviorKind.ARC, -1.0, magnitude=1.0))
        assert any("duration must be positive" in v for v in violations)

    def test_well_formed_arc_ok(self):
        assert validate(behavior_of(BehaviorKind.ARC)) == []

    def test_track_on_non_tracking(self):
        curve = BezierCurve(((0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)))
        violations = validate(CameraBehavior(BehaviorKind.ARC, 1.0, magnitude=1.0,
                                             track=curve))
        assert any("only valid for TRACKING" in v for v in violations)

    def test_zoom_out_ratio_cap(self):
        violations = validate(CameraBehavior(BehaviorKind.ZOOM_OUT, 1.0,
                                             magnitude=2.5))
        assert violations


class TestFramingPreservation:
    def test_arc_and_push_keep_subjects_in_frame(self):
        from conftest import random_rig

        rng = np.random.default_rng(31)
        # hFOV 60 deg, 16:9; sweep must stay inside the guarantee regime,
        # so the push starts at 5*|AB| and ends at 2.5*|AB|
        intr = CameraIntrinsics(focal_mm=36.0 / (2 * math.tan(math.radians(30))),
                                aspect=16 / 9)
        from cineplan.geometry import in_frustum

        for _ in range(10):
            rig = random_rig(rng, blend_range=(0.25, 0.75))
            d0 = 5.0 * rig.baseline
            start = ShotState(cine=CineSpaceParams(
                d=d0, theta=rng.uniform(0, 2 * math.pi),
                phi=math.radians(rng.uniform(-70, 70))))
            for behavior in (behavior_of(BehaviorKind.PUSH_IN, magnitude=0.5),
                             behavior_of(BehaviorKind.ARC, magnitude=2 * math.pi)):
                for u in np.linspace(0, 1, 25):
                    pose = resolve_pose(sample(behavior, start, rig, u), rig)
                    assert in_frustum(rig.subject_a, pose, intr)
                    assert in_frustum(rig.subject_b, pose, intr)
