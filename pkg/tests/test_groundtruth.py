import json
import math
from pathlib import Path

import numpy as np
import pytest

import cineplan
from cineplan import demo
from cineplan.errors import ExportError, ValidationError
from cineplan.geometry import CameraIntrinsics, Pose, look_at
from cineplan.groundtruth import (BundleManifest, CollageLayer, collage,
                                  encode_depth16, export_bundle,
                                  keypoints_doc, keypoints_from_doc, netpbm,
                                  project_keypoints, render_pose_map)
from cineplan.groundtruth.openpose import (OPENPOSE_JOINT_NAMES,
                                           OPENPOSE_LIMBS, OPENPOSE_PALETTE,
                                           Keypoint, KeypointSet)
from cineplan.scene import AnimationClip, Character, SceneDoc, StaticMesh

IDENTITY = Pose(np.eye(3), np.zeros(3))
HFOV90 = CameraIntrinsics(focal_mm=18.0, aspect=1.0)


def single_joint_character(position, mapped="nose"):
    frames = np.array([[list(position)]])
    return Character(object_id="solo", name="Solo", joint_names=("j",),
                     joint_parents=(-1,),
                     clip=AnimationClip(fps=1, frames=frames),
                     joint_map={mapped: "j"}, bone_radius_m=0.05,
                     subject_height_m=1.0)


def keypoint_set(visible_entries):
    """Build a KeypointSet with the given {name: (x, y)} visible joints."""
    points = []
    for name in OPENPOSE_JOINT_NAMES:
        if name in visible_entries:
            x, y = visible_entries[name]
            points.append(Keypoint(name, x, y, True))
        else:
            points.append(Keypoint(name, 0.0, 0.0, False))
    return KeypointSet(tuple(points))


class TestTemplate:
    def test_eighteen_joints_and_colors(self):
        assert len(OPENPOSE_JOINT_NAMES) == 18
        assert len(OPENPOSE_PALETTE) == 18
        assert len(OPENPOSE_LIMBS) == 17
        assert OPENPOSE_PALETTE[0] == (255, 0, 0)

    def test_keypoint_set_requires_template_order(self):
        with pytest.raises(ValidationError):
            KeypointSet(tuple(Keypoint("nose", 0, 0, False) for _ in range(18)))


class TestProjectKeypoints:
    def test_principal_point(self):
        char = single_joint_character((0.0, 0.0, -2.0))
        ks = project_keypoints(char, 0.0, IDENTITY, HFOV90, 512, 512)
        nose = ks["nose"]
        assert (nose.x, nose.y) == pytest.approx((256.0, 256.0))
        assert nose.visible

    def test_behind_camera_invisible(self):
        char = single_joint_character((0.0, 0.0, 2.0))
        ks = project_keypoints(char, 0.0, IDENTITY, HFOV90, 512, 512)
        assert not ks["nose"].visible

    def test_unmapped_joints_invisible(self):
        char = single_joint_character((0.0, 0.0, -2.0))
        ks = project_keypoints(char, 0.0, IDENTITY, HFOV90, 512, 512)
        assert sum(1 for k in ks.keypoints if k.visible) == 1

    def test_outside_image_invisible(self):
        char = single_joint_character((10.0, 0.0, -2.0))
        ks = project_keypoints(char, 0.0, IDENTITY, HFOV90, 512, 512)
        assert not ks["nose"].visible

    def test_matches_analytic_pinhole(self, demo_scene):
        # independent formula: px = (1 + x/( -z * tan(hfov/2))) * w/2
        rng = np.random.default_rng(13)
        hero = demo_scene["hero"]
        pose = look_at((3.0, 1.5, 4.0), (0.0, 1.0, 0.0))
        intr = CameraIntrinsics(focal_mm=31.0, aspect=16 / 9)
        width, height = 640, 360
        for t in rng.uniform(0.0, 2.0, 5):
            ks = project_keypoints(hero, float(t), pose, intr, width, height)
            from cineplan.scene import joints_at_time
            positions = joints_at_time(hero, float(t))
            for name, joint in hero.joint_map.items():
                p = positions[hero.joint_index(joint)]
                cam = pose.rotation.T @ (p - pose.translation)
                k = 18.0 / 31.0  # tan(hfov/2)
                px = (1.0 + cam[0] / (-cam[2] * k)) * width / 2.0
                py = (1.0 - cam[1] * (16 / 9) / (-cam[2] * k)) * height / 2.0
                got = ks[name]
                assert got.x == pytest.approx(px, abs=1e-6)
                assert got.y == pytest.approx(py, abs=1e-6)


class TestRenderPoseMap:
    def test_empty_is_black(self):
        image = render_pose_map([], 64, 64)
        assert image.shape == (64, 64, 3)
        assert not image.any()

    def test_single_nose_disc(self):
        image = render_pose_map([keypoint_set({"nose": (32.0, 32.0)})], 64, 64)
        colored = np.argwhere((image == OPENPOSE_PALETTE[0]).all(axis=2))
        assert len(colored)
        center = colored.mean(axis=0)
        assert center == pytest.approx((31.5, 31.5), abs=0.6)
        spread = np.abs(colored - np.array([31.5, 31.5])).max()
        assert spread <= 4.0
        others = np.argwhere(image.any(axis=2))
        assert len(others) == len(colored)

    def test_limb_drawn_when_both_visible(self):
        ks = keypoint_set({"neck": (10.0, 32.0), "right_shoulder": (54.0, 32.0)})
        image = render_pose_map([ks], 64, 64)
        # limb 0 = neck..right_shoulder, palette[0]; discs overwrite ends
        mid = image[32, 32]
        assert tuple(mid) == OPENPOSE_PALETTE[0]

    def test_limb_skipped_when_one_invisible(self):
        ks = keypoint_set({"neck": (10.0, 32.0)})
        image = render_pose_map([ks], 64, 64)
        assert not image[32, 30:].any()

    def test_draw_order_scene_order(self):
        a = keypoint_set({"nose": (32.0, 32.0)})
        b_entries = {"left_ear": (32.0, 32.0)}
        b = keypoint_set(b_entries)
        image = render_pose_map([a, b], 64, 64)
        assert tuple(image[32, 32]) == OPENPOSE_PALETTE[17]

    def test_doc_roundtrip(self):
        sets = [("hero", keypoint_set({"nose": (1.25, 2.5)}))]
        doc = json.loads(json.dumps(keypoints_doc(sets)))
        again = keypoints_from_doc(doc)
        assert again[0][0] == "hero"
        assert again[0][1] == sets[0][1]


@pytest.fixture(scope="module")
def small_bundle(tmp_path_factory):
    """A 6-frame 64x64 export of the demo scene, reused across tests."""
    scene = demo.build_demo_scene()
    board = demo.build_push_in_board()
    from dataclasses import replace
    from cineplan.behaviors import CameraBehavior
    fast = replace(board, fps=3)  # 2 s -> 6 frames
    asset = cineplan.generate(fast)
    out = tmp_path_factory.mktemp("bundle")
    intr = CameraIntrinsics(focal_mm=36.0, aspect=1.0)
    manifest = export_bundle(scene, asset, intr, 64, 64,
                             demo.default_prompts(), out)
    return scene, asset, manifest, out


class TestExportBundle:
    def test_file_count_law(self, small_bundle):
        scene, asset, manifest, out = small_bundle
        n, objects = asset.frames, len(scene.object_ids)
        assert len(list((out / "depth").glob("*.pfm"))) == n
        assert len(list((out / "depth16").glob("*.pgm"))) == n
        assert len(list((out / "pose").glob("*.ppm"))) == n
        assert len(list((out / "masks").glob("*.pgm"))) == n * objects
        assert len(list((out / "keypoints").glob("*.json"))) == n
        assert (out / "manifest.json").exists()

    def test_every_referenced_file_exists(self, small_bundle):
        _, _, manifest, out = small_bundle
        for i, record in enumerate(manifest.frame_records):
            files = record["files"]
            for key in ("depth_pfm", "depth16", "pose_map", "keypoints"):
                assert (out / files[key]).exists()
            for rel in files["masks"].values():
                assert (out / rel).exists()

    def test_manifest_matrices_pass_through(self, small_bundle):
        _, asset, manifest, _ = small_bundle
        for pose, record in zip(asset.poses, manifest.frame_records):
            assert record["pose"] == pose.flat()
            assert record["focal_mm"] in [f for f in asset.focals]

    def test_mask_partition_against_depth(self, small_bundle):
        scene, _, manifest, out = small_bundle
        record = manifest.frame_records[0]
        depth = netpbm.read_pfm(out / record["files"]["depth_pfm"])
        union = np.zeros(depth.shape, dtype=np.int32)
        for rel in record["files"]["masks"].values():
            union += (netpbm.read_pnm(out / rel) > 0).astype(np.int32)
        assert np.all(union <= 1)
        assert np.array_equal(union > 0, np.isfinite(depth))

    def test_prompt_bindings_reference_masks(self, small_bundle):
        _, _, manifest, _ = small_bundle
        by_target = {b["target"]: b for b in manifest.prompt_bindings}
        assert by_target["hero"]["mask_pattern"] == "masks/hero_%06d.pgm"
        assert by_target["environment"]["mask_pattern"] is None
        assert by_target["shot"]["mask_pattern"] is None

    def test_unknown_prompt_target_rejected(self, small_bundle, tmp_path):
        scene, asset, _, _ = small_bundle
        bad = [{"target": "ghost", "prompt": "x"}]
        with pytest.raises(ValidationError):
            export_bundle(scene, asset, CameraIntrinsics(aspect=1.0), 16, 16,
                          bad, tmp_path / "nope")

    def test_determinism_byte_identical(self, tmp_path):
        scene = demo.build_demo_scene()
        from dataclasses import replace
        board = replace(demo.build_push_in_board(), fps=2)  # 4 frames
        asset = cineplan.generate(board)
        intr = CameraIntrinsics(focal_mm=36.0, aspect=1.0)
        m1 = export_bundle(scene, asset, intr, 48, 48, demo.default_prompts(),
                           tmp_path / "one")
        m2 = export_bundle(scene, asset, intr, 48, 48, demo.default_prompts(),
                           tmp_path / "two")
        files1 = sorted(p.relative_to(tmp_path / "one")
                        for p in (tmp_path / "one").rglob("*") if p.is_file())
        files2 = sorted(p.relative_to(tmp_path / "two")
                        for p in (tmp_path / "two").rglob("*") if p.is_file())
        assert files1 == files2
        for rel in files1:
            assert (tmp_path / "one" / rel).read_bytes() == \
                (tmp_path / "two" / rel).read_bytes(), rel

    def test_failure_reports_frame_index(self, small_bundle, tmp_path,
                                         monkeypatch):
        scene, asset, _, _ = small_bundle
        from cineplan.groundtruth import export as export_mod
        real = export_mod.render_frame
        calls = {"n": 0}

        def explode(*args, **kwargs):
            if calls["n"] == 3:
                raise OSError("disk gone")
            calls["n"] += 1
            return real(*args, **kwargs)

        monkeypatch.setattr(export_mod, "render_frame", explode)
        with pytest.raises(ExportError) as exc:
            export_bundle(scene, asset, CameraIntrinsics(aspect=1.0), 16, 16,
                          [], tmp_path / "fail")
        assert exc.value.frame == 3
        assert exc.value.completed_frames == 3
        assert "frame 3" in str(exc.value)
        assert not (tmp_path / "fail" / "manifest.json").exists()

    def test_keypoint_doc_schema(self, small_bundle):
        _, _, manifest, out = small_bundle
        doc = json.loads((out / manifest.frame_records[0]["files"]["keypoints"])
                         .read_text())
        entry = doc["characters"][0]
        assert entry["object_id"] == "hero"
        joint = entry["joints"][0]
        assert set(joint) == {"name", "x", "y", "visible"}
        assert [j["name"] for j in entry["joints"]] == list(OPENPOSE_JOINT_NAMES)


class TestCollage:
    def test_single_layer_idempotent(self, small_bundle, tmp_path):
        scene, asset, manifest, out = small_bundle
        layer = CollageLayer(manifest=manifest,
                             frames=tuple(range(asset.frames)),
                             objects=scene.object_ids)
        collage([layer], 64, 64, tmp_path / "c")
        for i in range(asset.frames):
            rec = manifest.frame_records[i]["files"]
            assert (tmp_path / "c" / f"depth16/depth16_{i:06d}.pgm").read_bytes() \
                == (out / rec["depth16"]).read_bytes()
            assert (tmp_path / "c" / f"pose/pose_{i:06d}.ppm").read_bytes() \
                == (out / rec["pose_map"]).read_bytes()
            for oid, rel in rec["masks"].items():
                assert (tmp_path / "c" / f"masks/{oid}_{i:06d}.pgm").read_bytes() \
                    == (out / rel).read_bytes()

    def test_min_depth_winner_rule(self, tmp_path):
        # two constructed one-object bundles: near wall vs far wall
        def bundle(name, z, oid):
            mesh = StaticMesh(object_id=oid, name=oid,
                              vertices=[(-50, -50, z), (50, -50, z), (0, 50, z)],
                              faces=[(0, 1, 2)])
            scene = SceneDoc(objects=(mesh,))
            board = demo.build_push_in_board()
            from dataclasses import replace
            asset = cineplan.generate(replace(board, fps=1))  # 2 frames
            return export_bundle(scene, asset, CameraIntrinsics(aspect=1.0),
                                 32, 32, [], tmp_path / name)

        # place both walls in front of the camera path: the push-in camera sits
        # around z ~ +4.5..; use absolute z planes well behind the rig center
        near = bundle("near", -3.0, "near_wall")
        far = bundle("far", -9.0, "far_wall")
        layers = [
            CollageLayer(manifest=far, frames=(0, 1), objects=("far_wall",)),
            CollageLayer(manifest=near, frames=(0, 1), objects=("near_wall",)),
        ]
        doc = collage(layers, 32, 32, tmp_path / "out")
        mask_near = netpbm.read_pnm(tmp_path / "out" / "masks/near_wall_000000.pgm")
        mask_far = netpbm.read_pnm(tmp_path / "out" / "masks/far_wall_000000.pgm")
        covered_near = netpbm.read_pnm(
            tmp_path / "near" / near.frame_records[0]["files"]["masks"]["near_wall"]) > 0
        covered_far = netpbm.read_pnm(
            tmp_path / "far" / far.frame_records[0]["files"]["masks"]["far_wall"]) > 0
        both = covered_near & covered_far
        assert both.any()
        assert np.all(mask_near[both] == 255)  # nearer layer wins
        assert not mask_far[both].any()
        only_far = covered_far & ~covered_near
        if only_far.any():
            assert np.all(mask_far[only_far] == 255)
        empty = ~covered_near & ~covered_far
        if empty.any():
            depth16 = netpbm.read_pnm(tmp_path / "out" / "depth16/depth16_000000.pgm")
            assert not depth16[empty].any()

    def test_dimension_mismatch_rejected(self, small_bundle, tmp_path):
        scene, asset, manifest, _ = small_bundle
        layer = CollageLayer(manifest=manifest, frames=(0,),
                             objects=scene.object_ids)
        with pytest.raises(Exception):
            collage([layer], 128, 128, tmp_path / "x")

    def test_range_length_mismatch_rejected(self, small_bundle, tmp_path):
        scene, _, manifest, _ = small_bundle
        layers = [
            CollageLayer(manifest=manifest, frames=(0, 1), objects=("hero",)),
            CollageLayer(manifest=manifest, frames=(0,), objects=("hero",)),
        ]
        with pytest.raises(Exception):
            collage(layers, 64, 64, tmp_path / "x")

    def test_manifest_load_roundtrip(self, small_bundle):
        _, _, manifest, out = small_bundle
        again = BundleManifest.load(out / "manifest.json")
        assert again.frames == manifest.frames
        assert again.frame_records == manifest.frame_records
        assert again.root == out
