"""HTTP facade for interactive studio clients.

One project per server process. Endpoints:

* ``GET /project`` / ``PUT /project`` — full project document
* ``PATCH /cameras/{id}`` — merge rig/params edits, returns the new pose and
  the projected NDC positions of both subjects for framing feedback
* ``GET /preview`` — synchronous render of one layer (DEPTH16 | ID_COLOR |
  POSEMAP) for a live camera (``camera``+``t``) or a generated asset frame
  (``asset``+``frame``); raw PGM/PPM bytes
* ``POST /storyboards`` — create or replace a storyboard (may bind a camera)
* ``POST /storyboards/{id}/generate`` — compile to a content-addressed asset
* ``POST /exports`` / ``GET /exports/{id}`` — background bundle export jobs

Every mutation carries the caller's ``revision``; a stale revision is
rejected with 409 and no partial write. Validation failures return 422 with
``{code, message, field_path}`` and leave the project untouched. Preview and
export share one render implementation, so their outputs are byte-identical
for identical inputs.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .behaviors import ShotState
from .cinespace import (CineRig, CineSpaceParams, ShotPreset, preset_params,
                        to_pose)
from .errors import CineplanError, DomainError, ValidationError
from .geometry import CameraIntrinsics, project_points
from .groundtruth import (color_ids, encode_depth16, encode_pgm16, encode_ppm,
                          export_bundle, render_frame, render_pose_map)
from .scene import SceneDoc, load_scene, scene_to_doc
from .storyboard import (ShotAsset, Storyboard, Timeline, asset_hash,
                         generate, save_asset)

MAX_PREVIEW_DIM = 1024
PREVIEW_LAYERS = ("DEPTH16", "ID_COLOR", "POSEMAP")
FEEDBACK_ASPECT = 16.0 / 9.0  # aspect used for the PATCH framing feedback


class ConflictError(CineplanError):
    """Stale revision: the client must refetch before mutating."""


@dataclass
class CameraState:
    rig: CineRig
    params: CineSpaceParams

    def to_doc(self) -> dict:
        return {"rig": self.rig.to_doc(), "params": self.params.to_doc()}


@dataclass
class Project:
    scene: SceneDoc
    cameras: dict = field(default_factory=dict)
    storyboards: dict = field(default_factory=dict)
    timeline: Timeline = field(default_factory=lambda: Timeline((), 24))
    revision: int = 0


@dataclass
class ExportJobState:
    id: str
    state: str = "QUEUED"  # QUEUED -> RUNNING -> DONE | FAILED
    done: int = 0
    total: int = 0
    out_dir: str = ""
    manifest: str | None = None
    error: str | None = None

    def to_doc(self) -> dict:
        doc = {"id": self.id, "state": self.state, "done": self.done,
               "total": self.total, "out_dir": self.out_dir}
        if self.manifest:
            doc["manifest"] = self.manifest
        if self.error:
            doc["error"] = self.error
        return doc


def project_from_doc(doc: dict) -> Project:
    scene = load_scene(doc["scene"]) if "scene" in doc else None
    if scene is None:
        raise ValidationError("project document needs a scene", field_path="scene")
    cameras = {}
    for cid, cam in (doc.get("cameras") or {}).items():
        cameras[cid] = CameraState(
            rig=CineRig.from_doc(cam["rig"], f"cameras[{cid}].rig"),
            params=CineSpaceParams.from_doc(cam["params"], f"cameras[{cid}].params"))
    storyboards = {}
    for sid, body in (doc.get("storyboards") or {}).items():
        storyboards[sid] = Storyboard.from_doc(body, f"storyboards[{sid}]")
    timeline = Timeline.from_doc(doc["timeline"]) if doc.get("timeline") \
        else Timeline((), 24)
    return Project(scene=scene, cameras=cameras, storyboards=storyboards,
                   timeline=timeline)


def project_to_doc(project: Project) -> dict:
    return {
        "revision": project.revision,
        "scene": scene_to_doc(project.scene),
        "cameras": {cid: cam.to_doc() for cid, cam in project.cameras.items()},
        "storyboards": {sid: b.to_doc() for sid, b in project.storyboards.items()},
        "timeline": project.timeline.to_doc(),
    }


def default_project() -> Project:
    from . import demo

    board = demo.build_push_in_board()
    return Project(
        scene=demo.build_demo_scene(),
        cameras={"main": CameraState(rig=demo.build_demo_rig(),
                                     params=demo.demo_initial_state().cine)},
        storyboards={board.id: board},
        timeline=demo.build_demo_timeline(),
    )


def _intrinsics(focal_mm: float, aspect: float) -> CameraIntrinsics:
    return CameraIntrinsics(focal_mm=focal_mm, aspect=aspect)


def _subject_ndc(rig: CineRig, pose, intr) -> tuple:
    """NDC of subjects A and B, or None where a subject is behind the camera."""
    out = []
    for p in (rig.subject_a, rig.subject_b):
        x, y, depth = project_points(p, pose.rotation, pose.translation, intr)
        out.append([float(x), float(y)] if depth > 1e-9 else None)
    return out[0], out[1]


def create_app(project: Project | None = None, export_root=None) -> FastAPI:
    app = FastAPI(title="cineplan studio service")
    store_lock = threading.RLock()
    state = {
        "project": project if project is not None else default_project(),
        "assets": {},   # content hash -> ShotAsset
        "jobs": {},     # job id -> ExportJobState
    }
    pool = ThreadPoolExecutor(max_workers=2)
    export_base = Path(export_root) if export_root else Path("exports")

    def error_response(status: int, code: str, message: str, field_path=None):
        body = {"code": code, "message": message}
        if field_path:
            body["field_path"] = field_path
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return error_response(409, "conflict", str(exc))

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return error_response(422, "validation", str(exc), exc.field_path)

    @app.exception_handler(DomainError)
    async def _domain(request: Request, exc: DomainError):
        return error_response(422, "validation", str(exc))

    @app.exception_handler(CineplanError)
    async def _internal(request: Request, exc: CineplanError):
        return error_response(500, "internal", str(exc))

    def check_revision(payload: dict):
        given = payload.get("revision")
        current = state["project"].revision
        if given is None:
            raise ValidationError("mutation needs the caller's revision",
                                  field_path="revision")
        if given != current:
            raise ConflictError(f"stale revision {given}, project is at {current}")

    @app.get("/project")
    def get_project():
        with store_lock:
            doc = project_to_doc(state["project"])
            doc["assets"] = {h: {"frames": a.frames, "storyboard": a.storyboard_id,
                                 "fps": a.fps}
                             for h, a in state["assets"].items()}
            return doc

    @app.put("/project")
    def put_project(payload: dict = Body(...)):
        with store_lock:
            check_revision(payload)
            new_project = project_from_doc(payload.get("project") or {})
            new_project.revision = state["project"].revision + 1
            state["project"] = new_project
            return {"revision": new_project.revision}

    @app.patch("/cameras/{camera_id}")
    def patch_camera(camera_id: str, payload: dict = Body(...)):
        with store_lock:
            check_revision(payload)
            project = state["project"]
            cam = project.cameras.get(camera_id)
            if cam is None:
                return error_response(404, "not_found", f"no camera {camera_id!r}")
            rig_doc = cam.rig.to_doc()
            rig_doc.update(payload.get("rig") or {})
            rig = CineRig.from_doc(rig_doc, "rig")
            params_doc = cam.params.to_doc()
            params_doc.update(payload.get("params") or {})
            params = CineSpaceParams.from_doc(params_doc, "params")
            preset = payload.get("preset")
            if preset:
                kind = ShotPreset(preset["kind"])
                d = preset_params(kind, float(preset["subject_height_m"]))
                params = CineSpaceParams(d=d, theta=params.theta, phi=params.phi,
                                         focal_mm=params.focal_mm,
                                         screen_offset=params.screen_offset)
            pose = to_pose(rig, params)  # validates before committing
            project.cameras[camera_id] = CameraState(rig=rig, params=params)
            project.revision += 1
            intr = _intrinsics(params.focal_mm, FEEDBACK_ASPECT)
            ndc_a, ndc_b = _subject_ndc(rig, pose, intr)
            return {
                "revision": project.revision,
                "camera": project.cameras[camera_id].to_doc(),
                "pose": pose.flat(),
                "position": pose.translation.tolist(),
                "ndc_a": ndc_a,
                "ndc_b": ndc_b,
            }

    @app.get("/preview")
    def preview(width: int, height: int, layer: str,
                camera: str | None = None, t: float = 0.0,
                asset: str | None = None, frame: int = 0):
        if not (0 < width <= MAX_PREVIEW_DIM and 0 < height <= MAX_PREVIEW_DIM):
            return error_response(
                422, "validation",
                f"preview dimensions must be in 1..{MAX_PREVIEW_DIM}, "
                f"got {width}x{height}")
        if layer not in PREVIEW_LAYERS:
            return error_response(
                422, "validation",
                f"unknown layer {layer!r}; valid layers: {', '.join(PREVIEW_LAYERS)}")
        with store_lock:
            project = state["project"]
            scene = project.scene
            if asset is not None:
                shot = state["assets"].get(asset)
                if shot is None:
                    return error_response(404, "not_found", f"no asset {asset!r}")
                if not (0 <= frame < shot.frames):
                    return error_response(
                        422, "validation",
                        f"frame {frame} out of range 0..{shot.frames - 1}")
                pose = shot.poses[frame]
                focal = shot.focals[frame]
                t_s = frame / shot.fps
            elif camera is not None:
                cam = project.cameras.get(camera)
                if cam is None:
                    return error_response(404, "not_found", f"no camera {camera!r}")
                pose = to_pose(cam.rig, cam.params)
                focal = cam.params.focal_mm
                t_s = t
            else:
                return error_response(422, "validation",
                                      "preview needs either camera or asset")
        intr = _intrinsics(focal, width / height)
        render = render_frame(scene, t_s, pose, intr, width, height)
        if layer == "DEPTH16":
            body = encode_pgm16(encode_depth16(render.depth, intr.near_m, intr.far_m))
            media = "image/x-portable-graymap"
        elif layer == "ID_COLOR":
            body = encode_ppm(color_ids(render.ids))
            media = "image/x-portable-pixmap"
        else:
            body = encode_ppm(render_pose_map([ks for _, ks in render.keypoint_sets],
                                              width, height))
            media = "image/x-portable-pixmap"
        return Response(content=body, media_type=media, headers={
            "X-Width": str(width), "X-Height": str(height), "X-Layer": layer})

    @app.post("/storyboards")
    def post_storyboard(payload: dict = Body(...)):
        with store_lock:
            check_revision(payload)
            project = state["project"]
            doc = dict(payload.get("storyboard") or {})
            camera_id = doc.pop("camera", None)
            if camera_id is not None:
                cam = project.cameras.get(camera_id)
                if cam is None:
                    return error_response(404, "not_found", f"no camera {camera_id!r}")
                doc.setdefault("rig", cam.rig.to_doc())
                doc.setdefault("initial", ShotState(cine=cam.params).to_doc())
            board = Storyboard.from_doc(doc).require_valid()
            project.storyboards[board.id] = board
            project.revision += 1
            return {"revision": project.revision, "storyboard": board.to_doc()}

    @app.post("/storyboards/{board_id}/generate")
    def generate_storyboard(board_id: str):
        with store_lock:
            board = state["project"].storyboards.get(board_id)
            if board is None:
                return error_response(404, "not_found", f"no storyboard {board_id!r}")
            shot = generate(board)
            h = asset_hash(shot)
            state["assets"][h] = shot
            return {
                "asset": h,
                "frames": shot.frames,
                "fps": shot.fps,
                "first_pose": shot.poses[0].flat(),
                "last_pose": shot.poses[-1].flat(),
                "first_params": shot.cine_params[0].to_doc(),
                "last_params": shot.cine_params[-1].to_doc(),
            }

    @app.get("/assets/{asset_id}")
    def get_asset(asset_id: str):
        with store_lock:
            shot = state["assets"].get(asset_id)
            if shot is None:
                return error_response(404, "not_found", f"no asset {asset_id!r}")
            return save_asset(shot)

    def run_export(job: ExportJobState, scene: SceneDoc, shot: ShotAsset,
                   width: int, height: int, prompts, out_dir: Path, tag: str):
        with store_lock:
            job.state = "RUNNING"

        def on_progress(done, total):
            with store_lock:
                job.done, job.total = done, total

        try:
            intr = _intrinsics(shot.focals[0], width / height)
            manifest = export_bundle(scene, shot, intr, width, height, prompts,
                                     out_dir, creation_tag=tag,
                                     progress=on_progress)
            with store_lock:
                job.state = "DONE"
                job.manifest = str(out_dir / "manifest.json")
        except Exception as err:  # job must record any failure
            with store_lock:
                job.state = "FAILED"
                job.error = str(err)

    @app.post("/exports")
    def post_export(payload: dict = Body(...)):
        with store_lock:
            asset_id = payload.get("asset")
            shot = state["assets"].get(asset_id)
            if shot is None:
                return error_response(404, "not_found", f"no asset {asset_id!r}")
            width = int(payload.get("width", 512))
            height = int(payload.get("height", 512))
            if width <= 0 or height <= 0:
                return error_response(422, "validation",
                                      "export resolution must be positive")
            job_id = uuid.uuid4().hex[:12]
            out_dir = Path(payload["out_dir"]) if payload.get("out_dir") \
                else export_base / job_id
            job = ExportJobState(id=job_id, total=shot.frames, out_dir=str(out_dir))
            state["jobs"][job_id] = job
            scene = state["project"].scene
            prompts = payload.get("prompts") or []
            tag = payload.get("creation_tag", "")
        pool.submit(run_export, job, scene, shot, width, height, prompts,
                    out_dir, tag)
        return job.to_doc()

    @app.get("/exports/{job_id}")
    def poll_job(job_id: str):
        with store_lock:
            job = state["jobs"].get(job_id)
            if job is None:
                return error_response(404, "not_found", f"no export job {job_id!r}")
            return job.to_doc()

    return app


def main():
    import uvicorn

    uvicorn.run(create_app(), host="127.0.0.1", port=8023)


if __name__ == "__main__":
    main()
