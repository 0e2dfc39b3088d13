"""cineplan: previsualization camera planning and conditioning export.

The library covers four layers:

* ``geometry`` — vectors, rigid poses, pinhole projection, Bezier curves;
* ``cinespace`` / ``behaviors`` / ``storyboard`` — the two-subject camera
  parameter space and the storyboard hierarchy that compiles to per-frame
  pose sequences;
* ``scene`` / ``groundtruth`` — a minimal mesh+character world and the
  software rasterizer exporting depth / pose-map / mask conditioning
  bundles;
* ``service`` / ``cli`` — an HTTP facade for the studio frontend and a
  deterministic batch entry point.
"""

from .behaviors import (BehaviorKind, CameraBehavior, OrientationMode,
                        ShotState, chain_end_state, dolly_zoom_focal,
                        resolve_pose, sample)
from .cinespace import (CineRig, CineSpaceParams, Easing, RigCoords, RigFrame,
                        ShotPreset, from_pose, interpolate, preset_params,
                        rig_center, rig_frame, to_pose)
from .errors import (BehindCameraError, CineplanError, DegenerateError,
                     DomainError, ExportError, SchemaError, ValidationError)
from .geometry import (BezierCurve, CameraIntrinsics, Pose, bezier_point,
                       bezier_tangent, in_frustum, look_at, ndc_to_pixel,
                       project_to_ndc, unproject_ndc, vec3)
from .scene import (AnimationClip, Character, SceneDoc, StaticMesh,
                    bone_capsules, joints_at_time, load_scene, scene_bounds,
                    scene_to_doc)
from .storyboard import (BoardMode, Keyframe, ShotAsset, Storyboard, Timeline,
                         assemble_timeline, asset_hash, generate,
                         generate_frame_mode, generate_shot_mode, load_asset,
                         save_asset)

__version__ = "0.1.0"
