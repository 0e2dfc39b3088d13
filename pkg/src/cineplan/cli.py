"""Headless batch entry point.

Subcommands::

    cineplan validate --scene scene.json --board board.json [--board ...]
    cineplan generate --board board.json --out asset.json
    cineplan export   --scene scene.json (--board B | --asset A) --out DIR
                      --size 512x512 [--near 0.1] [--far 1000] [--fps N]
                      [--prompts prompts.json] [--tag TAG]
    cineplan collage  --layers layers.json --out DIR --size 512x512

Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 internal
error. Failures print a machine-readable JSON report on stderr. Identical
inputs produce byte-identical artifacts; nothing embeds a timestamp (the
manifest's creation tag comes from ``--tag`` and defaults to empty).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .errors import DomainError, ExportError, SchemaError, ValidationError
from .geometry import CameraIntrinsics
from .groundtruth import BundleManifest, CollageLayer, collage, export_bundle
from .scene import load_scene
from .storyboard import Storyboard, generate, load_asset, save_asset

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_INTERNAL = 3


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        width, height = int(w), int(h)
    except ValueError:
        raise DomainError(f"--size wants WxH (e.g. 512x512), got {text!r}")
    if width <= 0 or height <= 0:
        raise DomainError(f"--size must be positive, got {text!r}")
    return width, height


def _load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def _load_board(path) -> Storyboard:
    return Storyboard.from_doc(_load_json(path), Path(path).name)


def _write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_validate(args) -> int:
    report = {"ok": True, "checked": []}
    problems = []
    if args.scene:
        load_scene(args.scene)
        report["checked"].append({"scene": str(args.scene)})
    for board_path in args.board or []:
        board = _load_board(board_path)
        violations = board.validate()
        report["checked"].append({"storyboard": board.id,
                                  "violations": violations})
        problems.extend(f"{board.id}: {v}" for v in violations)
    if problems:
        raise ValidationError("; ".join(problems), violations=problems)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_generate(args) -> int:
    board = _load_board(args.board)
    asset = generate(board)
    _write_json(args.out, save_asset(asset))
    print(json.dumps({"storyboard": board.id, "frames": asset.frames,
                      "out": str(args.out)}))
    return EXIT_OK


def cmd_export(args) -> int:
    scene = load_scene(args.scene)
    if args.board:
        asset = generate(_load_board(args.board))
    elif args.asset:
        asset = load_asset(_load_json(args.asset))
    else:
        raise DomainError("export needs --board or --asset")
    if args.fps:
        asset = replace(asset, fps=args.fps)
    width, height = _parse_size(args.size)
    intr = CameraIntrinsics(focal_mm=asset.focals[0], aspect=width / height,
                            near_m=args.near, far_m=args.far)
    prompts = _load_json(args.prompts) if args.prompts else []
    manifest = export_bundle(scene, asset, intr, width, height, prompts,
                             args.out, creation_tag=args.tag)
    print(json.dumps({"frames": manifest.frames, "out": str(args.out),
                      "manifest": str(Path(args.out) / "manifest.json")}))
    return EXIT_OK


def cmd_collage(args) -> int:
    spec = _load_json(args.layers)
    layers = []
    for i, entry in enumerate(spec.get("layers", [])):
        manifest_path = entry.get("manifest")
        if not manifest_path:
            raise SchemaError(f"layers[{i}]: missing manifest path",
                              field_path=f"layers[{i}].manifest")
        base = Path(args.layers).parent
        manifest = BundleManifest.load(base / manifest_path if not
                                       Path(manifest_path).is_absolute()
                                       else manifest_path)
        frames = entry.get("frames")
        if isinstance(frames, list) and len(frames) == 2 \
                and all(isinstance(v, int) for v in frames):
            frame_list = range(frames[0], frames[1])
        elif isinstance(frames, list):
            frame_list = frames
        else:
            raise SchemaError(f"layers[{i}]: frames must be [start, stop] or a list",
                              field_path=f"layers[{i}].frames")
        layers.append(CollageLayer(manifest=manifest, frames=tuple(frame_list),
                                   objects=tuple(entry.get("objects", []))))
    width, height = _parse_size(args.size)
    doc = collage(layers, width, height, args.out)
    print(json.dumps({"frames": doc["frames"], "out": str(args.out)}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cineplan",
        description="Camera planning and conditioning-bundle export")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate scene and storyboard files")
    p.add_argument("--scene", help="scene document")
    p.add_argument("--board", action="append", help="storyboard document (repeatable)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="compile a storyboard to a shot asset")
    p.add_argument("--board", required=True)
    p.add_argument("--out", required=True, help="asset JSON output path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("export", help="export a conditioning bundle")
    p.add_argument("--scene", required=True)
    p.add_argument("--board", help="storyboard document to generate from")
    p.add_argument("--asset", help="pre-generated asset JSON")
    p.add_argument("--out", required=True, help="bundle output directory")
    p.add_argument("--size", default="512x512", help="WxH, default 512x512")
    p.add_argument("--fps", type=int, help="override asset fps")
    p.add_argument("--near", type=float, default=0.1)
    p.add_argument("--far", type=float, default=1000.0)
    p.add_argument("--prompts", help="prompt bindings JSON file")
    p.add_argument("--tag", default="", help="creation tag stored in the manifest")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("collage", help="composite exported bundles")
    p.add_argument("--layers", required=True, help="layer spec JSON file")
    p.add_argument("--out", required=True)
    p.add_argument("--size", default="512x512")
    p.set_defaults(func=cmd_collage)

    return parser


def _report(code: int, err: Exception) -> int:
    body = {"code": code, "error": {"type": type(err).__name__, "message": str(err)}}
    field_path = getattr(err, "field_path", None)
    if field_path:
        body["error"]["field_path"] = field_path
    violations = getattr(err, "violations", None)
    if violations and len(violations) > 1:
        body["error"]["violations"] = violations
    frame = getattr(err, "frame", None)
    if frame is not None:
        body["error"]["frame"] = frame
    print(json.dumps(body, indent=2), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DomainError) as err:
        return _report(EXIT_VALIDATION, err)
    except (ExportError, OSError, json.JSONDecodeError) as err:
        return _report(EXIT_IO, err)
    except Exception as err:  # anything else is an internal failure
        return _report(EXIT_INTERNAL, err)


if __name__ == "__main__":
    sys.exit(main())
