"""Command-line front end.

Subcommands: `fuse` (stack -> all-in-focus image + selection.json),
`metrics` (reference vs fused -> JSON report on stdout), `curve`
(max-activity curve as CSV), `simulate` (synthetic stack from a scene
description or preset), and `optics` (scalar diffraction formulas).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import optics, stackio
from .core import FocalStack, FusionConfig
from .errors import FusionError
from .fusion import fuse_pipeline
from .metrics import MetricsReport, compare_against_stack, cross_correlation, hte, mae, rmse


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--window", type=int, default=5, help="activity window size (odd, >= 3)")
    p.add_argument("--frames-per-peak", type=int, default=4,
                   help="frames kept around each activity peak")
    p.add_argument("--peak-sep", type=int, default=8,
                   help="minimum index distance between peaks")
    p.add_argument("--peak-thresh", type=float, default=0.10,
                   help="peak threshold as a fraction of the curve maximum")
    p.add_argument("--no-preselect", action="store_true",
                   help="fuse every frame instead of the frames around the peaks")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker threads for per-frame activity (default: all cores)")


def _config_from(args) -> FusionConfig:
    return FusionConfig(
        window=args.window,
        frames_per_peak=args.frames_per_peak,
        peak_min_separation=args.peak_sep,
        peak_threshold_frac=args.peak_thresh,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermofuse",
        description="Multi-focus fusion of radiometric thermal focal stacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse a stack into one all-in-focus image")
    p.add_argument("manifest", help="stack manifest JSON")
    _add_config_flags(p)
    p.add_argument("--out", help="fused image path (default: fused.<ext> next to the manifest)")

    p = sub.add_parser("metrics", help="score a fused image against a reference")
    p.add_argument("ref", help="reference image (csv or pgm)")
    p.add_argument("fused", help="fused image (csv or pgm)")
    p.add_argument("--probes", help="probe list JSON for the probe-error metric")
    p.add_argument("--stack", help="optional stack manifest for per-frame metrics")
    p.add_argument("--t-min", type=float, help="pgm mapping lower bound (degrees C)")
    p.add_argument("--t-max", type=float, help="pgm mapping upper bound (degrees C)")

    p = sub.add_parser("curve", help="export the per-frame max-activity curve as CSV")
    p.add_argument("manifest", help="stack manifest JSON")
    _add_config_flags(p)
    p.add_argument("--out", help="output CSV path (default: stdout)")

    p = sub.add_parser("simulate", help="generate a synthetic ground-truthed stack")
    p.add_argument("scene", nargs="?", help="scene description JSON")
    p.add_argument("--preset", type=int, choices=range(1, 7),
                   help="bundled two-object scene 1..6 (instead of a scene file)")
    p.add_argument("--seed", type=int, required=True, help="noise seed (>= 0)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=[stackio.FORMAT_CSV, stackio.FORMAT_PGM16],
                   default=stackio.FORMAT_CSV, help="frame file format")

    p = sub.add_parser("optics", help="diffraction-limit formulas")
    osub = p.add_subparsers(dest="formula", required=True)
    a = osub.add_parser("airy", help="Airy disc diameter")
    a.add_argument("--lambda", dest="wavelength", type=float, required=True,
                   help="wavelength (m)")
    a.add_argument("--v", dest="image_distance", type=float,
                   help="image distance (m); needs --D")
    a.add_argument("--D", dest="aperture", type=float, help="aperture diameter (m)")
    a.add_argument("--N", dest="f_number", type=float,
                   help="f-number (far-field variant)")
    d = osub.add_parser("dof", help="depth of field")
    d.add_argument("--lambda", dest="wavelength", type=float, required=True,
                   help="wavelength (m)")
    d.add_argument("--D", dest="aperture", type=float, required=True,
                   help="aperture diameter (m)")

    return parser


def _load_image(path: str, args):
    if path.endswith(".csv"):
        return stackio.load_csv(path)
    if args.t_min is None or args.t_max is None:
        raise FusionError(f"{path}: pgm images need --t-min and --t-max")
    return stackio.load_pgm16(path, args.t_min, args.t_max)


def _cmd_fuse(args) -> int:
    stack, manifest = stackio.load_stack(args.manifest)
    outcome = fuse_pipeline(stack, _config_from(args),
                            preselect=not args.no_preselect, jobs=args.jobs)
    ext = "csv" if manifest.format == stackio.FORMAT_CSV else "pgm"
    out = Path(args.out) if args.out else Path(args.manifest).parent / f"fused.{ext}"
    out.parent.mkdir(parents=True, exist_ok=True)
    stackio.save_image(out, outcome.fused, manifest)
    selection_doc = {
        "peaks": list(outcome.selection.peak_indices),
        "selected": list(outcome.selection.selected_indices),
        "preselect": not args.no_preselect,
    }
    (out.parent / "selection.json").write_text(json.dumps(selection_doc, indent=2) + "\n")
    print(f"fused {len(outcome.selection.selected_indices)} of {len(stack)} frames -> {out}")
    return 0


def _cmd_metrics(args) -> int:
    ref = _load_image(args.ref, args)
    fused = _load_image(args.fused, args)
    report = MetricsReport(
        cc=cross_correlation(ref, fused),
        rmse=rmse(ref, fused),
        mae=mae(ref, fused),
    )
    if args.probes:
        probes = stackio.load_probes(args.probes)
        report.hte = hte(fused, probes)
    if args.stack:
        stack, _ = stackio.load_stack(args.stack)
        report.per_frame = [
            {"index": i, "rmse": r, "cc": c}
            for i, (r, c) in enumerate(compare_against_stack(stack, ref))
        ]
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def _cmd_curve(args) -> int:
    stack, _ = stackio.load_stack(args.manifest)
    outcome = fuse_pipeline(stack, _config_from(args),
                            preselect=not args.no_preselect, jobs=args.jobs)
    text = stackio.format_curve_csv(
        outcome.curve, outcome.selection.peak_indices, outcome.selection.selected_indices
    )
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args) -> int:
    if (args.scene is None) == (args.preset is None):
        raise FusionError("simulate needs a scene file or --preset (not both)")
    if args.preset is not None:
        scene = optics.preset_scene(args.preset)
    else:
        scene_path = Path(args.scene)
        if not scene_path.exists():
            raise FileNotFoundError(f"scene file not found: {scene_path}")
        scene = optics.scene_from_dict(json.loads(scene_path.read_text()))
    stack, gt, probes = optics.simulate_stack(scene, seed=args.seed)
    out_dir = Path(args.out)
    span = scene.background_temp, max(obj.temp for obj in scene.objects)
    t_min, t_max = min(span) - 5.0, max(span) + 5.0
    manifest_path = stackio.save_stack(out_dir, stack, args.format, t_min=t_min, t_max=t_max)
    ext = "csv" if args.format == stackio.FORMAT_CSV else "pgm"
    gt_name = f"ground_truth.{ext}"
    if args.format == stackio.FORMAT_CSV:
        stackio.save_csv(out_dir / gt_name, gt)
    else:
        stackio.save_pgm16(out_dir / gt_name, gt, t_min, t_max)
    stackio.save_probes(out_dir / "probes.json", probes)
    scene_doc = optics.scene_to_dict(scene)
    scene_doc["seed"] = args.seed
    scene_doc["ground_truth"] = gt_name
    scene_doc["probes"] = [{"x": p.x, "y": p.y, "true_temp": p.true_temp} for p in probes]
    (out_dir / "scene.json").write_text(json.dumps(scene_doc, indent=2) + "\n")
    print(f"wrote {len(stack)} frames + ground truth to {out_dir} ({manifest_path.name})")
    return 0


def _cmd_optics(args) -> int:
    if args.formula == "dof":
        value = optics.depth_of_field(args.aperture, args.wavelength)
    elif args.f_number is not None:
        value = optics.airy_disc_diameter_far_field(args.wavelength, args.f_number)
    elif args.image_distance is not None and args.aperture is not None:
        value = optics.airy_disc_diameter(args.wavelength, args.image_distance, args.aperture)
    else:
        raise FusionError("airy needs either --N or both --v and --D")
    print(f"{value:.12g}")
    return 0


_COMMANDS = {
    "fuse": _cmd_fuse,
    "metrics": _cmd_metrics,
    "curve": _cmd_curve,
    "simulate": _cmd_simulate,
    "optics": _cmd_optics,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FusionError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
