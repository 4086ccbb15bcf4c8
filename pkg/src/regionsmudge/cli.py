"""Command-line front-end.

Subcommands: segment (write region-map sidecars), replay (run a stroke
script deterministically), bench (frame and kernel timings), compare
(run one scenario under all three tools), serve (TCP session protocol).

Exit codes: 0 success, 1 runtime error, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import kernels
from .bench import bench_frames, bench_kernels, format_frame_report, format_kernel_report
from .config import Params
from .raster import load_png, save_png
from .regions import RegionMap, flat_fill_regions, meanshift_regions
from .replay import replay_script
from .stroke import ScriptError, load_script

PARAM_FLAGS = (
    "alpha", "beta", "gamma", "theta", "ts_fraction",
    "stroke_width", "stroke_length", "strength", "pickup_rate", "stamp_spacing",
)


class InputError(Exception):
    """Bad user input: missing files, malformed scripts, invalid values."""


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="JSON file with parameter overrides")
    for name in PARAM_FLAGS:
        p.add_argument(f"--{name.replace('_', '-')}", type=float, dest=name)


def _collect_params(args, script_params: dict | None = None) -> Params:
    """defaults < script params < --params file < individual flags."""
    params = Params()
    if script_params:
        params = params.merged(script_params)
    if args.params:
        if not os.path.exists(args.params):
            raise InputError(f"params file not found: {args.params}")
        params = Params.from_file(args.params, base=params)
    flags = {name: getattr(args, name, None) for name in PARAM_FLAGS}
    return params.merged(flags)


def cmd_segment(args) -> int:
    if not os.path.exists(args.image):
        raise InputError(f"cannot read image: {args.image}")
    try:
        image = load_png(args.image)
    except OSError as exc:
        raise InputError(f"cannot read image: {exc}") from exc
    if args.method == "flat":
        rmap = flat_fill_regions(image, args.boundary_dilation)
    else:
        rmap = meanshift_regions(
            image,
            args.spatial_bandwidth,
            args.color_bandwidth,
            args.min_region,
            args.boundary_dilation,
        )
    base = args.out or (args.image[:-4] if args.image.endswith(".png") else args.image)
    labels_path, index_path = rmap.save(base)
    print(f"{len(rmap)} regions -> {labels_path}, {index_path}")
    return 0


def cmd_replay(args) -> int:
    script = _load_script_checked(args.script)
    params = _collect_params(args, script.get("params"))
    base_dir = os.path.dirname(os.path.abspath(args.script))
    canvas_path = os.path.join(base_dir, script["canvas"])
    if not os.path.exists(canvas_path):
        raise InputError(f"script canvas not found: {canvas_path}")
    session, report = replay_script(
        script,
        base_dir=base_dir,
        params_override=params.to_dict(),
        tool_override=args.tool,
        trace_path=args.trace,
    )
    out = args.out or "replay_out.png"
    save_png(session.canvas, out)
    report.output_path = out
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=1)
            fh.write("\n")
    print(
        f"{out}: {len(report.strokes)} strokes, "
        f"{report.pixels_changed_outside_selection} px changed outside selection"
    )
    return 0


def _load_script_checked(path: str) -> dict:
    if not os.path.exists(path):
        raise InputError(f"script not found: {path}")
    try:
        return load_script(path)
    except ScriptError as exc:
        raise InputError(str(exc)) from exc


def cmd_bench(args) -> int:
    if args.iterations < 1:
        raise InputError("need >= 1 iteration")
    backends = [args.backend]
    if args.backend == "both":
        backends = kernels.available_backends()
    prev = kernels.active_backend()
    try:
        for backend in backends:
            kernels.set_backend(backend)
            result = bench_frames(args.size, args.iterations)
            print(format_frame_report(result))
        if args.kernels:
            print(format_kernel_report(bench_kernels(args.size), args.size))
    finally:
        kernels.set_backend(prev)
    return 0


def _connected(mask: np.ndarray) -> bool:
    if not mask.any():
        return True
    join_w = np.zeros(mask.shape, dtype=bool)
    join_n = np.zeros(mask.shape, dtype=bool)
    join_w[:, 1:] = mask[:, 1:] & mask[:, :-1]
    join_n[1:, :] = mask[1:, :] & mask[:-1, :]
    labels = kernels.label_from_adjacency(join_w, join_n)
    return len(np.unique(labels[mask])) == 1


def _edge_sharpness(pixels: np.ndarray, labels: np.ndarray) -> float:
    """Mean max-channel difference across original region edges."""
    vals = pixels[..., :3].astype(np.int64)
    diffs = []
    eh = labels[:, 1:] != labels[:, :-1]
    if eh.any():
        d = np.abs(vals[:, 1:] - vals[:, :-1]).max(axis=2)
        diffs.append(d[eh])
    ev = labels[1:, :] != labels[:-1, :]
    if ev.any():
        d = np.abs(vals[1:, :] - vals[:-1, :]).max(axis=2)
        diffs.append(d[ev])
    if not diffs:
        return 0.0
    return float(np.concatenate(diffs).mean())


def cmd_compare(args) -> int:
    scenario = args.scenario
    canvas_path = os.path.join(scenario, "canvas.png")
    script_path = os.path.join(scenario, "script.json")
    for p in (canvas_path, script_path):
        if not os.path.exists(p):
            raise InputError(f"scenario file missing: {p}")
    script = _load_script_checked(script_path)
    params = _collect_params(args, script.get("params"))
    out_dir = args.out or scenario
    os.makedirs(out_dir, exist_ok=True)
    intent_path = os.path.join(scenario, "intent.json")
    intent_ids = None
    if os.path.exists(intent_path):
        with open(intent_path, encoding="utf-8") as fh:
            intent_ids = json.load(fh).get("intended_regions")

    original = load_png(canvas_path)
    metrics: dict[str, dict] = {}
    for tool in ("ss", "bs", "ts"):
        trace_path = os.path.join(out_dir, f"trace_{tool}.jsonl")
        session, report = replay_script(
            script,
            base_dir=scenario,
            params_override=params.to_dict(),
            tool_override=tool,
            trace_path=trace_path,
        )
        out_png = os.path.join(out_dir, f"out_{tool}.png")
        save_png(session.canvas, out_png)
        rmap = session.rmap
        if intent_ids is None:
            intent_union = rmap.union_area_mask(
                sorted(set().union(*[set(s.ever_selected) for s in report.strokes]))
            ) if tool == "ss" else None
        else:
            intent_union = rmap.union_area_mask(intent_ids)
        changed = (session.canvas.pixels != original.pixels).any(axis=2)
        outside = int(np.count_nonzero(changed & ~intent_union)) if intent_union is not None else None
        continuity = None
        if tool in ("ss", "ts"):
            continuity = True
            for entry in session.trace:
                if entry["selected"] and not _connected(
                    rmap.union_area_mask(entry["selected"])
                ):
                    continuity = False
                    break
        metrics[tool] = {
            "output": out_png,
            "trace": trace_path,
            "outside_intent_pixels": outside,
            "selection_continuity": continuity,
            "boundary_blur_score": _edge_sharpness(session.canvas.pixels, rmap.labels)
            / max(_edge_sharpness(original.pixels, rmap.labels), 1e-9),
            "pixels_changed_outside_selection": report.pixels_changed_outside_selection,
        }
    metrics_path = os.path.join(out_dir, "metrics.json")
    with open(metrics_path, "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=1)
        fh.write("\n")
    print(f"wrote {metrics_path}")
    return 0


def cmd_serve(args) -> int:
    from .protocol import serve

    params = _collect_params(args)
    serve(args.host, args.port, params)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regionsmudge",
        description="Region-aware color smudging: segment, replay, bench, compare, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="write region-map sidecar files for a canvas")
    p.add_argument("image")
    p.add_argument("--method", choices=("flat", "meanshift"), default="flat")
    p.add_argument("--spatial-bandwidth", type=float, default=8.0)
    p.add_argument("--color-bandwidth", type=float, default=16.0)
    p.add_argument("--min-region", type=int, default=64)
    p.add_argument("--boundary-dilation", type=float, default=10.0)
    p.add_argument("--out", help="sidecar base path (default: next to the image)")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("replay", help="replay a stroke script deterministically")
    p.add_argument("script")
    p.add_argument("--out", help="output PNG path")
    p.add_argument("--trace", help="write per-timestamp selection trace (JSONL)")
    p.add_argument("--report", help="write replay report JSON")
    p.add_argument("--tool", choices=("ss", "bs", "ts"), help="override every stroke's tool")
    _add_param_flags(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="frame benchmark against the reference figures")
    p.add_argument("--size", type=int, choices=(512, 1024), default=512)
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--backend", choices=("auto", "numba", "numpy", "both"), default="auto")
    p.add_argument("--kernels", action="store_true", help="also micro-benchmark each kernel per backend")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="run a scenario under ss, bs and ts")
    p.add_argument("scenario", help="directory containing canvas.png and script.json")
    p.add_argument("--out", help="output directory (default: the scenario dir)")
    _add_param_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="serve the session protocol over TCP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    _add_param_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - top-level CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
