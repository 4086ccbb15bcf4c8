"""Benchmark harness.

Frame benchmark: replays a scripted diagonal stroke over a synthetic
multi-region canvas and reports per-sample selection-update and smudge
times next to the reference figures (selection 1.39 ms / 720
fps and smudging 20.83 ms / 48 fps at 512x512; 4.17 ms / 240 fps and
66.67 ms / 15 fps at 1024x1024).

Kernel benchmark: times each hot kernel on both backends, which is the
point of keeping the pure-numpy twins around.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import Params
from .engine import SmudgeSession
from .raster import RasterImage
from .regions import flat_fill_regions
from .stroke import StrokeSample

REFERENCE = {
    512: {"selection_ms": 1.39, "selection_fps": 720, "smudge_ms": 20.83, "smudge_fps": 48},
    1024: {"selection_ms": 4.17, "selection_fps": 240, "smudge_ms": 66.67, "smudge_fps": 15},
}

_PALETTE = [
    (198, 56, 44), (240, 150, 42), (236, 212, 68), (126, 186, 60),
    (52, 162, 124), (44, 138, 202), (88, 70, 190), (168, 62, 184),
    (222, 92, 140), (128, 88, 48), (96, 96, 96), (206, 206, 206),
    (60, 60, 110), (110, 60, 60), (60, 110, 60), (180, 150, 110),
]


def build_bench_canvas(size: int) -> RasterImage:
    """Deterministic 4x4 color blocks plus a centered disk."""
    img = np.zeros((size, size, 4), dtype=np.uint8)
    img[..., 3] = 255
    cell = size // 4
    for by in range(4):
        for bx in range(4):
            img[by * cell : (by + 1) * cell, bx * cell : (bx + 1) * cell, :3] = _PALETTE[
                by * 4 + bx
            ]
    ys, xs = np.mgrid[0:size, 0:size]
    disk = (xs - size * 0.62) ** 2 + (ys - size * 0.38) ** 2 <= (size * 0.14) ** 2
    img[disk, :3] = (20, 20, 20)
    return RasterImage(img)


def bench_stroke(size: int, spacing: float = 6.0) -> list[StrokeSample]:
    """Diagonal sweep with a bend, crossing several regions."""
    waypoints = [
        (size * 0.08, size * 0.22),
        (size * 0.45, size * 0.40),
        (size * 0.62, size * 0.70),
        (size * 0.90, size * 0.78),
    ]
    samples = []
    t = 0.0
    for (x0, y0), (x1, y1) in zip(waypoints, waypoints[1:]):
        seg = float(np.hypot(x1 - x0, y1 - y0))
        steps = max(1, int(seg / spacing))
        for i in range(steps):
            f = i / steps
            samples.append(StrokeSample(x0 + (x1 - x0) * f, y0 + (y1 - y0) * f, t))
            t += 8.0
    samples.append(StrokeSample(*waypoints[-1], t))
    return samples


@dataclass
class FrameBenchResult:
    size: int
    iterations: int
    advances: int
    selection_ms: list[float] = field(default_factory=list)
    smudge_ms: list[float] = field(default_factory=list)
    total_ms: list[float] = field(default_factory=list)

    def median(self, series: str) -> float:
        return statistics.median(getattr(self, series))

    def mean(self, series: str) -> float:
        return statistics.fmean(getattr(self, series))


def bench_frames(size: int, iterations: int, params: Params | None = None) -> FrameBenchResult:
    """Per-sample timings over `iterations` replays of the bench stroke."""
    if iterations < 1:
        raise ValueError("need >= 1 iteration")
    params = params or Params()
    canvas = build_bench_canvas(size)
    rmap = flat_fill_regions(canvas, params.boundary_dilation)
    samples = bench_stroke(size)
    result = FrameBenchResult(size=size, iterations=iterations, advances=len(samples) - 1)
    for it in range(iterations + 1):  # first pass warms the JIT cache
        session = SmudgeSession(canvas.snapshot(), rmap, params)
        session.begin_stroke("ss", samples[0])
        for s in samples[1:]:
            res = session.smudge_advance(s)
            if it > 0:
                result.selection_ms.append(res.selection_ms)
                result.smudge_ms.append(res.smudge_ms)
                result.total_ms.append(res.selection_ms + res.smudge_ms)
        session.end_stroke()
    return result


def format_frame_report(result: FrameBenchResult) -> str:
    ref = REFERENCE.get(result.size)
    lines = [
        f"frame benchmark {result.size}x{result.size} "
        f"({result.iterations} iterations, {result.advances} samples/stroke, "
        f"backend {kernels.active_backend()})",
        f"  selection update: median {result.median('selection_ms'):8.3f} ms   "
        f"mean {result.mean('selection_ms'):8.3f} ms",
        f"  smudge stamping:  median {result.median('smudge_ms'):8.3f} ms   "
        f"mean {result.mean('smudge_ms'):8.3f} ms",
        f"  full advance:     median {result.median('total_ms'):8.3f} ms   "
        f"mean {result.mean('total_ms'):8.3f} ms",
    ]
    if ref:
        lines.append(
            f"  reference CPU figures: selection {ref['selection_ms']} ms, "
            f"smudging {ref['smudge_ms']} ms "
            f"({ref['selection_fps']} fps / {ref['smudge_fps']} fps)"
        )
    return "\n".join(lines)


def _time_callable(fn, repeats: int = 5) -> float:
    best = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best.append((time.perf_counter() - t0) * 1000.0)
    return statistics.median(best)


def bench_kernels(size: int) -> list[dict]:
    """Median ms per kernel on every available backend."""
    canvas = build_bench_canvas(size)
    rmap = flat_fill_regions(canvas)
    boundary = np.zeros((size, size), dtype=bool)
    boundary[rmap.labels != np.roll(rmap.labels, 1, axis=1)] = True
    px = canvas.pixels.astype(np.int64)
    key = (px[..., 0] << 24) | (px[..., 1] << 16) | (px[..., 2] << 8) | px[..., 3]
    join_w = np.zeros(key.shape, dtype=bool)
    join_n = np.zeros(key.shape, dtype=bool)
    join_w[:, 1:] = key[:, 1:] == key[:, :-1]
    join_n[1:, :] = key[1:, :] == key[:-1, :]
    window = np.array(
        [[size * 0.2 + i * 2.0, size * 0.5 + (i % 5)] for i in range(55)], dtype=np.float64
    )
    rng = np.random.default_rng(7)
    ms_img = rng.integers(0, 256, (size // 8, size // 8, 3)).astype(np.float64)

    rows = []
    for name in kernels.available_backends():
        impl = kernels.get_impl(name)
        mask = np.zeros((size, size), dtype=bool)
        pickup = rng.integers(0, 256, (81, 81, 4)).astype(np.uint8)
        valid = np.ones((81, 81), dtype=np.uint8)
        cv = canvas.pixels.copy()
        mask[:] = True

        def run_stamps(impl=impl, cv=cv, mask=mask, pickup=pickup, valid=valid):
            for i in range(20):
                x = size * 0.2 + i * 4.0
                impl.stamp(cv, mask, pickup, valid, int(x), size // 2, 40, x, size / 2.0, 30.0, 0.7, 0.5)

        repeats = 3 if name == "numpy" else 5
        entries = {
            "edt_sq": lambda impl=impl: impl.edt_sq(boundary),
            "label_components": lambda impl=impl: impl.label_from_adjacency(join_w, join_n),
            "stroke_footprint": lambda impl=impl: impl.stadium_mask(window, 55.0, size, size),
            "stamp_x20": run_stamps,
            "mean_shift_filter": lambda impl=impl: impl.mean_shift_modes(
                ms_img, 8.0, 16.0, 20, 0.05
            ),
        }
        for kernel_name, fn in entries.items():
            fn()  # warm JIT before timing
            rows.append(
                {"kernel": kernel_name, "backend": name, "ms": _time_callable(fn, repeats)}
            )
    return rows


def format_kernel_report(rows: list[dict], size: int) -> str:
    lines = [f"kernel benchmark at {size}x{size} (median ms)"]
    names = []
    for r in rows:
        if r["kernel"] not in names:
            names.append(r["kernel"])
    by = {(r["kernel"], r["backend"]): r["ms"] for r in rows}
    backends = sorted({r["backend"] for r in rows})
    header = "  " + "kernel".ljust(20) + "".join(b.rjust(12) for b in backends)
    if len(backends) == 2:
        header += "speedup".rjust(10)
    lines.append(header)
    for name in names:
        row = "  " + name.ljust(20)
        vals = []
        for b in backends:
            v = by.get((name, b))
            vals.append(v)
            row += (f"{v:12.3f}" if v is not None else "n/a".rjust(12))
        if len(backends) == 2 and None not in vals and vals[0] > 0:
            fast = by.get((name, "numba"))
            slow = by.get((name, "numpy"))
            if fast and slow:
                row += f"{slow / fast:9.1f}x"
        lines.append(row)
    return "\n".join(lines)
