"""Stroke input model.

Raw device samples become a uniformly resampled polyline; the trailing
window of bounded arc length is the partial stroke that drives region
selection. Its rasterized footprint is the stadium of half-width w/2
around the window polyline; the bone expansion is the polyline dilated
by a small radius (default 5 px).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .raster import PointSet


@dataclass(frozen=True)
class StrokeSample:
    x: float
    y: float
    t_ms: float = 0.0
    pressure: float | None = None

    @property
    def pos(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Stroke:
    samples: tuple[StrokeSample, ...]
    resample_spacing: float

    def arc_length(self) -> float:
        return _polyline_length([s.pos for s in self.samples])


@dataclass(frozen=True)
class PartialStroke:
    """Trailing window of a stroke with its rasterized point sets."""

    window: tuple[StrokeSample, ...]
    length_budget: float
    width: float
    footprint: PointSet
    bone_expansion: PointSet

    def window_points(self) -> np.ndarray:
        return np.array([[s.x, s.y] for s in self.window], dtype=np.float64)


def _polyline_length(pts) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    return total


_COINCIDENT = 1e-9


def resample_uniform(raw: list[StrokeSample], spacing: float) -> Stroke:
    """Resample a raw sample list at a bounded arc-length spacing.

    Every input segment is split into equal parts no longer than
    `spacing`, so output points lie on the input polyline, input vertices
    (including the last point) are retained verbatim, and consecutive
    outputs are at most `spacing` apart. Keeping vertices makes
    resampling exactly idempotent, which replay depends on. Timestamps
    and pressures interpolate linearly; coincident consecutive inputs
    collapse.
    """
    if not raw:
        raise ValueError("raw sample list is empty")
    if spacing <= 0:
        raise ValueError("spacing must be > 0")
    out = [raw[0]]
    for cur in raw[1:]:
        prev = out[-1]
        seg = math.hypot(cur.x - prev.x, cur.y - prev.y)
        if seg <= _COINCIDENT:
            continue
        parts = max(1, math.ceil(seg / spacing - 1e-9))
        for j in range(1, parts):
            t = j / parts
            out.append(
                StrokeSample(
                    x=prev.x + (cur.x - prev.x) * t,
                    y=prev.y + (cur.y - prev.y) * t,
                    t_ms=prev.t_ms + (cur.t_ms - prev.t_ms) * t,
                    pressure=_lerp_pressure(prev.pressure, cur.pressure, t),
                )
            )
        out.append(cur)
    return Stroke(samples=tuple(out), resample_spacing=spacing)


def _lerp_pressure(a: float | None, b: float | None, t: float) -> float | None:
    if a is None and b is None:
        return None
    av = 1.0 if a is None else a
    bv = 1.0 if b is None else b
    return av + (bv - av) * t


def partial_window(stroke: Stroke, length_budget: float) -> tuple[StrokeSample, ...]:
    """Longest stroke suffix whose arc length stays within the budget.

    A single-sample stroke yields that sample.
    """
    if not stroke.samples:
        raise ValueError("stroke is empty")
    if length_budget <= 0:
        raise ValueError("length budget must be > 0")
    samples = stroke.samples
    total = 0.0
    start = len(samples) - 1
    while start > 0:
        prev = samples[start - 1]
        cur = samples[start]
        seg = math.hypot(cur.x - prev.x, cur.y - prev.y)
        if total + seg > length_budget:
            break
        total += seg
        start -= 1
    return samples[start:]


def rasterize_footprint(window, width: float, shape: tuple[int, int]) -> PointSet:
    """Grid pixels whose center lies within width/2 of the window polyline."""
    if width <= 0:
        raise ValueError("width must be > 0")
    return _rasterize(window, width / 2.0, shape)


def bone_expansion(window, radius: float, shape: tuple[int, int]) -> PointSet:
    """Pixels within `radius` of the window polyline (the stroke bone)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return _rasterize(window, radius, shape)


def _rasterize(window, radius: float, shape: tuple[int, int]) -> PointSet:
    pts = np.array([[s.x, s.y] for s in window], dtype=np.float64)
    if pts.size == 0:
        raise ValueError("window is empty")
    h, w = shape
    return PointSet(kernels.stadium_mask(pts, radius, h, w))


def make_partial(
    stroke: Stroke,
    shape: tuple[int, int],
    length_budget: float,
    width: float,
    bone_radius: float,
) -> PartialStroke:
    """Build the partial stroke with both rasterized point sets."""
    window = partial_window(stroke, length_budget)
    return PartialStroke(
        window=window,
        length_budget=length_budget,
        width=width,
        footprint=rasterize_footprint(window, width, shape),
        bone_expansion=bone_expansion(window, bone_radius, shape),
    )


# -- stroke script files -----------------------------------------------------

TOOLS = ("ss", "bs", "ts")


def sample_to_json(s: StrokeSample) -> dict:
    d = {"x": s.x, "y": s.y, "t_ms": s.t_ms}
    if s.pressure is not None:
        d["pressure"] = s.pressure
    return d


def sample_from_json(d: dict) -> StrokeSample:
    return StrokeSample(
        x=float(d["x"]),
        y=float(d["y"]),
        t_ms=float(d.get("t_ms", 0.0)),
        pressure=None if d.get("pressure") is None else float(d["pressure"]),
    )


class ScriptError(ValueError):
    """Malformed stroke script."""


def load_script(path) -> dict:
    """Load and validate a stroke script.

    Schema: {"canvas": path, "strokes": [{"tool", "samples": [...]}, ...],
    "params": {...}}. Raises ScriptError with a line diagnostic on
    malformed input.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScriptError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ScriptError(f"{path}: script must be a JSON object")
    if "canvas" not in data or not isinstance(data["canvas"], str):
        raise ScriptError(f"{path}: missing string field 'canvas'")
    strokes = data.get("strokes", [])
    if not isinstance(strokes, list):
        raise ScriptError(f"{path}: 'strokes' must be a list")
    for i, st in enumerate(strokes):
        if not isinstance(st, dict) or st.get("tool") not in TOOLS:
            raise ScriptError(f"{path}: stroke {i}: 'tool' must be one of {TOOLS}")
        samples = st.get("samples")
        if not isinstance(samples, list) or not samples:
            raise ScriptError(f"{path}: stroke {i}: non-empty 'samples' list required")
        for j, s in enumerate(samples):
            if not isinstance(s, dict) or "x" not in s or "y" not in s:
                raise ScriptError(f"{path}: stroke {i} sample {j}: needs 'x' and 'y'")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ScriptError(f"{path}: 'params' must be an object")
    return data


def save_script(path, canvas: str, strokes: list[dict], params: dict) -> None:
    data = {"canvas": canvas, "strokes": strokes, "params": params}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
