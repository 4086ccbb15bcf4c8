"""Stateful smudge painting session.

The brush carries a disk-shaped pickup buffer: each stamp blends the
canvas toward the buffer by `strength`, then refreshes the buffer from
the blended result by `pickup_rate`. Stamps are clipped to the current
smudge mask for both writing and pickup, so color never leaks across
the selected regions' edges. The brush radius follows
max(theta, distance to the target-set boundary), clamped to brush_max.

Stamps are laid along the straight segment between the last stamped
position and each new input sample, which hides the latency of
per-sample region selection. The undo stack stores pre-stroke tile
contents and restores them bit-exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import Params
from .raster import PointSet, RasterImage
from .regions import RegionMap, flat_fill_regions, mask_boundary, meanshift_regions
from .select import (
    ResemblanceParams,
    TargetSet,
    covered_regions,
    resemblance,
    ts_select,
    update_target_set_scored,
)
from .stroke import PartialStroke, StrokeSample, make_partial, resample_uniform

TOOLS = ("ss", "bs", "ts")


class PickupBuffer:
    """Color sample carried with the brush, anchored on integer pixels.

    Cells start invalid; a cell becomes valid only by reading a masked
    canvas pixel, and only valid cells ever write back. Growing the
    radius invalidates the newly exposed annulus so stale colors from an
    earlier, larger pass are never reapplied.
    """

    def __init__(self, max_radius: float):
        self.rbuf = int(math.ceil(max_radius)) + 2
        size = 2 * self.rbuf + 1
        self.data = np.zeros((size, size, 4), dtype=np.uint8)
        self.valid = np.zeros((size, size), dtype=np.uint8)
        self.anchor = (0, 0)
        self._celldist = None

    def reset(self, anchor: tuple[int, int]) -> None:
        self.data[:] = 0
        self.valid[:] = 0
        self.anchor = anchor

    def reanchor(self, ax: int, ay: int) -> None:
        # cells are brush-relative: content stays at its offset and travels
        # with the brush, which is what drags color across the canvas
        self.anchor = (ax, ay)

    def invalidate_outside(self, radius: float) -> None:
        """Drop cells beyond `radius` (plus sub-pixel anchor margin)."""
        if self._celldist is None:
            size = 2 * self.rbuf + 1
            ys = np.arange(size, dtype=np.float64)[:, None] - self.rbuf
            xs = np.arange(size, dtype=np.float64)[None, :] - self.rbuf
            self._celldist = np.hypot(ys, xs)
        self.valid[self._celldist > radius + 0.75] = 0


@dataclass
class BrushState:
    theta: float
    radius: float
    sigma: float
    strength: float
    stamp_spacing: float
    brush_max: float
    pickup: PickupBuffer | None = None


def dynamic_brush_radius(
    pos: tuple[float, float],
    targets,
    rmap: RegionMap,
    theta: float,
    brush_max: float = 200.0,
) -> float:
    """Brush radius max(theta, sigma) clamped to brush_max.

    sigma is the exact Euclidean distance from the position (rounded to
    the nearest pixel center) to the boundary of the union of the target
    areas. Raises on an empty target set.
    """
    ids = sorted(targets)
    if not ids:
        raise ValueError("no smudge target")
    union = rmap.union_area_mask(ids)
    sigma = _sigma_field(union)[_clamp_index(pos, rmap.shape)]
    return float(min(max(theta, sigma), brush_max))


def _sigma_field(union_mask: np.ndarray) -> np.ndarray:
    bnd = mask_boundary(union_mask)
    return np.sqrt(kernels.edt_sq(bnd).astype(np.float64))


def _clamp_index(pos: tuple[float, float], shape: tuple[int, int]) -> tuple[int, int]:
    h, w = shape
    x = min(max(int(math.floor(pos[0] + 0.5)), 0), w - 1)
    y = min(max(int(math.floor(pos[1] + 0.5)), 0), h - 1)
    return y, x


def smudge_stamp(
    canvas: RasterImage,
    pos: tuple[float, float],
    radius: float,
    strength: float,
    pickup: PickupBuffer,
    mask: PointSet,
    pickup_rate: float = 0.5,
) -> tuple[int, int, int, int] | None:
    """One masked stamp; returns the inclusive write bbox (y0,x0,y1,x1) or None."""
    if radius <= 0:
        raise ValueError("stamp radius must be > 0")
    if not 0.0 <= strength <= 1.0:
        raise ValueError("strength must lie in [0, 1]")
    ax = int(math.floor(pos[0] + 0.5))
    ay = int(math.floor(pos[1] + 0.5))
    pickup.reanchor(ax, ay)
    bbox = kernels.stamp(
        canvas.pixels, mask.mask, pickup.data, pickup.valid,
        ax, ay, pickup.rbuf, pos[0], pos[1], radius, strength, pickup_rate,
    )
    if bbox[0] < 0:
        return None
    return (int(bbox[0]), int(bbox[1]), int(bbox[2]), int(bbox[3]))


@dataclass
class Tile:
    x: int
    y: int
    w: int
    h: int
    pixels: bytes


@dataclass
class AdvanceResult:
    tiles: list[Tile]
    selection: TargetSet
    stamps: int
    clamped: bool
    selection_ms: float
    smudge_ms: float
    trace: dict


@dataclass
class StrokeRecord:
    tool: str
    samples: list[StrokeSample]
    stamps: int
    selection_ms: list[float] = field(default_factory=list)
    smudge_ms: list[float] = field(default_factory=list)
    ever_selected: frozenset[int] = frozenset()
    pixels_changed_outside_selection: int = 0

    def to_script_stroke(self) -> dict:
        from .stroke import sample_to_json

        return {"tool": self.tool, "samples": [sample_to_json(s) for s in self.samples]}


class SmudgeSession:
    """One canvas + region map + brush, driven sample by sample.

    Single-writer: all mutation happens through one caller at a time.
    """

    def __init__(
        self,
        canvas: RasterImage,
        rmap: RegionMap | None = None,
        params: Params | None = None,
    ):
        self.params = params or Params()
        self.canvas = canvas
        self.rmap = rmap if rmap is not None else flat_fill_regions(
            canvas, self.params.boundary_dilation
        )
        if self.rmap.shape != canvas.shape:
            raise ValueError("region map does not match canvas dimensions")
        self.targets = TargetSet.initial()
        self.brush = BrushState(
            theta=self.params.theta,
            radius=self.params.theta,
            sigma=0.0,
            strength=self.params.strength,
            stamp_spacing=self.params.stamp_spacing,
            brush_max=self.params.brush_max,
        )
        self.undo_stack: list[dict[tuple[int, int], bytes]] = []
        self.tool = "ss"
        self.trace: list[dict] = []
        self._active = False
        self._raw: list[StrokeSample] = []
        self._last_stamp_pos: tuple[float, float] | None = None
        self._last_pressure = 1.0
        self._mask: np.ndarray | None = None
        self._mask_ids: frozenset[int] | None = None
        self._sigma: np.ndarray | None = None
        self._sigma_ids: frozenset[int] | None = None
        self._stroke_tiles: dict[tuple[int, int], bytes] = {}
        self._stroke_snapshot: np.ndarray | None = None
        self._ever_selected: set[int] = set()
        self._stroke_stats: StrokeRecord | None = None

    # -- configuration -----------------------------------------------------

    @property
    def stroke_active(self) -> bool:
        return self._active

    def set_params(self, params: Params) -> None:
        if self._active:
            raise RuntimeError("cannot change parameters during an active stroke")
        self.params = params
        self.brush.theta = params.theta
        self.brush.strength = params.strength
        self.brush.stamp_spacing = params.stamp_spacing
        self.brush.brush_max = params.brush_max

    def resegment(self, method: str = "flat", **kwargs) -> None:
        if self._active:
            raise RuntimeError("cannot resegment during an active stroke")
        if method == "flat":
            self.rmap = flat_fill_regions(self.canvas, self.params.boundary_dilation)
        elif method == "meanshift":
            self.rmap = meanshift_regions(
                self.canvas,
                kwargs.get("spatial_bandwidth", self.params.spatial_bandwidth),
                kwargs.get("color_bandwidth", self.params.color_bandwidth),
                kwargs.get("min_region", self.params.min_region),
                self.params.boundary_dilation,
            )
        else:
            raise ValueError(f"unknown segmentation method {method!r}")
        self._mask_ids = None
        self._sigma_ids = None
        self.targets = TargetSet.initial()

    def set_region_map(self, rmap: RegionMap) -> None:
        if self._active:
            raise RuntimeError("cannot swap region map during an active stroke")
        if rmap.shape != self.canvas.shape:
            raise ValueError("region map does not match canvas dimensions")
        self.rmap = rmap
        self._mask_ids = None
        self._sigma_ids = None
        self.targets = TargetSet.initial()

    def resemblance_params(self) -> ResemblanceParams:
        p = self.params
        return ResemblanceParams(p.alpha, p.beta, p.gamma, p.ts_fraction)

    # -- stroke lifecycle ---------------------------------------------------

    def begin_stroke(self, tool: str, first_sample: StrokeSample) -> AdvanceResult:
        if self._active:
            raise RuntimeError("a stroke is already active")
        if tool not in TOOLS:
            raise ValueError(f"tool must be one of {TOOLS}")
        self.tool = tool
        self._active = True
        self.targets = TargetSet.initial()
        self._ever_selected = set()
        self._stroke_tiles = {}
        self._stroke_snapshot = self.canvas.pixels.copy()
        sample, clamped = self._clamp_sample(first_sample)
        self._raw = [sample]
        t0 = time.perf_counter()
        partial = self._partial()
        trace = self._update_selection(partial)
        sel_ms = (time.perf_counter() - t0) * 1000.0
        pos = (sample.x, sample.y)
        radius = self._radius_at(pos)
        self.brush.pickup = PickupBuffer(self.brush.brush_max)
        self.brush.pickup.reset((int(math.floor(pos[0] + 0.5)), int(math.floor(pos[1] + 0.5))))
        if radius > 0 and self._mask is not None and self._mask.any():
            # strength-0 stamp seeds the pickup from the masked canvas
            kernels.stamp(
                self.canvas.pixels, self._mask,
                self.brush.pickup.data, self.brush.pickup.valid,
                self.brush.pickup.anchor[0], self.brush.pickup.anchor[1],
                self.brush.pickup.rbuf, pos[0], pos[1], radius, 0.0,
                self.params.pickup_rate,
            )
        self._last_stamp_pos = pos
        self._last_pressure = 1.0 if sample.pressure is None else sample.pressure
        self._stroke_stats = StrokeRecord(tool=tool, samples=[sample], stamps=0)
        self._stroke_stats.selection_ms.append(sel_ms)
        return AdvanceResult(
            tiles=[], selection=self.targets, stamps=0, clamped=clamped,
            selection_ms=sel_ms, smudge_ms=0.0, trace=trace,
        )

    def smudge_advance(self, sample: StrokeSample) -> AdvanceResult:
        """Feed one input sample: update selection, stamp along the segment."""
        if not self._active:
            raise RuntimeError("no active stroke")
        sample, clamped = self._clamp_sample(sample)
        self._raw.append(sample)
        t0 = time.perf_counter()
        partial = self._partial()
        trace = self._update_selection(partial)
        sel_ms = (time.perf_counter() - t0) * 1000.0
        t1 = time.perf_counter()
        dirty: set[tuple[int, int]] = set()
        stamps = self._stamp_segment(sample, dirty)
        smudge_ms = (time.perf_counter() - t1) * 1000.0
        stats = self._stroke_stats
        stats.samples.append(sample)
        stats.stamps += stamps
        stats.selection_ms.append(sel_ms)
        stats.smudge_ms.append(smudge_ms)
        return AdvanceResult(
            tiles=self._tiles_payload(dirty),
            selection=self.targets,
            stamps=stamps,
            clamped=clamped,
            selection_ms=sel_ms,
            smudge_ms=smudge_ms,
            trace=trace,
        )

    def end_stroke(self) -> StrokeRecord:
        if not self._active:
            raise RuntimeError("no active stroke")
        self.undo_stack.append(self._stroke_tiles)
        stats = self._stroke_stats
        stats.ever_selected = frozenset(self._ever_selected)
        if self.tool in ("ss", "ts"):
            outside = ~self.rmap.union_area_mask(sorted(self._ever_selected))
            changed = (self.canvas.pixels != self._stroke_snapshot).any(axis=2)
            stats.pixels_changed_outside_selection = int(np.count_nonzero(changed & outside))
        self._active = False
        self._raw = []
        self._stroke_tiles = {}
        self._stroke_snapshot = None
        self._last_stamp_pos = None
        self.brush.pickup = None
        self._stroke_stats = None
        return stats

    def undo(self) -> tuple[bool, list[Tile]]:
        """Restore the canvas to its state before the last stroke."""
        if self._active:
            raise RuntimeError("cannot undo during an active stroke")
        if not self.undo_stack:
            return False, []
        saved = self.undo_stack.pop()
        ts = self.params.tile_size
        tiles = []
        for (tx, ty), payload in sorted(saved.items()):
            x0, y0 = tx * ts, ty * ts
            h, w = self.canvas.shape
            tw, th = min(ts, w - x0), min(ts, h - y0)
            block = np.frombuffer(payload, dtype=np.uint8).reshape(th, tw, 4)
            self.canvas.pixels[y0 : y0 + th, x0 : x0 + tw] = block
            tiles.append(Tile(x=x0, y=y0, w=tw, h=th, pixels=payload))
        return True, tiles

    # -- internals ----------------------------------------------------------

    def _clamp_sample(self, s: StrokeSample) -> tuple[StrokeSample, bool]:
        h, w = self.canvas.shape
        x = min(max(s.x, 0.0), float(w - 1))
        y = min(max(s.y, 0.0), float(h - 1))
        if x == s.x and y == s.y:
            return s, False
        return StrokeSample(x=x, y=y, t_ms=s.t_ms, pressure=s.pressure), True

    def _partial(self) -> PartialStroke:
        p = self.params
        stroke = resample_uniform(self._raw, p.resample_spacing)
        return make_partial(
            stroke, self.canvas.shape, p.stroke_length, p.stroke_width, p.bone_radius
        )

    def _update_selection(self, partial: PartialStroke) -> dict:
        rp = self.resemblance_params()
        t = self.targets.t + 1
        if self.tool == "ss":
            self.targets, scores, base_score = update_target_set_scored(
                self.targets, partial, self.rmap, rp
            )
            trace_scores = scores
        elif self.tool == "ts":
            covered = covered_regions(partial.footprint, self.rmap)
            ids = ts_select(partial, covered, self.rmap, rp)
            trace_scores = {
                rid: resemblance(partial, {rid}, self.rmap, rp) for rid in sorted(covered)
            }
            base_score = 0.0
            self.targets = TargetSet(covered=covered, base=frozenset(), selected=ids, t=t)
        else:  # bs
            covered = covered_regions(partial.footprint, self.rmap)
            trace_scores = {}
            base_score = 0.0
            self.targets = TargetSet(
                covered=covered, base=frozenset(), selected=frozenset(), t=t
            )
        self._ever_selected |= self.targets.selected
        if self.tool == "bs":
            self._mask = partial.footprint.mask
            self._mask_ids = None
        else:
            ids = frozenset(self.targets.selected)
            if ids != self._mask_ids:
                self._mask = (
                    self.rmap.union_area_mask(sorted(ids)) if ids else None
                )
                self._mask_ids = ids
        entry = {
            "t": self.targets.t,
            "covered": sorted(self.targets.covered),
            "base": sorted(self.targets.base),
            "candidate_scores": {str(k): v for k, v in sorted(trace_scores.items())},
            "base_score": base_score,
            "selected": sorted(self.targets.selected),
        }
        self.trace.append(entry)
        return entry

    def _radius_at(self, pos: tuple[float, float]) -> float:
        b = self.brush
        if self.tool == "bs" or not self.targets.selected:
            b.sigma = 0.0
            b.radius = float(min(max(b.theta, 0.0), b.brush_max))
            return b.radius
        ids = frozenset(self.targets.selected)
        if ids != self._sigma_ids:
            union = self.rmap.union_area_mask(sorted(ids))
            self._sigma = _sigma_field(union)
            self._sigma_ids = ids
        b.sigma = float(self._sigma[_clamp_index(pos, self.canvas.shape)])
        b.radius = float(min(max(b.theta, b.sigma), b.brush_max))
        return b.radius

    def _stamp_segment(self, sample: StrokeSample, dirty: set[tuple[int, int]]) -> int:
        if self._mask is None or self._last_stamp_pos is None:
            return 0
        target = (sample.x, sample.y)
        target_pressure = 1.0 if sample.pressure is None else sample.pressure
        pickup = self.brush.pickup
        stamps = 0
        pos = self._last_stamp_pos
        pressure = self._last_pressure
        seg_len = math.hypot(target[0] - pos[0], target[1] - pos[1])
        traveled = 0.0
        prev_radius = self.brush.radius
        while True:
            radius = self._radius_at(pos)
            step = self.brush.stamp_spacing * radius
            if radius <= 0.0 or step <= 0.0:
                break
            remaining = math.hypot(target[0] - pos[0], target[1] - pos[1])
            if remaining + 1e-9 < step:
                break
            f = step / remaining
            pos = (pos[0] + (target[0] - pos[0]) * f, pos[1] + (target[1] - pos[1]) * f)
            traveled += step
            u = min(1.0, traveled / seg_len) if seg_len > 0 else 1.0
            pressure = self._last_pressure + (target_pressure - self._last_pressure) * u
            radius = self._radius_at(pos)
            ax = int(math.floor(pos[0] + 0.5))
            ay = int(math.floor(pos[1] + 0.5))
            pickup.reanchor(ax, ay)
            if radius > prev_radius:
                pickup.invalidate_outside(prev_radius)
            prev_radius = radius
            self._save_tiles_for_disk(pos, radius)
            bbox = kernels.stamp(
                self.canvas.pixels, self._mask, pickup.data, pickup.valid,
                ax, ay, pickup.rbuf, pos[0], pos[1], radius,
                self.brush.strength * pressure, self.params.pickup_rate,
            )
            if bbox[0] >= 0:
                self._mark_dirty(bbox, dirty)
            stamps += 1
        self._last_stamp_pos = pos
        self._last_pressure = pressure
        return stamps

    def _save_tiles_for_disk(self, pos: tuple[float, float], radius: float) -> None:
        h, w = self.canvas.shape
        x0 = max(0, int(math.ceil(pos[0] - radius)))
        x1 = min(w - 1, int(math.floor(pos[0] + radius)))
        y0 = max(0, int(math.ceil(pos[1] - radius)))
        y1 = min(h - 1, int(math.floor(pos[1] + radius)))
        if x0 > x1 or y0 > y1:
            return
        ts = self.params.tile_size
        for ty in range(y0 // ts, y1 // ts + 1):
            for tx in range(x0 // ts, x1 // ts + 1):
                key = (tx, ty)
                if key in self._stroke_tiles:
                    continue
                px0, py0 = tx * ts, ty * ts
                tw, th = min(ts, w - px0), min(ts, h - py0)
                self._stroke_tiles[key] = self.canvas.pixels[
                    py0 : py0 + th, px0 : px0 + tw
                ].tobytes()

    def _mark_dirty(self, bbox, dirty: set[tuple[int, int]]) -> None:
        ts = self.params.tile_size
        y0, x0, y1, x1 = int(bbox[0]), int(bbox[1]), int(bbox[2]), int(bbox[3])
        for ty in range(y0 // ts, y1 // ts + 1):
            for tx in range(x0 // ts, x1 // ts + 1):
                dirty.add((tx, ty))

    def _tiles_payload(self, dirty) -> list[Tile]:
        ts = self.params.tile_size
        h, w = self.canvas.shape
        tiles = []
        for tx, ty in sorted(dirty):
            x0, y0 = tx * ts, ty * ts
            tw, th = min(ts, w - x0), min(ts, h - y0)
            tiles.append(
                Tile(
                    x=x0, y=y0, w=tw, h=th,
                    pixels=self.canvas.pixels[y0 : y0 + th, x0 : x0 + tw].tobytes(),
                )
            )
        return tiles
