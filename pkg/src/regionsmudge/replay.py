"""Deterministic stroke-script replay.

A script names a canvas, a list of strokes (tool + raw samples) and a
parameter block. Replaying the same script on the same canvas yields a
byte-identical output image; the report carries per-stroke timing and
the count of pixels changed outside the ever-selected target areas
(always 0 for region-aware tools).
"""

from __future__ import annotations

import json
import os
import statistics
from dataclasses import dataclass, field

from .config import Params
from .engine import SmudgeSession, StrokeRecord
from .raster import RasterImage, load_png
from .regions import RegionMap, flat_fill_regions, meanshift_regions
from .stroke import sample_from_json


@dataclass
class StrokeReport:
    tool: str
    samples: int
    stamps: int
    selection_ms_median: float
    selection_ms_mean: float
    smudge_ms_median: float
    smudge_ms_mean: float
    ever_selected: list[int]
    pixels_changed_outside_selection: int

    @classmethod
    def from_record(cls, rec: StrokeRecord) -> "StrokeReport":
        sel = rec.selection_ms or [0.0]
        smu = rec.smudge_ms or [0.0]
        return cls(
            tool=rec.tool,
            samples=len(rec.samples),
            stamps=rec.stamps,
            selection_ms_median=statistics.median(sel),
            selection_ms_mean=statistics.fmean(sel),
            smudge_ms_median=statistics.median(smu),
            smudge_ms_mean=statistics.fmean(smu),
            ever_selected=sorted(rec.ever_selected),
            pixels_changed_outside_selection=rec.pixels_changed_outside_selection,
        )


@dataclass
class ReplayReport:
    output_path: str | None
    trace_path: str | None
    strokes: list[StrokeReport] = field(default_factory=list)

    @property
    def pixels_changed_outside_selection(self) -> int:
        return sum(s.pixels_changed_outside_selection for s in self.strokes)

    def to_dict(self) -> dict:
        return {
            "output": self.output_path,
            "trace": self.trace_path,
            "pixels_changed_outside_selection": self.pixels_changed_outside_selection,
            "strokes": [vars(s) for s in self.strokes],
        }


def resolve_region_map(
    canvas_path: str, canvas: RasterImage, params: Params, segment: dict | None
) -> RegionMap:
    """Region map for a canvas: explicit request, sidecar cache, or flat fill."""
    if segment:
        method = segment.get("method", "flat")
        if method == "flat":
            return flat_fill_regions(canvas, params.boundary_dilation)
        if method == "meanshift":
            return meanshift_regions(
                canvas,
                segment.get("spatial_bandwidth", params.spatial_bandwidth),
                segment.get("color_bandwidth", params.color_bandwidth),
                segment.get("min_region", params.min_region),
                params.boundary_dilation,
            )
        raise ValueError(f"unknown segmentation method {method!r}")
    base = canvas_path[:-4] if canvas_path.endswith(".png") else canvas_path
    if os.path.exists(f"{base}.labels.png") and os.path.exists(f"{base}.regions.json"):
        rmap = RegionMap.load(base)
        if rmap.shape == canvas.shape:
            return rmap
    return flat_fill_regions(canvas, params.boundary_dilation)


def replay_script(
    script: dict,
    base_dir: str = ".",
    params_override: dict | None = None,
    tool_override: str | None = None,
    trace_path: str | None = None,
    session_factory=None,
) -> tuple[SmudgeSession, ReplayReport]:
    """Run every stroke of a script on a fresh session."""
    script_params = dict(script.get("params", {}))
    segment = script_params.pop("segment", None)
    params = Params().merged(script_params)
    if params_override:
        params = params.merged(params_override)
    canvas_path = os.path.join(base_dir, script["canvas"])
    canvas = load_png(canvas_path)
    rmap = resolve_region_map(canvas_path, canvas, params, segment)
    if session_factory is None:
        session = SmudgeSession(canvas, rmap, params)
    else:
        session = session_factory(canvas, rmap, params)
    report = ReplayReport(output_path=None, trace_path=trace_path)
    for stroke in script["strokes"]:
        tool = tool_override or stroke["tool"]
        samples = [sample_from_json(s) for s in stroke["samples"]]
        session.begin_stroke(tool, samples[0])
        for s in samples[1:]:
            session.smudge_advance(s)
        rec = session.end_stroke()
        report.strokes.append(StrokeReport.from_record(rec))
    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as fh:
            for entry in session.trace:
                fh.write(json.dumps(entry) + "\n")
    return session, report
