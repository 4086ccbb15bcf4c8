"""Engine configuration.

Defaults reproduce the reference configuration: selection
weights alpha=0.3 / beta=0.7, balance gamma=0.7, top-share fraction
0.85, partial-stroke length and width 110 px, boundary dilation 10 px,
bone dilation 5 px, and a brush radius clamped to [0, 200].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace


@dataclass(frozen=True)
class Params:
    # selection
    alpha: float = 0.3
    beta: float = 0.7
    gamma: float = 0.7
    ts_fraction: float = 0.85
    # partial stroke geometry (pixels)
    stroke_length: float = 110.0
    stroke_width: float = 110.0
    resample_spacing: float = 2.0
    bone_radius: float = 5.0
    boundary_dilation: float = 10.0
    # brush
    theta: float = 10.0
    brush_max: float = 200.0
    strength: float = 0.7
    pickup_rate: float = 0.5
    stamp_spacing: float = 0.25
    # segmentation defaults
    spatial_bandwidth: float = 8.0
    color_bandwidth: float = 16.0
    min_region: int = 64
    # session plumbing
    tile_size: int = 64

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if not 0.0 < self.ts_fraction <= 1.0:
            raise ValueError("ts_fraction must lie in (0, 1]")
        if self.stroke_length <= 0 or self.stroke_width <= 0:
            raise ValueError("stroke length and width must be > 0")
        if self.resample_spacing <= 0:
            raise ValueError("resample spacing must be > 0")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("strength must lie in [0, 1]")
        if not 0.0 <= self.pickup_rate <= 1.0:
            raise ValueError("pickup_rate must lie in [0, 1]")

    def merged(self, overrides: dict) -> "Params":
        """New Params with the given non-None overrides applied."""
        kinds = {f.name: f.type for f in fields(self)}
        clean = {}
        for k, v in overrides.items():
            if v is None:
                continue
            if k not in kinds:
                raise ValueError(f"unknown parameter {k!r}")
            # JSON carries every number as float; keep int fields int
            clean[k] = int(v) if kinds[k] == "int" else v
        return replace(self, **clean) if clean else self

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_file(cls, path, base: "Params | None" = None) -> "Params":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("params file must hold a JSON object")
        return (base or cls()).merged(data)
