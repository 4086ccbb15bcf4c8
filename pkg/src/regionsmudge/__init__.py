"""Region-aware color smudging engine."""

from .config import Params
from .engine import PickupBuffer, SmudgeSession, dynamic_brush_radius, smudge_stamp
from .raster import (
    PixelPos,
    PointSet,
    RasterImage,
    dilate,
    distance_transform,
    lerp_color,
    load_png,
    save_png,
)
from .regions import Region, RegionMap, flat_fill_regions, meanshift_regions, region_boundary
from .select import (
    ResemblanceParams,
    TargetSet,
    boundary_resemblance,
    bs_select,
    covered_regions,
    region_resemblance,
    resemblance,
    ts_select,
    update_target_set,
)
from .stroke import (
    PartialStroke,
    Stroke,
    StrokeSample,
    bone_expansion,
    partial_window,
    rasterize_footprint,
    resample_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "Params",
    "PickupBuffer",
    "SmudgeSession",
    "dynamic_brush_radius",
    "smudge_stamp",
    "PixelPos",
    "PointSet",
    "RasterImage",
    "dilate",
    "distance_transform",
    "lerp_color",
    "load_png",
    "save_png",
    "Region",
    "RegionMap",
    "flat_fill_regions",
    "meanshift_regions",
    "region_boundary",
    "ResemblanceParams",
    "TargetSet",
    "boundary_resemblance",
    "bs_select",
    "covered_regions",
    "region_resemblance",
    "resemblance",
    "ts_select",
    "update_target_set",
    "PartialStroke",
    "Stroke",
    "StrokeSample",
    "bone_expansion",
    "partial_window",
    "rasterize_footprint",
    "resample_uniform",
    "__version__",
]
