"""Dynamic target-region selection from partial strokes.

A candidate target set is scored by how much the stroke footprint
resembles the candidate's area (region resemblance) and how much the
dilated stroke bone resembles the candidate's dilated boundaries
(boundary resemblance). Both scores are coverage + inclusion ratios over
exact pixel counts, each in [0, 2].

Per timestamp the previously selected regions that are still covered
form the base set; at most one covered-but-unselected region may join,
and only when the best such candidate beats gamma times the base score.
Scoring empty sets is 0 by convention, which makes the first selection
automatic. Ties go to the lower region id so replay is deterministic.

Two baselines ship alongside: the footprint-as-mask baseline (bs) and
the top-share baseline (ts) that keeps every covered region scoring at
least ts_fraction of the best singleton.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import PointSet
from .regions import RegionMap
from .stroke import PartialStroke


@dataclass(frozen=True)
class ResemblanceParams:
    alpha: float = 0.3
    beta: float = 0.7
    gamma: float = 0.7
    ts_fraction: float = 0.85

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if not 0.0 < self.ts_fraction <= 1.0:
            raise ValueError("ts_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class TargetSet:
    """Selection state at one timestamp: covered, base and selected ids."""

    covered: frozenset[int]
    base: frozenset[int]
    selected: frozenset[int]
    t: int

    @classmethod
    def initial(cls) -> "TargetSet":
        return cls(frozenset(), frozenset(), frozenset(), -1)


def covered_regions(footprint: PointSet, rmap: RegionMap) -> frozenset[int]:
    """Ids of regions whose area meets the footprint in at least one pixel."""
    if footprint.shape != rmap.shape:
        raise ValueError("footprint grid does not match the region map")
    if not footprint:
        return frozenset()
    return frozenset(int(i) for i in np.unique(rmap.labels[footprint.mask]))


def region_resemblance(footprint: PointSet, candidate_area: PointSet) -> float:
    """Coverage + inclusion ratio between footprint and candidate area."""
    if not candidate_area:
        raise ValueError("candidate area is empty")
    if not footprint:
        return 0.0
    inter = int(np.count_nonzero(footprint.mask & candidate_area.mask))
    return inter / candidate_area.cardinality + inter / footprint.cardinality


def boundary_resemblance(bone_exp: PointSet, candidate_dilated_boundary: PointSet) -> float:
    """Coverage + inclusion ratio between dilated bone and dilated boundary."""
    if not candidate_dilated_boundary:
        raise ValueError("candidate boundary set is empty")
    if not bone_exp:
        return 0.0
    inter = int(np.count_nonzero(bone_exp.mask & candidate_dilated_boundary.mask))
    return inter / candidate_dilated_boundary.cardinality + inter / bone_exp.cardinality


def resemblance(
    partial: PartialStroke,
    candidate: frozenset[int] | set[int],
    rmap: RegionMap,
    params: ResemblanceParams,
) -> float:
    """Weighted resemblance between a partial stroke and a candidate set.

    Empty candidates score 0 by convention.
    """
    if not candidate:
        return 0.0
    ids = sorted(candidate)
    area_total = int(rmap.area_counts[ids].sum())
    fp = partial.footprint
    if fp:
        under = rmap.labels[fp.mask]
        area_inter = int(np.isin(under, np.asarray(ids)).sum())
        rr = area_inter / area_total + area_inter / fp.cardinality
    else:
        rr = 0.0
    bone = partial.bone_expansion
    bdy_total, bdy_inter = rmap.dilated_union_counts(ids, bone.mask if bone else None)
    if bdy_total == 0:
        raise ValueError("candidate boundary set is empty")
    rb = (bdy_inter / bdy_total + bdy_inter / bone.cardinality) if bone else 0.0
    return params.alpha * rr + params.beta * rb


def update_target_set(
    prev: TargetSet,
    partial: PartialStroke,
    rmap: RegionMap,
    params: ResemblanceParams,
) -> TargetSet:
    ts, _, _ = update_target_set_scored(prev, partial, rmap, params)
    return ts


def update_target_set_scored(
    prev: TargetSet,
    partial: PartialStroke,
    rmap: RegionMap,
    params: ResemblanceParams,
) -> tuple[TargetSet, dict[int, float], float]:
    """One selection step; also returns candidate scores and the base score.

    The base set keeps previously selected regions that remain covered;
    the best single addition is accepted when its score strictly exceeds
    gamma times the base score (0 for an empty base).
    """
    covered = covered_regions(partial.footprint, rmap)
    base = prev.selected & covered
    base_score = resemblance(partial, base, rmap, params)
    scores: dict[int, float] = {}
    best_id: int | None = None
    best_score = -1.0
    for rid in sorted(covered - base):
        s = resemblance(partial, base | {rid}, rmap, params)
        scores[rid] = s
        if s > best_score:
            best_id = rid
            best_score = s
    if best_id is not None and best_score > params.gamma * base_score:
        selected = base | {best_id}
    else:
        selected = base
    return TargetSet(covered=covered, base=base, selected=selected, t=prev.t + 1), scores, base_score


def bs_select(footprint: PointSet) -> PointSet:
    """Baseline mask: everything under the stroke footprint is smudgeable."""
    return footprint


def ts_select(
    partial: PartialStroke,
    covered: frozenset[int] | set[int],
    rmap: RegionMap,
    params: ResemblanceParams,
) -> frozenset[int]:
    """Top-share baseline: covered regions scoring at least
    ts_fraction of the best singleton score."""
    if not covered:
        return frozenset()
    scores = {rid: resemblance(partial, {rid}, rmap, params) for rid in sorted(covered)}
    cutoff = params.ts_fraction * max(scores.values())
    return frozenset(rid for rid, s in scores.items() if s >= cutoff)
