"""Independent brute-force oracles.

Everything here is deliberately dumb: pure-Python loops, (x, y) tuple
sets and math.hypot. No shared code with the package internals, so the
package's vectorized paths are checked against a second, independent
derivation of the same definitions.
"""

from __future__ import annotations

import math
from collections import deque


def edt_bruteforce(mask) -> list[list[float]]:
    """Per-pixel Euclidean distance to the nearest set pixel."""
    h = len(mask)
    w = len(mask[0])
    src = [(x, y) for y in range(h) for x in range(w) if mask[y][x]]
    out = [[0.0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            out[y][x] = min(math.hypot(x - sx, y - sy) for sx, sy in src)
    return out


def disk_points(cx: float, cy: float, radius: float, w: int, h: int) -> set:
    return {
        (x, y)
        for y in range(h)
        for x in range(w)
        if math.hypot(x - cx, y - cy) <= radius
    }


def dilate_points(points: set, radius: float, w: int, h: int) -> set:
    out = set()
    for y in range(h):
        for x in range(w):
            if any(math.hypot(x - px, y - py) <= radius for px, py in points):
                out.add((x, y))
    return out


def point_segment_distance(px, py, ax, ay, bx, by) -> float:
    dx, dy = bx - ax, by - ay
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / l2
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def polyline_distance(pts, px, py) -> float:
    if len(pts) == 1:
        return math.hypot(px - pts[0][0], py - pts[0][1])
    return min(
        point_segment_distance(px, py, ax, ay, bx, by)
        for (ax, ay), (bx, by) in zip(pts, pts[1:])
    )


def stadium_points(pts, radius: float, w: int, h: int) -> set:
    return {
        (x, y)
        for y in range(h)
        for x in range(w)
        if polyline_distance(pts, x, y) <= radius
    }


def resample_positions(raw_pts, spacing: float) -> list[tuple[float, float]]:
    """Vertex-preserving arc-length resampling of a polyline.

    Each segment splits into the fewest equal parts of length at most
    `spacing`; coincident inputs collapse.
    """
    out = [raw_pts[0]]
    for (x1, y1) in raw_pts[1:]:
        x0, y0 = out[-1]
        seg = math.hypot(x1 - x0, y1 - y0)
        if seg <= 1e-9:
            continue
        parts = max(1, math.ceil(seg / spacing - 1e-9))
        for j in range(1, parts):
            t = j / parts
            out.append((x0 + (x1 - x0) * t, y0 + (y1 - y0) * t))
        out.append((x1, y1))
    return out


def flood_fill_labels(colors) -> list[list[int]]:
    """4-connected components of exactly equal values, labels in
    row-major first-occurrence order."""
    h = len(colors)
    w = len(colors[0])
    labels = [[-1] * w for _ in range(h)]
    nxt = 0
    for sy in range(h):
        for sx in range(w):
            if labels[sy][sx] >= 0:
                continue
            labels[sy][sx] = nxt
            q = deque([(sx, sy)])
            while q:
                x, y = q.popleft()
                for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
                    if 0 <= nx < w and 0 <= ny < h and labels[ny][nx] < 0:
                        if colors[ny][nx] == colors[y][x]:
                            labels[ny][nx] = nxt
                            q.append((nx, ny))
            nxt += 1
    return labels


def boundary_points(area: set, w: int, h: int) -> set:
    """Area pixels with a 4-neighbor outside the area (border = outside)."""
    out = set()
    for x, y in area:
        for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
            if not (0 <= nx < w and 0 <= ny < h) or (nx, ny) not in area:
                out.add((x, y))
                break
    return out


def coverage_inclusion(stroke_set: set, candidate_set: set) -> float:
    """Shared score form of both resemblance terms."""
    if not candidate_set:
        raise ValueError("empty candidate")
    if not stroke_set:
        return 0.0
    inter = len(stroke_set & candidate_set)
    return inter / len(candidate_set) + inter / len(stroke_set)


def resemblance_score(fp, bone, areas, boundaries, alpha, beta) -> float:
    """Weighted score for a candidate given per-region point sets."""
    union_area = set().union(*areas) if areas else set()
    union_bdy = set().union(*boundaries) if boundaries else set()
    if not union_area:
        return 0.0
    return alpha * coverage_inclusion(fp, union_area) + beta * coverage_inclusion(
        bone, union_bdy
    )


def update_rule(prev_selected, fp, bone, areas, dilated, alpha, beta, gamma):
    """Independent re-derivation of one selection step.

    areas / dilated map region id to its point set. Returns
    (covered, base, selected) as plain sets.
    """
    covered = {rid for rid, a in areas.items() if a & fp}
    base = set(prev_selected) & covered

    def score(ids):
        if not ids:
            return 0.0
        return resemblance_score(
            fp, bone, [areas[i] for i in ids], [dilated[i] for i in ids], alpha, beta
        )

    base_score = score(base)
    best_id, best_score = None, -1.0
    for rid in sorted(covered - base):
        s = score(base | {rid})
        if s > best_score:
            best_id, best_score = rid, s
    if best_id is not None and best_score > gamma * base_score:
        return covered, base, base | {best_id}
    return covered, base, set(base)


def lerp_channel(a: int, b: int, t: float) -> int:
    return int(math.floor(a * (1.0 - t) + b * t + 0.5))
