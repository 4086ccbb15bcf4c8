#!/usr/bin/env python3
"""Build the scripted scenario fixtures under tests/fixtures/.

Each scenario directory holds canvas.png (plus region-map sidecars),
script.json, intent.json and expected_selected.json. Expected selections
are derived with the independent set-based oracle from tests/oracles.py,
not with the package's selection code, and every scenario's qualitative
claim is asserted here before anything is written.

The edge-recovery fixture additionally replays its scripts through the
engine to verify, at build time, that the blur really degrades the edge
and the restore strokes bring it back (the thresholds frozen into
meta.json are fixture properties).

Deterministic: rerunning regenerates byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import shutil
import sys

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "tests"))
sys.path.insert(0, os.path.join(ROOT, "src"))

import oracles  # noqa: E402
from regionsmudge.raster import RasterImage, save_png  # noqa: E402
from regionsmudge.regions import flat_fill_regions  # noqa: E402
from regionsmudge.replay import replay_script  # noqa: E402
from regionsmudge.stroke import StrokeSample, make_partial, resample_uniform  # noqa: E402

FIXTURES = os.path.join(ROOT, "tests", "fixtures")

ALPHA, BETA, GAMMA = 0.3, 0.7, 0.7


def region_sets(rmap):
    areas = {r.id: {(p.x, p.y) for p in r.area.points()} for r in rmap.regions}
    dil = {r.id: {(p.x, p.y) for p in r.dilated_boundary.points()} for r in rmap.regions}
    return areas, dil


def oracle_expected(rmap, samples, width, length=110.0, bone_radius=5.0):
    """Per-timestamp selected sets from the independent update-rule oracle."""
    areas, dil = region_sets(rmap)
    prev: set[int] = set()
    expected = []
    raw = []
    for i, (x, y) in enumerate(samples):
        raw.append(StrokeSample(float(x), float(y), i * 8.0))
        partial = make_partial(
            resample_uniform(raw, 2.0), rmap.shape, length, width, bone_radius
        )
        fp = {(p.x, p.y) for p in partial.footprint.points()}
        bone = {(p.x, p.y) for p in partial.bone_expansion.points()}
        _, _, sel = oracles.update_rule(prev, fp, bone, areas, dil, ALPHA, BETA, GAMMA)
        expected.append(sorted(sel))
        prev = sel
    return expected


def write_scenario(name, image, samples, params, intent, expected, tool="ss"):
    d = os.path.join(FIXTURES, name)
    os.makedirs(d, exist_ok=True)
    save_png(image, os.path.join(d, "canvas.png"))
    rmap = flat_fill_regions(image, params.get("boundary_dilation", 10.0))
    rmap.save(os.path.join(d, "canvas"))
    script = {
        "canvas": "canvas.png",
        "strokes": [
            {
                "tool": tool,
                "samples": [
                    {"x": float(x), "y": float(y), "t_ms": i * 8.0}
                    for i, (x, y) in enumerate(samples)
                ],
            }
        ],
        "params": params,
    }
    with open(os.path.join(d, "script.json"), "w", encoding="utf-8") as fh:
        json.dump(script, fh, indent=1)
        fh.write("\n")
    with open(os.path.join(d, "intent.json"), "w", encoding="utf-8") as fh:
        json.dump({"intended_regions": intent}, fh, indent=1)
        fh.write("\n")
    with open(os.path.join(d, "expected_selected.json"), "w", encoding="utf-8") as fh:
        json.dump(expected, fh, indent=1)
        fh.write("\n")
    return rmap


def halves_canvas():
    img = RasterImage.filled(256, 256, (200, 50, 40, 255))
    img.pixels[:, 128:] = (40, 60, 210, 255)
    return img


def scenario_boundary_follow():
    """Vertical stroke near the shared edge: both halves join and persist."""
    img = halves_canvas()
    samples = [(118.0, 40.0 + 8.0 * i) for i in range(23)]
    params = {"stroke_width": 40.0, "theta": 12.0}
    rmap = flat_fill_regions(img)
    expected = oracle_expected(rmap, samples, width=40.0)
    assert expected[0] == [0], expected[0]
    assert all(e == [0, 1] for e in expected[2:]), "both halves must stay selected"
    write_scenario("boundary_follow", img, samples, params, [0, 1], expected)
    print(f"boundary_follow: {len(samples)} samples, final selected {expected[-1]}")


def scenario_into_region():
    """Stroke inside a stadium-shaped patch whose flank touches a large
    neighbor; the footprint clips the neighbor but it is never selected."""
    path = [(78.0, 100.0 + 4.0 * i) for i in range(8)]  # down to y=128
    path += [(78.0 + 13.0 * f, 128.0 + 10.0 * f) for f in (1 / 3, 2 / 3, 1.0)]
    path += [(91.0, 138.0 + 4.0 * i) for i in (1, 2, 3)]  # down to y=150
    img = RasterImage.filled(256, 256, (235, 226, 200, 255))
    ys, xs = np.mgrid[0:256, 0:256].astype(np.float64)
    inside = np.zeros((256, 256), dtype=bool)
    for (ax, ay), (bx, by) in zip(path, path[1:]):
        dx, dy = bx - ax, by - ay
        l2 = dx * dx + dy * dy
        t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / l2, 0.0, 1.0)
        inside |= (xs - (ax + t * dx)) ** 2 + (ys - (ay + t * dy)) ** 2 <= 30.0 * 30.0
    img.pixels[inside] = (200, 60, 50, 255)  # patch
    img.pixels[:, 113:] = (60, 90, 200, 255)  # large neighbor truncates the flank
    rmap = flat_fill_regions(img)
    patch = int(rmap.labels[100, 100])
    neighbor = int(rmap.labels[100, 200])
    samples = path
    params = {"stroke_width": 50.0, "theta": 26.0}
    expected = oracle_expected(rmap, samples, width=50.0)
    assert all(e == [patch] for e in expected), f"patch-only expected, got {expected}"
    # the footprint must cover part of the neighbor at some timestamp
    late = make_partial(
        resample_uniform([StrokeSample(x, y, 0.0) for x, y in samples], 2.0),
        (256, 256), 110.0, 50.0, 5.0,
    )
    clipped = int(np.count_nonzero(late.footprint.mask[:, 113:]))
    assert clipped > 0, "footprint never reaches the unwanted neighbor"
    write_scenario("into_region", img, samples, params, [patch], expected)
    print(
        f"into_region: patch={patch} neighbor={neighbor} clip={clipped} px, "
        f"selected stays {expected[-1]}"
    )


def scenario_cross_band():
    """Horizontal crossing over a thin band: regions join while covered
    and drop out once the trailing window leaves them."""
    img = RasterImage.filled(256, 256, (220, 60, 40, 255))
    img.pixels[:, 96:112] = (60, 200, 80, 255)
    img.pixels[:, 112:] = (50, 60, 220, 255)
    rmap = flat_fill_regions(img)
    samples = [(40.0 + 8.0 * i, 128.0) for i in range(27)]  # to x=248
    params = {"stroke_width": 40.0, "theta": 12.0}
    expected = oracle_expected(rmap, samples, width=40.0)
    assert expected[0] == [0]
    assert expected[-1] == [2], f"final window should keep only the far region: {expected[-1]}"
    assert any(0 in e and 2 in e for e in expected), "crossing should bridge both sides"
    write_scenario("cross_band", img, samples, params, [0, 1, 2], expected)
    print(f"cross_band: selections {expected[0]} -> ... -> {expected[-1]}")


def scenario_ts_diag():
    """2x2 grid with a corner-to-corner stroke: the top-share baseline
    keeps the two diagonal blocks, whose union is 4-disconnected."""
    img = RasterImage.filled(256, 256, (200, 50, 40, 255))
    img.pixels[:128, 128:] = (70, 190, 70, 255)
    img.pixels[128:, :128] = (240, 200, 60, 255)
    img.pixels[128:, 128:] = (40, 60, 210, 255)
    rmap = flat_fill_regions(img)
    samples = [(60.0 + 6.0 * i, 60.0 + 6.0 * i) for i in range(24)]
    params = {"stroke_width": 30.0, "theta": 12.0}
    expected = oracle_expected(rmap, samples, width=30.0)
    # verify the TS discontinuity with the package's own baseline selector
    from regionsmudge.select import ResemblanceParams, covered_regions, ts_select

    rp = ResemblanceParams()
    raw = []
    disconnected = []
    for i, (x, y) in enumerate(samples):
        raw.append(StrokeSample(x, y, i * 8.0))
        p = make_partial(resample_uniform(raw, 2.0), (256, 256), 110.0, 30.0, 5.0)
        keep = ts_select(p, covered_regions(p.footprint, rmap), rmap, rp)
        if keep == frozenset({0, 3}):
            disconnected.append(i)
    assert disconnected, "no timestamp kept the disconnected diagonal pair"
    write_scenario("ts_diag", img, samples, params, [0, 3], expected, tool="ts")
    meta = {"ts_disconnected_timestamps": disconnected}
    with open(os.path.join(FIXTURES, "ts_diag", "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")
    print(f"ts_diag: disconnected top-share keep at t={disconnected}")


def zigzag_blur_samples():
    # stays within 8.5 px of the seam so every stamp reaches it; overshoots
    # top and bottom (samples clamp to the canvas) so no row keeps a crisp
    # edge
    out = []
    y = -4.0
    i = 0
    while y <= 260.0:
        out.append((120.0 if i % 2 == 0 else 136.0, y))
        y += 8.0
        i += 1
    return out


def restore_samples(x0, x1, rows):
    strokes = []
    for y in rows:
        n = 12
        strokes.append([(x0 + (x1 - x0) * i / (n - 1), float(y)) for i in range(n)])
    return strokes


def scenario_edge_recovery():
    d = os.path.join(FIXTURES, "edge_recovery")
    os.makedirs(d, exist_ok=True)
    img = halves_canvas()
    save_png(img, os.path.join(d, "canvas.png"))
    rmap = flat_fill_regions(img)
    rmap.save(os.path.join(d, "canvas"))

    blur = {
        "canvas": "canvas.png",
        "strokes": [
            {
                "tool": "bs",
                "samples": [
                    {"x": x, "y": y, "t_ms": i * 8.0}
                    for i, (x, y) in enumerate(zigzag_blur_samples())
                ],
            }
        ],
        "params": {"stroke_width": 40.0, "theta": 10.0, "strength": 0.7},
    }
    rows = [8 + 16 * k for k in range(16)]  # 8 .. 248, gaps within stamp reach
    restore_strokes = []
    for s in restore_samples(60.0, 107.0, rows):  # left region, toward the edge
        restore_strokes.append(
            {
                "tool": "ss",
                "samples": [{"x": x, "y": y, "t_ms": i * 8.0} for i, (x, y) in enumerate(s)],
            }
        )
    for s in restore_samples(196.0, 149.0, rows):  # right region, mirrored
        restore_strokes.append(
            {
                "tool": "ss",
                "samples": [{"x": x, "y": y, "t_ms": i * 8.0} for i, (x, y) in enumerate(s)],
            }
        )
    restore = {
        "canvas": "blurred.png",
        "strokes": restore_strokes,
        "params": {"stroke_width": 40.0, "theta": 30.0, "strength": 1.0},
    }
    with open(os.path.join(d, "blur.json"), "w", encoding="utf-8") as fh:
        json.dump(blur, fh, indent=1)
        fh.write("\n")
    with open(os.path.join(d, "restore.json"), "w", encoding="utf-8") as fh:
        json.dump(restore, fh, indent=1)
        fh.write("\n")

    # build-time verification through the engine
    session, _ = replay_script(blur, base_dir=d)
    save_png(session.canvas, os.path.join(d, "blurred.png"))
    for suffix in (".labels.png", ".regions.json"):
        shutil.copyfile(
            os.path.join(d, f"canvas{suffix}"), os.path.join(d, f"blurred{suffix}")
        )
    pre = sharpness(img.pixels)
    mid = sharpness(session.canvas.pixels)
    session2, rep2 = replay_script(restore, base_dir=d)
    post = sharpness(session2.canvas.pixels)
    assert mid < 0.8 * pre, f"blur too weak: {mid} vs {pre}"
    assert post >= 0.8 * pre, f"recovery too weak: {post} vs {pre}"
    assert rep2.pixels_changed_outside_selection == 0
    left = session2.canvas.pixels[:, :128]
    right = session2.canvas.pixels[:, 128:]
    for ch, lo_hi in (
        (left, ((200, 50, 40, 255), (200, 50, 40, 255))),
        (right, ((40, 60, 210, 255), (40, 60, 210, 255))),
    ):
        lo, hi = lo_hi
        for c in range(4):
            assert ch[..., c].min() >= lo[c] and ch[..., c].max() <= hi[c], (
                "restored channels must stay within the region's original range"
            )
    meta = {"sharpness_pre": pre, "sharpness_blurred": mid, "sharpness_restored": post}
    with open(os.path.join(d, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")
    print(f"edge_recovery: sharpness {pre} -> {mid} -> {post}")


def sharpness(pixels) -> int:
    """Max channel gradient across the original two-region edge."""
    a = pixels[:, 127, :3].astype(np.int64)
    b = pixels[:, 128, :3].astype(np.int64)
    return int(np.abs(a - b).max())


def main():
    os.makedirs(FIXTURES, exist_ok=True)
    scenario_boundary_follow()
    scenario_into_region()
    scenario_cross_band()
    scenario_ts_diag()
    scenario_edge_recovery()
    print("fixtures written to", FIXTURES)


if __name__ == "__main__":
    main()
