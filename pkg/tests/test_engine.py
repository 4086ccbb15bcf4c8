import math

import numpy as np
import pytest

import oracles
from conftest import random_partition
from regionsmudge.config import Params
from regionsmudge.engine import (
    PickupBuffer,
    SmudgeSession,
    dynamic_brush_radius,
    smudge_stamp,
)
from regionsmudge.raster import PointSet, RasterImage
from regionsmudge.regions import flat_fill_regions
from regionsmudge.stroke import StrokeSample


def S(x, y, t=0.0, pressure=None):
    return StrokeSample(float(x), float(y), float(t), pressure)


def seeded_pickup(color, radius=40.0, anchor=(0, 0)):
    buf = PickupBuffer(radius)
    buf.reset(anchor)
    buf.data[:] = color
    buf.valid[:] = 1
    return buf


class TestDynamicBrushRadius:
    def test_disk_region_center(self):
        img = RasterImage.filled(128, 128, (0, 0, 0, 255))
        ys, xs = np.mgrid[0:128, 0:128]
        disk = (xs - 64) ** 2 + (ys - 64) ** 2 <= 50 * 50
        img.pixels[disk] = (200, 0, 0, 255)
        rmap = flat_fill_regions(img)
        disk_id = int(rmap.labels[64, 64])
        lam = dynamic_brush_radius((64.0, 64.0), {disk_id}, rmap, theta=10.0)
        # the discrete boundary of a rasterized radius-50 disk sits up to
        # ~1 px inside the ideal circle; lam must match it exactly
        area = {(x, y) for y in range(128) for x in range(128) if rmap.labels[y, x] == disk_id}
        bnd = oracles.boundary_points(area, 128, 128)
        sigma = min(math.hypot(64 - bx, 64 - by) for bx, by in bnd)
        assert lam == pytest.approx(sigma, abs=1e-9)
        assert abs(lam - 50.0) <= 1.0

    def test_theta_floor_near_boundary(self, halves_64):
        rmap = flat_fill_regions(halves_64)
        lam = dynamic_brush_radius((30.0, 32.0), {0}, rmap, theta=10.0)
        assert lam == 10.0  # sigma = 1.x < theta

    def test_brush_max_clamp(self):
        img = RasterImage.filled(600, 600, (5, 5, 5, 255))
        rmap = flat_fill_regions(img)
        lam = dynamic_brush_radius((300.0, 300.0), {0}, rmap, theta=10.0, brush_max=200.0)
        assert lam == 200.0

    def test_empty_targets_rejected(self, halves_64):
        rmap = flat_fill_regions(halves_64)
        with pytest.raises(ValueError, match="no smudge target"):
            dynamic_brush_radius((10.0, 10.0), set(), rmap, theta=10.0)

    def test_matches_edt_oracle_on_random_masks(self, rng):
        for _ in range(10):
            img = random_partition(rng, 48, 48, kind="blobs")
            rmap = flat_fill_regions(img)
            k = int(rng.integers(1, min(3, len(rmap)) + 1))
            ids = sorted(int(i) for i in rng.choice(len(rmap), size=k, replace=False))
            pos = (float(rng.uniform(0, 47)), float(rng.uniform(0, 47)))
            lam = dynamic_brush_radius(pos, ids, rmap, theta=4.0, brush_max=200.0)
            union = {
                (x, y)
                for y in range(48)
                for x in range(48)
                if rmap.labels[y, x] in ids
            }
            bnd = oracles.boundary_points(union, 48, 48)
            px = min(max(int(math.floor(pos[0] + 0.5)), 0), 47)
            py = min(max(int(math.floor(pos[1] + 0.5)), 0), 47)
            sigma = min(math.hypot(px - bx, py - by) for bx, by in bnd)
            assert abs(lam - min(max(4.0, sigma), 200.0)) <= 0.5


class TestSmudgeStamp:
    def test_strength_zero_leaves_canvas_updates_pickup(self):
        canvas = RasterImage.filled(32, 32, (10, 20, 30, 255))
        before = canvas.pixels.copy()
        pickup = seeded_pickup((200, 100, 50, 255), anchor=(16, 16))
        mask = PointSet.full((32, 32))
        smudge_stamp(canvas, (16.0, 16.0), 5.0, 0.0, pickup, mask, pickup_rate=0.5)
        assert np.array_equal(canvas.pixels, before)
        # pickup blended halfway toward the canvas under the disk
        assert tuple(pickup.data[pickup.rbuf, pickup.rbuf]) == (105, 60, 40, 255)

    def test_strength_one_paints_pickup_color(self):
        canvas = RasterImage.filled(32, 32, (0, 0, 0, 255))
        pickup = seeded_pickup((255, 0, 0, 255), anchor=(16, 16))
        mask = PointSet.full((32, 32))
        smudge_stamp(canvas, (16.0, 16.0), 4.0, 1.0, pickup, mask)
        disk = oracles.disk_points(16, 16, 4.0, 32, 32)
        for x, y in disk:
            assert tuple(canvas.pixels[y, x]) == (255, 0, 0, 255)
        assert tuple(canvas.pixels[0, 0]) == (0, 0, 0, 255)

    def test_half_strength_rounds_half_up(self):
        canvas = RasterImage.filled(16, 16, (0, 0, 0, 255))
        pickup = seeded_pickup((255, 255, 255, 255), anchor=(8, 8))
        smudge_stamp(canvas, (8.0, 8.0), 3.0, 0.5, pickup, PointSet.full((16, 16)))
        assert tuple(canvas.pixels[8, 8]) == (128, 128, 128, 255)

    def test_pixels_outside_mask_untouched(self):
        canvas = RasterImage.filled(32, 32, (50, 50, 50, 255))
        before = canvas.pixels.copy()
        mask = np.zeros((32, 32), dtype=bool)
        mask[:, :16] = True
        pickup = seeded_pickup((255, 255, 255, 255), anchor=(16, 16))
        smudge_stamp(canvas, (16.0, 16.0), 6.0, 1.0, pickup, PointSet(mask))
        assert np.array_equal(canvas.pixels[:, 16:], before[:, 16:])
        assert not np.array_equal(canvas.pixels[:, :16], before[:, :16])

    def test_bad_args_rejected(self):
        canvas = RasterImage.filled(8, 8, (0, 0, 0, 255))
        pickup = seeded_pickup((0, 0, 0, 255))
        with pytest.raises(ValueError):
            smudge_stamp(canvas, (4, 4), 0.0, 0.5, pickup, PointSet.full((8, 8)))
        with pytest.raises(ValueError):
            smudge_stamp(canvas, (4, 4), 2.0, 1.5, pickup, PointSet.full((8, 8)))


class TestPickupBuffer:
    def test_reanchor_keeps_content_brush_relative(self):
        # the picked-up color travels with the brush: moving the anchor must
        # not move cell contents within the buffer
        buf = PickupBuffer(8.0)
        buf.reset((10, 10))
        c = buf.rbuf
        buf.data[c, c] = (9, 9, 9, 9)
        buf.valid[c, c] = 1
        buf.reanchor(12, 11)
        assert buf.anchor == (12, 11)
        assert buf.valid[c, c] == 1
        assert tuple(buf.data[c, c]) == (9, 9, 9, 9)

    def test_invalidate_outside_radius(self):
        buf = PickupBuffer(8.0)
        buf.reset((0, 0))
        buf.valid[:] = 1
        buf.invalidate_outside(3.0)
        c = buf.rbuf
        assert buf.valid[c, c] == 1
        assert buf.valid[c, c + 3] == 1
        assert buf.valid[c, c + 5] == 0


class TestSessionLifecycle:
    def test_begin_end_single_sample_minimal_change(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        before = sess.canvas.pixels.copy()
        sess.begin_stroke("ss", S(10, 32))
        rec = sess.end_stroke()
        assert rec.stamps == 0
        assert np.array_equal(sess.canvas.pixels, before)

    def test_begin_twice_rejected(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        sess.begin_stroke("ss", S(5, 5))
        with pytest.raises(RuntimeError):
            sess.begin_stroke("ss", S(6, 6))

    def test_end_without_begin_rejected(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        with pytest.raises(RuntimeError):
            sess.end_stroke()

    def test_unknown_tool_rejected(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        with pytest.raises(ValueError):
            sess.begin_stroke("xx", S(5, 5))

    def test_param_change_rejected_mid_stroke(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        sess.begin_stroke("ss", S(5, 5))
        with pytest.raises(RuntimeError):
            sess.set_params(Params(theta=20.0))
        sess.end_stroke()
        sess.set_params(Params(theta=20.0))
        assert sess.brush.theta == 20.0

    def test_sample_clamped_with_flag(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        res = sess.begin_stroke("bs", S(-5, 200))
        assert res.clamped
        res = sess.smudge_advance(S(10, 32))
        assert not res.clamped

    def test_undo_restores_bit_exact(self, halves_64):
        # bs stroke crossing the color edge definitely changes pixels
        sess = SmudgeSession(halves_64.snapshot(), params=Params(stroke_width=20.0))
        before = sess.canvas.pixels.copy()
        sess.begin_stroke("bs", S(20, 32))
        for i in range(1, 14):
            sess.smudge_advance(S(20 + i * 2, 32, i * 8.0))
        sess.end_stroke()
        assert not np.array_equal(sess.canvas.pixels, before)
        ok, tiles = sess.undo()
        assert ok and tiles
        assert np.array_equal(sess.canvas.pixels, before)

    def test_undo_empty_stack_is_noop(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        ok, tiles = sess.undo()
        assert not ok and tiles == []

    def test_undo_stack_multiple_strokes(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot(), params=Params(stroke_width=20.0))
        snaps = [sess.canvas.pixels.copy()]
        for k in range(3):
            sess.begin_stroke("bs", S(8, 10 + 20 * k))
            for i in range(1, 10):
                sess.smudge_advance(S(8 + i * 3, 10 + 20 * k, i * 8.0))
            sess.end_stroke()
            snaps.append(sess.canvas.pixels.copy())
        for k in (2, 1, 0):
            sess.undo()
            assert np.array_equal(sess.canvas.pixels, snaps[k])


class TestAdvanceStamping:
    def test_same_position_zero_stamps_empty_diff(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        sess.begin_stroke("ss", S(10, 32))
        res = sess.smudge_advance(S(10, 32, 10.0))
        assert res.stamps == 0
        assert res.tiles == []

    def test_interpolated_stamp_count(self):
        # bs keeps radius = theta; spacing 0.25 * 20 = 5 px over a 30 px move
        img = RasterImage.filled(128, 128, (90, 90, 90, 255))
        sess = SmudgeSession(img, params=Params(theta=20.0, stamp_spacing=0.25))
        sess.begin_stroke("bs", S(20, 64))
        res = sess.smudge_advance(S(50, 64, 10.0))
        assert res.stamps == 6

    def test_partial_distance_carries_over(self):
        img = RasterImage.filled(128, 128, (90, 90, 90, 255))
        sess = SmudgeSession(img, params=Params(theta=20.0, stamp_spacing=0.25))
        sess.begin_stroke("bs", S(20, 64))
        assert sess.smudge_advance(S(23, 64, 5.0)).stamps == 0
        assert sess.smudge_advance(S(26, 64, 10.0)).stamps == 1

    def test_mask_confines_changes(self, halves_64):
        # blur the edge with bs, then smudge confined to the left region:
        # the second stroke must not touch a single pixel outside it
        params = Params(stroke_width=16.0, theta=8.0)
        sess = SmudgeSession(halves_64.snapshot(), params=params)
        sess.begin_stroke("bs", S(26, 8))
        for i in range(1, 13):
            # zigzag across the edge; strokes parallel to an edge do not
            # transport color across it
            sess.smudge_advance(S(26 + 11 * (i % 2), 8 + i * 4, i * 8.0))
        sess.end_stroke()
        rmap = flat_fill_regions(halves_64)  # pre-blur partition
        sess.set_region_map(rmap)
        before = sess.canvas.pixels.copy()
        sess.begin_stroke("ss", S(10, 20))
        for i in range(1, 12):
            sess.smudge_advance(S(10 + i, 20 + i * 2, i * 8.0))
        rec = sess.end_stroke()
        assert rec.ever_selected == {0}
        assert rec.pixels_changed_outside_selection == 0
        left = rmap.labels == 0
        assert not np.array_equal(sess.canvas.pixels[left], before[left])
        assert np.array_equal(sess.canvas.pixels[~left], before[~left])

    def test_convexity_within_region(self, rng):
        # smudging only mixes: channel values stay within the region's
        # initial [min, max] per channel
        img = RasterImage.filled(96, 96, (30, 60, 90, 255))
        img.pixels[:, 48:] = (200, 210, 220, 255)
        noise = rng.integers(0, 20, size=(96, 48), dtype=np.uint8)
        img.pixels[:, :48, 0] = 30 + noise  # textured left region
        rmap = None
        from regionsmudge.regions import meanshift_regions

        rmap = meanshift_regions(img, 6.0, 40.0, min_region=32)
        assert len(rmap) == 2
        left_id = int(rmap.labels[48, 10])
        left_mask = rmap.labels == left_id
        lo = [img.pixels[..., c][left_mask].min() for c in range(4)]
        hi = [img.pixels[..., c][left_mask].max() for c in range(4)]
        sess = SmudgeSession(img, rmap, Params(stroke_width=16.0))
        sess.begin_stroke("ss", S(10, 20))
        for i in range(1, 16):
            sess.smudge_advance(S(10 + i * 1.5, 20 + i * 2.5, i * 8.0))
        rec = sess.end_stroke()
        assert rec.ever_selected == {left_id}
        for c in range(4):
            ch = sess.canvas.pixels[..., c][left_mask]
            assert ch.min() >= lo[c]
            assert ch.max() <= hi[c]

    def test_lambda_floor_and_cap_during_stroke(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot(), params=Params(theta=12.0))
        sess.begin_stroke("ss", S(4, 32))
        for i in range(1, 10):
            sess.smudge_advance(S(4 + i * 2, 32, i * 8.0))
            assert sess.brush.radius >= 12.0
            assert sess.brush.radius <= sess.brush.brush_max
        sess.end_stroke()

    def test_pressure_scales_strength(self):
        img1 = RasterImage.filled(64, 64, (0, 0, 0, 255))
        img1.pixels[:, :8] = (255, 255, 255, 255)
        img2 = RasterImage(img1.pixels.copy())
        p = Params(theta=10.0, stroke_width=30.0)
        full = SmudgeSession(img1, params=p)
        soft = SmudgeSession(img2, params=p)
        full.begin_stroke("bs", S(6, 32, 0, 1.0))
        soft.begin_stroke("bs", S(6, 32, 0, 0.2))
        for i in range(1, 10):
            full.smudge_advance(S(6 + i * 3, 32, i * 8.0, 1.0))
            soft.smudge_advance(S(6 + i * 3, 32, i * 8.0, 0.2))
        full.end_stroke()
        soft.end_stroke()
        # the softer stroke drags less white into the black area
        band = (slice(28, 37), slice(10, 40), 0)
        assert int(full.canvas.pixels[band].sum()) > int(soft.canvas.pixels[band].sum())

    def test_replay_determinism(self, three_bands_96):
        outs = []
        for _ in range(2):
            sess = SmudgeSession(three_bands_96.snapshot())
            sess.begin_stroke("ss", S(10, 48, 0, 0.8))
            for i in range(1, 20):
                sess.smudge_advance(S(10 + i * 4, 48 + (i % 3), i * 8.0, 0.8))
            sess.end_stroke()
            outs.append(sess.canvas.pixels.copy())
        assert np.array_equal(outs[0], outs[1])

    def test_trace_schema(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        sess.begin_stroke("ss", S(10, 32))
        sess.smudge_advance(S(14, 32, 8.0))
        sess.end_stroke()
        assert len(sess.trace) == 2
        for i, entry in enumerate(sess.trace):
            assert entry["t"] == i
            assert set(entry) == {"t", "covered", "base", "candidate_scores", "base_score", "selected"}


class TestSegmentation:
    def test_resegment_rejected_mid_stroke(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot())
        sess.begin_stroke("ss", S(4, 4))
        with pytest.raises(RuntimeError):
            sess.resegment("flat")

    def test_resegment_after_smudge(self, halves_64):
        sess = SmudgeSession(halves_64.snapshot(), params=Params(stroke_width=20.0))
        sess.begin_stroke("bs", S(28, 10))
        for i in range(1, 12):
            sess.smudge_advance(S(28 + i, 10 + i * 4, i * 8.0))
        sess.end_stroke()
        sess.resegment("meanshift", color_bandwidth=40.0)
        assert len(sess.rmap) >= 2
