"""Acceptance suite.

One test per release criterion, each printing a PASS/FAIL line, all
tolerances pinned here. Fixture scenarios live under tests/fixtures/
(regenerated by tools/make_fixtures.py with oracle-derived expected
selections frozen to disk).
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import FIXTURES, random_partition, random_window
from regionsmudge import kernels
from regionsmudge.bench import bench_frames
from regionsmudge.config import Params
from regionsmudge.engine import dynamic_brush_radius
from regionsmudge.raster import load_png, save_png
from regionsmudge.regions import flat_fill_regions
from regionsmudge.replay import replay_script
from regionsmudge.select import (
    ResemblanceParams,
    TargetSet,
    boundary_resemblance,
    region_resemblance,
    resemblance,
    update_target_set,
    update_target_set_scored,
)
from regionsmudge.stroke import load_script, make_partial, resample_uniform

SCENARIOS = ("boundary_follow", "into_region", "cross_band", "ts_diag")


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {status}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def to_sets(rmap):
    areas = {r.id: {(p.x, p.y) for p in r.area.points()} for r in rmap.regions}
    dil = {r.id: {(p.x, p.y) for p in r.dilated_boundary.points()} for r in rmap.regions}
    return areas, dil


class TestOracleEquivalence:
    def test_scores_match_bruteforce_on_200_fixtures(self):
        """Eq-oracle equivalence: exact intersection counts, diff <= 1e-12,
        200 randomized 64x64 fixtures, < 30 s."""
        rng = np.random.default_rng(7001)
        rp = ResemblanceParams()
        # warm the jitted kernels outside the timed window
        warm = random_partition(rng, 64, 64, kind="rects")
        flat_fill_regions(warm)
        t0 = time.perf_counter()
        worst = 0.0
        for k in range(200):
            img = random_partition(rng, 64, 64, kind="rects" if k % 2 else "blobs")
            rmap = flat_fill_regions(img)
            areas, dil = to_sets(rmap)
            partial = make_partial(
                resample_uniform(random_window(rng, 64, 64, max_samples=8), 2.0),
                (64, 64), 110.0, 110.0, 5.0,
            )
            fp = {(p.x, p.y) for p in partial.footprint.points()}
            bone = {(p.x, p.y) for p in partial.bone_expansion.points()}
            n = min(len(rmap), int(rng.integers(1, 4)))
            ids = sorted(int(i) for i in rng.choice(len(rmap), size=n, replace=False))
            r = rmap.regions[ids[0]]
            area_set = {(p.x, p.y) for p in r.area.points()}
            got_rr = region_resemblance(partial.footprint, r.area)
            want_rr = oracles.coverage_inclusion(fp, area_set)
            got_rb = boundary_resemblance(partial.bone_expansion, r.dilated_boundary)
            want_rb = oracles.coverage_inclusion(bone, dil[r.id])
            got_r = resemblance(partial, set(ids), rmap, rp)
            want_r = oracles.resemblance_score(
                fp, bone, [areas[i] for i in ids], [dil[i] for i in ids], rp.alpha, rp.beta
            )
            worst = max(worst, abs(got_rr - want_rr), abs(got_rb - want_rb), abs(got_r - want_r))
            assert worst <= 1e-12
        elapsed = time.perf_counter() - t0
        report(
            "oracle equivalence (resemblance scoring)",
            worst <= 1e-12 and elapsed < 30.0,
            f"worst diff {worst:.2e}, {elapsed:.1f}s",
        )


class TestSelectionInvariants:
    def test_thousand_randomized_update_steps(self):
        rng = np.random.default_rng(7002)
        rp = ResemblanceParams()
        lo = ResemblanceParams(gamma=0.5)
        hi = ResemblanceParams(gamma=0.9)
        steps = 0
        violations = 0
        while steps < 1000:
            img = random_partition(rng, 64, 64, kind="rects" if steps % 2 else "blobs")
            rmap = flat_fill_regions(img)
            prev = TargetSet.initial()
            for _ in range(20):
                partial = make_partial(
                    resample_uniform(random_window(rng, 64, 64, max_samples=8), 2.0),
                    (64, 64), 110.0, 110.0, 5.0,
                )
                ts = update_target_set(prev, partial, rmap, rp)
                if not (ts.base <= ts.selected <= ts.covered):
                    violations += 1
                if len(ts.selected - ts.base) > 1:
                    violations += 1
                if not (prev.selected & ts.covered) <= ts.selected:
                    violations += 1  # persistence while covered
                t_hi, _, _ = update_target_set_scored(prev, partial, rmap, hi)
                t_lo, _, _ = update_target_set_scored(prev, partial, rmap, lo)
                if t_hi.selected != t_hi.base and t_lo.selected == t_lo.base:
                    violations += 1  # gamma=0.9 acceptance not in gamma=0.5 set
                prev = ts
                steps += 1
                if steps >= 1000:
                    break
        report("selection invariants (1000 steps)", violations == 0, f"{violations} violations")


class TestScenarioReproduction:
    @pytest.mark.parametrize("name", SCENARIOS)
    def test_selected_sets_match_expectations(self, name, tmp_path):
        d = FIXTURES / name
        script = load_script(d / "script.json")
        expected = json.loads((d / "expected_selected.json").read_text())
        trace_path = tmp_path / "trace.jsonl"
        session, _ = replay_script(
            script, base_dir=str(d), tool_override="ss", trace_path=str(trace_path)
        )
        got = [e["selected"] for e in session.trace]
        report(
            f"scenario {name}: selection trace matches the frozen oracle expectation",
            got == expected,
            f"{sum(a != b for a, b in zip(got, expected))} mismatching timestamps"
            if got != expected
            else f"{len(got)} timestamps",
        )

    def test_baseline_changes_unwanted_region_pixels(self):
        d = FIXTURES / "into_region"
        script = load_script(d / "script.json")
        original = load_png(d / "canvas.png")
        intent = json.loads((d / "intent.json").read_text())["intended_regions"]
        session_bs, _ = replay_script(script, base_dir=str(d), tool_override="bs")
        session_ss, _ = replay_script(script, base_dir=str(d), tool_override="ss")
        outside = ~session_bs.rmap.union_area_mask(intent)
        bs_outside = int(
            ((session_bs.canvas.pixels != original.pixels).any(axis=2) & outside).sum()
        )
        ss_outside = int(
            ((session_ss.canvas.pixels != original.pixels).any(axis=2) & outside).sum()
        )
        report(
            "footprint baseline bleeds into the unwanted region, selection does not",
            bs_outside > 0 and ss_outside == 0,
            f"bs {bs_outside} px, ss {ss_outside} px",
        )

    def test_top_share_baseline_discontinuous(self):
        d = FIXTURES / "ts_diag"
        script = load_script(d / "script.json")
        session, _ = replay_script(script, base_dir=str(d), tool_override="ts")
        disconnected = []
        for entry in session.trace:
            sel = entry["selected"]
            if not sel:
                continue
            union = session.rmap.union_area_mask(sel)
            join_w = np.zeros(union.shape, dtype=bool)
            join_n = np.zeros(union.shape, dtype=bool)
            join_w[:, 1:] = union[:, 1:] & union[:, :-1]
            join_n[1:, :] = union[1:, :] & union[:-1, :]
            labels = kernels.label_from_adjacency(join_w, join_n)
            if len(np.unique(labels[union])) > 1:
                disconnected.append(entry["t"])
        report(
            "top-share baseline selects a disconnected set on the crafted fixture",
            len(disconnected) >= 1,
            f"timestamps {disconnected}",
        )


class TestMaskInvariance:
    def test_zero_pixels_outside_selection_on_all_fixtures(self):
        total = 0
        checked = 0
        for name in SCENARIOS:
            d = FIXTURES / name
            script = load_script(d / "script.json")
            for tool in ("ss", "ts"):
                _, rep = replay_script(script, base_dir=str(d), tool_override=tool)
                total += rep.pixels_changed_outside_selection
                checked += 1
        d = FIXTURES / "edge_recovery"
        _, rep = replay_script(load_script(d / "restore.json"), base_dir=str(d))
        total += rep.pixels_changed_outside_selection
        checked += 1
        report(
            "mask invariance: pixels outside ever-selected areas untouched",
            total == 0,
            f"{total} stray pixels over {checked} replays",
        )


class TestEdgeRecovery:
    def test_blur_then_region_confined_restore(self):
        d = FIXTURES / "edge_recovery"
        original = load_png(d / "canvas.png")

        def sharpness(px):
            a = px[:, 127, :3].astype(np.int64)
            b = px[:, 128, :3].astype(np.int64)
            return int(np.abs(a - b).max())

        pre = sharpness(original.pixels)
        blur_session, _ = replay_script(load_script(d / "blur.json"), base_dir=str(d))
        mid = sharpness(blur_session.canvas.pixels)
        assert np.array_equal(
            blur_session.canvas.pixels,
            load_png(d / "blurred.png").pixels,
        ), "frozen blurred canvas is stale; rerun tools/make_fixtures.py"
        restore_session, rep = replay_script(load_script(d / "restore.json"), base_dir=str(d))
        post = sharpness(restore_session.canvas.pixels)
        px = restore_session.canvas.pixels
        hull_ok = True
        for sl, color in ((np.s_[:, :128], (200, 50, 40, 255)), (np.s_[:, 128:], (40, 60, 210, 255))):
            region = px[sl]
            for c in range(4):
                if region[..., c].min() < color[c] or region[..., c].max() > color[c]:
                    hull_ok = False
        report(
            "edge recovery: blur degrades, confined smudging restores",
            mid < 0.8 * pre and post >= 0.8 * pre and hull_ok
            and rep.pixels_changed_outside_selection == 0,
            f"sharpness {pre} -> {mid} -> {post}, hull_ok={hull_ok}",
        )


class TestDynamicBrush:
    def test_lambda_on_50_random_masks(self):
        rng = np.random.default_rng(7003)
        theta = 6.0
        worst = 0.0
        floor_ok = True
        cap_ok = True
        for _ in range(50):
            img = random_partition(rng, 48, 48, kind="blobs")
            rmap = flat_fill_regions(img)
            k = int(rng.integers(1, min(3, len(rmap)) + 1))
            ids = sorted(int(i) for i in rng.choice(len(rmap), size=k, replace=False))
            pos = (float(rng.uniform(0, 47)), float(rng.uniform(0, 47)))
            lam = dynamic_brush_radius(pos, ids, rmap, theta=theta, brush_max=200.0)
            union = {
                (x, y) for y in range(48) for x in range(48) if rmap.labels[y, x] in ids
            }
            bnd = oracles.boundary_points(union, 48, 48)
            py = min(max(int(math.floor(pos[1] + 0.5)), 0), 47)
            px_ = min(max(int(math.floor(pos[0] + 0.5)), 0), 47)
            sigma = min(math.hypot(px_ - bx, py - by) for bx, by in bnd)
            worst = max(worst, abs(lam - min(max(theta, sigma), 200.0)))
            if sigma < theta and lam != theta:
                floor_ok = False
            if lam > 200.0:
                cap_ok = False
        report(
            "dynamic brush radius: exact-EDT agreement, floor and cap",
            worst <= 0.5 and floor_ok and cap_ok,
            f"worst |lambda - oracle| = {worst:.3g} px",
        )


class TestPerformanceBudgets:
    def test_frame_budgets_512(self):
        res = bench_frames(512, 3)
        sel = res.median("selection_ms")
        adv = res.median("total_ms")
        report(
            "performance 512x512 (budget: selection <= 10 ms, advance <= 60 ms; "
            "reference 1.39 ms / 20.83 ms)",
            sel <= 10.0 and adv <= 60.0,
            f"selection median {sel:.2f} ms, advance median {adv:.2f} ms, "
            f"backend {kernels.active_backend()}",
        )

    def test_frame_budgets_1024(self):
        res = bench_frames(1024, 3)
        sel = res.median("selection_ms")
        adv = res.median("total_ms")
        report(
            "performance 1024x1024 (budget: selection <= 30 ms, advance <= 200 ms; "
            "reference 4.17 ms / 66.67 ms)",
            sel <= 30.0 and adv <= 200.0,
            f"selection median {sel:.2f} ms, advance median {adv:.2f} ms, "
            f"backend {kernels.active_backend()}",
        )


class TestReplayDeterminism:
    def test_every_fixture_script_twice(self, tmp_path):
        scripts = [(FIXTURES / name / "script.json") for name in SCENARIOS]
        scripts += [FIXTURES / "edge_recovery" / "blur.json", FIXTURES / "edge_recovery" / "restore.json"]
        all_ok = True
        for i, path in enumerate(scripts):
            script = load_script(path)
            outs = []
            for run in range(2):
                session, _ = replay_script(script, base_dir=str(path.parent))
                out = tmp_path / f"{i}_{run}.png"
                save_png(session.canvas, out)
                outs.append(out.read_bytes())
            if outs[0] != outs[1]:
                all_ok = False
        report(
            "replay determinism: byte-identical output across runs",
            all_ok,
            f"{len(scripts)} scripts x 2 runs",
        )


class TestExplicitExclusions:
    def test_user_study_statistics_not_reproduced(self):
        # completion times, operation counts and usability scores are
        # human-subject findings; the property suites above stand in for them
        report(
            "user-study statistics intentionally not reproduced "
            "(substituted by the property suites)",
            True,
        )
