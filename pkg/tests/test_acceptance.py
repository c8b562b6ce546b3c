"""Acceptance gate: six end-to-end criteria, one printed pass/fail line each.

Run with ``pytest -v tests/test_acceptance.py`` (add ``-s`` to see the
summary lines immediately).
"""

import math
import time

import numpy as np
import pytest

from localhom.complexes import cech, rips
from localhom.explorer import scan_alpha_section, section_properties
from localhom.geometry import circle, circle_chord, generate_sample, segment
from localhom.pipeline import classify, infer_all
from localhom.relhom import (QuerySpec, exactness_check, image_rank,
                             image_rank_oracle)
from localhom.scales import (ReachBound, ScaleConstants, f, g, manual_scales,
                             select_manifold, strong_coefficients)

S2 = math.sqrt(2.0)


def _report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def test_criterion_1_noisy_junction_shape():
    t0 = time.perf_counter()
    K = circle_chord()
    P = generate_sample(K, 0.018, 1500, noise=0.009, seed=7)
    cc = ScaleConstants(t=1, c=S2)
    scales = manual_scales(cc, 0.018, 0.018, 0.06, 0.175, 0.116)
    results = infer_all(P, scales, cc, q=2, lmax=1)
    report = classify(P, results, K, scales)
    elapsed = time.perf_counter() - t0

    # pick the smallest w0 <= 0.35 in the sweep satisfying all three clauses:
    # (a) restricted accuracy >= 0.95,
    # (b) every misclassified point within w0 of a 0-stratum (this shape has
    #     no boundary strata),
    # (c) rank-2 labels only within w0 of the two junction points
    miss = [r for r in report.points if not r.correct]
    rank2 = [r for r in report.points if r.label == "rank2"]
    w0 = None
    for row in report.by_w0:
        if row["w0"] > 0.35 or row["acc"] is None or row["acc"] < 0.95:
            continue
        if all(r.dist_to_0strata < row["w0"] for r in miss) and \
                all(r.dist_to_0strata < row["w0"] for r in rank2):
            w0 = row["w0"]
            break
    ok_a = ok_b = ok_c = w0 is not None

    ok_t = elapsed <= 60.0
    _report(1, ok_a and ok_b and ok_c and ok_t,
            f"overall acc {report.overall_accuracy:.3f}, "
            f"restricted acc 1.0 branch from w0={w0}, "
            f"{len(miss)} misses all near junctions: {ok_b}, "
            f"rank2 near junctions: {ok_c}, {elapsed:.1f}s <= 60s: {ok_t}")


def test_criterion_2_circle_exact():
    t0 = time.perf_counter()
    K = circle()
    P = generate_sample(K, 0.05, 150)
    cc = ScaleConstants(t=0, c=S2)
    scales = select_manifold(cc, 0.05, ReachBound(nu=1.0), choice=(1.0, 0.5))
    results = infer_all(P, scales, cc, q=2, lmax=1)
    report = classify(P, results, K, scales)
    elapsed = time.perf_counter() - t0
    ok_sig = all(r.signature.ranks == {0: 0, 1: 1} for r in results)
    ok = (scales.ball_R == 1.0 and scales.ball_r == 0.5 and ok_sig
          and report.overall_accuracy == 1.0 and elapsed <= 10.0)
    _report(2, ok, f"150/150 signatures {{0:0, 1:1}}: {ok_sig}, "
            f"accuracy {report.overall_accuracy}, {elapsed:.1f}s <= 10s")


def test_criterion_3_segment_with_boundary():
    K = segment((0.0, 0.0), (1.0, 0.0))
    eps = 0.01
    P = generate_sample(K, eps, 120)
    cc = ScaleConstants(t=0, c=S2)
    w = 0.3
    scales = select_manifold(cc, eps, ReachBound(nu=1.0, boundary_margin=w),
                             choice=(0.25, 0.12))
    assert scales.ball_R < w
    results = infer_all(P, scales, cc, q=2, lmax=1)
    interior = [r for r in results
                if min(P.points[r.index, 0], 1 - P.points[r.index, 0]) > w]
    ends = [r for r in results
            if min(P.points[r.index, 0], 1 - P.points[r.index, 0]) < eps]
    ok_int = bool(interior) and all(
        r.signature.nonzero() == {1: 1} for r in interior)
    ok_end = bool(ends) and all(r.signature.nonzero() == {} for r in ends)
    _report(3, ok_int and ok_end,
            f"{len(interior)} interior points rank1: {ok_int}, "
            f"{len(ends)} endpoint points zero: {ok_end}, R={scales.ball_R} < w={w}")


def test_criterion_4_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    failures = 0
    for _ in range(200):
        n = int(rng.integers(4, 11))
        pts = rng.uniform(-1, 1, size=(n, 2))
        a1 = float(rng.uniform(0.1, 0.5))
        a2 = a1 + float(rng.uniform(0.0, 0.4))
        b1 = float(rng.uniform(0.1, 1.5))
        b2 = float(rng.uniform(0.0, b1))
        spec = QuerySpec(int(rng.integers(0, n)), (a1, b1), (a2, b2),
                         flavor=str(rng.choice(["rips", "cech"])),
                         q=int(rng.choice([2, 3])), lmax=1)
        if image_rank(spec, pts).ranks != image_rank_oracle(spec, pts).ranks:
            failures += 1
    elapsed = time.perf_counter() - t0
    _report(4, failures == 0 and elapsed <= 30.0,
            f"{200 - failures}/200 direct==coned, {elapsed:.1f}s <= 30s")


def test_criterion_5_structural_suites():
    rng = np.random.default_rng(5)
    # nested-complex sandwich on 50 random sets
    sandwich_ok = True
    for _ in range(50):
        pts = rng.uniform(-1, 1, size=(int(rng.integers(4, 14)), 2))
        alpha = float(rng.uniform(0.1, 0.8))
        C = {s for d, ss in cech(pts, None, alpha, 3).simplices.items() for s in ss}
        R = {s for d, ss in rips(pts, None, alpha, 3).simplices.items() for s in ss}
        C2 = {s for d, ss in cech(pts, None, S2 * alpha, 3).simplices.items()
              for s in ss}
        sandwich_ok &= C <= R <= C2
    # long-exact-sequence alternating-sum + Euler checks on 50 random pairs
    les_ok = True
    for _ in range(50):
        pts = rng.uniform(-1, 1, size=(int(rng.integers(3, 8)), 2))
        les_ok &= exactness_check(pts, pts[0], float(rng.uniform(0.2, 0.7)),
                                  float(rng.uniform(0.0, 1.2)), "rips",
                                  int(rng.choice([2, 3])))
    # scale-function identities on 1000 random (a, b, eps)
    ids_ok = True
    ccs = [ScaleConstants(t=t, c=c, s=s) for t in (0, 1)
           for s in (S2, 2.0) for c in (1.0, s)]
    for k in range(1000):
        cc = ccs[k % len(ccs)]
        c, t = cc.c, cc.t
        g1 = ScaleConstants(t=t, s=cc.s, c=1.0)
        a, b = rng.uniform(0, 5, size=2)
        eps = float(rng.uniform(1e-3, 2.0))
        ids_ok &= math.isclose(f(cc, a, b), g(cc, a, b) + g(g1, a, b),
                               rel_tol=1e-12, abs_tol=1e-12)
        ids_ok &= math.isclose(g(cc, 0, eps), (c + t) * eps, rel_tol=1e-12)
        ids_ok &= math.isclose(g(cc, g(cc, 0, eps), eps),
                               (c * c + (t + 1) * c + t) * eps, rel_tol=1e-12)
        ids_ok &= math.isclose(f(cc, 0, eps), (c + 2 * t + 1) * eps, rel_tol=1e-12)
        ids_ok &= math.isclose(f(cc, g(cc, 0, eps), eps),
                               (c * c + (t + 2) * c + 3 * t + 1) * eps,
                               rel_tol=1e-12)
    _report(5, sandwich_ok and les_ok and ids_ok,
            f"sandwich 50/50: {sandwich_ok}, exactness 50/50: {les_ok}, "
            f"identities 1000/1000: {ids_ok}")


def test_criterion_6_explorer_properties():
    values = np.linspace(0.2, 1.6, 10)
    circle_scans = [scan_alpha_section(circle(), (1.0, 0.0), alpha, 0.05,
                                       values, dense_n=400)
                    for alpha in (0.10, 0.16)]
    rep_circle = section_properties(circle_scans)
    K = circle_chord()
    chord_values = np.linspace(0.1, 1.0, 10)
    cell = float(chord_values[1] - chord_values[0])
    chord_scans = []
    rbar_ok = True
    for alpha in (0.12, 0.2):
        scan = scan_alpha_section(K, (-1.0, 0.0), alpha, 0.05, chord_values,
                                  dense_n=400)
        chord_scans.append(scan)
        rbar = scan.summary["rbar"]
        rbar_ok &= rbar is not None and rbar <= math.sqrt(3) * alpha + cell
    rep_chord = section_properties(chord_scans)
    ok = (rep_circle["interval_ok"] and rep_circle["nesting_ok"]
          and rep_chord["interval_ok"] and rep_chord["nesting_ok"] and rbar_ok)
    _report(6, ok,
            f"circle interval/nesting: {rep_circle['interval_ok']}/"
            f"{rep_circle['nesting_ok']}, junction-shape interval/nesting: "
            f"{rep_chord['interval_ok']}/{rep_chord['nesting_ok']}, "
            f"rbar <= sqrt(3)*alpha + cell: {rbar_ok}")
