"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line to the terminal
(outside pytest's capture) before asserting.
"""
import math

import numpy as np
import pytest

import oracles
from tqc import _kernels
from tqc.conformal.checks import (constants_grid, derivative_ratio_check, koebe_check, lemma_constants_report,
                                  random_pairs, thm47_verify, validation_grid)
from tqc.conformal.geometry import delta_grid, geodesic_nearest_delta, harmonic_grid
from tqc.conformal.zipper import eval_map, zipper_fit
from tqc.curves import ClosedCurve, arc_diameter, normalize_unit_diameter, resample_arclength
from tqc.generators import CurveSpec, adaptive_cusp_sampling, generate
from tqc.parametrize import arclength_param, build_boundary_map
from tqc.qsmod import psi, psi_bound_check, weak_qs_constant
from tqc.subdivision import (build_tree, equalize_count, greedy_subdivide, halving_holds, theoretical_constants,
                             tree_constants)
from tqc.turning import PairFilter, exponent_fit, turning_constant


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def koch4():
    return generate(CurveSpec("koch", params={"level": 4}))


@pytest.fixture(scope="module")
def koch_maps(koch4):
    return {d: build_boundary_map(build_tree(koch4, 4, d)) for d in (3, 4)}


@pytest.fixture(scope="module")
def koch_weak(koch_maps):
    return {d: weak_qs_constant(bm, 1.0) for d, bm in koch_maps.items()}


def test_criterion_01_circle_exactness(report):
    c = generate(CurveSpec("circle", 512))
    one = turning_constant(c, 1.0).C_star
    half = turning_constant(c, 0.5).C_star
    ok = abs(one - 1) <= 1e-3 and abs(half - math.sqrt(2)) <= 1e-2
    report(1, ok, f"C*(1)={one:.6f} C*(1/2)={half:.6f}")


def test_criterion_02_cusp_exponent(report):
    flt = PairFilter(straddle=0, max_chord=0.1)
    c2 = generate(CurveSpec("cusp", 1024, {"order": 2.0}))
    c3 = generate(CurveSpec("cusp", 1024, {"order": 3.0}))
    t2 = exponent_fit(c2, flt).fit_t
    t3 = exponent_fit(c3, flt).fit_t
    small = turning_constant(generate(CurveSpec("cusp", 256, {"order": 2.0})), 1.0).C_star
    large = turning_constant(c2, 1.0).C_star
    ok = abs(t2 - 0.5) <= 0.05 and abs(t3 - 1 / 3) <= 0.05 and large >= 2 * small
    report(2, ok, f"fit s=2 {t2:.3f} s=3 {t3:.3f}; C*(1) n=256 {small:.2f} n=1024 {large:.2f}")


def test_criterion_03_greedy_pieces(report):
    eps = 0.25
    worst = []
    for seed in range(10):
        c, _ = normalize_unit_diameter(generate(CurveSpec("perturbed", 256, {"seed": seed})))
        need = int(math.ceil(8.0 * c.perimeter() / eps)) + 1
        c, _ = normalize_unit_diameter(resample_arclength(c, max(need, c.n)))
        pieces = greedy_subdivide(c, eps)
        diams = [arc_diameter(c, s) for s in pieces]
        covered = sum(s.edge_count(c.n) for s in pieces) == c.n
        chained = all(a.end == b.start for a, b in zip(pieces, pieces[1:] + pieces[:1]))
        window = all(eps / 8 - 1e-12 <= d <= eps + 1e-12 for d in diams)
        # splits are nested, so one run to 3x the count covers every p in between
        minima = []
        target = 3 * len(pieces)
        eq = equalize_count(c, pieces, target, minima)
        kept = len(eq) == target and len(minima) == target - len(pieces) + 1 and halving_holds(minima)
        kept &= all(len(equalize_count(c, pieces, p)) == p for p in (len(pieces), len(pieces) + 7))
        worst.append(covered and chained and window and kept)
    report(3, all(worst), f"{sum(worst)}/10 seeded curves pass")


def test_criterion_04_constants(report):
    sc = theoretical_constants(1.0, 1.0, 0.5)
    tc = tree_constants(3, 1.0)
    ok = (sc.p == 607 and tc.mu == 16 and (tc.m, tc.n) == (4, 16) and tc.N_alphabet == 145
          and tc.log2_c == 24 and all(tc.inequalities().values()))
    report(4, ok, f"p={sc.p} mu={tc.mu} (m,n)=({tc.m},{tc.n}) N={tc.N_alphabet} log2c={tc.log2_c}")


def test_criterion_05_tree_pipeline(report, koch_maps, koch_weak):
    r3, r4 = koch_weak[3].weak_R, koch_weak[4].weak_R
    change = max(r3, r4) / min(r3, r4)
    image = [turning_constant(ClosedCurve(koch_maps[d].points), 1.0).C_star for d in (3, 4)]
    bound = all(image[i] <= 2 * r for i, r in enumerate((r3, r4)))
    ok = math.isfinite(r3) and math.isfinite(r4) and change < 2 and bound
    report(5, ok, f"R d=3 {r3:.3f} d=4 {r4:.3f} change {change:.3f}; image C* {image[0]:.3f}, {image[1]:.3f}")


def test_criterion_06_geometry_bounds(report):
    hg = harmonic_grid()
    dg = delta_grid()
    d = geodesic_nearest_delta(0.75)
    ok = hg["min_omega"] >= 1 / (18 * math.pi**2) and dg["max_lambda"] <= 0.5 * math.log(math.pi) \
        and abs(d - 0.41421) <= 1e-5
    report(6, ok, f"min omega {hg['min_omega']:.4f} max lambda {dg['max_lambda']:.4f} delta(3/4) {d:.6f}")


def test_criterion_07_conformal_validity(report):
    shapes = {
        "circle": generate(CurveSpec("circle", 512)),
        "ellipse": generate(CurveSpec("ellipse", 512)),
        "koch3": generate(CurveSpec("koch", params={"level": 3})),
        "cusp2": generate(CurveSpec("cusp", 512, {"order": 2.0})),
    }
    grid = validation_grid(500)
    z1, z2 = random_pairs(500)
    parts, ok = [], True
    maps = {}
    for name, curve in shapes.items():
        m = maps[name] = zipper_fit(curve)
        kb = koebe_check(m, grid)
        dr = derivative_ratio_check(m, z1, z2)
        ok &= kb["passed"] and dr["passed"]
        parts.append(f"{name} {'ok' if kb['passed'] and dr['passed'] else 'bad'}")
    zi = validation_grid(500, 0.9)
    ident = float(np.abs(eval_map(maps["circle"], zi) - zi).max())
    bad = maps["ellipse"].drop_stage(0)
    control = not (koebe_check(bad, grid)["passed"] and derivative_ratio_check(bad, z1, z2)["passed"])
    ok &= ident <= 2e-2 and control
    report(7, ok, f"identity err {ident:.2e}; {', '.join(parts)}; negative control fails: {control}")


def _thm47(curve, t):
    m = zipper_fit(curve)
    coarse = lemma_constants_report(m, t, constants_grid(8, 32))
    fine = lemma_constants_report(m, t, constants_grid(16, 64))
    change = max(max(a, b) / min(a, b) for a, b in ((coarse.M_hat, fine.M_hat), (coarse.N_hat, fine.N_hat)))
    rep = thm47_verify(m, t, constants=fine)
    return rep, fine, change


def test_criterion_08_boundary_distortion(report):
    cusp = adaptive_cusp_sampling(generate(CurveSpec("cusp", 1024, {"order": 2.0})), (0.0, 0.0), 0.7)
    rc, fc, cc = _thm47(cusp, 0.5)
    ell = generate(CurveSpec("ellipse", 512))
    re_, fe, ce = _thm47(ell, 1.0)
    finite_k = all(b["max_ratio"] is None or math.isfinite(b["max_ratio"]) for b in re_["bins"])
    ok = (rc["passed"] and math.isfinite(fc.M_hat) and fc.N_hat > 0 and cc < 2
          and re_["passed"] and ce < 2 and finite_k)
    report(8, ok, f"cusp t=1/2 slack {rc['worst_log_slack']:.1f} M {fc.M_hat:.2f} N {fc.N_hat:.2f} "
                  f"refine x{cc:.2f}; ellipse t=1 slack {re_['worst_log_slack']:.1f} refine x{ce:.2f} "
                  f"rho(1) {re_['ratio_at_k1']:.3f}")


def test_criterion_09_psi_bound(report, koch_maps, koch_weak):
    bm = koch_maps[4]
    rep = psi_bound_check(bm, 1.0, koch_weak[4].weak_R)
    val = float(psi(2.0**-16, 1.0, 1.0))
    ok = rep["passed"] and rep["triples"] > 0 and abs(val - 2 * math.sqrt(2)) <= 1e-9
    report(9, ok, f"{rep['triples']} triples with k < 1/256, worst log slack {rep['worst_log_slack']:.2f}; "
                  f"psi(2^-16) {val:.9f}")


def test_criterion_10_arclength_cusp(report):
    c = generate(CurveSpec("cusp", 1024, {"order": 2.0}))
    r = [weak_qs_constant(arclength_param(c, n), 0.125).weak_R for n in (512, 1024)]
    change = max(r) / min(r)
    ok = all(math.isfinite(v) for v in r) and change < 2
    report(10, ok, f"R n=512 {r[0]:.4f} n=1024 {r[1]:.4f} change {change:.4f}")


def test_criterion_11_engine_equivalence(report):
    rng = np.random.default_rng(11)
    th = np.sort(rng.uniform(0, 2 * np.pi, 200))
    rad = 1 + 0.3 * np.sin(5 * th) + 0.05 * rng.normal(size=200)
    pts = np.column_stack([rad * np.cos(th), rad * np.sin(th)])
    diam_ok = np.array_equal(_kernels.prefix_diameters(pts), oracles.prefix_diameters(pts))
    curve = ClosedCurve(pts)
    bm = arclength_param(curve, 200)
    ratio_ok, thread_ok = True, True
    for e in (1.0, 0.5):
        want, wit = oracles.weak_qs_dense(bm.thetas, bm.points, e)
        one = weak_qs_constant(bm, e, threads=1)
        four = weak_qs_constant(bm, e, threads=4)
        ratio_ok &= abs(one.weak_R - want) <= 1e-12 * want and tuple(one.witness) == wit
        thread_ok &= one.to_dict() == four.to_dict()
    ok = diam_ok and ratio_ok and thread_ok
    report(11, ok, f"diameters exact {diam_ok}; ratios 1e-12 {ratio_ok}; thread-independent {thread_ok} "
                   f"(backend {_kernels.BACKEND})")
