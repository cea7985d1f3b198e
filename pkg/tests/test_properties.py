import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from tqc import _kernels, io
from tqc.curves import ClosedCurve, arc_diameter, curve_diameter, normalize_unit_diameter, resample_arclength
from tqc.generators import CurveSpec, generate
from tqc.parametrize import PLHomeo, arclength_param
from tqc.qsmod import weak_qs_constant
from tqc.subdivision import greedy_subdivide
from tqc.turning import turning_constant

seeds = st.integers(0, 2**32 - 1)


def star(n, seed):
    rng = np.random.default_rng(seed)
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    th = th[np.concatenate([[True], np.diff(th) > 1e-6])]
    r = rng.uniform(0.3, 1.0, len(th))
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def similarity(pts, s, rot, dx, dy):
    c, sn = math.cos(rot), math.sin(rot)
    return s * pts @ np.array([[c, sn], [-sn, c]]) + [dx, dy]


motions = st.tuples(st.floats(0.1, 10), st.floats(0, 2 * math.pi), st.floats(-5, 5), st.floats(-5, 5))


@given(st.integers(3, 60), seeds)
def test_prefix_diameters_match_brute_force(n, seed):
    pts = star(n, seed)
    assert np.allclose(_kernels.prefix_diameters(pts), oracles.prefix_diameters(pts), rtol=1e-12, atol=0)


@given(st.integers(3, 60), seeds, motions)
def test_diameter_follows_similarity(n, seed, motion):
    c = ClosedCurve(star(n, seed))
    moved = ClosedCurve(similarity(c.vertices, *motion))
    assert curve_diameter(c) == pytest.approx(oracles.diameter(c.vertices), rel=1e-12)
    assert curve_diameter(moved) == pytest.approx(motion[0] * curve_diameter(c), rel=1e-9)


@given(seeds, motions, st.sampled_from([0.25, 0.5, 1.0]))
def test_turning_scales_as_power(seed, motion, t):
    c = ClosedCurve(star(24, seed))
    moved = ClosedCurve(similarity(c.vertices, *motion))
    s = motion[0]
    a, b = turning_constant(c, t), turning_constant(moved, t)
    assert b.C_star == pytest.approx(a.C_star * s ** (1 - t), rel=1e-9)


@given(seeds, motions, st.sampled_from([0.3, 0.7, 1.0]), st.sampled_from(["chordal", "arclength"]))
def test_weak_constant_similarity(seed, motion, e, metric):
    c = ClosedCurve(star(40, seed))
    bm = arclength_param(c, 36, metric)
    moved_pts = similarity(bm.points, *motion)
    moved = bm.with_points(moved_pts, ClosedCurve(similarity(c.vertices, *motion)))
    a, b = weak_qs_constant(bm, e), weak_qs_constant(moved, e)
    assert b.weak_R == pytest.approx(a.weak_R * motion[0] ** (1 - e), rel=1e-9)


@given(st.lists(st.floats(0.05, 5.0), min_size=2, max_size=8), st.lists(st.floats(0, 2 * math.pi), min_size=1,
                                                                        max_size=30))
def test_homeo_inverse(weights, probes):
    w = np.asarray(weights)
    xs = np.linspace(0, 2 * math.pi, len(w) + 1)
    ys = np.concatenate([[0.0], np.cumsum(w) / w.sum() * 2 * math.pi])
    h = PLHomeo(tuple(xs), tuple(ys))
    x = np.asarray(probes)
    assert np.allclose(h.inverse()(h(x)), x, atol=1e-12)
    assert np.all(np.diff(h(np.sort(x))) >= 0)


@given(seeds, st.floats(0.02, 0.3), st.sampled_from([0.05, 0.2, 0.4]))
def test_greedy_cover_on_perturbed_curves(seed, amplitude, eps):
    c = generate(CurveSpec("perturbed", 128, {"seed": seed, "amplitude": amplitude, "modes": 6}))
    c, _ = normalize_unit_diameter(c)
    need = int(math.ceil(8.0 * c.perimeter() / eps)) + 1
    c, _ = normalize_unit_diameter(resample_arclength(c, max(need, c.n)))
    pieces = greedy_subdivide(c, eps)
    assert sum(p.edge_count(c.n) for p in pieces) == c.n
    for a, b in zip(pieces, pieces[1:] + pieces[:1]):
        assert a.end == b.start
    for p in pieces:
        d = arc_diameter(c, p)
        assert eps / 8 - 1e-12 <= d <= eps + 1e-12


@given(st.integers(3, 40), seeds)
def test_curve_json_round_trip(n, seed):
    c = ClosedCurve(star(n, seed))
    again = io.curve_from_dict(json.loads(io.dumps(io.curve_to_dict(c))))
    assert np.array_equal(again.vertices, c.vertices)
