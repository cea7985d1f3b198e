import os
import subprocess
import sys

import numpy as np
import pytest
import shapely

import oracles
from tqc import _kernels, _pykernels
from tqc.conformal.checks import validation_grid

needs_cython = pytest.mark.skipif(_kernels.BACKEND != "cython", reason="compiled backend not built")


def cloud(n, seed):
    return np.random.default_rng(seed).normal(size=(n, 2))


def wobbly(n, seed):
    rng = np.random.default_rng(seed)
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = 1 + 0.3 * np.sin(3 * th + rng.uniform(0, 6))
    return th, np.column_stack([r * np.cos(th), r * np.sin(th)])


def arc_oracle(v, i, j):
    return oracles.diameter(oracles.arc_vertices(v, i, j))


def star(n, seed):
    # random radii over sorted angles: always a simple polygon
    rng = np.random.default_rng(seed)
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = rng.uniform(0.2, 1.0, n)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def spiral(n):
    # winds outward, then back in along a track between its own turns
    t = np.linspace(np.pi, 6 * np.pi, n)
    out = np.column_stack([t * np.cos(t), t * np.sin(t)])
    back = np.column_stack([(t - np.pi) * np.cos(t), (t - np.pi) * np.sin(t)])[::-1]
    return np.concatenate([out, back])


@pytest.mark.parametrize("pts", [star(50, 0), star(60, 1), spiral(40)], ids=["star0", "star1", "spiral"])
def test_prefix_diameters(backend, pts):
    assert shapely.LineString(pts).is_simple
    assert np.allclose(backend.prefix_diameters(pts), oracles.prefix_diameters(pts), rtol=1e-12, atol=0)


def test_prefix_diameters_python_accepts_any_points():
    pts = cloud(50, 0)
    assert np.allclose(_pykernels.prefix_diameters(pts), oracles.prefix_diameters(pts), rtol=1e-12, atol=0)


def test_point_set_diameter(backend):
    for pts in [cloud(80, 2), np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 0.0]]),
                np.array([[3.0, 4.0], [3.0, 4.0]])]:
        assert backend.point_set_diameter(pts) == pytest.approx(oracles.diameter(pts), rel=1e-12, abs=0)


def test_point_polyline_distance(backend):
    verts = cloud(12, 3)
    pts = cloud(30, 4)
    ring = shapely.LinearRing(verts)
    want = [ring.distance(shapely.Point(p)) for p in pts]
    assert np.allclose(backend.point_polyline_distance(pts, verts), want, rtol=1e-12, atol=1e-15)


def test_range_diameter_table(backend):
    v = cloud(14, 5)
    table = backend.range_diameter_table(v)
    n = len(v)
    for L in range(1, n):
        for i in range(n):
            assert table[L, i] == pytest.approx(arc_oracle(v, i, (i + L) % n), rel=1e-12)


def test_smaller_arc_diameters(backend):
    v = cloud(12, 6)
    out = backend.smaller_arc_diameters(v)
    n = len(v)
    assert np.array_equal(out, out.T)
    for i in range(n):
        for j in range(n):
            if i != j:
                want = min(arc_oracle(v, i, j), arc_oracle(v, j, i))
                assert out[i, j] == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("metric", [0, 1])
def test_weak_scan_matches_brute_force(backend, metric):
    th, pts = wobbly(30, 7)
    best, wit, triples, excluded = _kernels.weak_qs_scan(th, pts, 0.7, metric, backend=backend)
    want, want_wit = oracles.weak_qs(th, pts, 0.7, ["chordal", "arclength"][metric])
    assert best == pytest.approx(want, rel=1e-12)
    assert tuple(wit) == tuple(want_wit)


def test_bins_scan_matches_brute_force(backend):
    th, pts = wobbly(28, 8)
    edges = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0])
    mx, wits, counts = _kernels.qs_bins_scan(th, pts, 0.5, edges, 0, backend=backend)
    want, want_counts = oracles.qs_bins(th, pts, 0.5, edges, "chordal")
    assert np.array_equal(counts, want_counts)
    for j in range(len(edges) - 1):
        if want[j] is None:
            assert wits[j][0] < 0
        else:
            assert mx[j] == pytest.approx(want[j], rel=1e-12)


@needs_cython
def test_scans_identical_across_backends():
    from tqc import _ckernels
    th, pts = wobbly(90, 9)
    edges = np.concatenate([[0.0], 2.0 ** (np.arange(-12, 17) / 4)])
    for fn, args in [
        (_kernels.weak_qs_scan, (th, pts, 0.6, 0)),
        (_kernels.qs_bins_scan, (th, pts, 0.6, edges, 1)),
        (_kernels.m_condition_scan, (th, pts, 0.8, 1e-2, 0)),
        (_kernels.psi_scan, (th, pts, 0.8, 2.0, 1 / 16, 0)),
    ]:
        a = fn(*args, backend=_pykernels)
        b = fn(*args, backend=_ckernels)
        for x, y in zip(a, b):
            np.testing.assert_allclose(np.asarray(x, dtype=float), np.asarray(y, dtype=float), rtol=1e-12)
        # witnesses are exact
        assert np.array_equal(np.asarray(a[1]), np.asarray(b[1]))


@pytest.mark.parametrize("fn,args", [
    (_kernels.weak_qs_scan, (0.6, 0)),
    (_kernels.m_condition_scan, (0.8, 1e-2, 0)),
    (_kernels.psi_scan, (0.8, 2.0, 1 / 16, 0)),
])
def test_scans_do_not_depend_on_threads(fn, args):
    th, pts = wobbly(120, 10)
    one = fn(th, pts, *args, threads=1)
    four = fn(th, pts, *args, threads=4)
    assert one == four


def test_bins_do_not_depend_on_threads():
    th, pts = wobbly(120, 11)
    edges = np.concatenate([[0.0], 2.0 ** (np.arange(-8, 17) / 4)])
    one = _kernels.qs_bins_scan(th, pts, 0.7, edges, 0, threads=1)
    four = _kernels.qs_bins_scan(th, pts, 0.7, edges, 0, threads=4)
    for x, y in zip(one, four):
        assert np.array_equal(x, y)


def stages(m):
    return (m.z0, m.z1, m.inv_b, m.c, m.scale, m.inv_zeta)


def test_zipper_round_trip(backend, ellipse_map):
    z = validation_grid(300, 0.95)
    wc = ellipse_map.w_center
    q = np.exp(-1j * ellipse_map.rotation) * z
    w = (wc - q * np.conj(wc)) / (1 - q)
    dom = backend.zipper_inverse(w, *stages(ellipse_map))
    back = backend.zipper_forward(dom, *stages(ellipse_map))
    assert np.allclose(back, w, rtol=1e-8, atol=1e-10)


@needs_cython
def test_zipper_identical_across_backends(ellipse_map):
    from tqc import _ckernels
    z = validation_grid(300, 0.99)
    w = 1j * (1 + z) / (1 - z)
    a = _pykernels.zipper_inverse(w, *stages(ellipse_map))
    b = _ckernels.zipper_inverse(w, *stages(ellipse_map))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    pts = ellipse_map.domain_curve.z[5:40] * 0.5 + 0.5 * ellipse_map.center_image
    assert np.allclose(_pykernels.zipper_forward(pts, *stages(ellipse_map)),
                       _ckernels.zipper_forward(pts, *stages(ellipse_map)), rtol=1e-12, atol=1e-14)


def test_zipper_inverse_threads(ellipse_map):
    z = validation_grid(5000, 0.99)
    w = 1j * (1 + z) / (1 - z)
    one = _kernels.zipper_inverse(w, *stages(ellipse_map), threads=1)
    four = _kernels.zipper_inverse(w, *stages(ellipse_map), threads=4)
    assert np.array_equal(one, four)


def test_default_threads(monkeypatch):
    monkeypatch.setenv("TQC_THREADS", "3")
    assert _kernels.default_threads() == 3
    monkeypatch.setenv("TQC_THREADS", "junk")
    assert _kernels.default_threads() == 1
    monkeypatch.delenv("TQC_THREADS")
    assert _kernels.default_threads() == 1


def test_pure_python_switch():
    env = dict(os.environ, TQC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from tqc import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
