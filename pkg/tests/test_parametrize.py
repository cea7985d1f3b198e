import math

import numpy as np
import pytest

from tqc.curves import ClosedCurve
from tqc.errors import CurveError
from tqc.generators import CurveSpec, generate
from tqc.parametrize import (BoundaryMap, PLHomeo, arclength_param, build_boundary_map, eval_map, locate,
                             reparametrize)
from tqc.qsmod import weak_qs_constant
from tqc.subdivision import build_tree

TWO_PI = 2 * math.pi


def test_tree_map_circle_is_near_rotation():
    c = generate(CurveSpec("circle", 1024))
    bmap = build_boundary_map(build_tree(c, 4, 3))
    p0 = complex(*bmap.points[0])
    rot = p0 * np.exp(1j * bmap.thetas)
    err = np.abs(rot - (bmap.points[:, 0] + 1j * bmap.points[:, 1]))
    assert err.max() < 1e-2


def test_tree_map_leaf_endpoints(koch4):
    tree = build_tree(koch4, 4, 2)
    bmap = build_boundary_map(tree, interior=4)
    for q, w in enumerate(tree.leaves()):
        a, _ = tree.nodes[w]
        np.testing.assert_allclose(bmap.points[5 * q], koch4.vertices[a], atol=1e-12)


def test_tree_map_cyclic_order(koch4):
    bmap = build_boundary_map(build_tree(koch4, 4, 3))
    assert np.all(np.diff(bmap.arcpos) > 0)
    assert np.all(np.diff(bmap.thetas) > 0)


def test_tree_map_needs_interior(koch4):
    with pytest.raises(CurveError):
        build_boundary_map(build_tree(koch4, 4, 2), interior=3)


def test_arclength_circle_weak_one():
    bmap = arclength_param(generate(CurveSpec("circle", 256)), 256)
    assert weak_qs_constant(bmap, 1.0).weak_R == pytest.approx(1.0, abs=1e-9)


def test_arclength_square_weak_finite(unit_square):
    bmap = arclength_param(unit_square, 128)
    R = weak_qs_constant(bmap, 1.0).weak_R
    assert 1.0 <= R <= 4.0


def test_cusp_arclength_eighth_finite():
    bmap = arclength_param(generate(CurveSpec("cusp", 256)), 256)
    assert math.isfinite(weak_qs_constant(bmap, 1 / 8).weak_R)


def test_reparametrize_identity(koch4):
    bmap = arclength_param(koch4, 128)
    out = reparametrize(bmap, PLHomeo((0.0, TWO_PI), (0.0, TWO_PI)))
    np.testing.assert_array_equal(out.thetas, bmap.thetas)
    np.testing.assert_array_equal(out.points, bmap.points)


def test_reparametrize_two_slopes(koch4):
    bmap = arclength_param(koch4, 128)
    h = PLHomeo.from_slopes([math.pi / 2], [2.0, 2.0 / 3.0])
    out = reparametrize(bmap, h)
    np.testing.assert_array_equal(out.points, bmap.points)
    th = bmap.thetas
    expect = np.where(th <= math.pi / 2, 2 * th, math.pi + (th - math.pi / 2) * 2 / 3)
    np.testing.assert_allclose(out.thetas, expect, atol=1e-12)
    assert out.kind == "reparametrized"


def test_homeo_non_monotone():
    with pytest.raises(CurveError):
        PLHomeo((0.0, 3.0, 2.0, TWO_PI), (0.0, 1.0, 2.0, TWO_PI))


def test_homeo_bad_slopes():
    with pytest.raises(CurveError, match="2pi"):
        PLHomeo.from_slopes([1.0], [1.0, 2.0])


def test_homeo_inverse_roundtrip():
    last = (TWO_PI - 0.5 - 4.5) / (TWO_PI - 4.0)
    h = PLHomeo.from_slopes([1.0, 4.0], [0.5, 1.5, last])
    x = np.linspace(0, TWO_PI, 50)
    np.testing.assert_allclose(h.inverse()(h(x)), x, atol=1e-12)


def test_eval_at_sample(koch4):
    bmap = arclength_param(koch4, 100)
    np.testing.assert_array_equal(eval_map(bmap, bmap.thetas[17]), bmap.points[17])


def test_eval_midpoint_on_polyline(koch4):
    bmap = arclength_param(koch4, 100)
    mid = 0.5 * (bmap.thetas[3] + bmap.thetas[4])
    p = eval_map(bmap, mid)
    assert koch4.distance_to(p) < 1e-12
    s, _ = locate(koch4, p)
    assert bmap.arcpos[3] < s[0] < bmap.arcpos[4]


def test_eval_periodic(koch4):
    # theta + 2pi is itself rounded, so agreement is to rounding, not bitwise
    bmap = arclength_param(koch4, 100)
    th = np.array([0.1, 2.0, 5.9])
    np.testing.assert_allclose(eval_map(bmap, th), eval_map(bmap, th + TWO_PI), atol=1e-12)
    np.testing.assert_array_equal(eval_map(bmap, bmap.thetas[5] + TWO_PI * 0), bmap.points[5])


def test_map_rejects_off_curve_points(unit_square):
    th = TWO_PI * np.arange(4) / 4
    with pytest.raises(CurveError, match="off the source curve"):
        BoundaryMap(th, unit_square.vertices + 0.1, unit_square)


def test_map_rejects_backwards(unit_square):
    th = TWO_PI * np.arange(4) / 4
    with pytest.raises(CurveError, match="positive direction"):
        BoundaryMap(th, unit_square.vertices[::-1], unit_square)


def test_map_json_roundtrip(koch4):
    bmap = arclength_param(koch4, 64, "arclength")
    back = BoundaryMap.from_dict(bmap.to_dict(), koch4)
    np.testing.assert_array_equal(back.thetas, bmap.thetas)
    np.testing.assert_array_equal(back.points, bmap.points)
    assert back.metric == "arclength"


def test_with_points_scaling(koch4):
    bmap = arclength_param(koch4, 64)
    big = bmap.with_points(2 * bmap.points, ClosedCurve(2 * koch4.vertices))
    np.testing.assert_array_equal(big.points, 2 * bmap.points)
