import math

import numpy as np
import pytest

from oracles import diameter
from tqc.curves import (ArcSpan, ClosedCurve, arc_diameter, arc_length, curve_diameter, ensure_ccw,
                        is_normalized, normalize_unit_diameter, resample_arclength, smaller_subarc)
from tqc.errors import CurveError
from tqc.generators import CurveSpec, generate


def test_orientation_inferred(unit_square):
    assert unit_square.orientation == "ccw"
    cw = ClosedCurve(unit_square.vertices[::-1])
    assert cw.orientation == "cw"


def test_orientation_mismatch_rejected(unit_square):
    with pytest.raises(CurveError, match="disagrees"):
        ClosedCurve(unit_square.vertices, "cw")


def test_ensure_ccw_keeps_ccw(unit_square):
    assert ensure_ccw(unit_square) is unit_square


def test_ensure_ccw_reverses_cw(unit_square):
    cw = ClosedCurve(unit_square.vertices[[0, 3, 2, 1]])
    out = ensure_ccw(cw)
    assert out.orientation == "ccw"
    np.testing.assert_array_equal(out.vertices, unit_square.vertices)


def test_collinear_rejected():
    with pytest.raises(CurveError, match="zero signed area"):
        ClosedCurve([[0, 0], [1, 0], [2, 0]])


def test_self_intersection_rejected():
    with pytest.raises(CurveError, match="not simple"):
        ClosedCurve([[0, 0], [2, 2], [2, 0], [0, 1]])


def test_repeated_vertex_rejected():
    with pytest.raises(CurveError, match="coincide"):
        ClosedCurve([[0, 0], [1, 0], [1, 0], [0, 1]])


def test_circle_diameter(circle512):
    assert curve_diameter(circle512) == pytest.approx(2.0, abs=1e-4)


def test_square_diameter(unit_square):
    assert curve_diameter(unit_square) == pytest.approx(math.sqrt(2.0), abs=1e-15)


def test_diameter_scales(circle512):
    assert curve_diameter(circle512.scaled(3.5)) == pytest.approx(3.5 * curve_diameter(circle512), rel=1e-14)


def test_smaller_subarc_short_side():
    c = generate(CurveSpec("circle", 360))
    span = smaller_subarc(c, 0, 10)
    assert span.edge_count(360) == 10
    assert len(span.indices(360)) == 11


def test_smaller_subarc_antipodal_tiebreak():
    c = generate(CurveSpec("circle", 360))
    first = smaller_subarc(c, 0, 180)
    second = smaller_subarc(c, 180, 0)
    assert first == second


def test_smaller_subarc_koch_adjacent():
    c = generate(CurveSpec("koch", params={"level": 3}))
    span = smaller_subarc(c, 5, 6)
    assert span.edge_count(c.n) == 1
    assert arc_diameter(c, span) == pytest.approx(diameter(c.vertices[[5, 6]]), abs=0)


def test_arc_diameter_single_edge(unit_square):
    assert arc_diameter(unit_square, ArcSpan(1, 2)) == 1.0


def test_arc_diameter_half_circle(circle512):
    assert arc_diameter(circle512, ArcSpan(0, 256)) == pytest.approx(2.0, abs=1e-4)


def test_arc_diameter_matches_brute():
    c = generate(CurveSpec("perturbed", 60, {"seed": 3}))
    rng = np.random.default_rng(1)
    for _ in range(20):
        i, j = rng.choice(60, 2, replace=False)
        span = ArcSpan(int(i), int(j))
        assert arc_diameter(c, span) == diameter(c.vertices[span.indices(60)])


def test_negative_span_same_vertices():
    s = ArcSpan(5, 2, "negative")
    assert sorted(s.indices(10)) == sorted(s.positive(10).indices(10))


def test_arc_length_square(unit_square):
    assert arc_length(unit_square, ArcSpan(0, 2)) == 2.0


@pytest.mark.parametrize("curve,scale", [
    (generate(CurveSpec("circle", 512)), 0.5),
    (ClosedCurve([[0, 0], [1, 0], [1, 1], [0, 1]]), 1 / math.sqrt(2)),
])
def test_normalize(curve, scale):
    out, s = normalize_unit_diameter(curve)
    assert s == pytest.approx(scale, rel=1e-4)
    assert is_normalized(out)


def test_normalize_idempotent(circle512):
    once, _ = normalize_unit_diameter(circle512)
    _, s = normalize_unit_diameter(once)
    assert s == pytest.approx(1.0, abs=1e-12)


def test_resample_square_midpoints(unit_square):
    out = resample_arclength(unit_square, 8)
    assert any(np.allclose(p, [0.5, 0.0]) for p in out.vertices)
    assert any(np.allclose(p, [1.0, 0.5]) for p in out.vertices)


def test_resample_circle_doubling():
    c = generate(CurveSpec("circle", 360))
    out = resample_arclength(c, 720)
    assert out.n == 720
    assert curve_diameter(out) == pytest.approx(curve_diameter(c), abs=1e-6)


def test_resample_preserves_length():
    c = generate(CurveSpec("perturbed", 100, {"seed": 5}))
    out = resample_arclength(c, 400)
    assert out.perimeter() == pytest.approx(c.perimeter(), rel=1e-3)


def test_point_at_periodic(circle512):
    s = np.array([0.3, 1.7])
    np.testing.assert_allclose(circle512.point_at(s), circle512.point_at(s + circle512.perimeter()), atol=1e-12)
