"""Closed polylines in the plane and cyclic sub-arc indexing.

A :class:`ClosedCurve` is an immutable, validated simple polygon.  Sub-arcs are
addressed by :class:`ArcSpan`, a cyclic range of vertex indices; a span whose
``start`` equals its ``end`` denotes the whole curve.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import shapely

from . import _kernels
from .errors import CurveError

__all__ = [
    "ArcSpan",
    "ClosedCurve",
    "arc_diameter",
    "arc_length",
    "curve_diameter",
    "ensure_ccw",
    "normalize_unit_diameter",
    "resample_arclength",
    "signed_area",
    "smaller_subarc",
]


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _as_vertices(vertices) -> np.ndarray:
    v = np.array(vertices, dtype=float)
    if v.ndim == 2 and v.shape[1] == 2:
        return v
    if v.ndim == 1 and np.iscomplexobj(np.asarray(vertices)):
        z = np.asarray(vertices, dtype=complex)
        return np.column_stack([z.real, z.imag])
    raise CurveError(f"vertices must have shape (n, 2), got {v.shape}")


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Oriented simple closed polyline.

    ``orientation`` is inferred from the signed area when omitted; when given it
    must agree with it.  Validation (finite coordinates, no repeated consecutive
    vertices, no self-intersections) runs once, at construction.
    """

    vertices: np.ndarray
    orientation: str = ""
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        v = _as_vertices(self.vertices)
        if len(v) < 3:
            raise CurveError(f"a closed curve needs at least 3 vertices, got {len(v)}")
        if not np.all(np.isfinite(v)):
            raise CurveError("vertex coordinates must be finite")
        v = np.ascontiguousarray(v)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        area = signed_area(v)
        if area == 0.0:
            raise CurveError("degenerate polygon: zero signed area")
        actual = "ccw" if area > 0 else "cw"
        if self.orientation and self.orientation not in ("ccw", "cw"):
            raise CurveError(f"orientation must be 'ccw' or 'cw', got {self.orientation!r}")
        if self.orientation and self.orientation != actual:
            raise CurveError(
                f"orientation {self.orientation!r} disagrees with signed area ({actual})"
            )
        object.__setattr__(self, "orientation", actual)
        if self.validate:
            step = np.roll(v, -1, axis=0) - v
            if np.any((step[:, 0] == 0.0) & (step[:, 1] == 0.0)):
                raise CurveError("consecutive vertices coincide")
            if not shapely.LinearRing(v).is_simple:
                raise CurveError("polyline is not simple (edges cross)")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def z(self) -> np.ndarray:
        """Vertices as complex numbers."""
        return self.vertices[:, 0] + 1j * self.vertices[:, 1]

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def edge_lengths(self) -> np.ndarray:
        return np.hypot(*(np.roll(self.vertices, -1, axis=0) - self.vertices).T)

    def cumulative_length(self) -> np.ndarray:
        """Arclength at each vertex, starting from 0 at vertex 0 (length n+1)."""
        return np.concatenate([[0.0], np.cumsum(self.edge_lengths())])

    def perimeter(self) -> float:
        return float(self.edge_lengths().sum())

    def scaled(self, s: float) -> "ClosedCurve":
        return ClosedCurve(self.vertices * s, validate=False)

    def translated(self, dx: float, dy: float) -> "ClosedCurve":
        return ClosedCurve(self.vertices + np.array([dx, dy]), validate=False)

    def point_at(self, s) -> np.ndarray:
        """Point(s) at arclength ``s`` measured from vertex 0 (periodic)."""
        cum = self.cumulative_length()
        total = cum[-1]
        s = np.mod(np.asarray(s, dtype=float), total)
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, self.n - 1)
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        seg = cum[k + 1] - cum[k]
        lam = (s - cum[k]) / seg
        return v[k] + lam[..., None] * (w[k] - v[k])

    def distance_to(self, p) -> np.ndarray:
        """Euclidean distance from point(s) ``p`` (shape (..., 2)) to the polyline."""
        p = np.asarray(p, dtype=float)
        flat = p.reshape(-1, 2)
        out = _kernels.point_polyline_distance(flat, self.vertices)
        return out.reshape(p.shape[:-1])


@dataclass(frozen=True)
class ArcSpan:
    """Cyclic vertex range ``start .. end`` traversed in ``direction``.

    Endpoints are included.  ``start == end`` means the full closed curve.
    """

    start: int
    end: int
    direction: str = "positive"

    def __post_init__(self):
        if self.direction not in ("positive", "negative"):
            raise CurveError(f"direction must be 'positive' or 'negative', got {self.direction!r}")

    def edge_count(self, n: int) -> int:
        if self.start == self.end:
            return n
        if self.direction == "positive":
            return (self.end - self.start) % n
        return (self.start - self.end) % n

    def indices(self, n: int) -> np.ndarray:
        """Vertex indices in traversal order, endpoints included."""
        m = self.edge_count(n)
        if m == n:
            return (self.start + np.arange(n)) % n
        step = 1 if self.direction == "positive" else -1
        return (self.start + step * np.arange(m + 1)) % n

    def positive(self, n: int) -> "ArcSpan":
        """The same vertex set written in the positive direction."""
        if self.direction == "positive":
            return self
        return ArcSpan(self.end, self.start, "positive")

    def contains(self, i: int, n: int) -> bool:
        p = self.positive(n)
        if p.start == p.end:
            return True
        return (i - p.start) % n <= (p.end - p.start) % n


def _validate_index(curve: ClosedCurve, i: int) -> int:
    if not 0 <= int(i) < curve.n:
        raise CurveError(f"vertex index {i} out of range [0, {curve.n})")
    return int(i)


def ensure_ccw(curve) -> ClosedCurve:
    """Return ``curve`` with counter-clockwise orientation, keeping vertex 0 first."""
    if not isinstance(curve, ClosedCurve):
        curve = ClosedCurve(curve)
    if curve.orientation == "ccw":
        return curve
    v = curve.vertices
    return ClosedCurve(np.concatenate([v[:1], v[:0:-1]]), validate=False)


def curve_diameter(curve: ClosedCurve) -> float:
    return arc_diameter(curve, ArcSpan(0, 0))


def arc_diameter(curve: ClosedCurve, span: ArcSpan) -> float:
    """Diameter of the span's vertex set (endpoints included)."""
    idx = span.positive(curve.n).indices(curve.n)
    return float(_kernels.prefix_diameters(curve.vertices[idx])[-1])


def arc_length(curve: ClosedCurve, span: ArcSpan) -> float:
    p = span.positive(curve.n)
    lengths = curve.edge_lengths()
    m = p.edge_count(curve.n)
    return float(lengths[(p.start + np.arange(m)) % curve.n].sum())


def smaller_subarc(curve: ClosedCurve, i: int, j: int) -> ArcSpan:
    """The sub-arc between vertices ``i`` and ``j`` with the smaller diameter.

    Ties go to the arc with fewer vertices, then to the arc traversed positively
    from ``min(i, j)``.
    """
    i, j = _validate_index(curve, i), _validate_index(curve, j)
    if i == j:
        raise CurveError("smaller_subarc needs two distinct vertices")
    lo, hi = min(i, j), max(i, j)
    first = ArcSpan(lo, hi, "positive")
    second = ArcSpan(hi, lo, "positive")
    d1, d2 = arc_diameter(curve, first), arc_diameter(curve, second)
    if d1 != d2:
        return first if d1 < d2 else second
    n1, n2 = first.edge_count(curve.n), second.edge_count(curve.n)
    if n1 != n2:
        return first if n1 < n2 else second
    return first


def normalize_unit_diameter(curve: ClosedCurve) -> tuple[ClosedCurve, float]:
    d = curve_diameter(curve)
    if not d > 0:
        raise CurveError("cannot normalize a curve of zero diameter")
    scale = 1.0 / d
    return ClosedCurve(curve.vertices * scale, validate=False), scale


def resample_arclength(curve: ClosedCurve, n: int) -> ClosedCurve:
    """``n`` points at equal arclength spacing, starting at vertex 0."""
    if n < 3:
        raise CurveError(f"resample needs n >= 3, got {n}")
    total = curve.perimeter()
    pts = curve.point_at(np.arange(n) * (total / n))
    return ClosedCurve(pts, validate=False)


def is_normalized(curve: ClosedCurve, rtol: float = 1e-9) -> bool:
    return abs(curve_diameter(curve) - 1.0) <= rtol


def from_points(points: Iterable[Sequence[float]]) -> ClosedCurve:
    return ClosedCurve(np.asarray(list(points), dtype=float))
