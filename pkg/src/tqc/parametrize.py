"""Sampled circle-to-curve homeomorphisms (boundary maps)."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .curves import ClosedCurve
from .errors import CurveError
from .subdivision import SubarcTree

__all__ = [
    "BoundaryMap",
    "PLHomeo",
    "arclength_param",
    "build_boundary_map",
    "eval_map",
    "locate",
    "reparametrize",
]

TWO_PI = 2.0 * np.pi
KINDS = ("tree", "arclength", "reparametrized", "conformal")


def locate(curve: ClosedCurve, pts, chunk: int = 256):
    """Arclength position and distance of each point's projection onto ``curve``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    v = curve.vertices
    ab = np.roll(v, -1, axis=0) - v
    ll = np.einsum("ij,ij->i", ab, ab)
    cum = curve.cumulative_length()
    pos = np.empty(len(pts))
    dist = np.empty(len(pts))
    for lo in range(0, len(pts), chunk):
        p = pts[lo:lo + chunk]
        rel = p[:, None, :] - v[None, :, :]
        lam = np.clip(np.einsum("pij,ij->pi", rel, ab) / ll, 0.0, 1.0)
        q = rel - lam[..., None] * ab[None]
        d = np.hypot(q[..., 0], q[..., 1])
        k = np.argmin(d, axis=1)
        r = np.arange(len(p))
        dist[lo:lo + chunk] = d[r, k]
        pos[lo:lo + chunk] = cum[k] + lam[r, k] * np.sqrt(ll[k])
    return pos, dist


@dataclass(frozen=True, eq=False)
class BoundaryMap:
    """Samples ``theta -> point`` of an orientation-preserving map onto a curve.

    ``arcpos`` holds each sample's arclength position on ``source_curve``,
    unwrapped so that it increases with theta.
    """

    thetas: np.ndarray
    points: np.ndarray
    source_curve: ClosedCurve
    kind: str = "arclength"
    metric: str = "chordal"
    arcpos: np.ndarray = None

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        pts = np.asarray(self.points, dtype=float)
        if self.kind not in KINDS:
            raise CurveError(f"unknown map kind {self.kind!r}")
        if self.metric not in ("chordal", "arclength"):
            raise CurveError(f"metric must be 'chordal' or 'arclength', got {self.metric!r}")
        if th.ndim != 1 or pts.shape != (len(th), 2) or len(th) < 2:
            raise CurveError("thetas and points must have matching lengths (>= 2)")
        if th[0] < 0 or th[-1] >= TWO_PI or np.any(np.diff(th) <= 0):
            raise CurveError("thetas must be strictly increasing in [0, 2pi)")
        pos = self.arcpos
        if pos is None:
            pos, dist = locate(self.source_curve, pts)
            if dist.max() > 1e-9 * max(1.0, float(np.abs(pts).max())):
                raise CurveError(f"sample {int(np.argmax(dist))} is {dist.max():.3g} off the source curve")
        pos = np.asarray(pos, dtype=float)
        per = self.source_curve.perimeter()
        pos = pos[0] + np.mod(pos - pos[0], per)
        if np.any(np.diff(pos) < 0):
            raise CurveError("samples do not run around the curve in the positive direction")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "arcpos", pos)

    @property
    def n(self) -> int:
        return len(self.thetas)

    def with_points(self, points, curve: ClosedCurve | None = None) -> "BoundaryMap":
        """Same thetas, new image points (e.g. after a rigid motion or scaling)."""
        curve = curve if curve is not None else ClosedCurve(np.asarray(points, dtype=float), validate=False)
        return BoundaryMap(self.thetas, points, curve, self.kind, self.metric)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "metric": self.metric,
            "samples": [{"theta": float(t), "x": float(p[0]), "y": float(p[1])}
                        for t, p in zip(self.thetas, self.points)],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict, source_curve: ClosedCurve | None = None) -> "BoundaryMap":
        try:
            samples = d["samples"]
            th = np.array([s["theta"] for s in samples], dtype=float)
            pts = np.array([[s["x"], s["y"]] for s in samples], dtype=float)
        except (KeyError, TypeError) as exc:
            raise CurveError(f"map JSON is missing field {exc}") from exc
        curve = source_curve if source_curve is not None else ClosedCurve(pts)
        return cls(th, pts, curve, d.get("kind", "arclength"), d.get("metric", "chordal"))


def _leaf_samples(curve, a, m, theta0, theta1, interior):
    n = curve.n
    cum = curve.cumulative_length()
    per = curve.perimeter()
    s0 = cum[a % n]
    length = per if m >= n else np.mod(cum[(a + m) % n] - s0, per)
    frac = np.arange(interior + 1) / (interior + 1)
    return theta0 + frac * (theta1 - theta0), s0 + frac * length


def build_boundary_map(tree: SubarcTree, interior: int = 4, metric: str = "chordal") -> BoundaryMap:
    """Equal circle arcs matched to the tree leaves in order, arclength-linear inside each leaf."""
    if interior < 4:
        raise CurveError("need at least 4 interior samples per leaf")
    leaves = tree.leaves()
    count = len(leaves)
    curve = tree.curve
    th, pos = [], []
    for q, w in enumerate(leaves):
        a, m = tree.nodes[w]
        t, s = _leaf_samples(curve, a, m, TWO_PI * q / count, TWO_PI * (q + 1) / count, interior)
        th.append(t)
        pos.append(s)
    th = np.concatenate(th)
    pos = np.concatenate(pos)
    # rotate so that the first leaf starts at theta 0 and positions increase
    pos = pos[0] + np.mod(pos - pos[0], curve.perimeter())
    return BoundaryMap(th, curve.point_at(pos), curve, "tree", metric, arcpos=pos)


def arclength_param(curve: ClosedCurve, n: int, metric: str = "chordal") -> BoundaryMap:
    """``theta_i = 2 pi i / n`` goes to the point at arclength fraction ``i / n``."""
    if n < 16:
        raise CurveError(f"arclength_param needs n >= 16, got {n}")
    pos = curve.perimeter() * np.arange(n) / n
    return BoundaryMap(TWO_PI * np.arange(n) / n, curve.point_at(pos), curve, "arclength", metric, arcpos=pos)


@dataclass(frozen=True)
class PLHomeo:
    """Piecewise-linear increasing homeomorphism of [0, 2pi] given by its knots."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs, ys = np.asarray(self.xs, dtype=float), np.asarray(self.ys, dtype=float)
        if len(xs) != len(ys) or len(xs) < 2:
            raise CurveError("homeomorphism needs matching knot lists of length >= 2")
        if not (np.isclose(xs[0], 0) and np.isclose(ys[0], 0)
                and np.isclose(xs[-1], TWO_PI) and np.isclose(ys[-1], TWO_PI)):
            raise CurveError("homeomorphism must fix 0 and 2pi")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise CurveError("homeomorphism knots must be strictly increasing")

    @classmethod
    def from_slopes(cls, breaks, slopes) -> "PLHomeo":
        """Knots from interior break points and one slope per piece."""
        xs = np.concatenate([[0.0], np.asarray(breaks, dtype=float), [TWO_PI]])
        ys = np.concatenate([[0.0], np.cumsum(np.diff(xs) * np.asarray(slopes, dtype=float))])
        if not np.isclose(ys[-1], TWO_PI):
            raise CurveError(f"slopes integrate to {ys[-1]:.6g}, not 2pi")
        ys[-1] = TWO_PI
        return cls(tuple(xs), tuple(ys))

    @classmethod
    def from_dict(cls, d: dict) -> "PLHomeo":
        if "knots" in d:
            k = np.asarray(d["knots"], dtype=float)
            return cls(tuple(k[:, 0]), tuple(k[:, 1]))
        return cls.from_slopes(d["breaks"], d["slopes"])

    def __call__(self, theta):
        return np.interp(theta, self.xs, self.ys)

    def inverse(self) -> "PLHomeo":
        return PLHomeo(self.ys, self.xs)


def reparametrize(bmap: BoundaryMap, homeo: PLHomeo) -> BoundaryMap:
    """Move each sample from ``theta`` to ``homeo(theta)``; points are unchanged."""
    return BoundaryMap(homeo(bmap.thetas), bmap.points, bmap.source_curve, "reparametrized",
                       bmap.metric, arcpos=bmap.arcpos)


def eval_map(bmap: BoundaryMap, theta):
    """Point on the curve by linear interpolation of arclength between bracketing samples."""
    theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    per = bmap.source_curve.perimeter()
    th = np.concatenate([bmap.thetas, [bmap.thetas[0] + TWO_PI]])
    pos = np.concatenate([bmap.arcpos, [bmap.arcpos[0] + per]])
    t = np.where(theta < th[0], theta + TWO_PI, theta)
    s = np.interp(t, th, pos)
    out = bmap.source_curve.point_at(s)
    exact = np.searchsorted(bmap.thetas, theta)
    hit = (exact < bmap.n) & (bmap.thetas[np.minimum(exact, bmap.n - 1)] == theta)
    if np.ndim(out) == 2:
        out[hit] = bmap.points[exact[hit]]
    elif hit:
        out = bmap.points[int(exact)]
    return out
