"""Test families of Jordan curves with known or designed turning exponent."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import ClosedCurve, signed_area
from .errors import CurveError

__all__ = ["CurveSpec", "adaptive_cusp_sampling", "generate", "koch_vertices"]

KINDS = ("circle", "ellipse", "koch", "cusp", "perturbed")

_DEFAULTS = {
    "circle": {"radius": 1.0},
    "ellipse": {"a": 2.0, "b": 1.0},
    "koch": {"level": 3},
    "cusp": {"order": 2.0},
    "perturbed": {"seed": 0, "amplitude": 0.1, "modes": 8},
}


@dataclass(frozen=True)
class CurveSpec:
    kind: str
    n: int = 512
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CurveError(f"unknown curve kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 16:
            raise CurveError(f"n must be >= 16, got {self.n}")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise CurveError(f"unknown parameter(s) for {self.kind}: {sorted(unknown)}")
        p = self.param_values()
        if self.kind == "koch" and not (0 <= int(p["level"]) <= 7):
            raise CurveError(f"koch level must be in [0, 7], got {p['level']}")
        if self.kind == "cusp" and not (1.0 <= float(p["order"]) <= 6.0):
            raise CurveError(f"cusp order must be in [1, 6], got {p['order']}")
        if self.kind == "ellipse" and not (p["a"] > 0 and p["b"] > 0):
            raise CurveError("ellipse semi-axes must be positive")
        if self.kind == "circle" and not p["radius"] > 0:
            raise CurveError("circle radius must be positive")

    def param_values(self) -> dict:
        out = dict(_DEFAULTS[self.kind])
        out.update(self.params)
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "params": self.param_values()}


def _circle(n, radius):
    ang = 2.0 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(ang), np.sin(ang)])


def _ellipse(n, a, b):
    ang = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([a * np.cos(ang), b * np.sin(ang)])


def koch_vertices(level: int) -> np.ndarray:
    """Snowflake polygon after ``level`` subdivisions, CCW, 3*4**level vertices."""
    h = np.sqrt(3.0) / 2.0
    v = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, h]])
    # a bump on edge p->q points to the right of the direction (outward for CCW)
    rot = np.array([[0.5, -h], [h, 0.5]])
    for _ in range(level):
        p = v
        q = np.roll(v, -1, axis=0)
        d = (q - p) / 3.0
        a = p + d
        b = p + 2.0 * d
        apex = a + d @ rot
        v = np.stack([p, a, apex, b], axis=1).reshape(-1, 2)
    return v


def _cusp(n, s):
    # lower branch (x, x^s) for x = 0..1, closing segment, upper branch (x, 2x^s) back
    k = max(1, (n - 1) // 5)
    if (n - 1 - k) % 2:
        k += 1
    m = (n - 1 - k) // 2
    if m < 4:
        raise CurveError(f"cusp needs n >= 16, got {n}")
    x = np.arange(m + 1) / m
    lower = np.column_stack([x, x**s])
    seg_y = 1.0 + np.arange(1, k + 1) / (k + 1)
    seg = np.column_stack([np.ones(k), seg_y])
    xu = x[m:0:-1]
    upper = np.column_stack([xu, 2.0 * xu**s])
    return np.concatenate([lower, seg, upper])


def _perturbed(n, seed, amplitude, modes):
    rng = np.random.default_rng(int(seed))
    k = np.arange(1, int(modes) + 1)
    a = rng.standard_normal(len(k)) / k
    b = rng.standard_normal(len(k)) / k
    ang = 2.0 * np.pi * np.arange(n) / n
    wave = np.cos(np.outer(ang, k)) @ a + np.sin(np.outer(ang, k)) @ b
    scale = np.abs(wave).max()
    r = 1.0 + amplitude * wave / (scale if scale > 0 else 1.0)
    if r.min() <= 0:
        raise CurveError(
            f"perturbation amplitude {amplitude} makes the radius non-positive "
            f"(min {r.min():.3g}); the curve would self-intersect"
        )
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def generate(spec: CurveSpec) -> ClosedCurve:
    """Build the curve described by ``spec`` (always simple and CCW)."""
    p = spec.param_values()
    if spec.kind == "circle":
        v = _circle(spec.n, float(p["radius"]))
    elif spec.kind == "ellipse":
        v = _ellipse(spec.n, float(p["a"]), float(p["b"]))
    elif spec.kind == "koch":
        v = koch_vertices(int(p["level"]))
    elif spec.kind == "cusp":
        v = _cusp(spec.n, float(p["order"]))
    else:
        v = _perturbed(spec.n, p["seed"], float(p["amplitude"]), int(p["modes"]))
    if signed_area(v) < 0:
        v = np.concatenate([v[:1], v[:0:-1]])
    return ClosedCurve(v)


def _arclength_of(curve: ClosedCurve, focus) -> float:
    v = curve.vertices
    w = np.roll(v, -1, axis=0)
    ab = w - v
    ll = np.einsum("ij,ij->i", ab, ab)
    lam = np.clip(np.einsum("ij,ij->i", focus - v, ab) / ll, 0.0, 1.0)
    q = v + lam[:, None] * ab
    d = np.hypot(q[:, 0] - focus[0], q[:, 1] - focus[1])
    k = int(np.argmin(d))
    if d[k] > 1e-9:
        raise CurveError(f"focus {tuple(focus)} is {d[k]:.3g} away from the curve")
    cum = curve.cumulative_length()
    return float(cum[k] + lam[k] * np.sqrt(ll[k]))


def adaptive_cusp_sampling(curve: ClosedCurve, focus, ratio: float) -> ClosedCurve:
    """Resample with edge lengths shrinking by ``ratio`` toward ``focus``.

    The focus becomes vertex 0.  Away from the focus the spacing is uniform;
    inside the graded zone successive edges shrink geometrically until they
    reach about 1e-6 of the uniform spacing.  The vertex count is preserved.
    """
    if not 0.0 < ratio < 1.0:
        raise CurveError(f"ratio must lie in (0, 1), got {ratio}")
    focus = np.asarray(focus, dtype=float)
    s0 = _arclength_of(curve, focus)
    total = curve.perimeter()
    n = curve.n
    levels = int(np.ceil(np.log(1e-6) / np.log(ratio)))
    levels = min(levels, (n - 1) // 4)
    uniform = n - 1 - 2 * levels
    # gaps h r**L, ..., h r next to the focus on each side, h elsewhere
    geo = ratio ** np.arange(levels, 0, -1)
    h = total / (uniform + 1 + 2.0 * geo.sum())
    graded = h * np.cumsum(geo)
    reach = graded[-1]
    far = reach + h * np.arange(1, uniform + 1)
    # offsets measured positively from the focus, in traversal order
    offsets = np.concatenate([[0.0], graded, far, total - graded[::-1]])
    pts = curve.point_at(s0 + offsets)
    pts[0] = focus
    return ClosedCurve(pts)
