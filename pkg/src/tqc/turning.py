"""Bounded-turning measurements: turning constant C*(t) and exponent fits."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .curves import ClosedCurve, ensure_ccw
from .errors import CurveError

__all__ = [
    "PairFilter",
    "TurningReport",
    "exponent_fit",
    "pair_diameters",
    "prefix_diameters",
    "turning_constant",
]

EXACT_LIMIT = 4096
SAMPLED_ANCHORS = 1024


@dataclass
class TurningReport:
    t: Optional[float]
    C_star: Optional[float]
    witness: Optional[tuple]
    pair_count: int
    fit_t: Optional[float] = None
    fit_C: Optional[float] = None
    residual: Optional[float] = None
    strategy: str = "exact"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = None if self.witness is None else [int(v) for v in self.witness]
        d["pairs"] = d.pop("pair_count")
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@dataclass(frozen=True)
class PairFilter:
    """Admits vertex pairs for fitting.

    ``straddle``: the smaller sub-arc must contain this vertex strictly inside.
    ``max_chord`` / ``min_chord``: bounds on ``|v_i - v_j|``.
    """

    straddle: Optional[int] = None
    max_chord: Optional[float] = None
    min_chord: float = 0.0

    @classmethod
    def from_dict(cls, d: dict) -> "PairFilter":
        return cls(**d)


def prefix_diameters(curve: ClosedCurve, i: int) -> np.ndarray:
    """Entry ``m`` is the diameter of vertices ``i, i+1, ..., i+m`` (cyclic)."""
    n = curve.n
    if not 0 <= int(i) < n:
        raise CurveError(f"vertex index {i} out of range [0, {n})")
    return _kernels.prefix_diameters(np.roll(curve.vertices, -int(i), axis=0))


def _anchors(n, seed):
    if n <= EXACT_LIMIT:
        return np.arange(n), "exact"
    stride = max(1, n // SAMPLED_ANCHORS)
    rng = np.random.default_rng(seed)
    extra = rng.choice(n, size=SAMPLED_ANCHORS, replace=False)
    return np.union1d(np.arange(0, n, stride), extra), "sampled"


def pair_diameters(curve: ClosedCurve, seed: int = 0):
    """Smaller-sub-arc diameters and chords for the scanned vertex pairs.

    Returns ``(i, j, diam, chord, inside, strategy)`` with ``i < j``.  Up to
    4096 vertices every pair is used; beyond that, pairs among a stratified
    anchor set (every ``n // 1024``-th vertex plus 1024 seeded random ones).
    ``inside`` says whether the smaller arc is the one running from ``i`` up to ``j``.
    """
    v = curve.vertices
    n = curve.n
    anchors, strategy = _anchors(n, seed)
    if strategy == "exact":
        table = _kernels.range_diameter_table(v)
        ii, jj = np.triu_indices(n, k=1)
        forward = table[jj - ii, ii]
        backward = table[n - (jj - ii), jj]
    else:
        rows = {int(a): prefix_diameters(curve, int(a)) for a in anchors}
        ii, jj = np.triu_indices(len(anchors), k=1)
        ii, jj = anchors[ii], anchors[jj]
        forward = np.array([rows[int(a)][b - a] for a, b in zip(ii, jj)])
        backward = np.array([rows[int(b)][n - (b - a)] for a, b in zip(ii, jj)])
    diam = np.minimum(forward, backward)
    # tie-break as in smaller_subarc: fewer vertices, then the positive arc from i
    inside = (forward < backward) | ((forward == backward) & (jj - ii <= n - (jj - ii)))
    chord = np.hypot(v[ii, 0] - v[jj, 0], v[ii, 1] - v[jj, 1])
    return ii, jj, diam, chord, inside, strategy


def turning_constant(curve: ClosedCurve, t: float, seed: int = 0) -> TurningReport:
    """``C*(t)``: max over vertex pairs of smaller-arc diameter / chord**t."""
    if not 0.0 < t <= 1.0:
        raise CurveError(f"t must lie in (0, 1], got {t}")
    curve = ensure_ccw(curve)
    ii, jj, diam, chord, _, strategy = pair_diameters(curve, seed)
    if np.any(chord == 0.0):
        k = int(np.argmax(chord == 0.0))
        raise CurveError(f"vertices {ii[k]} and {jj[k]} coincide")
    ratio = diam / chord**t
    top = ratio.max()
    k = int(np.flatnonzero(ratio == top)[0])  # pairs are in lexicographic order
    return TurningReport(t=float(t), C_star=float(top), witness=(int(ii[k]), int(jj[k])),
                         pair_count=int(len(ratio)), strategy=strategy)


def _admitted(curve, ii, jj, chord, inside, flt):
    keep = chord > max(flt.min_chord, 0.0)
    if flt.max_chord is not None:
        keep &= chord < flt.max_chord
    if flt.straddle is not None:
        s = int(flt.straddle) % curve.n
        between = (ii < s) & (s < jj)  # strictly inside the arc i -> j
        around = (s < ii) | (s > jj)  # strictly inside the arc j -> i
        keep &= np.where(inside, between, around)
    return keep


def exponent_fit(curve: ClosedCurve, pair_filter: Optional[PairFilter] = None,
                 seed: int = 0, bins_per_octave: int = 4) -> TurningReport:
    """Fit ``diam ~ C * chord**t`` on the upper envelope of admitted pairs.

    Chords are bucketed geometrically; the largest diameter per bucket is
    regressed in log-log coordinates.  The slope is the fitted exponent,
    clipped to (0, 1.2].
    """
    curve = ensure_ccw(curve)
    flt = pair_filter or PairFilter()
    ii, jj, diam, chord, inside, strategy = pair_diameters(curve, seed)
    keep = _admitted(curve, ii, jj, chord, inside, flt)
    count = int(keep.sum())
    if count < 50:
        raise CurveError(f"exponent_fit needs at least 50 admitted pairs, got {count}")
    lc, ld = np.log(chord[keep]), np.log(diam[keep])
    width = np.log(2.0) / bins_per_octave
    b = np.floor((lc - lc.min()) / width).astype(np.int64)
    env = np.full(b.max() + 1, -np.inf)
    np.maximum.at(env, b, ld)
    xs = np.full(b.max() + 1, np.nan)
    for j in np.flatnonzero(np.isfinite(env)):
        sel = (b == j) & (ld == env[j])
        xs[j] = lc[sel].min()  # chord of the envelope pair
    ok = np.isfinite(env)
    if ok.sum() < 4:
        raise CurveError("admitted chords span too narrow a range to fit an exponent")
    slope, icpt = np.polyfit(xs[ok], env[ok], 1)
    resid = env[ok] - (icpt + slope * xs[ok])
    return TurningReport(
        t=None, C_star=None, witness=None, pair_count=count,
        fit_t=float(np.clip(slope, 1e-12, 1.2)), fit_C=float(np.exp(icpt)),
        residual=float(np.sqrt(np.mean(resid**2))), strategy=strategy,
    )
