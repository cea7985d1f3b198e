"""Quasisymmetry moduli of sampled circle maps.

All scans run over sample triples ``(a, b, x)`` with ``a, b != x``; distances
on the circle are chordal (``|e^{ia} - e^{ib}|``) or normalized arclength,
as recorded in the map.  Denominators below 1e-14 are skipped and counted.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ScanError
from .parametrize import BoundaryMap

__all__ = [
    "HolderReport",
    "QsReport",
    "eta_shape_fit",
    "geometric_edges",
    "holder_constants",
    "m_condition",
    "psi",
    "psi_bound_check",
    "psi_pow",
    "qs_modulus",
    "triple_ratio",
    "weak_qs_constant",
]

MAX_EXACT = 2048
K_RATIO = 2.0**0.25
PSI_K = 1.0 / 256.0


@dataclass
class QsReport:
    t_exponent: float
    metric: str
    weak_R: Optional[float] = None
    witness: Optional[list] = None
    rho_bins: list = field(default_factory=list)
    eta_fit: Optional[dict] = None
    m_condition: Optional[float] = None
    triples_scanned: int = 0
    excluded: int = 0
    strategy: str = "exact"
    samples: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        rows = ["k_lo,k_hi,max_ratio,count"]
        for b in self.rho_bins:
            val = "" if b["max_ratio"] is None else repr(b["max_ratio"])
            rows.append(f"{b['k_lo']!r},{b['k_hi']!r},{val},{b['count']}")
        return "\n".join(rows) + "\n"


@dataclass
class HolderReport:
    K1: float
    K2: float
    t: float
    implied_weak_R: float
    witness_K1: list
    witness_K2: list

    def to_dict(self) -> dict:
        return asdict(self)


def _metric_code(bmap):
    return _kernels.METRICS[bmap.metric]


def _subset(bmap: BoundaryMap, seed: int, cap: int):
    """All sample indices, or a stratified subset of ``cap`` of them."""
    n = bmap.n
    if n <= cap:
        return np.arange(n), "exact"
    half = cap // 2
    stride = np.linspace(0, n, half, endpoint=False).astype(np.int64)
    rng = np.random.default_rng(seed)
    rest = np.setdiff1d(np.arange(n), stride)
    extra = rng.choice(rest, size=cap - len(stride), replace=False)
    return np.sort(np.concatenate([stride, extra])), f"stratified:{cap}:seed={seed}"


def _threads(threads):
    return _kernels.default_threads() if threads is None else max(1, int(threads))


def _check_map(bmap: BoundaryMap):
    pts = bmap.points
    if len(np.unique(pts, axis=0)) < len(pts):
        raise ScanError("map has repeated image points; it is not injective")


def triple_ratio(bmap: BoundaryMap, a: int, b: int, x: int, exponent: float) -> float:
    """``|f(a)-f(x)| / |f(b)-f(x)|**exponent`` recomputed from a witness."""
    p = bmap.points
    num = math.hypot(p[a, 0] - p[x, 0], p[a, 1] - p[x, 1])
    den = math.hypot(p[b, 0] - p[x, 0], p[b, 1] - p[x, 1])
    return num / den**exponent


def weak_qs_constant(bmap: BoundaryMap, exponent: float, threads: int | None = None,
                     seed: int = 0, max_exact: int = MAX_EXACT) -> QsReport:
    """Max of ``|f(a)-f(x)| / |f(b)-f(x)|**e`` over triples with ``|a-x| <= |b-x|``."""
    if not 0.0 < exponent <= 1.0:
        raise ScanError(f"exponent must lie in (0, 1], got {exponent}")
    if bmap.n < 32:
        raise ScanError(f"weak_qs_constant needs at least 32 samples, got {bmap.n}")
    _check_map(bmap)
    idx, strategy = _subset(bmap, seed, max_exact)
    best, trip, triples, excluded = _kernels.weak_qs_scan(
        bmap.thetas[idx], bmap.points[idx], exponent, _metric_code(bmap), _threads(threads))
    wit = [int(idx[v]) for v in trip] if trip[0] >= 0 else None
    return QsReport(t_exponent=float(exponent), metric=bmap.metric, weak_R=float(best), witness=wit,
                    triples_scanned=int(triples), excluded=int(excluded), strategy=strategy,
                    samples=len(idx))


def geometric_edges(bins: int, k_max: float) -> np.ndarray:
    """``[0, k_max r**-(bins-1), ..., k_max / r, k_max]`` with ``r = 2**(1/4)``."""
    if bins < 4:
        raise ScanError(f"need at least 4 bins, got {bins}")
    if k_max < 1:
        raise ScanError(f"k_max must be >= 1, got {k_max}")
    j = np.arange(bins - 1, -1, -1)
    return np.concatenate([[0.0], k_max * 2.0 ** (-j / 4.0)])


def qs_modulus(bmap: BoundaryMap, exponent: float, bins: int = 48, k_max: float = 16.0,
               threads: int | None = None, seed: int = 0, max_exact: int = MAX_EXACT,
               edges=None) -> QsReport:
    """Per-bin maxima of the distortion ratio, bins ``(k_lo, k_hi]`` of ``k = |a-x|/|b-x|``.

    Bins are geometric with ratio 2**(1/4) ending at ``k_max``; explicit
    ``edges`` (starting at 0) override them.
    """
    _check_map(bmap)
    edges = geometric_edges(bins, k_max) if edges is None else np.asarray(edges, dtype=float)
    bins = len(edges) - 1
    idx, strategy = _subset(bmap, seed, max_exact)
    maxima, wits, counts = _kernels.qs_bins_scan(
        bmap.thetas[idx], bmap.points[idx], exponent, edges, _metric_code(bmap), _threads(threads))
    rows = []
    for j in range(bins):
        ok = wits[j][0] >= 0
        rows.append({
            "k_lo": float(edges[j]), "k_hi": float(edges[j + 1]),
            "max_ratio": float(maxima[j]) if ok else None,
            "witness": [int(idx[v]) for v in wits[j]] if ok else None,
            "count": int(counts[j]),
        })
    return QsReport(t_exponent=float(exponent), metric=bmap.metric, rho_bins=rows,
                    triples_scanned=int(counts.sum()), strategy=strategy, samples=len(idx))


def eta_shape_fit(report: QsReport) -> dict:
    """Affine fit of ``log max_ratio`` against ``k`` over bins with ``k >= 1``.

    The least-squares intercept is lifted by the largest residual so that the
    envelope ``exp(A + B k)`` dominates every bin maximum.
    """
    rows = [b for b in report.rho_bins if b["max_ratio"] is not None and b["k_lo"] >= 1.0 - 1e-12
            and b["max_ratio"] > 0]
    if len(rows) < 4:
        raise ScanError(f"eta_shape_fit needs at least 4 nonempty bins with k >= 1, got {len(rows)}")
    k = np.array([b["k_hi"] for b in rows])
    y = np.log([b["max_ratio"] for b in rows])
    B, A_ls = np.polyfit(k, y, 1)
    resid = y - (A_ls + B * k)
    A = float(A_ls + max(0.0, resid.max()))
    passed = all(b["max_ratio"] <= math.exp(A + B * b["k_hi"]) * (1 + 1e-6) for b in rows)
    fit = {"A": A, "B": float(B), "A_lsq": float(A_ls),
           "rms": float(np.sqrt(np.mean(resid**2))), "bins": len(rows), "passed": bool(passed)}
    report.eta_fit = fit
    return fit


def m_condition(bmap: BoundaryMap, t: float, rtol: float = 1e-3, threads: int | None = None,
                seed: int = 0, max_exact: int = MAX_EXACT) -> dict:
    """Max of ``|f(a)-f(x)|**(1/t) / |f(x)-f(b)|**t`` over near-equidistant triples."""
    _check_map(bmap)
    idx, strategy = _subset(bmap, seed, max_exact)
    best, trip, count = _kernels.m_condition_scan(
        bmap.thetas[idx], bmap.points[idx], t, rtol, _metric_code(bmap), _threads(threads))
    if count == 0:
        raise ScanError("no near-equidistant triples; densify the map or raise rtol")
    return {"value": float(best), "witness": [int(idx[v]) for v in trip], "triples": int(count),
            "t": float(t), "rtol": float(rtol), "metric": bmap.metric, "strategy": strategy}


def _pair_distances(bmap, rows):
    th = bmap.thetas
    delta = np.abs(th[rows, None] - th[None, :])
    if bmap.metric == "chordal":
        dom = 2.0 * np.abs(np.sin(0.5 * delta))
    else:
        delta = np.mod(delta, 2.0 * np.pi)
        dom = np.minimum(delta, 2.0 * np.pi - delta) / (2.0 * np.pi)
    p = bmap.points
    img = np.hypot(p[rows, None, 0] - p[None, :, 0], p[rows, None, 1] - p[None, :, 1])
    return dom, img


def holder_constants(bmap: BoundaryMap, t: float, chunk: int = 256) -> HolderReport:
    """``K1 |x-y|**(1/t) <= |f(x)-f(y)| <= K2 |x-y|**t`` over sample pairs."""
    n = bmap.n
    k1, k2 = math.inf, 0.0
    w1 = w2 = None
    for lo in range(0, n, chunk):
        rows = np.arange(lo, min(n, lo + chunk))
        dom, img = _pair_distances(bmap, rows)
        mask = np.arange(n)[None, :] > rows[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            up = np.where(mask, img / dom**t, -np.inf)
            down = np.where(mask, img / dom ** (1.0 / t), np.inf)
        i, j = np.unravel_index(np.argmax(up), up.shape)
        if up[i, j] > k2:
            k2, w2 = float(up[i, j]), [int(rows[i]), int(j)]
        i, j = np.unravel_index(np.argmin(down), down.shape)
        if down[i, j] < k1:
            k1, w1 = float(down[i, j]), [int(rows[i]), int(j)]
    implied = k2 / k1 ** (t * t) if k1 > 0 else math.inf
    return HolderReport(K1=k1, K2=k2, t=float(t), implied_weak_R=implied, witness_K1=w1, witness_K2=w2)


def psi_pow(k, R: float, t: float):
    """``psi(k)**t = [log(1/k)/log 256 - 1]**-1 * sqrt2 * R * (2R)**(1/t)`` for ``k < 1/256``."""
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore"):
        bracket = np.log(1.0 / k) / np.log(256.0) - 1.0
        return np.where(bracket > 0, math.sqrt(2.0) * R * (2.0 * R) ** (1.0 / t) / bracket, np.inf)


def psi(k, R: float, t: float):
    return psi_pow(k, R, t) ** (1.0 / t)


def psi_bound_check(bmap: BoundaryMap, t: float, R: float, threads: int | None = None,
                    seed: int = 0, max_exact: int = MAX_EXACT) -> dict:
    """Check ``m**t <= psi(k)**t`` on every sample triple with ``k < 1/256``.

    ``m = |f(a)-f(x)| / |f(b)-f(x)|**(t*t)``.  ``R`` should be the measured
    weak constant of the map at exponent ``t``.
    """
    _check_map(bmap)
    idx, strategy = _subset(bmap, seed, max_exact)
    worst, trip, count = _kernels.psi_scan(
        bmap.thetas[idx], bmap.points[idx], t, R, PSI_K, _metric_code(bmap), _threads(threads))
    if count == 0:
        raise ScanError("no sample triples with k < 1/256; densify the map near some point")
    wit = [int(idx[v]) for v in trip] if trip[0] >= 0 else None
    return {"worst_log_slack": float(worst), "witness": wit, "triples": int(count), "t": float(t),
            "R": float(R), "passed": bool(worst <= 1e-12), "metric": bmap.metric, "strategy": strategy}
