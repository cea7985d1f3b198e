"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy twins in ``_pykernels`` are used.  Setting ``TQC_PURE_PYTHON=1`` forces
the fallback.  The triple scans are split over the x index and merged here so
that results do not depend on the thread count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

_py = _pykernels
if os.environ.get("TQC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _py
        BACKEND = "python"

DENOM_FLOOR = _py.DENOM_FLOOR
domain_distances = _py.domain_distances

prefix_diameters = _impl.prefix_diameters
point_set_diameter = _impl.point_set_diameter
point_polyline_distance = _impl.point_polyline_distance
range_diameter_table = _impl.range_diameter_table
smaller_arc_diameters = _impl.smaller_arc_diameters
zipper_forward = _impl.zipper_forward

METRICS = {"chordal": 0, "arclength": 1}


def default_threads() -> int:
    raw = os.environ.get("TQC_THREADS", "")
    try:
        k = int(raw)
    except ValueError:
        return 1
    return max(1, k)


def _chunks(n, threads):
    threads = max(1, min(int(threads), n))
    cuts = np.linspace(0, n, threads + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def _run(fn, n, threads, args):
    parts = _chunks(n, threads)
    if len(parts) == 1:
        return [fn(*args, *parts[0])]
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        return list(pool.map(lambda p: fn(*args, *p), parts))


def zipper_inverse(w, z0, z1, inv_b, c, scale, inv_zeta, threads=None, backend=None):
    """Inverse zipper chain, split over points; each point is independent, so
    the result does not depend on ``threads``."""
    impl = backend or _impl
    w = np.ascontiguousarray(w, dtype=complex)
    threads = default_threads() if threads is None else threads
    if len(w) < 2048 or threads <= 1:
        return impl.zipper_inverse(w, z0, z1, inv_b, c, scale, inv_zeta)
    parts = _chunks(len(w), threads)
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        out = pool.map(lambda p: impl.zipper_inverse(w[p[0]:p[1]], z0, z1, inv_b, c, scale, inv_zeta), parts)
        return np.concatenate(list(out))


def _best_of(results, higher=True):
    """Pick the result with the largest value; ties go to the smallest triple."""
    best = None
    for r in results:
        if r[1] < 0:
            continue
        key = (r[0], tuple(-v for v in r[1:4])) if higher else None
        if best is None or key > best[0]:
            best = (key, r)
    return None if best is None else best[1]


def weak_qs_scan(thetas, pts, exponent, metric=0, threads=1, backend=None):
    impl = backend or _impl
    n = len(thetas)
    res = _run(impl.weak_qs_scan, n, threads, (thetas, pts, float(exponent), int(metric)))
    triples = sum(int(r[4]) for r in res)
    excluded = sum(int(r[5]) for r in res)
    top = _best_of(res)
    if top is None:
        return -1.0, (-1, -1, -1), triples, excluded
    return float(top[0]), (int(top[1]), int(top[2]), int(top[3])), triples, excluded


def qs_bins_scan(thetas, pts, exponent, edges, metric=0, threads=1, backend=None):
    impl = backend or _impl
    n = len(thetas)
    res = _run(impl.qs_bins_scan, n, threads,
               (thetas, pts, float(exponent), int(metric), np.asarray(edges, dtype=float)))
    nb = len(edges) - 1
    maxima = np.full(nb, -1.0)
    wits = np.full((nb, 3), -1, dtype=np.int64)
    counts = np.zeros(nb, dtype=np.int64)
    for mx, wt, ct in res:
        counts += np.asarray(ct, dtype=np.int64)
        for j in range(nb):
            if wt[j][0] < 0:
                continue
            if mx[j] > maxima[j] or (mx[j] == maxima[j] and tuple(wt[j]) < tuple(wits[j])):
                maxima[j] = mx[j]
                wits[j] = wt[j]
    return maxima, wits, counts


def m_condition_scan(thetas, pts, t, rtol, metric=0, threads=1, backend=None):
    impl = backend or _impl
    res = _run(impl.m_condition_scan, len(thetas), threads,
               (thetas, pts, float(t), int(metric), float(rtol)))
    count = sum(int(r[4]) for r in res)
    top = _best_of(res)
    if top is None:
        return -1.0, (-1, -1, -1), count
    return float(top[0]), (int(top[1]), int(top[2]), int(top[3])), count


def psi_scan(thetas, pts, t, R, k_cap, metric=0, threads=1, backend=None):
    impl = backend or _impl
    res = _run(impl.psi_scan, len(thetas), threads,
               (thetas, pts, float(t), float(R), int(metric), float(k_cap)))
    count = sum(int(r[4]) for r in res)
    top = _best_of(res)
    if top is None:
        return -np.inf, (-1, -1, -1), count
    return float(top[0]), (int(top[1]), int(top[2]), int(top[3])), count
