"""Numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Distances are always ``hypot`` of coordinate differences so that both
backends produce bit-identical maxima.
"""
from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi
DENOM_FLOOR = 1e-14

# ---------------------------------------------------------------------------
# planar geometry


def prefix_diameters(pts):
    """Running diameters of ``pts[0..k]`` for every k.

    The compiled twin requires a simple polyline; this one accepts any points.
    """
    pts = np.asarray(pts, dtype=float)
    m = len(pts)
    out = np.zeros(m)
    x, y = pts[:, 0], pts[:, 1]
    best = 0.0
    for k in range(1, m):
        far = np.hypot(x[:k] - x[k], y[:k] - y[k]).max()
        if far > best:
            best = far
        out[k] = best
    return out


def point_set_diameter(pts):
    pts = np.asarray(pts, dtype=float)
    if len(pts) < 2:
        return 0.0
    if len(pts) > 1500:
        pts = pts[_hull_indices(pts)]
    x, y = pts[:, 0], pts[:, 1]
    best = 0.0
    for k in range(1, len(pts)):
        far = np.hypot(x[:k] - x[k], y[:k] - y[k]).max()
        if far > best:
            best = far
    return float(best)


def _hull_indices(pts):
    # monotone chain; collinear points kept so no extreme point is lost
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = pts[order]

    def half(seq):
        chain = []
        for k in seq:
            while len(chain) >= 2:
                o, a = p[chain[-2]], p[chain[-1]]
                cross = (a[0] - o[0]) * (p[k][1] - o[1]) - (a[1] - o[1]) * (p[k][0] - o[0])
                if cross < 0:
                    chain.pop()
                else:
                    break
            chain.append(k)
        return chain

    lower = half(range(len(p)))
    upper = half(range(len(p) - 1, -1, -1))
    keep = np.unique(np.array(lower + upper))
    return order[keep]


def point_polyline_distance(pts, verts):
    pts = np.asarray(pts, dtype=float)
    a = np.asarray(verts, dtype=float)
    b = np.roll(a, -1, axis=0)
    ab = b - a
    ll = np.einsum("ij,ij->i", ab, ab)
    out = np.empty(len(pts))
    for k, p in enumerate(pts):
        ap = p - a
        lam = np.clip(np.einsum("ij,ij->i", ap, ab) / ll, 0.0, 1.0)
        q = a + lam[:, None] * ab
        out[k] = np.hypot(q[:, 0] - p[0], q[:, 1] - p[1]).min()
    return out


def range_diameter_table(verts):
    """``T[L, i]`` = diameter of the cyclic vertex range ``i .. i+L``."""
    v = np.asarray(verts, dtype=float)
    n = len(v)
    x, y = v[:, 0], v[:, 1]
    table = np.zeros((n, n))
    prev = np.zeros(n)
    for L in range(1, n):
        j = (np.arange(n) + L) % n
        d = np.hypot(x[j] - x, y[j] - y)
        cur = np.maximum(np.maximum(prev, np.roll(prev, -1)), d)
        table[L] = cur
        prev = cur
    return table


def smaller_arc_diameters(verts):
    """Symmetric matrix of smaller-sub-arc diameters between vertex pairs."""
    table = range_diameter_table(verts)
    n = len(table)
    out = np.zeros((n, n))
    i = np.arange(n)
    for L in range(1, n):
        j = (i + L) % n
        out[i, j] = np.minimum(table[L, i], table[n - L, j])
    return out


# ---------------------------------------------------------------------------
# circle-map triple scans


def domain_distances(thetas, x, metric):
    delta = np.abs(thetas - thetas[x])
    if metric == 0:
        return 2.0 * np.abs(np.sin(0.5 * delta))
    delta = np.mod(delta, TWO_PI)
    return np.minimum(delta, TWO_PI - delta) / TWO_PI


def _prepare(thetas, pts, x, metric):
    dd = domain_distances(thetas, x, metric)
    num = np.hypot(pts[:, 0] - pts[x, 0], pts[:, 1] - pts[x, 1])
    others = np.concatenate([np.arange(x), np.arange(x + 1, len(thetas))])
    order = others[np.lexsort((others, dd[others]))]
    return dd, num, order


def _count_true(sd, pred):
    """Length of the leading run where the monotone ``pred(sd[k], row)`` holds.

    ``pred`` receives candidate values and the row indices they belong to and
    must be true on a prefix of ``sd`` for every row.
    """
    n = len(sd)

    def run(nrows):
        lo = np.zeros(nrows, dtype=np.int64)
        hi = np.full(nrows, n, dtype=np.int64)
        r = np.arange(nrows)
        while True:
            active = lo < hi
            if not active.any():
                return lo
            mid = (lo + hi) // 2
            ok = np.zeros(nrows, dtype=bool)
            ok[active] = pred(sd[mid[active]], r[active])
            lo = np.where(active & ok, mid + 1, lo)
            hi = np.where(active & ~ok, mid, hi)

    return run


def _upper_positions(sd, limits, dd_b):
    """Count of sorted entries with ``sd[a] / dd_b <= limit`` (exact predicate)."""
    limits = np.broadcast_to(np.asarray(limits, dtype=float), np.shape(dd_b))
    dd_b = np.asarray(dd_b, dtype=float)
    return _count_true(sd, lambda v, r: v / dd_b[r] <= limits[r])(len(dd_b))


def _better(r, w, best, wit):
    if r > best:
        return True
    return r == best and tuple(w) < tuple(wit)


def weak_qs_scan(thetas, pts, exponent, metric, x_lo, x_hi):
    """Max of |f(a)-f(x)| / |f(b)-f(x)|**e over triples with |a-x| <= |b-x|.

    Returns ``(best, a, b, x, triples, excluded)``.
    """
    thetas = np.asarray(thetas, dtype=float)
    pts = np.asarray(pts, dtype=float)
    best, wit = -1.0, (-1, -1, -1)
    triples = excluded = 0
    for x in range(x_lo, x_hi):
        dd, num, order = _prepare(thetas, pts, x, metric)
        sd, sn = dd[order], num[order]
        m = len(order)
        # running argmax of numerator along the sorted order, ties -> smallest index
        run_idx = np.empty(m, dtype=np.int64)
        cur = 0
        for k in range(m):
            if sn[k] > sn[cur] or (sn[k] == sn[cur] and order[k] < order[cur]):
                cur = k
            run_idx[k] = cur
        ends = _upper_positions(sd, np.ones(m), sd)
        den = sn
        ok = den >= DENOM_FLOOR
        excluded += int(np.sum(ends[~ok]))
        triples += int(np.sum(ends[ok]))
        if not ok.any():
            continue
        kb = np.nonzero(ok)[0]
        apos = run_idx[ends[kb] - 1]
        ratios = sn[apos] / den[kb] ** exponent
        top = ratios.max()
        cand = np.nonzero(ratios == top)[0]
        trip = min((int(order[apos[c]]), int(order[kb[c]]), x) for c in cand)
        if _better(top, trip, best, wit):
            best, wit = float(top), trip
    return best, wit[0], wit[1], wit[2], triples, excluded


class _SparseMax:
    """Range argmax over ``vals`` with ties broken by smallest ``keys``."""

    def __init__(self, vals, keys):
        self.vals, self.keys = vals, keys
        m = len(vals)
        levels = [np.arange(m)]
        span = 1
        while 2 * span <= m:
            prev = levels[-1]
            a, b = prev[: m - 2 * span + 1], prev[span: m - span + 1]
            levels.append(self._pick(a, b))
            span *= 2
        self.levels = levels

    def _pick(self, a, b):
        va, vb = self.vals[a], self.vals[b]
        take_b = (vb > va) | ((vb == va) & (self.keys[b] < self.keys[a]))
        return np.where(take_b, b, a)

    def query(self, lo, hi):
        """argmax positions over ``[lo, hi)``; requires hi > lo."""
        length = hi - lo
        lev = np.floor(np.log2(np.maximum(length, 1))).astype(np.int64)
        out = np.empty(len(lo), dtype=np.int64)
        for L in np.unique(lev):
            sel = lev == L
            tab = self.levels[L]
            a = tab[lo[sel]]
            b = tab[hi[sel] - (1 << L)]
            out[sel] = self._pick(a, b)
        return out


def qs_bins_scan(thetas, pts, exponent, metric, edges, x_lo, x_hi):
    """Per-bin maxima of the distortion ratio, bins ``(edges[j], edges[j+1]]``.

    ``edges[0]`` must be 0.  Returns ``(maxima, witnesses, counts)``.
    """
    thetas = np.asarray(thetas, dtype=float)
    pts = np.asarray(pts, dtype=float)
    edges = np.asarray(edges, dtype=float)
    nb = len(edges) - 1
    maxima = np.full(nb, -1.0)
    wits = np.full((nb, 3), -1, dtype=np.int64)
    counts = np.zeros(nb, dtype=np.int64)
    for x in range(x_lo, x_hi):
        dd, num, order = _prepare(thetas, pts, x, metric)
        sd, sn = dd[order], num[order]
        table = _SparseMax(sn, order)
        kb = np.nonzero(sn >= DENOM_FLOOR)[0]
        if len(kb) == 0:
            continue
        dd_b = np.repeat(sd[kb], nb + 1)
        lim = np.tile(edges, len(kb))
        pos = _upper_positions(sd, lim, dd_b).reshape(len(kb), nb + 1)
        pos[:, 0] = 0
        for j in range(nb):
            lo, hi = pos[:, j], pos[:, j + 1]
            nonempty = hi > lo
            if not nonempty.any():
                continue
            counts[j] += int(np.sum(hi - lo))
            sel = np.nonzero(nonempty)[0]
            apos = table.query(lo[sel], hi[sel])
            bpos = kb[sel]
            ratios = sn[apos] / sn[bpos] ** exponent
            top = ratios.max()
            cand = np.nonzero(ratios == top)[0]
            trip = min((int(order[apos[c]]), int(order[bpos[c]]), x) for c in cand)
            if _better(top, trip, maxima[j], wits[j]):
                maxima[j] = top
                wits[j] = trip
    return maxima, wits, counts


def m_condition_scan(thetas, pts, t, metric, rtol, x_lo, x_hi):
    """Max of |f(a)-f(x)|**(1/t) / |f(b)-f(x)|**t over near-equidistant a != b."""
    thetas = np.asarray(thetas, dtype=float)
    pts = np.asarray(pts, dtype=float)
    best, wit = -1.0, (-1, -1, -1)
    count = 0
    for x in range(x_lo, x_hi):
        dd, num, order = _prepare(thetas, pts, x, metric)
        sd, sn = dd[order], num[order]
        table = _SparseMax(sn, order)
        kb = np.nonzero(sn >= DENOM_FLOOR)[0]
        if len(kb) == 0:
            continue
        # window |sd[a] - sd[b]| <= rtol * sd[b] is a contiguous run around b
        centre = sd[kb]
        r = rtol * centre
        lo = _count_true(sd, lambda v, k: centre[k] - v > r[k])(len(kb))
        hi = _count_true(sd, lambda v, k: v - centre[k] <= r[k])(len(kb))
        for lo_s, hi_s in ((lo, kb), (kb + 1, hi)):
            sel = np.nonzero(hi_s > lo_s)[0]
            if len(sel) == 0:
                continue
            count += int(np.sum(hi_s[sel] - lo_s[sel]))
            apos = table.query(lo_s[sel], hi_s[sel])
            bpos = kb[sel]
            vals = sn[apos] ** (1.0 / t) / sn[bpos] ** t
            top = vals.max()
            cand = np.nonzero(vals == top)[0]
            trip = min((int(order[apos[c]]), int(order[bpos[c]]), x) for c in cand)
            if _better(top, trip, best, wit):
                best, wit = float(top), trip
    return best, wit[0], wit[1], wit[2], count


def psi_scan(thetas, pts, t, R, metric, k_cap, x_lo, x_hi):
    """Worst log-slack of ``m**t <= psi(k)**t`` over sample triples with k < k_cap.

    ``m = |f(a)-f(x)| / |f(b)-f(x)|**(t*t)``.  Returns
    ``(worst_slack, a, b, x, triples)``; slack is ``log(m**t) - log(psi(k)**t)``.
    """
    thetas = np.asarray(thetas, dtype=float)
    pts = np.asarray(pts, dtype=float)
    log256 = np.log(256.0)
    coef = np.log(np.sqrt(2.0) * R * (2.0 * R) ** (1.0 / t))
    worst, wit = -np.inf, (-1, -1, -1)
    count = 0
    for x in range(x_lo, x_hi):
        dd, num, order = _prepare(thetas, pts, x, metric)
        sd, sn = dd[order], num[order]
        kb = np.nonzero(sn >= DENOM_FLOOR)[0]
        if len(kb) == 0:
            continue
        ends = _upper_positions(sd, np.full(len(kb), k_cap), sd[kb])
        tot = int(ends.sum())
        if tot == 0:
            continue
        bpos = np.repeat(kb, ends)
        starts = np.repeat(np.cumsum(ends) - ends, ends)
        apos = np.arange(tot) - starts
        k = sd[apos] / sd[bpos]
        keep = k < k_cap
        apos, bpos, k = apos[keep], bpos[keep], k[keep]
        count += len(k)
        bracket = np.log(1.0 / k) / log256 - 1.0
        valid = bracket > 0
        if not valid.any():
            continue
        apos, bpos, bracket = apos[valid], bpos[valid], bracket[valid]
        m = sn[apos] / sn[bpos] ** (t * t)
        with np.errstate(divide="ignore"):
            slack = t * np.log(m) - (coef - np.log(bracket))
        top = slack.max()
        if top == -np.inf:
            continue
        cand = np.nonzero(slack == top)[0]
        trip = min((int(order[apos[q]]), int(order[bpos[q]]), x) for q in cand)
        if top > worst or (top == worst and trip < wit):
            worst, wit = float(top), trip
    return worst, wit[0], wit[1], wit[2], count


# ---------------------------------------------------------------------------
# zipper (geodesic algorithm) stage application


def zipper_forward(z, z0, z1, inv_b, c, scale, inv_zeta):
    """Apply the slit-map chain to domain points ``z``; returns half-plane values.

    The curve must be counter-clockwise.  ``z0`` is sent to infinity by the
    first map and carried along exactly; an infinite result is returned as
    ``complex(inf, 0)``.  A point sitting exactly at 0 (the most recently
    zipped vertex) is sent to ``-c``.  Each stage output is divided by the
    positive ``scale`` of that stage, which keeps the chain from overflowing.
    """
    z = np.asarray(z, dtype=complex)
    w = np.empty_like(z)
    inf = z == z0
    fin = ~inf
    with np.errstate(divide="ignore", invalid="ignore"):
        w[fin] = 1j * np.sqrt((z[fin] - z1) / (z[fin] - z0))
        for ib, cc, sc in zip(inv_b, c, scale):
            fin = ~inf
            u = np.empty_like(w)
            u[fin] = w[fin] / (1.0 - w[fin] * ib)
            if ib != 0.0:
                u[inf] = -1.0 / ib
                inf = np.zeros_like(inf)
                fin = ~inf
            uf = u[fin]
            zero = uf == 0
            safe = np.where(zero, 1.0, uf)
            w[fin] = np.where(zero, -cc, uf * np.sqrt(1.0 + (cc / safe) ** 2)) / sc
        fin = ~inf
        v = np.empty_like(w)
        v[fin] = w[fin] / (1.0 - w[fin] * inv_zeta)
        if inv_zeta != 0.0:
            v[inf] = -1.0 / inv_zeta
            inf = np.zeros_like(inf)
            fin = ~inf
        w[fin] = -(v[fin] * v[fin])
    w[inf] = complex(np.inf, 0.0)
    return w


def zipper_inverse(w, z0, z1, inv_b, c, scale, inv_zeta):
    """Invert the slit-map chain: upper-half-plane points back to the domain."""
    w = np.asarray(w, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.sqrt(-w)
        v = np.where(v.imag < 0, -v, v)
        s = v / (1.0 + v * inv_zeta)
        for ib, cc, sc in zip(inv_b[::-1], c[::-1], scale[::-1]):
            s = s * sc
            u = np.where(s == 0, 1j * cc, s * np.sqrt(1.0 - (cc / np.where(s == 0, 1.0, s)) ** 2))
            s = u / (1.0 + u * ib)
        sq = -(s * s)
        return (z1 - z0 * sq) / (1.0 - sq)
