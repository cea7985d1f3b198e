# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``.

Signatures and return conventions match the numpy versions exactly; the
triple scans release the GIL so callers can split the x range over threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport hypot, sqrt, sin, fabs, fmod, pow, log, INFINITY, M_PI, copysign
from libc.stdlib cimport malloc, free, qsort

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI
cdef double DENOM_FLOOR = 1e-14

ctypedef struct Item:
    double d
    Py_ssize_t idx


cdef int _cmp_item(const void* pa, const void* pb) noexcept nogil:
    cdef const Item* a = <const Item*> pa
    cdef const Item* b = <const Item*> pb
    if a.d < b.d:
        return -1
    if a.d > b.d:
        return 1
    if a.idx < b.idx:
        return -1
    if a.idx > b.idx:
        return 1
    return 0


# ---------------------------------------------------------------------------
# planar geometry

cdef inline double _cross(double ox, double oy, double ax, double ay, double bx, double by) noexcept nogil:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def prefix_diameters(pts_in):
    """Running diameters via an online (Melkman) hull.

    ``pts`` must be a simple (non-self-crossing) polyline, as every arc of a
    :class:`ClosedCurve` is; arbitrary point clouds give wrong answers.
    """
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef Py_ssize_t m = pts.shape[0]
    out_arr = np.zeros(m)
    cdef double[::1] out = out_arr
    if m < 2:
        return out_arr
    cdef Py_ssize_t cap = 2 * m + 8
    cdef Py_ssize_t* dq = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t bot, top, k, q, e0, e1
    cdef double best = 0.0, far, d, px, py, cr
    cdef bint hull_ready = False
    try:
        with nogil:
            # degenerate phase: all points so far collinear, tracked by extremes
            e0 = 0
            e1 = 0
            for k in range(1, m):
                px = pts[k, 0]
                py = pts[k, 1]
                if not hull_ready:
                    far = hypot(pts[e0, 0] - px, pts[e0, 1] - py)
                    d = hypot(pts[e1, 0] - px, pts[e1, 1] - py)
                    if d > far:
                        far = d
                    if far > best:
                        best = far
                    out[k] = best
                    if e0 == e1:
                        e1 = k
                        continue
                    cr = _cross(pts[e0, 0], pts[e0, 1], pts[e1, 0], pts[e1, 1], px, py)
                    if cr == 0.0:
                        # extend the segment if p lies beyond an extreme
                        if hypot(pts[e0, 0] - px, pts[e0, 1] - py) > hypot(pts[e0, 0] - pts[e1, 0], pts[e0, 1] - pts[e1, 1]):
                            if hypot(pts[e0, 0] - px, pts[e0, 1] - py) >= hypot(pts[e1, 0] - px, pts[e1, 1] - py):
                                e1 = k
                            else:
                                e0 = k
                        elif hypot(pts[e1, 0] - px, pts[e1, 1] - py) > hypot(pts[e0, 0] - pts[e1, 0], pts[e0, 1] - pts[e1, 1]):
                            e0 = k
                        continue
                    bot = m + 2
                    top = bot
                    dq[bot] = k
                    if cr > 0:
                        dq[bot + 1] = e0
                        dq[bot + 2] = e1
                    else:
                        dq[bot + 1] = e1
                        dq[bot + 2] = e0
                    dq[bot + 3] = k
                    top = bot + 3
                    hull_ready = True
                    continue
                # farthest previous point lies on the current hull
                far = 0.0
                for q in range(bot, top):
                    d = hypot(pts[dq[q], 0] - px, pts[dq[q], 1] - py)
                    if d > far:
                        far = d
                if far > best:
                    best = far
                out[k] = best
                # Melkman update; skip if p is inside the hull
                if (_cross(pts[dq[top - 1], 0], pts[dq[top - 1], 1], pts[dq[top], 0], pts[dq[top], 1], px, py) > 0
                        and _cross(px, py, pts[dq[bot], 0], pts[dq[bot], 1], pts[dq[bot + 1], 0], pts[dq[bot + 1], 1]) > 0):
                    continue
                while top - bot >= 1 and _cross(pts[dq[top - 1], 0], pts[dq[top - 1], 1], pts[dq[top], 0], pts[dq[top], 1], px, py) <= 0:
                    top -= 1
                top += 1
                dq[top] = k
                while top - bot >= 1 and _cross(px, py, pts[dq[bot], 0], pts[dq[bot], 1], pts[dq[bot + 1], 0], pts[dq[bot + 1], 1]) <= 0:
                    bot += 1
                bot -= 1
                dq[bot] = k
                if bot < 2 or top > cap - 3:
                    # recentre the deque
                    q = top - bot
                    e0 = (cap - q) // 2
                    if e0 < bot:
                        for e1 in range(q + 1):
                            dq[e0 + e1] = dq[bot + e1]
                    else:
                        for e1 in range(q, -1, -1):
                            dq[e0 + e1] = dq[bot + e1]
                    bot = e0
                    top = e0 + q
    finally:
        free(dq)
    return out_arr


def point_set_diameter(pts_in):
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef Py_ssize_t m = pts.shape[0], i, j
    cdef double best = 0.0, d
    if m > 1500:
        from ._pykernels import _hull_indices
        pts = np.ascontiguousarray(np.asarray(pts)[_hull_indices(np.asarray(pts))])
        m = pts.shape[0]
    with nogil:
        for i in range(1, m):
            for j in range(i):
                d = hypot(pts[j, 0] - pts[i, 0], pts[j, 1] - pts[i, 1])
                if d > best:
                    best = d
    return best


def point_polyline_distance(pts_in, verts_in):
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef const double[:, ::1] v = np.ascontiguousarray(verts_in, dtype=np.float64)
    cdef Py_ssize_t p = pts.shape[0], n = v.shape[0], k, i, j
    out_arr = np.empty(p)
    cdef double[::1] out = out_arr
    cdef double ax, ay, bx, by, abx, aby, ll, lam, qx, qy, d, best
    with nogil:
        for k in range(p):
            best = INFINITY
            for i in range(n):
                j = i + 1
                if j == n:
                    j = 0
                ax = v[i, 0]
                ay = v[i, 1]
                abx = v[j, 0] - ax
                aby = v[j, 1] - ay
                ll = abx * abx + aby * aby
                lam = ((pts[k, 0] - ax) * abx + (pts[k, 1] - ay) * aby) / ll
                if lam < 0.0:
                    lam = 0.0
                elif lam > 1.0:
                    lam = 1.0
                qx = ax + lam * abx
                qy = ay + lam * aby
                d = hypot(qx - pts[k, 0], qy - pts[k, 1])
                if d < best:
                    best = d
            out[k] = best
    return out_arr


def range_diameter_table(verts_in):
    cdef const double[:, ::1] v = np.ascontiguousarray(verts_in, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], L, i, j
    table_arr = np.zeros((n, n))
    cdef double[:, ::1] T = table_arr
    cdef double d, a, b
    with nogil:
        for L in range(1, n):
            for i in range(n):
                j = i + L
                if j >= n:
                    j -= n
                d = hypot(v[j, 0] - v[i, 0], v[j, 1] - v[i, 1])
                a = T[L - 1, i]
                b = T[L - 1, i + 1 if i + 1 < n else 0]
                if b > a:
                    a = b
                if d > a:
                    a = d
                T[L, i] = a
    return table_arr


def smaller_arc_diameters(verts_in):
    table_arr = range_diameter_table(verts_in)
    cdef double[:, ::1] T = table_arr
    cdef Py_ssize_t n = T.shape[0], L, i, j
    out_arr = np.zeros((n, n))
    cdef double[:, ::1] out = out_arr
    cdef double a, b
    with nogil:
        for L in range(1, n):
            for i in range(n):
                j = i + L
                if j >= n:
                    j -= n
                a = T[L, i]
                b = T[n - L, j]
                out[i, j] = a if a < b else b
    return out_arr


# ---------------------------------------------------------------------------
# circle-map triple scans

cdef inline double _dom(double ta, double tx, int metric) noexcept nogil:
    cdef double delta = fabs(ta - tx)
    if metric == 0:
        return 2.0 * fabs(sin(0.5 * delta))
    delta = fmod(delta, TWO_PI)
    if TWO_PI - delta < delta:
        delta = TWO_PI - delta
    return delta / TWO_PI


cdef inline bint _trip_less(Py_ssize_t a, Py_ssize_t b, Py_ssize_t x,
                            Py_ssize_t wa, Py_ssize_t wb, Py_ssize_t wx) noexcept nogil:
    if a != wa:
        return a < wa
    if b != wb:
        return b < wb
    return x < wx


cdef Py_ssize_t _prepare(const double[::1] th, const double[:, ::1] pts, Py_ssize_t x, int metric,
                         Item* items, double* sd, double* sn, Py_ssize_t* order) noexcept nogil:
    cdef Py_ssize_t n = th.shape[0], k, m = 0
    for k in range(n):
        if k == x:
            continue
        items[m].d = _dom(th[k], th[x], metric)
        items[m].idx = k
        m += 1
    qsort(items, m, sizeof(Item), _cmp_item)
    for k in range(m):
        order[k] = items[k].idx
        sd[k] = items[k].d
        sn[k] = hypot(pts[order[k], 0] - pts[x, 0], pts[order[k], 1] - pts[x, 1])
    return m


cdef inline Py_ssize_t _upper(const double* sd, Py_ssize_t m, double limit, double ddb) noexcept nogil:
    # number of leading entries with sd[a] / ddb <= limit
    cdef Py_ssize_t lo = 0, hi = m, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if sd[mid] / ddb <= limit:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _pick(const double* sn, const Py_ssize_t* order, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    if sn[b] > sn[a] or (sn[b] == sn[a] and order[b] < order[a]):
        return b
    return a


cdef void _build_sparse(const double* sn, const Py_ssize_t* order, Py_ssize_t m,
                        Py_ssize_t* table, Py_ssize_t levels) noexcept nogil:
    cdef Py_ssize_t L, i, span = 1
    for i in range(m):
        table[i] = i
    for L in range(1, levels):
        for i in range(m - 2 * span + 1):
            table[L * m + i] = _pick(sn, order, table[(L - 1) * m + i], table[(L - 1) * m + i + span])
        span *= 2


cdef inline Py_ssize_t _query(const double* sn, const Py_ssize_t* order, const Py_ssize_t* table,
                              Py_ssize_t m, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t length = hi - lo, L = 0
    while (2 << L) <= length:
        L += 1
    return _pick(sn, order, table[L * m + lo], table[L * m + hi - (1 << L)])


def weak_qs_scan(thetas, pts_in, double exponent, int metric, Py_ssize_t x_lo, Py_ssize_t x_hi):
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0]
    cdef Item* items = <Item*> malloc(n * sizeof(Item))
    cdef double* sd = <double*> malloc(n * sizeof(double))
    cdef double* sn = <double*> malloc(n * sizeof(double))
    cdef Py_ssize_t* order = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* run = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t x, m, k, cur, e, a
    cdef double best = -1.0, r
    cdef Py_ssize_t wa = -1, wb = -1, wx = -1
    cdef long long triples = 0, excluded = 0
    try:
        with nogil:
            for x in range(x_lo, x_hi):
                m = _prepare(th, pts, x, metric, items, sd, sn, order)
                cur = 0
                for k in range(m):
                    if sn[k] > sn[cur] or (sn[k] == sn[cur] and order[k] < order[cur]):
                        cur = k
                    run[k] = cur
                for k in range(m):
                    e = _upper(sd, m, 1.0, sd[k])
                    if sn[k] < DENOM_FLOOR:
                        excluded += e
                        continue
                    triples += e
                    a = run[e - 1]
                    r = sn[a] / pow(sn[k], exponent)
                    if r > best or (r == best and _trip_less(order[a], order[k], x, wa, wb, wx)):
                        best = r
                        wa = order[a]
                        wb = order[k]
                        wx = x
    finally:
        free(items); free(sd); free(sn); free(order); free(run)
    return best, wa, wb, wx, triples, excluded


def qs_bins_scan(thetas, pts_in, double exponent, int metric, edges_in, Py_ssize_t x_lo, Py_ssize_t x_hi):
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef const double[::1] edges = np.ascontiguousarray(edges_in, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0], nb = edges.shape[0] - 1
    maxima_arr = np.full(nb, -1.0)
    wits_arr = np.full((nb, 3), -1, dtype=np.int64)
    counts_arr = np.zeros(nb, dtype=np.int64)
    cdef double[::1] maxima = maxima_arr
    cdef long long[:, ::1] wits = wits_arr
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t levels = 1
    while (1 << levels) <= n:
        levels += 1
    cdef Item* items = <Item*> malloc(n * sizeof(Item))
    cdef double* sd = <double*> malloc(n * sizeof(double))
    cdef double* sn = <double*> malloc(n * sizeof(double))
    cdef Py_ssize_t* order = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* table = <Py_ssize_t*> malloc(n * levels * sizeof(Py_ssize_t))
    cdef Py_ssize_t* pos = <Py_ssize_t*> malloc((nb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t x, m, b, j, a
    cdef double r, den
    try:
        with nogil:
            for x in range(x_lo, x_hi):
                m = _prepare(th, pts, x, metric, items, sd, sn, order)
                _build_sparse(sn, order, m, table, levels)
                for b in range(m):
                    if sn[b] < DENOM_FLOOR:
                        continue
                    den = pow(sn[b], exponent)
                    pos[0] = 0
                    for j in range(1, nb + 1):
                        pos[j] = _upper(sd, m, edges[j], sd[b])
                    for j in range(nb):
                        if pos[j + 1] <= pos[j]:
                            continue
                        counts[j] += pos[j + 1] - pos[j]
                        a = _query(sn, order, table, m, pos[j], pos[j + 1])
                        r = sn[a] / den
                        if r > maxima[j] or (r == maxima[j] and _trip_less(order[a], order[b], x, wits[j, 0], wits[j, 1], wits[j, 2])):
                            maxima[j] = r
                            wits[j, 0] = order[a]
                            wits[j, 1] = order[b]
                            wits[j, 2] = x
    finally:
        free(items); free(sd); free(sn); free(order); free(table); free(pos)
    return maxima_arr, wits_arr, counts_arr


def m_condition_scan(thetas, pts_in, double t, int metric, double rtol, Py_ssize_t x_lo, Py_ssize_t x_hi):
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0]
    cdef Py_ssize_t levels = 1
    while (1 << levels) <= n:
        levels += 1
    cdef Item* items = <Item*> malloc(n * sizeof(Item))
    cdef double* sd = <double*> malloc(n * sizeof(double))
    cdef double* sn = <double*> malloc(n * sizeof(double))
    cdef Py_ssize_t* order = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* table = <Py_ssize_t*> malloc(n * levels * sizeof(Py_ssize_t))
    cdef Py_ssize_t x, m, b, a, lo, hi, mid, side, s_lo, s_hi
    cdef double best = -1.0, v, c, r, den
    cdef Py_ssize_t wa = -1, wb = -1, wx = -1
    cdef long long count = 0
    try:
        with nogil:
            for x in range(x_lo, x_hi):
                m = _prepare(th, pts, x, metric, items, sd, sn, order)
                _build_sparse(sn, order, m, table, levels)
                for b in range(m):
                    if sn[b] < DENOM_FLOOR:
                        continue
                    c = sd[b]
                    r = rtol * c
                    lo = 0
                    hi = m
                    while lo < hi:
                        mid = (lo + hi) // 2
                        if c - sd[mid] > r:
                            lo = mid + 1
                        else:
                            hi = mid
                    s_lo = lo
                    lo = 0
                    hi = m
                    while lo < hi:
                        mid = (lo + hi) // 2
                        if sd[mid] - c <= r:
                            lo = mid + 1
                        else:
                            hi = mid
                    s_hi = lo
                    den = pow(sn[b], t)
                    for side in range(2):
                        if side == 0:
                            lo = s_lo
                            hi = b
                        else:
                            lo = b + 1
                            hi = s_hi
                        if hi <= lo:
                            continue
                        count += hi - lo
                        a = _query(sn, order, table, m, lo, hi)
                        v = pow(sn[a], 1.0 / t) / den
                        if v > best or (v == best and _trip_less(order[a], order[b], x, wa, wb, wx)):
                            best = v
                            wa = order[a]
                            wb = order[b]
                            wx = x
    finally:
        free(items); free(sd); free(sn); free(order); free(table)
    return best, wa, wb, wx, count


def psi_scan(thetas, pts_in, double t, double R, int metric, double k_cap, Py_ssize_t x_lo, Py_ssize_t x_hi):
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0]
    cdef Item* items = <Item*> malloc(n * sizeof(Item))
    cdef double* sd = <double*> malloc(n * sizeof(double))
    cdef double* sn = <double*> malloc(n * sizeof(double))
    cdef Py_ssize_t* order = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef double log256 = log(256.0)
    cdef double coef = log(sqrt(2.0) * R * pow(2.0 * R, 1.0 / t))
    cdef double worst = -INFINITY, k, bracket, mm, slack, den
    cdef Py_ssize_t wa = -1, wb = -1, wx = -1, x, m, b, a, e
    cdef long long count = 0
    try:
        with nogil:
            for x in range(x_lo, x_hi):
                m = _prepare(th, pts, x, metric, items, sd, sn, order)
                for b in range(m):
                    if sn[b] < DENOM_FLOOR:
                        continue
                    e = _upper(sd, m, k_cap, sd[b])
                    if e == 0:
                        continue
                    den = pow(sn[b], t * t)
                    for a in range(e):
                        k = sd[a] / sd[b]
                        if not (k < k_cap):
                            continue
                        count += 1
                        bracket = log(1.0 / k) / log256 - 1.0
                        if not (bracket > 0):
                            continue
                        mm = sn[a] / den
                        slack = t * log(mm) - (coef - log(bracket))
                        if slack == -INFINITY:
                            continue
                        if slack > worst or (slack == worst and _trip_less(order[a], order[b], x, wa, wb, wx)):
                            worst = slack
                            wa = order[a]
                            wb = order[b]
                            wx = x
    finally:
        free(items); free(sd); free(sn); free(order)
    return worst, wa, wb, wx, count


# ---------------------------------------------------------------------------
# zipper stages

cdef inline double complex _csqrt(double complex z) noexcept nogil:
    # principal square root
    cdef double re = z.real, im = z.imag, r, s
    if re == 0.0 and im == 0.0:
        return 0.0
    r = sqrt(re * re + im * im)  # zipper magnitudes stay far from overflow
    if re >= 0.0:
        s = sqrt(0.5 * (r + re))
        return s + 1j * (im / (2.0 * s))
    s = sqrt(0.5 * (r - re))
    return fabs(im) / (2.0 * s) + 1j * copysign(s, im)


def zipper_forward(z_in, double complex z0, double complex z1, inv_b_in, c_in, scale_in, double inv_zeta):
    cdef const double complex[::1] z = np.ascontiguousarray(z_in, dtype=np.complex128)
    cdef const double[::1] inv_b = np.ascontiguousarray(inv_b_in, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef const double[::1] sc = np.ascontiguousarray(scale_in, dtype=np.float64)
    cdef Py_ssize_t p = z.shape[0], ns = inv_b.shape[0], k, s
    out_arr = np.empty(p, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex w, u, v
    cdef bint inf
    cdef double ib, cc
    with nogil:
        for k in range(p):
            inf = z[k] == z0
            if not inf:
                w = 1j * _csqrt((z[k] - z1) / (z[k] - z0))
            for s in range(ns):
                ib = inv_b[s]
                cc = c[s]
                if inf:
                    if ib == 0.0:
                        continue
                    u = -1.0 / ib
                    inf = False
                else:
                    u = w / (1.0 - w * ib)
                if u == 0:
                    w = -cc
                else:
                    w = u * _csqrt(1.0 + (cc / u) * (cc / u))
                w = w / sc[s]
            if inf:
                if inv_zeta == 0.0:
                    out[k] = INFINITY
                    continue
                v = -1.0 / inv_zeta
            else:
                v = w / (1.0 - w * inv_zeta)
            out[k] = -(v * v)
    return out_arr


def zipper_inverse(w_in, double complex z0, double complex z1, inv_b_in, c_in, scale_in, double inv_zeta):
    cdef const double complex[::1] w = np.ascontiguousarray(w_in, dtype=np.complex128)
    cdef const double[::1] inv_b = np.ascontiguousarray(inv_b_in, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef const double[::1] sc = np.ascontiguousarray(scale_in, dtype=np.float64)
    cdef Py_ssize_t p = w.shape[0], ns = inv_b.shape[0], k, s
    out_arr = np.empty(p, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex v, q, sq
    cdef double cc, qr, qi, ur, ui, ar, ai, dr, di, m
    with nogil:
        for k in range(p):
            v = _csqrt(-w[k])
            if v.imag < 0:
                v = -v
            q = v / (1.0 + v * inv_zeta)
            qr = q.real
            qi = q.imag
            for s in range(ns - 1, -1, -1):
                cc = c[s]
                qr = qr * sc[s]
                qi = qi * sc[s]
                if qr == 0.0 and qi == 0.0:
                    ur = 0.0
                    ui = cc
                else:
                    # a = cc / q, u = q sqrt(1 - a^2), all in real arithmetic
                    m = cc / (qr * qr + qi * qi)
                    ar = m * qr
                    ai = -m * qi
                    v = _csqrt((1.0 - ar * ar + ai * ai) - 1j * (2.0 * ar * ai))
                    ur = qr * v.real - qi * v.imag
                    ui = qr * v.imag + qi * v.real
                dr = 1.0 + ur * inv_b[s]
                di = ui * inv_b[s]
                m = 1.0 / (dr * dr + di * di)
                qr = (ur * dr + ui * di) * m
                qi = (ui * dr - ur * di) * m
            q = qr + 1j * qi
            sq = -(q * q)
            out[k] = (z1 - z0 * sq) / (1.0 - sq)
    return out_arr
