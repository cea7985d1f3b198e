"""Distortion checks and empirical constants for a fitted disk map."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import _kernels
from ..curves import curve_diameter
from ..errors import MapError
from ..parametrize import BoundaryMap
from ..qsmod import eta_shape_fit, qs_modulus
from .geometry import arc_to_center, geodesic_between, hyperbolic_distance, sector
from .zipper import DiskMap, deriv_abs, dist_to_boundary, eval_map

__all__ = [
    "ConformalConstantsReport",
    "constants_grid",
    "derivative_ratio_check",
    "disk_boundary_map",
    "eta_hat",
    "koebe_check",
    "lemma_constants_report",
    "random_pairs",
    "thm47_verify",
    "validation_grid",
]

SLACK = 1.05
GOLDEN = math.pi * (3.0 - math.sqrt(5.0))


def validation_grid(count: int, r_max: float = 0.99) -> np.ndarray:
    """Sunflower grid of ``count`` points in ``|z| <= r_max``."""
    k = np.arange(count)
    r = r_max * np.sqrt((k + 0.5) / count)
    return r * np.exp(1j * GOLDEN * k)


def constants_grid(n_r: int = 8, n_theta: int = 32, r_min: float = 0.5, r_max: float = 0.999) -> np.ndarray:
    """Polar grid over ``r_min <= r <= r_max`` and a full turn of angles."""
    r = 1.0 - np.geomspace(1.0 - r_min, 1.0 - r_max, n_r)
    th = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    return (r[:, None] * np.exp(1j * th[None, :])).ravel()


def random_pairs(count: int, seed: int = 0, r_max: float = 0.99):
    """Seeded pairs of points, uniform in area inside ``|z| <= r_max``."""
    rng = np.random.default_rng(seed)
    r = r_max * np.sqrt(rng.uniform(size=(2, count)))
    th = rng.uniform(0.0, 2.0 * np.pi, size=(2, count))
    z = r * np.exp(1j * th)
    return z[0], z[1]


def _c(p: complex) -> list:
    return [float(p.real), float(p.imag)]


def koebe_check(m: DiskMap, z_grid, slack: float = SLACK) -> dict:
    """``(1-|z|^2)|f'|/4 <= d_f(z) <= (1-|z|^2)|f'|`` up to a factor ``slack``."""
    z = np.atleast_1d(np.asarray(z_grid, dtype=complex)).ravel()
    if np.any(np.abs(z) > 1.0 - 1e-4):
        raise MapError("Koebe grid must lie in |z| <= 1 - 1e-4")
    d = dist_to_boundary(m, z)
    s = (1.0 - np.abs(z) ** 2) * deriv_abs(m, z)
    lower = s / (4.0 * d)  # must be <= 1
    upper = d / s  # must be <= 1
    i, j = int(np.argmax(lower)), int(np.argmax(upper))
    ok = np.isfinite(lower).all() and np.isfinite(upper).all()
    return {
        "points": len(z),
        "slack": slack,
        "lower_ratio": float(lower[i]),
        "lower_witness": _c(z[i]),
        "upper_ratio": float(upper[j]),
        "upper_witness": _c(z[j]),
        "passed": bool(ok and lower[i] <= slack and upper[j] <= slack),
    }


def derivative_ratio_check(m: DiskMap, z1, z2, slack: float = SLACK) -> dict:
    """Two bounds on ``L = log(|f'(z1)| / |f'(z2)|)``, pairwise over the inputs.

    The pair is ordered so that ``r1 <= r2``.  Integrated bound:
    ``L <= 4 r2/(1-r2^2) |alpha-beta| + log((1-r1)/(1-r2)) + log 8``.
    Hyperbolic bound: ``|L| <= 3 lambda(z1, z2)``.  Both get ``log(slack)``.
    """
    a = np.atleast_1d(np.asarray(z1, dtype=complex)).ravel()
    b = np.atleast_1d(np.asarray(z2, dtype=complex)).ravel()
    if a.shape != b.shape:
        raise MapError("z1 and z2 must have the same length")
    swap = np.abs(a) > np.abs(b)
    a, b = np.where(swap, b, a), np.where(swap, a, b)
    r1, r2 = np.abs(a), np.abs(b)
    if np.any(r2 > 1.0 - 1e-4):
        raise MapError("derivative checks need |z| <= 1 - 1e-4")
    da, db = deriv_abs(m, a), deriv_abs(m, b)
    L = np.log(da / db)
    dang = np.abs(np.angle(a * np.conj(b)))
    dang = np.where((r1 == 0) | (r2 == 0), 0.0, dang)
    integrated = 4.0 * r2 / (1.0 - r2**2) * dang + np.log((1.0 - r1) / (1.0 - r2)) + math.log(8.0)
    lam = hyperbolic_distance(a, b)
    tol = math.log(slack)
    m1 = L - integrated
    m2 = np.abs(L) - 3.0 * np.atleast_1d(lam)
    i, j = int(np.argmax(m1)), int(np.argmax(m2))
    return {
        "pairs": len(a),
        "slack": slack,
        "integrated_margin": float(m1[i]),
        "integrated_witness": [_c(a[i]), _c(b[i])],
        "hyperbolic_margin": float(m2[j]),
        "hyperbolic_witness": [_c(a[j]), _c(b[j])],
        "integrated_passed": bool(m1[i] <= tol),
        "hyperbolic_passed": bool(m2[j] <= tol),
        "passed": bool(m1[i] <= tol and m2[j] <= tol),
    }


@dataclass
class ConformalConstantsReport:
    t: float
    N3_hat: float
    M_hat: float
    N_hat: float
    N2_hat: float
    gh_len_ratio: float
    gh_diam_ratio: float
    c_center: float
    witnesses: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _diam(z):
    return float(_kernels.point_set_diameter(np.column_stack([z.real, z.imag])))


def lemma_constants_report(m: DiskMap, t: float, z_grid=None, pairs: int = 100, seed: int = 0,
                           b_boundary: int = 256, b_fill: int = 16, geodesic_samples: int = 64
                           ) -> ConformalConstantsReport:
    """Empirical constants of the interior and boundary distortion estimates.

    ``N3_hat = sup diam f(B(z)) / d_f(z)^t``; ``M_hat = sup |f(z1)-f(z2)| / ((1-r)|f'|)^t``
    and ``N_hat = inf |f(z1)-f(z2)|^t / ((1-r)|f'|)`` with ``z1, z2`` the ends of I(z);
    ``N2_hat = sup diam f(S) / |f(a)-f(b)|^t`` over geodesics S between seeded
    boundary pairs; ``gh_*`` compare f(S) with the image of the boundary arc.
    """
    if not 0.0 < t <= 1.0:
        raise MapError(f"t must lie in (0, 1], got {t}")
    z = constants_grid() if z_grid is None else np.atleast_1d(np.asarray(z_grid, dtype=complex)).ravel()
    r = np.abs(z)
    z = z[(r >= 0.5 - 1e-12) & (r <= 1.0 - 1e-3)]
    if len(z) < 50:
        raise MapError(f"constants grid needs at least 50 points with 1/2 <= |z| <= 1 - 1e-3, got {len(z)}")
    r = np.abs(z)
    geo = [sector(q) for q in z]
    ends = np.array([g.endpoints() for g in geo])
    fe = eval_map(m, ends.ravel()).reshape(ends.shape)
    chord = np.abs(fe[:, 0] - fe[:, 1])
    D = deriv_abs(m, z)
    d = dist_to_boundary(m, z)
    base = (1.0 - r) * D
    Mr = chord / base**t
    Nr = chord**t / base
    pts = np.concatenate([np.concatenate([g.B_boundary(b_boundary), g.B_fill(b_fill)]) for g in geo])
    img = eval_map(m, pts).reshape(len(geo), -1)
    N3 = np.array([_diam(row) for row in img]) / d**t

    rng = np.random.default_rng(seed)
    ang = rng.uniform(0.0, 2.0 * np.pi, size=(pairs, 2))
    N2 = np.empty(pairs)
    glen = np.empty(pairs)
    gdiam = np.empty(pairs)
    for q, (a, b) in enumerate(ang):
        za, zb = np.exp(1j * a), np.exp(1j * b)
        S = eval_map(m, geodesic_between(za, zb, geodesic_samples))
        sec = arc_to_center(a, b)
        arc = np.exp(1j * np.linspace(*sec.I_arc, geodesic_samples))
        Lc = eval_map(m, arc)
        ends_d = abs(S[-1] - S[0])
        dS = _diam(S)
        N2[q] = dS / ends_d**t
        glen[q] = np.abs(np.diff(S)).sum() / np.abs(np.diff(Lc)).sum()
        gdiam[q] = dS / _diam(Lc)

    d0 = float(dist_to_boundary(m, np.array([0j]))[0])
    iM, iN, i3 = int(np.argmax(Mr)), int(np.argmin(Nr)), int(np.argmax(N3))
    i2, il, idm = int(np.argmax(N2)), int(np.argmax(glen)), int(np.argmax(gdiam))
    return ConformalConstantsReport(
        t=float(t),
        N3_hat=float(N3[i3]), M_hat=float(Mr[iM]), N_hat=float(Nr[iN]), N2_hat=float(N2[i2]),
        gh_len_ratio=float(glen[il]), gh_diam_ratio=float(gdiam[idm]),
        c_center=d0 / curve_diameter(m.domain_curve),
        witnesses={"N3": _c(z[i3]), "M": _c(z[iM]), "N": _c(z[iN]),
                   "N2": ang[i2].tolist(), "gh_len": ang[il].tolist(), "gh_diam": ang[idm].tolist()},
        grid={"points": len(z), "r_min": float(r.min()), "r_max": float(r.max()), "pairs": pairs,
              "seed": seed, "b_boundary": b_boundary, "b_fill": b_fill},
    )


def disk_boundary_map(m: DiskMap) -> BoundaryMap:
    """The fitted boundary correspondence as a sampled circle map."""
    th, pts = m.boundary_corr
    order = np.argsort(m.corr_theta, kind="stable")
    cum = m.domain_curve.cumulative_length()
    return BoundaryMap(th, pts, m.domain_curve, "conformal", "chordal", arcpos=cum[m.corr_index[order]])


def eta_hat(k, t: float, M: float, N: float):
    """``(4 pi k e^{4 pi^2 k})^t M / N^t (k pi / 2)^t``, returned as its logarithm."""
    k = np.asarray(k, dtype=float)
    return t * (np.log(4.0 * np.pi * k) + 4.0 * np.pi**2 * k) + math.log(M) - t * math.log(N) \
        + t * np.log(k * np.pi / 2.0)


def _chord_arc(count: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 2.0 * np.pi, count)
    gap = np.concatenate([np.geomspace(1e-6, np.pi, count // 2),
                          rng.uniform(1e-6, np.pi, count - count // 2)])
    worst_lo = worst_hi = -math.inf
    for ai, g in zip(a, gap):
        x = ai + g
        sec = arc_to_center(ai, x)
        u = 1.0 - sec.r
        ch = abs(np.exp(1j * ai) - np.exp(1j * x))
        worst_lo = max(worst_lo, 4.0 * u / ch)
        worst_hi = max(worst_hi, ch / (2.0 * np.pi * u))
    # 1 - r cancels for gaps near 1e-6, leaving ~1e-9 relative error
    return {"pairs": count, "lower_ratio": float(worst_lo), "upper_ratio": float(worst_hi),
            "passed": bool(worst_lo <= 1.0 + 1e-8 and worst_hi <= 1.0 + 1e-8)}


def thm47_verify(m: DiskMap, t: float, triple_budget: float = 1.25e8, constants=None,
                 k_max: float = 16.0, seed: int = 0, threads: int | None = None) -> dict:
    """Boundary distortion at exponent ``t^2`` against the bound built from measured M, N.

    Triples with ``k >= 1`` are binned; each bin maximum is compared with the
    bound at the bin's lower edge (the bound increases with k).
    """
    if constants is None:
        constants = lemma_constants_report(m, t, seed=seed)
    if isinstance(constants, ConformalConstantsReport):
        constants = constants.to_dict()
    try:
        M, N = float(constants["M_hat"]), float(constants["N_hat"])
    except (KeyError, TypeError) as exc:
        raise MapError(f"constants report lacks {exc}") from exc
    if not (math.isfinite(M) and math.isfinite(N) and N > 0):
        raise MapError(f"constants unusable: M_hat={M}, N_hat={N}")

    bmap = disk_boundary_map(m)
    cap = max(32, int(round(triple_budget ** (1.0 / 3.0))))
    steps = int(round(4 * math.log2(k_max)))
    edges = np.concatenate([[0.0, 1.0 - 1e-12], 2.0 ** (np.arange(steps + 1) / 4.0)])
    rep = qs_modulus(bmap, t * t, edges=edges, max_exact=cap, seed=seed, threads=threads)
    worst, worst_bin = -math.inf, None
    for row in rep.rho_bins[1:]:
        if row["max_ratio"] is None:
            continue
        slack = math.log(row["max_ratio"]) - float(eta_hat(max(row["k_lo"], 1.0), t, M, N))
        if slack > worst:
            worst, worst_bin = slack, row
    fit = eta_shape_fit(rep)
    chord_arc = _chord_arc(2000, seed)
    k1 = rep.rho_bins[1]["max_ratio"]
    passed = worst <= 0.0 and fit["passed"] and chord_arc["passed"] and N > 0
    return {
        "t": float(t),
        "exponent": float(t * t),
        "M_hat": M,
        "N_hat": N,
        "worst_log_slack": float(worst),
        "worst_bin": worst_bin,
        "ratio_at_k1": k1,
        "bins": rep.rho_bins,
        "eta_fit": fit,
        "chord_arc": chord_arc,
        "samples": rep.samples,
        "strategy": rep.strategy,
        "triples": rep.triples_scanned,
        "passed": bool(passed),
    }
