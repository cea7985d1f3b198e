"""Hyperbolic geometry of the unit disk, harmonic measure and the sector sets
B(z), I(z), A(z) attached to a point of the disk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ..errors import MapError

__all__ = [
    "SectorGeometry",
    "arc_to_center",
    "delta_grid",
    "geodesic_between",
    "geodesic_nearest_delta",
    "harmonic_measure",
    "harmonic_grid",
    "hyperbolic_distance",
    "sector",
]

TWO_PI = 2.0 * math.pi
RADII = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)
OMEGA_FLOOR = 1.0 / (18.0 * math.pi**2)
LAMBDA_CEIL = 0.5 * math.log(math.pi)


def hyperbolic_distance(z, w):
    """``1/2 log((1+s)/(1-s))`` with ``s = |z-w| / |1 - conj(z) w|``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(w) >= 1):
        raise MapError("hyperbolic distance needs points strictly inside the disk")
    s = np.abs(z - w) / np.abs(1.0 - np.conj(z) * w)
    out = np.arctanh(s)
    return float(out) if out.ndim == 0 else out


def geodesic_nearest_delta(r: float) -> float:
    """Distance from 0 to the geodesic joining the ends of I(r): ``(1 - sin h)/cos h``, ``h = pi(1-r)``."""
    if not 0.5 <= r < 1.0:
        raise MapError(f"r must lie in [1/2, 1), got {r}")
    if r == 0.5:
        return 0.0
    h = math.pi * (1.0 - r)
    return (1.0 - math.sin(h)) / math.cos(h)


def _wrap(a):
    return (a + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class SectorGeometry:
    """The sets attached to ``z = r e^{i alpha}``.

    ``I`` is the arc ``|theta - alpha| <= pi(1-r)``, ``B`` the polar box
    ``r <= rho <= 1`` over ``I``, and ``A`` the two arcs
    ``3pi/2 (1-r) <= |theta - alpha| <= 2pi(1-r)``.
    """

    r: float
    alpha: float

    @property
    def z(self) -> complex:
        return self.r * complex(math.cos(self.alpha), math.sin(self.alpha))

    @property
    def half_width(self) -> float:
        return math.pi * (1.0 - self.r)

    @property
    def I_arc(self) -> tuple:
        return (self.alpha - self.half_width, self.alpha + self.half_width)

    @property
    def A_arcs(self) -> tuple:
        u = 1.0 - self.r
        a = self.alpha
        return ((a + 1.5 * math.pi * u, a + 2.0 * math.pi * u),
                (a - 2.0 * math.pi * u, a - 1.5 * math.pi * u))

    def endpoints(self) -> tuple:
        lo, hi = self.I_arc
        return complex(math.cos(lo), math.sin(lo)), complex(math.cos(hi), math.sin(hi))

    def in_B(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        rho = np.abs(w)
        ang = np.abs(_wrap(np.angle(w) - self.alpha))
        return (rho >= self.r - 1e-15) & (rho <= 1.0 + 1e-15) & (ang <= self.half_width + 1e-15)

    def B_boundary(self, count: int = 256, rho_max: float = 1.0) -> np.ndarray:
        """``count`` points around the boundary of B (two radial sides, two circular sides)."""
        q = count // 4
        lo, hi = self.I_arc
        th_in = np.linspace(lo, hi, q, endpoint=False)
        th_out = np.linspace(hi, lo, q, endpoint=False)
        rad_up = np.linspace(self.r, rho_max, q, endpoint=False)
        rad_dn = np.linspace(rho_max, self.r, count - 3 * q, endpoint=False)
        return np.concatenate([
            self.r * np.exp(1j * th_in),
            rad_up * np.exp(1j * hi),
            rho_max * np.exp(1j * th_out),
            rad_dn * np.exp(1j * lo),
        ])

    def B_fill(self, k: int = 16, rho_max: float = 1.0) -> np.ndarray:
        """A ``k x k`` polar grid over B."""
        rho = np.linspace(self.r, rho_max, k)
        th = np.linspace(*self.I_arc, k)
        return (rho[:, None] * np.exp(1j * th[None, :])).ravel()


def sector(z) -> SectorGeometry:
    z = complex(z)
    r = abs(z)
    if not 0.0 < r < 1.0:
        raise MapError(f"sector needs 0 < |z| < 1, got {r}")
    return SectorGeometry(r=r, alpha=math.atan2(z.imag, z.real))


def arc_to_center(a: float, x: float) -> SectorGeometry:
    """The point whose arc I is the shorter arc between angles ``a`` and ``x``.

    Antipodal pairs take the arc running counter-clockwise from ``a``.
    """
    d = (x - a) % TWO_PI
    if d == 0.0:
        raise MapError("arc_to_center needs distinct angles")
    if d <= math.pi:
        length, mid = d, a + 0.5 * d
    else:
        length, mid = TWO_PI - d, x + 0.5 * (TWO_PI - d)
    return SectorGeometry(r=1.0 - length / TWO_PI, alpha=_wrap(mid))


def harmonic_measure(z, arcs, tol: float = 1e-10) -> float:
    """Poisson-kernel mass of the union of angle intervals ``arcs`` seen from ``z``."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise MapError("harmonic measure needs |z| < 1")
    r2 = abs(z) ** 2
    peak = math.atan2(z.imag, z.real)

    def kernel(t):
        return (1.0 - r2) / abs(complex(math.cos(t), math.sin(t)) - z) ** 2

    total = 0.0
    for lo, hi in arcs:
        lo, hi = float(lo), float(hi)
        if hi < lo:
            raise MapError(f"arc ({lo}, {hi}) has negative length")
        if hi - lo > TWO_PI + 1e-12:
            raise MapError(f"arc ({lo}, {hi}) is longer than the circle")
        # split at the kernel peaks so quadrature sees the spike
        k = math.ceil((lo - peak) / TWO_PI)
        peaks = [pk for pk in (peak + k * TWO_PI, peak + (k + 1) * TWO_PI) if lo < pk < hi]
        cuts = [lo] + peaks + [hi]
        for u, v in zip(cuts[:-1], cuts[1:]):
            val, _ = quad(kernel, u, v, epsabs=tol, epsrel=tol, limit=200)
            total += val
    return total / TWO_PI


def geodesic_between(z1, z2, samples: int = 64) -> np.ndarray:
    """Points along the hyperbolic geodesic from ``z1`` to ``z2`` (closed disk), endpoints included."""
    z1, z2 = complex(z1), complex(z2)
    if z1 == z2:
        raise MapError("geodesic needs two distinct points")
    if max(abs(z1), abs(z2)) > 1.0 + 1e-12:
        raise MapError("geodesic endpoints must lie in the closed disk")
    u = np.linspace(0.0, 1.0, samples)
    on1, on2 = abs(z1) >= 1.0 - 1e-15, abs(z2) >= 1.0 - 1e-15
    if on1 and on2:
        a, b = np.angle(z1), np.angle(z2)
        half = 0.5 * abs(_wrap(b - a))
        if abs(half - 0.5 * math.pi) < 1e-15:
            pts = z1 + u * (z2 - z1)  # diameter
        else:
            mid = a + _wrap(b - a) / 2.0
            c = complex(math.cos(mid), math.sin(mid)) / math.cos(half)
            rad = math.tan(half)
            p1, p2 = np.angle(z1 - c), np.angle(z2 - c)
            sweep = _wrap(p2 - p1)
            pts = c + rad * np.exp(1j * (p1 + u * sweep))
    else:
        if on1:
            return geodesic_between(z2, z1, samples)[::-1]
        # move z1 to 0, where geodesics are radii
        w2 = (z2 - z1) / (1.0 - np.conj(z1) * z2)
        s = u * w2
        pts = (s + z1) / (1.0 + np.conj(z1) * s)
    pts[0], pts[-1] = z1, z2
    return pts


def harmonic_grid(radii=RADII, n_alpha: int = 8) -> dict:
    """``omega(z, A(z))`` over ``z = r e^{i alpha}`` against the floor ``1/(18 pi^2)``."""
    rows = []
    for r in radii:
        for a in TWO_PI * np.arange(n_alpha) / n_alpha:
            g = SectorGeometry(float(r), float(a))
            rows.append({"r": float(r), "alpha": float(a), "omega": harmonic_measure(g.z, g.A_arcs)})
    low = min(rows, key=lambda q: q["omega"])
    return {"rows": rows, "min_omega": low["omega"], "witness": low, "floor": OMEGA_FLOOR,
            "passed": bool(low["omega"] >= OMEGA_FLOOR)}


def delta_grid(radii=RADII) -> dict:
    """``delta(r)`` and ``lambda = hyperbolic_distance(r, delta)`` against ``1/2 log pi``."""
    rows = []
    for r in radii:
        d = geodesic_nearest_delta(float(r))
        rows.append({"r": float(r), "delta": d, "lambda": hyperbolic_distance(float(r), d)})
    high = max(rows, key=lambda q: q["lambda"])
    ok = high["lambda"] <= LAMBDA_CEIL and all(q["delta"] < q["r"] for q in rows)
    return {"rows": rows, "max_lambda": high["lambda"], "witness": high, "ceiling": LAMBDA_CEIL,
            "passed": bool(ok)}
