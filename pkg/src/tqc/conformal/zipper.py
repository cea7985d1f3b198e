"""Numerical Riemann map of the disk onto a polygonal Jordan domain.

The map is built with the geodesic zipper: a first square-root map opens the
edge ``z0 z1``, then one slit map per vertex pulls the boundary onto the real
line, and a final square plus a Moebius map land in the unit disk.  Only the
inverse chain (disk to domain) is used for evaluation; it has no branch
ambiguity for interior points.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.ops import polylabel

from .. import _kernels
from ..curves import ClosedCurve, curve_diameter, ensure_ccw
from ..errors import MapError, ValidationFailure

__all__ = ["DiskMap", "zipper_fit", "eval_map", "deriv_abs", "dist_to_boundary", "default_center"]

BOUNDARY_RADIUS = 1.0 - 1e-9
# a new vertex whose image is this close (relatively) to the real line is
# treated as unresolved: its position is lost in rounding
RESOLVE_TOL = 1e-8
# arcs longer than this multiple of their chord are thin channels whose
# interior is conformally invisible in double precision
MAX_DETOUR = 20.0
DENSIFY_TO = 1024


def default_center(curve: ClosedCurve) -> complex:
    """Interior point of (nearly) maximal distance to the boundary."""
    diam = curve_diameter(curve)
    p = polylabel(shapely.Polygon(curve.vertices), tolerance=1e-3 * diam)
    return complex(p.x, p.y)


@dataclass(frozen=True, eq=False)
class DiskMap:
    """Conformal map ``f`` of the unit disk onto the inside of ``domain_curve``.

    ``f(0) = center_image`` and ``f'(0) > 0``.  ``corr_index`` lists the
    curve vertices whose preimages were resolved, with circle angles
    ``corr_theta`` (strictly increasing after sorting by angle).
    """

    domain_curve: ClosedCurve
    source_curve: ClosedCurve
    source_index: np.ndarray
    z0: complex
    z1: complex
    inv_b: np.ndarray
    c: np.ndarray
    scale: np.ndarray
    inv_zeta: float
    w_center: complex
    rotation: float
    center_image: complex
    start: int
    corr_index: np.ndarray
    corr_theta: np.ndarray
    unresolved: int
    truncated: int = 0
    validation: dict = field(default_factory=dict, repr=False)

    @property
    def stage_count(self) -> int:
        return len(self.inv_b)

    @property
    def boundary_corr(self):
        """``(theta, point)`` pairs sorted by angle in ``[0, 2pi)``."""
        order = np.argsort(self.corr_theta, kind="stable")
        pts = self.domain_curve.vertices[self.corr_index[order]]
        return self.corr_theta[order], pts

    @property
    def min_spacing(self) -> float:
        """Smallest gap between consecutive resolved boundary angles."""
        th = np.sort(self.corr_theta)
        gaps = np.diff(np.concatenate([th, [th[0] + 2.0 * np.pi]]))
        return float(gaps.min())

    def _unrotated(self, q):
        wc = self.w_center
        w = (wc - q * np.conj(wc)) / (1.0 - q)
        return _kernels.zipper_inverse(w, self.z0, self.z1, self.inv_b, self.c, self.scale, self.inv_zeta)

    def __call__(self, z):
        return eval_map(self, z)

    def drop_stage(self, k: int) -> "DiskMap":
        """A deliberately corrupted copy with stage ``k`` removed (negative control)."""
        keep = np.ones(self.stage_count, dtype=bool)
        keep[k] = False
        return _replace(self, inv_b=self.inv_b[keep], c=self.c[keep],
                        scale=self.scale[keep], validation={})

    def to_dict(self) -> dict:
        th, pts = self.boundary_corr
        return {
            "z0": [self.z0.real, self.z0.imag],
            "z1": [self.z1.real, self.z1.imag],
            "inv_b": self.inv_b.tolist(),
            "c": self.c.tolist(),
            "scale": self.scale.tolist(),
            "inv_zeta": self.inv_zeta,
            "w_center": [self.w_center.real, self.w_center.imag],
            "rotation": self.rotation,
            "center_image": [self.center_image.real, self.center_image.imag],
            "start": self.start,
            "unresolved": self.unresolved,
            "truncated": self.truncated,
            "min_spacing": self.min_spacing,
            "boundary_corr": [{"theta": float(t), "x": float(p[0]), "y": float(p[1])}
                              for t, p in zip(th, pts)],
            "corr_index": self.corr_index.tolist(),
            "corr_theta": self.corr_theta.tolist(),
            "domain_curve": self.domain_curve.vertices.tolist(),
            "source_curve": self.source_curve.vertices.tolist(),
            "source_index": self.source_index.tolist(),
            "validation": self.validation,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "DiskMap":
        cplx = lambda p: complex(p[0], p[1])
        return cls(
            domain_curve=ClosedCurve(np.asarray(d["domain_curve"], dtype=float)),
            source_curve=ClosedCurve(np.asarray(d["source_curve"], dtype=float)),
            source_index=np.asarray(d["source_index"], dtype=np.int64),
            z0=cplx(d["z0"]), z1=cplx(d["z1"]),
            inv_b=np.asarray(d["inv_b"], dtype=float), c=np.asarray(d["c"], dtype=float),
            scale=np.asarray(d["scale"], dtype=float),
            inv_zeta=float(d["inv_zeta"]), w_center=cplx(d["w_center"]),
            rotation=float(d["rotation"]), center_image=cplx(d["center_image"]),
            start=int(d["start"]), corr_index=np.asarray(d["corr_index"], dtype=np.int64),
            corr_theta=np.asarray(d["corr_theta"], dtype=float),
            unresolved=int(d["unresolved"]), truncated=int(d.get("truncated", 0)),
            validation=d.get("validation", {}),
        )


def _replace(m: DiskMap, **kw) -> DiskMap:
    fields = {k: getattr(m, k) for k in m.__dataclass_fields__}
    fields.update(kw)
    return DiskMap(**fields)


def _as_complex(z):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return z.astype(complex)
    if z.ndim >= 1 and z.shape[-1] == 2:
        return z[..., 0] + 1j * z[..., 1]
    return z.astype(complex)


def eval_map(m: DiskMap, z):
    """``f(z)`` for complex ``z`` with ``|z| <= 1``; boundary points use r = 1 - 1e-9."""
    z = _as_complex(z)
    shape = np.shape(z)
    q = np.atleast_1d(z).ravel()
    r = np.abs(q)
    if np.any(r > 1.0 + 1e-12):
        raise MapError("eval needs |z| <= 1")
    q = np.where(r > BOUNDARY_RADIUS, q / np.where(r > 0, r, 1.0) * BOUNDARY_RADIUS, q)
    out = m._unrotated(np.exp(-1j * m.rotation) * q)
    return out.reshape(shape) if shape else complex(out[0])


def deriv_abs(m: DiskMap, z):
    """``|f'(z)|`` by central differences, step 1e-4 (1-|z|), one Richardson step."""
    z = np.atleast_1d(_as_complex(z)).ravel()
    if np.any(np.abs(z) > 1.0 - 1e-6):
        raise MapError("deriv_abs needs |z| <= 1 - 1e-6")
    h = 1e-4 * (1.0 - np.abs(z))
    f = lambda q: m._unrotated(np.exp(-1j * m.rotation) * q)
    d1 = (f(z + h) - f(z - h)) / (2.0 * h)
    d2 = (f(z + h / 2) - f(z - h / 2)) / h
    return np.abs((4.0 * d2 - d1) / 3.0)


def dist_to_boundary(m: DiskMap, z):
    """Distance from ``f(z)`` to the domain polyline."""
    w = np.atleast_1d(eval_map(m, np.atleast_1d(_as_complex(z))))
    return m.domain_curve.distance_to(np.column_stack([w.real, w.imag]))


def _slit_real(x, ib, cc):
    # real-line action of one stage; 0 goes to the interior side -c
    u = x / (1.0 - x * ib)
    return np.where(u <= 0, -1.0, 1.0) * np.sqrt(u * u + cc * cc)


def _channel_mask(curve: ClosedCurve, max_detour: float) -> np.ndarray:
    """Vertices strictly inside some arc whose length exceeds ``max_detour`` x chord."""
    n = curve.n
    cum = curve.cumulative_length()
    total = cum[-1]
    s = cum[:-1]
    v = curve.vertices
    cover = np.zeros(n + 1, dtype=np.int64)
    for lo in range(0, n, 256):
        rows = np.arange(lo, min(n, lo + 256))
        ahead = np.mod(s[None, :] - s[rows, None], total)  # arc from i forward to j
        chord = np.hypot(v[None, :, 0] - v[rows, None, 0], v[None, :, 1] - v[rows, None, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            bad = (ahead <= total - ahead) & (ahead > max_detour * chord)
        for r, i in enumerate(rows):
            js = np.nonzero(bad[r])[0]
            if len(js) == 0:
                continue
            far = int(js[np.argmax(ahead[r, js])])
            # mark i+1 .. far-1 (cyclic)
            a, b = i + 1, i + ((far - i) % n)
            if b <= a:
                continue
            if b <= n:
                cover[a] += 1
                cover[b] -= 1
            else:
                cover[a] += 1
                cover[n] -= 1
                cover[0] += 1
                cover[b - n] -= 1
    return np.cumsum(cover[:-1]) > 0


def _densify(v: np.ndarray, src: np.ndarray, target: int):
    if len(v) >= target:
        return v, src
    w = np.roll(v, -1, axis=0)
    ln = np.hypot(*(w - v).T)
    h = ln.sum() / target
    pieces = np.maximum(1, np.ceil(ln / h - 1e-9).astype(int))
    out, idx = [], []
    for k in range(len(v)):
        lam = np.arange(pieces[k]) / pieces[k]
        out.append(v[k] + lam[:, None] * (w[k] - v[k]))
        idx.append(np.concatenate([[src[k]], np.full(pieces[k] - 1, -1)]))
    return np.concatenate(out), np.concatenate(idx)


def prepare_domain(curve, max_detour=MAX_DETOUR, densify_to=DENSIFY_TO):
    """Polyline actually handed to the zipper, with source vertex indices (-1 if inserted).

    Thin channels (see ``MAX_DETOUR``) are cut off by their chord and long
    edges are split so that the vertex count reaches ``densify_to``.
    """
    curve = ensure_ccw(curve)
    src = np.arange(curve.n)
    v = curve.vertices
    if max_detour:
        drop = _channel_mask(curve, max_detour)
        if drop.all() or (~drop).sum() < 3:
            raise MapError("channel truncation removed the whole curve")
        v, src = v[~drop], src[~drop]
    v, src = _densify(v, src, int(densify_to or 0))
    # keep a source vertex first so vertex 0 stays meaningful
    try:
        dom = ClosedCurve(v)
    except Exception as exc:  # noqa: BLE001 - report as a map error
        raise MapError(f"prepared domain is not a simple polygon: {exc}") from exc
    return curve, dom, src


def zipper_fit(curve, center_hint=None, validate=True, grid=None,
               max_detour=MAX_DETOUR, densify_to=DENSIFY_TO) -> DiskMap:
    """Fit the disk map onto the inside of ``curve``.

    The zipper starts at the vertex nearest the centre.  Vertices whose images
    collapse onto the real line in floating point (severe crowding, e.g. deep
    in a cusp) are skipped and counted in ``unresolved``.  With ``validate``
    the Koebe sandwich is checked on a 50-point grid and a
    :class:`ValidationFailure` is raised if it fails.
    """
    curve = ensure_ccw(curve)
    if curve.n < 64:
        raise MapError(f"zipper_fit needs at least 64 vertices, got {curve.n}")
    source, curve, source_index = prepare_domain(curve, max_detour, densify_to)
    n = curve.n
    center = default_center(curve) if center_hint is None else complex(np.atleast_1d(_as_complex(center_hint)).ravel()[0])
    if not shapely.Polygon(curve.vertices).contains(shapely.Point(center.real, center.imag)):
        raise MapError(f"centre {center} is not inside the curve")
    zall = curve.z
    start = int(np.argmin(np.abs(zall - center)))
    order = (start + np.arange(n)) % n
    zs = zall[order]
    z0, z1 = zs[0], zs[1]

    with np.errstate(all="ignore"):
        w = 1j * np.sqrt((zs[2:] - z1) / (zs[2:] - z0))
        wcen = 1j * np.sqrt((center - z1) / (center - z0))
    inv_b, cs, scales = [], [], []
    xs = np.full(n, np.nan)
    xs[1] = 0.0
    zipped = [1]
    zeta_inf, zeta = True, 0.0
    skipped = 0
    for k in range(n - 2):
        a = w[k]
        aa = a.real * a.real + a.imag * a.imag
        if not (a.imag > RESOLVE_TOL * np.sqrt(aa)) or not np.isfinite(aa):
            skipped += 1
            continue
        ib = a.real / aa
        cc = aa / a.imag
        inv_b.append(ib)
        cs.append(cc)
        # renormalise by |a| so the images stay O(1) over many stages
        sc = np.sqrt(aa)
        scales.append(sc)
        idx = np.asarray(zipped)
        xs[idx] = _slit_real(xs[idx], ib, cc) / sc
        xs[k + 2] = 0.0
        zipped.append(k + 2)
        tail = w[k + 1:]
        with np.errstate(all="ignore"):
            u = tail / (1.0 - tail * ib)
            w[k + 1:] = u * np.sqrt(1.0 + (cc / u) ** 2) / sc
            u = wcen / (1.0 - wcen * ib)
            wcen = u * np.sqrt(1.0 + (cc / u) ** 2) / sc
        if zeta_inf:
            if ib != 0.0:
                u0 = -1.0 / ib
                zeta_inf, zeta = False, float(np.copysign(np.hypot(u0, cc), u0)) / sc
        else:
            zeta = float(_slit_real(np.array([zeta]), ib, cc)[0]) / sc
    inv_b = np.asarray(inv_b)
    cs = np.asarray(cs)
    scales = np.asarray(scales)
    inv_zeta = 0.0 if zeta_inf else 1.0 / zeta
    v = wcen / (1.0 - wcen * inv_zeta)
    w_center = -(v * v)
    if not (w_center.imag > 0 and np.isfinite(w_center)):
        raise MapError("centre image left the upper half-plane; the fit is unusable")

    # boundary correspondence from the real-line images
    idx = np.asarray(zipped)
    v = xs[idx] / (1.0 - xs[idx] * inv_zeta)
    wb = -(v * v)
    tb = (wb - w_center) / (wb - np.conj(w_center))
    rel = np.mod(np.angle(tb), 2.0 * np.pi)  # angle relative to the image of z0
    keep = [0]
    rel = np.concatenate([[0.0], rel])
    idx = np.concatenate([[0], idx])
    last = 0.0
    for j in range(1, len(idx)):
        if rel[j] > last and rel[j] < 2.0 * np.pi:
            keep.append(j)
            last = rel[j]
    keep = np.asarray(keep)

    m = DiskMap(
        domain_curve=curve, source_curve=source, source_index=source_index,
        truncated=int(source.n - np.sum(source_index >= 0)), z0=z0, z1=z1, inv_b=inv_b, c=cs, scale=scales, inv_zeta=inv_zeta,
        w_center=w_center, rotation=0.0, center_image=center, start=start,
        corr_index=order[idx[keep]], corr_theta=rel[keep], unresolved=n - len(keep),
    )
    # rotate so that f'(0) > 0
    h = 1e-6
    d0 = (m._unrotated(np.array([h])) - m._unrotated(np.array([-h])))[0] / (2 * h)
    phi = float(np.angle(d0))
    theta = np.mod(m.corr_theta + phi, 2.0 * np.pi)
    m = _replace(m, rotation=phi, corr_theta=theta)
    if validate:
        from .checks import koebe_check, validation_grid
        rep = koebe_check(m, validation_grid(50) if grid is None else grid)
        m = _replace(m, validation=rep)
        if not rep["passed"]:
            raise ValidationFailure("Koebe sandwich failed on the validation grid", rep)
    return m
