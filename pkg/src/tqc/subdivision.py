"""Greedy subdivision of a curve into pieces of comparable diameter, the
hierarchical sub-arc tree, and the (astronomically large) theoretical constants.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .curves import ArcSpan, ClosedCurve, curve_diameter, is_normalized
from .errors import CurveError

__all__ = [
    "SubarcTree",
    "SubdivisionConstants",
    "TreeConstants",
    "build_tree",
    "equalize_count",
    "greedy_subdivide",
    "h_count",
    "halving_holds",
    "theoretical_constants",
    "tree_constants",
    "verify_tree",
]


def h_count(alpha: float) -> float:
    """Covering count of the plane: ``4 (alpha sqrt2 + 1)**2``."""
    return 4.0 * (alpha * math.sqrt(2.0) + 1.0) ** 2


@dataclass(frozen=True)
class SubdivisionConstants:
    C: float
    t: float
    eps: float
    p: int
    log2_delta: float
    h_alpha: float

    @property
    def delta(self) -> float:
        return 2.0**self.log2_delta

    def to_dict(self) -> dict:
        return {"C": self.C, "t": self.t, "eps": self.eps, "p": self.p,
                "delta": {"value": self.log2_delta, "log2": True}, "h_alpha": self.h_alpha}


@dataclass(frozen=True)
class TreeConstants:
    p: int
    C: float
    log2_mu: int
    m: int
    n: int
    N_alphabet: int
    log2_c: int
    log2_R: float

    @property
    def mu(self) -> int:
        return 2**self.log2_mu

    def inequalities(self) -> dict:
        # 2**n >= mu**m  <=>  n >= m log2(mu); 4n+3 <= p**m, exact integers
        return {"two_n_ge_mu_m": self.n >= self.m * self.log2_mu,
                "four_n_plus_3_le_p_m": 4 * self.n + 3 <= self.p**self.m}

    def to_dict(self) -> dict:
        n_big = self.N_alphabet.bit_length() > 52
        return {
            "p": self.p, "C": self.C, "m": self.m, "n": self.n,
            "mu": {"value": self.log2_mu, "log2": True},
            "N": {"value": math.log2(self.N_alphabet), "log2": True} if n_big else self.N_alphabet,
            "c": {"value": self.log2_c, "log2": True},
            "R": {"value": self.log2_R, "log2": True},
            "inequalities": self.inequalities(),
        }


def theoretical_constants(C: float, t: float, eps: float) -> SubdivisionConstants:
    if C < 1 or not 0 < t <= 1 or not 0 < eps < 1:
        raise CurveError("need C >= 1, t in (0, 1] and eps in (0, 1)")
    h = h_count((4.0 * C / eps) ** (1.0 / t))
    p = int(math.ceil(h))
    return SubdivisionConstants(C=float(C), t=float(t), eps=float(eps), p=p,
                                log2_delta=-(p + 1) + math.log2(eps), h_alpha=h)


def tree_constants(p: int, C: float = 1.0) -> TreeConstants:
    """Alphabet size and the tree-map constant ``R = 8 N c**(5N) C`` (log2).

    ``m`` starts at 2 with ``n = ceil(m log2 mu)``; both double until
    ``4n + 3 <= p**m``.
    """
    p = int(p)
    if p < 2:
        raise CurveError(f"p must be >= 2, got {p}")
    log2_mu = p + 1
    m = 2
    n = m * log2_mu
    while 4 * n + 3 > p**m:
        m *= 2
        n *= 2
    big_n = p**m + 2 * n * (p - 1)
    log2_c = (m + 2) * log2_mu
    log2_r = math.log2(8 * big_n) + 5 * big_n * log2_c + math.log2(C)
    return TreeConstants(p=p, C=float(C), log2_mu=log2_mu, m=m, n=n, N_alphabet=big_n,
                         log2_c=log2_c, log2_R=log2_r)


# ---------------------------------------------------------------------------
# greedy pieces


def _span(start, m, n):
    return ArcSpan(start % n, (start + m) % n, "positive")


def _span_diam(v, start, m):
    n = len(v)
    return float(_kernels.prefix_diameters(v[(start + np.arange(m + 1)) % n])[-1])


def greedy_subdivide(curve: ClosedCurve, eps: float, start: int = 0) -> list[ArcSpan]:
    """Consecutive pieces covering the curve, each of diameter in [eps/8, eps].

    From the current start vertex the piece grows while every vertex stays in
    the closed ball of radius eps/4 about it.  A final short fragment is merged
    into the previous piece.  Edges must be at most eps/8 long.
    """
    if not 0.0 < eps < 1.0:
        raise CurveError(f"eps must lie in (0, 1), got {eps}")
    if not is_normalized(curve):
        raise CurveError("greedy_subdivide needs a curve of diameter 1 (normalize_unit_diameter)")
    n = curve.n
    if curve.edge_lengths().max() > eps / 8.0:
        raise CurveError(f"edges longer than eps/8 = {eps / 8:.4g}; resample the curve first")
    v = np.roll(curve.vertices, -int(start), axis=0)
    v = np.concatenate([v, v[:1]])
    pieces = []  # (offset, edge count)
    s = 0
    radius = eps / 4.0
    while s < n:
        d = np.hypot(v[s:, 0] - v[s, 0], v[s:, 1] - v[s, 1])
        out = np.flatnonzero(d > radius)
        j = s + (int(out[0]) - 1 if len(out) else len(d) - 1)
        j = max(j, s + 1)
        pieces.append((s, j - s))
        s = j
    if len(pieces) > 1:
        last = pieces[-1]
        if _span_diam(v[:-1], last[0], last[1]) < eps / 8.0:
            prev = pieces[-2]
            pieces[-2:] = [(prev[0], prev[1] + last[1])]
    return [_span(int(start) + a, m, n) for a, m in pieces]


def _balanced_split(v, start, m):
    """Interior offset k minimizing max(diam[start..start+k], diam[start+k..start+m])."""
    n = len(v)
    seq = v[(start + np.arange(m + 1)) % n]
    fwd = _kernels.prefix_diameters(seq)
    bwd = _kernels.prefix_diameters(seq[::-1])[::-1]
    f, b = fwd[1:m], bwd[1:m]
    k = np.arange(1, m)
    # ties (e.g. a closed loop, where every split keeps a long chord) go to the
    # most even diameters, then the most even vertex counts
    best = np.lexsort((np.abs(2 * k - m), np.abs(f - b), np.maximum(f, b)))[0]
    return int(k[best])


def _split_until(v, pieces, target, minima=None):
    diams = [_span_diam(v, a, m) for a, m in pieces]
    if minima is not None:
        minima.append(min(diams))
    while len(pieces) < target:
        order = sorted(range(len(pieces)), key=lambda q: (-diams[q], q))
        q = next((q for q in order if pieces[q][1] >= 2), None)
        if q is None:
            raise CurveError("not enough vertices to split further")
        a, m = pieces[q]
        k = _balanced_split(v, a, m)
        left, right = (a, k), ((a + k) % len(v), m - k)
        pieces[q:q + 1] = [left, right]
        diams[q:q + 1] = [_span_diam(v, *left), _span_diam(v, *right)]
        if minima is not None:
            minima.append(min(diams))
    return pieces


def equalize_count(curve: ClosedCurve, pieces: list[ArcSpan], p: int, minima: list | None = None
                   ) -> list[ArcSpan]:
    """Split the largest piece at its balancing vertex until there are ``p`` pieces.

    Each step splits one piece, so the result for ``p + 1`` refines the one
    for ``p``.  If ``minima`` is a list, the smallest piece diameter before
    the first split and after every split is appended to it.
    """
    if p < len(pieces):
        raise CurveError(f"target count {p} is below the current count {len(pieces)}")
    n = curve.n
    raw = [(s.positive(n).start, s.edge_count(n)) for s in pieces]
    raw = _split_until(curve.vertices, raw, int(p), minima)
    return [_span(a, m, n) for a, m in raw]


def halving_holds(minima) -> bool:
    """True when no split step drops the smallest diameter below half its previous value."""
    m = np.asarray(minima, dtype=float)
    return bool(np.all(m[1:] >= 0.5 * m[:-1]))


# ---------------------------------------------------------------------------
# sub-arc tree


@dataclass
class SubarcTree:
    curve: ClosedCurve
    branching: int
    depth: int
    nodes: dict = field(default_factory=dict)  # word tuple -> (start, edge count)

    def span(self, word) -> ArcSpan:
        a, m = self.nodes[tuple(word)]
        if m == self.curve.n:
            return ArcSpan(a, a)
        return _span(a, m, self.curve.n)

    def level(self, ell: int) -> list[tuple]:
        return sorted(w for w in self.nodes if len(w) == ell)

    def leaves(self) -> list[tuple]:
        return self.level(self.depth)

    def diameter(self, word) -> float:
        a, m = self.nodes[tuple(word)]
        return _span_diam(self.curve.vertices, a, m)

    def to_dict(self) -> dict:
        return {
            "branching": self.branching,
            "depth": self.depth,
            "nodes": [{"word": list(w), "start": a, "end": (a + m) % self.curve.n}
                      for w, (a, m) in sorted(self.nodes.items(), key=lambda kv: (len(kv[0]), kv[0]))],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def build_tree(curve: ClosedCurve, branching: int, depth: int) -> SubarcTree:
    """Split every node into ``branching`` consecutive children, largest piece first."""
    branching, depth = int(branching), int(depth)
    if branching < 2 or depth < 1:
        raise CurveError("need branching >= 2 and depth >= 1")
    n = curve.n
    if branching**depth > n:
        raise CurveError(f"{branching}**{depth} leaves need at least that many edges; curve has {n}")
    v = curve.vertices
    tree = SubarcTree(curve=curve, branching=branching, depth=depth, nodes={(): (0, n)})
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            a, m = tree.nodes[w]
            if m < branching:
                raise CurveError(f"node {w} has {m} edges, cannot split into {branching}")
            kids = _split_until(v, [(a, m)], branching)
            for sym, kid in enumerate(kids, start=1):
                tree.nodes[w + (sym,)] = kid
                nxt.append(w + (sym,))
        frontier = nxt
    return tree


def verify_tree(tree: SubarcTree, prop3_max: float | None = None, prop4_max: float | None = None) -> dict:
    """Measured ratios for the halving property and the neighbour comparability property."""
    diam = curve_diameter(tree.curve)
    p3, p3_word = 0.0, None
    p4, p4_pair = 1.0, None
    for ell in range(1, tree.depth + 1):
        words = tree.level(ell)
        ds = np.array([tree.diameter(w) for w in words])
        r3 = ds * 2.0**ell / diam
        k = int(np.argmax(r3))
        if r3[k] > p3:
            p3, p3_word = float(r3[k]), list(words[k])
        nb = np.roll(ds, -1)  # includes the wrap-around pair
        ratio = np.maximum(ds, nb) / np.minimum(ds, nb)
        k = int(np.argmax(ratio))
        if ratio[k] > p4:
            p4, p4_pair = float(ratio[k]), [list(words[k]), list(words[(k + 1) % len(words)])]
    rep = {"prop3_ratio": p3, "prop3_witness": p3_word,
           "prop4_ratio": p4, "prop4_witness": p4_pair, "leaves": len(tree.leaves())}
    passed = True
    if prop3_max is not None:
        passed &= p3 <= prop3_max
    if prop4_max is not None:
        passed &= p4 <= prop4_max
    rep["passed"] = bool(passed)
    return rep
