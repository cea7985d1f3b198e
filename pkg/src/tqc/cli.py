"""Command-line entry point: ``tqc <verb> [options]``.

Exit status is 0 on success, 2 when a numerical check fails and 1 on usage
errors or malformed input.  Every JSON report is wrapped with the tool
version, the command line, the seed, the metric and hashes of input files.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import __version__, _kernels
from .curves import ClosedCurve, arc_diameter, normalize_unit_diameter, resample_arclength
from .errors import InputError, TQCError, ValidationFailure
from .generators import KINDS, CurveSpec, adaptive_cusp_sampling, generate
from .io import curve_to_dict, dumps, envelope, load_curve, load_json, load_map, map_svg, write_text
from .parametrize import PLHomeo, arclength_param, build_boundary_map, reparametrize
from .qsmod import (eta_shape_fit, holder_constants, m_condition, psi_bound_check, qs_modulus,
                    weak_qs_constant)
from .subdivision import build_tree, equalize_count, greedy_subdivide, halving_holds, verify_tree
from .turning import PairFilter, exponent_fit, turning_constant

SCENARIOS = ("thm27", "prop23", "thm47", "thm51", "prop52", "cor35", "cor34")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _Run:
    """What one invocation needs to write its report."""

    def __init__(self, argv, args):
        self.argv = argv
        self.args = args
        self.inputs = []

    def curve(self, path) -> ClosedCurve:
        c = load_curve(path)
        self.inputs.append(path)
        return c

    def emit(self, result, metric=None, out=None):
        seed = getattr(self.args, "seed", None)
        text = dumps(envelope(self.argv, seed, metric, self.inputs, result))
        write_text(out if out is not None else getattr(self.args, "out", None), text)


def _threads(args):
    return args.threads if args.threads is not None else _kernels.default_threads()


def _prepare(run, args, normalize=False):
    curve = run.curve(args.curve)
    if getattr(args, "focus", None) is not None:
        curve = adaptive_cusp_sampling(curve, args.focus, args.ratio)
    if normalize:
        curve, _ = normalize_unit_diameter(curve)
    return curve


# ---------------------------------------------------------------------------
# verbs


def cmd_gen(run, args):
    params = {}
    for key, name in (("radius", "radius"), ("a", "a"), ("b", "b"), ("level", "level"),
                      ("order", "order"), ("amplitude", "amplitude"), ("modes", "modes")):
        val = getattr(args, name)
        if val is not None:
            params[key] = val
    if args.shape == "perturbed":
        params["seed"] = args.seed
    spec = CurveSpec(args.shape, args.n, params)
    curve = generate(spec)
    if args.focus is not None:
        curve = adaptive_cusp_sampling(curve, args.focus, args.ratio)
    if args.normalize:
        curve, _ = normalize_unit_diameter(curve)
    doc = curve_to_dict(curve)
    doc["spec"] = spec.to_dict()
    doc["meta"] = {"tool": {"name": "tqc", "version": __version__}, "command": run.argv}
    write_text(args.out, dumps(doc))
    return 0


def cmd_turning(run, args):
    curve = _prepare(run, args)
    if args.fit:
        flt = PairFilter(args.straddle, args.max_chord, args.min_chord)
        rep = exponent_fit(curve, flt, seed=args.seed, bins_per_octave=args.bins_per_octave)
        if args.t is not None:
            full = turning_constant(curve, args.t, seed=args.seed)
            rep.t, rep.C_star, rep.witness = full.t, full.C_star, full.witness
    else:
        rep = turning_constant(curve, args.t, seed=args.seed)
    run.emit(rep.to_dict())
    return 0


def cmd_subdivide(run, args):
    curve = _prepare(run, args, normalize=True)
    resampled = None
    need = int(math.ceil(8.0 * curve.perimeter() / args.eps)) + 1
    if curve.edge_lengths().max() > args.eps / 8.0:
        resampled = max(need, curve.n)
        curve, _ = normalize_unit_diameter(resample_arclength(curve, resampled))
    pieces = greedy_subdivide(curve, args.eps, args.start)
    diams = [arc_diameter(curve, s) for s in pieces]
    ok = all(args.eps / 8.0 - 1e-12 <= d <= args.eps + 1e-12 for d in diams)
    result = {"eps": args.eps, "start": args.start, "resampled": resampled, "count": len(pieces),
              "pieces": [{"start": s.start, "end": s.end, "diameter": d} for s, d in zip(pieces, diams)],
              "min_diameter": min(diams), "max_diameter": max(diams), "passed": ok}
    if args.p is not None:
        minima = []
        eq = equalize_count(curve, pieces, args.p, minima)
        ed = [arc_diameter(curve, s) for s in eq]
        # every single split keeps the smallest diameter above half its previous value
        keeps = halving_holds(minima)
        result["equalized"] = {"p": args.p, "min_diameter": min(ed), "max_diameter": max(ed),
                               "keeps_half_min": keeps,
                               "worst_step_ratio": min((b / a for a, b in zip(minima, minima[1:])), default=1.0),
                               "pieces": [{"start": s.start, "end": s.end} for s in eq]}
        ok = ok and keeps
        result["passed"] = ok
    run.emit(result)
    return 0 if ok else 2


def cmd_tree(run, args):
    curve = _prepare(run, args)
    tree = build_tree(curve, args.branching, args.depth)
    rep = verify_tree(tree, args.prop3_max, args.prop4_max)
    result = tree.to_dict()
    result["verify"] = rep
    run.emit(result)
    return 0 if rep["passed"] else 2


def _build_map(run, args):
    curve = _prepare(run, args)
    if args.kind == "tree":
        bmap = build_boundary_map(build_tree(curve, args.branching, args.depth), args.interior, args.metric)
    else:
        bmap = arclength_param(curve, args.n, args.metric)
    if args.homeo is not None:
        raw = load_json(args.homeo, "homeomorphism")
        run.inputs.append(args.homeo)
        try:
            homeo = PLHomeo.from_dict(raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"homeomorphism file {args.homeo}: missing or invalid field {exc}") from exc
        bmap = reparametrize(bmap, homeo)
    return bmap


def cmd_param(run, args):
    bmap = _build_map(run, args)
    write_text(args.out, dumps(bmap.to_dict()))
    return 0


def cmd_qs(run, args):
    if args.map is not None:
        source = run.curve(args.curve) if args.curve else None
        bmap = load_map(args.map, source)
        run.inputs.append(args.map)
    elif args.curve is not None:
        bmap = _build_map(run, args)
    else:
        raise UsageError("qs needs --map or --curve")
    th = _threads(args)
    weak = weak_qs_constant(bmap, args.exponent, threads=th, seed=args.seed, max_exact=args.max_exact)
    mod = qs_modulus(bmap, args.exponent, bins=args.bins, k_max=args.k_max, threads=th,
                     seed=args.seed, max_exact=args.max_exact)
    try:
        eta_shape_fit(mod)
    except TQCError:
        pass
    weak.rho_bins, weak.eta_fit = mod.rho_bins, mod.eta_fit
    result = weak.to_dict()
    if args.m_t is not None:
        result["m_condition"] = m_condition(bmap, args.m_t, threads=th, seed=args.seed, max_exact=args.max_exact)
    if args.holder_t is not None:
        result["holder"] = holder_constants(bmap, args.holder_t).to_dict()
    if args.csv:
        write_text(args.csv, mod.to_csv())
    run.emit(result, metric=bmap.metric)
    return 0


def _disk_map(curve):
    from .conformal.zipper import zipper_fit
    return zipper_fit(curve)


def cmd_conformal(run, args):
    from .conformal.checks import derivative_ratio_check, koebe_check, random_pairs, validation_grid

    curve = _prepare(run, args)
    try:
        m = _disk_map(curve)
    except ValidationFailure as exc:
        run.emit({"passed": False, "koebe": exc.report, "error": str(exc)}, out=args.report)
        return 2
    if args.drop_stage is not None:
        m = m.drop_stage(args.drop_stage)
    koebe = koebe_check(m, validation_grid(args.grid), args.slack)
    z1, z2 = random_pairs(args.pairs, args.seed)
    ratio = derivative_ratio_check(m, z1, z2, args.slack)
    ok = koebe["passed"] and ratio["passed"]
    if args.out:
        write_text(args.out, dumps(m.to_dict()))
    if args.svg:
        write_text(args.svg, map_svg(m))
    run.emit({"passed": ok, "stages": m.stage_count, "unresolved": m.unresolved, "truncated": m.truncated,
              "koebe": koebe, "derivative_ratio": ratio}, out=args.report)
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# scenarios


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"scenario {args.scenario} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _tree_map(run, args):
    _need(args, "curve")
    curve = _prepare(run, args)
    # the psi bound only sees triples with k < 1/256, which need a deeper tree
    depth = args.depth if args.depth is not None else (4 if args.scenario == "thm51" else 3)
    return build_boundary_map(build_tree(curve, args.branching, depth), args.interior, args.metric)


def scen_thm27(run, args):
    bmap = _tree_map(run, args)
    rep = weak_qs_constant(bmap, args.t, threads=_threads(args), seed=args.seed, max_exact=args.max_exact)
    ok = rep.weak_R is not None and math.isfinite(rep.weak_R)
    return {"weak": rep.to_dict(), "samples": bmap.n, "passed": ok}


def scen_prop23(run, args):
    bmap = _tree_map(run, args)
    rep = weak_qs_constant(bmap, args.t, threads=_threads(args), seed=args.seed, max_exact=args.max_exact)
    image = ClosedCurve(bmap.points)
    turn = turning_constant(image, args.t, seed=args.seed)
    ok = turn.C_star <= 2.0 * rep.weak_R
    return {"weak_R": rep.weak_R, "image_turning": turn.to_dict(), "bound": 2.0 * rep.weak_R, "passed": ok}


def scen_thm51(run, args):
    bmap = _tree_map(run, args)
    th = _threads(args)
    R = args.R
    if R is None:
        R = weak_qs_constant(bmap, args.t, threads=th, seed=args.seed, max_exact=args.max_exact).weak_R
    rep = psi_bound_check(bmap, args.t, R, threads=th, seed=args.seed, max_exact=args.max_exact)
    return {"psi": rep, "passed": rep["passed"]}


def scen_prop52(run, args):
    _need(args, "curve")
    curve = _prepare(run, args)
    exp = args.t**3
    rows = []
    for n in (args.n, 2 * args.n):
        bmap = arclength_param(curve, n, args.metric)
        rep = weak_qs_constant(bmap, exp, threads=_threads(args), seed=args.seed, max_exact=args.max_exact)
        rows.append({"n": n, "weak_R": rep.weak_R, "witness": rep.witness, "strategy": rep.strategy})
    a, b = rows[0]["weak_R"], rows[1]["weak_R"]
    change = max(a, b) / min(a, b)
    ok = all(math.isfinite(r["weak_R"]) for r in rows) and change < 2.0
    return {"exponent": exp, "rows": rows, "change": change, "passed": ok}


def scen_thm47(run, args):
    from .conformal.checks import constants_grid, lemma_constants_report, thm47_verify

    _need(args, "curve")
    curve = _prepare(run, args)
    try:
        m = _disk_map(curve)
    except ValidationFailure as exc:
        return {"passed": False, "koebe": exc.report, "error": str(exc)}
    grid = constants_grid(args.n_r, args.n_theta)
    const = lemma_constants_report(m, args.t, grid, seed=args.seed)
    result = {"constants": const.to_dict()}
    stable = True
    if args.refine:
        fine = lemma_constants_report(m, args.t, constants_grid(2 * args.n_r, 2 * args.n_theta), seed=args.seed)
        change = {k: max(a, b) / min(a, b) for k, a, b in
                  (("M_hat", const.M_hat, fine.M_hat), ("N_hat", const.N_hat, fine.N_hat))}
        stable = all(v < 2.0 for v in change.values())
        result["refined"] = fine.to_dict()
        result["refinement_change"] = change
        const = fine
    rep = thm47_verify(m, args.t, triple_budget=args.triple_budget, constants=const,
                       seed=args.seed, threads=_threads(args))
    result["thm47"] = rep
    result["passed"] = bool(rep["passed"] and stable)
    return result


def scen_cor35(run, args):
    from .conformal.geometry import harmonic_grid
    return harmonic_grid(n_alpha=args.n_alpha)


def scen_cor34(run, args):
    from .conformal.geometry import delta_grid
    return delta_grid()


_SCENARIO_FN = {"thm27": scen_thm27, "prop23": scen_prop23, "thm47": scen_thm47, "thm51": scen_thm51,
                "prop52": scen_prop52, "cor35": scen_cor35, "cor34": scen_cor34}


def cmd_verify(run, args):
    if args.scenario not in _SCENARIO_FN:
        raise UsageError(f"unknown scenario {args.scenario!r}; expected one of {', '.join(SCENARIOS)}")
    result = _SCENARIO_FN[args.scenario](run, args)
    result = {"scenario": args.scenario, **result}
    metric = args.metric if args.scenario in ("thm27", "prop23", "thm51", "prop52") else None
    run.emit(result, metric=metric)
    return 0 if result["passed"] else 2


# ---------------------------------------------------------------------------
# parser


def _curve_opts(p, required=True):
    p.add_argument("--curve", required=required, help="curve JSON file")
    p.add_argument("--focus", type=float, nargs=2, metavar=("X", "Y"),
                   help="regrade the sampling toward this boundary point")
    p.add_argument("--ratio", type=float, default=0.7, help="edge ratio for --focus (default 0.7)")


def _map_opts(p):
    p.add_argument("--kind", choices=("arclength", "tree"), default="arclength")
    p.add_argument("--n", type=int, default=512, help="samples for the arclength map")
    p.add_argument("--branching", type=int, default=4)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--interior", type=int, default=4, help="interior samples per leaf")
    p.add_argument("--metric", choices=("chordal", "arclength"), default="chordal")
    p.add_argument("--homeo", help="piecewise-linear homeomorphism JSON (knots or breaks/slopes)")


def _scan_opts(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, help="worker threads (default: TQC_THREADS or 1)")
    p.add_argument("--max-exact", type=int, default=2048, help="samples scanned exhaustively")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tqc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"tqc {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a test curve")
    p.add_argument("--shape", choices=KINDS, required=True)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--radius", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--level", type=int)
    p.add_argument("--order", type=float, help="cusp order s")
    p.add_argument("--amplitude", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--focus", type=float, nargs=2, metavar=("X", "Y"))
    p.add_argument("--ratio", type=float, default=0.7)
    p.add_argument("--normalize", action="store_true", help="scale to unit diameter")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("turning", help="turning constant or exponent fit")
    _curve_opts(p)
    p.add_argument("--t", type=float)
    p.add_argument("--fit", action="store_true", help="fit the exponent instead of taking --t")
    p.add_argument("--straddle", type=int, help="fit only pairs whose smaller arc contains this vertex")
    p.add_argument("--max-chord", type=float)
    p.add_argument("--min-chord", type=float, default=0.0)
    p.add_argument("--bins-per-octave", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_turning)

    p = sub.add_parser("subdivide", help="greedy pieces of comparable diameter")
    _curve_opts(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--p", type=int, help="equalize to this many pieces")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_subdivide)

    p = sub.add_parser("tree", help="hierarchical sub-arc tree")
    _curve_opts(p)
    p.add_argument("--branching", type=int, default=4)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--prop3-max", type=float, help="fail if the halving ratio exceeds this")
    p.add_argument("--prop4-max", type=float, help="fail if the neighbour ratio exceeds this")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_tree)

    p = sub.add_parser("param", help="sampled circle map onto a curve")
    _curve_opts(p)
    _map_opts(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_param)

    p = sub.add_parser("qs", help="quasisymmetry constants of a circle map")
    _curve_opts(p, required=False)
    _map_opts(p)
    _scan_opts(p)
    p.add_argument("--map", help="map JSON file (otherwise built from --curve)")
    p.add_argument("--exponent", type=float, required=True)
    p.add_argument("--bins", type=int, default=48)
    p.add_argument("--k-max", type=float, default=16.0)
    p.add_argument("--m-t", type=float, help="also evaluate the M condition at this t")
    p.add_argument("--holder-t", type=float, help="also measure Hoelder constants at this t")
    p.add_argument("--csv", help="write (k, max_ratio) bins as CSV")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_qs)

    p = sub.add_parser("conformal", help="fit and check the disk map onto a curve")
    _curve_opts(p)
    p.add_argument("--grid", type=int, default=500, help="validation grid size")
    p.add_argument("--pairs", type=int, default=500, help="random pairs for the derivative ratio check")
    p.add_argument("--slack", type=float, default=1.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drop-stage", type=int, help="corrupt the map by removing a stage (negative control)")
    p.add_argument("--out", help="DiskMap JSON")
    p.add_argument("--report", help="check report JSON (default stdout)")
    p.add_argument("--svg", help="domain with image grid")
    p.set_defaults(fn=cmd_conformal)

    p = sub.add_parser("verify", help="run a named verification scenario")
    p.add_argument("--scenario", required=True, help="one of " + ", ".join(SCENARIOS))
    _curve_opts(p, required=False)
    _scan_opts(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--R", type=float, help="weak constant for thm51 (default: measured)")
    p.add_argument("--branching", type=int, default=4)
    p.add_argument("--depth", type=int, help="tree depth (default 3, thm51 4)")
    p.add_argument("--interior", type=int, default=4)
    p.add_argument("--n", type=int, default=512, help="samples for prop52 (doubled once)")
    p.add_argument("--metric", choices=("chordal", "arclength"), default="chordal")
    p.add_argument("--n-r", type=int, default=8, help="radii in the constants grid")
    p.add_argument("--n-theta", type=int, default=32, help="angles in the constants grid")
    p.add_argument("--refine", action="store_true", help="recompute constants on a doubled grid")
    p.add_argument("--triple-budget", type=float, default=1.25e8)
    p.add_argument("--n-alpha", type=int, default=8, help="angles per radius for cor35")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        return args.fn(_Run(argv, args), args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 2
    except TQCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
