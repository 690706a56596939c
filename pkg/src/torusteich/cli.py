"""Command-line interface.

Exit codes: 0 success, 2 inconclusive verdict, 3 word-ball budget exceeded,
64 usage error.  Output is JSON by default (``schema: 1``) or CSV/TSV with
``# key=value`` header lines followed by a table.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from . import dynamics, harmonic, measures, quadrature, teich, tracks
from .errors import BudgetExceeded
from .mapping import (
    FiniteOrder,
    MappingClass,
    PseudoAnosov,
    Reducible,
    SubgroupSpec,
    classify,
    default_budget,
    mcp_classify,
    word_ball,
)

SCHEMA = 1
EXIT_OK, EXIT_INCONCLUSIVE, EXIT_BUDGET, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class Inconclusive(Exception):
    """Raised after output is written, to select exit code 2."""


# literal parsing

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?"
_COMPLEX = re.compile(rf"^([+-]?{_NUM})?(?:([+-](?:{_NUM})?)i)?$")
_IMAGINARY = re.compile(rf"^([+-]?(?:{_NUM})?)i$")


def parse_complex(text: str) -> complex:
    """``a+bi`` style literals: ``i``, ``2i``, ``1+i``, ``-2+0.25i``."""
    gap = re.search(r"[\d.]\s+[\d.]", text)
    if gap:
        raise UsageError(f"bad complex literal {text!r} (position {gap.start() + 2})")
    s = text.strip().replace(" ", "").replace("j", "i")
    m = _IMAGINARY.match(s)
    if m is not None:
        return complex(0.0, _coefficient(m.group(1)))
    m = _COMPLEX.match(s)
    if not s or m is None or (m.group(1) is None and m.group(2) is None):
        pos = _first_bad(s, "0123456789.+-ei")
        raise UsageError(f"bad complex literal {text!r} (position {pos})")
    re_part = float(m.group(1)) if m.group(1) else 0.0
    im_part = 0.0 if m.group(2) is None else _coefficient(m.group(2))
    return complex(re_part, im_part)


def _coefficient(txt: str) -> float:
    if txt in ("", "+"):
        return 1.0
    if txt == "-":
        return -1.0
    return float(txt)


def _first_bad(s: str, allowed: str) -> int:
    for i, ch in enumerate(s):
        if ch not in allowed:
            return i + 1
    return len(s) + 1


def parse_modulus(text: str) -> complex:
    tau = parse_complex(text)
    if not tau.imag > 0:
        raise UsageError(f"modulus {text!r} must have positive imaginary part")
    return tau


def _numbers(text: str, n: int, kind, what: str):
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {len(parts)} in {text!r}")
    out = []
    col = 1
    for p in parts:
        try:
            out.append(kind(p.strip()))
        except ValueError:
            raise UsageError(f"bad {what} entry {p!r} at position {col} of {text!r}") from None
        col += len(p) + 1
    return out


def parse_matrix(text: str) -> MappingClass:
    a, b, c, d = _numbers(text, 4, int, "matrix")
    try:
        return MappingClass(a, b, c, d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_slope(text: str) -> teich.Slope:
    try:
        return teich.Slope.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad slope {text!r}: {exc}") from None


def parse_boundary(text: str) -> float:
    try:
        return teich.boundary_point(float(text))
    except ValueError:
        raise UsageError(f"bad boundary point {text!r}") from None


def parse_foliation(text: str) -> teich.Foliation:
    """``x,y``; or ``slope:p/q``, ``t:value``, ``unstable:a,b,c,d``, ``stable:a,b,c,d``."""
    head, sep, body = text.partition(":")
    if not sep:
        x, y = _numbers(text, 2, float, "foliation")
        return teich.Foliation(x, y)
    if head == "slope":
        return teich.slope_to_foliation(parse_slope(body))
    if head == "t":
        return teich.foliation_from_boundary(parse_boundary(body))
    if head in ("unstable", "stable"):
        kind = classify(parse_matrix(body))
        if not isinstance(kind, PseudoAnosov):
            raise UsageError(f"{body} is not pseudo-Anosov")
        return kind.unstable if head == "unstable" else kind.stable
    raise UsageError(f"unknown foliation form {head!r} in {text!r}")


def parse_arcs(text: str) -> measures.ArcSet:
    try:
        return measures.ArcSet.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_pattern(text: str):
    out = []
    for piece in filter(None, text.split(";")):
        out.append(tuple(_numbers(piece, 2, float, "pattern interval")))
    if not out:
        raise UsageError("empty pattern")
    return out


# output encoding


def encode(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, (np.floating, np.integer)):
        return encode(v.item())
    if isinstance(v, complex):
        return f"{v.real!r}{'+' if v.imag >= 0 or math.isnan(v.imag) else '-'}{abs(v.imag)!r}i"
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    if isinstance(v, MappingClass):
        return list(v.entries)
    if isinstance(v, teich.Foliation):
        return [encode(v.x), encode(v.y)]
    if isinstance(v, teich.Slope):
        return str(v)
    if isinstance(v, measures.ArcSet):
        return str(v)
    if isinstance(v, dict):
        return {str(k): encode(x) for k, x in v.items()}
    if isinstance(v, (set, frozenset)):
        return sorted((encode(x) for x in v), key=repr)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [encode(x) for x in v]
    return str(v)


def _cell(v):
    v = encode(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def render(command: str, config: dict, result: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"schema": SCHEMA, "command": command, "config": encode(config)}
        doc.update(encode(result))
        return json.dumps(doc, indent=2) + "\n"
    delim = "," if fmt == "csv" else "\t"
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n# command={command}\n")
    for k, v in config.items():
        buf.write(f"# {k}={_cell(v)}\n")
    rows = result.get("rows")
    scalars = {k: v for k, v in result.items() if k != "rows"}
    writer = csv.writer(buf, delimiter=delim, lineterminator="\n")
    if rows is not None:
        for k, v in scalars.items():
            buf.write(f"# {k}={_cell(v)}\n")
        cols = list(rows[0].keys()) if rows else []
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_cell(r[c]) for c in cols])
    else:
        writer.writerow(list(scalars))
        writer.writerow([_cell(v) for v in scalars.values()])
    return buf.getvalue()


# commands


def _subgroup(args) -> SubgroupSpec:
    if not args.gen:
        raise UsageError("at least one --gen a,b,c,d is required")
    gens = [parse_matrix(g) for g in args.gen]
    try:
        return SubgroupSpec(tuple(gens))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _foliation_arg(args) -> teich.Foliation:
    if args.foliation is None:
        raise UsageError("--foliation is required")
    f = parse_foliation(args.foliation)
    return f


def cmd_ext(args):
    if args.slope is not None:
        f = teich.slope_to_foliation(parse_slope(args.slope))
    else:
        f = _foliation_arg(args)
    tau = parse_modulus(args.tau)
    out = {"ext": teich.extremal_length(tau, f), "foliation": f}
    if not f.is_zero:
        c = teich.hm_differential(tau, f)
        out["hm_coefficient"] = c
        out["gradient"] = teich.ext_gradient(tau, f)
    return out


def cmd_dist(args):
    return {"distance": teich.teich_distance(parse_modulus(args.a), parse_modulus(args.b))}


def cmd_ray(args):
    tau = parse_modulus(args.tau)
    t = parse_boundary(args.dir)
    lam = teich.foliation_from_boundary(t)
    e0 = teich.extremal_length(tau, lam)
    rows = []
    for s in args.s:
        z = teich.geodesic_ray(tau, t, s)
        rows.append({"s": s, "tau": z, "distance": teich.teich_distance(tau, z), "ext_ratio": teich.extremal_length(z, lam) / e0})
    return {"rows": rows}


def cmd_classify(args):
    g = parse_matrix(args.matrix)
    k = classify(g)
    out = {"matrix": g, "trace": g.trace, "kind": k.kind}
    if isinstance(k, FiniteOrder):
        out["order"] = k.order
    elif isinstance(k, Reducible):
        out["slope"] = k.slope
    else:
        out.update(K=k.dilatation, unstable=k.unstable, stable=k.stable, attracting=k.attracting, repelling=k.repelling)
    return out


def cmd_ball(args):
    h = _subgroup(args)
    ball = word_ball(h, args.depth, args.budget)
    rows = [
        {"index": k, "level": ball.level[k], "word": h.format_word(ball.word(k)), "matrix": list(ball.mats[k])}
        for k in range(len(ball))
    ]
    return {"size": len(ball), "closed": ball.closed, "rows": rows}


def cmd_mcp(args):
    h = _subgroup(args)
    rep = mcp_classify(h, args.depth, args.budget)
    wit = dict(rep.witnesses)
    if "words" in wit:
        wit["words"] = [h.format_word(w) for w in wit["words"]]
    out = {"verdict": rep.verdict, "depth": rep.depth, "witnesses": wit, "notes": rep.notes}
    if rep.verdict == "inconclusive":
        out["__inconclusive"] = True
    return out


def cmd_track(args):
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                t = tracks.parse_track(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from None
        except tracks.TrackParseError as exc:
            raise UsageError(f"{args.file}: {exc}") from None
    else:
        t = {
            "loop": tracks.loop_track,
            "theta": tracks.theta_track,
            "torus": tracks.torus_chart_track,
            "nonrecurrent": tracks.nonrecurrent_theta_track,
        }[args.fixture]()
    basis = tracks.weight_space_basis(t)
    fm = tracks.form_matrix(t)
    rec = tracks.is_recurrent(t)
    out = {
        "branches": list(t.branches),
        "switch_matrix": tracks.switch_matrix(t),
        "kernel_dim": len(basis),
        "kernel_basis": [list(b) for b in basis],
        "form_matrix": [list(r) for r in fm.matrix],
        "nondegenerate": fm.nondegenerate,
        "recurrent": rec.recurrent,
        "certificate": list(rec.certificate) if rec.certificate else None,
        "nonrecurrence_witness": rec.witness,
    }
    try:
        out["volume_density"] = tracks.volume_density(t)
    except tracks.TrackError as exc:
        out["volume_density"] = None
        out["volume_note"] = str(exc)
    return out


def cmd_cone(args):
    tau = parse_modulus(args.tau)
    arcs = parse_arcs(args.arc)
    if args.montecarlo:
        r = measures.cone_area_montecarlo(tau, arcs, args.samples, args.seed)
    else:
        r = measures.cone_area(tau, arcs, args.tolerance, args.quadrature_budget)
    out = {
        "value": r.value,
        "abs_error_estimate": r.abs_error_estimate,
        "method": r.method,
        "evaluations": r.evaluations,
        "degraded": r.degraded,
    }
    if r.seed is not None:
        out["seed"] = r.seed
    return out


def cmd_measure_check(args):
    tau = parse_modulus(args.tau)
    arcs = parse_arcs(args.arc)
    out = {
        "prob": measures.thurston_prob(tau, arcs).value,
        "identity_residual": measures.measure_identity_residual(tau, arcs),
    }
    if args.matrix:
        out["equivariance_residual"] = measures.equivariance_residual(parse_matrix(args.matrix), tau, arcs)
    if args.tau2:
        out["radon_nikodym_residual"] = measures.radon_nikodym_residual(tau, parse_modulus(args.tau2), arcs)
    return out


def cmd_kernel(args):
    tau = parse_modulus(args.tau)
    n = args.samples
    if n < 1:
        raise UsageError("--samples must be positive")
    rows = []
    for k in range(n):
        theta = math.pi * k / n
        t = measures.t_of_theta(theta)
        rows.append({"theta": theta, "t": t, "P": measures.poisson_kernel(tau, t)})
    return {"rows": rows}


def _boundary_function(args) -> harmonic.BoundaryFunction:
    if getattr(args, "indicator", None):
        return harmonic.BoundaryFunction.indicator(parse_arcs(args.indicator))
    try:
        return harmonic.named_function(args.func)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_poisson(args):
    f = _boundary_function(args)
    rows = []
    for t in args.tau:
        e = harmonic.poisson_integral(f, parse_modulus(t), args.tolerance)
        rows.append({"tau": parse_modulus(t), "value": e.value, "error": e.error, "degraded": e.degraded})
    return {"function": f.name, "rows": rows}


def cmd_radial(args):
    f = _boundary_function(args)
    rep = harmonic.radial_limit(f, parse_boundary(args.t0), args.smax, args.steps)
    rows = [{"s": s, "value": v} for s, v in zip(rep.s, rep.values)]
    return {"function": f.name, "t0": rep.t0, "tail": rep.tail, "tail_change": rep.tail_change, "rows": rows}


def cmd_laplacian(args):
    f = _boundary_function(args)
    tau = parse_modulus(args.tau)
    try:
        r1 = harmonic.laplacian_residual(f, tau, args.h)
        r2 = harmonic.laplacian_residual(f, tau, args.h / 2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return {"residual": r1, "residual_half_step": r2, "ratio": r1 / r2 if r2 else None}


def cmd_fourier(args):
    f = _boundary_function(args)
    if f.is_piecewise and len(f.pieces) == 1:
        coeffs = [0.0] * args.N
    else:
        coeffs = harmonic.fourier_coefficients(f, args.N)
    rows = [{"n": -(k + 1), "coefficient": c, "abs": abs(c)} for k, c in enumerate(coeffs)]
    return {"residual": max(abs(c) for c in coeffs), "rows": rows}


def cmd_cr(args):
    f = _boundary_function(args)
    tau = parse_modulus(args.tau)
    ci = harmonic.cr_integral(f, tau)
    fd = harmonic.dbar_fd(f, tau)
    return {"residual": abs(ci.value), "integral": ci.value, "error": ci.error, "finite_difference": fd, "agreement": abs(ci.value - fd)}


def cmd_seidel(args):
    try:
        u = harmonic.seidel_function(args.period, parse_pattern(args.pattern))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for t in args.tau:
        tau = parse_modulus(t)
        rows.append({"tau": tau, "value": u(tau), "translate": u(tau + args.period)})
    xs = np.linspace(0.0, args.period, 17)
    grid = [u(complex(x, y)) for x in xs for y in (0.1, 0.5, 1.0)]
    inv = max(abs(r["value"] - r["translate"]) for r in rows) if rows else 0.0
    return {"invariance_residual": inv, "oscillation": max(grid) - min(grid), "rows": rows}


def cmd_limitset(args):
    h = _subgroup(args)
    pts = dynamics.limit_set_approx(h, args.depth, args.budget)
    return {"count": len(pts), "rows": [{"t": p} for p in pts]}


def cmd_horo(args):
    h = _subgroup(args)
    lam = _foliation_arg(args)
    tau0 = parse_modulus(args.tau0)
    if args.mode == "conical":
        v = dynamics.is_conical(lam, h, tau0, args.depth, args.R, budget=args.budget)
        ev = dict(v.evidence)
        if "words" in ev:
            ev["words"] = [h.format_word(w) for w in ev["words"]]
        out = {"status": v.status, "depth": v.depth, "evidence": ev}
    else:
        if args.mode == "small":
            v, rep = dynamics.is_small_horospherical(lam, h, tau0, args.depth, args.eps, args.budget)
        else:
            v, rep = dynamics.is_big_horospherical(lam, h, tau0, args.depth, args.M, args.D, args.budget)
        out = {
            "status": v.status,
            "depth": v.depth,
            "best_ratio": rep.best_ratio,
            "best_distance": rep.best_distance,
            "witness_word": h.format_word(rep.witness_word),
        }
    if not v.found:
        out["__inconclusive"] = True
    return out


def cmd_psum(args):
    h = _subgroup(args)
    tab = dynamics.poincare_sum(_foliation_arg(args), h, parse_modulus(args.tau0), args.depth, args.budget)
    rows = [{"depth": d, "partial_sum": s, "terms": c} for d, s, c in zip(tab.depths, tab.partial_sums, tab.counts)]
    return {"rows": rows}


def cmd_wander(args):
    h = _subgroup(args)
    arcs = parse_arcs(args.arc)
    if arcs.is_empty:
        raise UsageError("--arc must be nonempty")
    rep = dynamics.wandering_overlap(h, arcs, parse_modulus(args.tau0), args.depth, args.budget)
    return {
        "max_overlap": rep.max_overlap,
        "argmax": rep.argmax,
        "argmax_word": h.format_word(rep.argmax_word) if rep.argmax_word is not None else None,
        "depth": rep.depth,
        "rows": [{"word": h.format_word(w), "overlap": p} for w, p in rep.table],
    }


# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--format", choices=("json", "csv", "tsv"), default="json")
    g.add_argument("--out", default="-", help="output path, '-' for standard output")
    g.add_argument("--tol", dest="tolerance", type=float, default=quadrature.DEFAULT_TOL, help="quadrature tolerance")
    g.add_argument("--quad-budget", dest="quadrature_budget", type=int, default=quadrature.DEFAULT_MAX_EVALS, help="quadrature evaluation cap")
    g.add_argument("--budget", type=int, default=None, help="word-ball element cap (default from TORUSTEICH_BUDGET or 2000000)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--depth", type=int, default=4)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="torusteich", description="Teichmüller theory of the torus, numerically.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(handler=func)
        return p

    def func_args(p):
        p.add_argument("--func", default="one", help=f"named boundary function: {', '.join(sorted(harmonic.NAMED))}")
        p.add_argument("--indicator", default=None, help="use the indicator of an arc set instead")

    def group_args(p, foliation=False):
        p.add_argument("--gen", action="append", default=[], help="generator a,b,c,d (repeatable)")
        p.add_argument("--tau0", default="i")
        if foliation:
            p.add_argument("--foliation", required=True)

    p = add("ext", cmd_ext, "extremal length")
    p.add_argument("--tau", required=True)
    p.add_argument("--foliation")
    p.add_argument("--slope")
    p = add("dist", cmd_dist, "Teichmüller distance")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p = add("ray", cmd_ray, "points on a geodesic ray")
    p.add_argument("--tau", default="i")
    p.add_argument("--dir", required=True, help="boundary point t or inf")
    p.add_argument("--s", type=float, action="append", required=True)
    p = add("classify", cmd_classify, "Thurston type of a mapping class")
    p.add_argument("--matrix", required=True)
    p = add("ball", cmd_ball, "word ball of a subgroup")
    group_args(p)
    p = add("mcp", cmd_mcp, "bounded-depth subgroup type")
    group_args(p)
    p = add("track", cmd_track, "train track weight space and Thurston form")
    p.add_argument("--file")
    p.add_argument("--fixture", choices=("loop", "theta", "torus", "nonrecurrent"), default="torus")
    p = add("cone", cmd_cone, "Thurston mass of a cone")
    p.add_argument("--tau", required=True)
    p.add_argument("--arc", default="full")
    p.add_argument("--montecarlo", action="store_true")
    p.add_argument("--samples", type=int, default=1_000_000)
    p = add("measure-check", cmd_measure_check, "measure identity residuals")
    p.add_argument("--tau", required=True)
    p.add_argument("--arc", default="full")
    p.add_argument("--matrix")
    p.add_argument("--tau2")
    p = add("kernel", cmd_kernel, "Poisson kernel samples")
    p.add_argument("--tau", required=True)
    p.add_argument("--samples", type=int, default=64)
    p = add("poisson", cmd_poisson, "Poisson integral at points")
    func_args(p)
    p.add_argument("--tau", action="append", required=True)
    p = add("radial", cmd_radial, "values along a ray")
    func_args(p)
    p.add_argument("--t0", required=True)
    p.add_argument("--smax", type=float, default=8.0)
    p.add_argument("--steps", type=int, default=8)
    p = add("laplacian", cmd_laplacian, "finite-difference Laplacian of a Poisson integral")
    func_args(p)
    p.add_argument("--tau", required=True)
    p.add_argument("--h", type=float, default=1e-2)
    p = add("fourier", cmd_fourier, "negative Fourier coefficients")
    func_args(p)
    p.add_argument("--N", type=int, default=16)
    p = add("cr", cmd_cr, "holomorphy defect of a Poisson integral")
    func_args(p)
    p.add_argument("--tau", default="i")
    p = add("seidel", cmd_seidel, "periodic invariant harmonic function")
    p.add_argument("--period", type=float, required=True)
    p.add_argument("--pattern", required=True, help="a,b[;c,d...] in t units")
    p.add_argument("--tau", action="append", default=[])
    p = add("limitset", cmd_limitset, "pseudo-Anosov fixed points in a ball")
    group_args(p)
    p = add("horo", cmd_horo, "horospherical and conical limit point tests")
    p.add_argument("mode", choices=("small", "big", "conical"))
    group_args(p, foliation=True)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p = add("psum", cmd_psum, "Poincaré-type partial sums")
    group_args(p, foliation=True)
    p = add("wander", cmd_wander, "overlap of an arc with its translates")
    group_args(p)
    p.add_argument("--arc", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = args.handler
    if args.budget is None:
        args.budget = default_budget()
    try:
        if args.depth < 0:
            raise UsageError("--depth must be >= 0")
        result = handler(args)
    except (UsageError, ValueError) as exc:
        print(f"torusteich {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"torusteich {args.command}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    inconclusive = result.pop("__inconclusive", False)
    config = {k: v for k, v in vars(args).items() if k not in ("handler", "command")}
    text = render(args.command, config, result, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
