"""Command-line front end: ``lctbench <verb> [options]``.

Exit codes: 0 success, 1 precondition or diagnostic failure (including a
failed experiment), 2 usage error (bad flags, malformed polynomial or
exponent text).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import experiments as exps
from .hironaka import DEFAULT_TRUNC, divide, normal_form, standard_basis
from .newton import MonomialWeight, format_value, lct, multiplier_ideal_monomials, openness_witness
from .numeric import (
    DEFAULT_LADDER,
    DEFAULT_MARGIN,
    SAMPLERS,
    LogAbsHol,
    LogSumSq,
    MonomialMax,
    SampleConfig,
    Scaled,
    Shifted,
    ThresholdDiagnosticError,
    clipped_integral,
    divergence_slope,
    estimate_threshold,
    l1_distance,
)
from .parsing import ParseError, parse_exponent, parse_exponent_list, parse_polynomial, parse_rational
from .ring import cmp_monomials, format_polynomial

FORMATS = ("table", "csv", "jsonl")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return "inf" if v == math.inf else ("-inf" if v == -math.inf else f"{v:.6g}")
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return _fmt(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def emit(records: list, columns: list, fmt: str, out, plain: list | None = None):
    """Write records; ``plain`` lines replace the table when given."""
    if fmt == "jsonl":
        for r in records:
            out.write(json.dumps({k: _jsonable(r.get(k)) for k in columns}) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow([_fmt(r.get(k)) for k in columns])
    elif plain is not None:
        for line in plain:
            out.write(line + "\n")
    else:
        rows = [[_fmt(r.get(k)) for k in columns] for r in records]
        widths = [max(len(x) for x in col) for col in zip(columns, *rows)]
        line = "  ".join(f"{{:<{w}}}" for w in widths)
        out.write(line.format(*columns).rstrip() + "\n")
        for row in rows:
            out.write(line.format(*row).rstrip() + "\n")


# --------------------------------------------------------------------------
# argument helpers


def _poly(text, n):
    return parse_polynomial(text, n)


def _dim_of(texts, n):
    if n is not None:
        return n
    dims = [parse_polynomial(t).dim for t in texts]
    return max(dims) if dims else 1


def _weight(specs) -> MonomialWeight:
    gens = [g for s in specs for g in parse_exponent_list(s)]
    return MonomialWeight(gens)


def _beta(text, n):
    if text is None:
        return (0,) * n
    beta = parse_exponent(text)
    if len(beta) != n:
        raise UsageError(f"--beta has {len(beta)} entries but the weight has dimension {n}")
    return beta


def _cfg(args) -> SampleConfig:
    if args.seed is None:
        raise UsageError(f"--seed is required for '{args.verb}' (no silent nondeterminism)")
    return SampleConfig(seed=args.seed, samples=args.samples, radius=float(parse_rational(str(args.radius))),
                        sampler=args.sampler, chunk_size=args.chunk_size, threads=args.threads)


def _wfun(args, n, prefix="phi"):
    """Build a weight from ``--phi``/``--phi-sumsq``/``--phi-monomial`` (or the psi variants)."""
    log_abs = getattr(args, prefix)
    sumsq = getattr(args, f"{prefix}_sumsq")
    mono = getattr(args, f"{prefix}_monomial")
    given = [x for x in (log_abs, sumsq, mono) if x]
    if len(given) != 1:
        raise UsageError(f"give exactly one of --{prefix}, --{prefix}-sumsq, --{prefix}-monomial")
    if log_abs:
        w = LogAbsHol(_poly(log_abs, n))
    elif sumsq:
        w = LogSumSq(tuple(_poly(t, n) for t in sumsq))
    else:
        w = MonomialMax(_weight(mono).gens)
        if w.dim != n:
            raise UsageError(f"--{prefix}-monomial has dimension {w.dim}, expected {n}")
    scale = getattr(args, f"{prefix}_scale", None)
    if scale is not None:
        w = Scaled(parse_rational(scale), w)
    shift = getattr(args, f"{prefix}_shift", None)
    if shift is not None:
        w = Shifted(float(shift), w)
    return w


def _weight_dim(args, prefixes) -> int:
    if args.n is not None:
        return args.n
    texts = []
    for p in prefixes:
        if getattr(args, p):
            texts.append(getattr(args, p))
        texts += getattr(args, f"{p}_sumsq") or []
        mono = getattr(args, f"{p}_monomial")
        if mono:
            return _weight(mono).dim
    f = getattr(args, "f", None)
    if f:
        texts.append(f)
    return _dim_of(texts, None)


# --------------------------------------------------------------------------
# verbs


def cmd_order(args, out):
    a, b = parse_exponent(args.alpha), parse_exponent(args.beta)
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    res = {-1: "Less", 0: "Equal", 1: "Greater"}[cmp_monomials(a, b)]
    emit([{"alpha": args.alpha, "beta": args.beta, "order": res}], ["alpha", "beta", "order"],
         args.format, out, [res])


def cmd_divide(args, out):
    n = _dim_of([args.f, *args.gens], args.n)
    f = _poly(args.f, n)
    gens = [_poly(g, n) for g in args.gens]
    res = divide(f, gens, args.D)
    recs = [{"role": f"h{i + 1}", "polynomial": format_polynomial(h)} for i, h in enumerate(res.quotients)]
    recs.append({"role": "s", "polynomial": format_polynomial(res.remainder)})
    for r in recs:
        r["D"] = res.trunc
    emit(recs, ["role", "polynomial", "D"], args.format, out,
         [f"{r['role']} = {r['polynomial']}" for r in recs] + [f"(modulo degree > {res.trunc})"])


def cmd_stdbasis(args, out):
    n = _dim_of(args.gens, args.n)
    basis = standard_basis([_poly(g, n) for g in args.gens], args.D)
    recs = [{"index": i + 1, "generator": format_polynomial(g), "initial_monomial": "(" + ",".join(map(str, im)) + ")",
             "D": basis.trunc} for i, (g, im) in enumerate(zip(basis.gens, basis.initial_monomials))]
    emit(recs, ["index", "generator", "initial_monomial", "D"], args.format, out,
         [r["generator"] for r in recs])


def cmd_nf(args, out):
    n = _dim_of([args.f, *args.gens], args.n)
    basis = standard_basis([_poly(g, n) for g in args.gens], args.D)
    r = normal_form(_poly(args.f, n), basis)
    rec = {"f": args.f, "normal_form": format_polynomial(r), "member": r.is_zero(), "D": basis.trunc}
    emit([rec], ["f", "normal_form", "member", "D"], args.format, out, [rec["normal_form"]])


def cmd_lct(args, out):
    w = _weight(args.weight)
    beta = _beta(args.beta, w.dim)
    v = lct(w, beta)
    rec = {"weight": w.describe(), "beta": "(" + ",".join(map(str, beta)) + ")", "lct": format_value(v.value),
           "mu": "" if v.optimal_mu is None else " ".join(map(str, v.optimal_mu)),
           "dual": "" if v.dual is None else " ".join(map(str, v.dual))}
    plain = [rec["lct"]]
    if args.certificate:
        plain += [f"mu = {rec['mu'] or '-'}", f"dual = {rec['dual'] or '-'}"]
    emit([rec], ["weight", "beta", "lct", "mu", "dual"], args.format, out, plain)


def cmd_mideal(args, out):
    w = _weight(args.weight)
    c = parse_rational(args.c)
    ideal = multiplier_ideal_monomials(w, c, args.D)
    recs = [{"generator": "(" + ",".join(map(str, g)) + ")", "c": str(c), "D": args.D} for g in ideal.gens]
    emit(recs, ["generator", "c", "D"], args.format, out,
         [r["generator"] for r in recs] or ["(zero ideal up to degree D)"])


def cmd_witness(args, out):
    w = _weight(args.weight)
    beta = _beta(args.beta, w.dim)
    c = parse_rational(args.c)
    eps = openness_witness(w, beta, c)
    rec = {"weight": w.describe(), "beta": "(" + ",".join(map(str, beta)) + ")", "c": str(c),
           "lct": format_value(lct(w, beta).value), "witness": "not a member" if eps is None else str(eps)}
    emit([rec], ["weight", "beta", "c", "lct", "witness"], args.format, out,
         [rec["witness"] if eps is None else f"eps = {eps}"])


def _rational_float(text) -> float:
    return float(parse_rational(str(text)))


def _ladder(args):
    if args.ladder is None:
        return DEFAULT_LADDER
    return tuple(float(parse_rational(x)) for x in args.ladder.replace(",", " ").split())


def cmd_estimate(args, out):
    n = _weight_dim(args, ["phi"])
    cfg = _cfg(args)
    f = _poly(args.f, n) if args.f else _poly("1", n)
    phi = _wfun(args, n)
    base = {"phi": phi.describe(), "f": format_polynomial(f), "samples": cfg.samples, "seed": cfg.seed,
            "sampler": cfg.sampler, "radius": cfg.radius}
    if args.c is not None and args.eps is not None:
        est = clipped_integral(f, phi, _rational_float(args.c), float(parse_rational(args.eps)), cfg)
        rec = {**base, "operation": "clipped_integral", "c": _rational_float(args.c), "eps": args.eps,
               "estimate": est.mean, "std_error": est.std_error}
        emit([rec], ["operation", "phi", "f", "c", "eps", "estimate", "std_error", "samples", "seed"],
             args.format, out)
        return
    if args.c is not None:
        fit = divergence_slope(f, phi, _rational_float(args.c), _ladder(args), cfg, args.margin)
        recs = [{**base, "operation": "divergence_slope", "c": fit.c, "eps": e, "log_integral": li,
                 "std_error": se, "slope": fit.slope, "residual": fit.residual, "growth_rate": fit.growth_rate,
                 "verdict": fit.verdict}
                for e, li, se in zip(fit.ladder, fit.log_integrals, fit.std_errors)]
        cols = ["operation", "c", "eps", "log_integral", "std_error", "slope", "residual", "growth_rate",
                "verdict", "samples", "seed"]
        plain = None
        if args.format == "table":
            buf = io.StringIO()
            emit(recs, ["eps", "log_integral", "std_error"], "table", buf)
            plain = [f"phi = {phi.describe()}, f = {format_polynomial(f)}, c = {fit.c:.6g}",
                     buf.getvalue().rstrip("\n"),
                     f"slope {fit.slope:.6g} (residual {fit.residual:.3g}), growth rate {fit.growth_rate:.6g} "
                     f"(residual {fit.growth_residual:.3g}), verdict: {fit.verdict}"]
        emit(recs, cols, args.format, out, plain)
        return
    lo, hi = (float(parse_rational(x)) for x in args.c_range)
    est = estimate_threshold(f, phi, (lo, hi), args.tol, cfg, _ladder(args), args.margin)
    recs = [{**base, "operation": "estimate_threshold", "c": fit.c, "growth_rate": fit.growth_rate,
             "slope": fit.slope, "verdict": fit.verdict, "c_lo": est.c_lo, "c_hi": est.c_hi}
            for fit in est.fits]
    plain = None
    if args.format == "table":
        plain = [f"phi = {phi.describe()}, f = {format_polynomial(f)}, N = {cfg.samples}, seed = {cfg.seed}"]
        plain += [f"  c = {fit.c:<10.6g} growth rate = {fit.growth_rate:<10.4g} {fit.verdict}"
                  for fit in sorted(est.fits, key=lambda x: x.c)]
        plain.append(f"threshold: {est}")
    emit(recs, ["operation", "c", "growth_rate", "slope", "verdict", "c_lo", "c_hi", "samples", "seed"],
         args.format, out, plain)


def cmd_l1(args, out):
    n = _weight_dim(args, ["phi", "psi"])
    cfg = _cfg(args)
    phi, psi = _wfun(args, n, "phi"), _wfun(args, n, "psi")
    eps = DEFAULT_LADDER[-1] if args.eps is None else float(parse_rational(args.eps))
    est = l1_distance(phi, psi, _rational_float(args.c), cfg, eps)
    rec = {"operation": "l1_distance", "phi": phi.describe(), "psi": psi.describe(), "c": _rational_float(args.c),
           "eps": eps, "estimate": est.mean, "std_error": est.std_error, "samples": cfg.samples, "seed": cfg.seed}
    emit([rec], ["operation", "phi", "psi", "c", "eps", "estimate", "std_error", "samples", "seed"],
         args.format, out)


def cmd_experiment(args, out):
    name = args.name or args.config_data.get("experiment")
    if name is None:
        raise UsageError(f"experiment name required: one of {', '.join(exps.EXPERIMENTS)}")
    if name not in exps.EXPERIMENTS:
        raise UsageError(f"unknown experiment {name!r}; choose from {', '.join(exps.EXPERIMENTS)}")
    params = dict(args.config_data.get("params", {}))
    for key in ("j", "deltas", "h", "family"):
        if getattr(args, key):
            params[key] = getattr(args, key)
    for key in ("weight", "beta", "phi", "f", "c", "tolerance"):
        val = getattr(args, f"x_{key}")
        if val is not None:
            params[key] = val
    if args.n is not None:
        params["n"] = args.n
    if "weight" in params and isinstance(params["weight"], list) and all(isinstance(s, str) for s in params["weight"]):
        params["weight"] = ";".join(params["weight"])
    if "c" in params:
        params["c"] = _rational_float(params["c"])
    cfg = None
    if name != "convergence-from-below" or args.seed is not None:
        cfg = _cfg(args)
    report = exps.run_experiment(name, params, cfg)
    if args.format == "csv":
        out.write(report.to_csv())
    elif args.format == "jsonl":
        out.write(report.to_jsonl())
    else:
        out.write(report.to_table())
    return 0 if report.passed else 1


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, numeric=False):
    g = p.add_argument_group("global options")
    g.add_argument("-n", type=int, default=None, help="ambient dimension (default: highest variable index)")
    g.add_argument("-D", type=int, default=DEFAULT_TRUNC, help=f"truncation degree (default {DEFAULT_TRUNC})")
    g.add_argument("--format", choices=FORMATS, default="table", help="output format")
    g.add_argument("--config", default=None, help="JSON file whose keys mirror the long flags")
    g.add_argument("--seed", type=int, default=None, help="64-bit seed (required for sampling verbs)")
    g.add_argument("--samples", type=int, default=2 ** 18, help="Monte Carlo sample count (default 2^18)")
    g.add_argument("--radius", default="1/2", help="polydisc radius (default 1/2)")
    g.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    g.add_argument("--chunk-size", type=int, default=1 << 16, help="samples per work item")
    g.add_argument("--sampler", choices=SAMPLERS, default="polar-importance")


def _weight_args(p, prefix):
    p.add_argument(f"--{prefix}", default=None, help=f"{prefix} = log|g| for the polynomial g")
    p.add_argument(f"--{prefix}-sumsq", nargs="+", default=None, metavar="G",
                   help=f"{prefix} = 1/2 log sum |g_j|^2")
    p.add_argument(f"--{prefix}-monomial", nargs="+", default=None, metavar="EXPS",
                   help=f"{prefix} = log max |z^a_j|, exponents like '(2,0);(0,3)'")
    p.add_argument(f"--{prefix}-scale", default=None, help=f"multiply {prefix} by this rational")
    p.add_argument(f"--{prefix}-shift", default=None, help=f"add this constant to {prefix}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lctbench", description="Standard bases and weighted log canonical thresholds.")
    sub = parser.add_subparsers(dest="verb", metavar="verb", required=True)

    p = sub.add_parser("order", help="compare two exponents in the homogeneous lexicographic order")
    p.add_argument("alpha")
    p.add_argument("beta")
    _common(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("divide", help="Hironaka division of f by generators, modulo degree > D")
    p.add_argument("f")
    p.add_argument("gens", nargs="+")
    _common(p)
    p.set_defaults(func=cmd_divide)

    p = sub.add_parser("stdbasis", help="standard basis of the ideal generated by the arguments")
    p.add_argument("gens", nargs="+")
    _common(p)
    p.set_defaults(func=cmd_stdbasis)

    p = sub.add_parser("nf", help="normal form of f against a standard basis of the generators")
    p.add_argument("f")
    p.add_argument("--gens", nargs="+", required=True)
    _common(p)
    p.set_defaults(func=cmd_nf)

    for verb, func, needs_c, helptext in (
            ("lct", cmd_lct, False, "exact weighted log canonical threshold of a monomial weight"),
            ("mideal", cmd_mideal, True, "monomial generators of the multiplier ideal up to degree D"),
            ("witness", cmd_witness, True, "exact openness witness eps for z^beta at c")):
        p = sub.add_parser(verb, help=helptext)
        p.add_argument("--weight", nargs="+", required=True, help="exponent generators, e.g. '(2,0);(0,3)'")
        if verb != "mideal":
            p.add_argument("--beta", default=None, help="exponent of f = z^beta (default 0)")
        if needs_c:
            p.add_argument("--c", required=True, help="positive rational c")
        if verb == "lct":
            p.add_argument("--certificate", action="store_true", help="also print primal and dual optima")
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("estimate", help="numeric threshold, slope fit (--c) or clipped integral (--c --eps)")
    _weight_args(p, "phi")
    p.add_argument("--f", default=None, help="polynomial weight f (default 1)")
    p.add_argument("--c", default=None, help="single exponent c: fit the clip ladder instead of bisecting")
    p.add_argument("--eps", default=None, help="with --c: estimate one clipped integral at this clip level")
    p.add_argument("--c-range", nargs=2, default=["1/10", "4"], metavar=("CMIN", "CMAX"),
                   help="bisection bracket (default 1/10 4)")
    p.add_argument("--tol", type=float, default=0.01, help="stop when the bracket is this narrow")
    p.add_argument("--ladder", default=None, help="clip levels, decreasing, e.g. '1/16 1/32 1/64'")
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN,
                   help=f"growth-rate band for the three-way verdict (default {DEFAULT_MARGIN:g})")
    _common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("l1", help="L1 distance of the clipped exp(-2c phi) and exp(-2c psi)")
    _weight_args(p, "phi")
    _weight_args(p, "psi")
    p.add_argument("--c", required=True, help="positive exponent c")
    p.add_argument("--eps", default=None, help=f"clip level (default {DEFAULT_LADDER[-1]:.6g})")
    _common(p)
    p.set_defaults(func=cmd_l1)

    p = sub.add_parser("experiment", help=f"run one of: {', '.join(exps.EXPERIMENTS)}")
    p.add_argument("name", nargs="?", default=None, help="experiment id (or 'experiment' in --config)")
    p.add_argument("--j", nargs="+", type=int, default=None, help="threshold-jump: j values")
    p.add_argument("--deltas", nargs="+", default=None, help="convergence-from-below: decreasing rationals")
    p.add_argument("--h", nargs="+", default=None, help="strong-openness: relative offsets")
    p.add_argument("--family", nargs="+", default=None, help="semicontinuity: polynomials g with psi = log|g|")
    p.add_argument("--weight", dest="x_weight", nargs="+", default=None, metavar="EXPS",
                   help="convergence-from-below, strong-openness: monomial weight generators")
    p.add_argument("--beta", dest="x_beta", default=None, metavar="BETA", help="exponent of f = z^beta")
    p.add_argument("--phi", dest="x_phi", default=None, metavar="G", help="semicontinuity: phi = log|g|")
    p.add_argument("--f", dest="x_f", default=None, metavar="F", help="semicontinuity: polynomial weight f")
    p.add_argument("--c", dest="x_c", default=None, metavar="C", help="semicontinuity: exponent (default 0.9)")
    p.add_argument("--tolerance", dest="x_tolerance", type=float, default=None, metavar="TOL",
                   help="pass band around each expected threshold")
    _common(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _config_value(action, key, value):
    """Coerce a JSON value the way argparse would coerce the same flag."""
    def one(v):
        if isinstance(v, (dict, list)) or v is None:
            raise UsageError(f"config key {key!r} has an invalid value {v!r}")
        if action.choices is not None and v not in action.choices:
            raise UsageError(f"config key {key!r} must be one of {', '.join(map(str, action.choices))}")
        if action.type is None:
            return v if isinstance(v, bool) else str(v)
        if isinstance(v, bool) or (action.type is int and isinstance(v, float)):
            raise UsageError(f"config key {key!r} has an invalid value {v!r}")
        try:
            return action.type(v)
        except (TypeError, ValueError):
            raise UsageError(f"config key {key!r} has an invalid value {v!r}") from None

    if action.nargs in ("+", "*") or isinstance(action.nargs, int):
        items = value if isinstance(value, list) else [value]
        return [one(v) for v in items]
    if isinstance(action, argparse._StoreTrueAction):
        if not isinstance(value, bool):
            raise UsageError(f"config key {key!r} must be true or false")
        return value
    return one(value)


def parse_args(argv, parser=None):
    """Parse twice: config values become defaults, explicit flags win."""
    parser = parser or build_parser()
    args = parser.parse_args(argv)
    args.config_data = {}
    if args.config:
        data = _load_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.verb]
        known = {a.dest: a for a in sub._actions}
        flat = {}
        for k, v in data.items():
            key = k.replace("-", "_")
            if key in ("experiment", "params"):
                continue
            if key not in known:
                raise UsageError(f"config key {k!r} is not an option of '{args.verb}'")
            flat[key] = _config_value(known[key], k, v)
        sub.set_defaults(**flat)
        args = parser.parse_args(argv)
        args.config_data = data
    return args


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parse_args(argv, parser)
        if args.D is not None and args.D < 0:
            raise UsageError("-D must be >= 0")
        if args.n is not None and args.n < 1:
            raise UsageError("-n must be >= 1")
        code = args.func(args, out)
        return 0 if code is None else code
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else 2
    except (UsageError, ParseError) as exc:
        err.write(f"lctbench: usage error: {exc}\n")
        return 2
    except ThresholdDiagnosticError as exc:
        err.write(f"lctbench: diagnostic failure: {exc}\n")
        for fit in exc.table:
            err.write(f"  c={fit.c:.6g} growth_rate={fit.growth_rate:.4g} verdict={fit.verdict}\n")
        return 1
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        err.write(f"lctbench: precondition failed: {exc}\n")
        return 1


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
