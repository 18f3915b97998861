"""Reproducible checks of the threshold statements on explicit families.

Each ``run_*`` function returns an :class:`ExperimentReport` whose cases carry
the expected value, where that value comes from (``provenance``), the observed
value, the tolerance and a pass/fail verdict.  Exact (LP) cases are compared
with rational equality; numeric cases use explicit tolerances echoed in the
report.  Serialised output never contains wall-clock data, so a report is
byte-for-byte reproducible from its inputs and seed.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .newton import (
    INF,
    MonomialWeight,
    format_value,
    lct,
    lct_scaling,
    openness_witness,
)
from .numeric import (
    DEFAULT_LADDER,
    DEFAULT_MARGIN,
    LogAbsHol,
    MonomialMax,
    SampleConfig,
    Scaled,
    WeightFunction,
    divergence_slope,
    estimate_threshold,
    l1_distance,
    weight_l1_distance,
)
from .parsing import parse_polynomial
from .ring import Polynomial, format_polynomial

# provenance tags for expected values
REFERENCE = "reference-value"  # published closed-form value
LP_EXACT = "lp-exact"  # exact Newton-polyhedron linear program
SCALING = "scaling-law"  # lct(t a) = lct(a) / t
TREND = "monotone-trend"  # ordering expected along a family
PRECONDITION = "precondition"
BOUNDARY = "open-interval"  # membership is strict at the threshold

CSV_COLUMNS = ("experiment", "case", "parameter", "expected", "observed", "tolerance",
               "verdict", "provenance")


class PreconditionError(ValueError):
    """An experiment refused to run because its inputs violate a precondition."""


@dataclass(frozen=True)
class Case:
    name: str
    parameter: str
    expected: str
    observed: str
    tolerance: str
    passed: bool
    provenance: str
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class ExperimentReport:
    experiment: str
    inputs: dict
    cases: list
    seed: int | None
    runtime: float = 0.0
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.cases) and all(c.passed for c in self.cases)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def rows(self) -> list:
        return [(self.experiment, c.name, c.parameter, c.expected, c.observed, c.tolerance,
                 c.verdict, c.provenance) for c in self.cases]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(self.rows())
        return buf.getvalue()

    def to_jsonl(self) -> str:
        lines = [json.dumps({"record": "experiment", "experiment": self.experiment,
                             "inputs": self.inputs, "seed": self.seed}, sort_keys=True)]
        for c in self.cases:
            rec = dict(zip(CSV_COLUMNS[1:], (c.name, c.parameter, c.expected, c.observed,
                                             c.tolerance, c.verdict, c.provenance)))
            rec.update(record="case", experiment=self.experiment, detail=c.detail)
            lines.append(json.dumps(rec, sort_keys=True))
        lines.append(json.dumps({"record": "summary", "experiment": self.experiment,
                                 "verdict": self.verdict, **self.summary}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        header = CSV_COLUMNS[1:]
        body = [r[1:] for r in self.rows()]
        widths = [max(len(str(x)) for x in col) for col in zip(header, *body)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        out = [f"experiment {self.experiment}  seed={self.seed}", fmt.format(*header).rstrip(),
               fmt.format(*("-" * w for w in widths))]
        out += [fmt.format(*r).rstrip() for r in body]
        for k, v in self.summary.items():
            out.append(f"{k}: {v}")
        out.append(f"overall: {self.verdict}  ({self.runtime:.1f} s)")
        return "\n".join(out) + "\n"


def _num(x: float) -> str:
    if x == math.inf:
        return "inf"
    return f"{x:.6g}"


def _interval(est) -> str:
    return f"[{_num(est.c_lo)}, {_num(est.c_hi)}]"


def _run_parallel(tasks: Sequence[Callable], threads: int) -> list:
    # results come back in declaration order whatever the scheduling
    if threads <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(min(threads, len(tasks))) as pool:
        return list(pool.map(lambda t: t(), tasks))


def _monomial(beta: Sequence[int]) -> Polynomial:
    return Polynomial.monomial(tuple(beta))


def _finish(name, inputs, cases, cfg, start, summary=None) -> ExperimentReport:
    return ExperimentReport(name, inputs, list(cases), None if cfg is None else cfg.seed,
                            time.perf_counter() - start, summary or {})


def _threshold_case(name, parameter, f, phi, expected: float, tolerance: float, cfg,
                    c_range, tol, provenance, containment: bool) -> Case:
    est = estimate_threshold(f, phi, c_range, tol, cfg)
    if containment:
        # the whole bracket must sit inside expected +- tolerance
        ok = est.bounded and expected - tolerance <= est.c_lo and est.c_hi <= expected + tolerance
    else:
        ok = est.bounded and abs(est.midpoint - expected) <= tolerance
    return Case(name, parameter, _num(expected), _interval(est), f"+-{tolerance:g}", ok, provenance,
                {"c_lo": est.c_lo, "c_hi": est.c_hi, "midpoint": est.midpoint,
                 "probes": [[fit.c, fit.growth_rate] for fit in est.fits]})


# --------------------------------------------------------------------------


def run_threshold_jump(j_values: Sequence[int], cfg: SampleConfig, tolerance: float = 0.15,
                       c_range=(0.1, 4.0), tol: float = 0.01) -> ExperimentReport:
    """Thresholds need not converge without the condition ``psi <= phi``.

    With ``f = z1`` the limit weight ``log|z1|`` has threshold 2 but every
    ``log|z1 + z2/j|`` has threshold 1, although the weights converge in L1.
    """
    j_values = [int(j) for j in j_values]
    if not j_values or any(j < 1 for j in j_values):
        raise PreconditionError("need at least one j, and every j >= 1")
    start = time.perf_counter()
    z1 = parse_polynomial("z1", 2)
    phi = LogAbsHol(z1)
    family = [(j, LogAbsHol(parse_polynomial(f"z1 + z2/{j}", 2))) for j in j_values]
    tasks = [lambda: _threshold_case("limit", "phi=log|z1|, f=z1", z1, phi, 2.0, tolerance, cfg,
                                     c_range, tol, REFERENCE, True)]
    for j, psi in family:
        tasks.append(lambda j=j, psi=psi: _threshold_case(
            f"j={j}", f"phi={psi.describe()}, f=z1", z1, psi, 1.0, tolerance, cfg,
            c_range, tol, REFERENCE, True))
    cases = _run_parallel(tasks, cfg.threads)
    # weights converge in L1 as j grows, even though the thresholds do not
    dists = [weight_l1_distance(phi, psi, cfg) for _, psi in family]
    for (j, _), d in zip(family, dists):
        cases.append(Case(f"l1 j={j}", f"||log|z1+z2/{j}| - log|z1|||_1", "-", _num(d.mean),
                          f"se={_num(d.std_error)}", True, "informational",
                          {"mean": d.mean, "std_error": d.std_error}))
    order = sorted(range(len(family)), key=lambda i: family[i][0])
    if len(order) >= 2:
        seq = [dists[i].mean for i in order]
        ok = all(b < a for a, b in zip(seq, seq[1:]))
        cases.append(Case("l1 trend", "j increasing", "strictly decreasing",
                          " > ".join(_num(x) for x in seq), "exact order", ok, TREND))
    inputs = {"j_values": j_values, "c_range": list(c_range), "tol": tol, "tolerance": tolerance,
              **cfg.echo()}
    return _finish("threshold-jump", inputs, cases, cfg, start)


def run_convergence_from_below(weight: MonomialWeight, beta: Sequence[int], deltas: Sequence,
                               cfg: SampleConfig | None, tolerance: float = 0.1,
                               c_range=None, tol: float = 0.01) -> ExperimentReport:
    """Thresholds of ``(1 + delta) phi`` increase to the threshold of ``phi`` as ``delta -> 0``.

    The exact path uses the LP; the numeric path (skipped when ``cfg`` is None)
    estimates each threshold from the clipped integrals.
    """
    deltas = [Fraction(d) for d in deltas]
    if not deltas or any(d <= 0 for d in deltas):
        raise PreconditionError("deltas must be positive")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise PreconditionError("deltas must be strictly decreasing")
    beta = tuple(beta)
    start = time.perf_counter()
    base = lct(weight, beta).value
    cases = []
    exact = []
    for d in deltas:
        sc = lct_scaling(weight, 1 + d, beta)
        want = INF if base == INF else base / (1 + d)
        exact.append(sc.value)
        cases.append(Case(f"exact delta={d}", f"t={1 + d}", format_value(want), format_value(sc.value),
                          "exact", sc.consistent and sc.value == want, SCALING))
    finite = base != INF
    if finite:
        ok = all(a < b for a, b in zip(exact, exact[1:])) and all(v < base for v in exact)
        cases.append(Case("exact increasing", "delta decreasing", f"strictly increasing to {format_value(base)}",
                          " < ".join(format_value(v) for v in exact), "exact", ok, SCALING))
    limit = lct_scaling(weight, 1, beta)
    cases.append(Case("exact limit", "delta=0", format_value(base), format_value(limit.value), "exact",
                      limit.value == base, LP_EXACT))
    if cfg is not None and finite:
        if c_range is None:
            c_range = (0.1, 2 * float(base) + 1)
        f = _monomial(beta)
        phi = MonomialMax(weight.gens)
        tasks = [lambda d=d, v=v: _threshold_case(
            f"numeric delta={d}", f"(1+{d})*{phi.describe()}", f, Scaled(1 + d, phi), float(v),
            tolerance, cfg, c_range, tol, SCALING, False) for d, v in zip(deltas, exact)]
        numeric = _run_parallel(tasks, cfg.threads)
        cases += numeric
        mids = [c.detail["midpoint"] for c in numeric]
        ok = all(b >= a - 2 * tol for a, b in zip(mids, mids[1:]))
        cases.append(Case("numeric nondecreasing", "delta decreasing", "nondecreasing",
                          " <= ".join(_num(m) for m in mids), f"2*tol={2 * tol:g}", ok, TREND))
    inputs = {"weight": weight.describe(), "beta": list(beta), "deltas": [str(d) for d in deltas],
              "tolerance": tolerance, "tol": tol, "c_range": None if c_range is None else list(c_range),
              **({} if cfg is None else cfg.echo())}
    return _finish("convergence-from-below", inputs, cases, cfg, start,
                   {"threshold": format_value(base)})


def run_semicontinuity(phi: WeightFunction, family: Sequence[WeightFunction], c: float,
                       cfg: SampleConfig, f: Polynomial | None = None,
                       ladder=DEFAULT_LADDER, margin: float = DEFAULT_MARGIN) -> ExperimentReport:
    """Weights close to ``phi`` in L1 keep ``exp(-2c psi)`` integrable for ``c`` below phi's threshold.

    Members are ordered by decreasing L1 distance to ``phi``.  For each one the
    report gives that distance, the divergence verdict at ``c`` and the L1
    distance of the clipped exponentials, which should decrease along the
    family.  The empirical delta is the largest distance from which every
    closer member is integrable.
    """
    family = list(family)
    if not family:
        raise PreconditionError("the family must be nonempty")
    if c <= 0:
        raise PreconditionError("c must be positive")
    f = Polynomial.constant(1, phi.dim) if f is None else f
    start = time.perf_counter()
    base_fit = divergence_slope(f, phi, c, ladder, cfg, margin)
    if not base_fit.converges:
        raise PreconditionError(
            f"c={c:g} is not below the threshold of {phi.describe()} "
            f"(growth rate {base_fit.growth_rate:.3g}, verdict {base_fit.verdict})")

    def member(psi):
        d = weight_l1_distance(phi, psi, cfg)
        fit = divergence_slope(f, psi, c, ladder, cfg, margin)
        e = l1_distance(phi, psi, c, cfg, ladder[-1])
        return psi, d, fit, e

    results = _run_parallel([lambda p=p: member(p) for p in family], cfg.threads)
    results.sort(key=lambda r: -r[1].mean)
    cases = []
    for psi, d, fit, e in results:
        cases.append(Case(f"verdict {psi.describe()}", f"c={_num(c)}, ||psi-phi||_1={_num(d.mean)}",
                          "no divergence", fit.verdict, f"margin={margin:g}", fit.converges, PRECONDITION,
                          {"weight_l1": d.mean, "weight_l1_se": d.std_error, "growth_rate": fit.growth_rate,
                           "exp_l1": e.mean, "exp_l1_se": e.std_error}))
    exp_l1 = [r[3].mean for r in results]
    if len(results) >= 2:
        ok = all(b < a for a, b in zip(exp_l1, exp_l1[1:]))
        cases.append(Case("exp-l1 trend", "family by decreasing ||psi-phi||_1", "strictly decreasing",
                          " > ".join(_num(x) for x in exp_l1), "exact order", ok, TREND))
    # empirical delta: walk from the closest member outwards while verdicts hold
    delta = None
    for psi, d, fit, _ in reversed(results):
        if not fit.converges:
            break
        delta = d.mean
    inputs = {"phi": phi.describe(), "family": [p.describe() for p in family], "c": c,
              "f": format_polynomial(f), "margin": margin, **cfg.echo()}
    summary = {"empirical_delta": None if delta is None else _num(delta),
               "phi_growth_rate": _num(base_fit.growth_rate)}
    return _finish("semicontinuity", inputs, cases, cfg, start, summary)


def run_strong_openness(weight: MonomialWeight, beta: Sequence[int], cfg: SampleConfig | None,
                        hs: Sequence = (Fraction(1, 5), Fraction(1, 10)),
                        ladder=DEFAULT_LADDER, margin: float = DEFAULT_MARGIN) -> ExperimentReport:
    """The set of integrable exponents is the open interval ``(0, c*)``.

    Below ``c*`` an exact witness ``eps`` with ``lct > (1 + eps) c`` is
    produced and the estimator must report no divergence; above ``c*`` it must
    report divergence, and ``c*`` itself is not a member.
    """
    beta = tuple(beta)
    start = time.perf_counter()
    star = lct(weight, beta).value
    cases = []
    inputs = {"weight": weight.describe(), "beta": list(beta), "h": [str(Fraction(h)) for h in hs],
              "margin": margin, **({} if cfg is None else cfg.echo())}
    if star == INF:
        cases.append(Case("interval", "c*", "(0,inf)", "(0,inf)", "exact", True, LP_EXACT))
        return _finish("strong-openness", inputs, cases, cfg, start, {"interval": "(0,inf)"})
    boundary = openness_witness(weight, beta, star)
    cases.append(Case("boundary", f"c=c*={format_value(star)}", "not a member",
                      "not a member" if boundary is None else f"eps={boundary}", "exact",
                      boundary is None, BOUNDARY))
    f = _monomial(beta)
    phi = MonomialMax(weight.gens)
    tasks = []
    for h in hs:
        h = Fraction(h)
        lo, hi = (1 - h) * star, (1 + h) * star
        eps = openness_witness(weight, beta, lo)
        ok = eps is not None and eps > 0 and lct(weight, beta).value > (1 + eps) * lo
        cases.append(Case(f"witness h={h}", f"c={lo}", "eps>0 with lct>(1+eps)c",
                          "not a member" if eps is None else f"eps={eps}", "exact", ok, LP_EXACT))
        above = openness_witness(weight, beta, hi)
        cases.append(Case(f"nonmember h={h}", f"c={hi}", "not a member",
                          "not a member" if above is None else f"eps={above}", "exact",
                          above is None, LP_EXACT))
        if cfg is not None:
            tasks.append((h, lo, "no divergence"))
            tasks.append((h, hi, "divergence"))

    def probe(item):
        h, c, want = item
        fit = divergence_slope(f, phi, float(c), ladder, cfg, margin)
        ok = fit.converges if want == "no divergence" else fit.diverges
        return Case(f"numeric c={c}", f"h={h}", want, fit.verdict, f"margin={margin:g}", ok, LP_EXACT,
                    {"growth_rate": fit.growth_rate, "slope": fit.slope})

    if cfg is not None:
        cases += _run_parallel([lambda t=t: probe(t) for t in tasks], cfg.threads)
    return _finish("strong-openness", inputs, cases, cfg, start,
                   {"interval": f"(0,{format_value(star)})"})


EXPERIMENTS = ("threshold-jump", "convergence-from-below", "semicontinuity", "strong-openness")


def run_experiment(experiment: str, params: dict, cfg: SampleConfig | None) -> ExperimentReport:
    """Dispatch from a plain parameter dict (as read from a config file)."""
    from .parsing import parse_exponent, parse_exponent_list

    def weight_of(desc):
        if isinstance(desc, str):
            return MonomialWeight(parse_exponent_list(desc))
        return MonomialWeight([tuple(g) for g in desc])

    def beta_of(desc, n):
        if desc is None:
            return (0,) * n
        return parse_exponent(desc) if isinstance(desc, str) else tuple(desc)

    def wfun(desc, n):
        if isinstance(desc, dict):
            kind = desc.get("kind", "log-abs")
            if kind == "log-abs":
                return LogAbsHol(parse_polynomial(desc["g"], n))
            if kind == "monomial-max":
                return MonomialMax(weight_of(desc["gens"]).gens)
            if kind == "scaled":
                return Scaled(Fraction(desc["t"]), wfun(desc["inner"], n))
            raise PreconditionError(f"unknown weight kind {kind!r}")
        return LogAbsHol(parse_polynomial(desc, n))

    if experiment == "threshold-jump":
        if cfg is None:
            raise PreconditionError("threshold-jump needs a sampling config with a seed")
        kw = {k: params[k] for k in ("tolerance", "tol") if k in params}
        if "c_range" in params:
            kw["c_range"] = tuple(params["c_range"])
        return run_threshold_jump(params.get("j", [4, 32]), cfg, **kw)
    if experiment == "convergence-from-below":
        w = weight_of(params.get("weight", "(1,0)"))
        deltas = [Fraction(str(d)) for d in params.get("deltas", ["2/5", "1/5", "1/10", "1/20"])]
        kw = {k: params[k] for k in ("tolerance", "tol") if k in params}
        if "c_range" in params:
            kw["c_range"] = tuple(params["c_range"])
        return run_convergence_from_below(w, beta_of(params.get("beta", "(1,0)"), w.dim), deltas, cfg, **kw)
    if experiment == "semicontinuity":
        if cfg is None:
            raise PreconditionError("semicontinuity needs a sampling config with a seed")
        n = int(params.get("n", 2))
        phi = wfun(params.get("phi", "z1"), n)
        fam = params.get("family", [f"z1 + z2/{j}" for j in (2, 8, 32)])
        f = parse_polynomial(params["f"], n) if "f" in params else None
        return run_semicontinuity(phi, [wfun(s, n) for s in fam], float(params.get("c", 0.9)), cfg, f)
    if experiment == "strong-openness":
        w = weight_of(params.get("weight", "(2,0);(0,3)"))
        hs = [Fraction(str(h)) for h in params.get("h", ["1/5", "1/10"])]
        return run_strong_openness(w, beta_of(params.get("beta"), w.dim), cfg, hs)
    raise PreconditionError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
