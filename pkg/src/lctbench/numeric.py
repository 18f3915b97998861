"""Monte Carlo estimation of weighted log canonical thresholds.

The integral of ``|f|^2 exp(-2c phi)`` over a polydisc is replaced by the
clipped surrogate with ``phi`` replaced by ``max(phi, log eps)``.  Below the
threshold the surrogate converges as ``eps -> 0``; above it, it grows like a
power of ``1/eps``.  The growth rate is read off a least-squares slope of the
log increments ``log(I(eps_{m+1}) - I(eps_m))`` against ``log(1/eps)`` over a
ladder of clip levels (the increments isolate the singular part of ``I``).
That rate tends to ``2 (c - c_th)``, and the threshold is bracketed by
bisecting on its sign.

Sampling is importance-weighted: each coordinate mixes a uniform draw on the
disc with a radial density ``~ rho^(2s-1)`` concentrated at 0, and one fibre
coordinate also concentrates around the roots of the weight's polynomials, so
the singular locus is visited at every clip scale.  Random numbers are a pure
function of ``(seed, sample index)`` (see :mod:`lctbench.rng`) and every sample
is computed inside a fixed block of indices, which makes estimates
bit-identical for any chunking or thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .ring import Polynomial, format_polynomial
from .rng import uniforms

BLOCK = 8192
DEFAULT_LADDER = tuple(2.0 ** -m for m in range(10, 31))
DEFAULT_MARGIN = 0.05
SAMPLERS = ("uniform", "polar-importance")


class ThresholdDiagnosticError(RuntimeError):
    """Divergence verdicts that contradict monotonicity in c."""

    def __init__(self, message: str, table=()):
        super().__init__(message)
        self.table = list(table)


# --------------------------------------------------------------------------
# weights


class WeightFunction:
    """A plurisubharmonic weight that can be evaluated on batches of points."""

    dim: int

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def fiber_polys(self) -> tuple:
        """Polynomials whose zero sets carry the singularity (may be empty)."""
        return ()

    def describe(self) -> str:
        raise NotImplementedError


def _log_abs(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


@dataclass(frozen=True)
class LogAbsHol(WeightFunction):
    """phi = log|g|"""

    g: Polynomial

    @property
    def dim(self):
        return self.g.dim

    def evaluate(self, z):
        return _log_abs(self.g.evaluate(z))

    def fiber_polys(self):
        return (self.g,) if self.g.total_degree() > 0 else ()

    def describe(self):
        return f"log|{format_polynomial(self.g)}|"


@dataclass(frozen=True)
class LogSumSq(WeightFunction):
    """phi = 1/2 log sum_j |g_j|^2"""

    gs: tuple

    def __post_init__(self):
        object.__setattr__(self, "gs", tuple(self.gs))
        if not self.gs:
            raise ValueError("LogSumSq needs at least one polynomial")
        if len({g.dim for g in self.gs}) != 1:
            raise ValueError("polynomials of different dimensions")

    @property
    def dim(self):
        return self.gs[0].dim

    def evaluate(self, z):
        total = sum(np.abs(g.evaluate(z)) ** 2 for g in self.gs)
        with np.errstate(divide="ignore"):
            return 0.5 * np.log(total)

    def fiber_polys(self):
        return tuple(g for g in self.gs if g.total_degree() > 0)

    def describe(self):
        return "1/2 log(" + " + ".join(f"|{format_polynomial(g)}|^2" for g in self.gs) + ")"


@dataclass(frozen=True)
class MonomialMax(WeightFunction):
    """phi = log max_j |z^{a_j}|"""

    gens: tuple

    def __post_init__(self):
        gens = tuple(tuple(g) for g in self.gens)
        if not gens or len({len(g) for g in gens}) != 1:
            raise ValueError("MonomialMax needs generators of a common dimension")
        object.__setattr__(self, "gens", gens)

    @property
    def dim(self):
        return len(self.gens[0])

    def evaluate(self, z):
        logs = _log_abs(z)
        A = np.array([[float(x) for x in g] for g in self.gens])
        # 0 * log 0 must count as 0
        out = np.full(logs.shape[0], -np.inf)
        for row in A:
            used = row != 0
            out = np.maximum(out, logs[:, used] @ row[used] if used.any() else 0.0)
        return out

    def describe(self):
        return "log max(" + ", ".join("|z^(" + ",".join(map(str, g)) + ")|" for g in self.gens) + ")"


@dataclass(frozen=True)
class Scaled(WeightFunction):
    """t * inner"""

    t: Fraction
    inner: WeightFunction

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if self.t <= 0:
            raise ValueError("scale must be positive")

    @property
    def dim(self):
        return self.inner.dim

    def evaluate(self, z):
        return float(self.t) * self.inner.evaluate(z)

    def fiber_polys(self):
        return self.inner.fiber_polys()

    def describe(self):
        return f"{self.t}*({self.inner.describe()})"


@dataclass(frozen=True)
class Shifted(WeightFunction):
    """inner + s"""

    s: float
    inner: WeightFunction

    @property
    def dim(self):
        return self.inner.dim

    def evaluate(self, z):
        return self.inner.evaluate(z) + float(self.s)

    def fiber_polys(self):
        return self.inner.fiber_polys()

    def describe(self):
        return f"({self.inner.describe()}) + {self.s}"


def zero_weight(n: int) -> WeightFunction:
    """phi identically 0."""
    return Shifted(0.0, LogAbsHol(Polynomial.constant(1, n)))


# --------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class SampleConfig:
    seed: int
    samples: int = 2 ** 18
    radius: float = 0.5
    sampler: str = "polar-importance"
    chunk_size: int = 1 << 16
    threads: int = 1
    power: float = 0.05  # radial density ~ rho^(2*power - 1) near the centre
    uniform_mix: float = 0.25

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.chunk_size < 1 or self.threads < 1:
            raise ValueError("chunk_size and threads must be >= 1")
        if not 0 < self.power <= 1 or not 0 < self.uniform_mix <= 1:
            raise ValueError("power and uniform_mix must lie in (0, 1]")

    def echo(self) -> dict:
        return {"seed": self.seed, "samples": self.samples, "radius": self.radius,
                "sampler": self.sampler, "power": self.power, "uniform_mix": self.uniform_mix}


@dataclass(frozen=True)
class _Fiber:
    k: int  # fibre coordinate
    coeffs: tuple  # per polynomial: tuple of coefficient polynomials by degree in z_k


def _choose_fiber(polys: Sequence[Polynomial], n: int) -> _Fiber | None:
    polys = [p for p in polys if p.total_degree() > 0]
    if not polys:
        return None

    def score(k):
        degs = [p.degree_in(k) for p in polys]
        pos = [d for d in degs if d > 0]
        return (-len(pos), max(pos, default=0), k)

    k = min(range(n), key=score)
    coeffs = []
    for p in polys:
        d = p.degree_in(k)
        if d <= 0:
            continue
        by_deg = [{} for _ in range(d + 1)]
        for e, c in p.as_dict().items():
            e2 = list(e)
            e2[k] = 0
            by_deg[e[k]][tuple(e2)] = c
        coeffs.append(tuple(Polynomial(t, n) for t in by_deg))
    return _Fiber(k, tuple(coeffs))


def _roots(coeffs: tuple, z: np.ndarray) -> np.ndarray:
    """Roots in the fibre variable for each row of z; NaN where undefined."""
    vals = [c.evaluate(z) for c in coeffs]
    d = len(vals) - 1
    lead = vals[-1]
    bad = lead == 0
    safe = np.where(bad, 1.0, lead)
    with np.errstate(all="ignore"):
        if d == 1:
            out = (-vals[0] / safe)[:, None]
        elif d == 2:
            a, b, c = safe, vals[1], vals[0]
            disc = np.sqrt(b * b - 4 * a * c)
            # pick the sign that avoids cancellation
            sgn = np.where((b.conjugate() * disc).real >= 0, 1.0, -1.0)
            q = -0.5 * (b + sgn * disc)
            q_safe = np.where(q == 0, 1.0, q)
            r1 = q / a
            r2 = np.where(q == 0, 0.0, c / q_safe)
            out = np.stack([r1, r2], axis=1)
        else:
            comp = np.zeros((len(lead), d, d), dtype=complex)
            for j in range(d):
                comp[:, 0, j] = -vals[d - 1 - j] / safe
            for j in range(1, d):
                comp[:, j, j - 1] = 1.0
            out = np.linalg.eigvals(comp)
    out = np.where(bad[:, None] | ~np.isfinite(out), np.nan, out)
    return out


def _log_pol(rho: np.ndarray, R: float, s: float) -> np.ndarray:
    """Log area density of the radial power law of radius R around a centre."""
    with np.errstate(divide="ignore"):
        val = math.log(s) + (2 * s - 2) * np.log(rho) - math.log(math.pi) - 2 * s * math.log(R)
    return np.where(rho < R, val, -np.inf)


def _logsumexp(parts) -> np.ndarray:
    stack = np.stack(parts)
    m = stack.max(axis=0)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        return m_safe + np.log(np.exp(stack - m_safe).sum(axis=0))


def _draw_block(start: int, count: int, n: int, cfg: SampleConfig, fiber: _Fiber | None):
    r, s, q = cfg.radius, cfg.power, cfg.uniform_mix
    U = uniforms(cfg.seed, start, count, 3 * n)
    z = np.zeros((count, n), dtype=complex)
    log_density = np.zeros(count)
    log_uniform = -math.log(math.pi * r * r)
    order = [k for k in range(n) if fiber is None or k != fiber.k]
    if fiber is not None:
        order.append(fiber.k)
    for slot, k in enumerate(order):
        uc, ur, ut = U[:, 3 * slot], U[:, 3 * slot + 1], U[:, 3 * slot + 2]
        phase = np.exp(2j * math.pi * ut)
        if cfg.sampler == "uniform":
            z[:, k] = r * np.sqrt(ur) * phase
            log_density += log_uniform
            continue
        if fiber is None or k != fiber.k:
            rho = np.where(uc < q, r * np.sqrt(ur), r * ur ** (1 / (2 * s)))
            z[:, k] = rho * phase
            log_density += _logsumexp([np.full(count, math.log(q) + log_uniform),
                                       math.log(1 - q) + _log_pol(rho, r, s)]) if q < 1 else log_uniform
            continue
        # fibre coordinate: uniform | power law at 0 | power law at each root
        roots = np.concatenate([_roots(c, z) for c in fiber.coeffs], axis=1)
        valid = np.isfinite(roots.real) & np.isfinite(roots.imag)
        nvalid = valid.sum(axis=1)
        # valid roots first, keeping their relative order
        perm = np.argsort(~valid, axis=1, kind="stable")
        roots = np.take_along_axis(roots, perm, axis=1)
        q_root = np.where(nvalid > 0, (1 - q) / 2, 0.0)
        q_zero = 1 - q - q_root
        R_root = 2 * r
        comp_u = uc < q
        comp_0 = (~comp_u) & (uc < q + q_zero)
        frac = np.where(q_root > 0, (uc - q - q_zero) / np.where(q_root > 0, q_root, 1.0), 0.0)
        j = np.clip((frac * np.maximum(nvalid, 1)).astype(int), 0, np.maximum(nvalid - 1, 0))
        centre = np.where(comp_u | comp_0, 0.0, roots[np.arange(count), j])
        centre = np.where(np.isfinite(centre), centre, 0.0)
        rho = np.where(comp_u, r * np.sqrt(ur),
                       np.where(comp_0, r, R_root) * ur ** (1 / (2 * s)))
        zk = centre + rho * phase
        z[:, k] = zk
        parts = [np.full(count, math.log(q) + log_uniform),
                 np.where(q_zero > 0, np.log(np.maximum(q_zero, 1e-300)), -np.inf) + _log_pol(np.abs(zk), r, s)]
        with np.errstate(divide="ignore"):
            per_root = np.log(np.where(nvalid > 0, q_root / np.maximum(nvalid, 1), 0.0))
        for col in range(roots.shape[1]):
            ok = valid[np.arange(count), perm[:, col]]
            dist = np.abs(zk - np.where(ok, roots[:, col], 0.0))
            parts.append(np.where(ok, per_root + _log_pol(dist, R_root, s), -np.inf))
        log_density += _logsumexp(parts)
    inside = (np.abs(z) < r).all(axis=1)
    logw = np.where(inside, -log_density, -np.inf)
    return z, logw


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Sample-dependent, c-independent data shared by every estimate."""

    cfg: SampleConfig
    log_base: np.ndarray = field(repr=False)  # log|f|^2 + log importance weight
    phis: tuple = field(repr=False)  # phi values per weight


def _blocks(cfg: SampleConfig):
    return [(b, min(BLOCK, cfg.samples - b)) for b in range(0, cfg.samples, BLOCK)]


@lru_cache(maxsize=8)
def sample_set(f: Polynomial, weights: tuple, cfg: SampleConfig) -> SampleSet:
    n = f.dim
    if any(w.dim != n for w in weights):
        raise ValueError("weights and f must share the dimension")
    polys = [p for w in weights for p in w.fiber_polys()]
    fiber = _choose_fiber(polys, n) if cfg.sampler == "polar-importance" else None

    def work(block):
        start, count = block
        z, logw = _draw_block(start, count, n, cfg, fiber)
        with np.errstate(divide="ignore", invalid="ignore"):
            base = 2 * _log_abs(f.evaluate(z)) + logw
            phis = [np.asarray(w.evaluate(z), dtype=float) for w in weights]
        return base, phis

    blocks = _blocks(cfg)
    per_chunk = max(1, -(-cfg.chunk_size // BLOCK))
    chunks = [blocks[i:i + per_chunk] for i in range(0, len(blocks), per_chunk)]
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(lambda ch: [work(b) for b in ch], chunks))
    else:
        results = [[work(b) for b in ch] for ch in chunks]
    flat = [r for ch in results for r in ch]
    base = np.concatenate([r[0] for r in flat])
    base = np.where(np.isnan(base), -np.inf, base)
    phis = tuple(np.concatenate([r[1][i] for r in flat]) for i in range(len(weights)))
    for p in phis:
        p.setflags(write=False)
    base.setflags(write=False)
    return SampleSet(cfg, base, phis)


# --------------------------------------------------------------------------
# estimators


@dataclass(frozen=True)
class IntegralEstimate:
    mean: float
    std_error: float
    log_mean: float
    samples: int
    seed: int
    sampler: str

    def as_dict(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "log_mean": self.log_mean,
                "samples": self.samples, "seed": self.seed, "sampler": self.sampler}


def _estimate(log_terms: np.ndarray, cfg: SampleConfig) -> IntegralEstimate:
    N = log_terms.shape[-1]
    amax = log_terms.max(axis=-1)
    if not np.isfinite(amax):
        return IntegralEstimate(0.0, 0.0, -math.inf, N, cfg.seed, cfg.sampler)
    x = np.exp(log_terms - amax)
    s1 = x.sum() / N
    s2 = (x * x).sum() / N
    var = max(s2 - s1 * s1, 0.0) * N / max(N - 1, 1)
    log_mean = float(amax + math.log(s1))
    scale = math.exp(amax) if amax < 700 else math.inf
    return IntegralEstimate(float(scale * s1), float(scale * math.sqrt(var / N)), log_mean, N,
                            cfg.seed, cfg.sampler)


def _clipped_terms(ss: SampleSet, phi: np.ndarray, c: float, eps: float) -> np.ndarray:
    clipped = np.maximum(phi, math.log(eps))
    return ss.log_base - 2 * c * clipped


def _check_clip(eps: float):
    if not 0 < eps <= 1:
        raise ValueError("clip level must lie in (0, 1]")


def clipped_integral(f: Polynomial, phi: WeightFunction, c: float, eps_clip: float,
                     cfg: SampleConfig) -> IntegralEstimate:
    """Estimate of the integral of ``|f|^2 exp(-2c max(phi, log eps_clip))`` over the polydisc."""
    _check_clip(eps_clip)
    if c < 0:
        raise ValueError("c must be non-negative")
    ss = sample_set(f, (phi,), cfg)
    return _estimate(_clipped_terms(ss, ss.phis[0], c, eps_clip), cfg)


@dataclass(frozen=True)
class SlopeFit:
    """Clip-ladder diagnostics at one value of c.

    ``slope`` is the least-squares slope of ``log I(eps)`` against
    ``log(1/eps)``.  ``growth_rate`` is the same fit applied to the increments
    ``I(eps_{m+1}) - I(eps_m)``: it tends to ``2 (c - c_th)`` on both sides of
    the threshold and is unaffected by the convergent part of ``I``, so the
    verdicts are taken from it.  Within ``margin`` of zero the verdict is
    "indeterminate"; bisection uses the sign alone.
    """

    c: float
    ladder: tuple
    log_integrals: tuple
    std_errors: tuple
    slope: float
    intercept: float
    residual: float
    growth_rate: float
    growth_residual: float
    margin: float
    active_increments: int = 0  # increments that entered the growth fit

    @property
    def diverges(self) -> bool:
        return self.growth_rate >= self.margin

    @property
    def converges(self) -> bool:
        # with fewer than two nonzero increments the clip never bites
        return self.active_increments < 2 or self.growth_rate <= -self.margin

    @property
    def above_threshold(self) -> bool:
        """Sign of the growth rate; the bisection criterion."""
        return self.active_increments >= 2 and self.growth_rate > 0

    @property
    def verdict(self) -> str:
        if self.diverges:
            return "divergence"
        if self.converges:
            return "no divergence"
        return "indeterminate"

    def as_dict(self) -> dict:
        return {"c": self.c, "slope": self.slope, "residual": self.residual,
                "growth_rate": self.growth_rate, "growth_residual": self.growth_residual,
                "margin": self.margin, "active_increments": self.active_increments,
                "verdict": self.verdict,
                "ladder": list(self.ladder), "log_integrals": list(self.log_integrals),
                "std_errors": list(self.std_errors)}


def _linfit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), resid


def _check_ladder(ladder):
    ladder = tuple(float(e) for e in ladder)
    if len(ladder) < 3:
        raise ValueError("the clip ladder needs at least 3 levels")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("the clip ladder must be strictly decreasing")
    for e in ladder:
        _check_clip(e)
    return ladder


class _LadderData:
    """c-independent bookkeeping for one (sample set, weight, ladder).

    Sample ``i`` falls in bin ``b_i`` = number of ladder levels at which its
    weight is clipped.  At level ``m`` the clipped integrand is
    ``exp(base - 2c phi)`` for ``b_i <= m`` and ``exp(base - 2c log eps_m)``
    otherwise, so every level and every increment is a combination of per-bin
    log-sum-exps.  All increments are sums of non-negative terms, which keeps
    them accurate even where ``I`` has converged to many digits.
    """

    def __init__(self, ss: SampleSet, phi: np.ndarray, ladder: tuple):
        self.N = ss.log_base.shape[0]
        self.le = np.log(np.array(ladder))
        M = len(ladder)
        keep = np.isfinite(ss.log_base)
        base, phi = ss.log_base[keep], phi[keep]
        bins = np.searchsorted(-self.le, -phi, side="left")
        order = np.argsort(bins, kind="stable")
        self.base, self.phi, bins = base[order], phi[order], bins[order]
        self.edges = np.searchsorted(bins, np.arange(M + 2))
        # log sum_{b_i > m} exp(base) and exp(2 base), for m = 0..M-1
        g1 = np.array([_lse(self.base[self._slice(b)]) for b in range(M + 1)])
        g2 = np.array([_lse(2 * self.base[self._slice(b)]) for b in range(M + 1)])
        self.tail1 = np.logaddexp.accumulate(g1[::-1])[::-1][1:]
        self.tail2 = np.logaddexp.accumulate(g2[::-1])[::-1][1:]

    def _slice(self, b):
        return slice(self.edges[b], self.edges[b + 1])

    def evaluate(self, c: float):
        le, M, logN = self.le, len(self.le), math.log(self.N)
        v = self.base - 2 * c * self.phi
        p1 = np.array([_lse(v[self._slice(b)]) for b in range(M)])
        p2 = np.array([_lse(2 * v[self._slice(b)]) for b in range(M)])
        log_I = np.logaddexp(np.logaddexp.accumulate(p1), -2 * c * le + self.tail1) - logN
        log_M2 = np.logaddexp(np.logaddexp.accumulate(p2), -4 * c * le + self.tail2) - logN
        with np.errstate(over="ignore", invalid="ignore"):
            rel_var = np.maximum(np.exp(log_M2 - 2 * log_I) - 1, 0.0) * self.N / max(self.N - 1, 1)
            rel_se = np.sqrt(rel_var / self.N)
        log_inc = np.empty(M - 1)
        with np.errstate(divide="ignore"):
            for m in range(M - 1):
                sl = self._slice(m + 1)
                t1 = _lse(v[sl] + np.log(-np.expm1(-2 * c * (le[m] - self.phi[sl]))))
                t2 = -2 * c * le[m + 1] + math.log(-math.expm1(-2 * c * (le[m] - le[m + 1]))) \
                    if c > 0 else -math.inf
                log_inc[m] = np.logaddexp(t1, t2 + self.tail1[m + 1]) - logN
        return log_I, rel_se, log_inc


def _lse(a: np.ndarray) -> float:
    if a.size == 0:
        return -math.inf
    m = a.max()
    if not np.isfinite(m):
        return float(m)
    return float(m + math.log(np.exp(a - m).sum()))


@lru_cache(maxsize=32)
def _ladder_data(ss: SampleSet, phi_index: int, ladder: tuple) -> _LadderData:
    return _LadderData(ss, ss.phis[phi_index], ladder)


def fit_slope(ss: SampleSet, phi_index: int, c: float, ladder: Sequence[float],
              margin: float = DEFAULT_MARGIN) -> SlopeFit:
    ladder = _check_ladder(ladder)
    if c < 0:
        raise ValueError("c must be non-negative")
    log_I, rel_se, log_inc = _ladder_data(ss, phi_index, ladder).evaluate(float(c))
    if not np.isfinite(log_I).all():
        raise ValueError("clipped integral vanished on the sample; integrand is identically 0")
    x = -np.log(np.array(ladder))
    slope, intercept, resid = _linfit(x, log_I)
    used = np.isfinite(log_inc)
    if used.sum() >= 2:
        growth, _, growth_resid = _linfit(x[1:][used], log_inc[used])
    else:
        # the clip never bites: the clipped integrand does not depend on eps
        growth, growth_resid = 0.0, 0.0
    with np.errstate(over="ignore"):
        se = tuple((np.exp(log_I) * rel_se).tolist())
    return SlopeFit(float(c), ladder, tuple(log_I.tolist()), se,
                    slope, intercept, resid, growth, growth_resid, margin, int(used.sum()))


def divergence_slope(f: Polynomial, phi: WeightFunction, c: float, ladder: Sequence[float] = DEFAULT_LADDER,
                     cfg: SampleConfig | None = None, margin: float = DEFAULT_MARGIN) -> SlopeFit:
    """Clip-ladder fit: slope of ``log I(eps)`` and growth rate of its increments."""
    if cfg is None:
        raise ValueError("a SampleConfig with an explicit seed is required")
    return fit_slope(sample_set(f, (phi,), cfg), 0, c, ladder, margin)


@dataclass(frozen=True)
class ThresholdEstimate:
    c_lo: float
    c_hi: float  # math.inf when no divergence was detected up to c_max
    fits: tuple  # SlopeFit per probed c, in probe order
    cfg: SampleConfig

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.c_hi)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.c_lo + self.c_hi)

    def contains(self, value: float) -> bool:
        return self.c_lo <= value <= self.c_hi

    def __str__(self):
        if not self.bounded:
            return f"no divergence detected up to c_max={self.c_lo:.6g}"
        return f"[{self.c_lo:.6g}, {self.c_hi:.6g}]"


def estimate_threshold(f: Polynomial, phi: WeightFunction, c_range: Sequence[float], tol: float,
                       cfg: SampleConfig, ladder: Sequence[float] = DEFAULT_LADDER,
                       margin: float = DEFAULT_MARGIN) -> ThresholdEstimate:
    """Bracket the threshold by bisection on the sign of the growth rate."""
    c_min, c_max = map(float, c_range)
    if not c_min < c_max:
        raise ValueError("need c_min < c_max")
    if tol <= 0:
        raise ValueError("tol must be positive")
    ss = sample_set(f, (phi,), cfg)
    fits = []

    def probe(c):
        fit = fit_slope(ss, 0, c, ladder, margin)
        fits.append(fit)
        return fit.above_threshold

    lo_div, hi_div = probe(c_min), probe(c_max)
    if lo_div:
        raise ThresholdDiagnosticError(
            f"divergence already at c_min={c_min:g}; threshold lies below the search range", fits)
    if not hi_div:
        return ThresholdEstimate(c_max, math.inf, tuple(fits), cfg)
    lo, hi = c_min, c_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            hi = mid
        else:
            lo = mid
    _check_monotone(fits)
    return ThresholdEstimate(lo, hi, tuple(fits), cfg)


def _check_monotone(fits):
    ordered = sorted(fits, key=lambda f: f.c)
    seen_div = False
    for fit in ordered:
        if fit.above_threshold:
            seen_div = True
        elif seen_div:
            raise ThresholdDiagnosticError(f"non-monotone verdicts around c={fit.c:g}", ordered)


def l1_distance(phi: WeightFunction, psi: WeightFunction, c: float, cfg: SampleConfig,
                eps_clip: float = DEFAULT_LADDER[-1]) -> IntegralEstimate:
    """Estimate of the L1 distance between the clipped ``exp(-2c phi)`` and ``exp(-2c psi)``."""
    _check_clip(eps_clip)
    if c < 0:
        raise ValueError("c must be non-negative")
    if phi.dim != psi.dim:
        raise ValueError("weights of different dimensions")
    ss = sample_set(Polynomial.constant(1, phi.dim), (phi, psi), cfg)
    le = math.log(eps_clip)
    a = -2 * c * np.maximum(ss.phis[0], le)
    b = -2 * c * np.maximum(ss.phis[1], le)
    hi = np.maximum(a, b)
    gap = -np.abs(a - b)
    with np.errstate(divide="ignore"):
        log_diff = np.where(gap == 0, -np.inf, hi + np.log(-np.expm1(gap)))
    return _estimate(ss.log_base + log_diff, cfg)


def weight_l1_distance(phi: WeightFunction, psi: WeightFunction, cfg: SampleConfig) -> IntegralEstimate:
    """Estimate of the L1 distance between the weights themselves on the polydisc."""
    if phi.dim != psi.dim:
        raise ValueError("weights of different dimensions")
    ss = sample_set(Polynomial.constant(1, phi.dim), (phi, psi), cfg)
    with np.errstate(invalid="ignore", divide="ignore"):
        gap = np.abs(ss.phis[0] - ss.phis[1])
        # both weights -inf at the same point: that point contributes nothing
        gap = np.where(np.isnan(gap), 0.0, gap)
        log_terms = np.where(np.isfinite(ss.log_base), ss.log_base + np.log(gap), -np.inf)
    return _estimate(log_terms, cfg)
