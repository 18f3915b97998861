"""Weighted log canonical thresholds of monomial weights, exactly.

For ``phi = 1/2 log sum_j |z^{a_j}|^2`` and ``f = z^beta`` the threshold is
the largest ``c`` with ``beta + 1`` in ``c`` times the Newton polyhedron of the
``a_j``, i.e. the value of the linear program

    max sum(mu)   s.t.   sum_j mu_j a_j <= beta + 1,  mu >= 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .lp import maximize
from .ring import MonomialIdeal, check_exponent, exponents_up_to, minimal_generators

INF = math.inf


@dataclass(frozen=True)
class MonomialWeight:
    """Exponent generators of a monomial weight, kept as a minimal antichain."""

    gens: tuple
    dim: int

    def __init__(self, gens: Sequence[Sequence[int]], dim: int | None = None):
        gens = [tuple(g) for g in gens]
        if not gens:
            raise ValueError("a monomial weight needs at least one generator")
        dim = len(gens[0]) if dim is None else dim
        ideal = minimal_generators([check_exponent(g, dim) for g in gens], dim)
        object.__setattr__(self, "gens", ideal.gens)
        object.__setattr__(self, "dim", dim)

    def describe(self) -> str:
        return ";".join("(" + ",".join(map(str, g)) + ")" for g in self.gens)


@dataclass(frozen=True)
class WeightedLctQuery:
    weight: MonomialWeight
    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", check_exponent(self.beta, self.weight.dim))


@dataclass(frozen=True)
class LctValue:
    value: Fraction | float  # Fraction, or math.inf
    optimal_mu: tuple | None
    dual: tuple | None = field(default=None, compare=False)

    @property
    def is_infinite(self) -> bool:
        return self.value == INF

    def __str__(self):
        return format_value(self.value)


def format_value(v) -> str:
    if v == INF:
        return "inf"
    return str(Fraction(v))


def verify_certificate(gens, beta, lct: LctValue) -> bool:
    """Re-check feasibility, objective and dual optimality in exact arithmetic."""
    if lct.is_infinite:
        return lct.optimal_mu is None
    mu = lct.optimal_mu
    rhs = [b + 1 for b in beta]
    if any(m < 0 for m in mu) or sum(mu) != lct.value:
        return False
    for i, r in enumerate(rhs):
        if sum(m * Fraction(g[i]) for m, g in zip(mu, gens)) > r:
            return False
    if lct.dual is not None:
        w = lct.dual
        if any(x < 0 for x in w):
            return False
        if any(sum(wi * Fraction(gi) for wi, gi in zip(w, g)) < 1 for g in gens):
            return False
        if sum(wi * r for wi, r in zip(w, rhs)) != lct.value:
            return False
    return True


@lru_cache(maxsize=65536)
def _solve(gens: tuple, beta: tuple) -> LctValue:
    n = len(beta)
    A = [[Fraction(g[i]) for g in gens] for i in range(n)]
    res = maximize([1] * len(gens), A, [b + 1 for b in beta])
    if res.status == "unbounded":
        return LctValue(INF, None, None)
    return LctValue(res.value, res.x, res.y)


def lct_of_generators(gens: Sequence[Sequence], beta: Sequence[int]) -> LctValue:
    """LP threshold for an arbitrary (possibly rational) generator matrix."""
    gens = tuple(tuple(Fraction(x) for x in g) for g in gens)
    if not gens:
        raise ValueError("a monomial weight needs at least one generator")
    beta = tuple(beta)
    if any(len(g) != len(beta) for g in gens):
        raise ValueError(f"dimension mismatch between generators and beta {beta}")
    return _solve(gens, beta)


def newton_lct(query: WeightedLctQuery) -> LctValue:
    return lct_of_generators(query.weight.gens, query.beta)


def lct(weight: MonomialWeight | Sequence[Sequence[int]], beta: Sequence[int] | None = None) -> LctValue:
    """Convenience wrapper: ``lct([(2,0),(0,3)])`` or ``lct(weight, beta)``."""
    if not isinstance(weight, MonomialWeight):
        weight = MonomialWeight(weight)
    if beta is None:
        beta = (0,) * weight.dim
    return newton_lct(WeightedLctQuery(weight, tuple(beta)))


def multiplier_ideal_monomials(weight: MonomialWeight, c, D: int) -> MonomialIdeal:
    """Monomials ``z^beta`` (``|beta| <= D``) with threshold strictly above ``c``."""
    c = Fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    members = []
    for beta in exponents_up_to(weight.dim, D):
        # membership is closed upward, so skip anything already generated
        if any(all(g <= b for g, b in zip(m, beta)) for m in members):
            continue
        if lct(weight, beta).value > c:
            members.append(beta)
    return minimal_generators(members, weight.dim)


def openness_witness(weight: MonomialWeight, beta: Sequence[int], c) -> Fraction | None:
    """Exact ``eps > 0`` with ``lct > (1 + eps) c``, or None if ``z^beta`` is not a member."""
    c = Fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    value = lct(weight, beta).value
    if value == INF:
        return Fraction(1)
    if value <= c:
        return None
    return (value / c - 1) / 2


@dataclass(frozen=True)
class ScaledLct:
    scale: Fraction
    value: Fraction | float
    original: Fraction | float
    lct: LctValue

    @property
    def consistent(self) -> bool:
        if self.original == INF:
            return self.value == INF
        return self.value == self.original / self.scale


def lct_scaling(weight: MonomialWeight, t, beta: Sequence[int]) -> ScaledLct:
    """Threshold of the weight with generators ``t * a_j``, solved directly.

    The original threshold is returned alongside so callers can check the
    scaling law ``lct(t a) = lct(a) / t``.
    """
    t = Fraction(t)
    if t <= 0:
        raise ValueError("scale t must be positive")
    scaled = lct_of_generators([[t * x for x in g] for g in weight.gens], beta)
    base = lct(weight, beta)
    return ScaledLct(t, scaled.value, base.value, scaled)
