"""Hironaka division and standard bases in the truncated local ring.

Every operation takes a degree bound ``D`` and is exact modulo terms of degree
> D.  Because the order is degree-first and the initial term is the *minimal*
term, each reduction step strictly raises the working initial monomial, so
truncated division always terminates.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .ring import (
    DimensionError,
    GaussianRational,
    MonomialIdeal,
    Polynomial,
    cmp_monomials,
    divides,
    format_polynomial,
    initial_data,
    lcm_exp,
    minimal_generators,
    monomial_key,
)

DEFAULT_TRUNC = 16


class NotReducibleToShape(ValueError):
    """Candidates cannot be brought to the initial monomials of the reference."""


@dataclass(frozen=True)
class DivisionResult:
    quotients: list
    remainder: Polynomial
    trunc: int


@dataclass(frozen=True)
class StandardBasis:
    gens: list
    trunc: int
    im_ideal: MonomialIdeal

    @property
    def initial_monomials(self) -> list:
        return [initial_data(g)[1] for g in self.gens]

    @classmethod
    def from_generators(cls, gens: Sequence[Polynomial], trunc: int) -> "StandardBasis":
        """Wrap ``gens`` as-is (no completion); use ``is_standard_basis`` to check."""
        gens = list(gens)
        if not gens:
            raise ValueError("empty basis")
        return cls(gens, trunc, minimal_generators([initial_data(g)[1] for g in gens], gens[0].dim))

    def to_dict(self) -> dict:
        return {"trunc": self.trunc, "gens": [format_polynomial(g) for g in self.gens]}

    @classmethod
    def from_dict(cls, data: dict, n: int) -> "StandardBasis":
        from .parsing import parse_polynomial

        return cls.from_generators([parse_polynomial(s, n) for s in data["gens"]], int(data["trunc"]))


def _validate(gens: Sequence[Polynomial], D: int, dim: int | None = None):
    if D < 0:
        raise ValueError("truncation degree D must be >= 0")
    if not gens:
        raise ValueError("at least one generator is required")
    dim = gens[0].dim if dim is None else dim
    for g in gens:
        if g.dim != dim:
            raise DimensionError(f"dimension mismatch: {g.dim} vs {dim}")
        if g.truncate(D).is_zero():
            raise ValueError(f"generator {format_polynomial(g)} is zero modulo degree > {D}")


def _effective_trunc(D: int, polys) -> int:
    for p in polys:
        if p.trunc is not None:
            D = min(D, p.trunc)
    return D


def _reduce(work: dict, gens_data, D: int, quotients=None, full=True):
    """Reduce the term dict ``work`` in place; returns the remainder dict.

    ``gens_data`` is a list of ``(IM, IC^-1, terms)`` per divisor.  With
    ``full=False`` reduction stops at the first irreducible initial term.
    """
    heap = [(monomial_key(e), e) for e in work]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = work.get(e)
        if c is None:
            continue
        for i, (im, ic_inv, terms) in enumerate(gens_data):
            if divides(im, e):
                break
        else:
            rem[e] = work.pop(e)
            if not full:
                break
            continue
        q = c * ic_inv
        beta = tuple(a - b for a, b in zip(e, im))
        if quotients is not None:
            h = quotients[i]
            h[beta] = h[beta] + q if beta in h else q
            if not h[beta]:
                del h[beta]
        for ge, gc in terms:
            t = tuple(a + b for a, b in zip(ge, beta))
            if sum(t) > D:
                continue
            v = work.get(t)
            if v is None:
                work[t] = -q * gc
                heapq.heappush(heap, (monomial_key(t), t))
            else:
                v = v - q * gc
                if v:
                    work[t] = v
                else:
                    del work[t]
    return rem


def _gens_data(gens):
    data = []
    for g in gens:
        ic, im, _ = initial_data(g)
        data.append((im, ic.inverse(), g.terms))
    return data


def divide(f: Polynomial, gens: Sequence[Polynomial], D: int = DEFAULT_TRUNC) -> DivisionResult:
    """Hironaka division ``f = sum h_i g_i + s`` modulo degree > D.

    At each step the current minimal term is cancelled with the first divisor
    (lowest index) whose initial monomial divides it; otherwise it moves to the
    remainder.
    """
    _validate(gens, D, f.dim)
    D = _effective_trunc(D, [f, *gens])
    work = {e: c for e, c in f.as_dict().items() if sum(e) <= D}
    quotients = [dict() for _ in gens]
    rem = _reduce(work, _gens_data(gens), D, quotients)
    n = f.dim
    return DivisionResult(
        [Polynomial._raw(h, n, None) for h in quotients],
        Polynomial._raw(rem, n, D),
        D,
    )


def normal_form(f: Polynomial, basis: StandardBasis) -> Polynomial:
    """Remainder of ``f`` on division by the basis; zero iff ``f`` lies in the ideal mod deg > D."""
    return divide(f, basis.gens, basis.trunc).remainder


def _s_poly(g: Polynomial, h: Polynomial, D: int) -> Polynomial | None:
    cg, ag, _ = initial_data(g)
    ch, ah, _ = initial_data(h)
    L = lcm_exp(ag, ah)
    if sum(L) > D:
        return None
    left = g.mul_term(cg.inverse(), tuple(a - b for a, b in zip(L, ag)))
    right = h.mul_term(ch.inverse(), tuple(a - b for a, b in zip(L, ah)))
    return (left - right).truncate(D)


def _remainder(p: Polynomial, gens: list, D: int) -> dict:
    work = {e: c for e, c in p.as_dict().items() if sum(e) <= D}
    return _reduce(work, _gens_data(gens), D)


def _interreduce(gens: list, D: int) -> list:
    # keep one generator per minimal initial monomial, then clear tails
    by_im = {}
    for g in gens:
        im = initial_data(g)[1]
        if im not in by_im:
            by_im[im] = g
    ideal = minimal_generators(by_im, gens[0].dim)
    kept = [by_im[im] for im in ideal.gens]
    out = []
    for i, g in enumerate(kept):
        ic, im, _ = initial_data(g)
        others = kept[:i] + kept[i + 1:]
        tail = {e: c for e, c in g.as_dict().items() if e != im and sum(e) <= D}
        if others:
            tail = _reduce(tail, _gens_data(others), D)
        tail[im] = ic
        out.append(Polynomial._raw(tail, g.dim, D).monic())
    out.sort(key=lambda p: monomial_key(initial_data(p)[1]))
    return out


def standard_basis(gens: Sequence[Polynomial], D: int = DEFAULT_TRUNC) -> StandardBasis:
    """Standard basis of the ideal generated by ``gens``, modulo degree > D.

    S-pair completion; pairs whose lcm of initial monomials exceeds degree D
    vanish identically modulo the truncation and are skipped.  The result is
    interreduced, monic and sorted by increasing initial monomial.
    """
    _validate(gens, D)
    D = _effective_trunc(D, gens)
    basis = [g.truncate(D) for g in gens]
    pairs = list(combinations(range(len(basis)), 2))
    while pairs:
        i, j = pairs.pop(0)
        s = _s_poly(basis[i], basis[j], D)
        if s is None or s.is_zero():
            continue
        rem = _remainder(s, basis, D)
        if rem:
            new = Polynomial._raw(rem, s.dim, D).monic()
            basis.append(new)
            pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))
    reduced = _interreduce(basis, D)
    return StandardBasis(reduced, D, minimal_generators([initial_data(g)[1] for g in reduced], reduced[0].dim))


def is_standard_basis(basis: StandardBasis, reduced: bool = False) -> bool:
    """Check the structural invariants and that every S-pair reduces to 0 mod deg > D.

    With ``reduced=True`` also require that no non-initial term of a generator
    lies in the initial ideal of the others.
    """
    gens, D = basis.gens, basis.trunc
    if not gens or any(g.truncate(D).is_zero() for g in gens):
        return False
    ims = [initial_data(g)[1] for g in gens]
    if any(cmp_monomials(a, b) >= 0 for a, b in zip(ims, ims[1:])):
        return False
    if any(divides(a, b) for a, b in combinations(ims, 2)):
        return False
    if basis.im_ideal != minimal_generators(ims, gens[0].dim):
        return False
    for g, h in combinations(gens, 2):
        s = _s_poly(g, h, D)
        if s is not None and _remainder(s, gens, D):
            return False
    if reduced:
        for i, g in enumerate(gens):
            others = ims[:i] + ims[i + 1:]
            if any(divides(o, e) for e in support_tail(g, D) for o in others):
                return False
    return True


def support_tail(g: Polynomial, D: int):
    im = initial_data(g)[1]
    return [e for e in g.as_dict() if e != im and sum(e) <= D]


def interreduce_to_shape(candidates: Sequence[Polynomial], reference: StandardBasis,
                         D: int | None = None) -> list:
    """Rewrite ``F_l`` as ``F'_l = F_l - sum_{m<l} P_{l,m} F'_m`` with ``IM(F'_l) = IM(ref_l)``.

    Each elimination cancels the current initial term against an earlier
    ``F'_m`` whose initial monomial divides it, which strictly raises the
    working initial monomial.  Only finitely many monomials lie below
    ``IM(ref_l)``, so the loop is bounded.
    """
    D = reference.trunc if D is None else D
    if len(candidates) != len(reference.gens):
        raise ValueError("need exactly one candidate per reference generator")
    target = reference.initial_monomials
    done: list[Polynomial] = []
    for l, (F, goal) in enumerate(zip(candidates, target)):
        F = F.truncate(D)
        if F.is_zero():
            raise NotReducibleToShape(f"candidate {l + 1} is zero modulo degree > {D}")
        im = initial_data(F)[1]
        if im not in reference.im_ideal:
            raise NotReducibleToShape(
                f"initial monomial {im} of candidate {l + 1} is not in the reference initial ideal")
        if cmp_monomials(im, goal) > 0:
            raise NotReducibleToShape(f"candidate {l + 1} has IM {im} above the target {goal}")
        while cmp_monomials(im, goal) < 0:
            ic = initial_data(F)[0]
            for Fm in done:
                cm, am, _ = initial_data(Fm)
                if divides(am, im):
                    beta = tuple(a - b for a, b in zip(im, am))
                    F = (F - Fm.mul_term(ic / cm, beta)).truncate(D)
                    break
            else:
                raise NotReducibleToShape(
                    f"IM {im} of candidate {l + 1} is not divisible by an earlier initial monomial")
            if F.is_zero():
                raise NotReducibleToShape(f"candidate {l + 1} cancelled to zero modulo degree > {D}")
            im = initial_data(F)[1]
        if im != goal:
            raise NotReducibleToShape(f"candidate {l + 1} overshot the target {goal}: reached {im}")
        done.append(F)
    return done
