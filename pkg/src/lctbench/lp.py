"""Exact rational simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

Bland's rule (smallest index enters, ties on the ratio test broken by the
smallest basic index) guarantees termination.  Since ``b >= 0`` the slack
basis is feasible and no phase one is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" or "unbounded"
    value: Fraction | None
    x: tuple | None
    y: tuple | None  # dual optimum, a certificate of optimality
    pivots: int


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence, max_pivots: int = 10_000) -> LPResult:
    m, k = len(A), len(c)
    if any(len(row) != k for row in A):
        raise ValueError("constraint rows must match the objective length")
    if len(b) != m:
        raise ValueError("right-hand side length must match the number of rows")
    b = [Fraction(v) for v in b]
    if any(v < 0 for v in b):
        raise ValueError("right-hand side must be non-negative")
    # columns 0..k-1 structural, k..k+m-1 slacks
    T = [[Fraction(v) for v in row] + [Fraction(int(i == r)) for i in range(m)] for r, row in enumerate(A)]
    rhs = list(b)
    cost = [Fraction(v) for v in c] + [Fraction(0)] * m  # reduced costs
    obj = Fraction(0)
    basis = list(range(k, k + m))
    pivots = 0
    while True:
        entering = next((j for j, cj in enumerate(cost) if cj > 0), None)
        if entering is None:
            break
        best = None
        for r in range(m):
            a = T[r][entering]
            if a > 0:
                key = (rhs[r] / a, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            return LPResult("unbounded", None, None, None, pivots)
        r = best[1]
        piv = T[r][entering]
        T[r] = [v / piv for v in T[r]]
        rhs[r] /= piv
        for s in range(m):
            if s != r and T[s][entering]:
                f = T[s][entering]
                T[s] = [v - f * w for v, w in zip(T[s], T[r])]
                rhs[s] -= f * rhs[r]
        f = cost[entering]
        cost = [v - f * w for v, w in zip(cost, T[r])]
        obj += f * rhs[r]
        basis[r] = entering
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex exceeded the pivot limit")
    x = [Fraction(0)] * k
    for r, j in enumerate(basis):
        if j < k:
            x[j] = rhs[r]
    y = tuple(-cost[k + i] for i in range(m))
    return LPResult("optimal", obj, tuple(x), y, pivots)
