from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from lctbench.lp import maximize
from lctbench.newton import (
    INF,
    MonomialWeight,
    WeightedLctQuery,
    lct,
    lct_of_generators,
    lct_scaling,
    multiplier_ideal_monomials,
    newton_lct,
    openness_witness,
    verify_certificate,
)
from lctbench.ring import MonomialIdeal, exponents_up_to


def weights(n_max=3, k_max=4, entry_max=5):
    return st.integers(1, n_max).flatmap(lambda n: st.tuples(
        st.lists(st.lists(st.integers(0, entry_max), min_size=n, max_size=n).map(tuple), min_size=1, max_size=k_max),
        st.lists(st.integers(0, 3), min_size=n, max_size=n).map(tuple)))


# -- simplex ----------------------------------------------------------------

def test_simplex_small():
    res = maximize([3, 2], [[1, 1], [1, 0]], [4, 3])
    assert res.status == "optimal" and res.value == 11 and res.x == (3, 1)
    assert sum(y * b for y, b in zip(res.y, [4, 3])) == res.value


def test_simplex_unbounded_and_errors():
    assert maximize([1, 1], [[1, 0]], [1]).status == "unbounded"
    with pytest.raises(ValueError):
        maximize([1], [[1]], [-1])
    with pytest.raises(ValueError):
        maximize([1, 1], [[1]], [1])


def test_simplex_degenerate_cycling_example():
    # a classic cycling instance under the largest-coefficient rule
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    A = [[Fraction(1, 4), -60, Fraction(-1, 25), 9], [Fraction(1, 2), -90, Fraction(-1, 50), 3], [0, 0, 1, 0]]
    res = maximize(c, A, [0, 0, 1])
    assert res.status == "optimal" and res.value == Fraction(1, 20)


# -- exact values -----------------------------------------------------------

def test_reference_values():
    assert lct([(1, 0)], (1, 0)).value == 2
    assert lct([(2, 0), (0, 3)]).value == Fraction(5, 6)
    assert lct([(1, 1)]).value == 1
    assert lct([(1, 0)]).value == 1
    assert lct([(3,)], (1,)).value == Fraction(2, 3)
    assert newton_lct(WeightedLctQuery(MonomialWeight([(1, 0)]), (1, 0))).value == 2


def test_criterion_runtime():
    t = time.perf_counter()
    assert lct([(1, 0)], (1, 0)).value == 2
    assert time.perf_counter() - t < 1.0


def test_cusp_certificate():
    v = lct([(2, 0), (0, 3)])
    assert v.optimal_mu == (Fraction(1, 2), Fraction(1, 3))
    assert v.dual == (Fraction(1, 2), Fraction(1, 3))
    assert verify_certificate([(2, 0), (0, 3)], (0, 0), v)


def test_infinite_threshold():
    assert lct([(0, 0)]).is_infinite
    assert lct([(0, 1)], (0, 0)).value == 1
    # the weight only involves z2; its threshold with f = z1^5 is still finite
    assert lct([(0, 2)], (5, 0)).value == Fraction(1, 2)
    v = lct_of_generators([(0, 0)], (3, 1))
    assert v.value == INF and verify_certificate([(0, 0)], (3, 1), v)


def test_weight_validation():
    with pytest.raises(ValueError):
        MonomialWeight([])
    with pytest.raises(ValueError):
        lct([(1, 0)], (1, 0, 0))
    assert MonomialWeight([(1, 0), (2, 0), (1, 1)]).gens == ((1, 0),)


@pytest.mark.parametrize("a,b", [(a, b) for a in range(1, 21) for b in range(1, 21)])
def test_one_variable_closed_form(a, b):
    assert lct([(a,)], (b,)).value == Fraction(b + 1, a)


@given(weights())
def test_against_scipy(data):
    gens, beta = data
    v = lct(gens, beta)
    A = np.array(gens, dtype=float).T
    res = linprog(-np.ones(len(gens)), A_ub=A, b_ub=np.array(beta) + 1.0, bounds=[(0, None)] * len(gens))
    if v.is_infinite:
        assert res.status == 3
    else:
        assert res.status == 0
        assert abs(-res.fun - float(v.value)) < 1e-7
        assert verify_certificate(MonomialWeight(gens).gens, beta, v)


def _facet_bound(gens, rhs):
    """min over candidate normals w >= 0 of <w, rhs> / min_j <w, a_j> in two variables."""
    cands = [(1, 0), (0, 1)]
    for a, b in itertools.combinations(gens, 2):
        d = (a[0] - b[0], a[1] - b[1])
        w = (abs(d[1]), abs(d[0]))
        if d[0] * d[1] < 0 and w != (0, 0):
            cands.append(w)
    best = INF
    for w in cands:
        m = min(w[0] * a[0] + w[1] * a[1] for a in gens)
        if m > 0:
            best = min(best, Fraction(w[0] * rhs[0] + w[1] * rhs[1], m))
    return best


@given(weights(n_max=2, k_max=4).filter(lambda d: len(d[1]) == 2))
def test_two_dimensional_facet_duality(data):
    gens, beta = data
    v = lct(gens, beta)
    bound = _facet_bound(gens, [b + 1 for b in beta])
    assert v.value == bound


@given(weights(), st.lists(st.integers(0, 6), min_size=3, max_size=3))
def test_weak_duality(data, w):
    gens, beta = data
    w = w[:len(beta)]
    v = lct(gens, beta)
    m = min(sum(x * y for x, y in zip(w, a)) for a in gens)
    if m > 0:
        assert v.value <= Fraction(sum(x * (b + 1) for x, b in zip(w, beta)), m)


@given(weights(), st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_monotone_in_beta(data, bump):
    gens, beta = data
    bigger = tuple(b + d for b, d in zip(beta, bump))
    assert lct(gens, beta).value <= lct(gens, bigger).value


@given(weights(), st.lists(st.integers(0, 5), min_size=3, max_size=3))
def test_monotone_in_generators(data, extra):
    gens, beta = data
    extra = tuple(extra[:len(beta)])
    assert lct(gens + [extra], beta).value >= lct(gens, beta).value


@given(weights(), st.fractions(min_value=Fraction(1, 10), max_value=5, max_denominator=12))
def test_scaling_law(data, t):
    gens, beta = data
    if t <= 0:
        return
    sc = lct_scaling(MonomialWeight(gens), t, beta)
    assert sc.consistent


def test_scaling_examples():
    assert lct_scaling(MonomialWeight([(1, 0)]), 2, (1, 0)).value == 1
    assert lct_scaling(MonomialWeight([(1, 0)]), 1, (1, 0)).value == 2
    assert lct_scaling(MonomialWeight([(2, 0), (0, 3)]), Fraction(3, 2), (0, 0)).value == Fraction(5, 9)
    with pytest.raises(ValueError):
        lct_scaling(MonomialWeight([(1, 0)]), 0, (0, 0))


# -- multiplier ideals and openness ----------------------------------------

def test_multiplier_ideal_examples():
    assert multiplier_ideal_monomials(MonomialWeight([(1, 0)]), 1, 4) == MonomialIdeal([(1, 0)], 2)
    w = MonomialWeight([(2, 0), (0, 3)])
    assert multiplier_ideal_monomials(w, Fraction(1, 2), 4).is_unit()
    # lct of z^beta against z1*z2 is min(beta1, beta2) + 1, so > 1 needs both entries >= 1
    assert multiplier_ideal_monomials(MonomialWeight([(1, 1)]), 1, 3) == MonomialIdeal([(1, 1)], 2)


def test_multiplier_ideal_matches_definition():
    w = MonomialWeight([(3, 0), (1, 2), (0, 4)])
    for c in (Fraction(1, 2), Fraction(5, 6), Fraction(3, 2), Fraction(2)):
        ideal = multiplier_ideal_monomials(w, c, 6)
        for beta in exponents_up_to(2, 6):
            assert (beta in ideal) == (lct(w, beta).value > c)


def test_multiplier_ideal_monotone_in_c():
    w = MonomialWeight([(2, 1), (0, 3)])
    cs = [Fraction(k, 4) for k in range(1, 12)]
    ideals = [multiplier_ideal_monomials(w, c, 6) for c in cs]
    for small, big in zip(ideals, ideals[1:]):
        assert all(g in small for g in big.gens)


def test_witness_examples():
    assert openness_witness(MonomialWeight([(1, 0)]), (1, 0), 1) == Fraction(1, 2)
    assert openness_witness(MonomialWeight([(1, 0)]), (0, 0), 1) is None
    assert openness_witness(MonomialWeight([(1, 0)]), (0, 0), 2) is None
    assert openness_witness(MonomialWeight([(0, 0)]), (0, 0), 5) == 1


def random_witness_cases(count=100, seed=11):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, 3)
        gens = [tuple(rng.randint(0, 4) for _ in range(n)) for _ in range(rng.randint(1, 4))]
        beta = tuple(rng.randint(0, 3) for _ in range(n))
        w = MonomialWeight(gens)
        v = lct(w, beta).value
        if v == INF:
            continue
        c = v * Fraction(rng.randint(1, 99), 100)
        out.append((w, beta, c, v))
    return out


def test_openness_witness_random():
    for w, beta, c, v in random_witness_cases():
        eps = openness_witness(w, beta, c)
        assert eps is not None and eps > 0
        assert v > (1 + eps) * c
        assert openness_witness(w, beta, v) is None
