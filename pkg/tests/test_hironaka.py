from __future__ import annotations

import random
import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_poly
from hironaka_suite import run_suite
from lctbench.hironaka import (
    NotReducibleToShape,
    StandardBasis,
    divide,
    interreduce_to_shape,
    is_standard_basis,
    normal_form,
    standard_basis,
)
from lctbench.parsing import parse_polynomial
from lctbench.ring import DimensionError, Polynomial, format_polynomial, initial_data


def P(text, n=2):
    return parse_polynomial(text, n)


# -- division ---------------------------------------------------------------

def test_divide_single_step():
    res = divide(P("z2"), [P("z2 - z1^2")], 10)
    assert res.quotients == [P("1")]
    assert res.remainder == P("z1^2")


def test_divide_self():
    g = P("z1^2 + 3*z1*z2 - i*z2^3")
    res = divide(g, [g], 7)
    assert res.quotients == [P("1")] and res.remainder.is_zero()


def test_divide_geometric_series():
    res = divide(P("z2"), [P("z2 - z2^2")], 3)
    assert res.quotients == [P("1 + z2 + z2^2")]
    assert res.remainder.is_zero()
    assert res.trunc == 3


def test_divide_tie_break_prefers_lowest_index():
    res = divide(P("z1"), [P("z1"), P("z1 + z2^2")], 5)
    assert res.quotients == [P("1"), P("0")]


def test_divide_errors():
    with pytest.raises(ValueError):
        divide(P("z1"), [P("z1")], -1)
    with pytest.raises(ValueError):
        divide(P("z1"), [Polynomial.zero(2)], 4)
    with pytest.raises(ValueError):
        divide(P("z1"), [], 4)
    with pytest.raises(DimensionError):
        divide(P("z1"), [P("z1", 3)], 4)
    with pytest.raises(ValueError, match="zero modulo"):
        divide(P("z1"), [P("z1^5")], 3)


# -- standard bases ---------------------------------------------------------

def test_stdbasis_examples():
    b = standard_basis([P("z1^2"), P("z1*z2")], 8)
    assert b.gens == [P("z1*z2"), P("z1^2")]
    b = standard_basis([P("z1 - z2"), P("z1 + z2")], 4)
    assert b.gens == [P("z2"), P("z1")]
    b = standard_basis([P("z2 - z1^2")], 6)
    assert b.gens == [P("z2 - z1^2")] and b.initial_monomials == [(0, 1)]


def test_stdbasis_completion_adds_element():
    b = standard_basis([P("z1^2 - z2^3"), P("z1*z2")], 8)
    assert [format_polynomial(g) for g in b.gens] == ["z1*z2", "z1^2 - z2^3", "z2^4"]
    assert is_standard_basis(b, reduced=True)


def test_stdbasis_errors():
    with pytest.raises(ValueError):
        standard_basis([], 4)
    with pytest.raises(ValueError):
        standard_basis([P("z1"), Polynomial.zero(2)], 4)


def test_is_standard_basis_examples():
    raw = StandardBasis.from_generators([P("z1 + z1*z2"), P("z2")], 6)
    assert not is_standard_basis(raw)
    done = standard_basis(raw.gens, 6)
    assert is_standard_basis(done)
    assert done.gens == [P("z2"), P("z1")]
    assert is_standard_basis(StandardBasis.from_generators([P("z1^3 + z2")], 6))


def test_is_standard_basis_detects_missing_spoly():
    # z1*z2 and z1^2 - z2^3 need z2^4 as well
    raw = StandardBasis.from_generators([P("z1*z2"), P("z1^2 - z2^3")], 8)
    assert not is_standard_basis(raw)


def test_normal_form_examples():
    b = standard_basis([P("z1^2 - z2^3"), P("z1*z2")], 8)
    g1, g2 = b.gens[0], b.gens[1]
    assert normal_form(P("z1") * g1 + g2, b).is_zero()
    assert normal_form(P("1"), standard_basis([P("z1"), P("z2")], 4)) == P("1")


def test_normal_form_idempotent(rng):
    for _ in range(30):
        n = rng.randint(1, 3)
        b = standard_basis([random_poly(rng, n, 3, 3, min_deg=1) for _ in range(2)], 8)
        f = random_poly(rng, n, 5, 6)
        r = normal_form(f, b)
        assert normal_form(r, b) == r


def test_serialization_roundtrip():
    b = standard_basis([P("z1^2 - z2^3"), P("(1/2+i)*z1*z2")], 8)
    again = StandardBasis.from_dict(b.to_dict(), 2)
    assert again.gens == b.gens and again.trunc == b.trunc and again.im_ideal == b.im_ideal


def test_deterministic_output():
    gens = [P("z1^2 - z2^3 + z1*z2^2"), P("z1*z2 - z2^4"), P("z2^2 + z1^3")]
    outs = {tuple(format_polynomial(g) for g in standard_basis(gens, 10).gens) for _ in range(3)}
    assert len(outs) == 1


# -- interreduction to a reference shape ------------------------------------

def test_interreduce_unchanged_when_shape_matches():
    ref = standard_basis([P("z2"), P("z1^2")], 6)
    cands = [P("z2 + z1^3"), P("z1^2 + z1^4")]
    assert interreduce_to_shape(cands, ref) == cands


def test_interreduce_case_two():
    ref = standard_basis([P("z2"), P("z1^2")], 6)
    out = interreduce_to_shape([P("z2"), P("z1^2 + z2")], ref)
    assert out == [P("z2"), P("z1^2")]
    assert [initial_data(g)[1] for g in out] == ref.initial_monomials


def test_interreduce_rejects_outside_ideal():
    ref = standard_basis([P("z2^2"), P("z1^2")], 6)
    with pytest.raises(NotReducibleToShape):
        interreduce_to_shape([P("z1"), P("z1^2")], ref)


def test_interreduce_rejects_above_target():
    ref = standard_basis([P("z2"), P("z1^2")], 6)
    with pytest.raises(NotReducibleToShape):
        interreduce_to_shape([P("z2^2"), P("z1^2")], ref)


REFS = [["z1^2 - z2^3", "z1*z2"], ["z1 - z2", "z1 + z2"], ["z1^2", "z1*z2", "z2^3"], ["z2 + z1^2", "z1^3"]]


@given(st.integers(0, 10 ** 6), st.sampled_from(REFS))
def test_interreduce_recovers_shape_from_mixed_candidates(seed, ref_gens):
    # F_l = ref_l + constant combinations of earlier reference elements, which
    # pushes the initial monomial below the target without cancelling ref_l
    r = random.Random(seed)
    ref = standard_basis([P(g) for g in ref_gens], 8)
    cands = []
    for l, g in enumerate(ref.gens):
        extra = Polynomial.zero(2)
        for m in range(l):
            extra = extra + P(str(r.randint(-3, 3))) * ref.gens[m]
        cands.append(g + extra)
    out = interreduce_to_shape(cands, ref)
    assert [initial_data(g)[1] for g in out] == ref.initial_monomials


# -- randomised property suite ----------------------------------------------

def test_property_suite_200_instances():
    t = time.perf_counter()
    failures = run_suite(200)
    assert failures == {}
    assert time.perf_counter() - t < 30
