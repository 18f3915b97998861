from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from lctbench.ring import GaussianRational, Polynomial, exponents_up_to

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussianRational, small_q, small_q)


def exponents(n, max_deg):
    return st.lists(st.integers(0, max_deg), min_size=n, max_size=n).filter(
        lambda e: sum(e) <= max_deg).map(tuple)


@st.composite
def polynomials(draw, n=None, max_deg=4, max_terms=5, nonzero=False):
    n = draw(st.integers(1, 3)) if n is None else n
    terms = draw(st.dictionaries(exponents(n, max_deg), gauss, min_size=1 if nonzero else 0, max_size=max_terms))
    p = Polynomial(terms, n)
    if nonzero and p.is_zero():
        p = Polynomial.monomial(next(iter(terms)) if terms else (0,) * n)
    return p


def random_poly(rng: random.Random, n: int, max_deg: int, max_terms: int = 4, nonzero=True,
                min_deg: int = 0) -> Polynomial:
    exps = [e for e in exponents_up_to(n, max_deg) if sum(e) >= min_deg]
    while True:
        k = rng.randint(1, max_terms)
        terms = {}
        for _ in range(k):
            e = rng.choice(exps)
            terms[e] = GaussianRational(Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                                        Fraction(rng.choice([0, 0, rng.randint(-2, 2)])))
        p = Polynomial(terms, n)
        if not nonzero or not p.is_zero():
            return p


@pytest.fixture
def rng():
    return random.Random(20240611)


# -- acceptance report ---------------------------------------------------------

def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture
def acceptance_log(request):
    """Record the one-line PASS/FAIL summary for an acceptance criterion."""
    def record(number: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        request.config._acceptance_lines[number] = line
        return line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
