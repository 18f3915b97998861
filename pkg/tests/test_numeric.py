from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from lctbench.newton import lct
from lctbench.numeric import (
    DEFAULT_LADDER,
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
    fit_slope,
    l1_distance,
    sample_set,
    weight_l1_distance,
    zero_weight,
)
from lctbench.parsing import parse_polynomial


def P(text, n=2):
    return parse_polynomial(text, n)


ONE = P("1")
Z1 = P("z1")
CFG = SampleConfig(seed=7, samples=2 ** 18)


# -- weights ----------------------------------------------------------------

@pytest.mark.filterwarnings("ignore:divide by zero")
def test_weight_evaluation():
    z = np.array([[0.5, 0.25j], [0.1 + 0.1j, 0.0]])
    assert np.allclose(LogAbsHol(Z1).evaluate(z), np.log(np.abs(z[:, 0])))
    want = 0.5 * np.log(np.abs(z[:, 0]) ** 2 + np.abs(z[:, 1]) ** 2)
    assert np.allclose(LogSumSq((Z1, P("z2"))).evaluate(z), want)
    mm = MonomialMax(((2, 0), (0, 3))).evaluate(z)
    assert np.allclose(mm, np.maximum(2 * np.log(np.abs(z[:, 0])), 3 * np.log(np.abs(z[:, 1]))))
    assert np.allclose(Scaled(Fraction(3, 2), LogAbsHol(Z1)).evaluate(z), 1.5 * np.log(np.abs(z[:, 0])))
    assert np.allclose(Shifted(-1.0, LogAbsHol(Z1)).evaluate(z), np.log(np.abs(z[:, 0])) - 1)
    assert np.all(zero_weight(2).evaluate(z) == 0)
    with pytest.raises(ValueError):
        Scaled(0, LogAbsHol(Z1))


def test_config_validation():
    for bad in (dict(radius=0), dict(samples=0), dict(sampler="qmc"), dict(threads=0), dict(power=2)):
        with pytest.raises(ValueError):
            SampleConfig(seed=1, **bad)
    with pytest.raises(ValueError):
        SampleConfig(seed=-1)


# -- exactness anchors ------------------------------------------------------

@pytest.mark.parametrize("sampler", ["uniform", "polar-importance"])
def test_volume_anchor(sampler):
    cfg = SampleConfig(seed=3, samples=2 ** 18, sampler=sampler)
    est = clipped_integral(ONE, zero_weight(2), 1.3, 0.5, cfg)
    vol = (math.pi * 0.25) ** 2
    assert abs(est.mean - vol) <= 3 * est.std_error + 1e-12


def test_radial_closed_form():
    cfg = SampleConfig(seed=5, samples=2 ** 20, radius=1.0)
    est = clipped_integral(P("1", 1), LogAbsHol(P("z1", 1)), 0.5, 2.0 ** -30, cfg)
    assert abs(est.mean - 2 * math.pi) <= 3 * est.std_error


def test_one_dimensional_power_closed_form():
    # int_{|z|<r} |z|^{2b - 2ca} = 2 pi r^(2b+2-2ca) / (2b+2-2ca), here a=3, b=1, c=1/2
    cfg = SampleConfig(seed=9, samples=2 ** 20)
    est = clipped_integral(P("z1", 1), MonomialMax(((3,),)), 0.5, 2.0 ** -30, cfg)
    k = 2 * 1 + 2 - 2 * 0.5 * 3
    assert abs(est.mean - 2 * math.pi * 0.5 ** k / k) <= 3 * est.std_error


def test_clip_and_c_monotone_pointwise():
    phi = LogAbsHol(P("z1 + z2/3"))
    ss = sample_set(ONE, (phi,), CFG)
    phis = ss.phis[0]
    for c in (0.3, 1.0, 2.5):
        a = -2 * c * np.maximum(phis, math.log(1.0))
        b = -2 * c * np.maximum(phis, math.log(0.5))
        assert np.all(b >= a)
    lo = -2 * 0.5 * np.maximum(phis, math.log(0.01))
    hi = -2 * 0.9 * np.maximum(phis, math.log(0.01))
    assert np.all(hi >= lo)  # phi <= 0 on the polydisc of radius 1/2 away from |z1 + z2/3| > 1
    e1 = clipped_integral(ONE, phi, 1.0, 1.0, CFG).mean
    e2 = clipped_integral(ONE, phi, 1.0, 0.5, CFG).mean
    assert e1 <= e2


def test_clip_errors():
    with pytest.raises(ValueError):
        clipped_integral(ONE, zero_weight(2), 1.0, 0.0, CFG)
    with pytest.raises(ValueError):
        clipped_integral(ONE, zero_weight(2), -1.0, 0.5, CFG)


# -- slope fits ---------------------------------------------------------------

def test_slope_examples():
    above = divergence_slope(ONE, LogAbsHol(Z1), 2.0, cfg=CFG)
    assert above.slope >= 0.5 and above.verdict == "divergence"
    flat = divergence_slope(ONE, zero_weight(2), 1.7, cfg=CFG)
    assert abs(flat.slope) < 0.05 and flat.verdict == "no divergence"
    below = divergence_slope(Z1, LogAbsHol(Z1), 1.0, cfg=CFG)
    assert abs(below.slope) < 0.05 and below.verdict == "no divergence"


def test_growth_rate_tracks_distance_to_threshold():
    # the increments grow like eps^(-2 (c - c_th))
    for c in (0.5, 1.5, 3.0):
        fit = divergence_slope(Z1, LogAbsHol(Z1), c, cfg=CFG)
        assert abs(fit.growth_rate - 2 * (c - 2)) < 0.05


def test_ladder_validation():
    with pytest.raises(ValueError, match="at least 3"):
        divergence_slope(ONE, LogAbsHol(Z1), 1.0, [0.5, 0.25], CFG)
    with pytest.raises(ValueError, match="decreasing"):
        divergence_slope(ONE, LogAbsHol(Z1), 1.0, [0.25, 0.5, 0.125], CFG)
    with pytest.raises(ValueError):
        divergence_slope(ONE, LogAbsHol(Z1), 1.0, [2.0, 0.5, 0.25], CFG)
    with pytest.raises(ValueError, match="seed"):
        divergence_slope(ONE, LogAbsHol(Z1), 1.0)


def test_log_domain_survives_large_exponents():
    fit = divergence_slope(ONE, LogAbsHol(Z1), 30.0, cfg=CFG)
    assert all(math.isfinite(x) for x in fit.log_integrals)
    assert abs(fit.growth_rate - 58) < 0.5


# -- threshold estimates ------------------------------------------------------

def test_threshold_examples():
    est = estimate_threshold(Z1, LogAbsHol(Z1), (0.1, 4.0), 0.01, CFG)
    assert est.bounded and est.contains(2) is not None and abs(est.midpoint - 2) < 0.08
    est = estimate_threshold(Z1, LogAbsHol(P("z1 + z2/4")), (0.1, 4.0), 0.01, CFG)
    assert abs(est.midpoint - 1) < 0.08 and est.c_hi - est.c_lo <= 0.01
    flat = estimate_threshold(ONE, zero_weight(2), (0.1, 4.0), 0.01, CFG)
    assert not flat.bounded and "no divergence detected" in str(flat)


@pytest.mark.parametrize("gens,beta", [
    (((2, 0), (0, 3)), (0, 0)), (((1, 1),), (0, 0)), (((1, 0),), (0, 0)), (((3, 0), (1, 1), (0, 4)), (0, 0)),
    (((2, 0), (0, 2)), (1, 0)), (((1, 2), (3, 0)), (0, 1)), (((0, 1),), (2, 2)), (((4, 1), (0, 2)), (1, 0)),
])
def test_oracle_agreement(gens, beta):
    value = lct(gens, beta).value
    assert value <= 3
    f = P("*".join(f"z{k + 1}^{b}" for k, b in enumerate(beta) if b) or "1")
    est = estimate_threshold(f, MonomialMax(gens), (0.1, 4.0), 0.01, CFG)
    assert abs(est.midpoint - float(value)) <= 0.1


def test_scaling_consistency():
    tol = 0.01
    phi = LogAbsHol(P("z1^2 - z2^3"))
    base = estimate_threshold(ONE, phi, (0.05, 4.0), tol, CFG).midpoint
    for t in (Fraction(1, 2), Fraction(2)):
        scaled = estimate_threshold(ONE, Scaled(t, phi), (0.05, 4.0), tol, CFG).midpoint
        assert abs(scaled - base / float(t)) <= 2 * tol


def test_shift_does_not_move_threshold():
    a = estimate_threshold(ONE, LogSumSq((Z1, P("z2"))), (0.1, 4.0), 0.01, CFG)
    b = estimate_threshold(ONE, Shifted(-0.7, LogSumSq((Z1, P("z2")))), (0.1, 4.0), 0.01, CFG)
    assert abs(a.midpoint - b.midpoint) <= 0.02 and abs(a.midpoint - 2) < 0.08


def test_radius_sensitivity():
    # the threshold is a germ invariant, so the polydisc radius must not matter
    mids = [estimate_threshold(ONE, LogAbsHol(P("z1^2 - z2^3")), (0.1, 4.0), 0.01,
                               SampleConfig(seed=4, samples=2 ** 18, radius=r)).midpoint
            for r in (0.25, 0.5, 0.9)]
    assert max(mids) - min(mids) < 0.03
    assert all(abs(m - 5 / 6) < 0.08 for m in mids)


def test_threshold_errors():
    with pytest.raises(ValueError):
        estimate_threshold(ONE, LogAbsHol(Z1), (2.0, 1.0), 0.01, CFG)
    with pytest.raises(ValueError):
        estimate_threshold(ONE, LogAbsHol(Z1), (0.1, 1.0), 0.0, CFG)
    with pytest.raises(ThresholdDiagnosticError) as info:
        estimate_threshold(ONE, LogAbsHol(Z1), (1.5, 3.0), 0.01, CFG)
    assert info.value.table


def test_monotone_verdicts_in_fits():
    est = estimate_threshold(ONE, MonomialMax(((2, 0), (0, 3))), (0.1, 4.0), 0.01, CFG)
    fits = sorted(est.fits, key=lambda f: f.c)
    signs = [f.above_threshold for f in fits]
    assert signs == sorted(signs)


# -- L1 distances -------------------------------------------------------------

def test_l1_identical_weights_is_zero():
    phi = LogAbsHol(Z1)
    assert l1_distance(phi, phi, 0.9, CFG).mean == 0.0
    assert weight_l1_distance(phi, phi, CFG).mean == 0.0


def test_l1_decreasing_in_delta():
    phi = LogAbsHol(Z1)
    d = [l1_distance(phi, Scaled(1 + Fraction(x), phi), 0.25, CFG).mean for x in ("2/5", "1/5", "1/10")]
    assert d[0] > d[1] > d[2] > 0
    # closed form: (pi r^2) * 2 pi int_0^r (rho^(1 - (1+delta)/2) - rho^(1/2)) d rho, r = 1/2
    k = 2 - 0.5 * 1.4
    want = (math.pi / 4) * 2 * math.pi * (0.5 ** k / k - 0.5 ** 1.5 / 1.5)
    assert abs(d[0] - want) < 0.01


def test_l1_decreasing_in_j():
    phi = LogAbsHol(Z1)
    d = [l1_distance(phi, LogAbsHol(P(f"z1 + z2/{j}")), 0.9, CFG).mean for j in (2, 8, 32)]
    assert d[0] > d[1] > d[2]
    w = [weight_l1_distance(phi, LogAbsHol(P(f"z1 + z2/{j}")), CFG).mean for j in (2, 8, 32)]
    assert w[0] > w[1] > w[2]


# -- determinism --------------------------------------------------------------

def test_bit_identical_across_threads_and_chunks():
    phi = LogAbsHol(P("z1^2 - z2^3"))
    ref = None
    for threads, chunk in ((1, 1 << 16), (4, 1 << 16), (8, 1 << 16), (3, 10000), (2, 1 << 20)):
        cfg = SampleConfig(seed=11, samples=100_000, threads=threads, chunk_size=chunk)
        ss = sample_set(ONE, (phi,), cfg)
        fit = fit_slope(ss, 0, 0.8, DEFAULT_LADDER)
        key = (ss.log_base.tobytes(), ss.phis[0].tobytes(), fit.log_integrals, fit.growth_rate,
               clipped_integral(ONE, phi, 0.8, 1e-4, cfg).mean)
        ref = key if ref is None else ref
        assert key == ref


def test_seed_changes_samples():
    a = sample_set(ONE, (LogAbsHol(Z1),), SampleConfig(seed=1, samples=1000))
    b = sample_set(ONE, (LogAbsHol(Z1),), SampleConfig(seed=2, samples=1000))
    assert not np.array_equal(a.phis[0], b.phis[0])
