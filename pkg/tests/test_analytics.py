"""Utility functions and terminal-wealth statistics.

Hand-computed oracle values are written out explicitly so a failure points
at the library, not at the test.
"""

import math

import numpy as np
import pytest

import glidepath as g
from glidepath.errors import ParameterError, UtilityDomainError

GAMMAS = [0.5, 1.5, 2.0, 3.0, 6.0, 4.2]


# ----------------------------------------------------------------- utility

def test_power_utility_hand_values():
    # gamma=3: u(z) = z^-2 / (-2)
    assert g.power_utility(np.array([1.0]), 3.0)[0] == pytest.approx(-0.5)
    assert g.power_utility(np.array([8.0]), 3.0)[0] == pytest.approx(-1.0 / 128.0)
    # gamma=0.5: u(z) = 2*sqrt(z)
    assert g.power_utility(np.array([4.0]), 0.5)[0] == pytest.approx(4.0)
    # gamma=2: u(z) = -1/z
    assert g.power_utility(np.array([5.0]), 2.0)[0] == pytest.approx(-0.2)


def test_inverse_utility_hand_values():
    assert g.inverse_utility(np.array([-0.5]), 3.0)[0] == pytest.approx(1.0)
    assert g.inverse_utility(np.array([-1.0 / 128.0]), 3.0)[0] == pytest.approx(8.0)
    assert g.inverse_utility(np.array([4.0]), 0.5)[0] == pytest.approx(4.0)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_utility_round_trip_precision(gamma):
    # criterion-level tolerance: relative error below 1e-10
    z = np.geomspace(1e-3, 1e3, 301)
    back = g.inverse_utility(g.power_utility(z, gamma), gamma)
    assert np.max(np.abs(back - z) / z) < 1e-10


def test_power_utility_domain():
    with pytest.raises(UtilityDomainError):
        g.power_utility(np.array([0.0]), 3.0)
    with pytest.raises(UtilityDomainError):
        g.power_utility(np.array([-1.0]), 0.5)
    with pytest.raises(UtilityDomainError):
        g.power_utility(np.array([np.nan]), 3.0)


def test_inverse_utility_domain():
    # gamma>1 needs v<0, gamma<1 needs v>0
    with pytest.raises(UtilityDomainError):
        g.inverse_utility(np.array([0.5]), 3.0)
    with pytest.raises(UtilityDomainError):
        g.inverse_utility(np.array([-0.5]), 0.5)
    with pytest.raises(UtilityDomainError):
        g.inverse_utility(np.array([0.0]), 3.0)


def test_utility_monotone_increasing():
    z = np.geomspace(0.1, 50.0, 100)
    for gamma in GAMMAS:
        u = g.power_utility(z, gamma)
        assert np.all(np.diff(u) > 0)


# ------------------------------------------------------ certainty equivalent

def test_ce_constant_sample_is_the_constant():
    assert g.certainty_equivalent(np.full(7, 5.0), 3.0) == pytest.approx(5.0)


def test_ce_two_point_hand_value():
    # u = z^-2/(-2); mean u over {4, 6} = -(1/16 + 1/36)/4
    sample = np.array([4.0, 6.0])
    mean_u = -(1.0 / 16.0 + 1.0 / 36.0) / 4.0
    expect = math.sqrt(-0.5 / mean_u)
    ce = g.certainty_equivalent(sample, 3.0)
    assert ce == pytest.approx(expect, rel=1e-12)
    assert ce == pytest.approx(4.7068, abs=5e-5)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_ce_jensen_gap(gamma):
    rng = np.random.default_rng(42)
    sample = np.exp(rng.normal(0.5, 0.4, size=4000))
    ce = g.certainty_equivalent(sample, gamma)
    assert ce < sample.mean()
    assert sample.min() < ce < sample.max()


@pytest.mark.parametrize("gamma", GAMMAS)
def test_ce_scale_equivariance(gamma):
    rng = np.random.default_rng(7)
    sample = rng.uniform(1.0, 9.0, size=500)
    ce = g.certainty_equivalent(sample, gamma)
    assert g.certainty_equivalent(3.5 * sample, gamma) == pytest.approx(
        3.5 * ce, rel=1e-12)


def test_ce_more_risk_averse_is_lower():
    rng = np.random.default_rng(11)
    sample = np.exp(rng.normal(0.0, 0.5, size=2000))
    ces = [g.certainty_equivalent(sample, gm) for gm in (0.5, 1.5, 2, 3, 6)]
    assert all(a > b for a, b in zip(ces, ces[1:]))


def test_ce_empty_rejected():
    with pytest.raises(ParameterError):
        g.certainty_equivalent(np.array([]), 3.0)


# ---------------------------------------------------------------- summaries

def test_summary_stats_against_numpy():
    rng = np.random.default_rng(3)
    sample = np.exp(rng.normal(1.0, 0.3, size=1000))
    st = g.summary_stats(sample, 3.0)
    assert st.n == 1000
    assert st.mean == pytest.approx(sample.mean(), rel=1e-14)
    assert st.variance == pytest.approx(sample.var(ddof=1), rel=1e-12)
    assert st.cv == pytest.approx(sample.std(ddof=1) / sample.mean(), rel=1e-12)
    assert st.ce == pytest.approx(g.certainty_equivalent(sample, 3.0), rel=1e-14)


def test_summary_stats_degenerate():
    st = g.summary_stats(np.array([10.0, 10.0]), 3.0)
    assert (st.mean, st.variance, st.ce, st.cv) == (10.0, 0.0, 10.0, 0.0)
    one = g.summary_stats(np.array([4.0]), 2.0)
    assert one.variance == 0.0 and one.n == 1


# ------------------------------------------------------------- merton ratio

def test_merton_ratio_calibrated_value():
    # (mu - r) / (gamma * sigma^2) with sigma the VOLATILITY
    got = g.merton_ratio(0.06, 0.02, 0.13, 3.0)
    assert got == pytest.approx(0.04 / (3.0 * 0.0169), rel=1e-14)
    assert got == pytest.approx(0.78895, abs=5e-6)


def test_merton_ratio_properties():
    assert g.merton_ratio(0.02, 0.02, 0.13, 3.0) == 0.0
    half = g.merton_ratio(0.06, 0.02, 0.13, 6.0)
    assert half == pytest.approx(0.5 * g.merton_ratio(0.06, 0.02, 0.13, 3.0))
    with pytest.raises(ParameterError):
        g.merton_ratio(0.06, 0.02, 0.0, 3.0)
    with pytest.raises(ParameterError):
        g.merton_ratio(0.06, 0.02, 0.13, 0.0)
