"""State-path simulation: shapes, moments, correlation, determinism."""

import math

import numpy as np
import pytest

import glidepath as g
from glidepath.errors import NotApplicableError, ParameterError
from glidepath.sde import FellerReport, forward_seed_for, splitmix64, vol_state_at

from conftest import cvm_market, svm_market


def test_shapes_and_dt():
    m = svm_market()
    c = g.ContributionParams()
    st = g.simulate_state_paths(m, c, 64, 4, 2.0, 1)
    assert st.n_steps == 8
    assert st.dt == pytest.approx(0.25)
    assert st.n_paths == 64
    assert st.contribution.shape == (64, 9)
    assert st.variance.shape == (64, 9)
    assert st.stock_shocks.shape == (64, 8)
    assert st.seed == 1


def test_cvm_has_no_variance_paths():
    st = g.simulate_state_paths(cvm_market(), g.ContributionParams(), 32, 4, 1.0, 1)
    assert st.variance is None


def test_arrays_read_only():
    st = g.simulate_state_paths(svm_market(), g.ContributionParams(), 16, 4, 1.0, 1)
    for arr in (st.contribution, st.variance, st.stock_shocks):
        with pytest.raises(ValueError):
            arr[0, 0] = 99.0


def test_initial_columns():
    c = g.ContributionParams(c0=1.7)
    st = g.simulate_state_paths(svm_market(), c, 128, 4, 1.0, 3)
    assert np.all(st.contribution[:, 0] == 1.7)
    assert np.all(st.variance[:, 0] == 0.0169)


def test_disabled_contribution_is_zero():
    c = g.ContributionParams(enabled=False)
    st = g.simulate_state_paths(svm_market(), c, 32, 4, 1.0, 5)
    assert np.all(st.contribution == 0.0)


def test_moment_matched_shocks():
    # every shock column is standardized across paths to exact moments
    st = g.simulate_state_paths(svm_market(), g.ContributionParams(), 5000, 4, 2.0, 9)
    mean = st.stock_shocks.mean(axis=0)
    std = st.stock_shocks.std(axis=0)
    assert np.max(np.abs(mean)) < 1e-13
    assert np.max(np.abs(std - 1.0)) < 1e-12


def test_contribution_log_mean_exact():
    # with per-step matching the mean log increment is exactly (mu_C - s^2/2) dt
    c = g.ContributionParams(c0=2.0, mu_C=0.04, sigma_C=0.1)
    st = g.simulate_state_paths(svm_market(), c, 4000, 4, 2.0, 21)
    logc = np.log(st.contribution)
    drift = (c.mu_C - 0.5 * c.sigma_C**2) * st.dt
    for k in range(1, st.n_steps + 1):
        assert logc[:, k].mean() == pytest.approx(math.log(2.0) + k * drift, abs=1e-10)


def test_contribution_log_std():
    c = g.ContributionParams(sigma_C=0.1)
    st = g.simulate_state_paths(svm_market(), c, 20000, 20, 10.0, 2)
    got = np.log(st.contribution[:, -1]).std()
    assert got == pytest.approx(0.1 * math.sqrt(10.0), rel=0.03)


def test_contribution_stock_correlation():
    c = g.ContributionParams(rho_C=0.6)
    st = g.simulate_state_paths(svm_market(), c, 20000, 4, 1.0, 31)
    dlog = np.diff(np.log(st.contribution), axis=1)
    rho = np.corrcoef(dlog[:, 0], st.stock_shocks[:, 0])[0, 1]
    assert rho == pytest.approx(0.6, abs=0.05)


def test_variance_stock_correlation_sign():
    m = svm_market(vol_spec=g.HestonVol(rho_S=-0.8))
    st = g.simulate_state_paths(m, g.ContributionParams(), 20000, 4, 1.0, 7)
    dnu = np.diff(st.variance, axis=1)
    rho = np.corrcoef(dnu[:, 0], st.stock_shocks[:, 0])[0, 1]
    assert rho < -0.5


def test_cir_positivity_and_reversion():
    st = g.simulate_state_paths(svm_market(), g.ContributionParams(), 20000, 20, 10.0, 4)
    assert np.all(st.variance >= 0.0)
    # lambda=5 over 10y: terminal mean has fully reverted to theta
    assert st.variance[:, -1].mean() == pytest.approx(0.0169, rel=0.10)


def test_determinism_same_seed():
    m, c = svm_market(), g.ContributionParams()
    a = g.simulate_state_paths(m, c, 512, 4, 1.0, 77)
    b = g.simulate_state_paths(m, c, 512, 4, 1.0, 77)
    assert np.array_equal(a.contribution, b.contribution)
    assert np.array_equal(a.variance, b.variance)
    assert np.array_equal(a.stock_shocks, b.stock_shocks)
    d = g.simulate_state_paths(m, c, 512, 4, 1.0, 78)
    assert not np.array_equal(a.stock_shocks, d.stock_shocks)


def test_common_random_numbers_across_models():
    # equal seed: contribution and stock drivers identical under CVM and SVM
    c = g.ContributionParams()
    a = g.simulate_state_paths(svm_market(), c, 256, 4, 1.0, 11)
    b = g.simulate_state_paths(cvm_market(), c, 256, 4, 1.0, 11)
    assert np.array_equal(a.stock_shocks, b.stock_shocks)
    assert np.array_equal(a.contribution, b.contribution)


def test_theta_shift_continuity_and_level():
    m, c = svm_market(), g.ContributionParams()
    base = g.simulate_state_paths(m, c, 20000, 4, 2.0, 13)
    shifted = g.simulate_state_paths(m, c, 20000, 4, 2.0, 13,
                                     theta_shift=(1.0, 4 * 0.0169))
    # drivers untouched, variance identical up to the shift time
    assert np.array_equal(base.stock_shocks, shifted.stock_shocks)
    assert np.array_equal(base.contribution, shifted.contribution)
    k_shift = 4  # ceil(shift_time * N)
    assert np.array_equal(base.variance[:, :k_shift + 1],
                          shifted.variance[:, :k_shift + 1])
    assert shifted.variance[:, -1].mean() > 2.0 * base.variance[:, -1].mean()


def test_theta_shift_validation():
    m, c = svm_market(), g.ContributionParams()
    with pytest.raises(ParameterError):
        g.simulate_state_paths(m, c, 16, 4, 2.0, 1, theta_shift=(2.0, 0.03))
    with pytest.raises(ParameterError):
        g.simulate_state_paths(m, c, 16, 4, 2.0, 1, theta_shift=(0.0, 0.03))
    with pytest.raises(ParameterError):
        g.simulate_state_paths(m, c, 16, 4, 2.0, 1, theta_shift=(1.0, -0.1))
    with pytest.raises(ParameterError):
        g.simulate_state_paths(cvm_market(), c, 16, 4, 2.0, 1,
                               theta_shift=(1.0, 0.03))


def test_single_path_works():
    st = g.simulate_state_paths(svm_market(), g.ContributionParams(), 1, 4, 1.0, 2)
    assert np.all(np.isfinite(st.stock_shocks))
    assert np.all(np.isfinite(st.contribution))


def test_vol_state_at():
    m = cvm_market()
    st = g.simulate_state_paths(m, g.ContributionParams(), 8, 4, 1.0, 3)
    v = vol_state_at(st, m, 2)
    assert v.shape == (8,)
    assert np.all(v == 0.13**2)
    ms = svm_market()
    sts = g.simulate_state_paths(ms, g.ContributionParams(), 8, 4, 1.0, 3)
    assert np.array_equal(vol_state_at(sts, ms, 2), sts.variance[:, 2])


# ---------------------------------------------------------------- rebalance

def test_rebalance_hand_value():
    P = np.array([5.0])
    got = g.rebalance(P, 0.5, np.array([1.0]), 0.0169, 0.05, np.array([0.3]),
                      mu=0.06, r=0.02)
    drift = (5.0 * 0.02 + 5.0 * 0.5 * 0.04 + 1.0) * 0.05
    diff = 5.0 * 0.5 * 0.13 * math.sqrt(0.05) * 0.3
    assert got[0] == pytest.approx(5.0 + drift + diff, rel=1e-12)


def test_rebalance_floor():
    P = np.array([5.0])
    got = g.rebalance(P, 2.5, np.array([0.0]), 0.0169, 0.05, np.array([-40.0]),
                      mu=0.06, r=0.02, floor=0.01)
    assert got[0] == 0.01


def test_rebalance_zero_allocation_is_deterministic():
    P = np.array([5.0, 5.0])
    got = g.rebalance(P, 0.0, np.array([0.0, 0.0]), 0.0169, 0.25,
                      np.array([3.0, -3.0]), mu=0.06, r=0.02)
    assert got[0] == got[1] == pytest.approx(5.0 * (1 + 0.02 * 0.25))


# ------------------------------------------------------------------- feller

def test_feller_report_defaults():
    rep = g.validate_feller(svm_market())
    assert rep.ok
    assert rep.lhs == pytest.approx(0.169)
    assert rep.rhs == pytest.approx(0.0625)
    assert ">" in str(rep)


def test_feller_violation():
    m = svm_market(vol_spec=g.HestonVol(sigma_nu=0.6))
    rep = g.validate_feller(m)
    assert not rep.ok
    with pytest.raises(ParameterError, match="Feller"):
        g.require_feller(m)
    # boundary case 2*lam*theta == sigma_nu^2 is a violation
    bound = g.HestonVol(lam=2.0, theta=0.02, sigma_nu=math.sqrt(0.08))
    assert not g.validate_feller(bound).ok


def test_feller_not_applicable_for_constant_vol():
    with pytest.raises(NotApplicableError):
        g.validate_feller(cvm_market())
    g.require_feller(cvm_market())  # no-op


# ------------------------------------------------------------------- seeds

def test_seed_helpers():
    assert splitmix64(0) == splitmix64(0)
    assert splitmix64(1) != splitmix64(2)
    assert 0 <= forward_seed_for(0) < 2**64
    assert forward_seed_for(5) != 5
