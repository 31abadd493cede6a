"""Backward-induction policy solver and the forward evaluator it feeds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .analytics import inverse_utility, power_utility
from .basis import (IDX_PI_C, IDX_PI_NU, MODEL_CVM, MODEL_SVM, _PI_POWER,
                    _STATE_INDEX, n_basis, optimize_pi, state_factors)
from .errors import GridError, RegressionError, SimulationError
from .grids import PiGrid, WealthGrid
from .params import AlgoParams, ContributionParams, FundParams, MarketParams
from .sde import StatePaths, vol_state_at

# Relative eigenvalue cutoff for the normal-equation solve.  Directions of
# the equilibrated Gram matrix below cutoff*lambda_max carry no usable
# signal (exact collinearity at t=0, disabled contribution columns) and are
# dropped, which reproduces the minimum-norm least-squares fit on the rest.
_REL_CUTOFF = 1e-12

_UCASE = {3.0: 0, 2.0: 1, 1.5: 2, 0.5: 3, 6.0: 4}


def _ucase(gamma: float) -> tuple[int, float]:
    g = float(gamma)
    return _UCASE.get(g, 5), 1.0 - g


def _gram_factor(pi_pts: np.ndarray, S: np.ndarray, model: str):
    """Eigendecomposition of the equilibrated Gram matrix for one step.

    The full design never materializes: with basis terms pi^a_m * g_m the
    Gram entry factorizes into (sum_i pi^(a_m+a_n)) * (Gs^T Gs)[g_m, g_n].
    """
    apow = _PI_POWER[model]
    gidx = _STATE_INDEX[model]
    pi_mom = np.array([float(np.sum(pi_pts ** p)) for p in range(5)])
    G = pi_mom[apow[:, None] + apow[None, :]] * S[gidx[:, None], gidx[None, :]]
    diag = np.diag(G).copy()
    pos = diag > 0
    d = np.where(pos, 1.0 / np.sqrt(np.where(pos, diag, 1.0)), 1.0)
    A = G * d[:, None] * d[None, :]
    lam, vec = np.linalg.eigh(A)
    if not np.isfinite(lam[-1]) or lam[-1] <= 0:
        raise RegressionError("normal equations have no positive spectrum")
    keep = lam > _REL_CUTOFF * lam[-1]
    inv_lam = np.where(keep, 1.0 / np.where(keep, lam, 1.0), 0.0)
    return d, vec, inv_lam


def _gram_solve(factor, b: np.ndarray) -> np.ndarray:
    d, vec, inv_lam = factor
    return d * (vec @ (inv_lam * (vec.T @ (d * b))))


@dataclass(frozen=True)
class PolicySurface:
    """Fitted allocation policy: regression coefficients per (step, node).

    betas[it] has shape (n_nodes_at_it, n_basis).  value0 holds the per-path
    realized wealth equivalents at the single t=0 node, the backward
    estimate of the value function at start.
    """

    model: str
    gamma: float
    pi_lo: float
    pi_hi: float
    grid: WealthGrid
    betas: tuple
    value0: np.ndarray
    states_seed: int
    floored_candidates: int

    @property
    def n_steps(self) -> int:
        return self.grid.n_steps

    def ce0(self) -> float:
        """Certainty equivalent of the t=0 value estimate."""
        v = float(np.mean(power_utility(self.value0, self.gamma)))
        return float(inverse_utility(v, self.gamma))

    def policy_pi(self, it: int, k: int, c: float, nu: float | None) -> float:
        """Optimal allocation at node (it, k) for state (c, nu)."""
        return optimize_pi(self.betas[it][k], c, nu,
                           (self.pi_lo, self.pi_hi), self.model)


@dataclass(frozen=True)
class SimulationResult:
    """Forward run under a fitted policy on fresh state paths."""

    model: str
    seed: int
    dt: float
    wealth: np.ndarray
    strategy: np.ndarray
    contribution: np.ndarray
    variance: np.ndarray | None
    const_variance: float
    mean_pi: np.ndarray
    mean_wealth: np.ndarray
    mean_contribution: np.ndarray
    floored: int
    out_of_grid: int

    @property
    def terminal(self) -> np.ndarray:
        return self.wealth[:, -1]

    @property
    def n_steps(self) -> int:
        return self.strategy.shape[1]


def _col(arr: np.ndarray, it: int) -> np.ndarray:
    return np.ascontiguousarray(arr[:, it])


def _check_alignment(states: StatePaths, grid: WealthGrid) -> None:
    if grid.n_steps != states.n_steps:
        raise GridError(f"grid has {grid.n_steps} steps, states {states.n_steps}")
    if abs(grid.dt - states.dt) > 1e-12:
        raise GridError(f"grid dt {grid.dt} does not match states dt {states.dt}")


def backward_sweep(states: StatePaths, grid: WealthGrid, pi_grid: PiGrid,
                   m: MarketParams, c: ContributionParams, f: FundParams,
                   a: AlgoParams) -> PolicySurface:
    """Fit the allocation policy by backward induction over (step, node).

    At each wealth node every path scores the full allocation grid one step
    ahead (terminal utility at the last step, interpolated next-step wealth
    equivalents before), the scores are regressed on the quadratic basis,
    and the node's realized values are re-scored at each path's fitted
    optimal allocation.  Realized values feed the previous step as wealth
    equivalents.
    """
    _check_alignment(states, grid)
    model = MODEL_SVM if m.is_heston else MODEL_CVM
    if model == MODEL_SVM and states.variance is None:
        raise SimulationError("stochastic-vol sweep needs variance paths")
    n_r = states.n_paths
    n_steps = states.n_steps
    nb = n_basis(model)
    apow = _PI_POWER[model]
    gidx = _STATE_INDEX[model]
    i_c = IDX_PI_C[model]
    i_nu = IDX_PI_NU.get(model, -1)
    ucase, q = _ucase(f.gamma)
    pi_pts = np.ascontiguousarray(pi_grid.points)
    lo, hi = pi_grid.lo, pi_grid.hi
    floor = f.wealth_floor
    dt = states.dt

    dummy = np.zeros((1, 1))
    w_next = dummy
    pmin_next = 0.0
    inv_dp_next = 0.0
    s_buf = np.empty((n_r, 3))
    betas: list[np.ndarray] = [None] * n_steps
    floored = 0

    for it in range(n_steps - 1, -1, -1):
        terminal = it == n_steps - 1
        c_t = _col(states.contribution, it)
        vol_t = vol_state_at(states, m, it)
        z1_t = _col(states.stock_shocks, it)
        gs = state_factors(c_t, vol_t if model == MODEL_SVM else None, model)
        factor = _gram_factor(pi_pts, gs.T @ gs, model)
        nodes = grid.nodes_at(it)
        beta_t = np.empty((nodes.size, nb))
        w_t = np.empty((n_r, nodes.size))
        for k, p_node in enumerate(nodes):
            floored += _kernels.score_node(
                p_node, pi_pts, c_t, vol_t, z1_t, m.mu, m.r, dt, floor,
                w_next, pmin_next, inv_dp_next, terminal, ucase, q, s_buf)
            mom = gs.T @ s_buf
            beta = _gram_solve(factor, mom[gidx, apow])
            beta_t[k] = beta
            bn = beta[i_nu] if i_nu >= 0 else 0.0
            floored += _kernels.apply_node(
                p_node, c_t, vol_t, z1_t, m.mu, m.r, dt, floor,
                beta[2], beta[1], beta[i_c], bn, lo, hi,
                w_next, pmin_next, inv_dp_next, terminal, ucase, q, w_t, k)
        betas[it] = beta_t
        w_next = w_t
        pmin_next = grid.p_min[it] if it > 0 else grid.p0
        inv_dp_next = 1.0 / grid.dp[it] if nodes.size > 1 else 0.0

    return PolicySurface(model=model, gamma=f.gamma, pi_lo=lo, pi_hi=hi,
                         grid=grid, betas=tuple(betas),
                         value0=np.ascontiguousarray(w_next[:, 0]),
                         states_seed=states.seed, floored_candidates=floored)


def forward_simulate(surface: PolicySurface, fresh_states: StatePaths,
                     grid: WealthGrid, m: MarketParams, c: ContributionParams,
                     f: FundParams, a: AlgoParams,
                     seed: int | None = None,
                     policy_states: StatePaths | None = None) -> SimulationResult:
    """Run fresh paths forward under the stored policy.

    The surface may come from a different model than the forward world (a
    constant-vol policy evaluated under stochastic volatility, for model
    error studies); the wealth map always uses the forward world's variance
    while the policy lookup uses the surface's own basis.

    policy_states, when given, supplies the variance paths the policy lookup
    sees in place of the true ones (regime-shift studies: the decision maker
    keeps reading the variance their unshifted model implies, while wealth
    compounds under the shifted world).  Contribution and stock shocks still
    come from fresh_states.
    """
    _check_alignment(fresh_states, grid)
    if grid.n_steps != surface.grid.n_steps or abs(grid.dt - surface.grid.dt) > 1e-12:
        raise GridError("surface grid does not match the supplied grid")
    if fresh_states.seed == surface.states_seed:
        raise SimulationError(
            "forward states reuse the backward-sweep seed; draw fresh paths")
    if surface.model == MODEL_SVM and fresh_states.variance is None:
        raise SimulationError("stochastic-vol policy needs variance paths")
    if policy_states is not None:
        if (policy_states.n_paths != fresh_states.n_paths
                or policy_states.n_steps != fresh_states.n_steps):
            raise SimulationError(
                "policy-belief states must match the forward states in shape")
        if surface.model == MODEL_SVM and policy_states.variance is None:
            raise SimulationError("stochastic-vol policy needs variance paths")

    n_r = fresh_states.n_paths
    n_steps = fresh_states.n_steps
    dt = fresh_states.dt
    floor = f.wealth_floor
    i_c = IDX_PI_C[surface.model]
    i_nu = IDX_PI_NU.get(surface.model, -1)

    wealth = np.empty((n_r, n_steps + 1))
    strategy = np.empty((n_r, n_steps))
    wealth[:, 0] = f.p0
    cur = np.ascontiguousarray(wealth[:, 0])
    pi_buf = np.empty(n_r)
    next_buf = np.empty(n_r)
    floored = 0
    out_of_grid = 0

    for it in range(n_steps):
        beta_t = surface.betas[it]
        a_arr = np.ascontiguousarray(beta_t[:, 2])
        b0_arr = np.ascontiguousarray(beta_t[:, 1])
        bc_arr = np.ascontiguousarray(beta_t[:, i_c])
        if i_nu >= 0:
            bn_arr = np.ascontiguousarray(beta_t[:, i_nu])
        else:
            bn_arr = np.zeros(beta_t.shape[0])
        pmin = grid.p_min[it] if it > 0 else grid.p0
        inv_dp = 1.0 / grid.dp[it] if grid.n_nodes[it] > 1 else 0.0
        vol_true = vol_state_at(fresh_states, m, it)
        vol_pol = (vol_true if policy_states is None
                   else vol_state_at(policy_states, m, it))
        nf, noor = _kernels.forward_step(
            cur, _col(fresh_states.contribution, it),
            vol_true, vol_pol,
            _col(fresh_states.stock_shocks, it),
            m.mu, m.r, dt, floor, a_arr, b0_arr, bc_arr, bn_arr,
            pmin, inv_dp, surface.pi_lo, surface.pi_hi, pi_buf, next_buf)
        floored += nf
        out_of_grid += noor
        strategy[:, it] = pi_buf
        wealth[:, it + 1] = next_buf
        cur = next_buf.copy()

    return SimulationResult(
        model=surface.model,
        seed=fresh_states.seed if seed is None else int(seed),
        dt=dt, wealth=wealth, strategy=strategy,
        contribution=fresh_states.contribution,
        variance=fresh_states.variance,
        const_variance=(float("nan") if m.is_heston
                        else m.vol_spec.sigma_S ** 2),
        mean_pi=strategy.mean(axis=0),
        mean_wealth=wealth.mean(axis=0),
        mean_contribution=fresh_states.contribution.mean(axis=0),
        floored=floored, out_of_grid=out_of_grid)


__all__ = ["PolicySurface", "SimulationResult", "backward_sweep",
           "forward_simulate"]
