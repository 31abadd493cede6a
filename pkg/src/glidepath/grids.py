"""Allocation grid and quantile-bounded adaptive wealth grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .params import AlgoParams, FundParams, MarketParams
from .sde import StatePaths, rebalance, vol_state_at


@dataclass(frozen=True)
class PiGrid:
    """Uniform allocation grid on [pi_lo, pi_hi]."""

    points: np.ndarray

    @property
    def lo(self) -> float:
        return float(self.points[0])

    @property
    def hi(self) -> float:
        return float(self.points[-1])


def build_pi_grid(a: AlgoParams) -> PiGrid:
    """n_pi uniformly spaced allocation fractions, endpoints included."""
    pts = np.linspace(a.pi_lo, a.pi_hi, a.n_pi)
    pts.setflags(write=False)
    return PiGrid(points=pts)


def nearest_rank_bounds(sample: np.ndarray, q1: float, q2: float) -> tuple[float, float]:
    """Nearest-rank empirical quantiles: (q1 from below, 1-q2 from above).

    Lower bound is the ceil(q1*n)-th smallest value, upper bound the
    ceil(q2*n)-th largest.  On {1..10} with q1 = q2 = 0.1 this yields (1, 10).
    """
    n = sample.size
    k_lo = math.ceil(q1 * n) - 1
    k_hi = n - math.ceil(q2 * n)
    part = np.partition(sample, (k_lo, k_hi))
    return float(part[k_lo]), float(part[k_hi])


@dataclass(frozen=True)
class WealthGrid:
    """Per-step wealth nodes: uniform with step dp[it] from p_min[it].

    Index it runs over steps 0..n_steps-1 (the times at which a policy is
    computed); step 0 carries the single node p0.  bounds_lo/bounds_hi keep
    the raw quantile bounds for every step 1..n_steps (diagnostics and the
    long-horizon restep rule).
    """

    dt: float
    n_steps: int
    p0: float
    p_min: np.ndarray
    dp: np.ndarray
    n_nodes: np.ndarray
    bounds_lo: np.ndarray
    bounds_hi: np.ndarray

    def nodes_at(self, it: int) -> np.ndarray:
        if not 0 <= it < self.n_steps:
            raise GridError(f"no wealth nodes at step {it} (grid has {self.n_steps})")
        if it == 0:
            return np.array([self.p0])
        return self.p_min[it] + self.dp[it] * np.arange(self.n_nodes[it])


def build_wealth_grid(states: StatePaths, m: MarketParams, f: FundParams,
                      a: AlgoParams) -> WealthGrid:
    """Wealth nodes from the spread of fully-risky reference paths.

    Simulates wealth holding the allocation at pi_hi on the given state paths,
    takes nearest-rank quantile bounds [q1, 1-q2] at every step, and fixes the
    node spacing dP from the bounds after the first step:
    dP = (P_max(dt) - P_min(dt))/n_p, node count ceil(spread/dP) per step.

    Under long_horizon_stepping, the spacing is recomputed once per year y
    as (P_max(dt+y) - P_min(dt+y))/(n_p+y), which keeps node counts bounded
    as the wealth spread grows over long horizons.
    """
    n_steps = states.n_steps
    dt = states.dt
    floor = f.wealth_floor

    wealth = np.full(states.n_paths, f.p0)
    lo = np.empty(n_steps + 1)
    hi = np.empty(n_steps + 1)
    lo[0] = hi[0] = f.p0
    for it in range(n_steps):
        wealth = rebalance(wealth, a.pi_hi, states.contribution[:, it],
                           vol_state_at(states, m, it), dt,
                           states.stock_shocks[:, it],
                           mu=m.mu, r=m.r, floor=floor)
        lo[it + 1], hi[it + 1] = nearest_rank_bounds(wealth, a.q1, a.q2)

    spread_first = hi[1] - lo[1]
    if spread_first <= 0:
        raise GridError(
            f"degenerate wealth grid: zero spread {lo[1]}..{hi[1]} after first step")
    dp_global = spread_first / a.n_p

    p_min = np.empty(n_steps)
    dp = np.empty(n_steps)
    n_nodes = np.empty(n_steps, dtype=np.int64)
    p_min[0], dp[0], n_nodes[0] = f.p0, 0.0, 1

    N = round(1.0 / dt)
    for it in range(1, n_steps):
        if a.long_horizon_stepping:
            year = it // N
            bound_step = min(1 + year * N, n_steps)
            spread_y = hi[bound_step] - lo[bound_step]
            if spread_y <= 0:
                raise GridError(f"degenerate wealth grid at year {year}")
            step = spread_y / (a.n_p + year)
        else:
            step = dp_global
        spread = hi[it] - lo[it]
        if spread <= 0:
            raise GridError(f"degenerate wealth grid at step {it}: {lo[it]}..{hi[it]}")
        count = math.ceil(spread / step)
        p_min[it] = lo[it]
        dp[it] = step
        n_nodes[it] = count + 1

    for arr in (p_min, dp, n_nodes, lo, hi):
        arr.setflags(write=False)
    return WealthGrid(dt=dt, n_steps=n_steps, p0=f.p0, p_min=p_min, dp=dp,
                      n_nodes=n_nodes, bounds_lo=lo, bounds_hi=hi)


__all__ = ["PiGrid", "WealthGrid", "build_pi_grid", "build_wealth_grid",
           "nearest_rank_bounds"]
