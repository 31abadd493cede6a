"""Scenario runner: baselines, parameter sweeps, horizon and stress studies."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .analytics import TerminalStats, summary_stats
from .basis import MODEL_CVM, MODEL_SVM
from .engine import PolicySurface, SimulationResult, backward_sweep, forward_simulate
from .errors import GlidepathError, GridError, ParameterError
from .grids import build_pi_grid, build_wealth_grid
from .params import (AlgoParams, ContributionParams, FundParams, HestonVol,
                     MarketParams, n_steps_for)
from .sde import forward_seed_for, simulate_state_paths


@dataclass(frozen=True)
class Scenario:
    """One fully specified run: market, contribution, fund, algorithm, seed.

    policy_source None means the scenario fits its own policy; an external
    PolicySurface skips the backward sweep and is applied as-is (model error
    studies).  regime_shift (time, new_theta) leaves the policy fit under the
    original long-run variance while the forward world switches at the shift
    time; the policy lookup keeps reading the variance path the unshifted
    model implies (the manager does not observe the regime change), only the
    wealth dynamics feel the shift.
    """

    market: MarketParams
    contribution: ContributionParams
    fund: FundParams
    algo: AlgoParams
    label: str = "scenario"
    seed: int = 0
    policy_source: PolicySurface | None = None
    regime_shift: tuple[float, float] | None = None


@dataclass(frozen=True)
class ScenarioResult:
    label: str
    model: str
    world_model: str
    seed: int
    stats: TerminalStats
    backward_ce: float
    mean_pi: np.ndarray
    mean_wealth: np.ndarray
    mean_contribution: np.ndarray
    floored: int
    out_of_grid: int
    surface: PolicySurface
    result: SimulationResult | None


def run_scenario(s: Scenario, keep_paths: bool = True) -> ScenarioResult:
    """Full pipeline: simulate states, build grids, fit policy, evaluate on
    fresh paths, summarize.

    The forward pass always draws its own seed derived from the scenario
    seed, so value estimates are out-of-sample.  keep_paths=False drops the
    per-path arrays and keeps summaries (sweeps run this way).
    """
    m, c, f, a = s.market, s.contribution, s.fund, s.algo
    n_steps = n_steps_for(f.T, a.N)
    if s.regime_shift is not None:
        t_shift, theta_new = s.regime_shift
        if not m.is_heston:
            raise ParameterError(f"{s.label}: regime shift needs the stochastic-vol model")
        if not 0.0 < t_shift < f.T:
            raise ParameterError(f"{s.label}: shift time {t_shift} outside (0, {f.T})")
        if theta_new <= 0:
            raise ParameterError(f"{s.label}: shifted long-run variance must be > 0")

    try:
        if s.policy_source is None:
            back_states = simulate_state_paths(m, c, a.n_r, a.N, f.T, s.seed)
            grid = build_wealth_grid(back_states, m, f, a)
            surface = backward_sweep(back_states, grid, build_pi_grid(a), m, c, f, a)
            del back_states
        else:
            surface = s.policy_source
            grid = surface.grid
            if grid.n_steps != n_steps:
                raise GridError(
                    f"external surface has {grid.n_steps} steps, scenario {n_steps}")
        fwd_states = simulate_state_paths(m, c, a.n_r, a.N, f.T,
                                          forward_seed_for(s.seed),
                                          theta_shift=s.regime_shift)
        if s.regime_shift is not None:
            # same seed, no shift: the variance path the manager's unshifted
            # model implies for the same underlying shocks
            belief = simulate_state_paths(m, c, a.n_r, a.N, f.T,
                                          forward_seed_for(s.seed))
        else:
            belief = None
        result = forward_simulate(surface, fwd_states, grid, m, c, f, a,
                                  policy_states=belief)
    except GlidepathError as exc:
        raise type(exc)(f"{s.label}: {exc}") from exc

    stats = summary_stats(result.terminal, f.gamma)
    return ScenarioResult(
        label=s.label, model=surface.model,
        world_model=MODEL_SVM if m.is_heston else MODEL_CVM,
        seed=s.seed, stats=stats, backward_ce=surface.ce0(),
        mean_pi=result.mean_pi, mean_wealth=result.mean_wealth,
        mean_contribution=result.mean_contribution,
        floored=result.floored, out_of_grid=result.out_of_grid,
        surface=surface, result=result if keep_paths else None)


# Sweep axes resolve by bare field name to one scalar slot; dotted paths are
# accepted and only the last component is used.
_MARKET_FIELDS = ("mu", "r")
_CONSTVOL_FIELDS = ("sigma_S",)
_HESTON_FIELDS = ("rho_S", "theta", "sigma_nu", "nu0", "lam", "lambda")
_CONTRIB_FIELDS = ("c0", "mu_C", "sigma_C", "rho_C")
_FUND_FIELDS = ("p0", "T", "gamma")


def scenario_with(s: Scenario, axis: str, value: float) -> Scenario:
    """Copy of s with one scalar field replaced; label records the change."""
    name = axis.split(".")[-1]
    m, c, f = s.market, s.contribution, s.fund
    try:
        if name in _MARKET_FIELDS:
            m = replace(m, **{name: value})
        elif name in _CONSTVOL_FIELDS or name in _HESTON_FIELDS:
            key = "lam" if name == "lambda" else name
            m = replace(m, vol_spec=replace(m.vol_spec, **{key: value}))
        elif name in _CONTRIB_FIELDS:
            c = replace(c, **{name: value})
        elif name in _FUND_FIELDS:
            f = replace(f, **{name: value})
        else:
            raise ParameterError(f"unknown sweep axis {axis!r}")
    except TypeError as exc:
        raise ParameterError(
            f"axis {axis!r} does not apply to {type(m.vol_spec).__name__}") from exc
    return replace(s, market=m, contribution=c, fund=f,
                   label=f"{s.label}[{name}={value:g}]")


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axis: str
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise ParameterError("sweep needs at least one value")


@dataclass(frozen=True)
class SweepCell:
    value: float
    result: ScenarioResult | None
    error: str | None


@dataclass(frozen=True)
class SweepResult:
    axis: str
    cells: tuple[SweepCell, ...]

    def table(self) -> list[tuple[float, TerminalStats]]:
        return [(c.value, c.result.stats) for c in self.cells if c.result is not None]

    def __getitem__(self, value: float) -> ScenarioResult:
        for cell in self.cells:
            if cell.value == value:
                if cell.result is None:
                    raise KeyError(f"cell {value} failed: {cell.error}")
                return cell.result
        raise KeyError(value)


def run_sweep(spec: SweepSpec, keep_paths: bool = False) -> SweepResult:
    """One scenario per axis value at a common seed, so cell differences are
    parameter-driven.  A failing cell records its error and the sweep
    continues."""
    cells = []
    for v in spec.values:
        try:
            res = run_scenario(scenario_with(spec.base, spec.axis, v), keep_paths)
            cells.append(SweepCell(value=v, result=res, error=None))
        except GlidepathError as exc:
            cells.append(SweepCell(value=v, result=None, error=str(exc)))
    return SweepResult(axis=spec.axis, cells=tuple(cells))


def scatter_slice(result: SimulationResult, t: float,
                  vol_band: tuple[float, float] | None = None) -> np.ndarray:
    """Per-path (wealth, strategy, variance) at rebalance time t.

    vol_band [lo, hi] keeps only paths whose variance lies in the band.
    Constant-vol runs carry their flat variance in the third column.
    """
    step = int(round(t / result.dt))
    if abs(step * result.dt - t) > 1e-9 or not 0 <= step < result.n_steps:
        raise ParameterError(f"t={t} is not a rebalance time of this run")
    wealth = result.wealth[:, step]
    pi = result.strategy[:, step]
    if result.variance is not None:
        nu = result.variance[:, step]
    else:
        nu = np.full_like(wealth, result.const_variance)
    if vol_band is not None:
        lo, hi = float(vol_band[0]), float(vol_band[1])
        mask = (nu >= lo) & (nu <= hi)
        wealth, pi, nu = wealth[mask], pi[mask], nu[mask]
    return np.column_stack([wealth, pi, nu])


@dataclass(frozen=True)
class ProlongationReport:
    short: ScenarioResult
    long: ScenarioResult
    initial_pi_short: float
    initial_pi_long: float
    ratio_year: float
    wealth_to_contribution: float


def run_prolongation(base: Scenario, T_new: float = 30.0,
                     ratio_year: float = 20.0) -> ProlongationReport:
    """Run the base horizon and the prolonged horizon side by side.

    The long run switches on the annual spacing recalculation; reported are
    both initial mean strategies and the mean wealth-to-contribution ratio
    at ratio_year of the long run.
    """
    if not base.contribution.enabled:
        raise ParameterError("prolongation ratio needs an active contribution")
    if not 0 < ratio_year < T_new:
        raise ParameterError(f"ratio year {ratio_year} outside (0, {T_new})")
    short = run_scenario(base, keep_paths=False)
    long_sc = replace(base,
                      fund=replace(base.fund, T=T_new),
                      algo=replace(base.algo, long_horizon_stepping=True),
                      label=f"{base.label}[T={T_new:g}]")
    long_res = run_scenario(long_sc, keep_paths=True)
    sim = long_res.result
    step = int(round(ratio_year * base.algo.N))
    ratio = float(np.mean(sim.wealth[:, step] / sim.contribution[:, step]))
    long_res = replace(long_res, result=None)
    return ProlongationReport(short=short, long=long_res,
                              initial_pi_short=float(short.mean_pi[0]),
                              initial_pi_long=float(long_res.mean_pi[0]),
                              ratio_year=ratio_year,
                              wealth_to_contribution=ratio)


__all__ = ["Scenario", "ScenarioResult", "SweepSpec", "SweepCell", "SweepResult",
           "ProlongationReport", "run_scenario", "run_sweep", "scenario_with",
           "scatter_slice", "run_prolongation"]
