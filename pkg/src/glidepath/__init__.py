"""Dynamic glide-path optimization for pension saving plans.

Least-squares Monte Carlo solver for the optimal equity fraction of an
account receiving a correlated, untradable contribution stream, under
constant or stochastic (square-root) volatility, with scenario, sweep,
and stress-study runners plus a CSV-emitting command line.
"""

from ._version import __version__
from .analytics import (TerminalStats, certainty_equivalent, inverse_utility,
                        merton_ratio, power_utility, summary_stats)
from .basis import (MODEL_CVM, MODEL_SVM, basis_matrix, basis_vector,
                    interpolate_value, n_basis, optimize_pi, regress)
from .config import (RunConfig, apply_overrides, default_config, parse_config,
                     render_config)
from .engine import (PolicySurface, SimulationResult, backward_sweep,
                     forward_simulate)
from .errors import (ConfigError, GlidepathError, GridError,
                     NotApplicableError, ParameterError, RegressionError,
                     SimulationError, UtilityDomainError)
from .experiments import (ProlongationReport, Scenario, ScenarioResult,
                          SweepCell, SweepResult, SweepSpec, run_prolongation,
                          run_scenario, run_sweep, scatter_slice, scenario_with)
from .grids import (PiGrid, WealthGrid, build_pi_grid, build_wealth_grid,
                    nearest_rank_bounds)
from .params import (AlgoParams, ConstantVol, ContributionParams, FundParams,
                     HestonVol, MarketParams, n_steps_for)
from .reporting import emit_results
from .sde import (FellerReport, StatePaths, forward_seed_for, rebalance,
                  require_feller, simulate_state_paths, validate_feller,
                  vol_state_at)

__all__ = [
    "__version__",
    "AlgoParams", "ConstantVol", "ContributionParams", "FundParams",
    "HestonVol", "MarketParams", "n_steps_for",
    "GlidepathError", "ParameterError", "NotApplicableError",
    "SimulationError", "GridError", "RegressionError", "UtilityDomainError",
    "ConfigError",
    "TerminalStats", "power_utility", "inverse_utility",
    "certainty_equivalent", "summary_stats", "merton_ratio",
    "FellerReport", "StatePaths", "validate_feller", "require_feller",
    "simulate_state_paths", "rebalance", "vol_state_at", "forward_seed_for",
    "PiGrid", "WealthGrid", "build_pi_grid", "build_wealth_grid",
    "nearest_rank_bounds",
    "MODEL_CVM", "MODEL_SVM", "n_basis", "basis_vector", "basis_matrix",
    "regress", "optimize_pi", "interpolate_value",
    "PolicySurface", "SimulationResult", "backward_sweep", "forward_simulate",
    "Scenario", "ScenarioResult", "SweepSpec", "SweepCell", "SweepResult",
    "ProlongationReport", "run_scenario", "run_sweep", "scenario_with",
    "scatter_slice", "run_prolongation",
    "RunConfig", "parse_config", "render_config", "default_config",
    "apply_overrides",
    "emit_results",
]
