"""Parameter types for the market, the contribution stream, the fund, and the solver.

Volatility is specified either as a constant (ConstantVol) or as a CIR-driven
instantaneous variance (HestonVol).  Constructors validate positivity and range
constraints; the Feller condition is checked separately by
:func:`glidepath.sde.validate_feller` so that violating parameter sets can be
constructed, inspected, and reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ParameterError


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterError(msg)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class ConstantVol:
    """Constant-volatility spec: one volatility per sqrt-year."""

    sigma_S: float = 0.13

    def __post_init__(self) -> None:
        _require(_finite(self.sigma_S) and self.sigma_S > 0,
                 f"sigma_S must be finite and > 0, got {self.sigma_S}")


@dataclass(frozen=True)
class HestonVol:
    """CIR instantaneous-variance spec.

    nu0: initial variance; lam: mean-reversion speed per year; theta: long-term
    variance; sigma_nu: vol-of-vol; rho_S: correlation between the stock and
    variance drivers.  The Feller condition 2*lam*theta > sigma_nu**2 is not
    enforced here (see module docstring).
    """

    nu0: float = 0.0169
    lam: float = 5.0
    theta: float = 0.0169
    sigma_nu: float = 0.25
    rho_S: float = -0.4

    def __post_init__(self) -> None:
        _require(_finite(self.nu0, self.lam, self.theta, self.sigma_nu, self.rho_S),
                 "HestonVol parameters must be finite")
        _require(self.nu0 > 0, f"nu0 must be > 0, got {self.nu0}")
        _require(self.lam > 0, f"lambda must be > 0, got {self.lam}")
        _require(self.theta > 0, f"theta must be > 0, got {self.theta}")
        _require(self.sigma_nu > 0, f"sigma_nu must be > 0, got {self.sigma_nu}")
        _require(-1.0 < self.rho_S < 1.0,
                 f"rho_S must lie in (-1, 1), got {self.rho_S}")


@dataclass(frozen=True)
class MarketParams:
    """Riskless rate, stock drift, and volatility spec."""

    mu: float = 0.06
    r: float = 0.02
    vol_spec: ConstantVol | HestonVol = field(default_factory=HestonVol)
    S0: float = 1.0

    def __post_init__(self) -> None:
        _require(_finite(self.mu, self.r), "mu and r must be finite")
        _require(self.r >= 0, f"r must be >= 0, got {self.r}")
        _require(_finite(self.S0) and self.S0 > 0,
                 f"S0 must be finite and > 0, got {self.S0}")

    @property
    def is_heston(self) -> bool:
        return isinstance(self.vol_spec, HestonVol)


@dataclass(frozen=True)
class ContributionParams:
    """Geometric contribution stream, partially correlated with the stock.

    sigma_C = 0 encodes a deterministic stream; enabled = False removes cash
    injections entirely (the no-contribution baselines).
    """

    c0: float = 1.0
    mu_C: float = 0.04
    sigma_C: float = 0.1
    rho_C: float = 0.05
    enabled: bool = True

    def __post_init__(self) -> None:
        _require(_finite(self.c0, self.mu_C, self.sigma_C, self.rho_C),
                 "contribution parameters must be finite")
        if self.enabled:
            _require(self.c0 > 0, f"c0 must be > 0 when enabled, got {self.c0}")
        _require(self.sigma_C >= 0, f"sigma_C must be >= 0, got {self.sigma_C}")
        _require(-1.0 < self.rho_C < 1.0,
                 f"rho_C must lie in (-1, 1), got {self.rho_C}")


@dataclass(frozen=True)
class FundParams:
    """Initial wealth, horizon, and relative risk aversion."""

    p0: float = 5.0
    T: float = 10.0
    gamma: float = 3.0

    def __post_init__(self) -> None:
        _require(_finite(self.p0, self.T, self.gamma),
                 "fund parameters must be finite")
        _require(self.p0 > 0, f"p0 must be > 0, got {self.p0}")
        _require(self.T > 0, f"T must be > 0, got {self.T}")
        _require(self.gamma >= 0, f"gamma must be >= 0, got {self.gamma}")
        _require(self.gamma != 1.0,
                 "gamma = 1 (log utility) is excluded; use a value != 1")

    @property
    def wealth_floor(self) -> float:
        """Positivity floor applied after every Euler step of the wealth map."""
        return 1e-6 * self.p0


@dataclass(frozen=True)
class AlgoParams:
    """Solver resolution: time, allocation, path, and wealth-grid settings."""

    N: int = 20
    n_r: int = 50_000
    n_pi: int = 31
    n_p: int = 3
    pi_lo: float = -0.5
    pi_hi: float = 2.5
    q1: float = 0.1
    q2: float = 0.1
    long_horizon_stepping: bool = False

    def __post_init__(self) -> None:
        _require(self.N >= 1, f"N must be >= 1, got {self.N}")
        _require(self.n_r >= 1, f"n_r must be >= 1, got {self.n_r}")
        _require(self.n_pi >= 2, f"n_pi must be >= 2, got {self.n_pi}")
        _require(self.n_p >= 1, f"n_p must be >= 1, got {self.n_p}")
        _require(_finite(self.pi_lo, self.pi_hi) and self.pi_lo < self.pi_hi,
                 f"need pi_lo < pi_hi, got [{self.pi_lo}, {self.pi_hi}]")
        _require(0 < self.q1 < 0.5, f"q1 must lie in (0, 0.5), got {self.q1}")
        _require(0 < self.q2 < 0.5, f"q2 must lie in (0, 0.5), got {self.q2}")


def n_steps_for(T: float, N: int) -> int:
    """Number of Euler steps on the grid {0, dt, ..., T} with dt = 1/N."""
    steps = T * N
    rounded = round(steps)
    if abs(steps - rounded) > 1e-9 or rounded < 1:
        raise ParameterError(
            f"T*N must be a positive integer number of steps, got T={T}, N={N}")
    return int(rounded)


__all__ = [
    "ConstantVol",
    "HestonVol",
    "MarketParams",
    "ContributionParams",
    "FundParams",
    "AlgoParams",
    "n_steps_for",
    "replace",
]
