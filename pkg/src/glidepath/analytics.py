"""Utility functions, certainty equivalents, and closed-form baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UtilityDomainError


def _check_gamma(gamma: float) -> None:
    if gamma < 0 or gamma == 1.0:
        raise ParameterError(f"gamma must be >= 0 and != 1, got {gamma}")


def power_utility(z, gamma: float):
    """CRRA utility z**(1-gamma)/(1-gamma); accepts scalars or arrays, z > 0."""
    _check_gamma(gamma)
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0) or not np.all(np.isfinite(z)):
        raise UtilityDomainError("power_utility requires strictly positive finite wealth")
    q = 1.0 - gamma
    out = z ** q / q
    return out if out.ndim else float(out)


def inverse_utility(v, gamma: float):
    """Inverse of power_utility: ((1-gamma)*v)**(1/(1-gamma))."""
    _check_gamma(gamma)
    v = np.asarray(v, dtype=float)
    q = 1.0 - gamma
    if np.any(q * v <= 0) or not np.all(np.isfinite(v)):
        raise UtilityDomainError(
            f"inverse_utility requires (1-gamma)*v > 0; got v with gamma={gamma}")
    out = (q * v) ** (1.0 / q)
    return out if out.ndim else float(out)


def certainty_equivalent(terminal_wealth, gamma: float) -> float:
    """Deterministic wealth with the same expected utility as the sample."""
    w = np.asarray(terminal_wealth, dtype=float)
    if w.size == 0:
        raise ParameterError("certainty_equivalent needs a nonempty sample")
    return float(inverse_utility(np.mean(power_utility(w, gamma)), gamma))


@dataclass(frozen=True)
class TerminalStats:
    """Moments of a terminal-wealth sample.

    variance is the unbiased (n-1) estimator; cv = sqrt(variance)/mean.
    """

    mean: float
    variance: float
    ce: float
    cv: float
    n: int


def summary_stats(terminal_wealth, gamma: float) -> TerminalStats:
    """Mean, unbiased variance, certainty equivalent, and coefficient of variation."""
    w = np.asarray(terminal_wealth, dtype=float)
    if w.size == 0:
        raise ParameterError("summary_stats needs a nonempty sample")
    mean = float(np.mean(w))
    variance = float(np.var(w, ddof=1)) if w.size > 1 else 0.0
    ce = certainty_equivalent(w, gamma)
    cv = float(np.sqrt(variance) / mean) if mean > 0 else float("nan")
    return TerminalStats(mean=mean, variance=variance, ce=ce, cv=cv, n=int(w.size))


def merton_ratio(mu: float, r: float, sigma: float, gamma: float) -> float:
    """Constant optimal risky fraction (mu - r)/(sigma**2 * gamma)."""
    if sigma <= 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    if gamma <= 0:
        raise ParameterError(f"gamma must be > 0, got {gamma}")
    return (mu - r) / (sigma * sigma * gamma)


__all__ = [
    "power_utility",
    "inverse_utility",
    "certainty_equivalent",
    "summary_stats",
    "TerminalStats",
    "merton_ratio",
]
