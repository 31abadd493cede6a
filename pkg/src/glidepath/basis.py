"""Quadratic-in-allocation regression basis and the closed-form argmax."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError, RegressionError
from .analytics import inverse_utility, power_utility

MODEL_CVM = "cvm"
MODEL_SVM = "svm"

# Each basis term is a pi power times one state factor.  State factors are
# [1, c, c^2] for the constant-vol model and [1, c, c^2, nu, nu^2, c*nu] for
# the stochastic-vol model.  The coefficient layout is relied on by
# optimize_pi: beta[1] and beta[2] are the pi and pi^2 coefficients, the
# pi-cross terms sit at the indices below.
_PI_POWER = {
    MODEL_CVM: np.array([0, 1, 2, 0, 0, 1], dtype=np.int64),
    MODEL_SVM: np.array([0, 1, 2, 0, 0, 0, 0, 1, 1, 0], dtype=np.int64),
}
_STATE_INDEX = {
    MODEL_CVM: np.array([0, 0, 0, 1, 2, 1], dtype=np.int64),
    MODEL_SVM: np.array([0, 0, 0, 1, 2, 3, 4, 1, 3, 5], dtype=np.int64),
}
IDX_PI_C = {MODEL_CVM: 5, MODEL_SVM: 7}
IDX_PI_NU = {MODEL_SVM: 8}


def _check_model(model: str) -> str:
    if model not in (MODEL_CVM, MODEL_SVM):
        raise ParameterError(f"unknown model tag {model!r}")
    return model


def n_basis(model: str) -> int:
    return _PI_POWER[_check_model(model)].size


def state_factors(c, nu, model: str) -> np.ndarray:
    """Stack the non-allocation factor columns for paths (c, nu)."""
    c = np.asarray(c, dtype=np.float64)
    if model == MODEL_CVM:
        return np.column_stack([np.ones_like(c), c, c * c])
    nu = np.asarray(nu, dtype=np.float64)
    return np.column_stack([np.ones_like(c), c, c * c, nu, nu * nu, c * nu])


def basis_vector(pi: float, c: float, nu: float | None, model: str) -> np.ndarray:
    """Single design row for allocation pi at contribution c and variance nu."""
    _check_model(model)
    if model == MODEL_SVM and nu is None:
        raise ParameterError("stochastic-vol basis requires a variance value")
    g = state_factors(np.array([c]), None if nu is None else np.array([nu]), model)[0]
    pows = np.array([1.0, pi, pi * pi])
    return pows[_PI_POWER[model]] * g[_STATE_INDEX[model]]


def basis_matrix(pi, c, nu, model: str) -> np.ndarray:
    """Design matrix for every (path, allocation) pair.

    Row order is path-major: row j*n_pi + i holds allocation pi[i] with the
    state of path j.
    """
    _check_model(model)
    pi = np.asarray(pi, dtype=np.float64)
    g = state_factors(c, nu, model)
    n_r, n_pi = g.shape[0], pi.size
    pows = np.column_stack([np.ones(n_pi), pi, pi * pi])
    rows = pows[:, _PI_POWER[model]][None, :, :] * g[:, _STATE_INDEX[model]][:, None, :]
    return rows.reshape(n_r * n_pi, -1)


def regress(design: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Least-squares coefficients via SVD; rank deficiency takes the
    minimum-norm solution."""
    design = np.asarray(design, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if design.ndim != 2 or design.shape[0] == 0:
        raise RegressionError("empty design matrix")
    if design.shape[0] != targets.shape[0]:
        raise RegressionError(
            f"design has {design.shape[0]} rows, targets {targets.shape[0]}")
    if not (np.isfinite(design).all() and np.isfinite(targets).all()):
        raise RegressionError("non-finite entries in regression inputs")
    beta, _, _, _ = np.linalg.lstsq(design, targets, rcond=None)
    return beta


def optimize_pi(beta: np.ndarray, c: float, nu: float | None, bounds,
                model: str) -> float:
    """Argmax over [lo, hi] of the fitted quadratic in the allocation.

    With curvature a = beta[2] and slope-at-zero b collecting the pi cross
    terms, a < 0 gives the clamped vertex -b/(2a); otherwise the quadratic is
    convex or linear on the interval and an endpoint wins, ties to lo.
    """
    _check_model(model)
    lo, hi = float(bounds[0]), float(bounds[1])
    if not lo < hi:
        raise ParameterError(f"allocation bounds must satisfy lo < hi, got {bounds}")
    a = float(beta[2])
    b = float(beta[1]) + float(beta[IDX_PI_C[model]]) * c
    if model == MODEL_SVM:
        if nu is None:
            raise ParameterError("stochastic-vol optimum requires a variance value")
        b += float(beta[IDX_PI_NU[model]]) * nu
    if a < 0.0:
        return min(max(-b / (2.0 * a), lo), hi)
    return hi if a * (hi + lo) + b > 0.0 else lo


def interpolate_value(p: float, pairs, gamma: float) -> float:
    """Value at wealth p from node pairs (wealth, value), interpolating in
    wealth-equivalent space u^{-1}(v) and clamping outside the node range."""
    pairs = np.asarray(pairs, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[0] == 0 or pairs.shape[1] != 2:
        raise ParameterError("pairs must be a non-empty (n, 2) array")
    w = inverse_utility(pairs[:, 1], gamma)
    weq = float(np.interp(p, pairs[:, 0], w))
    return float(power_utility(weq, gamma))


__all__ = ["MODEL_CVM", "MODEL_SVM", "n_basis", "state_factors", "basis_vector",
           "basis_matrix", "regress", "optimize_pi", "interpolate_value"]
