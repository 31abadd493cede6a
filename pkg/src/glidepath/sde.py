"""Exogenous state simulation and the one-step wealth rebalancing map.

Simulated processes: a geometric contribution stream (exact log-Euler step)
and, under HestonVol, a CIR instantaneous variance evolved with the
full-truncation Euler scheme (negative part clamped inside drift and
diffusion).  The stock price itself is never materialized; the wealth map
consumes only the stock shocks and the current variance.

Normals come from counter-based Philox streams keyed by (seed, block), in
fixed blocks of 4096 paths, so the raw draws depend only on the seed and the
block layout regardless of execution order or thread count.  Each driver is
then moment-matched per step: across paths the shocks are shifted and scaled
to exact zero mean and unit variance.  This is a standard variance-reduction
device; without it the per-node regressions inherit the O(1/sqrt(n_r))
fluctuation of the sample shock moments, which swamps the policy estimates at
practical path counts.  All reductions are plain numpy sums, so results stay
deterministic for a given seed no matter the thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotApplicableError, ParameterError, SimulationError
from .params import (
    ConstantVol,
    ContributionParams,
    HestonVol,
    MarketParams,
    n_steps_for,
)

_BLOCK = 4096

# Salt mixed into a scenario seed to derive the forward-simulation seed.
FORWARD_SEED_SALT = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 round; used to derive auxiliary seeds."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def forward_seed_for(seed: int) -> int:
    """Seed for the fresh forward-simulation paths of a scenario."""
    return splitmix64(seed ^ FORWARD_SEED_SALT)


@dataclass(frozen=True)
class FellerReport:
    """Both sides of the Feller inequality 2*lambda*theta > sigma_nu**2."""

    ok: bool
    lhs: float
    rhs: float

    def __str__(self) -> str:
        rel = ">" if self.ok else "<="
        return f"2*lambda*theta = {self.lhs:g} {rel} sigma_nu^2 = {self.rhs:g}"


def validate_feller(m: MarketParams | HestonVol) -> FellerReport:
    """Check the Feller condition of a HestonVol spec.

    Raises NotApplicableError when the volatility is constant.
    """
    spec = m.vol_spec if isinstance(m, MarketParams) else m
    if not isinstance(spec, HestonVol):
        raise NotApplicableError(
            "Feller condition applies to HestonVol only, not ConstantVol")
    lhs = 2.0 * spec.lam * spec.theta
    rhs = spec.sigma_nu ** 2
    return FellerReport(ok=lhs > rhs, lhs=lhs, rhs=rhs)


def require_feller(m: MarketParams) -> None:
    """Raise ParameterError when a Heston spec violates the Feller condition."""
    if isinstance(m.vol_spec, HestonVol):
        report = validate_feller(m)
        if not report.ok:
            raise ParameterError(f"Feller condition violated: {report}")


@dataclass(frozen=True)
class StatePaths:
    """Simulated exogenous paths on the grid {0, dt, ..., T}.

    contribution and variance have one column per grid time (n_steps + 1);
    stock_shocks has one column per step.  variance is None under ConstantVol.
    Arrays are marked read-only: a StatePaths is safe to share across threads.
    """

    dt: float
    n_steps: int
    contribution: np.ndarray
    variance: np.ndarray | None
    stock_shocks: np.ndarray
    seed: int

    @property
    def n_paths(self) -> int:
        return self.contribution.shape[0]


def _philox_normals(seed: int, block: int, rows: int, n_steps: int, cols: int) -> np.ndarray:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, block], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.standard_normal((rows, n_steps, cols))


def _raise_nonfinite(name: str, arr: np.ndarray, path_offset: int) -> None:
    bad = ~np.isfinite(arr)
    if bad.any():
        j, t = np.argwhere(bad)[0]
        raise SimulationError(
            f"non-finite {name} at path {path_offset + int(j)}, step {int(t)}; "
            "parameters produce numerical blow-up")


def simulate_state_paths(
    m: MarketParams,
    c: ContributionParams,
    n_r: int,
    N: int,
    T: float,
    seed: int,
    theta_shift: tuple[float, float] | None = None,
) -> StatePaths:
    """Simulate contribution (and variance, under HestonVol) paths.

    Three standard-normal streams are drawn per path and step; the variance
    driver is rho_S*Z1 + sqrt(1-rho_S^2)*Z2 and the contribution driver
    rho_C*Z1 + sqrt(1-rho_C^2)*Z3, with Z1 the stock driver.  All three are
    drawn and moment-matched for every model variant so runs at equal seeds
    share shocks.

    theta_shift = (time, new_theta) moves the CIR long-term mean to new_theta
    for steps starting at or after the given time; realized variance stays
    continuous.  Deterministic given (seed, n_r, N, T) regardless of threading.
    """
    if n_r < 1:
        raise ParameterError(f"n_r must be >= 1, got {n_r}")
    require_feller(m)
    n_steps = n_steps_for(T, N)
    dt = 1.0 / N
    sqdt = math.sqrt(dt)
    heston = isinstance(m.vol_spec, HestonVol)
    if theta_shift is not None and not heston:
        raise ParameterError(
            "theta shift moves the CIR long-run mean and needs a "
            "stochastic-volatility market")

    contribution = np.empty((n_r, n_steps + 1))
    variance = np.empty((n_r, n_steps + 1)) if heston else None

    z = np.empty((n_r, n_steps, 3))
    for block_start in range(0, n_r, _BLOCK):
        rows = min(_BLOCK, n_r - block_start)
        block = block_start // _BLOCK
        z[block_start:block_start + rows] = _philox_normals(
            seed, block, rows, n_steps, 3)
    if n_r >= 2:
        z -= z.mean(axis=0)
        sd = z.std(axis=0)
        np.maximum(sd, 1e-300, out=sd)  # degenerate column: leave it centered
        z /= sd
    z1 = np.ascontiguousarray(z[:, :, 0])

    if heston:
        spec = m.vol_spec
        theta_by_step = np.full(n_steps, spec.theta)
        if theta_shift is not None:
            shift_time, new_theta = theta_shift
            if not 0.0 < shift_time < T:
                raise ParameterError(
                    f"theta shift time must lie in (0, T), got {shift_time}")
            if new_theta <= 0:
                raise ParameterError(f"shifted theta must be > 0, got {new_theta}")
            first = int(math.ceil(shift_time * N - 1e-9))
            theta_by_step[first:] = new_theta
        rho_s = spec.rho_S
        rho_s_c = math.sqrt(1.0 - rho_s * rho_s)

    c_drift = (c.mu_C - 0.5 * c.sigma_C ** 2) * dt
    c_diff = c.sigma_C * sqdt
    rho_c = c.rho_C
    rho_c_c = math.sqrt(1.0 - rho_c * rho_c)

    with np.errstate(over="ignore", invalid="ignore"):
        if c.enabled:
            zc = rho_c * z1 + rho_c_c * z[:, :, 2]
            log_c = math.log(c.c0) + np.cumsum(c_drift + c_diff * zc, axis=1)
            contribution[:, 0] = c.c0
            contribution[:, 1:] = np.exp(log_c)
            del zc, log_c
        else:
            contribution[:] = 0.0

        if heston:
            zv = rho_s * z1 + rho_s_c * z[:, :, 1]
            v_tilde = np.full(n_r, spec.nu0)
            variance[:, 0] = spec.nu0
            for t in range(n_steps):
                v_plus = np.maximum(v_tilde, 0.0)
                v_tilde = (v_tilde
                           + spec.lam * (theta_by_step[t] - v_plus) * dt
                           + spec.sigma_nu * np.sqrt(v_plus) * sqdt * zv[:, t])
                variance[:, t + 1] = np.maximum(v_tilde, 0.0)
            del zv

    del z
    stock_shocks = z1
    _raise_nonfinite("contribution", contribution, 0)
    if heston:
        _raise_nonfinite("variance", variance, 0)

    for arr in (contribution, variance, stock_shocks):
        if arr is not None:
            arr.setflags(write=False)
    return StatePaths(dt=dt, n_steps=n_steps, contribution=contribution,
                      variance=variance, stock_shocks=stock_shocks, seed=seed)


def rebalance(P, pi, c, vol_state, dt, z1, *, mu: float, r: float,
              floor: float | None = None):
    """One Euler step of the self-financing wealth dynamics.

    P' = P + (P*r + P*pi*(mu - r) + c)*dt + P*pi*sqrt(vol_state)*sqrt(dt)*z1.
    vol_state is the instantaneous variance (sigma_S**2 under constant
    volatility).  When floor is given the result is clamped below at it, which
    keeps the CRRA utility defined on every discretized path.  Accepts scalars
    or broadcastable arrays.
    """
    growth = (P * r + P * pi * (mu - r) + c) * dt
    noise = P * pi * np.sqrt(vol_state) * np.sqrt(dt) * z1
    out = P + growth + noise
    if floor is not None:
        out = np.maximum(out, floor)
    return float(out) if np.ndim(out) == 0 else out


def vol_state_at(states: StatePaths, m: MarketParams, step: int) -> np.ndarray:
    """Per-path instantaneous variance over step `step` (left endpoint)."""
    if states.variance is not None:
        return np.ascontiguousarray(states.variance[:, step])
    sigma = m.vol_spec.sigma_S
    return np.full(states.n_paths, sigma * sigma)


__all__ = [
    "FellerReport",
    "StatePaths",
    "validate_feller",
    "require_feller",
    "simulate_state_paths",
    "rebalance",
    "vol_state_at",
    "forward_seed_for",
    "splitmix64",
]
