"""Numba kernels for the backward sweep and the policy-driven forward pass.

Layout contracts:
  - per-step state columns (c_t, vol_t, z1_t) are contiguous 1-d float64
  - w tables are (n_r, n_nodes) wealth equivalents at the next step
  - s_out is (n_r, 3): per-path sums over the allocation grid of
    y, pi*y, pi^2*y with y the utility of the candidate score

Backward scoring evaluates each candidate transition at the path's shock and
at its sign-flipped mirror, averaging the two utilities.  The step shock is
symmetric, so this two-point quadrature leaves the regression target (the
conditional expected value of the move) unchanged while cancelling every
odd-in-shock sampling error; without it the fitted allocation inherits
O(1/sqrt(n_r)) noise that is far too large at practical path counts.  The
forward pass applies the single real shock, as a simulation must.

Every per-path write lands in that path's own slot and the only cross-path
reductions are integer counters, so kernel output is independent of the
thread count.  Utility evaluation dispatches on a small ucase code so the
hot loop stays free of pow() for the common risk-aversion values:
0: gamma=3, 1: gamma=2, 2: gamma=1.5, 3: gamma=0.5, 4: gamma=6, 5: general
(q = 1 - gamma passed alongside).
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_PAR = {"cache": True, "parallel": True, "fastmath": False}


@njit(cache=True, inline="always")
def _u(w, ucase, q):
    if ucase == 0:
        return -0.5 / (w * w)
    if ucase == 1:
        return -1.0 / w
    if ucase == 2:
        return -2.0 / np.sqrt(w)
    if ucase == 3:
        return 2.0 * np.sqrt(w)
    if ucase == 4:
        w2 = w * w
        return -0.2 / (w2 * w2 * w)
    return w ** q / q


@njit(cache=True, inline="always")
def _u_inv(y, ucase, q):
    if ucase == 0:
        return np.sqrt(-0.5 / y)
    if ucase == 1:
        return -1.0 / y
    if ucase == 2:
        return 4.0 / (y * y)
    if ucase == 3:
        return 0.25 * y * y
    if ucase == 4:
        return (-0.2 / y) ** 0.2
    return (q * y) ** (1.0 / q)


# Backward-sweep value lookups extrapolate linearly beyond the edge nodes.
# Clamping to the edge value instead flattens the value surface outside the
# grid, which erases the downside penalty of aggressive allocations at edge
# nodes and cascades through the narrow early-step grids; extrapolation in
# wealth-equivalent space is nearly exact there because the transformed
# value is close to linear in wealth.  Callers floor the result.
@njit(cache=True, inline="always")
def _interp_row(row, n_nodes, x):
    if n_nodes == 1:
        return row[0]
    if x <= 0.0:
        return row[0] + x * (row[1] - row[0])
    if x >= n_nodes - 1.0:
        return row[n_nodes - 1] + (x - (n_nodes - 1.0)) * (row[n_nodes - 1] - row[n_nodes - 2])
    k = int(x)
    return row[k] + (x - k) * (row[k + 1] - row[k])


@njit(cache=True, inline="always")
def _pi_hat(a, b, lo, hi):
    if a < 0.0:
        pi = -b / (2.0 * a)
        if pi < lo:
            return lo
        if pi > hi:
            return hi
        return pi
    if a * (hi + lo) + b > 0.0:
        return hi
    return lo


@njit(**_PAR)
def score_node(p_node, pi_pts, c_t, vol_t, z1_t, mu, r, dt, floor,
               w_next, pmin_next, inv_dp_next, terminal, ucase, q, s_out):
    """Candidate scores for one wealth node, reduced to pi-power moments.

    For each path j and grid allocation pi_i the one-step wealth
    p' = p + (p*r + p*pi*(mu-r) + c_j)*dt + p*pi*sqrt(vol_j)*sqrt(dt)*z_j
    is floored and scored (terminal utility, or utility of the interpolated
    next-step wealth equivalent); the score is averaged over z_j and -z_j
    (see module docstring) and accumulated into
    s_out[j] = (sum y, sum pi*y, sum pi^2*y).  Returns the floored count.
    """
    n_r = c_t.shape[0]
    n_pi = pi_pts.shape[0]
    n_nodes = w_next.shape[1]
    sqdt = np.sqrt(dt)
    floored = 0
    for j in prange(n_r):
        base = p_node + (p_node * r + c_t[j]) * dt
        drift = p_node * (mu - r) * dt
        shock = p_node * np.sqrt(vol_t[j]) * sqdt * z1_t[j]
        nflr = 0
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for i in range(n_pi):
            pi = pi_pts[i]
            wp = base + pi * (drift + shock)
            wm = base + pi * (drift - shock)
            if wp < floor:
                wp = floor
                nflr += 1
            if wm < floor:
                wm = floor
                nflr += 1
            if not terminal:
                wp = _interp_row(w_next[j], n_nodes, (wp - pmin_next) * inv_dp_next)
                if wp < floor:
                    wp = floor
                wm = _interp_row(w_next[j], n_nodes, (wm - pmin_next) * inv_dp_next)
                if wm < floor:
                    wm = floor
            y = 0.5 * (_u(wp, ucase, q) + _u(wm, ucase, q))
            s0 += y
            s1 += pi * y
            s2 += pi * pi * y
        s_out[j, 0] = s0
        s_out[j, 1] = s1
        s_out[j, 2] = s2
        floored += nflr
    return floored


@njit(**_PAR)
def apply_node(p_node, c_t, vol_t, z1_t, mu, r, dt, floor,
               a_coef, b0, bc, bn, lo, hi,
               w_next, pmin_next, inv_dp_next, terminal, ucase, q, w_out, col):
    """Re-score one wealth node at the fitted per-path optimal allocation.

    The fitted quadratic has curvature a_coef and per-path slope
    b = b0 + bc*c_j + bn*vol_j.  The realized value is the same two-point
    shock average used for scoring, stored as a wealth equivalent into
    w_out[:, col].  Returns the floored count.
    """
    n_r = c_t.shape[0]
    n_nodes = w_next.shape[1]
    sqdt = np.sqrt(dt)
    floored = 0
    for j in prange(n_r):
        b = b0 + bc * c_t[j] + bn * vol_t[j]
        pi = _pi_hat(a_coef, b, lo, hi)
        base = p_node + (p_node * r + c_t[j]) * dt
        drift = p_node * (mu - r) * dt
        shock = p_node * np.sqrt(vol_t[j]) * sqdt * z1_t[j]
        wp = base + pi * (drift + shock)
        wm = base + pi * (drift - shock)
        if wp < floor:
            wp = floor
            floored += 1
        if wm < floor:
            wm = floor
            floored += 1
        if not terminal:
            wp = _interp_row(w_next[j], n_nodes, (wp - pmin_next) * inv_dp_next)
            if wp < floor:
                wp = floor
            wm = _interp_row(w_next[j], n_nodes, (wm - pmin_next) * inv_dp_next)
            if wm < floor:
                wm = floor
        if wp == wm:
            w_out[j, col] = wp
        else:
            w_out[j, col] = _u_inv(0.5 * (_u(wp, ucase, q) + _u(wm, ucase, q)),
                                   ucase, q)
    return floored


@njit(**_PAR)
def forward_step(wealth, c_t, vol_t, nu_pol_t, z1_t, mu, r, dt, floor,
                 a_arr, b0_arr, bc_arr, bn_arr, pmin, inv_dp, lo, hi,
                 pi_out, wealth_out):
    """One forward step under the stored node policies.

    Each path's allocation blends the policies of the two wealth nodes
    bracketing its current wealth; outside the node range the closest node
    applies unblended and the path is counted.  The policy lookup reads
    nu_pol_t (the variance the decision maker believes in) while the wealth
    update uses vol_t (the variance the world actually follows); the two
    coincide except in regime-shift studies.  Returns (floored count,
    out-of-range count).
    """
    n_r = wealth.shape[0]
    n_nodes = a_arr.shape[0]
    sqdt = np.sqrt(dt)
    floored = 0
    out_of_range = 0
    for j in prange(n_r):
        cj = c_t[j]
        nuj = vol_t[j]
        nup = nu_pol_t[j]
        if n_nodes == 1:
            pi = _pi_hat(a_arr[0], b0_arr[0] + bc_arr[0] * cj + bn_arr[0] * nup,
                         lo, hi)
        else:
            x = (wealth[j] - pmin) * inv_dp
            if x < 0.0:
                pi = _pi_hat(a_arr[0], b0_arr[0] + bc_arr[0] * cj + bn_arr[0] * nup,
                             lo, hi)
                out_of_range += 1
            elif x >= n_nodes - 1.0:
                k = n_nodes - 1
                pi = _pi_hat(a_arr[k], b0_arr[k] + bc_arr[k] * cj + bn_arr[k] * nup,
                             lo, hi)
                if x > n_nodes - 1.0:
                    out_of_range += 1
            else:
                k = int(x)
                om = x - k
                pi_k = _pi_hat(a_arr[k], b0_arr[k] + bc_arr[k] * cj + bn_arr[k] * nup,
                               lo, hi)
                pi_k1 = _pi_hat(a_arr[k + 1],
                                b0_arr[k + 1] + bc_arr[k + 1] * cj + bn_arr[k + 1] * nup,
                                lo, hi)
                pi = (1.0 - om) * pi_k + om * pi_k1
        p = wealth[j]
        pw = p + (p * r + p * pi * (mu - r) + cj) * dt \
            + p * pi * np.sqrt(nuj) * sqdt * z1_t[j]
        if pw < floor:
            pw = floor
            floored += 1
        pi_out[j] = pi
        wealth_out[j] = pw
    return floored, out_of_range
