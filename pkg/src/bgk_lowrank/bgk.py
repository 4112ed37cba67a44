"""Boltzmann-BGK right-hand side: moments, discrete Maxwellian, and
row/column/block-restricted evaluations of

    h = -sum_i D_{x_i} f * diag(v_i) + (1/eps) (M(f) - f)

at O(r * n^d) cost per call.
"""

from dataclasses import dataclass

import numpy as np

from bgk_lowrank._kernels import maxwellian_fill
from bgk_lowrank.grid import spectral_derivative
from bgk_lowrank.lowrank import _as_indices

COLLISIONLESS = None  # epsilon sentinel disabling the collision term


class PositivityError(ValueError):
    """Density or temperature at or below the floor; carries the location."""

    def __init__(self, quantity, index, value):
        self.quantity = quantity
        self.index = index
        self.value = value
        super().__init__(f"{quantity} = {value:.3e} at flat x-index {index}")


@dataclass(frozen=True)
class Moments:
    """Density, bulk velocity (d_v, N) and temperature fields over x."""

    rho: np.ndarray
    u: np.ndarray
    T: np.ndarray


@dataclass(frozen=True)
class BgkParams:
    x_grid: object
    v_grid: object
    epsilon: float = 1.0  # None disables collisions entirely
    positivity: str = "error"  # "error" | "clamp"
    rho_floor: float = 1e-12
    T_floor: float = 1e-12

    @property
    def d_x(self):
        return self.x_grid.ndim

    @property
    def d_v(self):
        return self.v_grid.ndim

    @property
    def collisionless(self):
        return self.epsilon is COLLISIONLESS


def _guard_positive(values, floor, name, params):
    i = int(np.argmin(values))
    if values[i] <= floor:
        if params.positivity == "clamp":
            return np.maximum(values, floor)
        raise PositivityError(name, i, float(values[i]))
    return values


def compute_moments(state, params, x_rows=None, check=True):
    """Moment fields of the factored state per the rank-r quadrature forms.

    With x_rows given, X is row-restricted first; fields then have length
    |x_rows|.  Cost O(r (N_x + N_v) d_v).
    """
    rows = _as_indices(x_rows)
    X = state.X if rows is None else state.X[rows, :]
    V, S = state.V, state.S
    vg = params.v_grid
    w = vg.weight
    d = params.d_v

    XS = X @ S
    c0 = w * V.sum(axis=0)
    rho = XS @ c0
    if check:
        rho = _guard_positive(rho, params.rho_floor, "density", params)

    mom = np.empty((d, rho.size))
    esum = np.zeros(rho.size)
    for i in range(d):
        vi = vg.coordinate(i)
        mom[i] = XS @ (w * (V.T @ vi))
        esum += XS @ (w * (V.T @ (vi * vi)))
    u = mom / rho
    T = (esum - np.einsum("in,in->n", u, mom)) / (d * rho)
    if check:
        T = _guard_positive(T, params.T_floor, "temperature", params)
    return Moments(rho=rho, u=u, T=T)


def moments_dense(f, params, check=True):
    """Moments of a dense N_x x N_v state by direct quadrature."""
    vg = params.v_grid
    w = vg.weight
    d = params.d_v
    rho = w * f.sum(axis=1)
    if check:
        rho = _guard_positive(rho, params.rho_floor, "density", params)
    mom = np.empty((d, rho.size))
    esum = np.zeros(rho.size)
    for i in range(d):
        vi = vg.coordinate(i)
        mom[i] = w * (f @ vi)
        esum += w * (f @ (vi * vi))
    u = mom / rho
    T = (esum - np.einsum("in,in->n", u, mom)) / (d * rho)
    if check:
        T = _guard_positive(T, params.T_floor, "temperature", params)
    return Moments(rho=rho, u=u, T=T)


def maxwellian_block(m, params, v_cols=None):
    """Discrete Maxwellian block for the given moments.

    Row a, column b: rho_a / (2 pi T_a)^(d_v/2)
    * exp(-sum_i (v_i^(b) - u_{i,a})^2 / (2 T_a)).
    """
    cols = _as_indices(v_cols)
    vc = params.v_grid.coordinates(cols)
    out = maxwellian_fill(
        np.ascontiguousarray(m.rho, dtype=float),
        np.ascontiguousarray(m.u.T, dtype=float),
        np.ascontiguousarray(m.T, dtype=float),
        vc,
    )
    if not np.all(np.isfinite(out)):
        bad = np.argwhere(~np.isfinite(out))[0]
        raise FloatingPointError(f"non-finite Maxwellian entry at block {tuple(bad)}")
    return out


def _transport_factors(state, params):
    """(D_{x_i} X) S for each spatial direction, computed on the full x-grid."""
    return [
        spectral_derivative(state.X, params.x_grid, i) @ state.S
        for i in range(params.d_x)
    ]


def _transport_block(state, params, rows, cols):
    dxs = _transport_factors(state, params)
    out = 0.0
    for i in range(params.d_x):
        vi = params.v_grid.coordinate(i)
        Vc = state.V if cols is None else state.V[cols, :]
        vic = vi if cols is None else vi[cols]
        D = dxs[i] if rows is None else dxs[i][rows, :]
        out = out - D @ (Vc * vic[:, None]).T
    return out


def rhs_cols(state, params, J):
    """h restricted to velocity columns J; shape N_x x |J|."""
    cols = _as_indices(J)
    out = _transport_block(state, params, None, cols)
    if not params.collisionless:
        m = compute_moments(state, params)
        Vc = state.V[cols, :]
        fblock = (state.X @ state.S) @ Vc.T
        out = out + (maxwellian_block(m, params, cols) - fblock) / params.epsilon
    return out


def rhs_rows(state, params, I):
    """h restricted to spatial rows I; shape |I| x N_v."""
    rows = _as_indices(I)
    out = _transport_block(state, params, rows, None)
    if not params.collisionless:
        m = compute_moments(state, params, x_rows=rows)
        fblock = (state.X[rows, :] @ state.S) @ state.V.T
        out = out + (maxwellian_block(m, params) - fblock) / params.epsilon
    return out


def rhs_block(state, params, I, J):
    """h restricted to rows I and columns J; shape |I| x |J|."""
    rows = _as_indices(I)
    cols = _as_indices(J)
    out = _transport_block(state, params, rows, cols)
    if not params.collisionless:
        m = compute_moments(state, params, x_rows=rows)
        fblock = (state.X[rows, :] @ state.S) @ state.V[cols, :].T
        out = out + (maxwellian_block(m, params, cols) - fblock) / params.epsilon
    return out


def rhs_full(f, params):
    """h on a dense N_x x N_v state (reference solver path)."""
    f = np.asarray(f, dtype=float)
    out = 0.0
    for i in range(params.d_x):
        df = spectral_derivative(f, params.x_grid, i)
        out = out - df * params.v_grid.coordinate(i)[None, :]
    if not params.collisionless:
        m = moments_dense(f, params)
        out = out + (maxwellian_block(m, params) - f) / params.epsilon
    return out
