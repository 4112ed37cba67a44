"""Scalar and field observables for low-rank kinetic states."""

from dataclasses import dataclass

import numpy as np

from bgk_lowrank.bgk import compute_moments
from bgk_lowrank.grid import integrate, spectral_derivative
from bgk_lowrank.lowrank import evaluate


@dataclass(frozen=True)
class FieldSnapshot:
    name: str
    time: float
    shape: tuple
    values: np.ndarray  # flat, row-major

    def __post_init__(self):
        if self.values.size != int(np.prod(self.shape)):
            raise ValueError("value count must equal the grid size")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite field values")


def density(state, params):
    """Density field without positivity checks (diagnostic path)."""
    w = params.v_grid.weight
    return (state.X @ state.S) @ (w * state.V.sum(axis=0))


def mass(state, params):
    return integrate(density(state, params), params.x_grid)


def momentum_energy(state, params):
    """Total momentum per velocity direction and total energy."""
    m = compute_moments(state, params, check=False)
    w = params.x_grid.weight
    momentum = w * (m.rho * m.u).sum(axis=1)
    energy = 0.5 * w * float(
        (m.rho * ((m.u**2).sum(axis=0) + params.d_v * m.T)).sum()
    )
    return momentum, energy


def vorticity(moments, x_grid, time=0.0):
    """Curl of the bulk velocity: one scalar field in 2d, three in 3d."""
    if x_grid.ndim == 2:
        w = spectral_derivative(moments.u[1], x_grid, 0) - spectral_derivative(
            moments.u[0], x_grid, 1
        )
        return [FieldSnapshot("vorticity", time, x_grid.shape, w)]
    if x_grid.ndim == 3:
        d = lambda f, i: spectral_derivative(f, x_grid, i)
        comps = [
            d(moments.u[2], 1) - d(moments.u[1], 2),
            d(moments.u[0], 2) - d(moments.u[2], 0),
            d(moments.u[1], 0) - d(moments.u[0], 1),
        ]
        return [
            FieldSnapshot(f"vorticity_{i + 1}", time, x_grid.shape, c)
            for i, c in enumerate(comps)
        ]
    raise ValueError("vorticity requires a 2d or 3d spatial grid")


def l2_error(state, reference, params, block=1024):
    """Quadrature-weighted L2 distance to a dense reference, streamed over
    column blocks to cap peak memory."""
    N_x, N_v = state.shape
    if reference.shape != (N_x, N_v):
        raise ValueError(f"reference shape {reference.shape} != {(N_x, N_v)}")
    XS = state.X @ state.S
    acc = 0.0
    for j0 in range(0, N_v, block):
        j1 = min(j0 + block, N_v)
        diff = XS @ state.V[j0:j1, :].T - reference[:, j0:j1]
        acc += float((diff * diff).sum())
    return np.sqrt(params.x_grid.weight * params.v_grid.weight * acc)


def field_slice(field, x_grid, fixed):
    """Sub-field at fixed coordinates: fixed maps axis index -> coordinate,
    resolved to the nearest grid point.  Returns (snapshot_values, kept_axes,
    chosen_indices)."""
    vals = np.asarray(field).reshape(x_grid.shape)
    chosen = {}
    index = [slice(None)] * x_grid.ndim
    for ax, coord in fixed.items():
        if ax < 0 or ax >= x_grid.ndim:
            raise ValueError(f"axis {ax} out of range")
        k = int(np.argmin(np.abs(x_grid.axes[ax].points - coord)))
        chosen[ax] = k
        index[ax] = k
    kept = [i for i in range(x_grid.ndim) if i not in fixed]
    return vals[tuple(index)].ravel(), kept, chosen


def field_marginal(field, x_grid, over_axes):
    """Integrate a field over the named axes with quadrature weights."""
    over = sorted(set(over_axes))
    for ax in over:
        if ax < 0 or ax >= x_grid.ndim:
            raise ValueError(f"axis {ax} out of range")
    vals = np.asarray(field).reshape(x_grid.shape)
    w = float(np.prod([x_grid.axes[ax].spacing for ax in over])) if over else 1.0
    out = vals.sum(axis=tuple(over)) * w if over else vals
    kept = [i for i in range(x_grid.ndim) if i not in over]
    return out.ravel(), kept


def slice_or_marginal(field, x_grid, spec, time=0.0, name="field"):
    """Dispatch on spec = {"kind": "slice", "fixed": {axis: coord}} or
    {"kind": "marginal", "over": [axes]}."""
    if spec.get("kind") == "slice":
        vals, kept, chosen = field_slice(field, x_grid, spec["fixed"])
        shape = tuple(x_grid.shape[i] for i in kept) or (1,)
        tag = ",".join(f"x{a + 1}@{k}" for a, k in sorted(chosen.items()))
        return FieldSnapshot(f"{name}[{tag}]", time, shape, np.atleast_1d(vals))
    if spec.get("kind") == "marginal":
        vals, kept = field_marginal(field, x_grid, spec["over"])
        shape = tuple(x_grid.shape[i] for i in kept) or (1,)
        return FieldSnapshot(f"{name}-marginal", time, shape, np.atleast_1d(vals))
    raise ValueError(f"invalid slice/marginal spec: {spec!r}")


def dense_l2_error(f, reference, params):
    """Weighted L2 distance between two dense states (reference solver path)."""
    diff = np.asarray(f) - np.asarray(reference)
    return np.sqrt(params.x_grid.weight * params.v_grid.weight * float((diff**2).sum()))
