"""Periodic tensor-product grids with Fourier pseudospectral derivatives.

Both position and velocity space use the same discretization: uniform
left-closed right-open grids per axis, periodic trapezoid quadrature and
FFT-based differentiation.  Flattening is row-major with the last axis
fastest; every matrix of grid functions in this package follows that
convention.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Axis:
    """One periodic axis: points x_k = lower + k*(upper-lower)/n."""

    lower: float
    upper: float
    n: int
    points: np.ndarray = field(repr=False)
    spacing: float = 0.0
    wavenumbers: np.ndarray = field(repr=False, default=None)

    @property
    def weight(self):
        """Quadrature weight per point (periodic trapezoid)."""
        return self.spacing

    @cached_property
    def deriv_coeffs(self):
        """i*k spectral multipliers with the Nyquist mode zeroed."""
        c = 1j * self.wavenumbers.copy()
        c[self.n // 2] = 0.0
        return c


def make_axis(lower, upper, n):
    """Build a periodic axis; n must be even and >= 2."""
    if upper <= lower:
        raise ValueError(f"axis upper bound {upper} must exceed lower {lower}")
    if n < 2 or n % 2 != 0:
        raise ValueError(f"axis point count must be even and >= 2, got {n}")
    length = upper - lower
    spacing = length / n
    points = lower + spacing * np.arange(n)
    wavenumbers = 2.0 * np.pi / length * np.fft.fftfreq(n, d=1.0 / n)
    return Axis(float(lower), float(upper), int(n), points, spacing, wavenumbers)


class ProductGrid:
    """Tensor product of periodic axes with flat row-major indexing."""

    def __init__(self, axes):
        self.axes = tuple(axes)
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        self.shape = tuple(ax.n for ax in self.axes)
        self.size = int(np.prod(self.shape))
        self.ndim = len(self.axes)
        # uniform grids: the flat quadrature weight is one scalar
        self.weight = float(np.prod([ax.spacing for ax in self.axes]))
        self._coords = {}

    def flat_index(self, multi):
        return int(np.ravel_multi_index(multi, self.shape))

    def multi_index(self, flat):
        return tuple(int(i) for i in np.unravel_index(flat, self.shape))

    def coordinate(self, axis_index):
        """Flat array (length size) of the axis coordinate at every grid point."""
        if axis_index not in self._coords:
            pts = self.axes[axis_index].points
            view = pts.reshape(
                [-1 if i == axis_index else 1 for i in range(self.ndim)]
            )
            self._coords[axis_index] = np.broadcast_to(view, self.shape).ravel()
        return self._coords[axis_index]

    def coordinates(self, flat_indices=None):
        """(N, ndim) coordinate matrix, optionally restricted to flat indices."""
        cols = [self.coordinate(i) for i in range(self.ndim)]
        if flat_indices is not None:
            cols = [c[flat_indices] for c in cols]
        return np.ascontiguousarray(np.stack(cols, axis=1))


def spectral_derivative(values, grid, axis_index):
    """Column-wise partial derivative along one grid axis via FFT.

    values is (N,) or (N, r) with N = grid.size; the imaginary residue of
    the inverse transform is discarded.
    """
    if axis_index >= grid.ndim:
        raise ValueError(f"axis_index {axis_index} out of range for {grid.ndim}d grid")
    vals = np.asarray(values, dtype=float)
    flat_in = vals.ndim == 1
    if flat_in:
        vals = vals[:, None]
    if vals.shape[0] != grid.size:
        raise ValueError(f"expected {grid.size} rows, got {vals.shape[0]}")
    r = vals.shape[1]
    work = vals.reshape(grid.shape + (r,))
    spec = np.fft.fft(work, axis=axis_index)
    coeffs = grid.axes[axis_index].deriv_coeffs.reshape(
        [-1 if i == axis_index else 1 for i in range(grid.ndim + 1)]
    )
    out = np.fft.ifft(spec * coeffs, axis=axis_index).real
    out = out.reshape(grid.size, r)
    return out[:, 0] if flat_in else out


def integrate(values, grid):
    """Quadrature of a flat grid function: weight * sum."""
    vals = np.asarray(values)
    if vals.shape[0] != grid.size:
        raise ValueError(f"expected {grid.size} values, got {vals.shape[0]}")
    return grid.weight * float(vals.sum())
