"""Shared fixtures and independently-coded oracles."""

import numpy as np
import pytest

from bgk_lowrank.bgk import BgkParams
from bgk_lowrank.grid import ProductGrid, make_axis
from bgk_lowrank.lowrank import LowRankState


def deim_literal(M):
    """Step-by-step greedy selection coded straight from the algorithm
    statement, with dense solves; used as the reference for the library's
    implementation."""
    M = np.asarray(M, dtype=float)
    n, r = M.shape
    l = [int(np.argmax(np.abs(M[:, 0])))]
    for j in range(1, r):
        m = M[:, j]
        c = np.linalg.solve(M[np.array(l), :j], m[np.array(l)])
        resid = m - M[:, :j] @ c
        l.append(int(np.argmax(np.abs(resid))))
    return np.array(l)


def random_orthonormal(n, r, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return Q


def uniform_maxwellian_state(x_grid, v_grid, rho=1.0, u=None, T=1.0):
    """Spatially uniform Maxwellian as an orthonormal rank-1 state."""
    d = v_grid.ndim
    u = np.zeros(d) if u is None else np.asarray(u, dtype=float)
    gv = np.full(v_grid.size, rho / (2.0 * np.pi * T) ** (0.5 * d))
    for i in range(d):
        gv = gv * np.exp(-((v_grid.coordinate(i) - u[i]) ** 2) / (2.0 * T))
    X = np.ones((x_grid.size, 1)) / np.sqrt(x_grid.size)
    nv = np.linalg.norm(gv)
    S = np.array([[np.sqrt(x_grid.size) * nv]])
    return LowRankState(X, S, (gv / nv)[:, None],
                        x_orthonormal=True, v_orthonormal=True)


@pytest.fixture
def grid_1d1v_32():
    xg = ProductGrid([make_axis(-6, 6, 32)])
    vg = ProductGrid([make_axis(-6, 6, 32)])
    return xg, vg


@pytest.fixture
def params_1d1v_32(grid_1d1v_32):
    xg, vg = grid_1d1v_32
    return BgkParams(xg, vg, epsilon=1.0)
