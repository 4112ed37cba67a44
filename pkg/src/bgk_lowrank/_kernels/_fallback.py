"""Pure-numpy implementation of the Maxwellian block kernel."""

import numpy as np


def maxwellian_fill(rho, u, T, vc):
    """Evaluate the local-equilibrium Gaussian on a block of phase space.

    Parameters
    ----------
    rho : (m,) densities
    u : (m, d) bulk velocities
    T : (m,) temperatures
    vc : (k, d) velocity coordinates

    Returns the (m, k) matrix with entries
    rho_a / (2 pi T_a)^(d/2) * exp(-sum_i (vc_bi - u_ai)^2 / (2 T_a)).
    """
    d = vc.shape[1]
    pref = rho / (2.0 * np.pi * T) ** (0.5 * d)
    inv2T = 0.5 / T
    q = np.zeros((rho.shape[0], vc.shape[0]))
    for i in range(d):
        diff = vc[None, :, i] - u[:, None, i]
        q += diff * diff
    return pref[:, None] * np.exp(-q * inv2T[:, None])
