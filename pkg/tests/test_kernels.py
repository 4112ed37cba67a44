import os
import subprocess
import sys

import numpy as np

from bgk_lowrank._kernels import KERNEL_BACKEND, maxwellian_fill
from bgk_lowrank._kernels._fallback import maxwellian_fill as numpy_fill


def _random_inputs(m, k, d, seed):
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.5, 2.0, m)
    u = rng.uniform(-1.0, 1.0, (m, d))
    T = rng.uniform(0.5, 2.0, m)
    vc = rng.uniform(-6.0, 6.0, (k, d))
    return rho, u, T, vc


def test_backend_name_is_known():
    assert KERNEL_BACKEND in ("cython", "numpy")


def test_selected_backend_matches_numpy_reference():
    for d in (1, 2, 3):
        rho, u, T, vc = _random_inputs(17, 23, d, seed=d)
        a = maxwellian_fill(rho, u, T, vc)
        b = numpy_fill(rho, u, T, vc)
        assert a.shape == (17, 23)
        assert np.abs(a - b).max() <= 1e-15 * np.abs(b).max()


def test_numpy_fill_against_scalar_formula():
    rho, u, T, vc = _random_inputs(5, 7, 2, seed=9)
    out = numpy_fill(rho, u, T, vc)
    for a in range(5):
        for b in range(7):
            q = ((vc[b] - u[a]) ** 2).sum()
            want = rho[a] / (2 * np.pi * T[a]) * np.exp(-q / (2 * T[a]))
            assert abs(out[a, b] - want) <= 1e-13 * want


def test_env_var_forces_numpy_backend():
    env = dict(os.environ, BGK_KERNELS="numpy")
    proc = subprocess.run(
        [sys.executable, "-c",
         "from bgk_lowrank._kernels import KERNEL_BACKEND; print(KERNEL_BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "numpy"
