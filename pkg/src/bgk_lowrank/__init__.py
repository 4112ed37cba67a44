"""Interpolatory dynamical low-rank solvers for the Boltzmann-BGK equation."""

from bgk_lowrank._kernels import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
