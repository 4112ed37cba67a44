# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Maxwellian block kernel (see _fallback.py for the reference)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, pow

cnp.import_array()


def maxwellian_fill(double[::1] rho, double[:, ::1] u, double[::1] T,
                    double[:, ::1] vc):
    cdef Py_ssize_t m = rho.shape[0]
    cdef Py_ssize_t k = vc.shape[0]
    cdef Py_ssize_t d = vc.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((m, k))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t a, b, i
    cdef double pref, inv2T, q, diff
    cdef double two_pi = 2.0 * np.pi

    with nogil:
        for a in range(m):
            pref = rho[a] / pow(two_pi * T[a], 0.5 * d)
            inv2T = 0.5 / T[a]
            for b in range(k):
                q = 0.0
                for i in range(d):
                    diff = vc[b, i] - u[a, i]
                    q += diff * diff
                o[a, b] = pref * exp(-q * inv2T)
    return out
