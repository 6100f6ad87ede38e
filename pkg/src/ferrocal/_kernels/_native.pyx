# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels; see _pure.py for the reference semantics.

Deterministic thresholds make repeated identical pulses idempotent, so one
fused reset+write pass per grid point reproduces the full pulse train
exactly; both backends rely on this and stay bit-identical.
"""

import numpy as np

from libc.stdint cimport uint8_t


def protocol_sweep(double[::1] vth_reset, double[::1] vth_write, uint8_t[::1] down,
                   double reset_amp, int reset_count, int write_count,
                   double[::1] vp_grid):
    cdef Py_ssize_t n = vth_reset.shape[0]
    cdef Py_ssize_t ngrid = vp_grid.shape[0]
    frac_arr = np.empty(ngrid, dtype=np.float64)
    cdef double[::1] frac = frac_arr
    cdef bint do_reset = reset_count > 0
    cdef bint do_write = write_count > 0
    cdef Py_ssize_t g, i
    cdef long cnt
    cdef double vp
    cdef uint8_t b
    with nogil:
        for g in range(ngrid):
            vp = vp_grid[g]
            cnt = 0
            for i in range(n):
                b = down[i]
                if do_reset:
                    b = b & (vth_reset[i] > reset_amp)
                if do_write:
                    b = b | (vth_write[i] <= vp)
                down[i] = b
                cnt += b
            frac[g] = (<double>cnt) / (<double>n)
    return frac_arr


def monotone_keep_mask(double[::1] values, double margin, bint accept_equal):
    cdef Py_ssize_t n = values.shape[0]
    keep_arr = np.zeros(n, dtype=bool)
    cdef uint8_t[::1] keep = keep_arr.view(np.uint8)
    cdef Py_ssize_t i
    cdef double last, d
    if n == 0:
        return keep_arr
    keep[0] = 1
    last = values[0]
    with nogil:
        for i in range(1, n):
            d = values[i] - last
            if d > margin or (accept_equal and d == margin):
                keep[i] = 1
                last = values[i]
    return keep_arr
