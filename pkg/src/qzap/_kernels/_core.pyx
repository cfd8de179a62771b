"""Compiled implementations of the two hot kernels.

Semantics match qzap._kernels._pure; see there for the index layout.
Both kernels fill ``out`` in place.
"""

from libc.math cimport fabs

NAME = "compiled"


def translation_sup(const double[:, ::1] values, Py_ssize_t window_len,
                    Py_ssize_t base_row, Py_ssize_t shift_row0,
                    const double[::1] weights, double[::1] out):
    cdef Py_ssize_t k, j, c
    cdef Py_ssize_t n_shifts = weights.shape[0]
    cdef Py_ssize_t dim = values.shape[1]
    cdef double w, diff, best
    for k in range(n_shifts):
        w = weights[k]
        best = 0.0
        for j in range(window_len):
            for c in range(dim):
                diff = fabs(w * values[shift_row0 + k + j, c]
                            - values[base_row + j, c])
                if diff > best:
                    best = diff
        out[k] = best


def trunc_conv(const double[::1] decay, const double[::1] g, Py_ssize_t tail,
               double[::1] out):
    cdef Py_ssize_t k, d
    cdef Py_ssize_t n = out.shape[0]
    cdef double acc, w
    for k in range(n):
        acc = 0.0
        w = 1.0
        for d in range(1, tail + 1):
            if d > 1:
                w = w * decay[tail + k - d + 1]
            acc = acc + w * g[tail + k - d]
        out[k] = acc
