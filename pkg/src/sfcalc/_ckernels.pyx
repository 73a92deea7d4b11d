# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled blade-table kernels. Signatures mirror ``_pykernels``."""
import numpy as np

ctypedef Py_ssize_t idx_t


def geometric_product(const double[::1] a, const double[::1] b,
                      const idx_t[:, ::1] idx, const double[:, ::1] sign):
    cdef idx_t m = a.shape[0]
    cdef idx_t i, j
    cdef double ai
    out = np.zeros(m)
    cdef double[::1] o = out
    for i in range(m):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(m):
            o[idx[i, j]] += sign[i, j] * ai * b[j]
    return out


def geometric_product_batch(const double[:, ::1] a, const double[:, ::1] b,
                            const idx_t[:, ::1] idx, const double[:, ::1] sign):
    cdef idx_t rows = a.shape[0]
    cdef idx_t m = a.shape[1]
    cdef idx_t r, i, j
    cdef double ai
    out = np.zeros((rows, m))
    cdef double[:, ::1] o = out
    for r in range(rows):
        for i in range(m):
            ai = a[r, i]
            if ai == 0.0:
                continue
            for j in range(m):
                o[r, idx[i, j]] += sign[i, j] * ai * b[r, j]
    return out


def left_matrix(const double[::1] a, const idx_t[:, ::1] idx, const double[:, ::1] sign):
    cdef idx_t m = a.shape[0]
    cdef idx_t i, j
    cdef double ai
    out = np.zeros((m, m))
    cdef double[:, ::1] o = out
    for i in range(m):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(m):
            o[idx[i, j], j] += sign[i, j] * ai
    return out


def right_matrix(const double[::1] a, const idx_t[:, ::1] idx, const double[:, ::1] sign):
    cdef idx_t m = a.shape[0]
    cdef idx_t i, j
    cdef double aj
    out = np.zeros((m, m))
    cdef double[:, ::1] o = out
    for j in range(m):
        aj = a[j]
        if aj == 0.0:
            continue
        for i in range(m):
            o[idx[i, j], i] += sign[i, j] * aj
    return out
