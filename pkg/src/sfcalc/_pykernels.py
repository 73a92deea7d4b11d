"""Numpy fallback for the blade-table kernels.

``idx[i, j]`` is the blade index of ``e_i e_j`` and ``sign[i, j]`` its sign.
"""
import numpy as np


def geometric_product(a, b, idx, sign):
    m = a.shape[0]
    return np.bincount(idx.ravel(), weights=(sign * np.outer(a, b)).ravel(), minlength=m)


def geometric_product_batch(a, b, idx, sign):
    rows, m = a.shape
    terms = sign[None, :, :] * a[:, :, None] * b[:, None, :]
    flat = (idx[None, :, :] + m * np.arange(rows)[:, None, None]).ravel()
    return np.bincount(flat, weights=terms.ravel(), minlength=rows * m).reshape(rows, m)


def left_matrix(a, idx, sign):
    m = a.shape[0]
    out = np.zeros((m, m))
    cols = np.broadcast_to(np.arange(m)[None, :], (m, m))
    np.add.at(out, (idx, cols), sign * a[:, None])
    return out


def right_matrix(a, idx, sign):
    m = a.shape[0]
    out = np.zeros((m, m))
    cols = np.broadcast_to(np.arange(m)[:, None], (m, m))
    np.add.at(out, (idx, cols), sign * a[None, :])
    return out
