# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels; see ``_pykernels`` for the reference versions."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t idx_t


def reverse_reach(const idx_t[::1] indptr, const idx_t[::1] indices, const idx_t[::1] sources):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t ns = sources.shape[0]
    cdef idx_t[::1] stamp = np.full(n, -1, dtype=np.int64)
    cdef idx_t[::1] stack = np.empty(max(n, 1), dtype=np.int64)
    counts_arr = np.zeros(ns, dtype=np.int64)
    mask_arr = np.zeros(n, dtype=np.uint8)
    cdef idx_t[::1] counts = counts_arr
    cdef cnp.uint8_t[::1] mask = mask_arr
    cdef Py_ssize_t k, top, j
    cdef idx_t u, v, src, found
    with nogil:
        for k in range(ns):
            src = sources[k]
            stamp[src] = k
            stack[0] = src
            top = 1
            found = 0
            while top > 0:
                top -= 1
                u = stack[top]
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if stamp[v] != k:
                        stamp[v] = k
                        mask[v] = 1
                        found += 1
                        stack[top] = v
                        top += 1
            counts[k] = found
    return counts_arr, mask_arr


def pagerank(const idx_t[::1] indptr, const idx_t[::1] indices, double damping, int max_iter, double tol):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    if n == 0:
        return np.zeros(0), 0, True
    x_arr = np.full(n, 1.0 / n)
    new_arr = np.empty(n)
    cdef double[::1] x = x_arr
    cdef double[::1] new = new_arr
    cdef double[::1] tmp
    cdef Py_ssize_t i, j, deg
    cdef int it
    cdef double dangling, share, base, err, d
    for it in range(1, max_iter + 1):
        with nogil:
            dangling = 0.0
            for i in range(n):
                new[i] = 0.0
            for i in range(n):
                deg = indptr[i + 1] - indptr[i]
                if deg == 0:
                    dangling += x[i]
                else:
                    share = x[i] / deg
                    for j in range(indptr[i], indptr[i + 1]):
                        new[indices[j]] += share
            base = (damping * dangling + (1.0 - damping)) / n
            err = 0.0
            for i in range(n):
                new[i] = damping * new[i] + base
                d = new[i] - x[i]
                err += d if d >= 0 else -d
        x_arr, new_arr = new_arr, x_arr
        tmp = x
        x = new
        new = tmp
        if err < tol:
            return x_arr, it, True
    return x_arr, max_iter, False
