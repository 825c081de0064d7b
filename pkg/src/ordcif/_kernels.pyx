# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pool-adjacent-violators kernels.

Equal-weight isotonic regression onto the nondecreasing cone, for a single
vector and column-wise over a matrix.  The pure-Python module ``_kernels_py``
implements the identical algorithm (same comparisons, same divisions) so the
two backends produce bit-identical output.
"""

import numpy as np

BACKEND = "compiled"


cdef void _pava_column(const double* x, double* out, double* sums,
                       Py_ssize_t* counts, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t nb = 0, i, j, pos
    cdef double mean_prev, mean_last
    for i in range(k):
        sums[nb] = x[i]
        counts[nb] = 1
        nb += 1
        while nb > 1:
            mean_prev = sums[nb - 2] / counts[nb - 2]
            mean_last = sums[nb - 1] / counts[nb - 1]
            if mean_prev > mean_last:  # strict violation only; ties stay split
                sums[nb - 2] += sums[nb - 1]
                counts[nb - 2] += counts[nb - 1]
                nb -= 1
            else:
                break
    pos = 0
    for j in range(nb):
        mean_last = sums[j] / counts[j]
        for i in range(counts[j]):
            out[pos] = mean_last
            pos += 1


def pava_vector(double[::1] x):
    """Isotonic projection of a 1-d vector (equal weights)."""
    cdef Py_ssize_t k = x.shape[0]
    out_arr = np.empty(k, dtype=np.float64)
    sums_arr = np.empty(k, dtype=np.float64)
    counts_arr = np.empty(k, dtype=np.intp)
    cdef double[::1] out = out_arr
    cdef double[::1] sums = sums_arr
    cdef Py_ssize_t[::1] counts = counts_arr
    if k:
        _pava_column(&x[0], &out[0], &sums[0], &counts[0], k)
    return out_arr


def pava_matrix(double[:, ::1] x):
    """Column-wise isotonic projection of a (k, m) matrix."""
    cdef Py_ssize_t k = x.shape[0]
    cdef Py_ssize_t m = x.shape[1]
    out_arr = np.empty((k, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    col_arr = np.empty(k, dtype=np.float64)
    res_arr = np.empty(k, dtype=np.float64)
    sums_arr = np.empty(k, dtype=np.float64)
    counts_arr = np.empty(k, dtype=np.intp)
    cdef double[::1] col = col_arr
    cdef double[::1] res = res_arr
    cdef double[::1] sums = sums_arr
    cdef Py_ssize_t[::1] counts = counts_arr
    cdef Py_ssize_t i, j
    if k == 0 or m == 0:
        return out_arr
    with nogil:
        for j in range(m):
            for i in range(k):
                col[i] = x[i, j]
            _pava_column(&col[0], &res[0], &sums[0], &counts[0], k)
            for i in range(k):
                out[i, j] = res[i]
    return out_arr
