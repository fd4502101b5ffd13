# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-Python simplex kernel.

Same algorithm, same pivot order, same statuses as ``credalve._lp.pure``;
only the arithmetic is done on typed C buffers.  Keep the two in lockstep.
"""

import numpy as np

COMBINATION = 0
NOT_COMBINATION = 1
ITERATION_LIMIT = 2

cdef double _PIVOT_EPS = 1e-12


def solve_convex_weights(double[:, ::1] points, double[::1] target,
                         double tol, int max_iter):
    cdef Py_ssize_t k = points.shape[0]
    cdef Py_ssize_t d = target.shape[0]
    if k == 0:
        return NOT_COMBINATION, []

    cdef Py_ssize_t m = d + 1
    cdef Py_ssize_t ncols = k + m + 1
    cdef Py_ssize_t rhs_col = k + m

    tab_arr = np.zeros(m * ncols, dtype=np.float64)
    obj_arr = np.zeros(ncols, dtype=np.float64)
    basis_arr = np.zeros(m, dtype=np.intp)
    cdef double[::1] tab = tab_arr
    cdef double[::1] obj = obj_arr
    cdef Py_ssize_t[::1] basis = basis_arr

    cdef Py_ssize_t i, j, base, row, piv_base, enter, leave
    cdef double ti, s, a, ratio, best, piv, inv, f, v, total
    cdef long iters = 0

    for i in range(d):
        base = i * ncols
        ti = target[i]
        if ti < 0.0:
            for j in range(k):
                tab[base + j] = -points[j, i]
            tab[base + rhs_col] = -ti
        else:
            for j in range(k):
                tab[base + j] = points[j, i]
            tab[base + rhs_col] = ti
        tab[base + k + i] = 1.0
    base = d * ncols
    for j in range(k):
        tab[base + j] = 1.0
    tab[base + k + d] = 1.0
    tab[base + rhs_col] = 1.0

    for i in range(m):
        basis[i] = k + i

    for j in range(ncols):
        s = 0.0
        for i in range(m):
            s += tab[i * ncols + j]
        obj[j] = -s
    for i in range(m):
        obj[k + i] = 0.0

    while True:
        enter = -1
        for j in range(k + m):
            if obj[j] < -_PIVOT_EPS:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = 0.0
        for i in range(m):
            a = tab[i * ncols + enter]
            if a > _PIVOT_EPS:
                ratio = tab[i * ncols + rhs_col] / a
                # Exact tie comparison keeps the anti-cycling argument valid.
                if leave < 0 or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    leave = i
                    best = ratio
        if leave < 0:
            return ITERATION_LIMIT, []

        piv_base = leave * ncols
        piv = tab[piv_base + enter]
        inv = 1.0 / piv
        for j in range(ncols):
            tab[piv_base + j] *= inv
        for i in range(m):
            if i == leave:
                continue
            f = tab[i * ncols + enter]
            if f != 0.0:
                row = i * ncols
                for j in range(ncols):
                    tab[row + j] -= f * tab[piv_base + j]
        f = obj[enter]
        if f != 0.0:
            for j in range(ncols):
                obj[j] -= f * tab[piv_base + j]
        basis[leave] = enter

        iters += 1
        if iters > max_iter:
            return ITERATION_LIMIT, []

    weights_arr = np.zeros(k, dtype=np.float64)
    cdef double[::1] weights = weights_arr
    for i in range(m):
        if basis[i] < k:
            v = tab[i * ncols + rhs_col]
            weights[basis[i]] = v if v > 0.0 else 0.0

    total = 0.0
    for j in range(k):
        total += weights[j]
    if total - 1.0 > tol or 1.0 - total > tol:
        return NOT_COMBINATION, []
    for i in range(d):
        s = 0.0
        for j in range(k):
            s += weights[j] * points[j, i]
        a = s - target[i]
        if a > tol or -a > tol:
            return NOT_COMBINATION, []
    return COMBINATION, weights_arr.tolist()
