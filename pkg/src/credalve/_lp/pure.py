"""Pure-Python simplex kernel for convex-combination feasibility.

Decides whether a target point is a convex combination of a finite set of
points by running a phase-1 simplex on the equality system

    sum_k  w_k * P[k]  =  target,      sum_k w_k = 1,      w_k >= 0,

minimising the sum of artificial variables.  Bland's rule is used for
anti-cycling, and the verdict is based on the per-coordinate residual of the
recovered weights, not on the phase-1 objective alone.

The compiled kernel in ``_speedups`` implements the same algorithm with the
same pivot order; both must return identical statuses on identical input.
"""

from __future__ import annotations

# Verdicts returned by solve_convex_weights.
COMBINATION = 0
NOT_COMBINATION = 1
ITERATION_LIMIT = 2

_PIVOT_EPS = 1e-12


def solve_convex_weights(points, target, tol, max_iter):
    """Return ``(status, weights)`` for the convex-combination system.

    ``points`` is a sequence of ``k`` coordinate sequences of length ``d``,
    ``target`` a coordinate sequence of length ``d``.  On status
    ``COMBINATION`` the weights list has length ``k``; otherwise it is empty.
    """
    k = len(points)
    d = len(target)
    if k == 0:
        return NOT_COMBINATION, []

    m = d + 1
    ncols = k + m + 1  # structural + artificial + rhs
    rhs_col = k + m
    tab = [0.0] * (m * ncols)

    for i in range(d):
        base = i * ncols
        ti = float(target[i])
        if ti < 0.0:
            for j in range(k):
                tab[base + j] = -float(points[j][i])
            tab[base + rhs_col] = -ti
        else:
            for j in range(k):
                tab[base + j] = float(points[j][i])
            tab[base + rhs_col] = ti
        tab[base + k + i] = 1.0
    base = d * ncols
    for j in range(k):
        tab[base + j] = 1.0
    tab[base + k + d] = 1.0
    tab[base + rhs_col] = 1.0

    basis = [k + i for i in range(m)]

    # Reduced-cost row for phase 1 with the artificial basis: cost 1 on the
    # artificials gives d_j = -sum_i tab[i][j] on every non-basic column.
    obj = [0.0] * (ncols)
    for j in range(ncols):
        s = 0.0
        for i in range(m):
            s += tab[i * ncols + j]
        obj[j] = -s
    for i in range(m):
        obj[k + i] = 0.0

    iters = 0
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
            # Unbounded phase-1 column cannot happen with artificials present,
            # treat as a numerical failure.
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

    weights = [0.0] * k
    for i in range(m):
        b = basis[i]
        if b < k:
            v = tab[i * ncols + rhs_col]
            weights[b] = v if v > 0.0 else 0.0

    total = 0.0
    for j in range(k):
        total += weights[j]
    if abs(total - 1.0) > tol:
        return NOT_COMBINATION, []
    for i in range(d):
        s = 0.0
        for j in range(k):
            s += weights[j] * float(points[j][i])
        if abs(s - float(target[i])) > tol:
            return NOT_COMBINATION, []
    return COMBINATION, weights
