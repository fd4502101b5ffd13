"""Convex-geometry kernel: membership in a convex hull and vertex filtering.

Redundancy elimination keeps exactly the points of a finite set that are not
convex combinations of the remaining points, i.e. the vertices of the set's
convex hull.  Membership is decided by a self-contained phase-1 simplex on
the equality system with the simplex constraint (see ``credalve._lp``).

Coordinates where neither the candidate point nor any other point carries
mass beyond half the tolerance are dropped before the solve: for convex
weights the reachable value on such a coordinate is bounded by the largest
magnitude present, so the dropped rows can never violate the per-coordinate
tolerance.  This keeps the tableau small on the sparse high-dimensional
point sets produced by deterministic network fragments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _lp

DEFAULT_TOL = 1e-9
DEDUP_EPS = 1e-12
MAX_PIVOTS = 10_000


class LpIterationError(RuntimeError):
    """The simplex hit its pivot cap; reported distinctly from 'not a combination'."""


@dataclass(frozen=True)
class PointSet:
    """A finite list of points of uniform dimension."""

    dimension: int
    points: np.ndarray  # shape (n, dimension)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise ValueError("points must be a 2-d array matching the dimension")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def _as_points(points) -> np.ndarray:
    if isinstance(points, PointSet):
        arr = points.points
    else:
        arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d array of points")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


def is_convex_combination(point, others, tol: float = DEFAULT_TOL):
    """Test whether ``point`` is a convex combination of ``others``.

    Returns ``(True, weights)`` with the mixing weights on success and
    ``(False, None)`` otherwise.  Raises :class:`LpIterationError` on a
    simplex pivot-cap failure, which is reported distinctly from a plain
    negative answer.
    """
    p = np.asarray(point, dtype=np.float64).reshape(-1)
    pts = _as_points(others)
    if pts.shape[0] == 0:
        raise ValueError("others must be nonempty")
    if pts.shape[1] != p.shape[0]:
        raise ValueError("dimension mismatch between point and others")

    col_max = np.max(np.abs(pts), axis=0)
    absp = np.abs(p)
    # Any convex combination is bounded per coordinate by col_max.
    if np.any(absp - col_max > tol):
        return False, None
    keep = (col_max > 0.5 * tol) | (absp > 0.5 * tol)
    if not np.any(keep):
        # Everything is within tolerance of the origin.
        w = np.zeros(pts.shape[0])
        w[0] = 1.0
        return True, w

    reduced = np.ascontiguousarray(pts[:, keep])
    target = p[keep]
    status, weights = _lp.solve(reduced, target, tol, MAX_PIVOTS)
    if status == _lp.ITERATION_LIMIT:
        # Heavily degenerate systems can stall; a deterministic rhs jitter
        # far below the tolerance breaks the ties without moving the verdict.
        jitter = tol * 1e-3 * np.cos(np.arange(1, target.shape[0] + 1))
        status, weights = _lp.solve(reduced, target + jitter, tol, MAX_PIVOTS)
        if status == _lp.ITERATION_LIMIT:
            raise LpIterationError("simplex exceeded the pivot cap")
    if status == _lp.NOT_COMBINATION:
        return False, None
    return True, np.asarray(weights, dtype=np.float64)


def deduplicate(points, eps: float = DEDUP_EPS) -> tuple[np.ndarray, list[int]]:
    """Merge points equal within ``eps`` in max-norm, keeping first occurrences.

    Returns the kept rows and their original indices.  Exact duplicates (the
    common case for product-structured candidate sets) are collapsed in one
    vectorised pass; the tolerance comparison then runs incrementally against
    the stack of survivors.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n <= 1:
        return pts, list(range(n))
    _, first = np.unique(pts, axis=0, return_index=True)
    order = sorted(int(i) for i in first)
    sub = pts[order]
    kept: list[int] = [0]
    for pos in range(1, sub.shape[0]):
        gaps = np.abs(sub[kept] - sub[pos]).max(axis=1)
        if gaps.min() > eps:
            kept.append(pos)
    return sub[kept], [order[i] for i in kept]


def redundancy_eliminate_indices(
    points, tol: float = DEFAULT_TOL, dedup_eps: float = DEDUP_EPS
) -> list[int]:
    """Indices (input order) of the points surviving redundancy elimination.

    Near-duplicates are merged first (first occurrence wins).  The survivors
    are the vertices of the set's convex hull, computed in two passes: a
    prefilter drops points already inside the hull of the tentative set (a
    subset of the full hull, so dropping is always sound), then the exact
    point-against-all-others sweep runs on the remainder.  The result equals
    the plain one-pass sweep; the prefilter only bounds the size of the
    linear programs on candidate-heavy inputs.
    """
    pts = _as_points(points)
    if pts.shape[0] == 0:
        raise ValueError("points must be nonempty")
    deduped, idx = deduplicate(pts, dedup_eps)
    n = deduped.shape[0]
    if n == 1:
        return [idx[0]]

    tentative: list[int] = []
    for i in range(n):
        if tentative:
            member, _ = is_convex_combination(
                deduped[i], deduped[tentative], tol
            )
            if member:
                continue
        tentative.append(i)

    if len(tentative) == 1:
        return [idx[tentative[0]]]
    survivors: list[int] = []
    arr = deduped[tentative]
    for pos, i in enumerate(tentative):
        others = np.delete(arr, pos, axis=0)
        member, _ = is_convex_combination(deduped[i], others, tol)
        if not member:
            survivors.append(idx[i])
    return survivors


def redundancy_eliminate(
    points, tol: float = DEFAULT_TOL, dedup_eps: float = DEDUP_EPS
) -> np.ndarray:
    """Return the points that are not convex combinations of the rest."""
    pts = _as_points(points)
    return pts[redundancy_eliminate_indices(pts, tol, dedup_eps)]
