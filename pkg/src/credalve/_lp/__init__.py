"""Kernel selection for the convex-combination feasibility solver.

The compiled Cython kernel is preferred when it has been built; the
pure-Python kernel is the drop-in fallback.  Set ``CREDALVE_LP=pure`` or
``CREDALVE_LP=compiled`` to force a choice (the latter raises if the
extension is unavailable).
"""

from __future__ import annotations

import os

import numpy as np

from . import pure

COMBINATION = pure.COMBINATION
NOT_COMBINATION = pure.NOT_COMBINATION
ITERATION_LIMIT = pure.ITERATION_LIMIT

try:
    from . import _speedups  # type: ignore[attr-defined]
except ImportError:
    _speedups = None

_forced = os.environ.get("CREDALVE_LP", "").strip().lower()
if _forced == "pure":
    _selected = "pure"
elif _forced == "compiled":
    if _speedups is None:
        raise ImportError(
            "CREDALVE_LP=compiled but the _speedups extension is not built; "
            "run `python setup.py build_ext --inplace`"
        )
    _selected = "compiled"
else:
    _selected = "compiled" if _speedups is not None else "pure"

KERNEL = _selected


def pure_solve(points: np.ndarray, target: np.ndarray, tol: float, max_iter: int):
    return pure.solve_convex_weights(points.tolist(), target.tolist(), tol, max_iter)


def compiled_solve(points: np.ndarray, target: np.ndarray, tol: float, max_iter: int):
    if _speedups is None:
        raise RuntimeError("compiled kernel not available")
    pts = np.ascontiguousarray(points, dtype=np.float64)
    tgt = np.ascontiguousarray(target, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    return _speedups.solve_convex_weights(pts, tgt, tol, max_iter)


def solve(points: np.ndarray, target: np.ndarray, tol: float, max_iter: int):
    """Dispatch to the selected kernel; returns ``(status, weights_list)``."""
    if _selected == "compiled":
        return compiled_solve(points, target, tol, max_iter)
    return pure_solve(points, target, tol, max_iter)


def has_compiled() -> bool:
    return _speedups is not None
