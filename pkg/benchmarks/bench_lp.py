"""Benchmark: compiled simplex kernel vs the pure-Python fallback.

Times the convex-combination feasibility solver on redundancy-elimination
style workloads (batches of small dense systems) and one end-to-end
inference on the bundled demo network with each kernel.

Run from the repository root:

    python3 benchmarks/bench_lp.py
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from credalve import _lp
from credalve.model import Query, load_network


def _workloads(seed: int = 1):
    rng = np.random.default_rng(seed)
    for dim, n_points, batch in [
        (2, 8, 400),
        (3, 20, 300),
        (4, 40, 200),
        (6, 60, 120),
        (9, 120, 60),
    ]:
        systems = []
        for _ in range(batch):
            pts = rng.random((n_points, dim))
            if rng.random() < 0.5:
                w = rng.random(n_points)
                target = (w / w.sum()) @ pts
            else:
                target = rng.random(dim)
            systems.append((pts, target))
        yield f"dim={dim} points={n_points} x{batch}", systems


def _time_kernel(solver, systems) -> float:
    start = time.perf_counter()
    for pts, target in systems:
        solver(pts, target, 1e-9, 10_000)
    return time.perf_counter() - start


def bench_kernels() -> None:
    print(f"{'workload':<28}{'pure':>10}{'compiled':>10}{'speedup':>9}")
    for label, systems in _workloads():
        t_pure = _time_kernel(_lp.pure_solve, systems)
        if _lp.has_compiled():
            t_comp = _time_kernel(_lp.compiled_solve, systems)
            print(
                f"{label:<28}{t_pure * 1e3:>8.1f}ms{t_comp * 1e3:>8.1f}ms"
                f"{t_pure / t_comp:>8.1f}x"
            )
        else:
            print(f"{label:<28}{t_pure * 1e3:>8.1f}ms{'n/a':>10}{'':>9}")


def bench_inference() -> None:
    data = Path(__file__).resolve().parent.parent / "data" / "fig1.json"
    if not data.exists():
        print("demo network not found; skipping inference benchmark")
        return
    from credalve import engine

    net = load_network(data.read_bytes())
    query = Query.from_names(net, "F")

    def run() -> float:
        start = time.perf_counter()
        engine.separable_ve(net, query)
        return time.perf_counter() - start

    solvers = [("pure", _lp.pure_solve)]
    if _lp.has_compiled():
        solvers.append(("compiled", _lp.compiled_solve))
    original = _lp.solve
    print("\ndemo network, query P(F), separable elimination:")
    try:
        for name, solver in solvers:
            _lp.solve = solver  # geometry dispatches through _lp.solve
            run()  # warm-up
            best = min(run() for _ in range(3))
            print(f"  {name:<10}{best * 1e3:>8.1f}ms")
    finally:
        _lp.solve = original


if __name__ == "__main__":
    print(f"selected kernel at import: {_lp.KERNEL}")
    bench_kernels()
    bench_inference()
