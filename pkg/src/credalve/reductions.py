"""SubsetSum as a credal polytree, plus an exhaustive checker.

An instance with values ``s_1..s_n`` and target ``L`` maps to a polytree
with n value nodes and n-1 summation nodes: every node ranges over
``0..sum(s)``, each summation node adds its two parents (clipped at the
top), and each value node carries a two-vertex credal set putting all mass
on 0 or all mass on ``s_i``.  The upper probability of the last summation
node taking the value ``L`` is 1 exactly when some subset sums to ``L``,
which is what makes exact polytree inference NP-hard; a single positive
certificate is checkable by one deterministic forward propagation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .model import CredalNetwork, Dag, LocalCredalSet, Query, Variable

MAX_ORACLE_ITEMS = 25


@dataclass(frozen=True)
class SubsetSumInstance:
    values: tuple[int, ...]
    target: int

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise ValueError("instance needs at least one value")
        if any(not isinstance(v, int) or v < 0 for v in self.values):
            raise ValueError("values must be non-negative integers")
        if not isinstance(self.target, int) or self.target < 1:
            raise ValueError("target must be a positive integer")

    @property
    def total(self) -> int:
        return sum(self.values)


def subsetsum_oracle(inst: SubsetSumInstance) -> bool:
    """Exhaustive reachable-sum check (guarded to 25 items)."""
    if len(inst.values) > MAX_ORACLE_ITEMS:
        raise ValueError("instance too large for the exhaustive check")
    reachable = {0}
    for v in inst.values:
        reachable |= {r + v for r in reachable if r + v <= inst.target}
        if inst.target in reachable:
            return True
    return inst.target in reachable


def verify_subset(inst: SubsetSumInstance, chosen: Iterable[int]) -> bool:
    """Check one candidate subset by a single forward propagation.

    ``chosen`` holds indices into ``inst.values``; each chosen value node is
    set to its value, the rest to zero, and the deterministic summation
    chain is evaluated with the same clipping the network applies.
    """
    chosen_set = set(chosen)
    xs = [inst.values[i] if i in chosen_set else 0 for i in range(len(inst.values))]
    cap = inst.total
    if len(xs) == 1:
        return xs[0] == inst.target
    acc = min(xs[0] + xs[1], cap)
    for x in xs[2:]:
        acc = min(acc + x, cap)
    return acc == inst.target


def _point_mass(index: int, card: int) -> np.ndarray:
    v = np.zeros(card, dtype=np.float64)
    v[index] = 1.0
    return v


def subsetsum_to_network(inst: SubsetSumInstance) -> tuple[CredalNetwork, Query]:
    """Build the reduction network and the query asking for the last sum.

    The interesting bound is the *upper* probability of the target value
    ``L`` at the query variable.  For n = 1 there is no summation node and
    the query addresses the single value node directly.
    """
    cap = inst.total
    if inst.target > cap:
        raise ValueError(
            f"target {inst.target} exceeds the value total {cap}; "
            "the instance is trivially negative"
        )
    card = cap + 1
    n = len(inst.values)
    labels = tuple(str(i) for i in range(card))

    names = [f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n - 1)]
    variables = tuple(
        Variable(id=i, name=nm, cardinality=card, value_labels=labels)
        for i, nm in enumerate(names)
    )

    parents: list[tuple[int, ...]] = [() for _ in range(n)]
    for i in range(n - 1):
        y = n + i
        if i == 0:
            parents.append((0, 1))
        else:
            parents.append((y - 1, i + 1))
    dag = Dag(parents=tuple(parents))

    locals_: list[LocalCredalSet] = []
    for i in range(n):
        zero = _point_mass(0, card)
        full = _point_mass(inst.values[i], card)
        verts = (zero,) if inst.values[i] == 0 else (zero, full)
        locals_.append(LocalCredalSet(node=i, vertex_lists=(verts,)))
    for i in range(n - 1):
        y = n + i
        lists = []
        for a in range(card):
            for b in range(card):
                lists.append((_point_mass(min(a + b, cap), card),))
        locals_.append(LocalCredalSet(node=y, vertex_lists=tuple(lists)))

    network = CredalNetwork(variables=variables, dag=dag, locals=tuple(locals_))
    target = n + (n - 2) if n > 1 else 0
    return network, Query(target=target)


def subsetsum_upper_probability(inst: SubsetSumInstance, infer_fn) -> float:
    """Upper probability that the query variable equals the target value.

    Instances whose target exceeds the value total are answered 0 without
    building a network.  ``infer_fn(network, query)`` must return an
    InferenceResult; the engine's ``separable_ve`` is the intended choice.
    """
    if inst.target > inst.total:
        return 0.0
    network, query = subsetsum_to_network(inst)
    result = infer_fn(network, query)
    return float(result.upper[inst.target])
