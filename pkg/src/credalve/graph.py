"""DAG analysis: d-separation, irrelevant-node removal, orderings.

Inference only needs the part of a network that can influence the posterior
of the target: barren nodes (no descendant among the target and the
evidence) marginalise to one and are dropped, and evidence that is
d-separated from the target given the rest of the evidence cannot move the
posterior of any candidate distribution, so it is dropped as well.  Both
removals repeat to a fixpoint; the result is ancestrally closed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import CredalNetwork, Dag, NetworkFormatError, Query


def _reachable(parents, children, start: int, observed: set[int]) -> set[int]:
    """Nodes connected to ``start`` by an active trail given ``observed``.

    Standard ball-bouncing reachability: phase one collects the ancestors of
    the observed set, phase two walks (node, direction) states.
    """
    anc: set[int] = set()
    stack = list(observed)
    while stack:
        u = stack.pop()
        if u not in anc:
            anc.add(u)
            stack.extend(parents(u))

    up, down = 0, 1
    visited: set[tuple[int, int]] = set()
    reached: set[int] = set()
    queue: deque[tuple[int, int]] = deque([(start, up)])
    while queue:
        node, d = queue.popleft()
        if (node, d) in visited:
            continue
        visited.add((node, d))
        if node not in observed:
            reached.add(node)
        if d == up and node not in observed:
            for p in parents(node):
                queue.append((p, up))
            for c in children(node):
                queue.append((c, down))
        elif d == down:
            if node not in observed:
                for c in children(node):
                    queue.append((c, down))
            if node in anc:
                for p in parents(node):
                    queue.append((p, up))
    return reached


def d_separated(dag: Dag, a: int, b: int, s: set[int] | frozenset[int]) -> bool:
    """True iff every trail between ``a`` and ``b`` is blocked by ``s``."""
    s = set(s)
    if a == b:
        raise ValueError("a and b must differ")
    if a in s or b in s:
        raise ValueError("a and b must not be observed")
    reached = _reachable(
        lambda u: dag.parents[u], lambda u: dag.children[u], a, s
    )
    return b not in reached


def is_polytree(dag: Dag) -> bool:
    """True iff the undirected skeleton is a forest."""
    root = list(range(dag.n))

    def find(x: int) -> int:
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for child in range(dag.n):
        for parent in dag.parents[child]:
            ra, rb = find(parent), find(child)
            if ra == rb:
                return False
            root[ra] = rb
    return True


@dataclass(frozen=True)
class SubnetworkReport:
    """Outcome of irrelevant-node removal for one query."""

    kept: tuple[int, ...]          # original node ids, ascending
    removed: tuple[int, ...]
    reasons: dict[int, str]        # removed id -> 'barren' | 'd-separated'

    def old_to_new(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.kept)}

    def remap_query(self, query: Query) -> Query:
        mapping = self.old_to_new()
        return Query(
            target=mapping[query.target],
            evidence=tuple(
                (mapping[v], val) for v, val in query.evidence if v in mapping
            ),
        )


def relevant_subnetwork(
    network: CredalNetwork, query: Query
) -> tuple[CredalNetwork, SubnetworkReport]:
    """Drop barren nodes and d-separated evidence, to a fixpoint.

    Barren nodes have no descendant among the target and the kept evidence.
    A childless evidence node that is d-separated from the target given the
    remaining evidence cannot influence the posterior of any candidate
    distribution and is removed together with the ancestors this strands.
    """
    if query.target >= network.n:
        raise NetworkFormatError("unknown target variable", "target")
    evidence = query.evidence_map
    kept: set[int] = set(range(network.n))
    reasons: dict[int, str] = {}

    def kept_parents(u: int) -> list[int]:
        return [p for p in network.dag.parents[u] if p in kept]

    def kept_children(u: int) -> list[int]:
        return [c for c in network.dag.children[u] if c in kept]

    changed = True
    while changed:
        changed = False
        # Barren peel.
        peeling = True
        while peeling:
            peeling = False
            for node in sorted(kept):
                if node == query.target or node in evidence:
                    continue
                if not kept_children(node):
                    kept.discard(node)
                    reasons[node] = "barren"
                    peeling = changed = True
        # Childless evidence that is d-separated from the target given the
        # other kept evidence is irrelevant to the posterior.
        for node in sorted(kept):
            if node not in evidence or node == query.target:
                continue
            if kept_children(node):
                continue
            others = {e for e in evidence if e in kept and e != node}
            reached = _reachable(kept_parents, kept_children, query.target, others)
            if node not in reached:
                kept.discard(node)
                reasons[node] = "d-separated"
                changed = True

    kept_sorted = tuple(sorted(kept))
    mapping = {old: new for new, old in enumerate(kept_sorted)}
    variables = tuple(
        type(network.variables[old])(
            id=new,
            name=network.variables[old].name,
            cardinality=network.variables[old].cardinality,
            value_labels=network.variables[old].value_labels,
        )
        for new, old in enumerate(kept_sorted)
    )
    parents = tuple(
        tuple(mapping[p] for p in network.dag.parents[old])
        for old in kept_sorted
    )
    locals_ = tuple(
        type(network.locals[old])(
            node=new, vertex_lists=network.locals[old].vertex_lists
        )
        for new, old in enumerate(kept_sorted)
    )
    sub = CredalNetwork(
        variables=variables, dag=Dag(parents=parents), locals=locals_
    )
    report = SubnetworkReport(
        kept=kept_sorted,
        removed=tuple(sorted(reasons)),
        reasons=reasons,
    )
    return sub, report


def moral_graph(
    network: CredalNetwork, evidence: set[int]
) -> dict[int, set[int]]:
    """Undirected factor-coupling graph over the non-evidence nodes.

    Each node's clamped factor couples the non-evidence members of its
    family, so parents stay coupled through an observed child.
    """
    adj: dict[int, set[int]] = {
        v: set() for v in range(network.n) if v not in evidence
    }
    for node in range(network.n):
        family = [v for v in (node, *network.dag.parents[node]) if v not in evidence]
        for i, u in enumerate(family):
            for w in family[i + 1:]:
                adj[u].add(w)
                adj[w].add(u)
    return adj


def elimination_order(network: CredalNetwork, query: Query) -> list[int]:
    """Min-fill ordering over the moral graph, ties to the smallest id.

    The target is never eliminated and evidence variables are clamped in
    factors rather than summed, so both are excluded from the order.
    """
    evidence = set(query.evidence_map)
    adj = moral_graph(network, evidence)
    to_eliminate = {v for v in adj if v != query.target}
    order: list[int] = []
    while to_eliminate:
        best_node = -1
        best_fill = None
        for v in sorted(to_eliminate):
            nbrs = [u for u in adj[v]]
            fill = 0
            for i, u in enumerate(nbrs):
                for w in nbrs[i + 1:]:
                    if w not in adj[u]:
                        fill += 1
            if best_fill is None or fill < best_fill:
                best_fill = fill
                best_node = v
        nbrs = list(adj[best_node])
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1:]:
                adj[u].add(w)
                adj[w].add(u)
        for u in nbrs:
            adj[u].discard(best_node)
        del adj[best_node]
        to_eliminate.discard(best_node)
        order.append(best_node)
    return order
