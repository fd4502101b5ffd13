"""Domain types and the network file format.

A credal network is a DAG in which every node carries one credal set per
parent configuration, each set given by a finite list of probability
vertices.  Interval specifications are accepted in the input document and
converted to vertices at load time, so downstream code sees vertices only.

Network document (UTF-8 JSON)::

    {
      "variables": [ {"name": "A", "values": ["a0", "a1"]}, ... ],
      "arcs": [ ["A", "B"], ... ],
      "credal_sets": {
        "B": [
          {"parents": ["a0"], "vertices": [[0.5, 0.5], [0.6, 0.4]]},
          {"parents": ["a1"], "intervals": {"lower": [0.4, 0.5],
                                            "upper": [0.5, 0.6]}}
        ], ...
      }
    }

Root nodes use a single entry with ``"parents": []``.  Parent configurations
are indexed row-major in the declared parent order (the order in which arcs
appear), which fixes a deterministic table layout.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

EPS_NORM = 1e-9
EPS_DEDUP = 1e-12
MAX_EXTENSIVE = 1_000_000


class NetworkFormatError(ValueError):
    """Invalid network document or inconsistent network data."""

    def __init__(self, message: str, field_name: str | None = None):
        super().__init__(message)
        self.field_name = field_name


class ExtensiveCountError(RuntimeError):
    """A per-node extensive vertex count exceeded the configured bound."""

    def __init__(self, node_name: str, count: int, symbolic: str, limit: int):
        super().__init__(
            f"extensive vertex count for node {node_name!r} is {symbolic} "
            f"(> {limit})"
        )
        self.node_name = node_name
        self.count = count
        self.symbolic = symbolic
        self.limit = limit


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    cardinality: int
    value_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.cardinality < 2:
            raise NetworkFormatError(
                f"variable {self.name!r} needs at least 2 values", "values"
            )
        if len(self.value_labels) != self.cardinality:
            raise NetworkFormatError(
                f"variable {self.name!r}: value label count mismatch", "values"
            )
        if len(set(self.value_labels)) != self.cardinality:
            raise NetworkFormatError(
                f"variable {self.name!r} has duplicate value labels", "values"
            )


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over dense node ids, parent lists ordered."""

    parents: tuple[tuple[int, ...], ...]
    children: tuple[tuple[int, ...], ...] = field(init=False)
    topological: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.parents)
        kids: list[list[int]] = [[] for _ in range(n)]
        for node, ps in enumerate(self.parents):
            if len(set(ps)) != len(ps):
                raise NetworkFormatError(
                    f"node {node} has duplicate parents", "arcs"
                )
            for p in ps:
                if not 0 <= p < n:
                    raise NetworkFormatError(
                        f"node {node} references unknown parent {p}", "arcs"
                    )
                kids[p].append(node)
        indeg = [len(ps) for ps in self.parents]
        order: list[int] = [i for i in range(n) if indeg[i] == 0]
        seen = 0
        while seen < len(order):
            u = order[seen]
            seen += 1
            for c in kids[u]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    order.append(c)
        if len(order) != n:
            raise NetworkFormatError("cycle detected in arcs", "arcs")
        object.__setattr__(self, "children", tuple(tuple(k) for k in kids))
        object.__setattr__(self, "topological", tuple(order))

    @property
    def n(self) -> int:
        return len(self.parents)

    def descendants(self, node: int) -> set[int]:
        out: set[int] = set()
        stack = list(self.children[node])
        while stack:
            u = stack.pop()
            if u not in out:
                out.add(u)
                stack.extend(self.children[u])
        return out

    def ancestors(self, node: int) -> set[int]:
        out: set[int] = set()
        stack = list(self.parents[node])
        while stack:
            u = stack.pop()
            if u not in out:
                out.add(u)
                stack.extend(self.parents[u])
        return out


def _freeze(vec: np.ndarray) -> np.ndarray:
    arr = np.asarray(vec, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LocalCredalSet:
    """Vertex lists for one node, one list per parent configuration."""

    node: int
    vertex_lists: tuple[tuple[np.ndarray, ...], ...]

    def combination_count(self) -> int:
        count = 1
        for lst in self.vertex_lists:
            count *= len(lst)
        return count

    def per_config_counts(self) -> tuple[int, ...]:
        return tuple(len(lst) for lst in self.vertex_lists)


@dataclass(frozen=True)
class CredalNetwork:
    variables: tuple[Variable, ...]
    dag: Dag
    locals: tuple[LocalCredalSet, ...]

    def __post_init__(self) -> None:
        if len(self.variables) == 0:
            raise NetworkFormatError("empty network", "variables")
        if self.dag.n != len(self.variables) or len(self.locals) != self.dag.n:
            raise NetworkFormatError("variables, dag and locals disagree in size")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise NetworkFormatError("duplicate variable names", "variables")
        for node, loc in enumerate(self.locals):
            if loc.node != node:
                raise NetworkFormatError(f"local set order mismatch at node {node}")
            expected = self.config_count(node)
            if len(loc.vertex_lists) != expected:
                raise NetworkFormatError(
                    f"node {names[node]!r}: {len(loc.vertex_lists)} parent "
                    f"configurations given, {expected} required",
                    "credal_sets",
                )
            card = self.variables[node].cardinality
            for lst in loc.vertex_lists:
                if len(lst) == 0:
                    raise NetworkFormatError(
                        f"node {names[node]!r} has an empty vertex list",
                        "credal_sets",
                    )
                for v in lst:
                    if v.shape != (card,):
                        raise NetworkFormatError(
                            f"node {names[node]!r}: vertex length mismatch",
                            "credal_sets",
                        )

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    def name_to_id(self) -> dict[str, int]:
        return {v.name: v.id for v in self.variables}

    def parent_cards(self, node: int) -> tuple[int, ...]:
        return tuple(self.variables[p].cardinality for p in self.dag.parents[node])

    def config_count(self, node: int) -> int:
        count = 1
        for c in self.parent_cards(node):
            count *= c
        return count

    def config_index(self, node: int, values: Sequence[int]) -> int:
        idx = 0
        for v, c in zip(values, self.parent_cards(node)):
            idx = idx * c + v
        return idx

    def config_values(self, node: int, index: int) -> tuple[int, ...]:
        cards = self.parent_cards(node)
        out = [0] * len(cards)
        for i in range(len(cards) - 1, -1, -1):
            out[i] = index % cards[i]
            index //= cards[i]
        return tuple(out)

    def vertex_combination_count(self) -> int:
        count = 1
        for loc in self.locals:
            count *= loc.combination_count()
        return count


@dataclass(frozen=True)
class Factor:
    """Dense nonnegative table over a sorted variable scope."""

    scope: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        tab = np.asarray(self.table, dtype=np.float64)
        if tuple(sorted(self.scope)) != tuple(self.scope):
            raise ValueError("factor scope must be sorted by variable id")
        if tab.ndim != len(self.scope):
            raise ValueError("table rank must match scope length")
        if not np.all(np.isfinite(tab)):
            raise ValueError("factor entries must be finite")
        if tab.size and tab.min() < 0:
            raise ValueError("factor entries must be nonnegative")
        object.__setattr__(self, "table", _freeze(tab))


@dataclass(frozen=True)
class Query:
    """A target variable plus an evidence assignment (target excluded)."""

    target: int
    evidence: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        ev = tuple(sorted(dict(self.evidence).items()))
        if any(var == self.target for var, _ in ev):
            raise NetworkFormatError("target appears in the evidence", "evidence")
        object.__setattr__(self, "evidence", ev)

    @property
    def evidence_map(self) -> dict[int, int]:
        return dict(self.evidence)

    @staticmethod
    def from_names(
        network: CredalNetwork, target: str, evidence: Mapping[str, str] | None = None
    ) -> "Query":
        ids = network.name_to_id()
        if target not in ids:
            raise NetworkFormatError(f"unknown target variable {target!r}", "target")
        ev: list[tuple[int, int]] = []
        for name, label in (evidence or {}).items():
            if name not in ids:
                raise NetworkFormatError(
                    f"unknown evidence variable {name!r}", "evidence"
                )
            var = network.variables[ids[name]]
            if label not in var.value_labels:
                raise NetworkFormatError(
                    f"unknown value {label!r} for variable {name!r}", "evidence"
                )
            ev.append((var.id, var.value_labels.index(label)))
        return Query(target=ids[target], evidence=tuple(ev))


def broadcast_to_joint(
    table: np.ndarray, scope: Sequence[int], n: int
) -> np.ndarray:
    """Arrange ``table`` (axes in ``scope`` order) to broadcast over n axes."""
    order = sorted(range(len(scope)), key=lambda i: scope[i])
    arranged = np.transpose(table, order)
    shape = [1] * n
    for var, size in zip(sorted(scope), arranged.shape):
        shape[var] = size
    return arranged.reshape(shape)


@dataclass(frozen=True)
class TransparentBayesNet:
    """Standard Bayesian network produced by the extensive transform.

    Each original node gains one transparent root parent whose values index
    the node's extensive vertex combinations; instantiating every transparent
    node selects exactly one vertex per parent configuration.  Transparent
    priors are uniform; they only serve as an index and never enter bound
    computations.
    """

    network: CredalNetwork
    transparent_cards: tuple[int, ...]
    cpts: tuple[np.ndarray, ...]  # shape (tcard, *parent_cards, card)

    def choice_indices(self, node: int, t: int) -> tuple[int, ...]:
        counts = self.network.locals[node].per_config_counts()
        out = [0] * len(counts)
        for i in range(len(counts) - 1, -1, -1):
            out[i] = t % counts[i]
            t //= counts[i]
        return tuple(out)

    def chosen_vertex(self, node: int, t: int, config: int) -> np.ndarray:
        choice = self.choice_indices(node, t)[config]
        return self.network.locals[node].vertex_lists[config][choice]

    def joint_table(self, assignment: Sequence[int]) -> np.ndarray:
        """Joint distribution over the original variables for one full
        instantiation of the transparent nodes (product form, exact)."""
        net = self.network
        joint = np.ones(net.cards, dtype=np.float64)
        for node in range(net.n):
            cpt = self.cpts[node][assignment[node]]
            scope = list(net.dag.parents[node]) + [node]
            joint = joint * broadcast_to_joint(cpt, scope, net.n)
        return joint


def intervals_to_vertices(
    lower: Sequence[float],
    upper: Sequence[float],
    dedup_eps: float = EPS_DEDUP,
) -> list[np.ndarray]:
    """Extreme points of ``{p : lower <= p <= upper, sum(p) = 1}``.

    Enumerates the assignments in which every coordinate but at most one sits
    at a bound, solves the free coordinate from the sum-to-one constraint and
    keeps the points that respect the box.
    """
    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(upper, dtype=np.float64)
    n = lo.shape[0]
    slack = 1e-12
    if hi.shape[0] != n or n == 0:
        raise NetworkFormatError("interval bound vectors must match in length",
                                 "intervals")
    if np.any(lo < -slack) or np.any(hi > 1 + slack):
        raise NetworkFormatError("interval bounds must lie in [0, 1]", "intervals")
    if np.any(lo > hi + slack):
        raise NetworkFormatError("interval with lower > upper", "intervals")
    if lo.sum() > 1 + slack or hi.sum() < 1 - slack:
        raise NetworkFormatError(
            "empty interval polytope: no distribution satisfies the bounds",
            "intervals",
        )
    lo = np.clip(lo, 0.0, 1.0)
    hi = np.clip(hi, 0.0, 1.0)

    found: list[np.ndarray] = []
    bounds = (lo, hi)
    for free in range(n):
        rest = [i for i in range(n) if i != free]
        for pattern in itertools.product((0, 1), repeat=n - 1):
            p = np.zeros(n, dtype=np.float64)
            for i, side in zip(rest, pattern):
                p[i] = bounds[side][i]
            pf = 1.0 - p.sum()
            if pf < lo[free] - slack or pf > hi[free] + slack:
                continue
            p[free] = min(max(pf, lo[free]), hi[free])
            found.append(p)
    out: list[np.ndarray] = []
    for p in found:
        if all(np.max(np.abs(p - q)) > dedup_eps for q in out):
            out.append(_freeze(p))
    if not out:
        raise NetworkFormatError(
            "empty interval polytope: no distribution satisfies the bounds",
            "intervals",
        )
    return out


def _symbolic_product(counts: Iterable[int]) -> str:
    groups = Counter(c for c in counts if c != 1)
    if not groups:
        return "1"
    parts = []
    for base in sorted(groups):
        exp = groups[base]
        parts.append(f"{base}^{exp}" if exp > 1 else str(base))
    return "*".join(parts)


def concat_credal(
    per_config_lists: Sequence[Sequence[np.ndarray]],
    child: int,
    parents: Sequence[int],
    cards: Mapping[int, int],
    max_extensive: int = MAX_EXTENSIVE,
) -> list[Factor]:
    """All concatenations of per-configuration vertex choices.

    Every combination of one vertex per parent configuration is assembled
    into one factor ``g`` over the child and its parents with
    ``g(x, config) = chosen_vertex(config)[x]``; the output size is the
    product of the per-configuration list sizes.
    """
    parent_cards = tuple(cards[p] for p in parents)
    expected = 1
    for c in parent_cards:
        expected *= c
    if len(per_config_lists) != expected:
        raise NetworkFormatError(
            f"{len(per_config_lists)} configurations given, {expected} required"
        )
    total = 1
    for lst in per_config_lists:
        total *= len(lst)
        if total > max_extensive:
            raise ExtensiveCountError(
                str(child),
                _count_product(per_config_lists),
                _symbolic_product(len(l) for l in per_config_lists),
                max_extensive,
            )

    child_card = cards[child]
    scope_vars = list(parents) + [child]
    scope = tuple(sorted(scope_vars))
    out: list[Factor] = []
    for combo in itertools.product(*[range(len(l)) for l in per_config_lists]):
        table = np.empty(parent_cards + (child_card,), dtype=np.float64)
        for cfg_idx, choice in enumerate(combo):
            cfg = np.unravel_index(cfg_idx, parent_cards) if parent_cards else ()
            table[cfg] = per_config_lists[cfg_idx][choice]
        # Axes currently follow (parents..., child); reorder to sorted scope.
        order = sorted(range(len(scope_vars)), key=lambda i: scope_vars[i])
        out.append(Factor(scope=scope, table=np.transpose(table, order)))
    return out


def _count_product(per_config_lists: Sequence[Sequence]) -> int:
    total = 1
    for lst in per_config_lists:
        total *= len(lst)
    return total


def ccm_transform_extensive(
    network: CredalNetwork, max_extensive: int = MAX_EXTENSIVE
) -> TransparentBayesNet:
    """Turn a credal network into a Bayesian network with transparent roots.

    Each node's transparent parent enumerates the node's extensive vertex
    combinations (one vertex per parent configuration, row-major decode).
    Guarded: a node whose extensive count exceeds ``max_extensive`` raises
    with the count reported as a product of per-configuration sizes.
    """
    tcards: list[int] = []
    cpts: list[np.ndarray] = []
    for node in range(network.n):
        loc = network.locals[node]
        counts = loc.per_config_counts()
        total = 1
        for c in counts:
            total *= c
            if total > max_extensive:
                raise ExtensiveCountError(
                    network.variables[node].name,
                    loc.combination_count(),
                    _symbolic_product(counts),
                    max_extensive,
                )
        parent_cards = network.parent_cards(node)
        card = network.variables[node].cardinality
        cpt = np.empty((total,) + parent_cards + (card,), dtype=np.float64)
        for t in range(total):
            rem = t
            choice = [0] * len(counts)
            for i in range(len(counts) - 1, -1, -1):
                choice[i] = rem % counts[i]
                rem //= counts[i]
            for cfg_idx in range(len(counts)):
                cfg = (
                    np.unravel_index(cfg_idx, parent_cards) if parent_cards else ()
                )
                cpt[(t,) + cfg] = loc.vertex_lists[cfg_idx][choice[cfg_idx]]
        tcards.append(total)
        cpts.append(cpt)
    return TransparentBayesNet(
        network=network, transparent_cards=tuple(tcards), cpts=tuple(cpts)
    )


def _clean_distribution(
    row: Sequence[float], card: int, where: str
) -> np.ndarray:
    vec = np.asarray(row, dtype=np.float64)
    if vec.shape != (card,):
        raise NetworkFormatError(f"{where}: distribution length mismatch",
                                 "credal_sets")
    if np.any(vec < 0):
        raise NetworkFormatError(f"{where}: negative entry", "credal_sets")
    total = vec.sum()
    if abs(total - 1.0) > EPS_NORM:
        raise NetworkFormatError(
            f"{where}: distribution sums to {total!r}, not 1", "credal_sets"
        )
    return _freeze(vec / total)


def _dedup_vertices(
    vertices: list[np.ndarray], eps: float = EPS_DEDUP
) -> tuple[np.ndarray, ...]:
    out: list[np.ndarray] = []
    for v in vertices:
        if all(np.max(np.abs(v - u)) > eps for u in out):
            out.append(v)
    return tuple(out)


def load_network(data: bytes | str | dict) -> CredalNetwork:
    """Parse and validate a network document (bytes, str or parsed dict)."""
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise NetworkFormatError(f"invalid JSON: {exc}") from exc
    else:
        doc = data
    if not isinstance(doc, dict):
        raise NetworkFormatError("document must be a JSON object")

    raw_vars = doc.get("variables")
    if not raw_vars:
        raise NetworkFormatError("empty network: no variables", "variables")
    variables: list[Variable] = []
    for i, rv in enumerate(raw_vars):
        name = rv.get("name")
        values = rv.get("values")
        if not isinstance(name, str) or not name:
            raise NetworkFormatError(f"variable {i} has no name", "variables")
        if not isinstance(values, list):
            raise NetworkFormatError(
                f"variable {name!r} has no value list", "variables"
            )
        variables.append(
            Variable(
                id=i, name=name, cardinality=len(values),
                value_labels=tuple(values),
            )
        )
    ids = {v.name: v.id for v in variables}
    if len(ids) != len(variables):
        raise NetworkFormatError("duplicate variable names", "variables")

    parents: list[list[int]] = [[] for _ in variables]
    seen_arcs: set[tuple[int, int]] = set()
    for arc in doc.get("arcs", []):
        if not (isinstance(arc, (list, tuple)) and len(arc) == 2):
            raise NetworkFormatError(f"malformed arc {arc!r}", "arcs")
        src, dst = arc
        if src not in ids or dst not in ids:
            raise NetworkFormatError(
                f"arc references unknown variable in {arc!r}", "arcs"
            )
        key = (ids[src], ids[dst])
        if key in seen_arcs:
            raise NetworkFormatError(f"duplicate arc {arc!r}", "arcs")
        seen_arcs.add(key)
        parents[ids[dst]].append(ids[src])
    dag = Dag(parents=tuple(tuple(p) for p in parents))

    raw_sets = doc.get("credal_sets", {})
    for name in raw_sets:
        if name not in ids:
            raise NetworkFormatError(
                f"credal_sets references unknown variable {name!r}", "credal_sets"
            )
    locals_: list[LocalCredalSet] = []
    for var in variables:
        node = var.id
        entries = raw_sets.get(var.name)
        if entries is None:
            raise NetworkFormatError(
                f"missing credal_sets entry for variable {var.name!r}",
                "credal_sets",
            )
        pcards = tuple(variables[p].cardinality for p in dag.parents[node])
        n_cfg = 1
        for c in pcards:
            n_cfg *= c
        lists: list[tuple[np.ndarray, ...] | None] = [None] * n_cfg
        for entry in entries:
            labels = entry.get("parents")
            if labels is None or len(labels) != len(dag.parents[node]):
                raise NetworkFormatError(
                    f"node {var.name!r}: parent configuration arity mismatch",
                    "credal_sets",
                )
            cfg_values = []
            for p, label in zip(dag.parents[node], labels):
                pvar = variables[p]
                if label not in pvar.value_labels:
                    raise NetworkFormatError(
                        f"node {var.name!r}: unknown value {label!r} for "
                        f"parent {pvar.name!r}",
                        "credal_sets",
                    )
                cfg_values.append(pvar.value_labels.index(label))
            idx = 0
            for v, c in zip(cfg_values, pcards):
                idx = idx * c + v
            if lists[idx] is not None:
                raise NetworkFormatError(
                    f"node {var.name!r}: duplicate configuration {labels!r}",
                    "credal_sets",
                )
            where = f"node {var.name!r}, configuration {labels!r}"
            if ("vertices" in entry) == ("intervals" in entry):
                raise NetworkFormatError(
                    f"{where}: exactly one of 'vertices'/'intervals' required",
                    "credal_sets",
                )
            if "vertices" in entry:
                rows = [
                    _clean_distribution(row, var.cardinality, where)
                    for row in entry["vertices"]
                ]
                if not rows:
                    raise NetworkFormatError(
                        f"{where}: empty vertex list", "credal_sets"
                    )
                lists[idx] = _dedup_vertices(rows)
            else:
                iv = entry["intervals"]
                verts = intervals_to_vertices(iv["lower"], iv["upper"])
                lists[idx] = _dedup_vertices(
                    [_clean_distribution(v, var.cardinality, where) for v in verts]
                )
        missing = [i for i, l in enumerate(lists) if l is None]
        if missing:
            raise NetworkFormatError(
                f"node {var.name!r}: {len(missing)} parent configurations "
                f"missing from credal_sets",
                "credal_sets",
            )
        locals_.append(LocalCredalSet(node=node, vertex_lists=tuple(lists)))

    return CredalNetwork(
        variables=tuple(variables), dag=dag, locals=tuple(locals_)
    )


def network_to_document(network: CredalNetwork) -> dict:
    """Serialize to the document format (vertices only; intervals were
    converted at load)."""
    doc: dict = {
        "variables": [
            {"name": v.name, "values": list(v.value_labels)}
            for v in network.variables
        ],
        "arcs": [
            [network.variables[p].name, network.variables[c].name]
            for c in range(network.n)
            for p in network.dag.parents[c]
        ],
        "credal_sets": {},
    }
    for var in network.variables:
        node = var.id
        entries = []
        for cfg_idx, lst in enumerate(network.locals[node].vertex_lists):
            cfg = network.config_values(node, cfg_idx)
            labels = [
                network.variables[p].value_labels[val]
                for p, val in zip(network.dag.parents[node], cfg)
            ]
            entries.append(
                {"parents": labels, "vertices": [v.tolist() for v in lst]}
            )
        doc["credal_sets"][var.name] = entries
    return doc


def save_network(network: CredalNetwork) -> str:
    return json.dumps(network_to_document(network), indent=2) + "\n"


def networks_equal(
    a: CredalNetwork, b: CredalNetwork, eps: float = EPS_DEDUP
) -> bool:
    """Structural equality with vertex coordinates compared within eps."""
    if [v.name for v in a.variables] != [v.name for v in b.variables]:
        return False
    if [v.value_labels for v in a.variables] != [v.value_labels for v in b.variables]:
        return False
    if a.dag.parents != b.dag.parents:
        return False
    for la, lb in zip(a.locals, b.locals):
        if len(la.vertex_lists) != len(lb.vertex_lists):
            return False
        for va, vb in zip(la.vertex_lists, lb.vertex_lists):
            if len(va) != len(vb):
                return False
            for x, y in zip(va, vb):
                if np.max(np.abs(x - y)) > eps:
                    return False
    return True
