"""Exact inference over credal networks under strong independence.

Two routes are provided:

* ``separable_ve``: variable elimination in which every message stays
  factored over its purely-conditioning ("separable") scope.  A message is a
  family of candidate factors indexed by configurations of that scope, and
  redundancy elimination runs slice by slice, in low dimension, instead of on
  whole concatenated functions.

* ``enumerate_strong_extension``: the ground-truth oracle.  It walks every
  combination of one vertex per (node, parent configuration), evaluates the
  posterior ratio by plain summation over the joint, and takes min/max.  The
  extreme posterior is always attained at such a combination, so the oracle
  is exact whenever it is feasible.

Candidate choices made by different slices of one message are independent by
construction; choices that a bucket cannot keep independent (for example a
message whose conditioning scope does not cover the whole slicing scope of
the bucket output) are tracked as explicit *branches*: alternative slice
families that downstream buckets never recombine.  Slicing without this
bookkeeping can pair choices that no single vertex selection realises and
widens bounds; with it, concatenating the slices of a message reproduces
exactly the reachable set of functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import geometry
from .graph import elimination_order, is_polytree, relevant_subnetwork
from .model import (
    CredalNetwork,
    Factor,
    LocalCredalSet,
    NetworkFormatError,
    Query,
    broadcast_to_joint,
)

MAX_CANDIDATES = 100_000
MAX_ORACLE = 2 ** 24
MASS_FLOOR = 1e-300


class CandidateExplosionError(RuntimeError):
    def __init__(self, count: int, limit: int):
        super().__init__(
            f"candidate count {count} exceeds the configured limit {limit}"
        )
        self.count = count
        self.limit = limit


class OracleSizeError(RuntimeError):
    def __init__(self, count: int, limit: int):
        super().__init__(
            f"vertex combination count {count} exceeds the oracle limit {limit}"
        )
        self.count = count
        self.limit = limit


class ZeroEvidenceError(RuntimeError):
    """Every candidate assigns zero mass to the evidence."""


@dataclass
class EngineOptions:
    tol: float = geometry.DEFAULT_TOL
    max_candidates: int = MAX_CANDIDATES
    mass_floor: float = MASS_FLOOR
    terminal_pruning: bool = True
    threads: int = 1
    envelope: bool = False  # interval-inspection RE for binary polytrees


@dataclass
class Diagnostics:
    candidates_examined: int = 0
    re_removed: int = 0
    max_slice_size: int = 0
    skipped_candidates: int = 0
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {
            "candidates_examined": self.candidates_examined,
            "re_removed": self.re_removed,
            "max_slice_size": self.max_slice_size,
        }
        if self.skipped_candidates:
            out["skipped_candidates"] = self.skipped_candidates
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True)
class InferenceResult:
    """Per-value posterior bounds plus run diagnostics."""

    values: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    method: str
    diagnostics: Diagnostics

    def __post_init__(self) -> None:
        lo = np.clip(np.asarray(self.lower, dtype=np.float64), 0.0, 1.0)
        hi = np.clip(np.asarray(self.upper, dtype=np.float64), 0.0, 1.0)
        if np.any(lo > hi + 1e-9):
            raise AssertionError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def bounds_by_label(self) -> dict[str, tuple[float, float]]:
        return {
            label: (float(l), float(u))
            for label, l, u in zip(self.values, self.lower, self.upper)
        }


# A slice family maps each configuration of the separable scope to the list
# of candidate factors for that configuration.
SliceFamily = dict[tuple[int, ...], list[Factor]]


@dataclass
class SeparableMessage:
    """Candidate-factor families indexed by a separable conditioning scope.

    ``coupled`` is the ordered scope of the slice factors; ``head`` marks the
    coupled variables that carry mass (the rest are still conditioning).
    ``branches`` holds one or more alternative slice families; choices inside
    one family are freely recombinable across slices, choices from different
    branches are not.
    """

    head: frozenset[int]
    coupled: tuple[int, ...]
    separable: tuple[int, ...]
    zcards: tuple[int, ...]
    branches: list[SliceFamily]

    def mentions(self) -> frozenset[int]:
        return frozenset(self.coupled) | frozenset(self.separable)

    def has_choice(self) -> bool:
        if len(self.branches) > 1:
            return True
        return any(
            len(candidates) > 1
            for family in self.branches
            for candidates in family.values()
        )

    def validate(self) -> None:
        n_cfg = 1
        for c in self.zcards:
            n_cfg *= c
        for family in self.branches:
            if len(family) != n_cfg:
                raise AssertionError("missing separable configurations")
            for candidates in family.values():
                if not candidates:
                    raise AssertionError("empty candidate list")
                for f in candidates:
                    if f.scope != self.coupled:
                        raise AssertionError("slice factor scope mismatch")


def _configs(cards: Sequence[int]) -> list[tuple[int, ...]]:
    return list(itertools.product(*[range(c) for c in cards]))


def _dedup_tables(tables: list[np.ndarray]) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for t in tables:
        flat = t.reshape(-1)
        dup = False
        for u in out:
            if np.max(np.abs(u.reshape(-1) - flat)) <= 1e-12:
                dup = True
                break
        if not dup:
            out.append(t)
    return out


def initial_messages(
    network: CredalNetwork, evidence: Mapping[int, int]
) -> list[SeparableMessage]:
    """One message per node: its local credal set with evidence clamped.

    Evidence variables are restricted out of factor scopes entirely; an
    observed node contributes scalar slice candidates (the probability each
    vertex gives to the observed value).
    """
    messages: list[SeparableMessage] = []
    for node in range(network.n):
        parents = network.dag.parents[node]
        observed = evidence.get(node)
        sep = tuple(sorted(p for p in parents if p not in evidence))
        zcards = tuple(network.variables[p].cardinality for p in sep)
        family: SliceFamily = {}
        for key in _configs(zcards):
            assignment = dict(zip(sep, key))
            full_cfg = tuple(
                evidence[p] if p in evidence else assignment[p] for p in parents
            )
            cfg_idx = network.config_index(node, full_cfg)
            verts = network.locals[node].vertex_lists[cfg_idx]
            if observed is None:
                tables = [np.asarray(v, dtype=np.float64) for v in verts]
                scope = (node,)
            else:
                tables = [np.asarray(v[observed], dtype=np.float64) for v in verts]
                scope = ()
            tables = _dedup_tables(tables)
            family[key] = [Factor(scope=scope, table=t) for t in tables]
        messages.append(
            SeparableMessage(
                head=frozenset() if observed is not None else frozenset({node}),
                coupled=(node,) if observed is None else (),
                separable=sep,
                zcards=zcards,
                branches=[family],
            )
        )
    return messages


def apply_terminal_evidence(network: CredalNetwork, query: Query) -> CredalNetwork:
    """Prune the credal sets of observed leaves to their extreme vertices.

    For an observed variable with no children, only vertices attaining the
    minimum or maximum conditional probability of the observed value can
    support an extreme posterior, so each per-configuration list shrinks to
    at most two vertices (first attainers win on ties).  Other nodes are
    untouched.
    """
    evidence = query.evidence_map
    new_locals: list[LocalCredalSet] = []
    for node in range(network.n):
        loc = network.locals[node]
        obs = evidence.get(node)
        if obs is None or network.dag.children[node]:
            new_locals.append(loc)
            continue
        lists = []
        for verts in loc.vertex_lists:
            values = [float(v[obs]) for v in verts]
            lo = min(range(len(verts)), key=lambda i: (values[i], i))
            hi = min(range(len(verts)), key=lambda i: (-values[i], i))
            keep = [verts[lo]] if lo == hi else [verts[lo], verts[hi]]
            lists.append(tuple(keep))
        new_locals.append(LocalCredalSet(node=node, vertex_lists=tuple(lists)))
    return CredalNetwork(
        variables=network.variables, dag=network.dag, locals=tuple(new_locals)
    )


def _assemble_unit(
    chosen: Mapping[tuple[int, ...], Factor],
    loose: tuple[int, ...],
    loose_cards: tuple[int, ...],
    coupled: tuple[int, ...],
    cards: Sequence[int],
) -> tuple[tuple[int, ...], np.ndarray]:
    """Stack per-configuration factor tables into one table over
    ``sorted(coupled + loose)``; ``chosen`` is keyed by loose configs."""
    if not loose:
        f = chosen[()]
        return f.scope, f.table
    coupled_cards = tuple(cards[v] for v in coupled)
    block = np.empty(loose_cards + coupled_cards, dtype=np.float64)
    for key, f in chosen.items():
        block[key] = f.table
    scope_vars = list(loose) + list(coupled)
    order = sorted(range(len(scope_vars)), key=lambda i: scope_vars[i])
    return tuple(sorted(scope_vars)), np.transpose(block, order)


def _multiply_units(
    units: Sequence[tuple[tuple[int, ...], np.ndarray]], n_vars: int
) -> tuple[tuple[int, ...], np.ndarray]:
    union: set[int] = set()
    for scope, _ in units:
        union.update(scope)
    scope = tuple(sorted(union))
    if not scope:
        value = np.asarray(1.0)
        for _, t in units:
            value = value * t
        return scope, value
    prod = None
    for s, t in units:
        arranged = broadcast_to_joint(t, s, n_vars) if s else t
        prod = arranged if prod is None else prod * arranged
    # Drop the broadcast singleton axes outside the union scope.
    take = tuple(
        slice(None) if v in union else 0 for v in range(n_vars)
    )
    return scope, np.asarray(prod)[take]


def _message_units_for_slice(
    msg: SeparableMessage,
    family: SliceFamily,
    pinned_positions: list[tuple[int, int]],
    loose_positions: list[int],
    out_config: tuple[int, ...],
    cards: Sequence[int],
) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """All concatenation units of one message consistent with a bucket slice.

    ``pinned_positions`` maps positions in the message's separable scope to
    positions in the bucket's output scope; the remaining separable positions
    (``loose_positions``) are concatenated per the separately-specified
    semantics, i.e. every combination of per-configuration choices forms one
    unit.
    """
    loose = tuple(msg.separable[i] for i in loose_positions)
    loose_cards = tuple(msg.zcards[i] for i in loose_positions)
    pin = {i: out_config[j] for i, j in pinned_positions}
    loose_cfgs = _configs(loose_cards)
    slice_keys: list[tuple[int, ...]] = []
    for lc in loose_cfgs:
        key = [0] * len(msg.separable)
        for i, j in pinned_positions:
            key[i] = pin[i]
        for pos, val in zip(loose_positions, lc):
            key[pos] = val
        slice_keys.append(tuple(key))
    choice_lists = [family[k] for k in slice_keys]
    units = []
    for combo in itertools.product(*choice_lists):
        chosen = {lc: f for lc, f in zip(loose_cfgs, combo)}
        units.append(_assemble_unit(chosen, loose, loose_cards, msg.coupled, cards))
    return units


def _sigma_count(msg: SeparableMessage) -> int:
    total = 0
    for family in msg.branches:
        c = 1
        for lst in family.values():
            c *= len(lst)
        total += c
    return total


def _sigma_families(msg: SeparableMessage) -> list[SliceFamily]:
    """Expand a message into one single-choice family per full selection.

    Used when a bucket's output slicing is finer than this message's
    separable scope: the message's choices would otherwise leak across
    output slices, so each complete selection becomes its own branch.
    """
    out: list[SliceFamily] = []
    for family in msg.branches:
        keys = list(family.keys())
        for combo in itertools.product(*[family[k] for k in keys]):
            out.append({k: [f] for k, f in zip(keys, combo)})
    return out


def eliminate_bucket(
    incoming: Sequence[SeparableMessage],
    elim_var: int | None,
    cards: Sequence[int],
    opts: EngineOptions,
    diag: Diagnostics,
) -> SeparableMessage:
    """Multiply the incoming candidate families, sum out ``elim_var`` and
    filter each output slice down to its extreme candidates.

    The output separable scope contains the surviving variables that occur
    only in the separable scope of every incoming message mentioning them;
    messages whose separable scope does not cover all of it are expanded
    into per-selection branches first (see module docstring).  Redundancy
    elimination runs per (branch, slice), never across slices.
    """
    if not incoming:
        raise ValueError("bucket received no messages")
    mentions_all: set[int] = set()
    for m in incoming:
        mentions_all.update(m.mentions())
    if elim_var is not None and not any(
        elim_var in m.mentions() for m in incoming
    ):
        raise ValueError("eliminated variable not mentioned by the bucket")
    survivors = sorted(mentions_all - ({elim_var} if elim_var is not None else set()))

    zprime: list[int] = []
    for v in survivors:
        if all(v in m.separable for m in incoming if v in m.mentions()):
            zprime.append(v)
    vprime = tuple(v for v in survivors if v not in zprime)
    zprime_t = tuple(zprime)
    zcards = tuple(cards[v] for v in zprime_t)
    head = frozenset().union(*[m.head for m in incoming]) - {elim_var}

    # Messages not sliced at least as finely as the output are expanded into
    # one branch per full selection; their choices must stay identical across
    # output slices.
    expanded: list[tuple[SeparableMessage, list[SliceFamily]]] = []
    n_branches = 1
    for m in incoming:
        if set(zprime_t) <= set(m.separable):
            fams = list(m.branches)
        else:
            count = _sigma_count(m)
            if count > opts.max_candidates:
                raise CandidateExplosionError(count, opts.max_candidates)
            fams = _sigma_families(m)
        n_branches *= len(fams)
        if n_branches > opts.max_candidates:
            raise CandidateExplosionError(n_branches, opts.max_candidates)
        expanded.append((m, fams))

    out_configs = _configs(zcards)
    position_info = []
    for m, _ in expanded:
        pinned = [
            (i, zprime_t.index(v))
            for i, v in enumerate(m.separable)
            if v in zprime_t
        ]
        loose = [i for i, v in enumerate(m.separable) if v not in zprime_t]
        position_info.append((pinned, loose))

    merge_branches = len(zprime_t) == 0
    out_families: list[SliceFamily] = []
    pooled: dict[tuple[int, ...], list[np.ndarray]] = {
        cfg: [] for cfg in out_configs
    }

    for fam_combo in itertools.product(*[fams for _, fams in expanded]):
        family_out: SliceFamily = {}
        for cfg in out_configs:
            unit_lists = []
            total = 1
            for (m, _), fams_slice, (pinned, loose) in zip(
                expanded, fam_combo, position_info
            ):
                units = _message_units_for_slice(
                    m, fams_slice, pinned, loose, cfg, cards
                )
                total *= len(units)
                if total > opts.max_candidates:
                    raise CandidateExplosionError(total, opts.max_candidates)
                unit_lists.append(units)
            diag.candidates_examined += total
            tables: list[np.ndarray] = []
            for combo in itertools.product(*unit_lists):
                scope, table = _multiply_units(combo, len(cards))
                if elim_var is not None and elim_var in scope:
                    axis = scope.index(elim_var)
                    table = table.sum(axis=axis)
                    scope = tuple(v for v in scope if v != elim_var)
                if scope != vprime:
                    raise AssertionError(
                        f"bucket scope mismatch: {scope} != {vprime}"
                    )
                tables.append(np.asarray(table, dtype=np.float64))
            if merge_branches:
                pooled[cfg].extend(tables)
            else:
                family_out[cfg] = tables
        if not merge_branches:
            out_families.append(family_out)

    if merge_branches:
        out_families = [{cfg: pooled[cfg] for cfg in out_configs}]

    # Slice filtering is data-parallel: disjoint inputs, keyed merge.
    tasks = [
        (fam_idx, cfg, tables)
        for fam_idx, family in enumerate(out_families)
        for cfg, tables in family.items()
    ]
    if opts.threads > 1 and len(tasks) > 3:
        from concurrent.futures import ThreadPoolExecutor

        local_diags = [Diagnostics() for _ in tasks]
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            kept_lists = list(
                pool.map(
                    lambda args: _filter_slice(
                        args[0][2], vprime, cards, opts, args[1]
                    ),
                    zip(tasks, local_diags),
                )
            )
        for d in local_diags:
            diag.re_removed += d.re_removed
            diag.max_slice_size = max(diag.max_slice_size, d.max_slice_size)
    else:
        kept_lists = [
            _filter_slice(tables, vprime, cards, opts, diag)
            for _, _, tables in tasks
        ]
    filtered: list[SliceFamily] = [dict() for _ in out_families]
    for (fam_idx, cfg, _), kept in zip(tasks, kept_lists):
        filtered[fam_idx][cfg] = [Factor(scope=vprime, table=t) for t in kept]

    msg = SeparableMessage(
        head=head,
        coupled=vprime,
        separable=zprime_t,
        zcards=zcards,
        branches=filtered,
    )
    return msg


# Vertex filtering rarely removes anything once candidate vectors get long,
# and the linear programs grow quadratically with the candidate count, so
# high-dimensional, candidate-heavy slices are deduplicated only.  Skipping
# the filter keeps more candidates and never changes bounds.
RE_DIM_LIMIT = 8
RE_COUNT_LIMIT = 1024
RE_SMALL_COUNT = 64


def _filter_slice(
    tables: list[np.ndarray],
    scope: tuple[int, ...],
    cards: Sequence[int],
    opts: EngineOptions,
    diag: Diagnostics,
) -> list[np.ndarray]:
    if not tables:
        raise AssertionError("empty slice")
    size = 1
    for v in scope:
        size *= cards[v]
    points = np.stack([t.reshape(-1) for t in tables])
    if opts.envelope and size > 2:
        # Candidates are kept verbatim; filtering happens once the family
        # collapses to a single binary variable.
        _, kept_idx = geometry.deduplicate(points)
        return [tables[i] for i in kept_idx]
    if opts.envelope:
        kept_idx = _envelope_indices(points)
    elif (size <= RE_DIM_LIMIT and len(tables) <= RE_COUNT_LIMIT) or (
        len(tables) <= RE_SMALL_COUNT
    ):
        kept_idx = geometry.redundancy_eliminate_indices(points, opts.tol)
    else:
        _, kept_idx = geometry.deduplicate(points)
        return [tables[i] for i in kept_idx]
    diag.re_removed += points.shape[0] - len(kept_idx)
    diag.max_slice_size = max(diag.max_slice_size, size)
    return [tables[i] for i in kept_idx]


def _envelope_indices(points: np.ndarray) -> list[int]:
    """Interval inspection for (at most) 2-component candidates.

    Probability-normalised candidates of equal mass form an interval, so the
    min/max of the normalised first coordinate identify the extreme points.
    With unequal masses the 2-d hull filter is used instead.
    """
    deduped, idx = geometry.deduplicate(points)
    if deduped.shape[0] <= 2:
        return idx
    if deduped.shape[1] == 1:
        values = deduped[:, 0]
        lo = int(np.argmin(values))
        hi = int(np.argmax(values))
        return sorted({idx[lo], idx[hi]})
    masses = deduped.sum(axis=1)
    scale = max(float(masses.max()), 1.0)
    if masses.min() > 1e-12 and float(masses.max() - masses.min()) <= 1e-12 * scale:
        q = deduped[:, 0] / masses
        lo = int(np.argmin(q))
        hi = int(np.argmax(q))
        return sorted({idx[lo], idx[hi]})
    kept = geometry.redundancy_eliminate_indices(deduped)
    return [idx[i] for i in kept]


def posterior_bounds_from_candidates(
    candidates: Sequence[np.ndarray] | np.ndarray,
    query: Query,
    values: tuple[str, ...],
    mass_floor: float = MASS_FLOOR,
    diag: Diagnostics | None = None,
    method: str = "separable",
) -> InferenceResult:
    """Min/max of ``table[v] / sum(table)`` over the candidate factors.

    Candidates whose total mass is at or below ``mass_floor`` correspond to
    vertex choices under which the evidence is impossible; they are skipped
    (and counted).  If every candidate is massless the posterior is
    undefined and a :class:`ZeroEvidenceError` is raised.
    """
    diag = diag if diag is not None else Diagnostics()
    arr = np.asarray(candidates, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("candidates must be a nonempty list of value vectors")
    totals = arr.sum(axis=1)
    valid = totals > mass_floor
    diag.skipped_candidates += int(np.sum(~valid))
    if not np.any(valid):
        raise ZeroEvidenceError("all candidates give the evidence zero mass")
    ratios = arr[valid] / totals[valid, None]
    return InferenceResult(
        values=values,
        lower=ratios.min(axis=0),
        upper=ratios.max(axis=0),
        method=method,
        diagnostics=diag,
    )


def _validate_query(network: CredalNetwork, query: Query) -> None:
    if not 0 <= query.target < network.n:
        raise NetworkFormatError("unknown target variable", "target")
    for var, val in query.evidence:
        if not 0 <= var < network.n:
            raise NetworkFormatError("unknown evidence variable", "evidence")
        if not 0 <= val < network.variables[var].cardinality:
            raise NetworkFormatError("evidence value out of range", "evidence")


def separable_ve(
    network: CredalNetwork, query: Query, opts: EngineOptions | None = None
) -> InferenceResult:
    """Exact lower/upper posterior bounds by separable variable elimination.

    Pipeline: restrict to the relevant subnetwork, prune terminal evidence,
    order the remaining variables by min-fill, eliminate bucket by bucket
    with per-slice redundancy elimination, then read the bounds off the
    final candidates over the target.
    """
    opts = opts or EngineOptions()
    _validate_query(network, query)
    sub, report = relevant_subnetwork(network, query)
    q = report.remap_query(query)
    if opts.terminal_pruning:
        sub = apply_terminal_evidence(sub, q)
    diag = Diagnostics()
    target_var = sub.variables[q.target]

    order = elimination_order(sub, q)
    cards = sub.cards
    messages = initial_messages(sub, q.evidence_map)
    for var in order:
        incoming = [m for m in messages if var in m.mentions()]
        rest = [m for m in messages if var not in m.mentions()]
        out = eliminate_bucket(incoming, var, cards, opts, diag)
        messages = rest + [out]

    final = eliminate_bucket(messages, None, cards, opts, diag)
    if final.coupled != (q.target,):
        raise AssertionError("final candidates are not over the target")
    candidates = [f.table.reshape(-1) for f in final.branches[0][()]]
    result = posterior_bounds_from_candidates(
        candidates,
        q,
        target_var.value_labels,
        opts.mass_floor,
        diag,
        method="separable",
    )
    return result


def binary_polytree_bounds(
    network: CredalNetwork, query: Query, opts: EngineOptions | None = None
) -> InferenceResult:
    """Fast path for binary polytrees: interval-inspection filtering.

    Candidate pairs over a single binary variable are normalised (the
    normalisation mass rides along in the vectors) and only the envelope of
    the normalised coordinate is kept, so every filtering step works on
    vectors of length two.  Falls back to the general path, with a note,
    when the relevant subnetwork is not a binary polytree.
    """
    opts = opts or EngineOptions()
    _validate_query(network, query)
    sub, report = relevant_subnetwork(network, query)
    eligible = is_polytree(sub.dag) and all(c == 2 for c in sub.cards)
    if not eligible:
        result = separable_ve(network, query, opts)
        result.diagnostics.notes.append(
            "binary-polytree preconditions unmet; fell back to separable"
        )
        return result
    fast = replace(opts, envelope=True)
    q = report.remap_query(query)
    pruned = apply_terminal_evidence(sub, q) if opts.terminal_pruning else sub
    pruned = _reduce_binary_locals(pruned)
    diag = Diagnostics()
    cards = pruned.cards
    order = elimination_order(pruned, q)
    messages = initial_messages(pruned, q.evidence_map)
    for var in order:
        incoming = [m for m in messages if var in m.mentions()]
        rest = [m for m in messages if var not in m.mentions()]
        messages = rest + [eliminate_bucket(incoming, var, cards, fast, diag)]
    final = eliminate_bucket(messages, None, cards, fast, diag)
    candidates = [f.table.reshape(-1) for f in final.branches[0][()]]
    return posterior_bounds_from_candidates(
        candidates,
        q,
        pruned.variables[q.target].value_labels,
        opts.mass_floor,
        diag,
        method="binary-polytree",
    )


def _reduce_binary_locals(network: CredalNetwork) -> CredalNetwork:
    """Reduce each binary credal set to its two extreme vertices."""
    new_locals = []
    for node in range(network.n):
        lists = []
        for verts in network.locals[node].vertex_lists:
            if len(verts) <= 2:
                lists.append(verts)
                continue
            values = [float(v[0]) for v in verts]
            lo = min(range(len(verts)), key=lambda i: (values[i], i))
            hi = min(range(len(verts)), key=lambda i: (-values[i], i))
            keep = [verts[lo]] if lo == hi else [verts[lo], verts[hi]]
            lists.append(tuple(keep))
        new_locals.append(LocalCredalSet(node=node, vertex_lists=tuple(lists)))
    return CredalNetwork(
        variables=network.variables, dag=network.dag, locals=tuple(new_locals)
    )


def enumerate_strong_extension(
    network: CredalNetwork,
    query: Query,
    max_combinations: int = MAX_ORACLE,
    mass_floor: float = MASS_FLOOR,
) -> InferenceResult:
    """Ground-truth bounds by exhaustive vertex-combination enumeration.

    Restricted to the relevant subnetwork; every combination of one vertex
    per (node, parent configuration) is evaluated by summation over the
    joint table, vectorised in chunks.
    """
    _validate_query(network, query)
    sub, report = relevant_subnetwork(network, query)
    q = report.remap_query(query)
    evidence = q.evidence_map
    total = sub.vertex_combination_count()
    if total > max_combinations:
        raise OracleSizeError(total, max_combinations)

    free = [v for v in range(sub.n) if v not in evidence]
    free_pos = {v: i for i, v in enumerate(free)}
    free_cards = tuple(sub.cards[v] for v in free)
    tpos = free_pos[q.target]
    tcard = sub.cards[q.target]
    joint_size = int(np.prod(free_cards)) if free else 1

    # Per node, stack every extensive vertex combination broadcast over the
    # free-variable joint, with evidence axes already clamped.
    stacks: list[np.ndarray] = []
    counts: list[int] = []
    for node in range(sub.n):
        loc = sub.locals[node]
        per_cfg = loc.per_config_counts()
        m = loc.combination_count()
        counts.append(m)
        parent_cards = sub.parent_cards(node)
        card = sub.variables[node].cardinality
        scope = list(sub.dag.parents[node]) + [node]
        stack = np.empty((m, joint_size), dtype=np.float64)
        for t in range(m):
            rem = t
            choice = [0] * len(per_cfg)
            for i in range(len(per_cfg) - 1, -1, -1):
                choice[i] = rem % per_cfg[i]
                rem //= per_cfg[i]
            cpt = np.empty(parent_cards + (card,), dtype=np.float64)
            for cfg_idx in range(len(per_cfg)):
                cfg = np.unravel_index(cfg_idx, parent_cards) if parent_cards else ()
                cpt[cfg] = loc.vertex_lists[cfg_idx][choice[cfg_idx]]
            # Clamp evidence axes, then broadcast over the free joint.
            take = []
            kept_scope = []
            for pos, v in enumerate(scope):
                if v in evidence:
                    take.append(evidence[v])
                else:
                    take.append(slice(None))
                    kept_scope.append(v)
            clamped = cpt[tuple(take)]
            if kept_scope:
                arranged = broadcast_to_joint(
                    clamped,
                    [free_pos[v] for v in kept_scope],
                    len(free),
                )
                stack[t] = np.broadcast_to(arranged, free_cards).reshape(-1)
            else:
                stack[t] = float(clamped)
        stacks.append(stack)

    sum_axes = tuple(i + 1 for i in range(len(free)) if i != tpos)
    lower = np.full(tcard, np.inf)
    upper = np.full(tcard, -np.inf)
    skipped = 0
    chunk = 4096
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        combo_ids = np.arange(start, stop)
        digits = np.unravel_index(combo_ids, tuple(counts)) if counts else ()
        prod = None
        for node in range(sub.n):
            part = stacks[node][digits[node]]
            prod = part.copy() if prod is None else prod * part
        shaped = prod.reshape((stop - start,) + free_cards)
        per_value = shaped.sum(axis=sum_axes) if sum_axes else shaped
        denom = per_value.sum(axis=1)
        valid = denom > mass_floor
        skipped += int(np.sum(~valid))
        if np.any(valid):
            ratios = per_value[valid] / denom[valid, None]
            lower = np.minimum(lower, ratios.min(axis=0))
            upper = np.maximum(upper, ratios.max(axis=0))
    if not np.all(np.isfinite(lower)):
        raise ZeroEvidenceError("all candidates give the evidence zero mass")

    diag = Diagnostics(candidates_examined=total, skipped_candidates=skipped)
    return InferenceResult(
        values=sub.variables[q.target].value_labels,
        lower=lower,
        upper=upper,
        method="enumerate",
        diagnostics=diag,
    )


def infer(
    network: CredalNetwork,
    query: Query,
    method: str = "auto",
    opts: EngineOptions | None = None,
    max_combinations: int = MAX_ORACLE,
) -> InferenceResult:
    """Dispatch on method: separable | enumerate | binary-polytree | auto."""
    opts = opts or EngineOptions()
    if method == "separable":
        return separable_ve(network, query, opts)
    if method == "enumerate":
        return enumerate_strong_extension(
            network, query, max_combinations, opts.mass_floor
        )
    if method == "binary-polytree":
        return binary_polytree_bounds(network, query, opts)
    if method == "auto":
        result = binary_polytree_bounds(network, query, opts)
        return result
    raise NetworkFormatError(f"unknown method {method!r}", "method")
