import itertools

import numpy as np
import pytest

from credalve import (
    CandidateExplosionError,
    EngineOptions,
    OracleSizeError,
    Query,
    ZeroEvidenceError,
    apply_terminal_evidence,
    binary_polytree_bounds,
    eliminate_bucket,
    enumerate_strong_extension,
    load_network,
    posterior_bounds_from_candidates,
    separable_ve,
)
from credalve.engine import Diagnostics, initial_messages
from credalve.generate import random_network, random_query
from credalve.geometry import is_convex_combination
from credalve.model import (
    CredalNetwork,
    Dag,
    LocalCredalSet,
    Variable,
    broadcast_to_joint,
)

CHAIN_DOC = {
    "variables": [
        {"name": "A", "values": ["a0", "a1"]},
        {"name": "B", "values": ["b0", "b1"]},
    ],
    "arcs": [["A", "B"]],
    "credal_sets": {
        "A": [{"parents": [], "intervals": {"lower": [0.5, 0.4], "upper": [0.6, 0.5]}}],
        "B": [
            {"parents": ["a0"], "intervals": {"lower": [0.5, 0.4], "upper": [0.6, 0.5]}},
            {"parents": ["a1"], "intervals": {"lower": [0.4, 0.5], "upper": [0.5, 0.6]}},
        ],
    },
}


def _pt(*rows):
    return tuple(np.array(r, dtype=float) for r in rows)


def collider_net(e_v0_vertices):
    """v -> e -> s <- w with deterministic s = (e XNOR w)."""
    variables = tuple(
        Variable(i, n, 2, (n + "0", n + "1")) for i, n in enumerate("vesw")
    )
    dag = Dag(parents=((), (0,), (1, 3), ()))
    locs = (
        LocalCredalSet(0, (_pt([0.5, 0.5]),)),
        LocalCredalSet(1, (_pt(*e_v0_vertices), _pt([1.0, 0.0]))),
        LocalCredalSet(
            2,
            (
                _pt([1.0, 0.0]),
                _pt([0.0, 1.0]),
                _pt([0.0, 1.0]),
                _pt([1.0, 0.0]),
            ),
        ),
        LocalCredalSet(3, (_pt([0.5, 0.5]),)),
    )
    return CredalNetwork(variables=variables, dag=dag, locals=locs)


class TestChainExample:
    def test_bounds_and_combination_count(self, gap):
        net = load_network(CHAIN_DOC)
        q = Query.from_names(net, "B")
        enum = enumerate_strong_extension(net, q)
        sep = separable_ve(net, q)
        assert enum.diagnostics.candidates_examined == 8
        assert enum.bounds_by_label()["b0"] == pytest.approx((0.45, 0.56))
        assert gap(sep, enum) < 1e-12


class TestCorrelationSafety:
    def test_collider_with_shared_upstream_choice_stays_exact(self, gap):
        # Free recombination across slices would widen these bounds to
        # [0.25, 0.75]; the true bounds are a point.
        net = collider_net(([1.0, 0.0], [0.0, 1.0]))
        q = Query(target=2)
        sep = separable_ve(net, q)
        enum = enumerate_strong_extension(net, q)
        assert gap(sep, enum) < 1e-12
        assert enum.lower[0] == pytest.approx(0.5)
        assert enum.upper[0] == pytest.approx(0.5)

    def test_fast_path_matches_on_the_same_trap(self, gap):
        net = collider_net(([1.0, 0.0], [0.0, 1.0]))
        q = Query(target=2)
        bp = binary_polytree_bounds(net, q)
        enum = enumerate_strong_extension(net, q)
        assert bp.method == "binary-polytree"
        assert bp.diagnostics.max_slice_size <= 2
        assert gap(bp, enum) < 1e-12


class TestOracleAgreement:
    def test_random_networks_with_evidence(self, gap):
        checked = 0
        seed = 0
        while checked < 30:
            seed += 1
            net = random_network(n_nodes=2 + seed % 5, seed=400 + seed)
            if net.vertex_combination_count() > 40_000:
                continue
            q = random_query(net, seed)
            sep = separable_ve(net, q)
            enum = enumerate_strong_extension(net, q)
            assert gap(sep, enum) < 1e-9, f"seed {seed}"
            checked += 1

    def test_singleton_network_collapses_to_bayes(self):
        net = random_network(n_nodes=5, seed=77, max_vertices=1)
        q = random_query(net, 3)
        sep = separable_ve(net, q)
        assert np.allclose(sep.lower, sep.upper, atol=1e-12)
        enum = enumerate_strong_extension(net, q)
        assert enum.diagnostics.candidates_examined == 1
        assert np.allclose(sep.lower, enum.lower, atol=1e-12)
        if not q.evidence:
            assert abs(sep.lower.sum() - 1.0) < 1e-9

    def test_no_evidence_bound_sums_bracket_one(self):
        for seed in (11, 12, 13):
            net = random_network(n_nodes=4, seed=500 + seed)
            q = Query(target=seed % net.n)
            sep = separable_ve(net, q)
            assert sep.lower.sum() <= 1 + 1e-9
            assert sep.upper.sum() >= 1 - 1e-9

    def test_monotone_in_vertex_additions(self):
        net = random_network(n_nodes=4, seed=901, max_vertices=2)
        q = Query(target=net.n - 1)
        base = separable_ve(net, q)
        # Add a fresh vertex to one root list.
        node = 0
        old = net.locals[node].vertex_lists[0]
        card = net.variables[node].cardinality
        extra = np.full(card, 1.0 / card)
        new_lists = ((*old, extra),)
        locs = list(net.locals)
        locs[node] = LocalCredalSet(node=node, vertex_lists=new_lists)
        bigger = CredalNetwork(
            variables=net.variables, dag=net.dag, locals=tuple(locs)
        )
        wider = separable_ve(bigger, q)
        assert np.all(wider.lower <= base.lower + 1e-12)
        assert np.all(wider.upper >= base.upper - 1e-12)


class TestTerminalEvidence:
    def test_prunes_observed_leaves_to_extremes(self):
        net = random_network(n_nodes=3, seed=42, max_vertices=3)
        leaf = next(
            v for v in range(net.n) if not net.dag.children[v]
        )
        q = Query(target=(leaf + 1) % net.n, evidence=((leaf, 0),))
        pruned = apply_terminal_evidence(net, q)
        for cfg, verts in enumerate(pruned.locals[leaf].vertex_lists):
            assert len(verts) <= 2
            pool = net.locals[leaf].vertex_lists[cfg]
            values = [v[0] for v in pool]
            got = {round(float(v[0]), 12) for v in verts}
            assert got == {round(min(values), 12), round(max(values), 12)}

    def test_nodes_with_children_untouched(self, fig1_net):
        ids = fig1_net.name_to_id()
        q = Query(target=ids["F"], evidence=((ids["B"], 0),))
        pruned = apply_terminal_evidence(fig1_net, q)
        b = ids["B"]
        assert pruned.locals[b].vertex_lists == fig1_net.locals[b].vertex_lists

    def test_two_vertex_interval_row_unchanged(self, fig1_net):
        ids = fig1_net.name_to_id()
        q = Query.from_names(fig1_net, "E", {"F": "f0"})
        sub_q = Query(target=ids["E"], evidence=((ids["F"], 0),))
        pruned = apply_terminal_evidence(fig1_net, sub_q)
        f = ids["F"]
        for before, after in zip(
            fig1_net.locals[f].vertex_lists, pruned.locals[f].vertex_lists
        ):
            assert {tuple(v) for v in before} == {tuple(v) for v in after}

    def test_bounds_invariant_and_counts_shrink(self, gap):
        checked = 0
        seed = 0
        while checked < 10:
            seed += 1
            net = random_network(n_nodes=4, seed=600 + seed)
            leaves = [v for v in range(net.n) if not net.dag.children[v]]
            if not leaves:
                continue
            q = Query(
                target=next(v for v in range(net.n) if v not in leaves[:1]),
                evidence=((leaves[0], 0),),
            )
            on = separable_ve(net, q)
            off = separable_ve(net, q, EngineOptions(terminal_pruning=False))
            assert gap(on, off) < 1e-9
            assert (
                on.diagnostics.candidates_examined
                <= off.diagnostics.candidates_examined
            )
            checked += 1


class TestEliminateBucket:
    def test_single_message_sum_out_keeps_slicing(self):
        net = load_network(CHAIN_DOC)
        msgs = initial_messages(net, {})
        b_msg = next(m for m in msgs if m.coupled == (1,))
        diag = Diagnostics()
        out = eliminate_bucket([b_msg], 1, net.cards, EngineOptions(), diag)
        assert out.separable == (0,)
        assert out.coupled == ()
        for candidates in out.branches[0].values():
            for f in candidates:
                assert f.table.shape == ()
                assert f.table == pytest.approx(1.0)

    def test_root_and_child_bucket_reduces_to_two(self):
        net = load_network(CHAIN_DOC)
        msgs = initial_messages(net, {})
        for m in msgs:
            m.validate()
        diag = Diagnostics()
        out = eliminate_bucket(msgs, 0, net.cards, EngineOptions(), diag)
        out.validate()
        assert out.separable == ()
        assert out.coupled == (1,)
        assert diag.candidates_examined == 8
        survivors = out.branches[0][()]
        values = sorted(float(f.table[0]) for f in survivors)
        assert values == pytest.approx([0.45, 0.56])

    @pytest.mark.parametrize("seed", [1, 2, 3, 5, 10, 11])
    def test_slice_concatenation_matches_enumeration(self, seed):
        # The functions reachable by concatenating the output slices must
        # equal, up to the convex hull, the set from brute-force choice
        # enumeration over the incoming factor families.
        net = random_network(n_nodes=4, seed=700 + seed, max_vertices=2)
        if net.vertex_combination_count() > 512:
            pytest.skip("oversized sample")
        msgs = initial_messages(net, {})
        elim = 0
        incoming = [m for m in msgs if elim in m.mentions()]
        out = eliminate_bucket(
            incoming, elim, net.cards, EngineOptions(), Diagnostics()
        )
        reachable = _concatenations(out, net.cards)
        brute = _brute_bucket(incoming, elim, net.cards)
        # Every reachable function is realisable.
        for r in reachable:
            assert any(np.allclose(r, b, atol=1e-9) for b in brute)
        # Every realisable function is in the hull of the reachable set.
        stack = np.stack(reachable)
        for b in brute:
            member, _ = is_convex_combination(b, stack, tol=1e-7)
            assert member

    def test_guard_trips_with_count(self):
        net = load_network(CHAIN_DOC)
        msgs = initial_messages(net, {})
        with pytest.raises(CandidateExplosionError) as err:
            eliminate_bucket(
                msgs, 0, net.cards, EngineOptions(max_candidates=3), Diagnostics()
            )
        assert err.value.count > 3


def _concatenations(message, cards):
    """All full tables representable by the message (its candidate set)."""
    out = []
    scope = tuple(sorted(set(message.coupled) | set(message.separable)))
    for family in message.branches:
        keys = sorted(family.keys())
        for combo in itertools.product(*[family[k] for k in keys]):
            shape = tuple(cards[v] for v in scope)
            table = np.zeros(shape)
            for key, factor in zip(keys, combo):
                index = []
                for v in scope:
                    if v in message.separable:
                        index.append(key[message.separable.index(v)])
                    else:
                        index.append(slice(None))
                # Coupled scopes are id-sorted, matching the sorted union.
                table[tuple(index)] = factor.table
            out.append(table.reshape(-1))
    return out


def _brute_bucket(incoming, elim, cards):
    """Reference: concatenate every incoming message fully, multiply, sum."""
    full_sets = []
    scopes = []
    for m in incoming:
        sets = _concatenations(m, cards)
        full_sets.append(sets)
        scopes.append(tuple(sorted(set(m.coupled) | set(m.separable))))
    union = sorted(set().union(*[set(s) for s in scopes]))
    out_scope = [v for v in union if v != elim]
    results = []
    n = len(cards)
    for combo in itertools.product(*full_sets):
        prod = np.ones([1] * n)
        for flat, scope in zip(combo, scopes):
            shaped = flat.reshape(tuple(cards[v] for v in scope))
            prod = prod * broadcast_to_joint(shaped, scope, n)
        take = tuple(slice(None) if v in union else 0 for v in range(n))
        shaped = prod[take]
        axis = union.index(elim)
        summed = shaped.sum(axis=axis)
        results.append(summed.reshape(-1))
    uniq = []
    for r in results:
        if not any(np.allclose(r, u, atol=1e-12) for u in uniq):
            uniq.append(r)
    return uniq


class TestPosteriorBounds:
    def test_two_candidates(self):
        res = posterior_bounds_from_candidates(
            [np.array([0.3, 0.1]), np.array([0.2, 0.2])],
            Query(target=0),
            ("v0", "v1"),
        )
        assert res.bounds_by_label()["v0"] == pytest.approx((0.5, 0.75))

    def test_identical_candidates_collapse(self):
        res = posterior_bounds_from_candidates(
            [np.array([0.4, 0.4])] * 3, Query(target=0), ("v0", "v1")
        )
        assert np.allclose(res.lower, res.upper)

    def test_massless_candidate_skipped_and_flagged(self):
        diag = Diagnostics()
        res = posterior_bounds_from_candidates(
            [np.array([0.0, 0.0]), np.array([0.2, 0.2])],
            Query(target=0),
            ("v0", "v1"),
            diag=diag,
        )
        assert diag.skipped_candidates == 1
        assert res.lower[0] == pytest.approx(0.5)

    def test_all_massless_is_an_error(self):
        with pytest.raises(ZeroEvidenceError):
            posterior_bounds_from_candidates(
                [np.array([0.0, 0.0])], Query(target=0), ("v0", "v1")
            )


class TestBinaryPolytreePath:
    def test_matches_general_path(self, gap):
        for seed in range(20):
            net = random_network(
                n_nodes=4 + seed % 10, seed=800 + seed, polytree=True, binary=True,
                max_vertices=2,
            )
            q = random_query(net, seed)
            bp = binary_polytree_bounds(net, q)
            sp = separable_ve(net, q)
            assert bp.method == "binary-polytree"
            assert bp.diagnostics.max_slice_size <= 2
            assert gap(bp, sp) < 1e-9

    def test_redundant_binary_vertices_are_reduced(self, gap):
        doc = {
            "variables": [
                {"name": "A", "values": ["a0", "a1"]},
                {"name": "B", "values": ["b0", "b1"]},
            ],
            "arcs": [["A", "B"]],
            "credal_sets": {
                "A": [
                    {
                        "parents": [],
                        "vertices": [[0.2, 0.8], [0.5, 0.5], [0.7, 0.3]],
                    }
                ],
                "B": [
                    {"parents": ["a0"], "vertices": [[0.6, 0.4]]},
                    {"parents": ["a1"], "vertices": [[0.3, 0.7]]},
                ],
            },
        }
        net = load_network(doc)
        q = Query.from_names(net, "B")
        bp = binary_polytree_bounds(net, q)
        enum = enumerate_strong_extension(net, q)
        assert bp.method == "binary-polytree"
        assert gap(bp, enum) < 1e-9

    def test_falls_back_off_polytrees(self, fig1_net):
        q = Query.from_names(fig1_net, "F")
        res = binary_polytree_bounds(fig1_net, q)
        assert res.method == "separable"
        assert any("fell back" in n for n in res.diagnostics.notes)

    def test_all_point_distributions_give_exact_marginal(self):
        net = random_network(
            n_nodes=6, seed=31, polytree=True, binary=True, max_vertices=1
        )
        q = Query(target=net.n - 1)
        bp = binary_polytree_bounds(net, q)
        assert np.allclose(bp.lower, bp.upper, atol=1e-12)
        assert abs(bp.lower.sum() - 1.0) < 1e-9


class TestGuards:
    def test_oracle_size_guard(self, fig1_net):
        q = Query.from_names(fig1_net, "F")
        with pytest.raises(OracleSizeError) as err:
            enumerate_strong_extension(fig1_net, q, max_combinations=1000)
        assert err.value.count == 2 ** 18

    def test_zero_evidence_probability(self):
        doc = {
            "variables": [
                {"name": "A", "values": ["a0", "a1"]},
                {"name": "B", "values": ["b0", "b1"]},
            ],
            "arcs": [["A", "B"]],
            "credal_sets": {
                "A": [{"parents": [], "vertices": [[1.0, 0.0]]}],
                "B": [
                    {"parents": ["a0"], "vertices": [[1.0, 0.0]]},
                    {"parents": ["a1"], "vertices": [[0.5, 0.5]]},
                ],
            },
        }
        net = load_network(doc)
        q = Query.from_names(net, "A", {"B": "b1"})
        with pytest.raises(ZeroEvidenceError):
            separable_ve(net, q)

    def test_thread_count_does_not_change_results(self, gap):
        net = random_network(n_nodes=5, seed=1234)
        q = random_query(net, 5)
        one = separable_ve(net, q, EngineOptions(threads=1))
        four = separable_ve(net, q, EngineOptions(threads=4))
        assert gap(one, four) == 0.0
