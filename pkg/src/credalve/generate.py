"""Seeded random network generation for tests and the CLI.

Networks are emitted as documents and run through the regular loader, so
everything generated satisfies the model invariants by construction.
"""

from __future__ import annotations

import random

from .model import CredalNetwork, Query, load_network


def random_network_document(
    n_nodes: int,
    seed: int,
    polytree: bool = False,
    binary: bool = False,
    max_vertices: int = 3,
    max_parents: int = 3,
    edge_prob: float = 0.45,
    min_prob: float = 0.05,
) -> dict:
    """Deterministic random network document for a given seed."""
    if n_nodes < 1:
        raise ValueError("need at least one node")
    if max_vertices < 1:
        raise ValueError("need at least one vertex per credal set")
    rng = random.Random(seed)
    names = [f"N{i}" for i in range(n_nodes)]
    cards = [2 if binary else rng.choice((2, 2, 3)) for _ in range(n_nodes)]

    parents: list[list[int]] = [[] for _ in range(n_nodes)]
    if polytree:
        # Random tree skeleton; orientations random, in-degree capped.
        for i in range(1, n_nodes):
            j = rng.randrange(i)
            if rng.random() < 0.5 and len(parents[j]) < max_parents:
                parents[j].append(i)
            else:
                parents[i].append(j)
    else:
        for i in range(1, n_nodes):
            pool = list(range(i))
            rng.shuffle(pool)
            for j in pool:
                if len(parents[i]) >= max_parents:
                    break
                if rng.random() < edge_prob:
                    parents[i].append(j)
    # Arc listing preserves the sampled parent order per child.
    arcs = [
        [names[p], names[c]] for c in range(n_nodes) for p in parents[c]
    ]

    def distribution(card: int) -> list[float]:
        raw = [min_prob + rng.random() for _ in range(card)]
        total = sum(raw)
        return [round(x / total, 12) for x in raw]

    credal_sets: dict[str, list[dict]] = {}
    for i in range(n_nodes):
        entries = []
        pcards = [cards[p] for p in parents[i]]
        n_cfg = 1
        for c in pcards:
            n_cfg *= c
        for cfg_idx in range(n_cfg):
            rem, cfg = cfg_idx, []
            for c in reversed(pcards):
                cfg.append(rem % c)
                rem //= c
            cfg = list(reversed(cfg))
            labels = [f"N{p}_{v}" for p, v in zip(parents[i], cfg)]
            k = rng.randint(1, max_vertices)
            rows = [distribution(cards[i]) for _ in range(k)]
            entries.append({"parents": labels, "vertices": rows})
        credal_sets[names[i]] = entries

    return {
        "variables": [
            {
                "name": names[i],
                "values": [f"N{i}_{v}" for v in range(cards[i])],
            }
            for i in range(n_nodes)
        ],
        "arcs": arcs,
        "credal_sets": credal_sets,
    }


def random_network(
    n_nodes: int,
    seed: int,
    **kwargs,
) -> CredalNetwork:
    return load_network(random_network_document(n_nodes, seed, **kwargs))


def random_query(
    network: CredalNetwork, seed: int, max_evidence: int = 2
) -> Query:
    rng = random.Random(seed)
    target = rng.randrange(network.n)
    others = [v for v in range(network.n) if v != target]
    rng.shuffle(others)
    n_ev = rng.randint(0, min(max_evidence, len(others)))
    evidence = tuple(
        (v, rng.randrange(network.variables[v].cardinality))
        for v in sorted(others[:n_ev])
    )
    return Query(target=target, evidence=evidence)
