"""Command-line front end.

Exit codes: 0 success, 2 parse/validation problems (the message names the
offending field), 3 resource-guard trips (candidate or oracle limits).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__, engine, reductions
from .generate import random_network_document
from .model import (
    ExtensiveCountError,
    NetworkFormatError,
    Query,
    load_network,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _parse_evidence(spec: str) -> dict[str, str]:
    out: dict[str, str] = {}
    if not spec:
        return out
    for part in spec.split(","):
        if "=" not in part:
            raise NetworkFormatError(
                f"evidence item {part!r} is not of the form Var=value", "evidence"
            )
        name, label = part.split("=", 1)
        name, label = name.strip(), label.strip()
        if not name or not label:
            raise NetworkFormatError(
                f"evidence item {part!r} is not of the form Var=value", "evidence"
            )
        if name in out:
            raise NetworkFormatError(
                f"evidence variable {name!r} given twice", "evidence"
            )
        out[name] = label
    return out


def _report(args, query_names, result, elapsed_ms: float) -> dict:
    return {
        "target": query_names[0],
        "evidence": query_names[1],
        "method": result.method,
        "bounds": {
            label: [lo, hi]
            for label, (lo, hi) in result.bounds_by_label().items()
        },
        "diagnostics": {
            **result.diagnostics.as_dict(),
            "ms": elapsed_ms,
        },
        "version": __version__,
    }


def _print_report(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2))
        return
    print(f"target: {report['target']}")
    if report["evidence"]:
        ev = ", ".join(f"{k}={v}" for k, v in report["evidence"].items())
        print(f"evidence: {ev}")
    print(f"method: {report['method']}")
    for label, (lo, hi) in report["bounds"].items():
        print(f"  P({label}) in [{lo:.9f}, {hi:.9f}]")
    diag = report["diagnostics"]
    print(
        "diagnostics: "
        f"candidates_examined={diag['candidates_examined']} "
        f"re_removed={diag['re_removed']} "
        f"max_slice_size={diag['max_slice_size']} "
        f"ms={diag['ms']:.1f}"
    )


def cmd_infer(args) -> int:
    try:
        with open(args.network, "rb") as fh:
            network = load_network(fh.read())
        evidence = _parse_evidence(args.evidence or "")
        query = Query.from_names(network, args.target, evidence)
    except FileNotFoundError:
        print(f"error: network file not found: {args.network}", file=sys.stderr)
        return EXIT_USAGE
    except NetworkFormatError as exc:
        field = f" (field: {exc.field_name})" if exc.field_name else ""
        print(f"error: {exc}{field}", file=sys.stderr)
        return EXIT_USAGE

    opts = engine.EngineOptions(
        tol=args.tol,
        max_candidates=args.max_candidates,
        threads=args.threads,
    )
    start = time.perf_counter()
    try:
        result = engine.infer(
            network, query, method=args.method, opts=opts,
            max_combinations=args.max_oracle,
        )
    except NetworkFormatError as exc:
        field = f" (field: {exc.field_name})" if exc.field_name else ""
        print(f"error: {exc}{field}", file=sys.stderr)
        return EXIT_USAGE
    except engine.CandidateExplosionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except engine.OracleSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except engine.ZeroEvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed_ms = (time.perf_counter() - start) * 1000.0

    ev_names = {
        network.variables[v].name: network.variables[v].value_labels[val]
        for v, val in query.evidence
    }
    report = _report(args, (args.target, ev_names), result, elapsed_ms)
    _print_report(report, args.output)
    return EXIT_OK


def cmd_gen_subsetsum(args) -> int:
    try:
        values = tuple(
            int(x) for x in args.set.split(",") if x.strip() != ""
        )
        inst = reductions.SubsetSumInstance(values=values, target=args.target)
        network, query = reductions.subsetsum_to_network(inst)
    except (ValueError, NetworkFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    from .model import save_network

    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(save_network(network))
    suggestion = {
        "network": args.out,
        "target": network.variables[query.target].name,
        "value": str(args.target),
        "question": "upper probability of the target value",
    }
    print(json.dumps(suggestion, indent=2))
    return EXIT_OK


def cmd_gen_random(args) -> int:
    try:
        doc = random_network_document(
            n_nodes=args.nodes,
            seed=args.seed,
            polytree=args.polytree,
            binary=args.binary,
            max_vertices=args.max_vertices,
            max_parents=args.max_parents,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(doc, indent=2) + "\n"
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credalve",
        description="Exact lower/upper posterior bounds in credal networks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="run a query against a network file")
    p.add_argument("--network", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--evidence", default="", help='e.g. "A=a0,B=b1"')
    p.add_argument(
        "--method",
        choices=("separable", "enumerate", "binary-polytree", "auto"),
        default="auto",
    )
    p.add_argument("--tol", type=float, default=engine.EngineOptions().tol)
    p.add_argument(
        "--max-candidates", type=int, default=engine.MAX_CANDIDATES
    )
    p.add_argument("--max-oracle", type=int, default=engine.MAX_ORACLE)
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0, help="reserved; inference is deterministic")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser(
        "gen-subsetsum", help="emit the SubsetSum reduction network"
    )
    p.add_argument("--set", required=True, help='e.g. "1,2,3"')
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_subsetsum)

    p = sub.add_parser("gen-random", help="emit a seeded random network")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--polytree", action="store_true")
    p.add_argument("--binary", action="store_true")
    p.add_argument("--max-vertices", type=int, default=3)
    p.add_argument("--max-parents", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_random)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; propagate its code.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ExtensiveCountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
