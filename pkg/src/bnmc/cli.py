"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 ill-conditioned query, 4 resource
cap exceeded. Human-readable results go to stdout, diagnostics to stderr.
Caps can be set per invocation (flags), in a JSON config file (--config),
or through the BNMC_STATE_CAP environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import bif, chain, export, oracle, psdd, reach, symbolic
from .errors import (
    BnmcError,
    CapError,
    IllConditionedQueryError,
)
from .network import BayesianNetwork, stats

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ILL_CONDITIONED = 3
EXIT_CAP = 4

STATS_HEADERS = ("BN", "#Vertices", "#Edges", "InDegreeMax", "Dmax", "AMB", "#Parameters")


def _load_network(path: str) -> BayesianNetwork:
    # parse_bif already rejects structurally invalid networks.
    return bif.parse_bif(Path(path).read_text("utf-8"))


def _load_config(args) -> dict:
    if not getattr(args, "config", None):
        return {}
    return json.loads(Path(args.config).read_text("utf-8"))


def _state_cap(args, config: dict) -> int:
    if getattr(args, "state_cap", None) is not None:
        return args.state_cap
    if "state_cap" in config:
        return int(config["state_cap"])
    env = os.environ.get("BNMC_STATE_CAP")
    if env is not None:
        return int(env)
    return chain.DEFAULT_STATE_CAP


def _enum_cap(config: dict) -> int:
    return int(config.get("enum_cap", oracle.DEFAULT_ENUM_CAP))


def _parse_bindings(bn: BayesianNetwork, items: list[str]) -> dict[int, int]:
    out: dict[int, int] = {}
    for item in items:
        name, sep, label = item.partition("=")
        if not sep:
            raise BnmcError(f"binding {item!r} is not of the form var=value")
        v = bn.by_name(name)
        if label not in v.domain:
            raise BnmcError(
                f"value {label!r} not in the domain of {v.name} {list(v.domain)}"
            )
        if v.id in out:
            raise BnmcError(f"variable {v.name} bound twice")
        out[v.id] = v.domain.index(label)
    return out


def _query_from_args(bn: BayesianNetwork, args) -> reach.ReachQuery:
    return reach.ReachQuery(
        evidence=_parse_bindings(bn, args.ev),
        hypothesis=_parse_bindings(bn, args.hyp),
    )


def cmd_stats(args) -> int:
    bn = _load_network(args.network)
    s = stats(bn)
    row = (
        bn.name,
        str(s.vertex_count),
        str(s.edge_count),
        str(s.max_in_degree),
        str(s.max_domain_size),
        f"{float(s.avg_markov_blanket):.2f}",
        str(s.parameter_count),
    )
    widths = [max(len(h), len(c)) for h, c in zip(STATS_HEADERS, row)]
    print("  ".join(h.ljust(w) for h, w in zip(STATS_HEADERS, widths)))
    print("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return EXIT_OK


def cmd_translate(args) -> int:
    bn = _load_network(args.network)
    config = _load_config(args)
    mc = chain.build_mc(
        bn, keep_zero_edges=args.keep_zero_edges, state_cap=_state_cap(args, config)
    )
    text = export.export_jani(mc) if args.format == "jani" else export.export_dot(mc)
    report = f"states: {len(mc.states)} (bound {chain.size_bound(bn)})"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(report)
    else:
        sys.stdout.write(text)
        print(report, file=sys.stderr)
    return EXIT_OK


def cmd_infer(args) -> int:
    bn = _load_network(args.network)
    config = _load_config(args)
    query = _query_from_args(bn, args)
    engines = (
        ("explicit", "symbolic", "oracle") if args.engine == "all" else (args.engine,)
    )
    results: dict[str, float] = {}
    for engine in engines:
        if engine == "explicit":
            mc = chain.build_mc(bn, state_cap=_state_cap(args, config))
            results[engine] = reach.conditional_query(mc, query)
        elif engine == "symbolic":
            sym = symbolic.compile_network(bn)
            results[engine] = symbolic.infer(sym, query)
        else:
            results[engine] = oracle.oracle_infer(bn, query, enum_cap=_enum_cap(config))
    if args.engine == "all":
        for engine in engines:
            print(f"{engine}: {results[engine]!r}")
        values = list(results.values())
        deviation = max(
            abs(a - b) for i, a in enumerate(values) for b in values[i + 1 :]
        )
        print(f"max deviation: {deviation:.3e}")
    else:
        print(repr(results[args.engine]))
    return EXIT_OK


def cmd_bench(args) -> int:
    bn = _load_network(args.network)
    counts = [int(c) for c in args.counts.split(",") if c != ""]
    if any(c < 0 for c in counts):
        raise BnmcError("counts must be nonnegative")

    def run_one(count: int) -> symbolic.BenchResult:
        # One manager per worker: compile afresh so cache mutation stays local.
        sym = symbolic.compile_network(bn)
        return symbolic.bench_evidence(sym, args.strategy, count, args.seed)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_one, counts))
    else:
        sym = symbolic.compile_network(bn)
        results = [
            symbolic.bench_evidence(sym, args.strategy, count, args.seed)
            for count in counts
        ]
    results.sort(key=lambda r: r.evidence_count)

    if args.csv:
        if args.csv == "-":
            symbolic.write_csv(results, sys.stdout)
        else:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                symbolic.write_csv(results, fh)
    else:
        for r in results:
            outcome = "ill-conditioned" if r.ill_conditioned else repr(r.result)
            print(
                f"{r.network} strategy={r.strategy} evidence={r.evidence_count} "
                f"seed={r.seed} time_ns={r.query_time_ns} result={outcome}"
            )
    return EXIT_OK


def cmd_psdd_eval(args) -> int:
    vtree_text = Path(args.vtree).read_text("utf-8")
    psdd_text = Path(args.psdd).read_text("utf-8")
    diagram = psdd.parse_psdd(vtree_text, psdd_text)
    report = psdd.validate_partition(diagram)
    if not report.ok:
        bad = [v.node_id for v in report.verdicts if not v.ok]
        raise psdd.PsddParseError(f"partition property fails at decision nodes {bad}")

    def bindings(items: list[str]) -> dict[str, int]:
        out: dict[str, int] = {}
        for item in items:
            name, sep, label = item.partition("=")
            if not sep:
                raise BnmcError(f"binding {item!r} is not of the form var=value")
            if name not in diagram.variables:
                raise BnmcError(f"unknown PSDD variable {name!r}")
            lowered = label.lower()
            if lowered in ("1", "true", "t"):
                out[name] = 1
            elif lowered in ("0", "false", "f"):
                out[name] = 0
            else:
                raise BnmcError(f"PSDD values must be boolean, got {label!r}")
        return out

    evidence = bindings(args.ev)
    hypothesis = bindings(args.hyp)
    for name, value in hypothesis.items():
        if evidence.get(name, value) != value:
            raise BnmcError(f"variable {name} bound to conflicting values")
    term = dict(evidence)
    term.update(hypothesis)
    if evidence:
        denominator = psdd.prob_term(diagram, evidence)
        if denominator < reach.ILL_CONDITIONED_EPS:
            raise IllConditionedQueryError(
                "evidence has probability zero; the query is ill-conditioned"
            )
        print(repr(psdd.prob_term(diagram, term) / denominator))
    else:
        print(repr(psdd.prob_term(diagram, term)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnmc",
        description="Exact Bayesian-network inference via Markov-chain "
        "reachability, decision diagrams, and enumeration.",
    )
    parser.add_argument("--config", help="JSON file with caps (e.g. state_cap)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="network statistics")
    p.add_argument("network", help="BIF file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("translate", help="export the Markov chain")
    p.add_argument("network", help="BIF file")
    p.add_argument("--format", choices=("jani", "dot"), required=True)
    p.add_argument("--keep-zero-edges", action="store_true")
    p.add_argument("--state-cap", type=int, default=None)
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("infer", help="answer a conditional query")
    p.add_argument("network", help="BIF file")
    p.add_argument("--ev", action="append", default=[], metavar="VAR=VALUE")
    p.add_argument("--hyp", action="append", default=[], metavar="VAR=VALUE")
    p.add_argument(
        "--engine",
        choices=("explicit", "symbolic", "oracle", "all"),
        default="symbolic",
    )
    p.add_argument("--state-cap", type=int, default=None)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("bench", help="evidence-strategy timing harness")
    p.add_argument("network", help="BIF file")
    p.add_argument("--strategy", choices=symbolic.STRATEGIES, default="first")
    p.add_argument("--counts", default="1", help="comma-separated evidence counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="CSV output path, or - for stdout")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("psdd-eval", help="evaluate a PSDD term")
    p.add_argument("vtree", help="vtree file")
    p.add_argument("psdd", help="psdd file")
    p.add_argument("--ev", action="append", default=[], metavar="VAR=VALUE")
    p.add_argument("--hyp", action="append", default=[], metavar="VAR=VALUE")
    p.set_defaults(func=cmd_psdd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IllConditionedQueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ILL_CONDITIONED
    except CapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (BnmcError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
