"""Command-line front end.

Exit codes: 0 success, 1 invariant violation or oracle mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__, harness
from .bounds import asymptotic_interval
from .design import greedy_select
from .equivalence import essential_trace
from .graph import InterventionSet, dag_from_edge_list, dag_from_json, to_edge_list, to_json
from .sampler import SampleConfig, sample_order_dag

WORKERS_ENV = "ORDERDAG_WORKERS"


class UsageError(Exception):
    pass


def _g(x: float) -> str:
    return f"{x:.12g}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc


def _overlay(config_cls, args, mapping: dict[str, str]):
    """Dataclass defaults, then the JSON config file, then explicit flags."""
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        known = {f.name for f in fields(config_cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    if "workers" not in data:
        data["workers"] = _default_workers()
    for flag, key in mapping.items():
        value = getattr(args, flag)
        if value is not None:
            data[key] = value
    try:
        return config_cls(**data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _load_graph(args):
    if args.input:
        text = Path(args.input).read_text()
        return dag_from_json(text) if text.lstrip().startswith("{") else dag_from_edge_list(text)
    return sample_order_dag(SampleConfig(args.n, args.rho, args.seed, args.index))


# subcommands -----------------------------------------------------------------

def cmd_sample(args) -> int:
    g = _load_graph(args)
    text = to_json(g) + "\n" if args.format == "json" else to_edge_list(g)
    _emit(text, args.out)
    if args.trace:
        sys.stderr.write(essential_trace(g).to_jsonl())
    return 0


def cmd_design(args) -> int:
    g = _load_graph(args)
    run = greedy_select(g, args.r)
    if args.format == "json":
        _emit(json.dumps(run.to_json_dict()) + "\n", args.out)
    else:
        lines = [f"targets: {' '.join(map(str, run.chosen)) or '(none)'}"]
        lines += [f"after {k + 1}: {y} undirected" for k, y in enumerate(run.Y)]
        _emit("\n".join(lines) + "\n", args.out)
    if args.trace:
        sys.stderr.write(essential_trace(g, InterventionSet(run.chosen)).to_jsonl())
    return 0


def cmd_sweep(args) -> int:
    cfg = _overlay(harness.SweepConfig, args, {
        "n": "n_values", "rho": "rho_values", "r": "r_values", "samples": "samples",
        "seed": "seed", "workers": "workers", "cap": "cap", "exact_limit": "exact_limit",
        "subset_budget": "subset_budget"})
    result = harness.run_sweep(cfg)
    _emit(harness.emit_results(result.summaries, args.format), args.out)
    if args.records_out:
        Path(args.records_out).write_text(harness.emit_records(result.records))
    for n, rho, index, msg in result.failures:
        print(f"failed sample n={n} rho={rho} index={index}: {msg}", file=sys.stderr)
    bad = harness.record_invariant_violations(result.records)
    for line in bad:
        print(f"invariant violation: {line}", file=sys.stderr)
    return 1 if bad else 0


def cmd_couple(args) -> int:
    cfg = _overlay(harness.CouplingConfig, args, {
        "n": "n_values", "rho": "rho_values", "r": "r_values", "samples": "pairs",
        "seed": "seed", "workers": "workers", "cap": "cap", "exact_limit": "exact_limit"})
    violations = harness.run_coupling_campaign(cfg)
    cells = len(cfg.n_values) * len(cfg.rho_values)
    print(f"coupled pairs: {cfg.pairs * cells}  violations: {len(violations)}")
    for v in violations:
        print(f"  n={v.n} rho={v.rho} r={v.r} index={v.index}: {v.relation} "
              f"(small={v.small}, big={v.big})")
    return 1 if violations else 0


def cmd_verify(args) -> int:
    from .verification import verify_interventional, verify_observational

    obs = verify_observational(args.max_n)
    print(f"observational: {obs.checked} DAGs on <= {args.max_n} vertices, "
          f"{len(obs.mismatches)} mismatches")
    inter = verify_interventional(args.samples, max_n=args.max_n_int, seed=args.seed)
    print(f"interventional: {inter.checked} (DAG, targets) cases, {len(inter.mismatches)} mismatches")
    for line in (obs.mismatches + inter.mismatches)[:20]:
        print(f"  {line}")
    return 0 if obs.ok and inter.ok else 1


def _print_report(rep, fmt: str, claim: str | None = None) -> None:
    if fmt == "json":
        print(json.dumps(rep.to_json_dict()))
        return
    log_term = math.log(2.0 / rep.delta)
    rows = [
        ("metric", rep.metric), ("n", rep.n), ("rho", _g(rep.rho)), ("r", rep.r),
        ("samples s", rep.s), ("empirical mean M", _g(rep.M)), ("empirical variance V", _g(rep.V)),
        ("range B", _g(rep.B)), ("delta", _g(rep.delta)),
        ("sqrt(2 V ln(2/delta) / s)", _g(math.sqrt(2 * rep.V * log_term / rep.s))),
        ("7 B ln(2/delta) / (3 (s-1))", _g(7 * rep.B * log_term / (3 * (rep.s - 1)))),
        ("Bernstein upper bound", _g(rep.bernstein_upper)),
        ("tail term epsilon_n", _g(rep.epsilon_n)),
        ("asymptotic lower", _g(rep.lower)),
        ("asymptotic upper", _g(rep.upper)),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    if claim:
        print(claim)


def cmd_bounds(args) -> int:
    if (args.mean is None) != (args.var is None):
        raise UsageError("--mean and --var must be given together")
    if args.mean is None:
        if args.metric != "X":
            raise UsageError("sampling is only built in for metric X; pass --mean/--var")
        counts = harness.undirected_count_samples(args.n, args.rho, args.samples,
                                                  harness.cell_seed(args.seed, args.rho))
        s, mean, var, _ = harness.sample_stats([float(c) for c in counts])
    else:
        s, mean, var = args.samples, args.mean, args.var
    rep = asymptotic_interval(args.metric, args.n, args.rho, mean, var, s, delta=args.delta,
                              r=args.r, B=args.range_override)
    _print_report(rep, args.format)
    return 0


def cmd_repro(args) -> int:
    rep = harness.reproduce_asymptotic_bound(args.samples, args.n, args.rho, args.delta,
                                             args.range_override, args.seed)
    claim = (f"with probability >= {_g(1 - args.delta)}: "
             f"E[log2 L_inf] <= E[X_inf] <= {_g(rep.upper)}")
    _print_report(rep, args.format, claim if args.format != "json" else None)
    return 0


# parser ----------------------------------------------------------------------

def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _density(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog="orderdag", formatter_class=fmt,
                                description="Essential-graph metrics and asymptotic bounds "
                                            "for random order DAGs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_source(sp):
        sp.add_argument("--n", type=_positive_int, default=10, help="vertex count")
        sp.add_argument("--rho", type=_density, default=0.5, help="edge probability")
        sp.add_argument("--seed", type=int, default=0, help="master seed")
        sp.add_argument("--index", type=int, default=0, help="sample index")
        sp.add_argument("--input", default=None, help="read the DAG from a JSON or edge-list file")
        sp.add_argument("--trace", action="store_true",
                        help="write the orientation steps as JSON lines to stderr")
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("sample", help="sample one order DAG", formatter_class=fmt)
    graph_source(sp)
    sp.add_argument("--format", choices=["json", "edges"], default="json", help="output format")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("design", help="greedy intervention targets", formatter_class=fmt)
    graph_source(sp)
    sp.add_argument("--r", type=int, default=1, help="number of interventions")
    sp.add_argument("--format", choices=["text", "json"], default="text", help="output format")
    sp.set_defaults(func=cmd_design)

    def grid(sp, samples_help):
        sp.add_argument("--n", type=_positive_int, nargs="+", default=None, help="vertex counts")
        sp.add_argument("--rho", type=_density, nargs="+", default=None, help="edge probabilities")
        sp.add_argument("--r", type=int, nargs="+", default=None, help="intervention budgets")
        sp.add_argument("--samples", type=_positive_int, default=None, help=samples_help)
        sp.add_argument("--seed", type=int, default=None, help="master seed")
        sp.add_argument("--workers", type=_positive_int, default=None,
                        help=f"worker processes (default ${WORKERS_ENV} or 1)")
        sp.add_argument("--cap", type=_positive_int, default=None,
                        help="max extensions counted per component")
        sp.add_argument("--exact-limit", type=_positive_int, default=None,
                        help="largest component solved exactly for I")
        sp.add_argument("--config", default=None, help="JSON config; flags override it")

    sp = sub.add_parser("sweep", help="Monte-Carlo metric sweep", formatter_class=fmt)
    grid(sp, "samples per cell (default 2000)")
    sp.add_argument("--subset-budget", type=_positive_int, default=None,
                    help="max target sets evaluated for exact X_r")
    sp.add_argument("--out", default=None, help="summary table file (default stdout)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv", help="summary format")
    sp.add_argument("--records-out", default=None, help="per-sample CSV (box-plot data)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("couple", help="coupled-pair monotonicity campaign", formatter_class=fmt)
    grid(sp, "coupled pairs per (n, rho) (default 1000)")
    sp.set_defaults(func=cmd_couple)

    sp = sub.add_parser("verify", help="compare against the brute-force oracle", formatter_class=fmt)
    sp.add_argument("--max-n", type=_positive_int, default=5,
                    help="exhaustive check over all DAGs up to this size")
    sp.add_argument("--max-n-int", type=_positive_int, default=7,
                    help="largest random DAG in the interventional check")
    sp.add_argument("--samples", type=int, default=200, help="random DAGs for the interventional check")
    sp.add_argument("--seed", type=int, default=0, help="seed for the random DAGs")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bounds", help="asymptotic interval for one metric", formatter_class=fmt)
    sp.add_argument("--metric", default="X", help="metric to bound",
                    choices=["X", "isuEss", "I", "log2L", "Y", "isuEss_A", "log2L_A", "I_A"])
    sp.add_argument("--n", type=_positive_int, default=30, help="vertex count")
    sp.add_argument("--rho", type=_probability, default=0.5, help="edge probability")
    sp.add_argument("--r", type=int, default=0, help="intervention budget (reporting only)")
    sp.add_argument("--delta", type=_probability, default=0.01, help="failure probability")
    sp.add_argument("--range-override", type=float, default=None,
                    help="range bound B (default n(n-1)/2 for edge counts)")
    sp.add_argument("--mean", type=float, default=None, help="empirical mean (skips sampling)")
    sp.add_argument("--var", type=float, default=None, help="empirical variance")
    sp.add_argument("--samples", type=_positive_int, default=100000,
                    help="sample count (drawn if --mean is absent)")
    sp.add_argument("--seed", type=int, default=0, help="master seed for sampling")
    sp.add_argument("--format", choices=["text", "json"], default="text", help="output format")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("repro-thm13", help="high-confidence bound on E[X_inf] at n=30, rho=0.5",
                        formatter_class=fmt)
    sp.add_argument("--n", type=_positive_int, default=30, help="vertex count")
    sp.add_argument("--rho", type=_probability, default=0.5, help="edge probability")
    sp.add_argument("--samples", type=_positive_int, default=100000, help="Monte-Carlo samples")
    sp.add_argument("--delta", type=_probability, default=0.01, help="failure probability")
    sp.add_argument("--range-override", type=float, default=None,
                    help="range bound B (default n(n-1)/2)")
    sp.add_argument("--seed", type=int, default=0, help="master seed")
    sp.add_argument("--format", choices=["text", "json"], default="text", help="output format")
    sp.set_defaults(func=cmd_repro)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
