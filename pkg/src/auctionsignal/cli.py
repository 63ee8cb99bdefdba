"""Command-line entry point wiring the solvers to JSON files.

Subcommands: solve, evaluate, cluster, reduce, gen, simulate, check.
Exit codes: 0 success, 1 usage, 2 validation, 3 guard exceeded, 4 numeric
failure.  All outputs are JSON with a fixed key order and embed the tool
version plus the resolved configuration; indices in files are 1-based.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, lp
from .errors import (GuardExceededError, InfeasibleAtBetaError,
                     NumericFailureError, ValidationError)
from .model import (BayesInstance, Instance, KnownInstance, SchemeReport,
                    SignalingScheme, instance_from_json, instance_to_json,
                    make_report, scheme_from_json, scheme_to_json,
                    validate_scheme)
from .solver_bayes import (DEFAULT_MAX_LABELS, DEFAULT_MAX_REGION_CHECKS,
                           reduce_to_m_signals, solve_fixed_k, solve_fixed_m)
from .solver_known import (DEFAULT_PARTITION_GUARD, ClusterPartition,
                           clustering_bruteforce, clustering_revenue,
                           solve_optimal, solve_welfare_constrained)
from .gadgets import (GraphSpec, default_gadget_weights, gen_gap, gen_identity,
                      gen_many_signals, gen_maxcut)
from .simulate import simulate_revenue


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")


def _load_instance(path: str) -> Instance:
    return instance_from_json(_read_json(path))


def _load_scheme(path: str) -> SignalingScheme:
    data = _read_json(path)
    if isinstance(data, dict) and "phi" not in data and "scheme" in data:
        data = data["scheme"]  # accept solver output files directly
    return scheme_from_json(data)


def _report_json(report: SchemeReport, bayes: bool) -> dict:
    per_signal = []
    for entry in report.per_signal:
        item = {"signal": entry.signal + 1,
                "contribution": entry.contribution}
        if bayes:
            item["labels"] = [[h1 + 1, h2 + 1] for h1, h2 in entry.labels]
        else:
            item["h1"] = entry.labels[0][0] + 1
            item["h2"] = entry.labels[0][1] + 1
        per_signal.append(item)
    payload = {"revenue": report.revenue, "welfare": report.welfare,
               "signal_count_after_merge": report.signal_count_after_merge,
               "per_signal": per_signal}
    if report.lp_objective is not None:
        payload["lp_objective"] = report.lp_objective
    return payload


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {key: value for key, value in sorted(vars(args).items())
            if key not in skip}


def _envelope(args: argparse.Namespace) -> dict:
    return {"version": __version__, "config": _config_dict(args)}


def _cmd_solve(args) -> int:
    inst = _load_instance(args.input)
    if args.mode == "known":
        if not isinstance(inst, KnownInstance):
            raise ValidationError("mode 'known' needs a known-valuations instance")
        if args.welfare_beta is not None:
            scheme, report = solve_welfare_constrained(inst, args.welfare_beta)
        else:
            scheme, report = solve_optimal(inst)
    else:
        if not isinstance(inst, BayesInstance):
            raise ValidationError(f"mode {args.mode!r} needs a Bayesian instance")
        if args.welfare_beta is not None:
            raise ValidationError("--welfare-beta applies to mode 'known' only")
        if args.mode == "bayes-k":
            scheme, report = solve_fixed_k(inst, max_labels=args.max_labels,
                                           ordering=args.ordering == "on")
        else:
            scheme, report = solve_fixed_m(inst, max_checks=args.max_regions)
    if args.reduce:
        scheme = reduce_to_m_signals(inst, scheme)
        report = make_report(inst, scheme, lp_objective=report.lp_objective,
                             signal_count_after_merge=scheme.s)
    payload = _envelope(args)
    payload.update(_report_json(report, bayes=isinstance(inst, BayesInstance)))
    payload["scheme"] = scheme_to_json(scheme)
    _write_json(payload, args.output)
    return 0


def _cmd_evaluate(args) -> int:
    inst = _load_instance(args.instance)
    scheme = _load_scheme(args.scheme)
    report = make_report(inst, scheme)
    payload = _envelope(args)
    payload.update(_report_json(report, bayes=isinstance(inst, BayesInstance)))
    _write_json(payload, args.output)
    return 0


def _cmd_cluster(args) -> int:
    inst = _load_instance(args.input)
    if not isinstance(inst, KnownInstance):
        raise ValidationError("clustering applies to known-valuations instances")
    payload = _envelope(args)
    if args.brute_force:
        partition, value = clustering_bruteforce(inst, guard=args.max_partition_m)
    elif args.partition:
        partition = ClusterPartition.from_json(_read_json(args.partition))
        value = clustering_revenue(inst, partition)
    else:
        raise _UsageError("cluster needs --brute-force or --partition")
    payload.update(partition.to_json())
    payload["revenue"] = value
    _write_json(payload, args.output)
    return 0


def _cmd_reduce(args) -> int:
    inst = _load_instance(args.instance)
    scheme = _load_scheme(args.scheme)
    before = make_report(inst, scheme)
    reduced = reduce_to_m_signals(inst, scheme)
    after = make_report(inst, reduced)
    payload = _envelope(args)
    payload["revenue_before"] = before.revenue
    payload["revenue_after"] = after.revenue
    payload["signals_before"] = scheme.s
    payload["signals_after"] = reduced.s
    payload["scheme"] = scheme_to_json(reduced)
    _write_json(payload, args.output)
    return 0


def _cmd_gen(args) -> int:
    metadata = None
    if args.example == "identity":
        inst = gen_identity(args.n)
    elif args.example == "many-signals":
        inst = gen_many_signals(args.n)
    elif args.example == "gap":
        inst = gen_gap(args.n)
    else:
        if not args.graph:
            raise _UsageError("gen --example maxcut needs --graph")
        graph = GraphSpec.from_json(_read_json(args.graph))
        k1, k2 = args.k1, args.k2
        if k1 is None or k2 is None:
            default_k1, default_k2 = default_gadget_weights(graph)
            k1 = default_k1 if k1 is None else k1
            k2 = default_k2 if k2 is None else k2
        inst, metadata = gen_maxcut(graph, k1, k2)
    payload = instance_to_json(inst)
    if metadata is not None:
        payload["maxcut_metadata"] = {
            "items": metadata["items"],
            "outcomes": [list(tag) for tag in metadata["outcomes"]],
            "K1": metadata["K1"], "K2": metadata["K2"],
            "base_revenue": metadata["base_revenue"],
        }
    _write_json(payload, args.output)
    return 0


def _cmd_simulate(args) -> int:
    inst = _load_instance(args.instance)
    scheme = _load_scheme(args.scheme)
    report = simulate_revenue(inst, scheme, samples=args.samples, seed=args.seed)
    payload = _envelope(args)
    payload.update(report.to_json())
    _write_json(payload, args.output)
    return 0


def _cmd_check(args) -> int:
    problems: list[str] = []
    inst = None
    if args.instance:
        try:
            inst = _load_instance(args.instance)
        except ValidationError as exc:
            problems.append(f"instance: {exc}")
    if args.scheme:
        try:
            scheme = _load_scheme(args.scheme)
        except ValidationError as exc:
            problems.append(f"scheme: {exc}")
        else:
            m = inst.m if inst is not None else scheme.phi.shape[1]
            kwargs = {} if args.tol is None else {"tol": args.tol}
            problems.extend(f"scheme: {v}"
                            for v in validate_scheme(scheme, m, **kwargs))
    if not args.instance and not args.scheme:
        raise _UsageError("check needs --instance and/or --scheme")
    if problems:
        for line in problems:
            print(line, file=sys.stderr)
        return 2
    print("ok")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="auctionsignal",
                     description="Signaling-scheme solvers for probabilistic "
                                 "second-price auctions")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--output", default=None, help="write JSON here (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None,
                       help="override reporting tolerance (recorded in config)")
        p.add_argument("--threads", type=int, default=1,
                       help="solver thread cap (single-threaded build)")
        p.add_argument("--lp-debug", action="store_true", dest="lp_debug")

    p_solve = sub.add_parser("solve", help="compute an optimal signaling scheme")
    p_solve.add_argument("--input", required=True)
    p_solve.add_argument("--mode", choices=("known", "bayes-k", "bayes-m"),
                         default="known")
    p_solve.add_argument("--welfare-beta", type=float, default=None,
                         dest="welfare_beta")
    p_solve.add_argument("--ordering", choices=("on", "off"), default="on")
    p_solve.add_argument("--reduce", action="store_true",
                         help="compress the result to at most m signals")
    p_solve.add_argument("--max-labels", type=int, default=DEFAULT_MAX_LABELS,
                         dest="max_labels")
    p_solve.add_argument("--max-regions", type=int,
                         default=DEFAULT_MAX_REGION_CHECKS, dest="max_regions")
    add_common(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_eval = sub.add_parser("evaluate", help="revenue/welfare of a given scheme")
    p_eval.add_argument("--instance", required=True)
    p_eval.add_argument("--scheme", required=True)
    add_common(p_eval)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_cluster = sub.add_parser("cluster", help="clustering schemes")
    p_cluster.add_argument("--input", required=True)
    p_cluster.add_argument("--brute-force", action="store_true", dest="brute_force")
    p_cluster.add_argument("--partition", default=None)
    p_cluster.add_argument("--max-partition-m", type=int,
                           default=DEFAULT_PARTITION_GUARD, dest="max_partition_m")
    add_common(p_cluster)
    p_cluster.set_defaults(func=_cmd_cluster)

    p_reduce = sub.add_parser("reduce", help="compress a scheme to at most m signals")
    p_reduce.add_argument("--instance", required=True)
    p_reduce.add_argument("--scheme", required=True)
    add_common(p_reduce)
    p_reduce.set_defaults(func=_cmd_reduce)

    p_gen = sub.add_parser("gen", help="generate a worked example instance")
    p_gen.add_argument("--example", required=True,
                       choices=("identity", "many-signals", "gap", "maxcut"))
    p_gen.add_argument("--n", type=int, default=2)
    p_gen.add_argument("--graph", default=None, help="graph JSON for maxcut")
    p_gen.add_argument("--k1", type=float, default=None)
    p_gen.add_argument("--k2", type=float, default=None)
    add_common(p_gen)
    p_gen.set_defaults(func=_cmd_gen)

    p_sim = sub.add_parser("simulate", help="Monte Carlo revenue estimate")
    p_sim.add_argument("--instance", required=True)
    p_sim.add_argument("--scheme", required=True)
    p_sim.add_argument("--samples", type=int, default=100_000)
    add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_check = sub.add_parser("check", help="validate instance/scheme files")
    p_check.add_argument("--instance", default=None)
    p_check.add_argument("--scheme", default=None)
    add_common(p_check)
    p_check.set_defaults(func=_cmd_check)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    lp.set_debug(getattr(args, "lp_debug", False))
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, InfeasibleAtBetaError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except GuardExceededError as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return 3
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    finally:
        lp.set_debug(False)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
