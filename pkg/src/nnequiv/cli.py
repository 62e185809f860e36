"""Command-line front end for the equivalence-checking pipeline.

Exit codes (the contract every subcommand honors):
  0  equivalent (query unsatisfiable) / operation succeeded
  1  not equivalent: certified counterexample (oracle: violation found)
  2  inconclusive (timeout, memory-out, unknown, solver error)
  3  usage or validation error
  4  internal soundness failure (sat verdict whose model failed certification)
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .certify import CounterexampleRejection, certify
from .perturb import PerturbationSpec, perturb
from .model import (
    ModelError,
    load_network_file,
    param_count,
    serialize_network,
)
from .oracle import BudgetExceeded, DEFAULT_BUDGET, DiscreteDomain, exhaustive_check
from .rational import decimal_approx, format_exact, rat
from .relations import (
    DEFAULT_EPSILON,
    DEFAULT_EPSILON_REGRESSION,
    EquivalenceRelation,
    build_query,
)
from .solver import (
    SolverConfig,
    default_solver_config,
    run_solver,
    serialize_smtlib,
    solver_identity,
)

EXIT_EQUIVALENT = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3
EXIT_SOUNDNESS = 4

REPORT_SCHEMA_ID = "nnequiv-report/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the exit-code contract
    # reserves 2 for inconclusive verdicts, so raise instead.
    def error(self, message):
        raise UsageError(message)


def _add_relation_flags(parser):
    parser.add_argument(
        "--relation",
        required=True,
        choices=["strict", "l1", "linf", "argmax", "topk"],
        help="equivalence relation to check",
    )
    parser.add_argument(
        "--epsilon",
        default=None,
        help="threshold for l1/linf as an exact decimal (defaults: l1=5, linf=10; 0.5 for single-output nets)",
    )
    parser.add_argument("--k", type=int, default=None, help="prefix length for topk")


def _add_solver_flags(parser):
    parser.add_argument("--solver", default=None, help="solver executable (default: $NNEQUIV_SOLVER or z3)")
    parser.add_argument(
        "--solver-args",
        default=None,
        help="argument template; {file} is replaced by the query path, no {file} means stdin",
    )
    parser.add_argument("--timeout", type=float, default=600.0, help="solver time limit in seconds")
    parser.add_argument("--mem-limit", type=int, default=None, help="solver memory limit in MiB")
    parser.add_argument("--keep-query", default=None, help="persist the emitted query file at this path")


def _add_query_flags(parser):
    parser.add_argument(
        "--grid-mode",
        default=None,
        metavar="bits|LO:HI:STEP",
        help="restrict inputs to a finite grid (oracle-comparison mode, intended for tests)",
    )
    parser.add_argument(
        "--encoding",
        default="case-split",
        choices=["case-split", "ite"],
        help="activation emission form (same models either way; ite suits some solvers)",
    )


def make_relation(args, output_dim: int) -> EquivalenceRelation:
    tag = args.relation
    try:
        if tag == "strict":
            return EquivalenceRelation.strict()
        if tag == "argmax":
            return EquivalenceRelation.argmax()
        if tag == "topk":
            if args.k is None:
                raise UsageError("--k is required for the topk relation")
            return EquivalenceRelation.topk(args.k)
        epsilon = args.epsilon
        if epsilon is None:
            epsilon = DEFAULT_EPSILON_REGRESSION if output_dim == 1 else DEFAULT_EPSILON[tag]
        epsilon_value = rat(epsilon)
        return EquivalenceRelation.l1(epsilon_value) if tag == "l1" else EquivalenceRelation.linf(epsilon_value)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _parse_grid_mode(spec: str, n: int):
    if spec == "bits":
        return DiscreteDomain.bits(n).values
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError("--grid-mode expects 'bits' or LO:HI:STEP")
    try:
        return DiscreteDomain.grid(n, parts[0], parts[1], parts[2]).values
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad grid specification: {exc}") from exc


def _load_pair(args):
    net_a = load_network_file(args.model_a)
    net_b = load_network_file(args.model_b)
    return net_a, net_b


def _solver_config(args, keep_query=None) -> SolverConfig:
    try:
        return default_solver_config(
            executable=args.solver,
            args_template=getattr(args, "solver_args", None),
            timeout_s=args.timeout,
            mem_limit_mib=args.mem_limit,
            keep_query_path=keep_query if keep_query is not None else args.keep_query,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _vector_json(vector):
    return {
        "exact": [format_exact(v) for v in vector],
        "decimal": [decimal_approx(v) for v in vector],
    }


def cmd_check(args) -> int:
    net_a, net_b = _load_pair(args)
    relation = make_relation(args, net_a.output_dim)
    grid_values = _parse_grid_mode(args.grid_mode, net_a.input_dim) if args.grid_mode else None
    try:
        query = build_query(
            net_a, net_b, relation, grid_values=grid_values, encoding=args.encoding
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cfg = _solver_config(args)
    verdict = run_solver(query, cfg)

    counterexample = None
    certification = None
    exit_code = EXIT_INCONCLUSIVE
    if verdict.is_unsat:
        exit_code = EXIT_EQUIVALENT
    elif verdict.is_sat:
        try:
            cx = certify(net_a, net_b, relation, verdict.assignment)
            certification = {"status": "certified", "detail": cx.witness}
            counterexample = {
                "input": _vector_json(cx.input),
                "outputs_a": _vector_json(cx.outputs_a),
                "outputs_b": _vector_json(cx.outputs_b),
                "witness": cx.witness,
                "bounds_respected": cx.bounds_respected,
                "certified": True,
            }
            exit_code = EXIT_NOT_EQUIVALENT
        except CounterexampleRejection as exc:
            certification = {"status": "rejected", "detail": str(exc)}
            counterexample = {
                "input": _vector_json(exc.input_vector) if exc.input_vector else None,
                "outputs_a": _vector_json(exc.outputs_a) if exc.outputs_a else None,
                "outputs_b": _vector_json(exc.outputs_b) if exc.outputs_b else None,
                "witness": None,
                "bounds_respected": None,
                "certified": False,
            }
            exit_code = EXIT_SOUNDNESS

    report = {
        "schema": REPORT_SCHEMA_ID,
        "relation": {
            "tag": relation.tag,
            "epsilon": format_exact(relation.epsilon) if relation.epsilon is not None else None,
            "k": relation.k,
        },
        "networks": {
            "a": {"name": net_a.name, "path": args.model_a, "param_count": param_count(net_a)},
            "b": {"name": net_b.name, "path": args.model_b, "param_count": param_count(net_b)},
        },
        "variables": query.var_counts,
        "verdict": {
            "tag": verdict.tag,
            "wallclock_s": round(verdict.wallclock_s, 6),
            "timeout_s": verdict.timeout_s,
            "mem_limit_mib": verdict.mem_limit_mib,
            "detail": verdict.detail,
        },
        "solver": solver_identity(cfg),
        "counterexample": counterexample,
        "certification": certification,
        "query_file": cfg.keep_query_path,
        "grid_mode": args.grid_mode,
        "encoding": args.encoding,
        "warnings": list(query.warnings),
        "exit_code": exit_code,
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")

    _print_check_summary(report)
    return exit_code


def _print_check_summary(report) -> None:
    rel = report["relation"]
    params = ""
    if rel["epsilon"] is not None:
        params = f" epsilon={rel['epsilon']}"
    elif rel["k"] is not None:
        params = f" k={rel['k']}"
    print(
        f"relation: {rel['tag']}{params}  networks: {report['networks']['a']['name']}"
        f" vs {report['networks']['b']['name']}"
    )
    counts = report["variables"]
    print(
        f"variables: {counts['inputs']} input, {counts['internal']} internal,"
        f" {counts['outputs']} output"
    )
    for warning in report["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    verdict = report["verdict"]
    meaning = {
        "unsat": "equivalent",
        "sat": "not equivalent",
        "timeout": "inconclusive (time limit)",
        "memout": "inconclusive (memory limit)",
        "unknown": "inconclusive",
        "solver_error": "inconclusive (solver error)",
    }[verdict["tag"]]
    print(f"verdict: {verdict['tag']} ({meaning}) in {verdict['wallclock_s']:.3f} s")
    if verdict["detail"]:
        print(f"detail: {verdict['detail']}", file=sys.stderr)
    cx = report["counterexample"]
    if cx and cx["certified"]:
        exact = ", ".join(cx["input"]["exact"])
        approx = ", ".join(cx["input"]["decimal"])
        print(f"counterexample input: ({exact})  ~ ({approx})")
        print(f"  outputs A: ({', '.join(cx['outputs_a']['exact'])})")
        print(f"  outputs B: ({', '.join(cx['outputs_b']['exact'])})")
        print(f"  witness: {cx['witness']}")
        if not cx["bounds_respected"]:
            print("  note: input violates the declared bounds", file=sys.stderr)
    elif report["certification"] and report["certification"]["status"] == "rejected":
        print(
            f"SOUNDNESS FAILURE: {report['certification']['detail']}",
            file=sys.stderr,
        )


def cmd_encode(args) -> int:
    net_a, net_b = _load_pair(args)
    relation = make_relation(args, net_a.output_dim)
    grid_values = _parse_grid_mode(args.grid_mode, net_a.input_dim) if args.grid_mode else None
    try:
        query = build_query(
            net_a, net_b, relation, grid_values=grid_values, encoding=args.encoding
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = serialize_smtlib(query)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {args.output}")
    return EXIT_EQUIVALENT


def _parse_input_vector(text: str, n: int):
    parts = [p.strip() for p in text.split(",") if p.strip() != ""]
    if len(parts) != n:
        raise UsageError(f"input has {len(parts)} values, network expects {n}")
    try:
        return tuple(rat(p) for p in parts)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_eval(args) -> int:
    from .evaluator import forward

    net = load_network_file(args.model)
    if args.input_file:
        with open(args.input_file, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                y = forward(net, _parse_input_vector(line, net.input_dim))
                print(",".join(decimal_approx(v) for v in y))
        return EXIT_EQUIVALENT
    if args.input is None:
        raise UsageError("provide an input vector or --input-file")
    y = forward(net, _parse_input_vector(args.input, net.input_dim))
    print(f"outputs (exact):   ({', '.join(format_exact(v) for v in y)})")
    print(f"outputs (decimal): ({', '.join(decimal_approx(v) for v in y)})")
    return EXIT_EQUIVALENT


def cmd_oracle(args) -> int:
    net_a, net_b = _load_pair(args)
    relation = make_relation(args, net_a.output_dim)
    if args.bits and args.grid:
        raise UsageError("choose one of --bits or --grid")
    if args.bits:
        domain = DiscreteDomain.bits(net_a.input_dim)
    elif args.grid:
        parts = args.grid.split(":")
        if len(parts) != 3:
            raise UsageError("--grid expects LO:HI:STEP")
        try:
            domain = DiscreteDomain.grid(net_a.input_dim, parts[0], parts[1], parts[2])
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError("choose an input domain: --bits or --grid LO:HI:STEP")
    try:
        result = exhaustive_check(net_a, net_b, relation, domain, budget=args.budget)
    except (BudgetExceeded, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if result.equivalent:
        print(f"equivalent on all {result.points_checked} domain points")
        return EXIT_EQUIVALENT
    exact = ", ".join(format_exact(v) for v in result.witness_input)
    print(f"violated at ({exact}) after {result.points_checked} points")
    print(f"  outputs A: ({', '.join(format_exact(v) for v in result.outputs_a)})")
    print(f"  outputs B: ({', '.join(format_exact(v) for v in result.outputs_b)})")
    print(f"  witness: {result.witness}")
    return EXIT_NOT_EQUIVALENT


def cmd_perturb(args) -> int:
    net = load_network_file(args.model)
    lo, hi = "0.000001", "0.1"
    if args.range:
        parts = args.range.split(":")
        if len(parts) != 2:
            raise UsageError("--range expects LO:HI")
        lo, hi = parts
    try:
        spec = PerturbationSpec(
            count=args.count,
            lo=rat(lo),
            hi=rat(hi),
            seed=args.seed,
            weights_only=args.weights_only,
            log_uniform=args.log_uniform,
        )
        perturbed, changelog = perturb(net, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out_path = args.output or _default_perturb_path(args.model)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(serialize_network(perturbed))
    changelog_path = args.changelog or out_path + ".changes.json"
    with open(changelog_path, "w", encoding="utf-8") as fh:
        json.dump([record.to_json() for record in changelog], fh, indent=2)
        fh.write("\n")
    print(f"wrote {out_path} ({len(changelog)} parameters changed)")
    print(f"wrote {changelog_path}")
    return EXIT_EQUIVALENT


def _default_perturb_path(model_path: str) -> str:
    base, ext = os.path.splitext(model_path)
    return f"{base}_pert{ext or '.json'}"


def cmd_params(args) -> int:
    net = load_network_file(args.model)
    print(param_count(net))
    return EXIT_EQUIVALENT


def build_parser() -> _Parser:
    parser = _Parser(prog="nnequiv", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="solve an equivalence query and certify any counterexample")
    p_check.add_argument("model_a")
    p_check.add_argument("model_b")
    _add_relation_flags(p_check)
    _add_solver_flags(p_check)
    _add_query_flags(p_check)
    p_check.add_argument("--report", default=None, help="write the machine-readable report here")
    p_check.set_defaults(func=cmd_check)

    p_encode = sub.add_parser("encode", help="emit the SMT-LIB query without solving")
    p_encode.add_argument("model_a")
    p_encode.add_argument("model_b")
    _add_relation_flags(p_encode)
    _add_query_flags(p_encode)
    p_encode.add_argument("-o", "--output", required=True, help="query file to write")
    p_encode.set_defaults(func=cmd_encode)

    p_eval = sub.add_parser("eval", help="run a model on an input vector")
    p_eval.add_argument("model")
    p_eval.add_argument("input", nargs="?", default=None, help="comma-separated decimals")
    p_eval.add_argument("--input-file", default=None, help="file with one input vector per line")
    p_eval.set_defaults(func=cmd_eval)

    p_oracle = sub.add_parser("oracle", help="decide equivalence exhaustively on a finite domain")
    p_oracle.add_argument("model_a")
    p_oracle.add_argument("model_b")
    _add_relation_flags(p_oracle)
    p_oracle.add_argument("--bits", action="store_true", help="enumerate {0,1} per feature")
    p_oracle.add_argument("--grid", default=None, metavar="LO:HI:STEP", help="arithmetic grid per feature")
    p_oracle.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum number of points")
    p_oracle.set_defaults(func=cmd_oracle)

    p_perturb = sub.add_parser("perturb", help="randomly alter a few parameters and save a copy")
    p_perturb.add_argument("model")
    p_perturb.add_argument("--count", type=int, required=True, help="number of scalar parameters to change")
    p_perturb.add_argument("--seed", type=int, default=0)
    p_perturb.add_argument("--range", default=None, metavar="LO:HI", help="magnitude range (default 0.000001:0.1)")
    p_perturb.add_argument("--weights-only", action="store_true", help="exclude biases")
    p_perturb.add_argument("--log-uniform", action="store_true", help="draw magnitudes log-uniformly")
    p_perturb.add_argument("-o", "--output", default=None, help="perturbed model path")
    p_perturb.add_argument("--changelog", default=None, help="changelog path")
    p_perturb.set_defaults(func=cmd_perturb)

    p_params = sub.add_parser("params", help="print the trainable parameter count")
    p_params.add_argument("model")
    p_params.set_defaults(func=cmd_params)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
