"""Command-line driver.

Subcommands: solve, kernelize, generate, verify, bench, oracle.  Exit codes:
0 success/YES, 1 NO, 2 timeout, 64 usage error, 65 data error.  Diagnostics
go to stderr and are controlled by the DECAF_LOG environment variable (off,
info, debug); stdout carries only data.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from fractions import Fraction

from .bench import PRESETS, parse_config_list, run_bench, summarize
from .gen import GenSpec, corpus, generate
from .instance import STAR, InstanceError, WeightedGraph, from_graph
from .io_formats import (
    ParseError,
    parse_instance,
    parse_solution,
    write_bench_csv,
    write_instance,
    write_manifest,
    write_solution,
    write_truth,
)
from .kernel import kernelize
from .oracle import OracleSizeError, brute_force_decide, minimal_k, verify
from .pipeline import solve_instance
from .search import SolveConfig
from .solution import Decomposition

__all__ = ["main"]

EX_OK = 0
EX_NO = 1
EX_TIMEOUT = 2
EX_USAGE = 64
EX_DATA = 65

log = logging.getLogger("decaf")

_SRULE_CHOICES = {
    "none": ("arbitrary", False, False),
    "0": ("push_front", False, False),
    "01": ("push_front", True, False),
    "012": ("push_front", True, True),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EX_USAGE)


def _setup_logging() -> None:
    level = os.environ.get("DECAF_LOG", "off").lower()
    if level == "off":
        logging.disable(logging.CRITICAL)
        return
    numeric = {"info": logging.INFO, "debug": logging.DEBUG}.get(level)
    if numeric is None:
        numeric = logging.INFO
    logging.basicConfig(stream=sys.stderr, level=numeric, format="decaf: %(message)s")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _solve_config(args) -> SolveConfig:
    default_order, srule1, srule2 = _SRULE_CHOICES[args.srules]
    return SolveConfig(
        ordering=args.order or default_order,
        srule1=srule1,
        srule2=srule2,
        column_symmetry_breaking=args.symmetry_break,
        lp_mode=args.lp,
        timeout=args.timeout,
    )


def _cmd_solve(args) -> int:
    graph, annotations = parse_instance(_read(args.input))
    result = solve_instance(
        graph,
        args.k,
        annotations=annotations,
        kernel_variant=args.kernel,
        config=_solve_config(args),
        isolated_policy=args.isolated.replace("-", "_"),
    )
    log.info(
        "outcome=%s kernel=%s n_kernel=%d lp_runs=%d",
        result.outcome, args.kernel, result.n_kernel, result.stats.lp_runs,
    )
    stats = {
        "k_in": args.k,
        "k_effective": result.k_effective,
        "kernel_variant": args.kernel,
        "n_kernel": result.n_kernel,
        "lp_runs": result.stats.lp_runs,
        "signatures_tested": result.stats.signatures_tested,
        "backtracks": result.stats.backtracks,
        "wall_ms": int(result.wall_time * 1000),
    }
    _emit(
        write_solution(
            result.outcome,
            result.decomposition,
            stats,
            include_singletons=bool(annotations),
        ),
        args.out,
    )
    return {"yes": EX_OK, "no": EX_NO, "timeout": EX_TIMEOUT}[result.outcome]


def _cmd_kernelize(args) -> int:
    graph, annotations = parse_instance(_read(args.input))
    matrix = from_graph(graph, annotations)
    result = kernelize(matrix, args.k, args.variant)
    if result.is_no:
        sys.stderr.write(f"no: {result.reason}\n")
        return EX_NO
    kernel = result.matrix
    edges = []
    out_annotations = {}
    for i in range(kernel.n):
        if kernel.rows[i][i] is not STAR:
            out_annotations[i] = kernel.rows[i][i]
        for j in range(i + 1, kernel.n):
            if kernel.rows[i][j] != 0:
                edges.append((i, j, kernel.rows[i][j]))
    comment = (
        f"kernel variant={args.variant} k={args.k} "
        f"n_before={result.stats.n_before} n_after={result.stats.n_after} "
        f"blocks={result.stats.block_count} reductions={result.stats.rule_applications}"
    )
    _emit(
        write_instance(WeightedGraph(kernel.n, edges), out_annotations, comment=comment),
        args.out,
    )
    return EX_OK


def _cmd_generate(args) -> int:
    spec = GenSpec(
        n=args.n,
        k_true=args.k_true[0],
        size_range=(args.size_min, args.size_max),
        weight_range=(args.weight_min, args.weight_max),
        overlap_bias=Fraction(args.overlap_bias),
        seed=args.seed,
    )
    if args.out:
        instance = generate(spec)
        _emit(write_instance(instance.graph, comment=f"seed={args.seed}"), args.out)
        truth_path = args.out + ".truth"
        with open(truth_path, "w", encoding="utf-8") as fh:
            fh.write(write_truth(instance.k_true, instance.planted))
        return EX_OK
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    multipliers = [m.strip() for m in args.kin_mults.split(",") if m.strip()]
    pairs = corpus(spec, args.k_true, args.count, multipliers)
    index: dict[int, int] = {}
    seen_files: dict[int, tuple[str, str]] = {}
    for instance, k_in in pairs:
        key = id(instance)
        if key not in seen_files:
            i = index.get(instance.k_true, 0)
            index[instance.k_true] = i + 1
            stem = f"planted_k{instance.k_true}_i{i}"
            inst_file = f"{stem}.ewcd"
            truth_file = f"{stem}.truth"
            with open(os.path.join(args.out_dir, inst_file), "w", encoding="utf-8") as fh:
                fh.write(write_instance(instance.graph, comment=stem))
            with open(os.path.join(args.out_dir, truth_file), "w", encoding="utf-8") as fh:
                fh.write(write_truth(instance.k_true, instance.planted))
            seen_files[key] = (inst_file, truth_file)
        inst_file, truth_file = seen_files[key]
        expected = "yes" if k_in >= instance.k_true else "unlabeled"
        rows.append(
            {
                "instance_id": f"{inst_file[:-5]}_kin{k_in}",
                "file": inst_file,
                "truth_file": truth_file,
                "n": instance.graph.n,
                "m": instance.graph.m,
                "k_true": instance.k_true,
                "k_in": k_in,
                "expected": expected,
            }
        )
    with open(os.path.join(args.out_dir, "manifest.csv"), "w", encoding="utf-8") as fh:
        fh.write(write_manifest(rows))
    log.info("wrote %d manifest rows to %s", len(rows), args.out_dir)
    return EX_OK


def _cmd_verify(args) -> int:
    graph, annotations = parse_instance(_read(args.input))
    doc = parse_solution(_read(args.solution))
    if doc.outcome != "yes":
        sys.stderr.write("solution file does not claim yes; nothing to verify\n")
        return EX_DATA
    matrix = from_graph(graph, annotations)
    k = len(doc.cliques)
    rows = [0] * graph.n
    gamma = []
    for q, (weight, members) in enumerate(doc.cliques):
        gamma.append(weight)
        for v in members:
            if not 0 <= v < graph.n:
                sys.stderr.write(f"clique member {v} outside vertex range\n")
                return EX_DATA
            rows[v] |= 1 << q
    report = verify(matrix, rows, gamma)
    if report.ok:
        return EX_OK
    i, j, lhs, rhs = report.first_violation
    print(f"violation at ({i},{j}): solution gives {lhs}, instance requires {rhs}")
    return EX_NO


def _cmd_bench(args) -> int:
    configs = parse_config_list(args.configs)
    records = run_bench(args.corpus, configs, timeout=args.timeout, jobs=args.jobs)
    _emit(write_bench_csv(records), args.out)
    sys.stdout.write(summarize(records, configs))
    return EX_OK


def _cmd_oracle(args) -> int:
    graph, annotations = parse_instance(_read(args.input))
    matrix = from_graph(graph, annotations)
    if args.min_k:
        result = minimal_k(matrix, args.k_cap, max_n=args.max_n, max_k=args.max_k)
        if result > args.k_cap:
            print(f"minimal_k > {args.k_cap}")
            return EX_NO
        print(f"minimal_k {result}")
        return EX_OK
    solution = brute_force_decide(matrix, args.k, max_n=args.max_n, max_k=args.max_k)
    if solution is None:
        print("no")
        return EX_NO
    print(write_solution("yes", solution, include_singletons=bool(annotations)), end="")
    return EX_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="decaf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="kernelize, decompose, and lift one instance")
    solve.add_argument("--input", required=True)
    solve.add_argument("--k", type=int, required=True)
    solve.add_argument("--kernel", choices=("none", "cricca", "decaf"), default="decaf")
    solve.add_argument("--order", choices=("arbitrary", "push_front", "push_back", "keep_first"))
    solve.add_argument("--srules", choices=tuple(_SRULE_CHOICES), default="012")
    solve.add_argument("--symmetry-break", action="store_true")
    solve.add_argument("--lp", choices=("rational", "float"), default="rational")
    solve.add_argument("--timeout", type=float)
    solve.add_argument("--out", default="-")
    solve.add_argument("--isolated", choices=("ignore", "consume-k"), default="ignore")
    solve.set_defaults(func=_cmd_solve)

    kern = sub.add_parser("kernelize", help="emit the kernelized instance")
    kern.add_argument("--input", required=True)
    kern.add_argument("--k", type=int, required=True)
    kern.add_argument("--variant", choices=("cricca", "decaf"), default="decaf")
    kern.add_argument("--out", default="-")
    kern.set_defaults(func=_cmd_kernelize)

    gen = sub.add_parser("generate", help="write planted instances (one file or a corpus)")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k-true", type=int, nargs="+", required=True)
    gen.add_argument("--count", type=int, default=1, help="instances per k (corpus mode)")
    gen.add_argument("--kin-mults", default="1.0", help="comma list of k_in multipliers")
    gen.add_argument("--size-min", type=int, default=2)
    gen.add_argument("--size-max", type=int, default=6)
    gen.add_argument("--weight-min", type=int, default=1)
    gen.add_argument("--weight-max", type=int, default=5)
    gen.add_argument("--overlap-bias", default="0.5")
    gen.add_argument("--seed", type=int, default=0)
    group = gen.add_mutually_exclusive_group(required=True)
    group.add_argument("--out", help="single-instance output file")
    group.add_argument("--out-dir", help="corpus output directory (writes manifest.csv)")
    gen.set_defaults(func=_cmd_generate)

    ver = sub.add_parser("verify", help="check a solution file against an instance")
    ver.add_argument("--input", required=True)
    ver.add_argument("--solution", required=True)
    ver.set_defaults(func=_cmd_verify)

    bench = sub.add_parser("bench", help="run configurations over a corpus")
    bench.add_argument("--corpus", required=True)
    bench.add_argument("--configs", default="decaf,cricca-star")
    bench.add_argument("--timeout", type=float)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=_cmd_bench)

    orc = sub.add_parser("oracle", help="brute-force decide a small instance")
    orc.add_argument("--input", required=True)
    orc.add_argument("--k", type=int)
    orc.add_argument("--min-k", action="store_true")
    orc.add_argument("--k-cap", type=int, default=3)
    orc.add_argument("--max-n", type=int, default=10)
    orc.add_argument("--max-k", type=int, default=3)
    orc.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "oracle" and not args.min_k and args.k is None:
        parser.error("oracle requires --k or --min-k")
    if args.command == "generate" and len(args.k_true) > 1 and args.out:
        parser.error("--out takes a single --k-true value; use --out-dir for corpora")
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EX_DATA
    except (InstanceError, OracleSizeError) as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EX_DATA
    except FileNotFoundError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EX_DATA
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
