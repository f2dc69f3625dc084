"""Command-line interface.

Exit codes: ``verify`` returns 0 for an SUSP and 1 otherwise; every command
returns 2 on a usage or runtime error (message on standard error).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import bench as bench_mod
from .backends import IP_SOLVER_ENV, SAT_SOLVER_ENV, SolverBackend
from .bounds import BOUND_KINDS, best_bounds, omega_upper
from .encodings import build_cnf, build_ip, emit_dimacs, emit_lp
from .errors import SuspError
from .hybrid import HybridConfig, verify_detailed
from .puzzle import canonical_form, read_puzzle, serialize_puzzle
from .search import count_total_susps, find_susps, sp_bfs
from .verifiers import verify_brute_force, verify_dp, verify_ip, verify_sat


def _backend(spec, env, timeout):
    if spec is None:
        return SolverBackend.from_env(env, timeout)
    return SolverBackend.parse(spec, timeout)


def cmd_verify(args) -> int:
    puzzle = read_puzzle(args.file)
    sat_backend = _backend(args.backend, SAT_SOLVER_ENV, args.timeout)
    ip_backend = _backend(args.ip_backend or args.backend, IP_SOLVER_ENV, args.timeout)
    start = time.perf_counter()
    if args.algo == "hybrid":
        config = HybridConfig(greedy_seed=args.seed, sat_backend=sat_backend, ip_backend=ip_backend)
        result = verify_detailed(puzzle, config)
        is_susp, stage = result.is_susp, result.stage.value
    else:
        fns = {
            "bf": lambda: verify_brute_force(puzzle),
            "dp": lambda: verify_dp(puzzle),
            "sat": lambda: verify_sat(puzzle, sat_backend),
            "ip": lambda: verify_ip(puzzle, ip_backend),
        }
        is_susp, stage = fns[args.algo](), args.algo
    elapsed = time.perf_counter() - start
    print("IS_SUSP" if is_susp else "NOT_SUSP")
    print(f"stage: {stage}")
    print(f"time: {elapsed:.6f} s")
    return 0 if is_susp else 1


def cmd_search(args) -> int:
    report = sp_bfs(
        args.width,
        max_size=args.max_size,
        checkpoint_dir=args.checkpoint,
        workers=args.workers,
        max_frontier=args.max_frontier,
    )
    print(json.dumps(report.to_dict(), sort_keys=True) if args.json else report.to_text(), end="" if not args.json else "\n")
    return 0


def cmd_count(args) -> int:
    report = sp_bfs(args.width, max_size=args.max_size)
    totals = count_total_susps(args.width, args.max_size) if args.totals else {}
    print(f"width {args.width}")
    for size, n in report.class_counts.items():
        line = f"size {size}: {n} classes"
        if size in totals:
            line += f", {totals[size]} total"
        print(line)
    return 0


def cmd_bounds(args) -> int:
    use = set(args.bounds.split(",")) if args.bounds else set(BOUND_KINDS)
    known = {}
    if args.exhaustive is not None:
        known["exhaustive"] = args.exhaustive
    if args.clique is not None:
        known["clique"] = args.clique
    report = best_bounds(
        args.width,
        use,
        known=known,
        previous_best=args.previous_best,
        clique_time_limit=args.clique_time_limit,
    )
    print(report.to_json() if args.json else report.to_text(), end="\n" if args.json else "")
    return 0


def cmd_omega(args) -> int:
    print(f"{omega_upper(args.size, args.width):.4f}")
    return 0


def _write_out(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def cmd_emit_cnf(args) -> int:
    _write_out(emit_dimacs(build_cnf(read_puzzle(args.file))), args.output)
    return 0


def cmd_emit_ip(args) -> int:
    _write_out(emit_lp(build_ip(read_puzzle(args.file))), args.output)
    return 0


def cmd_canon(args) -> int:
    sys.stdout.write(serialize_puzzle(canonical_form(read_puzzle(args.file)).puzzle()))
    return 0


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        s, _, k = item.strip().partition("x")
        out.append((int(s), int(k)))
    return out


def _parse_range(text: str) -> list[int]:
    out = []
    for item in text.split(","):
        lo, sep, hi = item.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def cmd_bench_generate(args) -> int:
    sizes = _parse_sizes(args.sizes) if args.sizes else list(bench_mod.DEFAULT_SIZES)
    library = bench_mod.load_witnesses(args.witnesses or [])
    if args.find_budget:
        for s, k in sizes:
            have = {p.codes for p in library.get((s, k), [])}
            if len(have) < args.n:
                for p in find_susps(s, k, args.n, seed=args.seed, node_budget=args.find_budget, distinct="set"):
                    if p.codes not in have:
                        have.add(p.codes)
                        library.setdefault((s, k), []).append(p)
    result = bench_mod.generate_benchmark(args.out, library, sizes, args.n, args.seed, subset=args.subset)
    print(f"{len(result.instances)} instances written to {result.manifest_path}")
    for s, k in result.skipped:
        print(f"skipped ({s},{k}): not enough witnesses")
    return 0


def cmd_bench_run(args) -> int:
    instances = bench_mod.read_manifest(args.manifest)
    solver = "hybrid" if args.solver == "hybrid" else SolverBackend.parse(args.solver)
    table = bench_mod.run_benchmark(instances, solver, args.timeout, name=args.name)
    if args.csv:
        table.write_csv(args.csv)
    statuses = {}
    for r in table.rows:
        statuses[r.status] = statuses.get(r.status, 0) + 1
    summary = " ".join(f"{k}={v}" for k, v in sorted(statuses.items()))
    print(f"{table.solver}: {len(table.rows)} instances, {summary}, mismatches={table.mismatches}")
    return 0 if table.mismatches == 0 else 1


def cmd_bench_score(args) -> int:
    tables = [bench_mod.TimingTable.read_csv(p, timeout=args.timeout) for p in args.csv]
    sys.stdout.write(bench_mod.format_scores(bench_mod.score(tables)))
    return 0


def cmd_bench_sweep(args) -> int:
    records = bench_mod.sweep(_parse_range(args.sizes), _parse_range(args.widths), args.n, args.seed)
    if args.out:
        bench_mod.write_sweep_csv(records, args.out)
    else:
        bench_mod.write_sweep_csv(records, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="susp", description="Strong uniquely solvable puzzle toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="decide whether a puzzle is an SUSP")
    p.add_argument("file")
    p.add_argument("--algo", choices=["bf", "dp", "sat", "ip", "hybrid"], default="hybrid")
    p.add_argument("--backend", help="internal or cmd:<template> (default from $%s)" % SAT_SOLVER_ENV)
    p.add_argument("--ip-backend", help="backend for the IP route (default from $%s)" % IP_SOLVER_ENV)
    p.add_argument("--timeout", type=float, help="per-solver timeout in seconds")
    p.add_argument("--seed", type=int, default=0, help="greedy heuristic seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exhaustive search for maximum-size SUSPs")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--max-size", type=int)
    p.add_argument("--checkpoint", metavar="DIR")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-frontier", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("count", help="SUSP counts per size")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--max-size", type=int)
    p.add_argument("--totals", action="store_true", help="also count ordered SUSPs (width <= 4)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bounds", help="upper bounds on SUSP size")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--bounds", help="comma list from: " + ",".join(BOUND_KINDS))
    p.add_argument("--exhaustive", type=int, help="known exhaustive maximum for this width")
    p.add_argument("--clique", type=int, help="known clique bound for this width")
    p.add_argument("--previous-best", type=int, help="best bound at width-1, for the lift")
    p.add_argument("--clique-time-limit", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("omega", help="omega bound implied by an (s,k)-SUSP")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.set_defaults(func=cmd_omega)

    for name, func, what in (("emit-cnf", cmd_emit_cnf, "DIMACS CNF"), ("emit-ip", cmd_emit_ip, "LP")):
        p = sub.add_parser(name, help=f"write the {what} encoding")
        p.add_argument("file")
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)

    p = sub.add_parser("canon", help="print the canonical representative")
    p.add_argument("file")
    p.set_defaults(func=cmd_canon)

    bench = sub.add_parser("bench", help="benchmark tools")
    bsub = bench.add_subparsers(dest="bench_command", required=True)

    p = bsub.add_parser("generate")
    p.add_argument("--out", required=True)
    p.add_argument("--witnesses", nargs="*", help=".puz files or directories")
    p.add_argument("--sizes", help="e.g. 2x2,3x3,5x4 (default: the eight standard sizes)")
    p.add_argument("--n", type=int, default=10, help="instances per label per size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subset", action="store_true", help="skip sizes without enough witnesses")
    p.add_argument("--find-budget", type=int, default=0, help="random search budget for missing witnesses")
    p.set_defaults(func=cmd_bench_generate)

    p = bsub.add_parser("run")
    p.add_argument("--manifest", required=True, help="manifest file or benchmark directory")
    p.add_argument("--solver", default="internal", help="internal, hybrid or cmd:<template>")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--name")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench_run)

    p = bsub.add_parser("score")
    p.add_argument("csv", nargs="+")
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_bench_score)

    p = bsub.add_parser("sweep")
    p.add_argument("--sizes", required=True, help="e.g. 1-50")
    p.add_argument("--widths", required=True, help="e.g. 6,9")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SuspError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
