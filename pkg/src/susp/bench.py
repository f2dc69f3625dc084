"""Benchmark generation, solver timing, relative scoring and random sweeps.

A benchmark directory holds ``<name>.puz`` / ``<name>.dimacs`` pairs and a
``manifest`` with one line per instance::

    <dimacs path relative to the manifest> <s> <k> <SAT|UNSAT>

SUSPs give unsatisfiable formulas, non-SUSPs satisfiable ones.

Timing CSV columns: ``instance,s,k,expected,status,seconds,mismatch``
where status is SAT, UNSAT, TIMEOUT or CRASH and timeouts record the limit.

Sweep CSV columns: ``s,k,n,mean,median,q1,q3,susp_fraction,`` one count
column per hybrid stage, then ``heuristic_fraction,unique_fraction,
downward2_fraction``.
"""

from __future__ import annotations

import csv
import os
import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .backends import SolverBackend, parse_sat_status, run_command
from .encodings import build_cnf, emit_dimacs
from .errors import Cancelled, InsufficientWitnessesError, SolverCrash, SolverTimeout
from .heuristics import Verdict, heuristic_downward_closed, heuristic_unique_pieces
from .hybrid import DEFAULT_CONFIG, HybridConfig, Stage, verify, verify_detailed
from .puzzle import Puzzle, random_puzzle, read_puzzle, write_puzzle
from .sat import CDCLSolver, parse_dimacs
from .verifiers import _Stop, verify_ip

DEFAULT_SIZES = ((2, 2), (3, 3), (5, 4), (8, 5), (14, 6), (21, 7), (30, 8), (42, 9))
MANIFEST = "manifest"
TIMING_FIELDS = ["instance", "s", "k", "expected", "status", "seconds", "mismatch"]


@dataclass(frozen=True)
class Instance:
    path: str  # DIMACS file
    size: int
    width: int
    label: str  # "SAT" or "UNSAT"

    @property
    def puzzle_path(self) -> str:
        return os.path.splitext(self.path)[0] + ".puz"

    @property
    def name(self) -> str:
        return os.path.splitext(os.path.basename(self.path))[0]


@dataclass
class BenchmarkSet:
    root: str
    instances: list[Instance]
    skipped: list[tuple[int, int]] = field(default_factory=list)

    @property
    def manifest_path(self) -> str:
        return os.path.join(self.root, MANIFEST)


def load_witnesses(paths: Iterable[str]) -> dict[tuple[int, int], list[Puzzle]]:
    """Group ``.puz`` files (or directories of them) by (s, k)."""
    library: dict[tuple[int, int], list[Puzzle]] = {}
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(os.path.join(p, f) for f in sorted(os.listdir(p)) if f.endswith(".puz"))
        else:
            files.append(p)
    for f in files:
        puzzle = read_puzzle(f)
        library.setdefault((puzzle.size, puzzle.width), []).append(puzzle)
    return library


def _random_non_susp(size: int, width: int, rng: random.Random, config: HybridConfig) -> Puzzle:
    while True:
        p = random_puzzle(size, width, rng)
        if not verify(p, config):
            return p


def generate_benchmark(
    out_dir: str,
    witnesses: dict[tuple[int, int], Sequence[Puzzle]],
    sizes: Sequence[tuple[int, int]] = DEFAULT_SIZES,
    n_per_class: int = 10,
    seed: int = 0,
    subset: bool = False,
    config: HybridConfig = DEFAULT_CONFIG,
) -> BenchmarkSet:
    """Write n SUSP and n non-SUSP instances per size, with a manifest.

    Every witness is re-verified exactly before it is emitted.  Without
    ``subset`` a size lacking n distinct witnesses raises
    INSUFFICIENT_WITNESSES; with it, that size is skipped and reported.
    """
    rng = random.Random(seed)
    os.makedirs(out_dir, exist_ok=True)
    instances: list[Instance] = []
    skipped: list[tuple[int, int]] = []
    plan = []
    for s, k in sizes:
        pool = sorted({p.codes: p for p in witnesses.get((s, k), ()) if p.size == s and p.width == k}.values(),
                      key=lambda p: p.codes)
        if len(pool) < n_per_class:
            if subset:
                skipped.append((s, k))
                continue
            raise InsufficientWitnessesError(f"need {n_per_class} distinct ({s},{k}) SUSPs, have {len(pool)}")
        plan.append((s, k, pool))

    for s, k, pool in plan:
        chosen = rng.sample(pool, n_per_class)
        for i, p in enumerate(chosen):
            if not verify_ip(p):
                raise ValueError(f"witness {p!r} is not an SUSP")
            instances.append(_emit(out_dir, f"s{s}_k{k}_susp_{i:02d}", p, "UNSAT"))
        for i in range(n_per_class):
            p = _random_non_susp(s, k, rng, config)
            instances.append(_emit(out_dir, f"s{s}_k{k}_rand_{i:02d}", p, "SAT"))

    with open(os.path.join(out_dir, MANIFEST), "w", encoding="ascii", newline="\n") as fh:
        for inst in instances:
            fh.write(f"{os.path.basename(inst.path)} {inst.size} {inst.width} {inst.label}\n")
    return BenchmarkSet(out_dir, instances, skipped)


def _emit(out_dir: str, name: str, puzzle: Puzzle, label: str) -> Instance:
    write_puzzle(puzzle, os.path.join(out_dir, name + ".puz"))
    path = os.path.join(out_dir, name + ".dimacs")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(emit_dimacs(build_cnf(puzzle)))
    return Instance(path, puzzle.size, puzzle.width, label)


def read_manifest(path: str) -> list[Instance]:
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST)
    root = os.path.dirname(os.path.abspath(path))
    out = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4 or parts[3] not in ("SAT", "UNSAT"):
                raise ValueError(f"bad manifest line: {line.rstrip()!r}")
            out.append(Instance(os.path.join(root, parts[0]), int(parts[1]), int(parts[2]), parts[3]))
    return out


# --- timing ---------------------------------------------------------------

@dataclass
class TimingRow:
    instance: str
    size: int
    width: int
    expected: str
    status: str
    seconds: float

    @property
    def mismatch(self) -> bool:
        return self.status in ("SAT", "UNSAT") and self.status != self.expected


@dataclass
class TimingTable:
    solver: str
    timeout: float
    rows: list[TimingRow]

    @property
    def mismatches(self) -> int:
        return sum(r.mismatch for r in self.rows)

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TIMING_FIELDS)
            for r in self.rows:
                w.writerow([r.instance, r.size, r.width, r.expected, r.status, f"{r.seconds:.6f}", int(r.mismatch)])

    @classmethod
    def read_csv(cls, path: str, solver: Optional[str] = None, timeout: Optional[float] = None) -> "TimingTable":
        with open(path, newline="") as fh:
            rows = [
                TimingRow(d["instance"], int(d["s"]), int(d["k"]), d["expected"], d["status"], float(d["seconds"]))
                for d in csv.DictReader(fh)
            ]
        if timeout is None:
            timeout = max((r.seconds for r in rows if r.status == "TIMEOUT"), default=0.0)
        return cls(solver or os.path.splitext(os.path.basename(path))[0], timeout, rows)


def _run_internal_sat(inst: Instance, timeout: float) -> str:
    with open(inst.path, encoding="ascii") as fh:
        num_vars, clauses = parse_dimacs(fh.read())
    stop = _Stop(None, timeout)
    try:
        model = CDCLSolver(num_vars, clauses).solve(cancel=stop)
    except Cancelled:
        return "TIMEOUT"
    return "UNSAT" if model is None else "SAT"


def _run_hybrid(inst: Instance, config: HybridConfig) -> str:
    return "UNSAT" if verify(read_puzzle(inst.puzzle_path), config) else "SAT"


def run_benchmark(
    instances: Sequence[Instance],
    solver: SolverBackend | str = "internal",
    timeout: float = 60.0,
    config: HybridConfig = DEFAULT_CONFIG,
    name: Optional[str] = None,
) -> TimingTable:
    """Time one solver lane over the instances, one at a time.

    ``solver`` is a backend (internal CDCL on the DIMACS file, or an
    external command) or the string ``"hybrid"`` to time the staged
    verifier on the puzzle files.  Crashes are recorded and the run goes on.
    """
    if isinstance(solver, str) and solver != "hybrid":
        solver = SolverBackend.parse(solver)
    rows = []
    for inst in instances:
        start = time.monotonic()
        try:
            if solver == "hybrid":
                status = _run_hybrid(inst, config)
            elif solver.kind == "internal":
                status = _run_internal_sat(inst, timeout)
            else:
                code, output, _ = run_command(solver.argv(inst.path), timeout)
                status = "SAT" if parse_sat_status(output, code) else "UNSAT"
        except SolverTimeout:
            status = "TIMEOUT"
        except (SolverCrash, OSError):
            status = "CRASH"
        elapsed = time.monotonic() - start
        if status == "TIMEOUT" or elapsed > timeout:
            status, elapsed = "TIMEOUT", timeout
        rows.append(TimingRow(inst.name, inst.size, inst.width, inst.label, status, elapsed))
    if name is None:
        name = "hybrid" if solver == "hybrid" else ("internal" if solver.kind == "internal" else solver.command.split()[0])
    return TimingTable(name, timeout, rows)


@dataclass
class Score:
    solver: str
    sat: float
    unsat: float
    total: float
    timeouts: int
    mismatches: int


def score(tables: Sequence[TimingTable]) -> list[Score]:
    """Relative scores: each instance's time divided by the slowest solver's time on it.

    Timeouts and crashes count as the table's timeout.  Lower is better.
    """
    if not tables:
        return []
    names = [r.instance for r in tables[0].rows]
    for t in tables[1:]:
        if [r.instance for r in t.rows] != names:
            raise ValueError("timing tables cover different instances")

    def charged(t: TimingTable, r: TimingRow) -> float:
        return r.seconds if r.status in ("SAT", "UNSAT") else t.timeout

    out = []
    worst = [max(charged(t, t.rows[i]) for t in tables) for i in range(len(names))]
    for t in tables:
        sat = unsat = 0.0
        for i, r in enumerate(t.rows):
            rel = charged(t, r) / worst[i] if worst[i] > 0 else 1.0
            if r.expected == "SAT":
                sat += rel
            else:
                unsat += rel
        out.append(Score(t.solver, sat, unsat, sat + unsat, sum(r.status == "TIMEOUT" for r in t.rows), t.mismatches))
    return out


def format_scores(scores: Sequence[Score]) -> str:
    lines = [f"{'solver':<20} {'SAT':>8} {'UNSAT':>8} {'total':>8} {'timeouts':>8} {'mismatch':>8}"]
    for s in sorted(scores, key=lambda s: s.total):
        lines.append(f"{s.solver:<20} {s.sat:8.3f} {s.unsat:8.3f} {s.total:8.3f} {s.timeouts:8d} {s.mismatches:8d}")
    return "\n".join(lines) + "\n"


# --- sweep ----------------------------------------------------------------

def sweep(
    sizes: Iterable[int],
    widths: Iterable[int],
    n: int,
    seed: int = 0,
    config: HybridConfig = DEFAULT_CONFIG,
    out_path: Optional[str] = None,
) -> list[dict]:
    """Time the hybrid verifier on n random puzzles per (s, k) and count deciding stages."""
    rng = random.Random(seed)
    stages = list(Stage)
    heuristic = {Stage.UNIQUE_PIECES, Stage.DOWNWARD_CLOSED, Stage.GREEDY}
    records = []
    for k in widths:
        for s in sizes:
            if s > 3**k:
                continue
            times, counts = [], {st: 0 for st in stages}
            susp = unique = down2 = 0
            for _ in range(n):
                p = random_puzzle(s, k, rng)
                t0 = time.perf_counter()
                result = verify_detailed(p, config)
                times.append(time.perf_counter() - t0)
                counts[result.stage] += 1
                susp += result.is_susp
                unique += heuristic_unique_pieces(p) is Verdict.NOT_SUSP
                if s >= 2:
                    down2 += heuristic_downward_closed(p, 2) is Verdict.NOT_SUSP
            q = statistics.quantiles(times, n=4, method="inclusive") if n > 1 else [times[0]] * 3
            rec = {
                "s": s,
                "k": k,
                "n": n,
                "mean": statistics.fmean(times),
                "median": statistics.median(times),
                "q1": q[0],
                "q3": q[2],
                "susp_fraction": susp / n,
            }
            rec.update({f"stage_{st.value}": counts[st] for st in stages})
            rec["heuristic_fraction"] = sum(counts[st] for st in heuristic) / n
            rec["unique_fraction"] = unique / n
            rec["downward2_fraction"] = down2 / n
            records.append(rec)
    if out_path is not None:
        write_sweep_csv(records, out_path)
    return records


def write_sweep_csv(records: Sequence[dict], path_or_file) -> None:
    fields = list(records[0].keys()) if records else ["s", "k", "n"]
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for rec in records:
            w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in rec.items()})
    finally:
        if own:
            fh.close()
