"""Exact SUSP verifiers: brute force, bidirectional DP, SAT and IP routes."""

from __future__ import annotations

import time
from itertools import permutations

from .backends import SolverBackend, run_external
from .encodings import build_cnf, build_ip, decode_cnf_model, emit_dimacs, emit_lp, ip_assignment_feasible
from .errors import Cancelled, SizeLimitError, SolverTimeout
from .matching import blocked_mask_array, build_matching_instance, find_nontrivial_matching, is_valid_matching
from .puzzle import Puzzle
from .sat import CDCLSolver

DP_MAX_SIZE = 20


def verify_brute_force(puzzle: Puzzle) -> bool:
    """Check every (pi_2, pi_3) pair with pi_1 fixed to the identity.

    For each pi_2 the pi_3 candidates are enumerated depth-first, dropping a
    prefix as soon as one of its rows is already blocked, since every
    completion of that prefix satisfies the definition.
    """
    s = puzzle.size
    if s <= 1:
        return True
    blocked = blocked_mask_array(puzzle).tolist()
    identity = tuple(range(s))

    for pi2 in permutations(range(s)):
        allowed = [[x for x in range(s) if not blocked[r][pi2[r]][x]] for r in range(s)]
        if any(not a for a in allowed):
            continue
        pi2_is_id = pi2 == identity
        pi3 = [0] * s

        def extend(r: int, used: int) -> bool:
            if r == s:
                return not (pi2_is_id and tuple(pi3) == identity)
            for x in allowed[r]:
                if not (used >> x) & 1:
                    pi3[r] = x
                    if extend(r + 1, used | (1 << x)):
                        return True
            return False

        if extend(0, 0):
            return False
    return True


def verify_dp(puzzle: Puzzle, max_size: int = DP_MAX_SIZE) -> bool:
    """Meet-in-the-middle over the first and second halves of the rows.

    Each half produces every pair (Q, R) of second/third-coordinate vertex
    sets it can be matched onto, with flags recording whether some matching
    reaching (Q, R) is all-diagonal (1) or non-trivial (2).  The puzzle fails
    when complementary pairs from the two halves meet with at least one side
    non-trivial.
    """
    s = puzzle.size
    if s > max_size:
        raise SizeLimitError(f"dynamic programming limited to s <= {max_size}, got {s}")
    if s <= 1:
        return True
    pairs = build_matching_instance(puzzle).pairs()
    half = s // 2

    def sweep(rows) -> dict:
        layer = {(0, 0): 1}
        for u in rows:
            nxt: dict = {}
            for (q, r), flags in layer.items():
                for v, w in pairs[u]:
                    if (q >> v) & 1 or (r >> w) & 1:
                        continue
                    key = (q | (1 << v), r | (1 << w))
                    nxt[key] = nxt.get(key, 0) | (flags if u == v == w else 2)
            layer = nxt
        return layer

    first = sweep(range(half))
    full = (1 << s) - 1
    for (q, r), flags in sweep(range(s - 1, half - 1, -1)).items():
        other = first.get((full ^ q, full ^ r))
        if other and (flags | other) & 2:
            return False
    return True


class _Stop:
    """Cancel event that also fires once a wall-clock deadline passes."""

    def __init__(self, cancel=None, timeout=None):
        self.cancel = cancel
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.timed_out = False

    def is_set(self) -> bool:
        if self.cancel is not None and self.cancel.is_set():
            return True
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.timed_out = True
            return True
        return False


def _run_internal(fn, backend: SolverBackend, cancel):
    stop = _Stop(cancel, backend.timeout)
    try:
        return fn(stop)
    except Cancelled:
        if stop.timed_out:
            raise SolverTimeout(f"internal solver exceeded {backend.timeout:g} s") from None
        raise


def verify_sat(puzzle: Puzzle, backend: SolverBackend | None = None, cancel=None) -> bool:
    """SUSP iff the CNF encoding is unsatisfiable."""
    backend = backend or SolverBackend()
    if puzzle.size == 0:
        return True
    instance = build_matching_instance(puzzle)
    formula = build_cnf(puzzle, instance)
    if backend.kind == "external":
        return not run_external(backend, emit_dimacs(formula), ".dimacs", cancel)

    def solve(stop):
        model = CDCLSolver(formula.num_vars, formula.clauses).solve(cancel=stop)
        if model is None:
            return True
        triples = decode_cnf_model(formula, model)
        if not is_valid_matching(instance, triples):
            raise AssertionError("SAT model does not decode to a non-trivial matching")
        return False

    return _run_internal(solve, backend, cancel)


def verify_ip(puzzle: Puzzle, backend: SolverBackend | None = None, cancel=None) -> bool:
    """SUSP iff the 0-1 model is infeasible.

    The internal backend decides feasibility with the exact matcher and
    checks any matching it finds against the model's constraints.
    """
    backend = backend or SolverBackend()
    if puzzle.size == 0:
        return True
    instance = build_matching_instance(puzzle)
    model = build_ip(puzzle, instance)
    if backend.kind == "external":
        return not run_external(backend, emit_lp(model), ".lp", cancel)

    def solve(stop):
        found = find_nontrivial_matching(instance, cancel=stop)
        if found is None:
            return True
        if not ip_assignment_feasible(model, found.triples):
            raise AssertionError("matching violates the IP model")
        return False

    return _run_internal(solve, backend, cancel)


ALGORITHMS = {
    "bf": verify_brute_force,
    "dp": verify_dp,
    "sat": verify_sat,
    "ip": verify_ip,
}
