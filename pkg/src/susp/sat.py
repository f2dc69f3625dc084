"""A small CDCL SAT solver and DIMACS helpers.

Two watched literals, first-UIP learning, VSIDS-style activities with phase
saving, and Luby restarts.  It is meant for the formulas produced by the
verification reduction (a few thousand variables at most).

Run as ``python -m susp.sat FILE`` to get SAT-competition style output
(``s SATISFIABLE`` / ``s UNSATISFIABLE`` and exit code 10 / 20).
"""

from __future__ import annotations

import heapq
import sys
from typing import Iterable, Optional

from .errors import Cancelled


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    num_vars = 0
    clauses: list[list[int]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    return num_vars, clauses


def _luby(i: int) -> int:
    """i-th term (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    while True:
        k = 1
        while (1 << k) - 1 < i:
            k += 1
        if (1 << k) - 1 == i:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


class CDCLSolver:
    def __init__(self, num_vars: int, clauses: Iterable[Iterable[int]]):
        self.n = num_vars
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * num_vars + 2)]
        self.value = [0] * (num_vars + 1)  # 1 true, -1 false, 0 unassigned
        self.level = [0] * (num_vars + 1)
        self.reason: list[Optional[int]] = [None] * (num_vars + 1)
        self.activity = [0.0] * (num_vars + 1)
        self.phase = [-1] * (num_vars + 1)
        self.bump = 1.0
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.conflicts = 0
        self.unsat = False
        self._units: list[int] = []
        for clause in clauses:
            self._add_input(list(clause))
        self.heap = [(0.0, v) for v in range(1, num_vars + 1)]

    @staticmethod
    def _w(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _add_input(self, clause: list[int]) -> None:
        seen = set()
        out = []
        for lit in clause:
            if lit == 0 or abs(lit) > self.n:
                raise ValueError(f"literal {lit} out of range")
            if -lit in seen:
                return  # tautology
            if lit not in seen:
                seen.add(lit)
                out.append(lit)
        if not out:
            self.unsat = True
        elif len(out) == 1:
            self._units.append(out[0])
        else:
            self._attach(out)

    def _attach(self, clause: list[int]) -> int:
        idx = len(self.clauses)
        self.clauses.append(clause)
        self.watches[self._w(-clause[0])].append(idx)
        self.watches[self._w(-clause[1])].append(idx)
        return idx

    def _assign(self, lit: int, reason: Optional[int]) -> None:
        var = abs(lit)
        self.value[var] = 1 if lit > 0 else -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)

    def _propagate(self) -> Optional[int]:
        """Unit propagation; returns a conflicting clause index or None."""
        value = self.value
        clauses = self.clauses
        watches = self.watches
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            wl = watches[self._w(lit)]  # clauses watching false_lit
            i = 0
            j = 0
            n = len(wl)
            while i < n:
                ci = wl[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    wl[j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    vk = value[abs(lk)]
                    if (vk if lk > 0 else -vk) != -1:
                        c[1], c[k] = lk, false_lit
                        watches[self._w(-lk)].append(ci)
                        found = True
                        break
                if found:
                    continue
                wl[j] = ci
                j += 1
                if (fv if first > 0 else -fv) == -1:
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    return ci
                self._assign(first, ci)
            del wl[j:]
        return None

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = [False] * (self.n + 1)
        learnt = [0]
        counter = 0
        lit = 0
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        clause = self.clauses[confl]
        while True:
            for q in clause if lit == 0 else clause[1:]:
                var = abs(q)
                if not seen[var] and self.level[var] > 0:
                    seen[var] = True
                    self._bump(var)
                    if self.level[var] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            var = abs(lit)
            seen[var] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[var]]
        learnt[0] = -lit
        if len(learnt) == 1:
            back = 0
        else:
            best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = self.level[abs(learnt[1])]
        self.bump /= 0.95
        return learnt, back

    def _bump(self, var: int) -> None:
        self.activity[var] += self.bump
        if self.activity[var] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.bump *= 1e-100
            self.heap = [(-self.activity[v], v) for v in range(1, self.n + 1) if self.value[v] == 0]
            heapq.heapify(self.heap)
            return
        heapq.heappush(self.heap, (-self.activity[var], var))

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            var = abs(lit)
            self.phase[var] = 1 if lit > 0 else -1
            self.value[var] = 0
            self.reason[var] = None
            heapq.heappush(self.heap, (-self.activity[var], var))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _decide(self) -> int:
        heap = self.heap
        while heap:
            neg_act, var = heapq.heappop(heap)
            if self.value[var] == 0 and -neg_act == self.activity[var]:
                return var if self.phase[var] > 0 else -var
        for var in range(1, self.n + 1):
            if self.value[var] == 0:
                return var if self.phase[var] > 0 else -var
        return 0

    def solve(self, cancel=None) -> Optional[list[int]]:
        """Return a model as a list of signed literals, or None if UNSAT."""
        if self.unsat:
            return None
        for lit in self._units:
            v = self._lit_value(lit)
            if v == -1:
                return None
            if v == 0:
                self._assign(lit, None)
        if self._propagate() is not None:
            return None
        restart_idx = 0
        budget = 100 * _luby(restart_idx + 1)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if cancel is not None and self.conflicts % 64 == 0 and cancel.is_set():
                    raise Cancelled()
                if not self.trail_lim:
                    return None
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._assign(learnt[0], self._attach(learnt))
                continue
            if since_restart >= budget:
                restart_idx += 1
                budget = 100 * _luby(restart_idx + 1)
                since_restart = 0
                self._backtrack(0)
                if cancel is not None and cancel.is_set():
                    raise Cancelled()
                continue
            lit = self._decide()
            if lit == 0:
                return [v if self.value[v] > 0 else -v for v in range(1, self.n + 1)]
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)


def solve_cnf(num_vars: int, clauses, cancel=None) -> Optional[list[int]]:
    return CDCLSolver(num_vars, clauses).solve(cancel=cancel)


def check_model(clauses, model: Iterable[int]) -> bool:
    truth = set(model)
    return all(any(lit in truth for lit in clause) for clause in clauses)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m susp.sat FILE.dimacs", file=sys.stderr)
        return 2
    with open(argv[0], encoding="ascii") as fh:
        num_vars, clauses = parse_dimacs(fh.read())
    model = solve_cnf(num_vars, clauses)
    if model is None:
        print("s UNSATISFIABLE")
        return 20
    print("s SATISFIABLE")
    print("v " + " ".join(str(x) for x in model) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
