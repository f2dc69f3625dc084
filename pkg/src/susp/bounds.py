"""Upper bounds on SUSP size and the matrix multiplication exponent they imply."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import linprog

from .errors import SizeLimitError, TimeLimitError
from .puzzle import Puzzle, all_rows, row_text

BOUND_KINDS = ("omega", "unique", "usp", "clique", "exhaustive", "lift")
DEFAULT_KINDS = frozenset({"omega", "unique", "usp", "clique", "exhaustive", "lift"})

_OMEGA_TAIL = 64
_OMEGA_MAX_M = 10**7
_OMEGA_MAX_WIDTH = 16

CLIQUE_MAX_WIDTH = 6
# Exhaustive search is run on demand only up to this width.
EXHAUSTIVE_MAX_WIDTH = 4


def _log_factorial(s: int) -> float:
    return math.fsum(math.log(i) for i in range(2, s + 1))


def _omega_raw(s: int, k: int) -> float:
    """Minimum over integer m >= 3 of the exponent bound, without clamping."""
    if s < 1 or k < 1:
        raise ValueError("omega needs s >= 1 and k >= 1")
    if s == 1:
        # log s! = 0, so the expression is 3 log m / log(m-1), decreasing to 3
        return 3.0
    per_row = _log_factorial(s) / (s * k)
    best = math.inf
    rising = 0
    prev = math.inf
    m = 3
    while m <= _OMEGA_MAX_M:
        lm1 = math.log(m - 1)
        value = (3.0 * math.log(m) - 3.0 * per_row) / lm1
        best = min(best, value)
        rising = rising + 1 if value > prev else 0
        if rising >= _OMEGA_TAIL:
            break
        prev = value
        m += 1
    return best


def omega_upper(s: int, k: int) -> float:
    """Bound on omega implied by an (s, k)-SUSP, clamped below at 2."""
    return max(2.0, _omega_raw(s, k))


def omega_bound_size(k: int) -> int:
    """Largest s whose (s, k)-SUSP would not imply omega < 2."""
    if not 1 <= k <= _OMEGA_MAX_WIDTH:
        raise SizeLimitError(f"omega bound supports 1 <= k <= {_OMEGA_MAX_WIDTH}, got {k}")
    # raw omega is non-increasing in s; bracket then bisect
    lo, hi = 1, 2
    while _omega_raw(hi, k) >= 2.0:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _omega_raw(mid, k) >= 2.0:
            lo = mid
        else:
            hi = mid
    return lo


def unique_pieces_bound(k: int) -> int:
    return 2**k


def usp_bound(k: int) -> int:
    total = 0
    for c1 in range(k + 1):
        for c2 in range(k - c1 + 1):
            total += min(math.comb(k, c1), math.comb(k, c2), math.comb(k, k - c1 - c2))
    return total


def lift_bound(u: int) -> int:
    """Bound at width k+1 from a bound u at width k: some column symbol occurs in a third of the rows."""
    if u < 0:
        raise ValueError("bound must be non-negative")
    return 3 * u


# --- clique bound ---------------------------------------------------------

def pair_is_susp(a: Puzzle | tuple, b=None) -> bool:
    """Two distinct rows form an SUSP iff every symbol occupies different columns in them."""
    if b is None:
        ma, mb = a.masks
    else:
        ma, mb = a, b
    return ma[0] != mb[0] and ma[1] != mb[1] and ma[2] != mb[2]


def build_pair_graph(k: int) -> list[int]:
    """Adjacency bitsets over the rows of width k, indexed by row code."""
    if k > CLIQUE_MAX_WIDTH:
        raise SizeLimitError(f"pair graph limited to k <= {CLIQUE_MAX_WIDTH}, got {k}")
    masks = Puzzle(k, all_rows(k)).masks
    n = len(masks)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if pair_is_susp(masks[i], masks[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


@dataclass
class CliqueResult:
    size: int
    rows: list[int]
    exact: bool
    nodes: int = 0


def max_clique(adj: list[int], time_limit: Optional[float] = None, start: Iterable[int] | None = None) -> CliqueResult:
    """Branch and bound with greedy-colouring bounds on bitset adjacency.

    Vertices are renumbered by non-increasing degree.  ``start`` restricts
    the first vertex of the clique to the given set; the caller must ensure
    that some maximum clique contains one of them.
    """
    n = len(adj)
    if n == 0:
        return CliqueResult(0, [], True)
    order = sorted(range(n), key=lambda v: -bin(adj[v]).count("1"))
    pos = {v: i for i, v in enumerate(order)}
    nbr = [0] * n
    for v in range(n):
        bits = 0
        a = adj[v]
        while a:
            low = a & -a
            bits |= 1 << pos[low.bit_length() - 1]
            a ^= low
        nbr[pos[v]] = bits
    deadline = None if time_limit is None else time.monotonic() + time_limit
    best: list[int] = [order[0]]
    nodes = 0
    timed_out = False

    def colour(cands: int) -> list[tuple[int, int]]:
        out = []
        c = 0
        while cands:
            c += 1
            q = cands
            while q:
                low = q & -q
                v = low.bit_length() - 1
                q &= ~nbr[v] & ~low
                cands &= ~low
                out.append((v, c))
        return out

    def expand(clique: list[int], cands: int):
        nonlocal best, nodes, timed_out
        nodes += 1
        if deadline is not None and nodes & 1023 == 0 and time.monotonic() > deadline:
            timed_out = True
        if timed_out:
            return
        for v, c in reversed(colour(cands)):
            if len(clique) + c <= len(best):
                return
            clique.append(v)
            sub = cands & nbr[v]
            if sub:
                expand(clique, sub)
            elif len(clique) > len(best):
                best = [order[u] for u in clique]
            clique.pop()
            cands &= ~(1 << v)
            if timed_out:
                return

    if start is None:
        expand([], (1 << n) - 1)
    else:
        for r in start:
            p = pos[r]
            if len(best) < 1:
                best = [r]
            expand([p], nbr[p])
            if timed_out:
                break
    return CliqueResult(len(best), sorted(best), not timed_out, nodes)


def _orbit_representatives(k: int) -> list[int]:
    """One row per orbit of rows under column and symbol permutations: sorted symbol counts."""
    reps = []
    for a in range(k + 1):
        for b in range(a + 1):
            c = k - a - b
            if 0 <= c <= b:
                row = "1" * a + "2" * b + "3" * c
                reps.append(Puzzle.from_rows([row]).codes[0])
    return reps


def _lp_bound(cands: list[int], labels) -> tuple[float, list[float]]:
    """LP relaxation: at most one chosen row per (symbol, mask) class."""
    classes: dict = {}
    for j, x in enumerate(cands):
        for e in range(3):
            classes.setdefault((e, labels[x][e]), []).append(j)
    groups = [js for js in classes.values() if len(js) > 1]
    if not groups:
        return float(len(cands)), [1.0] * len(cands)
    A = np.zeros((len(groups), len(cands)))
    for i, js in enumerate(groups):
        A[i, js] = 1.0
    res = linprog(-np.ones(len(cands)), A_ub=A, b_ub=np.ones(len(groups)), bounds=(0, 1), method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP relaxation failed: {res.message}")
    return -res.fun, list(res.x)


def pair_clique_search(k: int, time_limit: Optional[float] = None) -> CliqueResult:
    """Maximum clique of the pair graph, exploiting its structure.

    A clique is a set of rows whose symbol-1 masks are pairwise distinct,
    and likewise for symbols 2 and 3, i.e. a matching in a 3-partite
    hypergraph.  Nodes are pruned first by the colouring given by the mask
    classes (rows sharing a mask are pairwise non-adjacent) and then by the
    LP relaxation of that matching problem, which is nearly tight here.
    Branching is binary on the most fractional LP variable.  The first row
    is restricted to orbit representatives under column and symbol
    permutations, which act on the graph as automorphisms; each orbit is
    dropped once it has been searched.
    """
    if k < 1:
        return CliqueResult(1 if k == 0 else 0, [0] if k == 0 else [], True)
    if k > CLIQUE_MAX_WIDTH:
        raise SizeLimitError(f"pair graph limited to k <= {CLIQUE_MAX_WIDTH}, got {k}")
    labels = Puzzle(k, all_rows(k)).masks
    deadline = None if time_limit is None else time.monotonic() + time_limit
    best: list[int] = []
    nodes = 0
    timed_out = False

    def compatible(x: int, r: int) -> bool:
        lx, lr = labels[x], labels[r]
        return lx[0] != lr[0] and lx[1] != lr[1] and lx[2] != lr[2]

    for r in range(len(labels)):  # greedy incumbent
        if all(compatible(r, x) for x in best):
            best.append(r)

    def solve(cands: list[int], chosen: list[int]):
        nonlocal best, nodes, timed_out
        nodes += 1
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
        if timed_out:
            return
        if len(chosen) > len(best):
            best = list(chosen)
        if not cands:
            return
        colours = min(len({labels[x][e] for x in cands}) for e in range(3))
        if len(chosen) + colours <= len(best):
            return
        value, x = _lp_bound(cands, labels)
        if len(chosen) + math.floor(value + 1e-7) <= len(best):
            return
        frac = [(abs(v - 0.5), j) for j, v in enumerate(x) if 1e-7 < v < 1 - 1e-7]
        if not frac:
            picked = [cands[j] for j, v in enumerate(x) if v > 0.5]
            if len(chosen) + len(picked) > len(best):
                best = chosen + picked
            return
        r = cands[min(frac)[1]]
        solve([y for y in cands if compatible(y, r)], chosen + [r])
        solve([y for y in cands if y != r], chosen)

    # Once every clique through an orbit has been examined, the whole orbit
    # can be dropped; large orbits go first so later subproblems shrink.
    orbit_of = [tuple(sorted((bin(m).count("1") for m in lab), reverse=True)) for lab in labels]
    alive = [True] * len(labels)
    for rep in sorted(_orbit_representatives(k), key=lambda r: -orbit_of.count(orbit_of[r])):
        solve([x for x in range(len(labels)) if alive[x] and compatible(x, rep)], [rep])
        if timed_out:
            break
        for x in range(len(labels)):
            if orbit_of[x] == orbit_of[rep]:
                alive[x] = False
    return CliqueResult(len(best), sorted(best), not timed_out, nodes)


def clique_search(k: int, time_limit: Optional[float] = None) -> CliqueResult:
    return pair_clique_search(k, time_limit)


def clique_bound(k: int, time_limit: Optional[float] = None) -> int:
    result = clique_search(k, time_limit)
    if not result.exact:
        err = TimeLimitError(f"clique search for k={k} stopped after {time_limit:g} s; best found {result.size}")
        err.partial = result
        raise err
    return result.size


# --- combined report ------------------------------------------------------

@dataclass
class BoundsReport:
    width: int
    values: dict[str, int] = field(default_factory=dict)
    best: Optional[int] = None
    best_source: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "bounds": dict(self.values),
            "best": self.best,
            "best_source": self.best_source,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        header = ["k"] + [kind for kind in BOUND_KINDS if kind in self.values] + ["best"]
        cells = [str(self.width)] + [str(self.values[k]) for k in header[1:-1]]
        cells.append(f"{self.best} ({self.best_source})" if self.best is not None else "-")
        widths = [max(len(h), len(c)) for h, c in zip(header, cells)]
        lines = [
            "  ".join(h.rjust(w) for h, w in zip(header, widths)),
            "  ".join(c.rjust(w) for c, w in zip(cells, widths)),
        ]
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def best_bounds(
    k: int,
    use: Iterable[str] = DEFAULT_KINDS,
    known: Optional[dict[str, int]] = None,
    previous_best: Optional[int] = None,
    clique_time_limit: Optional[float] = None,
    clique_max_width: int = CLIQUE_MAX_WIDTH,
) -> BoundsReport:
    """Compute the requested bounds for width k and take the minimum.

    ``known`` supplies values that are too expensive to recompute (for
    example an exhaustive result or a published clique value); they override
    computation for their kind.  ``previous_best`` is the best bound at width
    k-1 used by the lift; without it the lift recurses on k-1 with the same
    settings (minus ``known``).
    """
    use = set(use)
    unknown = use - set(BOUND_KINDS)
    if unknown:
        raise ValueError(f"unknown bound kinds: {sorted(unknown)}")
    known = dict(known or {})
    report = BoundsReport(k)
    values = report.values

    for kind, value in known.items():
        if kind in use:
            values[kind] = int(value)
    if "omega" in use and "omega" not in values:
        values["omega"] = omega_bound_size(k)
    if "unique" in use and "unique" not in values:
        values["unique"] = unique_pieces_bound(k)
    if "usp" in use and "usp" not in values:
        values["usp"] = usp_bound(k)
    if "clique" in use and "clique" not in values:
        if k <= clique_max_width:
            try:
                values["clique"] = clique_bound(k, clique_time_limit)
            except TimeLimitError as exc:
                report.notes.append(str(exc))
        else:
            report.notes.append(f"clique not computed for k={k} (limit {clique_max_width})")
    if "exhaustive" in use and "exhaustive" not in values:
        if k <= EXHAUSTIVE_MAX_WIDTH:
            from .search import sp_bfs

            values["exhaustive"] = sp_bfs(k).max_size
        else:
            report.notes.append(f"exhaustive not available for k={k}")
    if "lift" in use and "lift" not in values and k >= 2:
        if previous_best is None:
            prev = best_bounds(k - 1, use, None, None, clique_time_limit, clique_max_width)
            previous_best = prev.best
        if previous_best is not None:
            values["lift"] = lift_bound(previous_best)

    if values:
        # exhaustive is exact, so it wins ties; otherwise keep the canonical kind order
        rank = {kind: i for i, kind in enumerate(BOUND_KINDS)}
        rank["exhaustive"] = -1
        source = min(values, key=lambda kind: (values[kind], rank[kind]))
        report.best, report.best_source = values[source], source
    return report


def clique_rows_text(result: CliqueResult, k: int) -> list[str]:
    return [row_text(Puzzle(k, (c,)).rows[0]) for c in result.rows]
