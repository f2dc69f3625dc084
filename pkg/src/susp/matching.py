"""The tripartite 3D matching instance of a puzzle and an exact matcher.

A row triple (a, b, c) is *blocked* when some column has exactly two of
a_i = 1, b_i = 2, c_i = 3.  Unblocked triples are the edges of the
hypergraph; a puzzle is an SUSP iff the only perfect 3D matching is the
diagonal one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import Cancelled, WidthMismatchError
from .puzzle import Puzzle

_CANCEL_CHECK_EVERY = 512
_MEMO_CAP = 200_000


def triple_blocked(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> bool:
    if not len(a) == len(b) == len(c):
        raise WidthMismatchError(f"row widths {len(a)}, {len(b)}, {len(c)}")
    for x, y, z in zip(a, b, c):
        if (x == 1) + (y == 2) + (z == 3) == 2:
            return True
    return False


def blocked_mask_array(puzzle: Puzzle) -> np.ndarray:
    """(s, s, s) bool array, True where the row triple is blocked."""
    s = puzzle.size
    dtype = np.int64 if puzzle.width <= 62 else object
    m = np.array(puzzle.masks, dtype=dtype).reshape(s, 3)
    ones = m[:, 0][:, None, None]
    twos = m[:, 1][None, :, None]
    threes = m[:, 2][None, None, :]
    exactly_two = (ones & twos & ~threes) | (ones & ~twos & threes) | (~ones & twos & threes)
    return exactly_two != 0


@dataclass(frozen=True, eq=False)
class MatchingInstance:
    """Edge set of H_P as a dense (s, s, s) boolean array."""

    size: int
    edges: np.ndarray

    def has_edge(self, u: int, v: int, w: int) -> bool:
        return bool(self.edges[u, v, w])

    @property
    def edge_count(self) -> int:
        return int(self.edges.sum())

    def non_edges(self):
        """Missing triples in lexicographic order."""
        return [tuple(int(i) for i in t) for t in np.argwhere(~self.edges)]

    def pairs(self) -> list[list[tuple[int, int]]]:
        """For each first coordinate u, the (v, w) pairs forming an edge."""
        return [[(int(v), int(w)) for v, w in np.argwhere(self.edges[u])] for u in range(self.size)]


def build_matching_instance(puzzle: Puzzle) -> MatchingInstance:
    edges = ~blocked_mask_array(puzzle)
    edges.setflags(write=False)
    return MatchingInstance(puzzle.size, edges)


@dataclass(frozen=True)
class Matching:
    triples: tuple[tuple[int, int, int], ...]

    @property
    def nontrivial(self) -> bool:
        return any(not (u == v == w) for u, v, w in self.triples)


def is_valid_matching(instance: MatchingInstance, triples) -> bool:
    """Perfect, vertex-disjoint, made of edges, and not the diagonal."""
    s = instance.size
    if len(triples) != s:
        return False
    for axis in range(3):
        if sorted(t[axis] for t in triples) != list(range(s)):
            return False
    if not all(instance.has_edge(*t) for t in triples):
        return False
    return any(not (u == v == w) for u, v, w in triples)


def find_nontrivial_matching(instance: MatchingInstance, cancel=None) -> Optional[Matching]:
    """Exact search for a non-trivial perfect 3D matching.

    Depth-first; at each node the unassigned first-coordinate vertex with the
    fewest compatible (v, w) pairs is branched on.  A node is pruned when some
    vertex has no pair left or some unused second/third vertex can no longer
    be covered.  Failed states are remembered (up to a cap), keyed by the
    used vertex sets and whether a non-diagonal edge has been taken.
    """
    s = instance.size
    if s == 0:
        return None
    pairs = instance.pairs()
    full = (1 << s) - 1
    assignment: list[Optional[tuple[int, int]]] = [None] * s
    counter = [0]
    failed: set = set()

    def search(used_u: int, used_v: int, used_w: int, nontrivial: bool) -> bool:
        counter[0] += 1
        if cancel is not None and counter[0] % _CANCEL_CHECK_EVERY == 0 and cancel.is_set():
            raise Cancelled()
        if used_u == full:
            return nontrivial
        key = (used_u, used_v, used_w, nontrivial)
        if key in failed:
            return False
        best_u, best_opts = -1, None
        cover_v = cover_w = 0
        for u in range(s):
            if (used_u >> u) & 1:
                continue
            opts = [(v, w) for v, w in pairs[u] if not (used_v >> v) & 1 and not (used_w >> w) & 1]
            if not opts:
                best_opts = None
                break
            for v, w in opts:
                cover_v |= 1 << v
                cover_w |= 1 << w
            if best_opts is None or len(opts) < len(best_opts):
                best_u, best_opts = u, opts
        else:
            if cover_v == full & ~used_v and cover_w == full & ~used_w:
                last = used_u | (1 << best_u) == full
                for v, w in best_opts:
                    nt = nontrivial or not (v == best_u == w)
                    if last and not nt:
                        continue
                    assignment[best_u] = (v, w)
                    if search(used_u | (1 << best_u), used_v | (1 << v), used_w | (1 << w), nt):
                        return True
                assignment[best_u] = None
        if len(failed) < _MEMO_CAP:
            failed.add(key)
        return False

    if not search(0, 0, 0, False):
        return None
    triples = tuple((u, vw[0], vw[1]) for u, vw in enumerate(assignment))
    if not is_valid_matching(instance, triples):
        raise AssertionError("matcher produced an invalid matching")
    return Matching(triples)
