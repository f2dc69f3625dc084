"""One-sided SUSP tests.  They answer NOT_SUSP or MAYBE, never IS_SUSP."""

from __future__ import annotations

import enum
import random
from itertools import combinations

import numpy as np

from .errors import BadSubsetSizeError
from .matching import build_matching_instance, is_valid_matching
from .puzzle import Puzzle
from .verifiers import verify_brute_force


class Verdict(enum.Enum):
    IS_SUSP = "IS_SUSP"
    NOT_SUSP = "NOT_SUSP"
    MAYBE = "MAYBE"

    def __str__(self):
        return self.value


def heuristic_unique_pieces(puzzle: Puzzle) -> Verdict:
    """NOT_SUSP if two rows place some symbol in exactly the same columns."""
    seen: tuple[set, set, set] = (set(), set(), set())
    for masks in puzzle.masks:
        for e in range(3):
            if masks[e] in seen[e]:
                return Verdict.NOT_SUSP
            seen[e].add(masks[e])
    return Verdict.MAYBE


def heuristic_downward_closed(puzzle: Puzzle, subset_size: int) -> Verdict:
    if not 2 <= subset_size <= min(puzzle.size, 3):
        raise BadSubsetSizeError(
            f"subset size must lie in [2, min(s, 3)] = [2, {min(puzzle.size, 3)}], got {subset_size}"
        )
    for idx in combinations(range(puzzle.size), subset_size):
        if not verify_brute_force(puzzle.subpuzzle(idx)):
            return Verdict.NOT_SUSP
    return Verdict.MAYBE


def heuristic_greedy(puzzle: Puzzle, attempts: int | None = None, seed: int = 0) -> Verdict:
    """Randomised greedy search for a non-trivial 3D matching.

    Each attempt repeatedly takes the unmatched first-coordinate vertex with
    the fewest remaining edges (ties at random) and gives it a random
    compatible (v, w) pair; a dead end restarts from scratch.  A completed
    matching is validated before it is used to reject the puzzle.
    """
    s = puzzle.size
    if s < 1:
        raise ValueError("greedy heuristic needs at least one row")
    if attempts is None:
        attempts = s * s
    if attempts < 1:
        raise ValueError("attempts must be positive")
    instance = build_matching_instance(puzzle)
    E = instance.edges.astype(np.int64)
    base_counts = E.sum(axis=(1, 2))
    rng = random.Random(seed)

    for _ in range(attempts):
        counts = base_counts.copy()
        free_u = np.ones(s, dtype=bool)
        free_v = np.ones(s, dtype=bool)
        free_w = np.ones(s, dtype=bool)
        triples = []
        while len(triples) < s:
            open_u = np.flatnonzero(free_u)
            c = counts[open_u]
            least = c.min()
            if least == 0:
                break
            u = int(rng.choice(open_u[c == least]))
            options = np.argwhere(E[u][np.ix_(free_v, free_w)])
            vs, ws = np.flatnonzero(free_v), np.flatnonzero(free_w)
            i, j = options[rng.randrange(len(options))]
            v, w = int(vs[i]), int(ws[j])
            # edges of other open vertices that used v or w are gone
            counts -= E[:, v, :][:, free_w].sum(axis=1) + E[:, :, w][:, free_v].sum(axis=1) - E[:, v, w]
            free_u[u] = free_v[v] = free_w[w] = False
            triples.append((u, v, w))
        if len(triples) == s:
            triples.sort()
            if is_valid_matching(instance, triples):
                return Verdict.NOT_SUSP
    return Verdict.MAYBE
