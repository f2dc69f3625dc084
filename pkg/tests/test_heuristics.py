import random

import pytest

from susp.errors import BadSubsetSizeError
from susp.heuristics import Verdict, heuristic_downward_closed, heuristic_greedy, heuristic_unique_pieces
from susp.puzzle import Puzzle, random_puzzle
from susp.verifiers import verify_dp


def test_unique_pieces_examples():
    assert heuristic_unique_pieces(Puzzle.from_rows(["12", "32"])) is Verdict.NOT_SUSP  # both have 2 in column 2
    assert heuristic_unique_pieces(Puzzle.from_rows(["12", "23"])) is Verdict.MAYBE


def test_downward_closed_subset_bounds():
    p = Puzzle.from_rows(["12", "23", "31"])
    for bad in (1, 4):
        with pytest.raises(BadSubsetSizeError):
            heuristic_downward_closed(p, bad)
    with pytest.raises(BadSubsetSizeError):
        heuristic_downward_closed(Puzzle.from_rows(["12", "23"]), 3)


def test_unique_pieces_equals_pairwise_downward_closure():
    rng = random.Random(0)
    for _ in range(2000):
        k = rng.randint(1, 6)
        p = random_puzzle(min(rng.randint(2, 12), 3**k), k, rng)
        if p.size < 2:
            continue
        assert heuristic_unique_pieces(p) is heuristic_downward_closed(p, 2)


def test_heuristics_are_one_sided():
    rng = random.Random(1)
    for _ in range(600):
        k = rng.randint(1, 5)
        p = random_puzzle(min(rng.randint(1, 7), 3**k), k, rng)
        verdicts = [heuristic_unique_pieces(p), heuristic_greedy(p, seed=rng.randint(0, 99))]
        if p.size >= 2:
            verdicts.append(heuristic_downward_closed(p, min(3, p.size)))
        assert Verdict.IS_SUSP not in verdicts
        if verify_dp(p):
            assert all(v is Verdict.MAYBE for v in verdicts)


def test_greedy_finds_matchings_on_easy_non_susps():
    # random 10-row puzzles of width 4 are almost never SUSPs, and the greedy
    # matcher should reject most of them outright
    rng = random.Random(2)
    rejected = sum(heuristic_greedy(random_puzzle(10, 4, rng), seed=i) is Verdict.NOT_SUSP for i in range(50))
    assert rejected >= 40


def test_greedy_argument_checks():
    p = Puzzle.from_rows(["12"])
    with pytest.raises(ValueError):
        heuristic_greedy(p, attempts=0)
    with pytest.raises(ValueError):
        heuristic_greedy(Puzzle(2), attempts=1)


def test_greedy_is_deterministic_per_seed():
    rng = random.Random(3)
    p = random_puzzle(9, 4, rng)
    assert heuristic_greedy(p, seed=7) is heuristic_greedy(p, seed=7)
