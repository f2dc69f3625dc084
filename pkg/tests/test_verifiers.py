import random
import threading
from itertools import combinations

import pytest

from oracles import perfect_nontrivial_matching_exists, susp_by_definition, usp_by_definition
from susp.errors import Cancelled, SizeLimitError, WidthMismatchError
from susp.matching import (
    blocked_mask_array,
    build_matching_instance,
    find_nontrivial_matching,
    is_valid_matching,
    triple_blocked,
)
from susp.puzzle import Puzzle, product, random_puzzle
from susp.verifiers import verify_brute_force, verify_dp, verify_ip, verify_sat

EXACT = [verify_brute_force, verify_dp, verify_sat, verify_ip]

QUARTET = [(["32"], True), (["12", "23"], True), (["12", "32"], False), (["23", "32"], False)]


@pytest.mark.parametrize("rows,expected", QUARTET + [(["1"], True), (["1", "2"], False)])
@pytest.mark.parametrize("fn", EXACT, ids=lambda f: f.__name__)
def test_small_examples(fn, rows, expected):
    assert fn(Puzzle.from_rows(rows)) is expected


def test_triple_blocked():
    assert triple_blocked((1,), (2,), (1,))  # 1 and 2 match, 3 does not
    assert not triple_blocked((1,), (2,), (3,))  # all three match
    assert not triple_blocked((2,), (3,), (1,))
    with pytest.raises(WidthMismatchError):
        triple_blocked((1, 2), (1,), (1,))


def test_blocked_array_matches_scalar_test():
    rng = random.Random(0)
    for _ in range(50):
        k = rng.randint(1, 5)
        p = random_puzzle(min(rng.randint(1, 6), 3**k), k, rng)
        arr = blocked_mask_array(p)
        rows = p.rows
        for a in range(p.size):
            for b in range(p.size):
                for c in range(p.size):
                    assert arr[a, b, c] == triple_blocked(rows[a], rows[b], rows[c])


def test_matcher_against_permutation_oracle():
    rng = random.Random(1)
    for _ in range(300):
        k = rng.randint(1, 4)
        p = random_puzzle(min(rng.randint(1, 5), 3**k), k, rng)
        inst = build_matching_instance(p)
        found = find_nontrivial_matching(inst)
        assert (found is not None) == perfect_nontrivial_matching_exists(inst.edges.tolist(), p.size)
        if found is not None:
            assert found.nontrivial and is_valid_matching(inst, found.triples)


def test_exhaustive_small_agreement():
    # every puzzle with s <= 4 rows of width <= 2, against the definition
    for k in (1, 2):
        for s in range(1, 5):
            for codes in combinations(range(3**k), s):
                p = Puzzle(k, codes)
                truth = susp_by_definition([tuple(r) for r in p.rows])
                assert [fn(p) for fn in EXACT] == [truth] * 4, p


def test_random_agreement():
    rng = random.Random(2)
    for _ in range(400):
        k = rng.randint(1, 6)
        p = random_puzzle(min(rng.randint(1, 7), 3**k), k, rng)
        results = {fn.__name__: fn(p) for fn in EXACT}
        assert len(set(results.values())) == 1, (p, results)


def test_susp_implies_usp():
    rng = random.Random(4)
    for _ in range(150):
        k = rng.randint(1, 3)
        p = random_puzzle(min(rng.randint(1, 3), 3**k), k, rng)
        rows = [tuple(r) for r in p.rows]
        if verify_dp(p):
            assert usp_by_definition(rows)


def test_product_of_susps_is_susp():
    a = Puzzle.from_rows(["12", "23"])
    b = Puzzle.from_rows(["32"])
    assert verify_dp(product(a, b)) and verify_sat(product(a, a))


def test_dp_size_limit():
    p = Puzzle(3, tuple(range(21)))
    with pytest.raises(SizeLimitError):
        verify_dp(p)


def _largest_witness(library):
    return max((ps[0] for ps in library.values()), key=lambda p: p.size)


@pytest.mark.parametrize("fn", [verify_sat, verify_ip], ids=["sat", "ip"])
def test_cancel_interrupts_internal_solvers(fn, witness_library):
    cancel = threading.Event()
    cancel.set()
    with pytest.raises(Cancelled):
        fn(_largest_witness(witness_library), cancel=cancel)


def test_internal_timeout_is_reported(witness_library):
    from susp.backends import SolverBackend
    from susp.errors import SolverTimeout

    with pytest.raises(SolverTimeout):
        verify_sat(_largest_witness(witness_library), SolverBackend(timeout=1e-6))
