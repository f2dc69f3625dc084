"""Regenerate the stored witness library used by the tests.

Small sizes come from randomised search; larger ones are row-wise products
of smaller SUSPs, kept only if the exact verifier certifies them quickly.

    python3 tests/data/make_witnesses.py
"""

import itertools
import os

from susp.backends import SolverBackend
from susp.errors import SolverTimeout
from susp.puzzle import product, write_puzzle
from susp.search import find_susps
from susp.verifiers import verify_ip

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "witnesses")
PER_SIZE = 10
BASE = [(2, 2), (3, 3), (5, 4), (8, 5), (2, 3), (3, 4)]
PRODUCTS = {(10, 6): ((5, 4), (2, 2)), (15, 7): ((5, 4), (3, 3)), (25, 8): ((5, 4), (5, 4)), (24, 9): ((8, 5), (3, 4))}


def main():
    os.makedirs(HERE, exist_ok=True)
    lib = {sk: find_susps(*sk, PER_SIZE, seed=0, distinct="set") for sk in BASE}
    for (s, k), (a, b) in PRODUCTS.items():
        kept = []
        for x, y in itertools.product(lib[a], lib[b]):
            p = product(x, y)
            if p.codes in {q.codes for q in kept}:
                continue
            try:
                ok = verify_ip(p, SolverBackend(timeout=2.0))
            except SolverTimeout:
                continue
            if ok:
                kept.append(p)
            if len(kept) == PER_SIZE:
                break
        lib[(s, k)] = kept
    for (s, k), puzzles in lib.items():
        if (s, k) in ((2, 3), (3, 4)):
            continue
        for i, p in enumerate(puzzles):
            write_puzzle(p, os.path.join(HERE, f"s{s}_k{k}_{i:02d}.puz"))
        print(s, k, len(puzzles), flush=True)


if __name__ == "__main__":
    main()
