import random
import subprocess
import sys

import pytest
from pysat.solvers import Minisat22

from susp.sat import CDCLSolver, _luby, check_model, parse_dimacs


def random_3sat(rng, n, m):
    return [[rng.choice((-1, 1)) * v for v in rng.sample(range(1, n + 1), 3)] for _ in range(m)]


def test_luby_sequence():
    assert [_luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_parse_dimacs_comments_and_wrapped_clauses():
    n, clauses = parse_dimacs("c hi\np cnf 3 2\n1 -2\n 0 3 0\n")
    assert n == 3 and clauses == [[1, -2], [3]]


@pytest.mark.parametrize("seed", range(6))
def test_agrees_with_minisat(seed):
    rng = random.Random(seed)
    for _ in range(40):
        n = rng.randint(3, 30)
        clauses = random_3sat(rng, n, int(n * rng.uniform(3.5, 5.0)))
        model = CDCLSolver(n, clauses).solve()
        with Minisat22(bootstrap_with=clauses) as ref:
            assert (model is not None) == ref.solve()
        if model is not None:
            assert check_model(clauses, model)


def test_trivial_cases():
    assert CDCLSolver(1, [[1], [-1]]).solve() is None
    assert CDCLSolver(2, []).solve() is not None
    assert CDCLSolver(1, [[]]).solve() is None


def test_module_cli(tmp_path):
    f = tmp_path / "x.cnf"
    f.write_text("p cnf 2 2\n1 2 0\n-1 0\n")
    out = subprocess.run([sys.executable, "-m", "susp.sat", str(f)], capture_output=True, text=True)
    assert out.returncode == 10 and "s SATISFIABLE" in out.stdout
    f.write_text("p cnf 1 2\n1 0\n-1 0\n")
    out = subprocess.run([sys.executable, "-m", "susp.sat", str(f)], capture_output=True, text=True)
    assert out.returncode == 20 and out.stdout.startswith("s UNSATISFIABLE")
