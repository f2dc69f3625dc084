import os
import random
import sys

import pytest

from susp.backends import SolverBackend, parse_lp_status, parse_sat_status
from susp.errors import SolverCrash, SolverTimeout
from susp.puzzle import Puzzle, random_puzzle
from susp.verifiers import verify_dp, verify_ip, verify_sat

HELPERS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "helpers")
PY = sys.executable


def test_parse_backend_spec():
    assert SolverBackend.parse("internal").kind == "internal"
    b = SolverBackend.parse("cmd:minisat {input} /dev/null", timeout=3)
    assert b.kind == "external" and b.timeout == 3
    assert b.argv("/tmp/a b.cnf") == ["minisat", "/tmp/a b.cnf", "/dev/null"]
    assert SolverBackend.parse("cmd:kissat -q").argv("f") == ["kissat", "-q", "f"]
    with pytest.raises(ValueError):
        SolverBackend.parse("gurobi")


def test_backend_from_env(monkeypatch):
    monkeypatch.setenv("SUSP_SAT_SOLVER", "cadical")
    assert SolverBackend.from_env().command == "cadical"
    monkeypatch.delenv("SUSP_SAT_SOLVER")
    assert SolverBackend.from_env().kind == "internal"


def test_status_parsers():
    assert parse_sat_status("c x\ns SATISFIABLE\nv 1 0\n", 0) is True
    assert parse_sat_status("UNSATISFIABLE\n", 0) is False
    assert parse_sat_status("", 20) is False
    with pytest.raises(SolverCrash):
        parse_sat_status("segfault", 139)
    b = SolverBackend()
    assert parse_lp_status("Model status: Infeasible", 0, b) is False
    assert parse_lp_status("Optimal", 0, b) is True


def _sample(n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        k = rng.randint(1, 5)
        out.append(random_puzzle(min(rng.randint(1, 6), 3**k), k, rng))
    return out


@pytest.mark.parametrize(
    "template",
    [f"cmd:{PY} -m susp.sat {{input}}", f"cmd:{PY} {os.path.join(HELPERS, 'pysat_solver.py')}"],
    ids=["own-module", "minisat"],
)
def test_external_sat_backends(template):
    backend = SolverBackend.parse(template, timeout=60)
    for p in _sample(15, 0):
        assert verify_sat(p, backend) == verify_dp(p)


def test_external_lp_backend():
    backend = SolverBackend.parse(f"cmd:{PY} {os.path.join(HELPERS, 'highs_lp.py')}", timeout=60)
    for p in _sample(15, 1):
        assert verify_ip(p, backend) == verify_dp(p)


def test_external_timeout_and_crash():
    p = Puzzle.from_rows(["12", "23", "31"])
    with pytest.raises(SolverTimeout):
        verify_sat(p, SolverBackend("external", "sh -c 'sleep 5'", timeout=0.2))
    with pytest.raises(SolverCrash):
        verify_sat(p, SolverBackend("external", "/nonexistent/solver"))
    with pytest.raises(SolverCrash):
        verify_sat(p, SolverBackend("external", "true"))
