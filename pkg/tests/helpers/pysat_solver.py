"""DIMACS solver wrapper around MiniSat (python-sat), used as an external backend in tests."""

import sys

from pysat.formula import CNF
from pysat.solvers import Minisat22

cnf = CNF(from_file=sys.argv[1])
with Minisat22(bootstrap_with=cnf.clauses) as solver:
    if solver.solve():
        print("s SATISFIABLE")
        sys.exit(10)
    print("s UNSATISFIABLE")
    sys.exit(20)
