"""CNF and 0-1 IP encodings of "H_P has a non-trivial 3D matching".

Both encodings are satisfiable/feasible exactly when the puzzle is *not* an
SUSP.  Emitters are byte-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .matching import MatchingInstance, build_matching_instance
from .puzzle import Puzzle


@dataclass(frozen=True)
class CnfFormula:
    size: int
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    # clause counts per block, in emission order
    blocks: dict = field(default_factory=dict, compare=False)

    def var_m1(self, u: int, v: int) -> int:
        return u * self.size + v + 1

    def var_m2(self, u: int, w: int) -> int:
        return self.size * self.size + u * self.size + w + 1


def _m1(s, u, v):
    return u * s + v + 1


def _m2(s, u, w):
    return s * s + u * s + w + 1


def build_cnf(puzzle: Puzzle, instance: MatchingInstance | None = None) -> CnfFormula:
    """Clauses in order: non-edge, at-least-one, at-most-one, non-trivial."""
    H = instance if instance is not None else build_matching_instance(puzzle)
    s = H.size
    if s < 1:
        raise ValueError("CNF encoding needs at least one row")
    clauses: list[tuple[int, ...]] = []

    non_edges = H.non_edges()
    for u, v, w in non_edges:
        clauses.append((-_m1(s, u, v), -_m2(s, u, w)))

    for u in range(s):
        clauses.append(tuple(_m1(s, u, v) for v in range(s)))
        clauses.append(tuple(_m2(s, u, w) for w in range(s)))
    for v in range(s):
        clauses.append(tuple(_m1(s, u, v) for u in range(s)))
    for w in range(s):
        clauses.append(tuple(_m2(s, u, w) for u in range(s)))

    at_most_one = 0
    for var in (_m1, _m2):
        for a in range(s * s):
            ua, xa = divmod(a, s)
            for b in range(a + 1, s * s):
                ub, xb = divmod(b, s)
                if ua == ub or xa == xb:
                    clauses.append((-var(s, ua, xa), -var(s, ub, xb)))
                    at_most_one += 1

    clauses.append(tuple(lit for u in range(s) for lit in (-_m1(s, u, u), -_m2(s, u, u))))

    blocks = {"non_edge": len(non_edges), "at_least_one": 4 * s, "at_most_one": at_most_one, "non_trivial": 1}
    return CnfFormula(s, 2 * s * s, tuple(clauses), blocks)


def emit_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in formula.clauses)
    return "\n".join(lines) + "\n"


def decode_cnf_model(formula: CnfFormula, model) -> tuple[tuple[int, int, int], ...]:
    """Read the matching (u, v, w) triples off a satisfying assignment."""
    s = formula.size
    truth = {lit for lit in model if lit > 0}
    out = []
    for u in range(s):
        vs = [v for v in range(s) if _m1(s, u, v) in truth]
        ws = [w for w in range(s) if _m2(s, u, w) in truth]
        if len(vs) != 1 or len(ws) != 1:
            raise ValueError(f"model does not assign a unique pair to row {u}")
        out.append((u, vs[0], ws[0]))
    return tuple(out)


@dataclass(frozen=True)
class IpModel:
    """Feasibility model over binaries M_u_v_w, one per edge of H_P.

    ``constraints`` holds (name, [variable indices], sense, rhs) with sense in
    {"=", "<="}; variables are (u, v, w) triples, zero-indexed.
    """

    size: int
    variables: tuple[tuple[int, int, int], ...]
    constraints: tuple[tuple[str, tuple[int, ...], str, int], ...]

    @staticmethod
    def var_name(t) -> str:
        u, v, w = t
        return f"M_{u + 1}_{v + 1}_{w + 1}"


def build_ip(puzzle: Puzzle, instance: MatchingInstance | None = None) -> IpModel:
    H = instance if instance is not None else build_matching_instance(puzzle)
    s = H.size
    if s < 1:
        raise ValueError("IP encoding needs at least one row")
    variables = tuple(tuple(int(i) for i in t) for t in zip(*H.edges.nonzero()))
    by_slice: list[list[list[int]]] = [[[] for _ in range(s)] for _ in range(3)]
    diagonal = []
    for idx, (u, v, w) in enumerate(variables):
        by_slice[0][u].append(idx)
        by_slice[1][v].append(idx)
        by_slice[2][w].append(idx)
        if u == v == w:
            diagonal.append(idx)
    constraints = []
    for axis, label in enumerate(("first", "second", "third")):
        for x in range(s):
            constraints.append((f"{label}_{x + 1}", tuple(by_slice[axis][x]), "=", 1))
    constraints.append(("nontrivial", tuple(diagonal), "<=", s - 1))
    return IpModel(s, variables, tuple(constraints))


def ip_assignment_feasible(model: IpModel, chosen) -> bool:
    """Check a 0-1 assignment (set of chosen variable triples) against the model."""
    index = {t: i for i, t in enumerate(model.variables)}
    if any(t not in index for t in chosen):
        return False
    on = {index[t] for t in chosen}
    for _, idxs, sense, rhs in model.constraints:
        total = sum(1 for i in idxs if i in on)
        if sense == "=" and total != rhs:
            return False
        if sense == "<=" and total > rhs:
            return False
    return True


def emit_lp(model: IpModel) -> str:
    names = [IpModel.var_name(t) for t in model.variables]
    lines = ["\\ non-trivial 3D matching feasibility", "Minimize", " obj: 0 " + names[0], "Subject To"]
    for cname, idxs, sense, rhs in model.constraints:
        terms = " + ".join(names[i] for i in idxs) if idxs else "0 " + names[0]
        lines.append(f" {cname}: {terms} {sense} {rhs}")
    lines.append("Binary")
    lines.extend(" " + n for n in names)
    lines.append("End")
    return "\n".join(lines) + "\n"
