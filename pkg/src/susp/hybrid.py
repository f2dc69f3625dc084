"""Staged production verifier: cheap exact checks, heuristics, then a SAT/IP race."""

from __future__ import annotations

import enum
import threading
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Optional

from .backends import SolverBackend
from .errors import Cancelled, SolverError
from .heuristics import Verdict, heuristic_downward_closed, heuristic_greedy, heuristic_unique_pieces
from .puzzle import Puzzle
from .verifiers import verify_brute_force, verify_dp, verify_ip, verify_sat


class Stage(enum.Enum):
    BRUTE_FORCE = "brute_force"
    UNIQUE_PIECES = "unique_pieces"
    DYNAMIC_PROGRAMMING = "dp"
    DOWNWARD_CLOSED = "downward_closed"
    GREEDY = "greedy"
    SAT = "sat"
    IP = "ip"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class HybridConfig:
    brute_force_max: int = 2
    dp_max: int = 7
    use_unique_pieces: bool = True
    use_downward_closed: bool = True
    use_greedy: bool = True
    greedy_attempts: Optional[int] = None  # default s^2
    greedy_seed: int = 0
    sat_backend: SolverBackend = field(default_factory=SolverBackend)
    ip_backend: SolverBackend = field(default_factory=SolverBackend)
    race: bool = True
    # "sat" or "ip": run only that route in the final stage
    force_winner: Optional[str] = None


@dataclass(frozen=True)
class Result:
    is_susp: bool
    stage: Stage

    @property
    def verdict(self) -> Verdict:
        return Verdict.IS_SUSP if self.is_susp else Verdict.NOT_SUSP


DEFAULT_CONFIG = HybridConfig()


def verify(puzzle: Puzzle, config: HybridConfig = DEFAULT_CONFIG) -> bool:
    return verify_detailed(puzzle, config).is_susp


def verify_detailed(puzzle: Puzzle, config: HybridConfig = DEFAULT_CONFIG) -> Result:
    s = puzzle.size
    if s <= config.brute_force_max:
        return Result(verify_brute_force(puzzle), Stage.BRUTE_FORCE)
    if config.use_unique_pieces and heuristic_unique_pieces(puzzle) is Verdict.NOT_SUSP:
        return Result(False, Stage.UNIQUE_PIECES)
    if s <= config.dp_max:
        return Result(verify_dp(puzzle), Stage.DYNAMIC_PROGRAMMING)
    if config.use_downward_closed and heuristic_downward_closed(puzzle, 3) is Verdict.NOT_SUSP:
        return Result(False, Stage.DOWNWARD_CLOSED)
    if config.use_greedy:
        verdict = heuristic_greedy(puzzle, config.greedy_attempts, config.greedy_seed)
        if verdict is Verdict.NOT_SUSP:
            return Result(False, Stage.GREEDY)
    return _exact_stage(puzzle, config)


def _exact_stage(puzzle: Puzzle, config: HybridConfig) -> Result:
    routes = {
        Stage.SAT: lambda cancel: verify_sat(puzzle, config.sat_backend, cancel),
        Stage.IP: lambda cancel: verify_ip(puzzle, config.ip_backend, cancel),
    }
    if config.force_winner is not None:
        stage = Stage(config.force_winner)
        return Result(routes[stage](None), stage)
    if not config.race:
        errors = []
        for stage in (Stage.SAT, Stage.IP):
            try:
                return Result(routes[stage](None), stage)
            except SolverError as exc:
                errors.append(exc)
        raise errors[-1]
    return _race(routes)


def _race(routes) -> Result:
    """Run both routes; the first definitive answer wins and the other is cancelled."""
    cancel = threading.Event()
    with ThreadPoolExecutor(max_workers=2, thread_name_prefix="susp-race") as pool:
        pending = {pool.submit(fn, cancel): stage for stage, fn in routes.items()}
        errors = []
        try:
            while pending:
                done, _ = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    stage = pending.pop(fut)
                    try:
                        answer = fut.result()
                    except (SolverError, Cancelled) as exc:
                        errors.append(exc)
                        continue
                    return Result(answer, stage)
        finally:
            cancel.set()
    raise errors[-1]
