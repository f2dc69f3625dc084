"""Solver backends: the in-process solvers or an external command.

An external command template may contain ``{input}``; otherwise the input
path is appended.  DIMACS solvers are read by their ``s SATISFIABLE`` /
``s UNSATISFIABLE`` line (or exit code 10/20); LP solvers by a status regex.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

from .errors import Cancelled, SolverCrash, SolverTimeout

SAT_SOLVER_ENV = "SUSP_SAT_SOLVER"
IP_SOLVER_ENV = "SUSP_IP_SOLVER"

_POLL_INTERVAL = 0.02


@dataclass(frozen=True)
class SolverBackend:
    kind: str = "internal"
    command: Optional[str] = None
    timeout: Optional[float] = None
    infeasible_regex: str = r"(?i)\binfeasible\b"
    feasible_regex: str = r"(?i)\b(optimal|feasible)\b"

    def __post_init__(self):
        if self.kind not in ("internal", "external"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "external" and not self.command:
            raise ValueError("external backend needs a command template")

    @classmethod
    def parse(cls, spec: Optional[str], timeout: Optional[float] = None) -> "SolverBackend":
        """``internal`` or ``cmd:<template>``."""
        if spec is None or spec == "internal":
            return cls("internal", timeout=timeout)
        if spec.startswith("cmd:"):
            return cls("external", spec[4:], timeout=timeout)
        raise ValueError(f"backend must be 'internal' or 'cmd:<template>', got {spec!r}")

    @classmethod
    def from_env(cls, var: str = SAT_SOLVER_ENV, timeout: Optional[float] = None) -> "SolverBackend":
        template = os.environ.get(var)
        return cls("external", template, timeout=timeout) if template else cls("internal", timeout=timeout)

    def argv(self, path: str) -> list[str]:
        if "{input}" in self.command:
            return shlex.split(self.command.replace("{input}", shlex.quote(path)))
        return shlex.split(self.command) + [path]


def run_command(argv: list[str], timeout: Optional[float], cancel=None) -> tuple[int, str, float]:
    """Run a solver process, honouring a wall-clock timeout and a cancel event."""
    start = time.monotonic()
    with tempfile.TemporaryFile("w+") as out:
        try:
            proc = subprocess.Popen(argv, stdout=out, stderr=subprocess.STDOUT, text=True)
        except OSError as exc:
            raise SolverCrash(f"cannot start {argv[0]!r}: {exc}") from exc
        try:
            while proc.poll() is None:
                if timeout is not None and time.monotonic() - start > timeout:
                    raise SolverTimeout(f"{argv[0]} exceeded {timeout:g} s")
                if cancel is not None and cancel.is_set():
                    raise Cancelled()
                time.sleep(_POLL_INTERVAL)
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.wait()
        out.seek(0)
        return proc.returncode, out.read(), time.monotonic() - start


def parse_sat_status(output: str, returncode: int) -> bool:
    """True for SAT, False for UNSAT; raises SolverCrash if neither is reported."""
    for line in output.splitlines():
        token = line.strip()
        if token.startswith("s "):
            token = token[2:].strip()
        if token == "UNSATISFIABLE":
            return False
        if token == "SATISFIABLE":
            return True
    if returncode == 10:
        return True
    if returncode == 20:
        return False
    tail = output.strip().splitlines()[-3:]
    raise SolverCrash(f"no SAT/UNSAT status (exit {returncode}): {' | '.join(tail)}")


def parse_lp_status(output: str, returncode: int, backend: SolverBackend) -> bool:
    """True when the solver reports a feasible model."""
    if re.search(backend.infeasible_regex, output):
        return False
    if re.search(backend.feasible_regex, output):
        return True
    tail = output.strip().splitlines()[-3:]
    raise SolverCrash(f"no feasibility status (exit {returncode}): {' | '.join(tail)}")


def run_external(backend: SolverBackend, text: str, suffix: str, cancel=None) -> bool:
    """Write ``text`` to a temp file, run the backend on it, return SAT/feasible."""
    with tempfile.TemporaryDirectory(prefix="susp-") as tmp:
        path = os.path.join(tmp, "instance" + suffix)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        code, output, _ = run_command(backend.argv(path), backend.timeout, cancel)
    if suffix == ".lp":
        return parse_lp_status(output, code, backend)
    return parse_sat_status(output, code)
