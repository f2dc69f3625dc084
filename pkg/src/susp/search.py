"""Symmetry-pruned breadth-first search for maximum-size SUSPs.

Level n of the search holds one canonical representative per isomorphism
class of width-k SUSPs with n rows.  Every representative is extended by
every row it does not contain; verified extensions whose class is new form
the next level.  Levels are checkpointed so an interrupted run resumes.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import CheckpointError, SizeLimitError, VersionMismatchError
from .hybrid import DEFAULT_CONFIG, HybridConfig, verify
from .puzzle import CanonicalForm, Puzzle, canonical_form, orbit_size, row_text

FORMAT_VERSION = 1
MAX_SEARCH_WIDTH = 6


@dataclass
class SearchReport:
    width: int
    max_size: int
    class_counts: dict[int, int]
    witness: Optional[Puzzle]
    complete: bool
    status: str = "complete"
    elapsed: float = 0.0
    levels: list = field(default_factory=list, repr=False)  # canonical reps per level, if kept

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "max_size": self.max_size,
            "class_counts": {str(k): v for k, v in sorted(self.class_counts.items())},
            "witness": [row_text(r) for r in self.witness.rows] if self.witness else [],
            "complete": self.complete,
            "status": self.status,
            "elapsed_seconds": round(self.elapsed, 3),
        }

    def to_text(self) -> str:
        lines = [f"width {self.width}", f"max size {self.max_size}"]
        if not self.complete:
            lines.append(f"status {self.status} (partial: max size is a lower bound)")
        for size, n in sorted(self.class_counts.items()):
            lines.append(f"size {size}: {n} classes")
        if self.witness is not None and self.witness.size:
            lines.append("witness:")
            lines.extend("  " + row_text(r) for r in self.witness.rows)
        return "\n".join(lines) + "\n"


def _key_to_codes(key: str, width: int) -> tuple[int, ...]:
    if not key:
        return ()
    return Puzzle.from_rows(key.split(","), width=width).codes


def _digest(cf: CanonicalForm) -> str:
    return hashlib.blake2b(cf.to_bytes(), digest_size=16).hexdigest()


def extend_representative(codes: tuple[int, ...], width: int, config: HybridConfig = DEFAULT_CONFIG) -> list[tuple[int, ...]]:
    """Canonical codes of the verified one-row extensions, in row order, deduplicated."""
    present = set(codes)
    out = []
    local = set()
    for r in range(3**width):
        if r in present:
            continue
        ext = Puzzle(width, codes + (r,))
        if not verify(ext, config):
            continue
        cf = canonical_form(ext).codes
        if cf not in local:
            local.add(cf)
            out.append(cf)
    return out


def _expand_worker(args):
    codes, width, config = args
    return extend_representative(codes, width, config)


class _Checkpoint:
    def __init__(self, directory: str):
        self.dir = directory

    def path(self, name: str) -> str:
        return os.path.join(self.dir, name)

    def exists(self) -> bool:
        return os.path.exists(self.path("meta"))

    def _write(self, name: str, text: str) -> None:
        tmp = self.path(name + ".tmp")
        with open(tmp, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, self.path(name))

    def save(self, width: int, level: int, frontier: list[tuple[int, ...]], counts: dict, elapsed: float) -> None:
        try:
            os.makedirs(self.dir, exist_ok=True)
            forms = [CanonicalForm(width, c) for c in frontier]
            self._write(f"frontier.lvl{level}", "".join(f.key() + "\n" for f in forms))
            self._write(f"seen.lvl{level}", "".join(_digest(f) + "\n" for f in forms))
            meta = {
                "format": FORMAT_VERSION,
                "width": width,
                "level": level,
                "counts": {str(k): v for k, v in sorted(counts.items())},
                "elapsed": elapsed,
            }
            self._write("meta", json.dumps(meta, sort_keys=True) + "\n")
            for name in os.listdir(self.dir):
                if name.startswith(("frontier.lvl", "seen.lvl")) and not name.endswith(f".lvl{level}"):
                    os.remove(self.path(name))
        except OSError as exc:
            raise CheckpointError(f"cannot write checkpoint in {self.dir}: {exc}") from exc

    def load(self, width: int):
        try:
            with open(self.path("meta"), encoding="ascii") as fh:
                meta = json.load(fh)
            if meta.get("format") != FORMAT_VERSION:
                raise VersionMismatchError(f"checkpoint format {meta.get('format')}, expected {FORMAT_VERSION}")
            if meta.get("width") != width:
                raise VersionMismatchError(f"checkpoint is for width {meta.get('width')}, not {width}")
            level = int(meta["level"])
            with open(self.path(f"frontier.lvl{level}"), encoding="ascii") as fh:
                keys = [line.strip() for line in fh if line.strip() or level == 0]
            with open(self.path(f"seen.lvl{level}"), encoding="ascii") as fh:
                digests = [line.strip() for line in fh if line.strip()]
        except (OSError, ValueError, KeyError) as exc:
            if isinstance(exc, VersionMismatchError):
                raise
            raise CheckpointError(f"cannot read checkpoint in {self.dir}: {exc}") from exc
        frontier = [_key_to_codes(k, width) for k in keys]
        if [_digest(CanonicalForm(width, c)) for c in frontier] != digests:
            raise CheckpointError("frontier and seen-set files disagree")
        counts = {int(k): v for k, v in meta["counts"].items()}
        return level, frontier, counts, float(meta.get("elapsed", 0.0))


def sp_bfs(
    width: int,
    max_size: Optional[int] = None,
    checkpoint_dir: Optional[str] = None,
    workers: int = 1,
    max_frontier: Optional[int] = None,
    stop_after_level: Optional[int] = None,
    keep_levels: bool = False,
    config: HybridConfig = DEFAULT_CONFIG,
) -> SearchReport:
    """Exhaustive class-level search; see the module docstring.

    ``stop_after_level`` ends the run after that level's checkpoint is
    written (the report is then partial); ``max_frontier`` bounds the size of
    a level and yields a partial MEMORY_LIMIT report when exceeded.
    """
    if not 1 <= width <= MAX_SEARCH_WIDTH:
        raise SizeLimitError(f"search supports 1 <= width <= {MAX_SEARCH_WIDTH}, got {width}")
    ckpt = _Checkpoint(checkpoint_dir) if checkpoint_dir else None
    started = time.monotonic()
    prior_elapsed = 0.0
    if ckpt is not None and ckpt.exists():
        level, frontier, counts, prior_elapsed = ckpt.load(width)
    else:
        level, frontier, counts = 0, [()], {}
        if ckpt is not None:
            ckpt.save(width, 0, frontier, counts, 0.0)
    levels = [frontier] if keep_levels else []

    pool = None
    if workers > 1:
        import multiprocessing

        pool = multiprocessing.get_context("spawn").Pool(workers)

    status = "complete"
    try:
        while frontier:
            if max_size is not None and level >= max_size:
                status = "MAX_SIZE"
                break
            if stop_after_level is not None and level >= stop_after_level and level > 0:
                status = "STOPPED"
                break
            jobs = [(codes, width, config) for codes in frontier]
            results = pool.map(_expand_worker, jobs, chunksize=16) if pool else map(_expand_worker, jobs)
            seen: set = set()
            nxt = []
            for forms in results:
                for cf in forms:
                    if cf not in seen:
                        seen.add(cf)
                        nxt.append(cf)
            if max_frontier is not None and len(nxt) > max_frontier:
                status = "MEMORY_LIMIT"
                break
            if not nxt:
                break
            level += 1
            frontier = nxt
            counts[level] = len(nxt)
            if keep_levels:
                levels.append(frontier)
            if ckpt is not None:
                ckpt.save(width, level, frontier, counts, prior_elapsed + time.monotonic() - started)
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    best = max(counts) if counts else 0
    witness = Puzzle(width, frontier[0]) if counts and frontier and len(frontier[0]) == best else None
    return SearchReport(
        width=width,
        max_size=best,
        class_counts=dict(sorted(counts.items())),
        witness=witness,
        complete=status == "complete",
        status=status,
        elapsed=prior_elapsed + time.monotonic() - started,
        levels=levels,
    )


# --- counting -------------------------------------------------------------

def count_susp_sets_raw(width: int, max_size: Optional[int] = None, config: HybridConfig = DEFAULT_CONFIG) -> dict[int, int]:
    """Number of SUSP row sets of each size, by direct enumeration.

    Rows are added in increasing code order, so each set is reached once;
    downward closure makes pruning at non-SUSPs exact.
    """
    if width > 3:
        raise SizeLimitError("raw enumeration is limited to width <= 3")
    n = 3**width
    counts: dict[int, int] = {}

    def grow(codes: tuple[int, ...]):
        start = codes[-1] + 1 if codes else 0
        for r in range(start, n):
            ext = codes + (r,)
            if max_size is not None and len(ext) > max_size:
                return
            if verify(Puzzle(width, ext), config):
                counts[len(ext)] = counts.get(len(ext), 0) + 1
                grow(ext)

    grow(())
    return dict(sorted(counts.items()))


def count_susp_sets_by_orbits(width: int, max_size: Optional[int] = None) -> dict[int, int]:
    """Number of SUSP row sets of each size, summing orbit sizes over classes."""
    report = sp_bfs(width, max_size=max_size, keep_levels=True)
    counts = {}
    for level, reps in enumerate(report.levels):
        if level == 0:
            continue
        counts[level] = sum(orbit_size(Puzzle(width, c)) for c in reps)
    return counts


def count_total_susps(width: int, max_size: Optional[int] = None, method: str = "auto") -> dict[int, int]:
    """Encoded SUSP counts: ordered row sequences, i.e. s! times the number of sets."""
    if method == "auto":
        method = "raw" if width <= 3 else "orbit"
    if method == "raw":
        sets = count_susp_sets_raw(width, max_size)
    elif method == "orbit":
        if width > 4:
            raise SizeLimitError("orbit counting is limited to width <= 4")
        sets = count_susp_sets_by_orbits(width, max_size)
    else:
        raise ValueError(f"unknown counting method {method!r}")
    return {s: n * math.factorial(s) for s, n in sets.items()}


# --- witnesses ------------------------------------------------------------

def find_susps(
    size: int,
    width: int,
    count: int,
    seed: int = 0,
    node_budget: int = 200_000,
    distinct: str = "class",
    config: HybridConfig = DEFAULT_CONFIG,
) -> list[Puzzle]:
    """Randomised depth-first search for up to ``count`` SUSPs.

    With ``distinct="class"`` the results are pairwise non-isomorphic; with
    ``"set"`` they are merely distinct row sets.  Not exhaustive: returns
    what it finds within ``node_budget`` extension attempts.
    """
    if distinct not in ("class", "set"):
        raise ValueError("distinct must be 'class' or 'set'")
    rng = random.Random(seed)
    rows = list(range(3**width))
    found: list[Puzzle] = []
    classes: set = set()
    nodes = 0

    def dfs(codes: tuple[int, ...]) -> bool:
        nonlocal nodes
        if len(codes) == size:
            p = Puzzle(width, codes)
            key = canonical_form(p) if distinct == "class" and width <= 8 else p.codes
            if key not in classes:
                classes.add(key)
                found.append(p)
            return True
        cands = [r for r in rows if r not in codes]
        rng.shuffle(cands)
        for r in cands[: max(8, len(cands) // 4)]:
            nodes += 1
            if nodes > node_budget or len(found) >= count:
                return False
            ext = Puzzle(width, codes + (r,))
            if verify(ext, config) and dfs(ext.codes):
                return True
        return False

    while len(found) < count and nodes < node_budget:
        dfs((rng.choice(rows),))
    return found


def decode_key(key: str, width: int) -> Puzzle:
    return Puzzle(width, _key_to_codes(key, width))


__all__ = [
    "SearchReport",
    "count_susp_sets_by_orbits",
    "count_susp_sets_raw",
    "count_total_susps",
    "find_susps",
    "sp_bfs",
]
