"""Puzzles over the alphabet {1, 2, 3}: codecs, isomorphism classes, locality.

A row of width k is stored as its code, the big-endian base-3 number of its
cells minus one, so "11" -> 0 and "32" -> 7.  Sorting codes sorts rows in
text order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import PuzzleFormatError, SizeLimitError

SYMBOLS = (1, 2, 3)

# Column patterns (u_c, v_c, w_c) that witness a row triple in a local SUSP.
LOCAL_WITNESSES = frozenset(
    {(1, 2, 1), (1, 2, 2), (1, 1, 3), (1, 3, 3), (2, 2, 3), (3, 2, 3)}
)

# canonical_form builds per-width lookup tables up to this width and falls
# back to direct evaluation above it.
_TABLE_MAX_WIDTH = 6
CANON_MAX_WIDTH = 8


def encode_row(cells: Sequence[int]) -> int:
    code = 0
    for x in cells:
        if x not in SYMBOLS:
            raise PuzzleFormatError("BAD_SYMBOL", f"cell value {x!r} not in {{1,2,3}}")
        code = code * 3 + (x - 1)
    return code


def decode_row(code: int, width: int) -> tuple[int, ...]:
    if not 0 <= code < 3**width:
        raise ValueError(f"code {code} out of range for width {width}")
    cells = []
    for _ in range(width):
        code, d = divmod(code, 3)
        cells.append(d + 1)
    return tuple(reversed(cells))


def row_text(cells: Sequence[int]) -> str:
    return "".join(str(x) for x in cells)


def _parse_row(text: str) -> tuple[int, ...]:
    bad = [ch for ch in text if ch not in "123"]
    if bad:
        raise PuzzleFormatError("BAD_SYMBOL", f"row {text!r} contains {bad[0]!r}")
    return tuple(int(ch) for ch in text)


@dataclass(frozen=True)
class Puzzle:
    """A set of distinct rows of equal width.

    ``codes`` is always sorted ascending, which fixes the row order used by
    every algorithm that indexes rows.
    """

    width: int
    codes: tuple[int, ...] = ()

    def __post_init__(self):
        codes = tuple(sorted(self.codes))
        if len(set(codes)) != len(codes):
            raise PuzzleFormatError("DUPLICATE_ROW", "puzzle rows must be distinct")
        if codes and (codes[0] < 0 or codes[-1] >= 3**self.width):
            raise ValueError("row code out of range for width")
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_rows(cls, rows: Iterable, width: int | None = None) -> "Puzzle":
        """Build from rows given as strings like "123" or tuples of ints."""
        cells = [_parse_row(r) if isinstance(r, str) else tuple(r) for r in rows]
        widths = {len(c) for c in cells}
        if len(widths) > 1:
            raise PuzzleFormatError("MIXED_WIDTH", f"rows have widths {sorted(widths)}")
        if widths:
            (w,) = widths
            if width is not None and width != w:
                raise PuzzleFormatError("MIXED_WIDTH", f"rows have width {w}, expected {width}")
            width = w
        codes = [encode_row(c) for c in cells]
        if len(set(codes)) != len(codes):
            raise PuzzleFormatError("DUPLICATE_ROW", "puzzle rows must be distinct")
        return cls(width or 0, tuple(codes))

    @property
    def size(self) -> int:
        return len(self.codes)

    def __len__(self):
        return len(self.codes)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.rows)

    def __contains__(self, row) -> bool:
        if isinstance(row, str):
            row = _parse_row(row)
        if isinstance(row, int):
            return row in self._code_set
        return len(row) == self.width and encode_row(row) in self._code_set

    @cached_property
    def _code_set(self) -> frozenset:
        return frozenset(self.codes)

    @cached_property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(decode_row(c, self.width) for c in self.codes)

    @cached_property
    def cells(self) -> np.ndarray:
        """(s, k) int8 array of cell values."""
        return np.array(self.rows, dtype=np.int8).reshape(self.size, self.width)

    @cached_property
    def masks(self) -> tuple[tuple[int, int, int], ...]:
        """Per row, the column bitmasks where the row holds 1, 2 and 3."""
        out = []
        for row in self.rows:
            m = [0, 0, 0]
            for c, x in enumerate(row):
                m[x - 1] |= 1 << c
            out.append(tuple(m))
        return tuple(out)

    def add(self, row) -> "Puzzle":
        code = row if isinstance(row, int) else encode_row(_parse_row(row) if isinstance(row, str) else row)
        return Puzzle(self.width, self.codes + (code,))

    def subpuzzle(self, indices: Iterable[int]) -> "Puzzle":
        return Puzzle(self.width, tuple(self.codes[i] for i in indices))

    def __str__(self):
        return serialize_puzzle(self).rstrip("\n")

    def __repr__(self):
        return f"Puzzle({{{', '.join(row_text(r) for r in self.rows)}}})"


def parse_puzzle(text: str) -> Puzzle:
    """Parse the ``.puz`` text format: one row per line, '#' comments."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line)
    return Puzzle.from_rows(rows)


def serialize_puzzle(puzzle: Puzzle) -> str:
    return "".join(row_text(r) + "\n" for r in puzzle.rows)


def read_puzzle(path) -> Puzzle:
    with open(path, encoding="utf-8") as fh:
        return parse_puzzle(fh.read())


def write_puzzle(puzzle: Puzzle, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_puzzle(puzzle))


def product(a: Puzzle, b: Puzzle) -> Puzzle:
    """Row-wise concatenation of every row of ``a`` with every row of ``b``."""
    shift = 3**b.width
    return Puzzle(a.width + b.width, tuple(x * shift + y for x in a.codes for y in b.codes))


# --- isomorphism ----------------------------------------------------------

def apply_transform(puzzle: Puzzle, colperm: Sequence[int], symperm: Sequence[int]) -> Puzzle:
    """Image of ``puzzle`` under a column and symbol permutation.

    ``colperm[c]`` is the source column of output column ``c`` and
    ``symperm[x - 1]`` is the image of symbol ``x``.
    """
    rows = [tuple(symperm[r[colperm[c]] - 1] for c in range(puzzle.width)) for r in puzzle.rows]
    return Puzzle.from_rows(rows, width=puzzle.width) if rows else Puzzle(puzzle.width)


@lru_cache(maxsize=None)
def _perms(width: int) -> tuple[np.ndarray, np.ndarray]:
    cols = np.array(list(itertools.permutations(range(width))), dtype=np.int64).reshape(-1, width)
    syms = np.array(list(itertools.permutations(SYMBOLS)), dtype=np.int64)
    return cols, syms


@lru_cache(maxsize=None)
def _transform_table(width: int) -> np.ndarray:
    """table[t, code] = code of the row after transform t (all k!*3! of them)."""
    cols, syms = _perms(width)
    all_rows = np.array([decode_row(c, width) for c in range(3**width)], dtype=np.int64)
    all_rows = all_rows.reshape(3**width, width)
    weights = 3 ** np.arange(width - 1, -1, -1, dtype=np.int64)
    lut = np.zeros((len(syms), 4), dtype=np.int64)
    lut[:, 1:] = syms - 1
    permuted = all_rows[:, cols].transpose(1, 0, 2)  # (ncols, nrows, k)
    tables = [(lut[j][permuted] * weights).sum(axis=2) for j in range(len(syms))]
    return np.concatenate(tables, axis=0).astype(np.int32)


def _lexmin_row(arr: np.ndarray) -> np.ndarray:
    cand = np.arange(arr.shape[0])
    for j in range(arr.shape[1]):
        col = arr[cand, j]
        cand = cand[col == col.min()]
        if len(cand) == 1:
            break
    return arr[cand[0]]


def _transformed_codes(puzzle: Puzzle) -> np.ndarray:
    """Sorted row codes of every transformed image, shape (k!*3!, s)."""
    k = puzzle.width
    if k > CANON_MAX_WIDTH:
        raise SizeLimitError(f"canonical form supports width <= {CANON_MAX_WIDTH}, got {k}")
    codes = np.fromiter(puzzle.codes, dtype=np.int64, count=puzzle.size)
    if k <= _TABLE_MAX_WIDTH:
        images = _transform_table(k)[:, codes]
    else:
        cols, syms = _perms(k)
        cells = puzzle.cells.astype(np.int64)
        weights = 3 ** np.arange(k - 1, -1, -1, dtype=np.int64)
        lut = np.zeros((len(syms), 4), dtype=np.int64)
        lut[:, 1:] = syms - 1
        permuted = cells[:, cols].transpose(1, 0, 2)  # (ncols, s, k)
        images = np.concatenate([(lut[j][permuted] * weights).sum(axis=2) for j in range(len(syms))])
    return np.sort(images, axis=1)


@dataclass(frozen=True)
class CanonicalForm:
    """Minimal row-sorted image of a puzzle over column and symbol permutations.

    Two puzzles have equal canonical forms exactly when they are isomorphic.
    """

    width: int
    codes: tuple[int, ...]

    def puzzle(self) -> Puzzle:
        return Puzzle(self.width, self.codes)

    def to_bytes(self) -> bytes:
        return serialize_puzzle(self.puzzle()).encode("ascii")

    def key(self) -> str:
        """Single-line text form, rows joined by commas."""
        return ",".join(row_text(decode_row(c, self.width)) for c in self.codes)


def canonical_form(puzzle: Puzzle) -> CanonicalForm:
    if puzzle.size == 0:
        return CanonicalForm(puzzle.width, ())
    best = _lexmin_row(_transformed_codes(puzzle))
    return CanonicalForm(puzzle.width, tuple(int(x) for x in best))


def orbit_size(puzzle: Puzzle) -> int:
    """Number of distinct puzzles (as row sets) isomorphic to ``puzzle``."""
    if puzzle.size == 0:
        return 1
    images = _transformed_codes(puzzle)
    return len(np.unique(images, axis=0))


def is_isomorphic(a: Puzzle, b: Puzzle) -> bool:
    return a.width == b.width and a.size == b.size and canonical_form(a) == canonical_form(b)


# --- local SUSP -----------------------------------------------------------

_LOCAL_TABLE = np.zeros(27, dtype=bool)
for _u, _v, _w in LOCAL_WITNESSES:
    _LOCAL_TABLE[(_u - 1) * 9 + (_v - 1) * 3 + (_w - 1)] = True


def is_local_susp(puzzle: Puzzle) -> bool:
    """Every ordered row triple, not all equal, has a column pattern in L."""
    s = puzzle.size
    if s <= 1:
        return True
    c = puzzle.cells.astype(np.int64) - 1
    idx = c[:, None, None, :] * 9 + c[None, :, None, :] * 3 + c[None, None, :, :]
    witnessed = _LOCAL_TABLE[idx].any(axis=3)
    diag = np.arange(s)
    witnessed[diag, diag, diag] = True
    return bool(witnessed.all())


def all_rows(width: int) -> range:
    return range(3**width)


def random_puzzle(size: int, width: int, rng) -> Puzzle:
    """Uniform random puzzle with ``size`` distinct rows."""
    total = 3**width
    if size > total:
        raise ValueError(f"cannot draw {size} distinct rows of width {width}")
    return Puzzle(width, tuple(rng.sample(range(total), size)))


def count_puzzles(size: int, width: int) -> int:
    return math.comb(3**width, size)
