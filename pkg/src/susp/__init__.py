"""Strong uniquely solvable puzzles: verification, search and bounds."""

from .errors import SuspError
from .hybrid import HybridConfig, Result, Stage, verify, verify_detailed
from .puzzle import Puzzle, canonical_form, parse_puzzle, read_puzzle, serialize_puzzle

__version__ = "0.1.0"

__all__ = [
    "HybridConfig",
    "Puzzle",
    "Result",
    "Stage",
    "SuspError",
    "canonical_form",
    "parse_puzzle",
    "read_puzzle",
    "serialize_puzzle",
    "verify",
    "verify_detailed",
]
