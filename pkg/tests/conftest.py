import os

import pytest

from susp.bench import load_witnesses
from susp.search import sp_bfs

WITNESS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "witnesses")


@pytest.fixture(scope="session")
def search_reports():
    """Exhaustive searches for widths 1..4, shared across modules."""
    return {k: sp_bfs(k, keep_levels=True) for k in range(1, 5)}


@pytest.fixture(scope="session")
def witness_library():
    return load_witnesses([WITNESS_DIR])
