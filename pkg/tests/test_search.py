import math
import os

import pytest

from oracles import susp_sets
from susp.errors import CheckpointError, SizeLimitError, VersionMismatchError
from susp.puzzle import Puzzle, canonical_form
from susp.search import count_susp_sets_raw, count_total_susps, find_susps, sp_bfs
from susp.verifiers import verify_dp

CLASS_COUNTS = {
    1: {1: 1},
    2: {1: 2, 2: 2},
    3: {1: 3, 2: 9, 3: 9},
    4: {1: 4, 2: 33, 3: 240, 4: 728, 5: 190},
}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_class_counts(k, search_reports):
    report = search_reports[k]
    assert report.class_counts == CLASS_COUNTS[k]
    assert report.max_size == max(CLASS_COUNTS[k]) and report.complete
    assert verify_dp(report.witness) and report.witness.size == report.max_size


def test_class_counts_against_definition():
    # classes of SUSP row sets found by brute force over all subsets, k <= 2
    for k in (1, 2):
        sets = susp_sets(k, 3)
        got = {s: len({canonical_form(Puzzle.from_rows(c)) for c in found}) for s, found in sets.items()}
        assert got == CLASS_COUNTS[k]


def test_raw_counts_match_definition():
    for k in (1, 2):
        assert count_susp_sets_raw(k) == {s: len(v) for s, v in susp_sets(k, 3).items()}


def test_orbit_expansion_agrees_with_raw_enumeration():
    assert count_total_susps(3, method="orbit") == count_total_susps(3, method="raw")


def test_totals_are_ordered_counts():
    t = count_total_susps(2)
    raw = count_susp_sets_raw(2)
    assert t == {s: n * math.factorial(s) for s, n in raw.items()}


def test_levels_are_canonical_and_distinct(search_reports):
    for level in search_reports[3].levels[1:]:
        assert len(set(level)) == len(level)
        for codes in level:
            p = Puzzle(3, codes)
            assert canonical_form(p).codes == codes and verify_dp(p)


def test_checkpoint_resume_matches_uninterrupted(tmp_path, search_reports):
    d = str(tmp_path / "ck")
    partial = sp_bfs(4, checkpoint_dir=d, stop_after_level=3)
    assert not partial.complete and partial.status == "STOPPED"
    assert sorted(os.listdir(d)) == ["frontier.lvl3", "meta", "seen.lvl3"]
    resumed = sp_bfs(4, checkpoint_dir=d)
    assert resumed.class_counts == search_reports[4].class_counts and resumed.complete


def test_checkpoint_width_mismatch(tmp_path):
    d = str(tmp_path / "ck")
    sp_bfs(2, checkpoint_dir=d)
    with pytest.raises(VersionMismatchError):
        sp_bfs(3, checkpoint_dir=d)


def test_corrupt_checkpoint(tmp_path):
    d = tmp_path / "ck"
    sp_bfs(3, checkpoint_dir=str(d), stop_after_level=2)
    (d / "seen.lvl2").write_text("deadbeef\n")
    with pytest.raises(CheckpointError):
        sp_bfs(3, checkpoint_dir=str(d))


def test_max_size_and_memory_limit():
    r = sp_bfs(4, max_size=2)
    assert r.class_counts == {1: 4, 2: 33} and r.status == "MAX_SIZE" and not r.complete
    r = sp_bfs(4, max_frontier=100)
    assert r.status == "MEMORY_LIMIT" and r.class_counts == {1: 4, 2: 33}


def test_workers_do_not_change_results(search_reports):
    assert sp_bfs(3, workers=2).class_counts == search_reports[3].class_counts


def test_width_limit():
    with pytest.raises(SizeLimitError):
        sp_bfs(7)


def test_find_susps():
    found = find_susps(5, 4, 3, seed=1)
    assert len(found) == 3
    assert len({canonical_form(p) for p in found}) == 3
    assert all(verify_dp(p) and p.size == 5 for p in found)
    sets = find_susps(3, 3, 12, seed=0, distinct="set")
    assert len({p.codes for p in sets}) == 12
