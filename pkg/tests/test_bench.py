import csv
import io

import pytest

from susp.bench import (
    Instance,
    TimingRow,
    TimingTable,
    generate_benchmark,
    read_manifest,
    run_benchmark,
    score,
    sweep,
    write_sweep_csv,
)
from susp.errors import InsufficientWitnessesError
from susp.puzzle import read_puzzle
from susp.verifiers import verify_dp, verify_ip

SMALL = [(2, 2), (3, 3), (5, 4)]


@pytest.fixture(scope="module")
def small_bench(tmp_path_factory, witness_library):
    out = tmp_path_factory.mktemp("bench")
    return generate_benchmark(str(out), witness_library, SMALL, n_per_class=4, seed=3)


def test_generate_labels_and_files(small_bench):
    insts = read_manifest(small_bench.root)
    assert len(insts) == 24 == len(small_bench.instances)
    for inst in insts:
        p = read_puzzle(inst.puzzle_path)
        assert (p.size, p.width) == (inst.size, inst.width)
        assert verify_ip(p) == (inst.label == "UNSAT")


def test_generation_is_reproducible(tmp_path, witness_library, small_bench):
    again = generate_benchmark(str(tmp_path), witness_library, SMALL, n_per_class=4, seed=3)
    for a, b in zip(small_bench.instances, again.instances):
        assert open(a.path).read() == open(b.path).read()


def test_insufficient_witnesses(tmp_path, witness_library):
    with pytest.raises(InsufficientWitnessesError):
        generate_benchmark(str(tmp_path), witness_library, [(14, 6)], n_per_class=10)
    r = generate_benchmark(str(tmp_path), witness_library, [(2, 2), (14, 6)], n_per_class=2, subset=True)
    assert r.skipped == [(14, 6)] and len(r.instances) == 4


@pytest.mark.parametrize("solver", ["internal", "hybrid"])
def test_run_has_no_mismatches(small_bench, solver):
    table = run_benchmark(small_bench.instances, solver, timeout=30)
    assert table.mismatches == 0
    assert {r.status for r in table.rows} == {"SAT", "UNSAT"}


def test_run_records_crashes_and_timeouts(small_bench):
    crash = run_benchmark(small_bench.instances[:2], "cmd:false", timeout=5)
    assert [r.status for r in crash.rows] == ["CRASH", "CRASH"]
    slow = run_benchmark(small_bench.instances[:1], "cmd:sh -c 'sleep 5'", timeout=0.2)
    assert slow.rows[0].status == "TIMEOUT" and slow.rows[0].seconds == 0.2


def test_timing_csv_roundtrip(tmp_path, small_bench):
    table = run_benchmark(small_bench.instances, "hybrid", timeout=30)
    path = str(tmp_path / "t.csv")
    table.write_csv(path)
    back = TimingTable.read_csv(path, timeout=30)
    assert [(r.instance, r.status) for r in back.rows] == [(r.instance, r.status) for r in table.rows]


def _table(name, times, timeout=10.0, statuses=None):
    rows = [
        TimingRow(f"i{j}", 2, 2, "SAT" if j % 2 else "UNSAT", (statuses or {}).get(j, "SAT" if j % 2 else "UNSAT"), t)
        for j, t in enumerate(times)
    ]
    return TimingTable(name, timeout, rows)


def test_score_properties():
    single = score([_table("a", [0.1, 0.2, 0.3])])[0]
    assert single.total == pytest.approx(3.0)
    fast, slow = score([_table("fast", [0.1, 0.1, 0.1]), _table("slow", [0.5, 0.2, 0.4])])
    assert fast.total < slow.total == pytest.approx(3.0)
    scaled = score([_table("fast", [1, 1, 1]), _table("slow", [5, 2, 4])])
    assert [s.total for s in scaled] == pytest.approx([fast.total, slow.total])
    timed = score([_table("t", [10.0, 0.1], statuses={0: "TIMEOUT"}), _table("u", [1.0, 0.1])])
    assert timed[0].timeouts == 1 and timed[0].unsat == pytest.approx(1.0) and timed[1].unsat == pytest.approx(0.1)
    for s in scaled:
        assert 0 <= s.total <= 3


def test_sweep_smoke_and_unique_pair_agreement():
    records = sweep([1, 4, 12], [4], n=1, seed=0)
    assert [r["s"] for r in records] == [1, 4, 12]
    buf = io.StringIO()
    write_sweep_csv(records, buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(rows) == 3 and "stage_greedy" in rows[0]
    for r in sweep([2, 6, 10, 20], [6], n=30, seed=1):
        assert r["unique_fraction"] == r["downward2_fraction"]


def test_sweep_rejection_rises_with_size():
    records = sweep([4, 30], [6], n=40, seed=2)
    assert records[0]["heuristic_fraction"] < records[1]["heuristic_fraction"] == 1.0
