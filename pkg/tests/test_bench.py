import pytest

from mazedash.bench import (
    CSV_HEADER,
    BenchConfig,
    BenchRecord,
    emit_csv,
    emit_table,
    parse_csv,
    parse_sizes,
    run_bench,
    summarize,
)
from mazedash.meter import MemoryMeter


def _rec(rows, solver, status="solved", runtime_ms=1.5, obstacles=4, trial=0, peak=1000):
    return BenchRecord(rows, rows, obstacles, solver, trial, trial, status, runtime_ms, peak, 3, 0)


def test_three_backtrack_records():
    recs = run_bench(BenchConfig(sizes=[(5, 5, 4)], solvers=["backtrack"], repeats=3))
    assert len(recs) == 3
    assert all(r.status == "solved" and r.runtime_ms >= 0 for r in recs)
    assert [r.trial for r in recs] == [0, 1, 2]


def test_instances_shared_across_solvers():
    recs = run_bench(BenchConfig(sizes=[(6, 6, 10)], solvers=["backtrack", "mcts", "sat-internal"], repeats=2))
    assert len(recs) == 6
    for trial in (0, 1):
        group = [r for r in recs if r.trial == trial]
        assert len({(r.obstacles, r.seed) for r in group}) == 1
        assert all(r.status == "solved" for r in group)


def test_mcts_rollout_accounting():
    recs = run_bench(BenchConfig(sizes=[(10, 10, 32)], solvers=["mcts"], repeats=5))
    for r in recs:
        assert r.rollout_steps <= r.nodes_expanded * r.free_count


def test_tiny_timeout_does_not_crash():
    recs = run_bench(BenchConfig(sizes=[(20, 20, 133)], solvers=["backtrack", "mcts"], repeats=2, timeout_ms=1))
    assert {r.status for r in recs} <= {"solved", "limit_exceeded"}
    recs = run_bench(BenchConfig(sizes=[(10, 10, 32)], solvers=["sat-internal"], repeats=2, timeout_ms=1))
    assert [r.status for r in recs] == ["limit_exceeded"] * 2


def test_csv_header_only():
    assert emit_csv([]) == ",".join(CSV_HEADER) + "\n"
    assert parse_csv(emit_csv([])) == []


def test_csv_line_count_and_roundtrip():
    recs = [_rec(5, "backtrack", runtime_ms=0.1 + 0.2), _rec(6, "mcts", trial=1), _rec(10, "sat-internal", "limit_exceeded")]
    text = emit_csv(recs)
    assert len(text.splitlines()) == 4
    assert parse_csv(text) == recs


def test_csv_rejects_wrong_header():
    with pytest.raises(ValueError):
        parse_csv("a,b\n1,2\n")


def test_table_ordering_and_failed():
    recs = [
        _rec(10, "mcts"), _rec(5, "mcts"), _rec(10, "backtrack", status="limit_exceeded"),
        _rec(5, "backtrack"), _rec(6, "backtrack"), _rec(6, "mcts"),
    ]
    table = emit_table(recs, ["backtrack", "mcts"])
    lines = table.splitlines()
    assert lines[0].startswith("| Grid Size | Obstacles (mean) | backtrack Run-Time(s)")
    assert lines[0].index("backtrack") < lines[0].index("mcts")
    assert [ln.split("|")[1].strip() for ln in lines[2:]] == ["5x5", "6x6", "10x10"]
    assert "Failed" in lines[4].split("|")[3]


def test_table_means_over_solved_only():
    recs = [_rec(5, "mcts", runtime_ms=1000.0, trial=0, peak=2_000_000),
            _rec(5, "mcts", runtime_ms=3000.0, trial=1, peak=4_000_000),
            _rec(5, "mcts", "limit_exceeded", runtime_ms=99999.0, trial=2)]
    row = emit_table(recs, ["mcts"]).splitlines()[2].split("|")
    assert row[3].strip() == "2" and row[4].strip() == "3"


def test_summarize_sizes_by_area():
    sizes, solvers, _, _ = summarize([_rec(6, "mcts"), _rec(5, "mcts")], ["mcts"])
    assert sizes == [(5, 5), (6, 6)] and list(solvers) == ["mcts"]


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(sizes=[(5, 5, 4)], repeats=0)
    with pytest.raises(ValueError):
        BenchConfig(sizes=[], solvers=["mcts"])
    with pytest.raises(ValueError):
        BenchConfig(sizes=[(5, 5, 4)], solvers=["z3"])
    with pytest.raises(ValueError):
        BenchConfig(sizes=[(5, 5, 4)], solvers=["sat-external"])


def test_parse_sizes():
    assert parse_sizes("5x5:4, 10x10:32") == [(5, 5, 4), (10, 10, 32)]
    with pytest.raises(ValueError):
        parse_sizes("5by5")


def test_parallel_jobs_same_counters():
    cfg = dict(sizes=[(6, 6, 10)], solvers=["backtrack", "mcts"], repeats=4)
    a = run_bench(BenchConfig(**cfg))
    b = run_bench(BenchConfig(jobs=2, **cfg))
    assert [r.counters() for r in a] == [r.counters() for r in b]


def test_meter_peak_never_below_current():
    m = MemoryMeter()
    m.alloc(10)
    m.alloc(5)
    m.free(12)
    assert m.current_bytes == 3 and m.peak_bytes == 15
    with pytest.raises(ValueError):
        m.free(4)
