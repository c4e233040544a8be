"""Record aggregation, serialization round trips, and makespan ranking."""

import pytest

from storesim import (
    OpRecord,
    PatternSpec,
    RunReport,
    aggregate,
    compare,
    format_ops_csv,
    format_ranking,
    format_report,
    gen_reduce,
    parse_report,
    simulate,
)

from conftest import bench_config, make_profile


def rec(**kw):
    return OpRecord(**kw)


def test_makespan_spans_first_to_last():
    rep = aggregate([
        rec(op_id=0, task_id="a", kind="write", start=0, end=5),
        rec(op_id=1, task_id="b", kind="read", start=2, end=9),
    ])
    assert rep.makespan_ns == 9
    assert rep.first_start_ns == 0
    assert rep.last_end_ns == 9
    assert rep.ops == 2 and rep.reads == 1 and rep.writes == 1


def test_empty_run_aggregates_to_zero():
    rep = aggregate([])
    assert rep.makespan_ns == 0
    assert rep.ops == 0
    assert rep.stages == []


def test_kind_counters():
    kinds = ["open", "write", "write", "close", "open", "read", "close"]
    rep = aggregate([rec(op_id=i, kind=k) for i, k in enumerate(kinds)])
    assert (rep.opens, rep.writes, rep.reads, rep.closes) == (2, 2, 1, 2)


def test_stage_split_follows_levels():
    rep = aggregate([
        rec(op_id=0, task_id="m0", kind="write", start=0, end=4, level=0,
            remote_data=10),
        rec(op_id=1, task_id="m1", kind="write", start=1, end=6, level=0),
        rec(op_id=2, task_id="r", kind="read", start=6, end=9, level=1,
            loopback_data=7),
    ])
    assert [st.level for st in rep.stages] == [0, 1]
    s0, s1 = rep.stages
    assert (s0.tasks, s0.writes, s0.start_ns, s0.end_ns) == (2, 2, 0, 6)
    assert s0.remote_data_bytes == 10
    assert (s1.tasks, s1.reads, s1.read_bytes) == (1, 1, 7)


def test_totals_without_stats_sum_records():
    rep = aggregate([
        rec(op_id=0, remote_data=5, loopback_data=3, remote_ctrl=2,
            loopback_ctrl=1, manager_requests=2),
        rec(op_id=1, remote_data=7, manager_requests=1),
    ])
    assert rep.remote_data_bytes == 12
    assert rep.loopback_data_bytes == 3
    assert rep.remote_ctrl_bytes == 2
    assert rep.loopback_ctrl_bytes == 1
    assert rep.manager_requests == 3
    assert rep.remote_bytes == 14
    assert rep.loopback_bytes == 4


# -- against a real run ---------------------------------------------------------

@pytest.fixture(scope="module")
def reduce_report():
    text = gen_reduce(PatternSpec(pattern="reduce", width=4))
    config = bench_config(n_hosts=5, n_storage_nodes=4, n_clients=4,
                          stripe_width=4)
    return simulate(make_profile(), config, text, label="r4")


def test_reduce_run_has_two_stages(reduce_report):
    rep = reduce_report
    assert [st.level for st in rep.stages] == [0, 1]
    assert rep.stages[0].tasks == 4
    assert rep.stages[1].tasks == 1


def test_stage_windows_inside_run_window(reduce_report):
    rep = reduce_report
    for st in rep.stages:
        assert rep.first_start_ns <= st.start_ns <= st.end_ns <= rep.last_end_ns
    # map stage finishes before the reduce stage does
    assert rep.stages[0].end_ns <= rep.stages[1].end_ns


def test_run_totals_match_record_sums(reduce_report):
    rep = reduce_report
    assert rep.remote_data_bytes == sum(r.remote_data for r in rep.records)
    assert rep.loopback_data_bytes == sum(r.loopback_data for r in rep.records)
    assert rep.remote_ctrl_bytes == sum(r.remote_ctrl for r in rep.records)
    assert rep.loopback_ctrl_bytes == sum(r.loopback_ctrl for r in rep.records)
    assert rep.manager_requests == sum(r.manager_requests for r in rep.records)
    assert rep.ops == len(rep.records)


def test_wall_clock_not_serialized(reduce_report):
    assert reduce_report.wall_s > 0.0
    text = format_report(reduce_report)
    assert "wall" not in text
    assert parse_report(text).wall_s == 0.0


def test_report_round_trip(reduce_report):
    text = format_report(reduce_report)
    again = parse_report(text)
    assert format_report(again) == text
    assert again.makespan_ns == reduce_report.makespan_ns
    assert len(again.stages) == len(reduce_report.stages)


def test_report_rejects_unknown_key():
    with pytest.raises(Exception, match="unknown report key"):
        parse_report("[run]\nlabel=x\nnonsense=3\n")


def test_report_rejects_bad_stage_row():
    with pytest.raises(Exception, match="stage"):
        parse_report("[run]\nlabel=x\n\n[stages]\n1,2,3\n")


def test_ops_csv_one_line_per_record(reduce_report):
    text = format_ops_csv(reduce_report.records)
    lines = text.strip().split("\n")
    assert lines[0].startswith("op_id,task,client,host,kind,file")
    assert len(lines) == 1 + len(reduce_report.records)
    assert all(line.count(",") == lines[0].count(",") for line in lines)


# -- ranking ---------------------------------------------------------------------

def mkrep(label, ms):
    return RunReport(label=label, makespan_ns=ms)


def test_compare_orders_by_makespan():
    rows = compare([mkrep("A", 5_000_000_000),
                    mkrep("B", 3_000_000_000),
                    mkrep("C", 7_000_000_000)])
    assert [r.label for r in rows] == ["B", "A", "C"]
    assert [r.rank for r in rows] == [1, 2, 3]
    assert [r.group for r in rows] == [0, 1, 2]
    assert rows[0].vs_best == 1.0
    assert rows[1].vs_best == pytest.approx(5 / 3)


def test_compare_bands_near_ties():
    rows = compare([mkrep("slow", 100_500_000_000),
                    mkrep("fast", 100_000_000_000)])
    assert [r.label for r in rows] == ["fast", "slow"]
    assert rows[0].group == rows[1].group == 0


def test_compare_band_is_leader_relative():
    # 100, 101.9, 103.9: second joins the leader's band, third starts a
    # fresh group measured from itself
    rows = compare([mkrep("a", 100_000), mkrep("b", 101_900), mkrep("c", 103_900)])
    assert [r.group for r in rows] == [0, 0, 1]


def test_compare_singleton():
    rows = compare([mkrep("only", 12)])
    assert rows[0].rank == 1 and rows[0].group == 0 and rows[0].vs_best == 1.0


def test_compare_empty():
    assert compare([]) == []


def test_format_ranking_with_skips():
    rows = compare([mkrep("ok", 10)])
    text = format_ranking(rows, skipped=[("bad", "stripe wider than pool")])
    lines = text.strip().split("\n")
    assert lines[0] == "rank,group,label,makespan_ns,vs_best"
    assert lines[1].startswith("1,0,ok,10,")
    assert lines[2] == "# skipped bad: stripe wider than pool"
