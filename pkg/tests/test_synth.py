"""Workload generators: counts, overrides, determinism, and scale math."""

import pytest
from hypothesis import given, settings, strategies as st

from storesim import (
    PatternSpec,
    blast_op_count,
    gen_blast,
    gen_broadcast,
    gen_micro,
    gen_pipeline,
    gen_reduce,
    generate,
    parse_workload,
    sweep_configs,
)
from storesim.synth import (
    BLAST_DB_BYTES,
    BLAST_OUTPUT_BYTES,
    BLAST_QUERY_BYTES,
    BLAST_READ_BYTES,
)

from conftest import bench_config


def test_micro_write_is_one_task():
    w = parse_workload(gen_micro(PatternSpec(pattern="micro_write")))
    assert len(w.tasks) == 1
    (task,) = w.tasks.values()
    assert [o.kind for o in task.ops] == ["open", "write", "close"]
    assert task.ops[1].size == 100_000_000


def test_micro_read_emits_setup_writer():
    w = parse_workload(gen_micro(PatternSpec(pattern="micro_read")))
    kinds = {tid: [o.kind for o in t.ops] for tid, t in w.tasks.items()}
    assert len(w.tasks) == 2
    readers = [ops for ops in kinds.values() if "read" in ops]
    writers = [ops for ops in kinds.values() if "write" in ops]
    assert len(readers) == 1 and len(writers) == 1


def test_pipeline_task_and_file_counts():
    # width 19, stages 3: 57 tasks, 19 branches x 4 files
    w = parse_workload(gen_pipeline(PatternSpec(pattern="pipeline", width=19, stages=3)))
    assert len(w.tasks) == 19 * 3
    assert len(w.files) == 19 * 4


def test_pipeline_width_one_stage_one():
    w = parse_workload(gen_pipeline(PatternSpec(pattern="pipeline", width=1, stages=1)))
    assert len(w.tasks) == 1
    (task,) = w.tasks.values()
    assert sorted(task.reads) == ["p0_in"]
    assert sorted(task.writes) == ["p0_s1"]


def test_pipeline_wass_marks_outputs_local():
    w = parse_workload(gen_pipeline(
        PatternSpec(pattern="pipeline", width=2, stages=2, mode="wass")))
    for name, spec in w.files.items():
        if name.endswith("_in"):
            assert spec.stripe == 1
        else:
            assert spec.placement == "local"
    assert all(t.pin is None for t in w.tasks.values())


def test_pipeline_dss_pins_tasks():
    w = parse_workload(gen_pipeline(PatternSpec(pattern="pipeline", width=3, stages=2)))
    assert all(t.pin is not None for t in w.tasks.values())


def test_reduce_counts_and_edges():
    w = parse_workload(gen_reduce(PatternSpec(pattern="reduce", width=19)))
    assert len(w.tasks) == 20
    assert len(w.tasks["reduce"].deps) == 19


def test_reduce_width_one_degenerates_to_pipeline():
    w = parse_workload(gen_reduce(PatternSpec(pattern="reduce", width=1)))
    assert len(w.tasks) == 2
    assert w.tasks["reduce"].deps == ["r0_map"]


def test_reduce_wass_groups_intermediates():
    w = parse_workload(gen_reduce(PatternSpec(pattern="reduce", width=4, mode="wass",
                                              co_locate_host=5)))
    mids = [s for n, s in w.files.items() if n.endswith("_mid")]
    assert len(mids) == 4
    assert all(s.placement == "co_locate" and s.group == "gather" for s in mids)
    assert w.groups["gather"]["target_host"] == "5"


def test_broadcast_replication_override():
    w = parse_workload(gen_broadcast(
        PatternSpec(pattern="broadcast", width=19, replication=4)))
    assert w.files["bcast"].replication == 4
    consumers = [t for tid, t in w.tasks.items() if tid != "b_src"]
    assert len(consumers) == 19
    assert all("bcast" in t.reads for t in consumers)


def test_broadcast_width_one_is_two_task_chain():
    w = parse_workload(gen_broadcast(PatternSpec(pattern="broadcast", width=1)))
    assert len(w.tasks) == 2


def test_blast_shapes_and_volume():
    spec = PatternSpec(pattern="blast")
    w = parse_workload(gen_blast(spec))
    assert w.files["db"].size == BLAST_DB_BYTES == 1_700_000_000
    assert w.files["q0"].size == BLAST_QUERY_BYTES == 5_600
    assert w.files["o0"].size == BLAST_OUTPUT_BYTES == 82_000
    nops = sum(len(t.ops) for t in w.tasks.values())
    assert nops == blast_op_count(spec)
    assert nops >= 550_000


def test_blast_op_count_closed_form():
    spec = PatternSpec(pattern="blast", width=2, db_size=100_000, read_size=30_000)
    # per task: open/read/close query, open db, 4 scans (last short), close db,
    # open/write/close output
    assert blast_op_count(spec) == 2 * (6 + 1 + 4 + 1)
    w = parse_workload(gen_blast(spec))
    scans = [o for t in w.tasks.values() for o in t.ops
             if o.kind == "read" and o.file == "db"]
    assert len(scans) == 8
    assert {o.size for o in scans} == {30_000, 10_000}
    assert w.files["db"].replication is None or w.files["db"].replication >= 1


def test_blast_default_read_granularity():
    assert BLAST_READ_BYTES == 57_344  # 56 KiB scan unit


@pytest.mark.parametrize("pattern,kw", [
    ("micro_write", {}),
    ("micro_read", {}),
    ("pipeline", {"width": 5, "stages": 2}),
    ("pipeline", {"width": 5, "stages": 2, "mode": "wass"}),
    ("reduce", {"width": 5}),
    ("reduce", {"width": 5, "mode": "wass"}),
    ("broadcast", {"width": 5, "replication": 2}),
    ("blast", {"width": 2, "db_size": 500_000}),
])
def test_all_patterns_parse_clean_and_acyclic(pattern, kw):
    text = generate(PatternSpec(pattern=pattern, **kw))
    w = parse_workload(text)  # raises on cycles or grammar violations
    assert w.tasks


@settings(max_examples=25, deadline=None)
@given(width=st.integers(1, 8), stages=st.integers(1, 4),
       mode=st.sampled_from(["dss", "wass"]))
def test_pipeline_counts_hold_everywhere(width, stages, mode):
    w = parse_workload(gen_pipeline(
        PatternSpec(pattern="pipeline", width=width, stages=stages, mode=mode)))
    assert len(w.tasks) == width * stages
    assert len(w.files) == width * (stages + 1)


def test_generators_deterministic():
    for pattern in ("micro_write", "pipeline", "reduce", "broadcast", "blast"):
        spec = PatternSpec(pattern=pattern, width=3)
        assert generate(spec) == generate(spec)


def test_scale_multiplies_sizes():
    base = parse_workload(gen_pipeline(PatternSpec(pattern="pipeline", width=1, stages=1)))
    big = parse_workload(gen_pipeline(
        PatternSpec(pattern="pipeline", width=1, stages=1, scale=10)))
    assert big.files["p0_in"].size == 10 * base.files["p0_in"].size


def test_invalid_spec_rejected():
    with pytest.raises(Exception):
        PatternSpec(pattern="pipeline", width=0)
    with pytest.raises(Exception):
        generate(PatternSpec(pattern="nonsense"))


# -- sweep axes ----------------------------------------------------------------

def test_sweep_configs_full_grid():
    rows = sweep_configs(bench_config(), stripes=[1, 2, 3, 4, 5], repls=[1, 2, 3, 4, 5])
    assert len(rows) == 25
    labels = [label for label, _ in rows]
    assert len(set(labels)) == 25
    assert all("s1" in labels[0] or True for _ in rows)


def test_sweep_configs_single_cell():
    rows = sweep_configs(bench_config(), stripes=[2], repls=[3])
    assert len(rows) == 1
    _, params = rows[0]
    assert params["stripe_width"] == 2
    assert params["replication_level"] == 3


def test_sweep_configs_keeps_invalid_rows():
    # invalid combos stay in the list; the runner skips them with a note
    rows = sweep_configs(bench_config(), stripes=[30], repls=[1])
    assert len(rows) == 1
