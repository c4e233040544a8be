"""End-to-end checks, one per headline property, at stated tolerances.

Each test is a self-contained claim about the whole stack: protocol
message counts, agreement with independently coded closed forms,
calibration closure, sweep trends, placement-policy orderings, scale
and wall-clock budget, byte-level determinism, and the statistics
helper against a reference implementation.  Oracles here are written
from scratch on purpose, even where a module test has a sibling.
"""

import math
import random
import re
import resource
import statistics
import time

import scipy.stats

from storesim import (
    MeasurementSet,
    PatternSpec,
    ci_check,
    compare,
    derive_profile,
    format_report,
    gen_blast,
    gen_broadcast,
    gen_micro,
    gen_pipeline,
    gen_reduce,
    simulate,
    sweep,
    t_quantile,
)

from conftest import ACCEPTANCE_METRICS, bench_config, make_profile, tiny_config

MICRO_100MB = gen_micro(PatternSpec(pattern="micro_write"))


# -- protocol message counts ---------------------------------------------------

def test_write_message_count_law():
    # 100 MB in 1 MB chunks: two manager round trips per write and one
    # chunk transfer per chunk, plus one forward per extra replica
    t0 = time.perf_counter()
    for repl in (1, 2, 3):
        rep = simulate(make_profile(), bench_config(replication_level=repl),
                       MICRO_100MB, label=f"law_r{repl}")
        assert rep.manager_requests == 2
        assert rep.chunk_transfers == 100
        assert rep.replica_forwards == 100 * (repl - 1)
    assert time.perf_counter() - t0 < 1.0


# -- closed-form agreement -----------------------------------------------------

# Independent walk of the contention-free protocol on the minimal layout
# (manager host 0, storage host 1, client host 2; every link remote).
# Constants mirror the shared test profile, written out by hand.
MU, MU_SM, MGR, FRAME, CTRL = 8, 3, 200_000, 65536, 1024
CHUNK = 1_000_000
CTRL_SVC = CTRL * MU


def _frames(nbytes):
    wire = max(nbytes, CTRL)
    sizes, left = [], wire
    while left > 0:
        take = min(left, FRAME)
        sizes.append(take)
        left -= take
    return sizes


def _write_walk(size):
    k = math.ceil(size / CHUNK)
    t = 4 * CTRL_SVC + MGR                    # allocation round trip
    out_free = t
    in_free = store_free = s_out = c_in = 0
    last_wack = t
    for i in range(k):
        payload = min(CHUNK, size - i * CHUNK)
        for b in _frames(payload):            # both queue ends serialize
            out_free += b * MU
            in_free = max(in_free, out_free) + b * MU
        store_free = max(store_free, in_free) + payload * MU_SM
        s_out = max(s_out, store_free) + CTRL_SVC
        c_in = max(c_in, s_out) + CTRL_SVC    # write ack reaches client
        last_wack = c_in
    return last_wack + 4 * CTRL_SVC + MGR     # commit round trip


def _read_walk(size):
    k = math.ceil(size / CHUNK)
    t = 4 * CTRL_SVC + MGR                    # chunk-map round trip
    c_out = t
    s_in = store_free = s_out = c_in = 0
    for i in range(k):
        payload = min(CHUNK, size - i * CHUNK)
        c_out += CTRL_SVC                     # pipelined fetch requests
        s_in = max(s_in, c_out) + CTRL_SVC
        store_free = max(store_free, s_in) + payload * MU_SM
        for b in _frames(payload):
            s_out = max(s_out, store_free) + b * MU
            c_in = max(c_in, s_out) + b * MU
    return c_in


def _single_op(kind, size):
    name = "f" if kind == "write" else "d"
    return (f"[files]\nname={name} size={size}\n\n[tasks]\ntask=t\n"
            f"0,0,open,{name},0,0\n0,0,{kind},{name},0,{size}\n"
            f"0,0,close,{name},0,0\n")


def test_contention_free_closed_form():
    t0 = time.perf_counter()
    diffs = []
    for size in (1_000_000, 3_000_000):
        rep = simulate(make_profile(), tiny_config(), _single_op("write", size))
        diff = abs(rep.makespan_ns - _write_walk(size))
        assert diff <= rep.events  # integer rounding allowance: 1 ns per event
        diffs.append(diff)
        rep = simulate(make_profile(), tiny_config(), _single_op("read", size))
        diff = abs(rep.makespan_ns - _read_walk(size))
        assert diff <= rep.events
        diffs.append(diff)
    assert time.perf_counter() - t0 < 1.0
    ACCEPTANCE_METRICS["closed-form deviation (ns)"] = (
        f"{max(diffs)} across write/read x 1 MB/3 MB")


# -- calibration closure ------------------------------------------------------

def test_calibration_round_trip_closure():
    # synthetic testbed: 12 ms full write, 1 ms zero-size, 1 MB chunks,
    # 1 Gbps remote / 10 Gbps loopback.  The derived profile, replayed
    # through the microbenchmark it came from, must land on the input
    # mean exactly.
    t0 = time.perf_counter()
    m = MeasurementSet(
        remote_throughput_bps=10**9,
        loopback_throughput_bps=10**10,
        chunk_size_bytes=1_000_000,
        full_op_ns=[12_000_000] * 5,
        zero_size_ns=[1_000_000] * 5,
    )
    profile = derive_profile(m)
    rep = simulate(profile, tiny_config(), _single_op("write", 1_000_000))
    assert rep.makespan_ns == 12_000_000
    assert time.perf_counter() - t0 < 1.0


# -- sweep trend ----------------------------------------------------------------

def test_sweep_replication_monotone():
    t0 = time.perf_counter()
    reports, skipped = sweep(make_profile(), bench_config(), MICRO_100MB,
                             stripes=[1, 2, 3, 4, 5], repls=[1, 2, 3, 4, 5])
    assert not skipped
    assert len(reports) == 25
    spans = {}
    for rep in reports:
        s, r = (int(n) for n in re.findall(r"\d+", rep.label))
        spans[(s, r)] = rep.makespan_ns
    for s in range(1, 6):
        row = [spans[(s, r)] for r in range(1, 6)]
        assert all(a <= b for a, b in zip(row, row[1:])), (s, row)
    assert time.perf_counter() - t0 < 30.0


# -- placement-policy orderings --------------------------------------------------

def test_pipeline_locality_beats_default():
    t0 = time.perf_counter()
    dss = simulate(make_profile(), bench_config(),
                   gen_pipeline(PatternSpec(pattern="pipeline", width=19, stages=3)),
                   label="pipe_dss")
    wass = simulate(make_profile(), bench_config(),
                    gen_pipeline(PatternSpec(pattern="pipeline", width=19, stages=3,
                                             mode="wass")),
                    label="pipe_wass")
    produced = [r for r in wass.records if not r.file.endswith("_in")]
    assert sum(r.remote_data for r in produced) == 0
    assert wass.makespan_ns < dss.makespan_ns
    assert time.perf_counter() - t0 < 60.0
    ACCEPTANCE_METRICS["pipeline 19x3 makespan (ns)"] = (
        f"local+collocated {wass.makespan_ns:,} vs default {dss.makespan_ns:,}")


def test_reduce_colocation_beats_default():
    t0 = time.perf_counter()
    dss = simulate(make_profile(), bench_config(),
                   gen_reduce(PatternSpec(pattern="reduce", width=19)),
                   label="reduce_dss")
    wass = simulate(make_profile(), bench_config(),
                    gen_reduce(PatternSpec(pattern="reduce", width=19, mode="wass")),
                    label="reduce_wass")
    gather_reads = [r for r in wass.records if r.kind == "read" and r.level == 1]
    assert gather_reads
    assert sum(r.remote_data for r in gather_reads) == 0
    rows = compare([dss, wass])
    assert rows[0].label == "reduce_wass"
    assert time.perf_counter() - t0 < 60.0
    ACCEPTANCE_METRICS["reduce 19->1 makespan (ns)"] = (
        f"co-locate {wass.makespan_ns:,} vs default {dss.makespan_ns:,}")


# -- scale, speed, determinism ----------------------------------------------------

def test_blast_scale_within_budget():
    text = gen_blast(PatternSpec(pattern="blast"))
    first = simulate(make_profile(), bench_config(), text, label="blast")
    second = simulate(make_profile(), bench_config(), text, label="blast")
    assert first.ops >= 550_000
    assert first.wall_s <= 300.0 and second.wall_s <= 300.0
    assert format_report(first) == format_report(second)
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    ACCEPTANCE_METRICS["database-scan replay"] = (
        f"{first.ops:,} ops, {first.events:,} events, "
        f"makespan {first.makespan_ns:,} ns, wall {first.wall_s:.1f} s, "
        f"peak rss {peak_mb:.0f} MiB")


def test_reports_byte_identical():
    cases = [
        ("micro", bench_config(stripe_width=2, replication_level=2),
         MICRO_100MB, 0),
        ("bcast", bench_config(replication_level=2),
         gen_broadcast(PatternSpec(pattern="broadcast", width=4, replication=2)), 1),
        ("gather", bench_config(),
         gen_reduce(PatternSpec(pattern="reduce", width=4, mode="wass")), 7),
    ]
    for label, config, text, seed in cases:
        a = simulate(make_profile(), config, text, seed=seed, label=label)
        b = simulate(make_profile(), config, text, seed=seed, label=label)
        assert format_report(a) == format_report(b), label


# -- interval helper vs reference --------------------------------------------------

def test_interval_check_matches_reference():
    rng = random.Random(20260822)
    for trial in range(20):
        n = rng.randint(2, 40)
        base = rng.randint(50, 10_000)
        spread = rng.choice([0, 1, base // 20, base // 3])
        samples = [base + rng.randint(-spread, spread) if spread else base
                   for _ in range(n)]
        assert abs(t_quantile(0.975, n - 1)
                   - scipy.stats.t.ppf(0.975, n - 1)) <= 1e-6
        mean = sum(samples) / n
        half = (scipy.stats.t.ppf(0.975, n - 1)
                * statistics.stdev(samples) / math.sqrt(n))
        ref_sufficient = (half / mean if mean else 0.0) <= 0.05
        assert ci_check(samples).sufficient == ref_sufficient, (trial, samples)
