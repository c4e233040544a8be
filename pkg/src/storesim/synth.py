"""Deterministic workload generators for the benchmark patterns.

Patterns: micro_write / micro_read (single client, repeated single-file
ops), pipeline (width independent chains of stages), reduce (width
producers, one consumer), broadcast (one producer, width consumers), and
a BLAST-like search workload (broadcast of a large database followed by
per-node fine-grained scans).

Each generator emits workload text (see workload.py for the grammar) and
uses no randomness: the same PatternSpec always yields identical text.

Two modes mirror the two deployment philosophies compared throughout:

* dss  - no per-file placement, tasks pinned round-robin over hosts
         (a fixed task-to-node mapping on a plain striped store);
* wass - pattern-aware placement overrides (local for pipeline
         intermediates, one co-locate group for reduce inputs, stripe-1
         inputs so every file sits whole on one node) and no pins, so
         locality scheduling follows the data.

WASS workloads assume a collocated deployment (clients on storage
hosts); that is the deployment the optimizations exist for.

Default sizes are documented parameters, not ground truth: the medium
workload uses 100 MB files where the pattern moves bulk data, and the
reduce pattern defaults to small (2 MB) intermediates in keeping with
its role (summary statistics / convergence checks over large inputs).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import InputError
from .profiles import StorageConfig

MB = 1_000_000

BLAST_DB_BYTES = 1_700_000_000
BLAST_QUERY_BYTES = 5_600
BLAST_OUTPUT_BYTES = 82_000
BLAST_READ_BYTES = 57_344  # 56 KiB scan granularity


@dataclass
class PatternSpec:
    pattern: str = "micro_write"
    width: int = 19
    stages: int = 3
    reps: int = 1
    mode: str = "dss"  # dss | wass
    scale: int = 1  # large workload = 10x medium
    input_size: int = 100 * MB
    inter_size: int | None = None  # default: 100 MB (pipeline), 2 MB (reduce)
    output_size: int | None = None  # default: inter size; 1 MB for broadcast
    replication: int | None = None  # broadcast-file / database override
    first_host: int = 1  # lowest host id tasks are pinned to (dss)
    co_locate_host: int = 1  # reduce-stage target (wass)
    db_size: int = BLAST_DB_BYTES
    query_size: int = BLAST_QUERY_BYTES
    read_size: int = BLAST_READ_BYTES

    def __post_init__(self):
        if self.width < 1:
            raise InputError("pattern width must be >= 1")
        if self.stages < 1:
            raise InputError("pattern stages must be >= 1")
        if self.reps < 1:
            raise InputError("pattern reps must be >= 1")
        if self.scale < 1:
            raise InputError("pattern scale must be >= 1")
        if self.mode not in ("dss", "wass"):
            raise InputError(f"unknown pattern mode {self.mode!r}")


def generate(spec: PatternSpec) -> str:
    gen = {
        "micro_write": gen_micro,
        "micro_read": gen_micro,
        "pipeline": gen_pipeline,
        "reduce": gen_reduce,
        "broadcast": gen_broadcast,
        "blast": gen_blast,
    }.get(spec.pattern)
    if gen is None:
        raise InputError(f"unknown pattern {spec.pattern!r}")
    return gen(spec)


def _task(lines, tid, pin=None):
    lines.append(f"task={tid}" if pin is None else f"task={tid} pin={pin}")


def _rw(lines, tid, kind, name, offset, size):
    lines.append(f"0,{tid},open,{name},0,0")
    lines.append(f"0,{tid},{kind},{name},{offset},{size}")
    lines.append(f"0,{tid},close,{name},0,0")


def _pin(spec: PatternSpec, ordinal: int) -> int | None:
    if spec.mode == "wass":
        return None
    return spec.first_host + ordinal % spec.width


def gen_micro(spec: PatternSpec) -> str:
    """Single-client repeated writes (or reads) of one file per rep."""
    size = spec.input_size * spec.scale
    read = spec.pattern == "micro_read"
    files = ["[files]"]
    tasks = ["[tasks]"]
    for k in range(spec.reps):
        files.append(f"name=micro_{k} size={size}")
    if read:
        # Reads need committed data; a setup task writes it first.
        _task(tasks, "setup")
        for k in range(spec.reps):
            _rw(tasks, "setup", "write", f"micro_{k}", 0, size)
    _task(tasks, "bench")
    for k in range(spec.reps):
        _rw(tasks, "bench", "read" if read else "write", f"micro_{k}", 0, size)
    return "\n".join(files + [""] + tasks) + "\n"


def gen_pipeline(spec: PatternSpec) -> str:
    """width parallel chains; stage k reads stage k-1's output."""
    wass = spec.mode == "wass"
    in_size = spec.input_size * spec.scale
    mid_size = (spec.inter_size if spec.inter_size is not None else 100 * MB) * spec.scale
    files = ["[files]"]
    tasks = ["[tasks]"]
    for i in range(spec.width):
        suffix = " stripe=1" if wass else ""
        files.append(f"name=p{i}_in size={in_size}{suffix}")
        for k in range(1, spec.stages + 1):
            suffix = " placement=local" if wass else ""
            files.append(f"name=p{i}_s{k} size={mid_size}{suffix}")
    for k in range(1, spec.stages + 1):
        for i in range(spec.width):
            _task(tasks, f"p{i}_t{k}", _pin(spec, i))
            src = f"p{i}_in" if k == 1 else f"p{i}_s{k - 1}"
            src_size = in_size if k == 1 else mid_size
            _rw(tasks, f"p{i}_t{k}", "read", src, 0, src_size)
            _rw(tasks, f"p{i}_t{k}", "write", f"p{i}_s{k}", 0, mid_size)
    return "\n".join(files + [""] + tasks) + "\n"


def gen_reduce(spec: PatternSpec) -> str:
    """width producers each read an input and write an intermediate; one
    reduce task reads every intermediate and writes the result.

    wass mode places each input whole on one node (stripe 1) so locality
    scheduling spreads the producers, gathers all intermediates on one
    co-locate target so the reduce stage reads locally, and stores the
    result locally.
    """
    wass = spec.mode == "wass"
    in_size = spec.input_size * spec.scale
    mid = spec.inter_size if spec.inter_size is not None else 2 * MB
    out = spec.output_size if spec.output_size is not None else mid
    mid_size = mid * spec.scale
    out_size = out * spec.scale
    files = ["[files]"]
    tasks = ["[tasks]"]
    groups = []
    for i in range(spec.width):
        suffix = " stripe=1" if wass else ""
        files.append(f"name=r{i}_in size={in_size}{suffix}")
        suffix = " placement=co_locate:gather" if wass else ""
        files.append(f"name=r{i}_mid size={mid_size}{suffix}")
    suffix = " placement=local" if wass else ""
    files.append(f"name=reduce_out size={out_size}{suffix}")
    if wass:
        groups = ["[groups]", f"group=gather target_host={spec.co_locate_host}"]
    for i in range(spec.width):
        _task(tasks, f"r{i}_map", _pin(spec, i))
        _rw(tasks, f"r{i}_map", "read", f"r{i}_in", 0, in_size)
        _rw(tasks, f"r{i}_map", "write", f"r{i}_mid", 0, mid_size)
    _task(tasks, "reduce", _pin(spec, 0))
    tasks.append("0,reduce,open,reduce_out,0,0")
    for i in range(spec.width):
        _rw(tasks, "reduce", "read", f"r{i}_mid", 0, mid_size)
    tasks.append(f"0,reduce,write,reduce_out,0,{out_size}")
    tasks.append("0,reduce,close,reduce_out,0,0")
    parts = files + [""] + tasks
    if groups:
        parts += [""] + groups
    return "\n".join(parts) + "\n"


def gen_broadcast(spec: PatternSpec) -> str:
    """One producer writes a file read by width consumers.

    The broadcast file's replication override comes from the pattern
    parameters; the consumers stay pinned in both modes (one per host)
    because the pattern is defined by where the processes run, not by
    placement.
    """
    wass = spec.mode == "wass"
    b_size = spec.input_size * spec.scale
    out_size = (spec.output_size if spec.output_size is not None else MB) * spec.scale
    repl = f" replication={spec.replication}" if spec.replication else ""
    files = ["[files]", f"name=bcast size={b_size}{repl}"]
    tasks = ["[tasks]"]
    for i in range(spec.width):
        suffix = " placement=local" if wass else ""
        files.append(f"name=b{i}_out size={out_size}{suffix}")
    _task(tasks, "b_src", spec.first_host)
    _rw(tasks, "b_src", "write", "bcast", 0, b_size)
    for i in range(spec.width):
        tid = f"b{i}_t"
        _task(tasks, tid, spec.first_host + i % spec.width)
        _rw(tasks, tid, "read", "bcast", 0, b_size)
        _rw(tasks, tid, "write", f"b{i}_out", 0, out_size)
    return "\n".join(files + [""] + tasks) + "\n"


def gen_blast(spec: PatternSpec) -> str:
    """Search-tool I/O skeleton: every node reads a small query set, scans
    one shared pre-loaded database at fine granularity, and writes a
    small result.  Only the I/O pattern is modeled, not compute.
    """
    repl = f" replication={spec.replication}" if spec.replication else ""
    out = spec.output_size if spec.output_size is not None else BLAST_OUTPUT_BYTES
    files = ["[files]", f"name=db size={spec.db_size}{repl}"]
    tasks = ["[tasks]"]
    for i in range(spec.width):
        files.append(f"name=q{i} size={spec.query_size}")
        files.append(f"name=o{i} size={out}")
    for i in range(spec.width):
        tid = f"blast{i}"
        _task(tasks, tid, spec.first_host + i % spec.width)
        _rw(tasks, tid, "read", f"q{i}", 0, spec.query_size)
        tasks.append(f"0,{tid},open,db,0,0")
        offset = 0
        while offset < spec.db_size:
            step = min(spec.read_size, spec.db_size - offset)
            tasks.append(f"0,{tid},read,db,{offset},{step}")
            offset += step
        tasks.append(f"0,{tid},close,db,0,0")
        _rw(tasks, tid, "write", f"o{i}", 0, out)
    return "\n".join(files + [""] + tasks) + "\n"


def blast_op_count(spec: PatternSpec) -> int:
    """Closed-form op count of gen_blast output (all trace lines)."""
    db_reads = -(-spec.db_size // spec.read_size)
    return spec.width * (6 + 1 + db_reads + 1)


def sweep_configs(base: StorageConfig, stripes, repls, chunks=None, placements=None):
    """Cartesian product of sweep axes as (label, field dict) rows.

    Rows are raw field values, not StorageConfig instances: invalid
    combinations (say stripe wider than the node count) must reach the
    sweep runner so it can mark them skipped instead of dying here.
    """
    chunks = list(chunks) if chunks else [base.chunk_size]
    placements = list(placements) if placements else [base.placement]
    rows = []
    for stripe in stripes:
        for repl in repls:
            for chunk in chunks:
                for placement in placements:
                    label = f"stripe{stripe}_repl{repl}"
                    if len(chunks) > 1:
                        label += f"_chunk{chunk}"
                    if len(placements) > 1:
                        label += f"_{placement.replace(':', '-')}"
                    params = asdict(base)
                    params.update(
                        stripe_width=stripe, replication_level=repl,
                        chunk_size=chunk, placement=placement,
                    )
                    rows.append((label, params))
    return rows
