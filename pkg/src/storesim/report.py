"""Per-operation records, run/stage aggregation, and config ranking.

A run produces one OpRecord per trace operation (including the
zero-duration open/close records).  aggregate() folds them into a
RunReport: makespan, per-stage windows (stage = topological level of the
task graph), byte totals split remote/loopback and data/control, message
counters, and the storage footprint.  compare() ranks several reports by
makespan with an equivalence band for near-identical configs.

Reports serialize to structured text plus a flat CSV of per-op records.
The text form is deterministic byte-for-byte for identical runs; the
wall-clock field stays on the object only (printed by the CLI, never
written to the file).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError

REPORT_INT_FIELDS = (
    "seed", "makespan_ns", "first_start_ns", "last_end_ns", "clock_ns", "events",
    "ops", "reads", "writes", "opens", "closes",
    "remote_data_bytes", "loopback_data_bytes",
    "remote_ctrl_bytes", "loopback_ctrl_bytes",
    "control_messages", "net_requests", "wire_bytes",
    "chunk_transfers", "replica_forwards", "manager_requests",
    "storage_final_bytes", "storage_peak_bytes",
)


class OpRecord:
    """Outcome of one trace operation."""

    __slots__ = (
        "op_id", "task_id", "client", "host", "kind", "file", "start", "end",
        "bytes", "chunks", "manager_requests", "remote_data", "loopback_data",
        "remote_ctrl", "loopback_ctrl", "storage_delta", "level",
    )

    def __init__(self, op_id=0, task_id="", client="", host=0, kind="", file="",
                 start=0, end=0, bytes=0, chunks=0, manager_requests=0,
                 remote_data=0, loopback_data=0, remote_ctrl=0, loopback_ctrl=0,
                 storage_delta=0, level=0):
        self.op_id = op_id
        self.task_id = task_id
        self.client = client
        self.host = host
        self.kind = kind
        self.file = file
        self.start = start
        self.end = end
        self.bytes = bytes
        self.chunks = chunks
        self.manager_requests = manager_requests
        self.remote_data = remote_data
        self.loopback_data = loopback_data
        self.remote_ctrl = remote_ctrl
        self.loopback_ctrl = loopback_ctrl
        self.storage_delta = storage_delta
        self.level = level

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass
class StageAgg:
    """Aggregate over all records of one topological level."""

    level: int
    tasks: int = 0
    ops: int = 0
    reads: int = 0
    writes: int = 0
    read_bytes: int = 0
    written_bytes: int = 0
    remote_data_bytes: int = 0
    start_ns: int = 0
    end_ns: int = 0


@dataclass
class RunReport:
    label: str = ""
    seed: int = 0
    makespan_ns: int = 0
    first_start_ns: int = 0
    last_end_ns: int = 0
    clock_ns: int = 0
    events: int = 0
    ops: int = 0
    reads: int = 0
    writes: int = 0
    opens: int = 0
    closes: int = 0
    remote_data_bytes: int = 0
    loopback_data_bytes: int = 0
    remote_ctrl_bytes: int = 0
    loopback_ctrl_bytes: int = 0
    control_messages: int = 0
    net_requests: int = 0
    wire_bytes: int = 0
    chunk_transfers: int = 0
    replica_forwards: int = 0
    manager_requests: int = 0
    storage_final_bytes: int = 0
    storage_peak_bytes: int = 0
    stages: list[StageAgg] = field(default_factory=list)
    records: list[OpRecord] = field(default_factory=list)
    wall_s: float = 0.0  # object-only; excluded from the serialized form

    @property
    def remote_bytes(self) -> int:
        return self.remote_data_bytes + self.remote_ctrl_bytes

    @property
    def loopback_bytes(self) -> int:
        return self.loopback_data_bytes + self.loopback_ctrl_bytes


def aggregate(records, graph=None, stats=None, label: str = "", seed: int = 0,
              events: int = 0, clock_ns: int = 0, wall_s: float = 0.0) -> RunReport:
    """Fold per-op records (plus optional run counters) into a RunReport.

    graph, when given, supplies task -> topological level; otherwise the
    level stamped on each record is used.  stats, when given, supplies
    the network/storage counters; otherwise totals fall back to sums
    over the records (message and footprint counters the records cannot
    reconstruct stay zero).
    """
    rep = RunReport(label=label, seed=seed, events=events, clock_ns=clock_ns,
                    wall_s=wall_s, records=list(records))
    stages: dict[int, StageAgg] = {}
    stage_tasks: dict[int, set[str]] = {}
    for r in rep.records:
        rep.ops += 1
        if r.kind == "read":
            rep.reads += 1
        elif r.kind == "write":
            rep.writes += 1
        elif r.kind == "open":
            rep.opens += 1
        elif r.kind == "close":
            rep.closes += 1
        level = r.level
        if graph is not None:
            task = graph.tasks.get(r.task_id)
            if task is not None:
                level = task.level
        st = stages.get(level)
        if st is None:
            st = stages[level] = StageAgg(level=level, start_ns=r.start, end_ns=r.end)
            stage_tasks[level] = set()
        st.ops += 1
        stage_tasks[level].add(r.task_id)
        if r.start < st.start_ns:
            st.start_ns = r.start
        if r.end > st.end_ns:
            st.end_ns = r.end
        data = r.remote_data + r.loopback_data
        if r.kind == "read":
            st.reads += 1
            st.read_bytes += data
        elif r.kind == "write":
            st.writes += 1
            st.written_bytes += data
        st.remote_data_bytes += r.remote_data
    if rep.records:
        rep.first_start_ns = min(r.start for r in rep.records)
        rep.last_end_ns = max(r.end for r in rep.records)
        rep.makespan_ns = rep.last_end_ns - rep.first_start_ns
    for level in sorted(stages):
        st = stages[level]
        st.tasks = len(stage_tasks[level])
        rep.stages.append(st)
    if stats is not None:
        rep.remote_data_bytes = stats.remote_data_bytes
        rep.loopback_data_bytes = stats.loopback_data_bytes
        rep.remote_ctrl_bytes = stats.remote_ctrl_bytes
        rep.loopback_ctrl_bytes = stats.loopback_ctrl_bytes
        rep.control_messages = stats.control_messages
        rep.net_requests = stats.requests_delivered
        rep.wire_bytes = stats.wire_bytes_delivered
        rep.chunk_transfers = stats.chunk_transfers
        rep.replica_forwards = stats.replica_forwards
        rep.manager_requests = stats.manager_requests
        rep.storage_final_bytes = stats.storage_bytes
        rep.storage_peak_bytes = stats.storage_peak
    else:
        for r in rep.records:
            rep.remote_data_bytes += r.remote_data
            rep.loopback_data_bytes += r.loopback_data
            rep.remote_ctrl_bytes += r.remote_ctrl
            rep.loopback_ctrl_bytes += r.loopback_ctrl
            rep.manager_requests += r.manager_requests
    return rep


# -- serialization ----------------------------------------------------------

STAGE_HEADER = "level,tasks,ops,reads,writes,read_bytes,written_bytes,remote_data_bytes,start_ns,end_ns"
OPS_HEADER = ("op_id,task,client,host,kind,file,start_ns,end_ns,bytes,chunks,"
              "manager_requests,remote_data,loopback_data,remote_ctrl,loopback_ctrl,"
              "storage_delta,level")


def format_report(rep: RunReport) -> str:
    lines = ["[run]", f"label={rep.label}"]
    for name in REPORT_INT_FIELDS:
        lines.append(f"{name}={getattr(rep, name)}")
    lines.append("")
    lines.append("[stages]")
    lines.append(STAGE_HEADER)
    for st in rep.stages:
        lines.append(
            f"{st.level},{st.tasks},{st.ops},{st.reads},{st.writes},"
            f"{st.read_bytes},{st.written_bytes},{st.remote_data_bytes},"
            f"{st.start_ns},{st.end_ns}"
        )
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> RunReport:
    rep = RunReport()
    section = None
    known = set(REPORT_INT_FIELDS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line in ("[run]", "[stages]"):
            section = line
            continue
        if section == "[run]":
            key, sep, value = line.partition("=")
            if not sep:
                raise InputError(f"report line {lineno}: expected key=value")
            if key == "label":
                rep.label = value
            elif key in known:
                try:
                    setattr(rep, key, int(value))
                except ValueError:
                    raise InputError(f"report line {lineno}: bad integer {value!r}") from None
            else:
                raise InputError(f"report line {lineno}: unknown report key {key!r}")
        elif section == "[stages]":
            if line == STAGE_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 10:
                raise InputError(f"report line {lineno}: bad stage row")
            try:
                vals = [int(p) for p in parts]
            except ValueError:
                raise InputError(f"report line {lineno}: bad stage integer") from None
            rep.stages.append(StageAgg(
                level=vals[0], tasks=vals[1], ops=vals[2], reads=vals[3],
                writes=vals[4], read_bytes=vals[5], written_bytes=vals[6],
                remote_data_bytes=vals[7], start_ns=vals[8], end_ns=vals[9],
            ))
        else:
            raise InputError(f"report line {lineno}: content before any section header")
    return rep


def format_ops_csv(records) -> str:
    lines = [OPS_HEADER]
    for r in records:
        lines.append(
            f"{r.op_id},{r.task_id},{r.client},{r.host},{r.kind},{r.file},"
            f"{r.start},{r.end},{r.bytes},{r.chunks},{r.manager_requests},"
            f"{r.remote_data},{r.loopback_data},{r.remote_ctrl},{r.loopback_ctrl},"
            f"{r.storage_delta},{r.level}"
        )
    return "\n".join(lines) + "\n"


# -- ranking ----------------------------------------------------------------

@dataclass
class RankRow:
    rank: int
    group: int
    label: str
    makespan_ns: int
    vs_best: float


def compare(reports: list[RunReport], band: float = 0.02) -> list[RankRow]:
    """Rank reports ascending by makespan.

    Reports whose makespan is within `band` of their group's leader (the
    fastest member) share a group id: configs that close together should
    be read as equivalent, not ordered.
    """
    ordered = sorted(reports, key=lambda r: (r.makespan_ns, r.label))
    rows: list[RankRow] = []
    group = 0
    leader = None
    best = ordered[0].makespan_ns if ordered else 0
    for i, rep in enumerate(ordered):
        if leader is None:
            leader = rep.makespan_ns
        elif rep.makespan_ns > leader * (1.0 + band):
            group += 1
            leader = rep.makespan_ns
        ratio = (rep.makespan_ns / best) if best else 1.0
        rows.append(RankRow(i + 1, group, rep.label, rep.makespan_ns, ratio))
    return rows


RANKING_HEADER = "rank,group,label,makespan_ns,vs_best"


def format_ranking(rows: list[RankRow], skipped: list[tuple[str, str]] | None = None) -> str:
    """Ranking CSV; skipped configs appear as trailing comment lines."""
    lines = [RANKING_HEADER]
    for row in rows:
        lines.append(
            f"{row.rank},{row.group},{row.label},{row.makespan_ns},{row.vs_best:.6f}"
        )
    for label, reason in skipped or ():
        lines.append(f"# skipped {label}: {reason}")
    return "\n".join(lines) + "\n"
