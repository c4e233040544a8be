"""Workload files: parse, validate, serialize, schedule, and replay.

Grammar (line oriented, '#' starts a comment, blank lines ignored):

    [files]
    name=<file> size=<bytes> [placement=round_robin|local|co_locate:<group>]
                [replication=<r>] [stripe=<w>]

    [tasks]
    task=<id> [pin=<host>]
    <t>,<client>,<op>,<file>,<offset>,<size>      # op: open|read|write|close

    [groups]
    group=<id> target_host=<host>
    group=<id> target_task=<task>                 # task must be pinned

Every file an op touches must be declared in [files].  A file written by
no task is a workload input and is placed into storage before the run
starts.  Timestamps are relative compute gaps inside a task: an op is
issued when the previous op has completed plus the gap between their
trace timestamps.  Dependencies are derived, not declared: a task that
reads a file some other task writes depends on that writer, and becomes
eligible only when every producer has closed all of the task's inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cluster import Cluster, OpCtx, Policy, RunStats
from .engine import Simulator
from .errors import ConfigError, InputError, WorkloadError
from .profiles import PlatformProfile, StorageConfig, parse_int
from .report import OpRecord

OP_KINDS = ("open", "read", "write", "close")


@dataclass
class FileSpec:
    name: str
    size: int
    placement: str | None = None
    group: str | None = None
    replication: int | None = None
    stripe: int | None = None


class TraceOp:
    __slots__ = ("t", "client", "kind", "file", "offset", "size", "line")

    def __init__(self, t, client, kind, file, offset, size, line):
        self.t = t
        self.client = client
        self.kind = kind
        self.file = file
        self.offset = offset
        self.size = size
        self.line = line


class Task:
    __slots__ = ("task_id", "pin", "ops", "reads", "writes", "deps", "level", "line")

    def __init__(self, task_id: str, pin: int | None, line: int):
        self.task_id = task_id
        self.pin = pin
        self.ops: list[TraceOp] = []
        self.reads: set[str] = set()
        self.writes: set[str] = set()
        self.deps: list[str] = []  # producer task ids, deterministic order
        self.level = 0
        self.line = line


@dataclass
class Workload:
    files: dict[str, FileSpec]
    tasks: dict[str, Task]
    groups: dict[str, dict[str, str]]  # gid -> {"target_host": ...} or {"target_task": ...}
    order: list[str] = field(default_factory=list)  # task declaration order

    @property
    def inputs(self) -> list[str]:
        """Files no task writes, in declaration order."""
        written = set()
        for t in self.tasks.values():
            written |= t.writes
        return [name for name in self.files if name not in written]


def _parse_tokens(line: str, lineno: int, what: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for tok in line.split():
        if "=" not in tok:
            raise InputError(f"workload line {lineno}: {what}: expected key=value, got {tok!r}")
        key, _, value = tok.partition("=")
        if key in out:
            raise InputError(f"workload line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def parse_workload(text: str) -> Workload:
    files: dict[str, FileSpec] = {}
    tasks: dict[str, Task] = {}
    groups: dict[str, dict[str, str]] = {}
    order: list[str] = []
    section = None
    current: Task | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line not in ("[files]", "[tasks]", "[groups]"):
                raise InputError(f"workload line {lineno}: unknown section {line!r}")
            section = line
            current = None
            continue
        if section == "[files]":
            kv = _parse_tokens(line, lineno, "file entry")
            name = kv.pop("name", None)
            if name is None:
                raise InputError(f"workload line {lineno}: file entry needs name=")
            if name in files:
                raise InputError(f"workload line {lineno}: duplicate file {name!r}")
            spec = FileSpec(name=name, size=0)
            for key, value in kv.items():
                if key == "size":
                    spec.size = parse_int(value, f"workload line {lineno}: size")
                elif key == "placement":
                    base, _, grp = value.partition(":")
                    if base not in ("round_robin", "local", "co_locate"):
                        raise InputError(f"workload line {lineno}: unknown placement {value!r}")
                    if base == "co_locate" and not grp:
                        raise InputError(
                            f"workload line {lineno}: co_locate placement needs a group"
                        )
                    spec.placement = base
                    spec.group = grp or None
                elif key == "replication":
                    spec.replication = parse_int(value, f"workload line {lineno}: replication")
                elif key == "stripe":
                    spec.stripe = parse_int(value, f"workload line {lineno}: stripe")
                else:
                    raise InputError(f"workload line {lineno}: unknown file key {key!r}")
            if spec.size < 0:
                raise InputError(f"workload line {lineno}: negative size")
            files[name] = spec
        elif section == "[tasks]":
            if line.startswith("task="):
                kv = _parse_tokens(line, lineno, "task header")
                tid = kv.pop("task")
                pin = None
                if "pin" in kv:
                    pin = parse_int(kv.pop("pin"), f"workload line {lineno}: pin")
                if kv:
                    raise InputError(
                        f"workload line {lineno}: unknown task keys {sorted(kv)!r}"
                    )
                if tid in tasks:
                    raise InputError(f"workload line {lineno}: duplicate task {tid!r}")
                current = Task(tid, pin, lineno)
                tasks[tid] = current
                order.append(tid)
            else:
                if current is None:
                    raise InputError(f"workload line {lineno}: op before any task= header")
                parts = line.split(",")
                if len(parts) != 6:
                    raise InputError(
                        f"workload line {lineno}: op needs t,client,op,file,offset,size"
                    )
                t = parse_int(parts[0], f"workload line {lineno}: t")
                kind = parts[2].strip()
                if kind not in OP_KINDS:
                    raise InputError(f"workload line {lineno}: unknown op {kind!r}")
                op = TraceOp(
                    t, parts[1].strip(), kind, parts[3].strip(),
                    parse_int(parts[4], f"workload line {lineno}: offset"),
                    parse_int(parts[5], f"workload line {lineno}: size"),
                    lineno,
                )
                if t < 0 or op.offset < 0 or op.size < 0:
                    raise InputError(f"workload line {lineno}: negative op field")
                current.ops.append(op)
        elif section == "[groups]":
            kv = _parse_tokens(line, lineno, "group entry")
            gid = kv.pop("group", None)
            if gid is None:
                raise InputError(f"workload line {lineno}: group entry needs group=")
            if gid in groups:
                raise InputError(f"workload line {lineno}: duplicate group {gid!r}")
            if set(kv) == {"target_host"}:
                groups[gid] = {"target_host": kv["target_host"]}
            elif set(kv) == {"target_task"}:
                groups[gid] = {"target_task": kv["target_task"]}
            else:
                raise InputError(
                    f"workload line {lineno}: group needs exactly one of "
                    f"target_host= or target_task="
                )
        else:
            raise InputError(f"workload line {lineno}: content before any section header")

    w = Workload(files, tasks, groups, order)
    _validate(w)
    return w


def _validate(w: Workload) -> None:
    writers: dict[str, str] = {}
    for tid in w.order:
        task = w.tasks[tid]
        open_state: dict[str, str] = {}  # file -> "open"|"closed"
        prev_t = None
        for op in task.ops:
            if prev_t is not None and op.t < prev_t:
                raise InputError(
                    f"workload line {op.line}: timestamps within a task must be non-decreasing"
                )
            prev_t = op.t
            if op.file not in w.files:
                raise InputError(f"workload line {op.line}: undeclared file {op.file!r}")
            state = open_state.get(op.file)
            if op.kind == "open":
                if state is not None:
                    raise InputError(
                        f"workload line {op.line}: {op.file!r} opened twice in task {tid!r}"
                    )
                open_state[op.file] = "open"
            elif op.kind == "close":
                if state != "open":
                    raise InputError(
                        f"workload line {op.line}: close of {op.file!r} without open"
                    )
                open_state[op.file] = "closed"
            else:
                if state != "open":
                    raise InputError(
                        f"workload line {op.line}: {op.kind} of {op.file!r} outside open/close"
                    )
                if op.kind == "read":
                    task.reads.add(op.file)
                else:
                    prior = writers.get(op.file)
                    if prior is not None and prior != tid:
                        raise InputError(
                            f"workload line {op.line}: {op.file!r} written by both "
                            f"{prior!r} and {tid!r}"
                        )
                    writers[op.file] = tid
                    task.writes.add(op.file)
        still_open = sorted(f for f, s in open_state.items() if s == "open")
        if still_open:
            raise InputError(f"task {tid!r}: files never closed: {', '.join(still_open)}")

    for gid, target in w.groups.items():
        if "target_task" in target and target["target_task"] not in w.tasks:
            raise InputError(f"group {gid!r}: unknown target task {target['target_task']!r}")
    for spec in w.files.values():
        if spec.group is not None and spec.group not in w.groups:
            raise InputError(f"file {spec.name!r}: unknown co_locate group {spec.group!r}")

    # Derived dependency edges.  A task reading its own output forms a
    # self-edge, rejected below with the other cycles.
    for tid in w.order:
        task = w.tasks[tid]
        deps = []
        for name in sorted(task.reads):
            producer = writers.get(name)
            if producer is not None:
                deps.append(producer)
        task.deps = sorted(set(deps))

    # Reads of files that are neither inputs nor produced are caught above
    # (undeclared) or at replay time (declared but never written).  Detect
    # cycles and assign stage levels with Kahn's algorithm.
    indeg = {tid: len(w.tasks[tid].deps) for tid in w.order}
    children: dict[str, list[str]] = {tid: [] for tid in w.order}
    for tid in w.order:
        for dep in w.tasks[tid].deps:
            children[dep].append(tid)
    queue = [tid for tid in w.order if indeg[tid] == 0]
    seen = 0
    while queue:
        nxt: list[str] = []
        for tid in queue:
            seen += 1
            task = w.tasks[tid]
            task.level = max((w.tasks[d].level + 1 for d in task.deps), default=0)
            for child in children[tid]:
                indeg[child] -= 1
                if indeg[child] == 0:
                    nxt.append(child)
        queue = nxt
    if seen != len(w.tasks):
        stuck = sorted(tid for tid, d in indeg.items() if d > 0)
        raise InputError(f"workload has a dependency cycle through: {', '.join(stuck)}")


def serialize_workload(w: Workload) -> str:
    """Canonical text form; parse(serialize(w)) reproduces w."""
    lines = ["[files]"]
    for spec in w.files.values():
        parts = [f"name={spec.name}", f"size={spec.size}"]
        if spec.placement is not None:
            if spec.group is not None:
                parts.append(f"placement={spec.placement}:{spec.group}")
            else:
                parts.append(f"placement={spec.placement}")
        if spec.replication is not None:
            parts.append(f"replication={spec.replication}")
        if spec.stripe is not None:
            parts.append(f"stripe={spec.stripe}")
        lines.append(" ".join(parts))
    lines.append("")
    lines.append("[tasks]")
    for tid in w.order:
        task = w.tasks[tid]
        header = f"task={tid}"
        if task.pin is not None:
            header += f" pin={task.pin}"
        lines.append(header)
        for op in task.ops:
            lines.append(f"{op.t},{op.client},{op.kind},{op.file},{op.offset},{op.size}")
    if w.groups:
        lines.append("")
        lines.append("[groups]")
        for gid, target in w.groups.items():
            key, value = next(iter(target.items()))
            lines.append(f"group={gid} {key}={value}")
    return "\n".join(lines) + "\n"


def assign_task_node(task: Task, input_hosts: list[set[int]] | None,
                     client_hosts: list[int], loads: dict[int, int]) -> int:
    """Pick the host a task runs on.

    Locality first: if one storage host holds every chunk of every input,
    run there (provided it also runs a client).  Otherwise fall back to
    the pinned host, then to the least-loaded client host with the lowest
    host id breaking ties.
    """
    if input_hosts:
        common = set(client_hosts)
        for hosts in input_hosts:
            common &= hosts
            if not common:
                break
        if common:
            return min(common)
    if task.pin is not None:
        if task.pin not in loads:
            raise ConfigError(f"task {task.task_id!r}: pinned host {task.pin} runs no client")
        return task.pin
    return min(client_hosts, key=lambda h: (loads[h], h))


class Driver:
    """Replays a workload: scheduling, op sequencing, record collection."""

    def __init__(self, sim: Simulator, cluster: Cluster, workload: Workload,
                 stagger_ns: int = 0):
        self.sim = sim
        self.cluster = cluster
        self.w = workload
        self.stagger_ns = stagger_ns
        self.records: list[OpRecord] = []
        self.loads: dict[int, int] = {h: 0 for h in cluster.config.client_hosts}
        self.task_host: dict[str, int] = {}
        self._waiting: dict[str, set[str]] = {}  # task -> producer files still open
        self._dependents: dict[str, list[str]] = {}  # file -> consumer task ids
        self._op_index: dict[str, int] = {}
        self._group_hosts: dict[str, int] = {}
        self._batch_time = -1
        self._batch_count = 0

    # -- setup -------------------------------------------------------------

    def _policy_for(self, spec: FileSpec) -> Policy:
        cfg = self.cluster.config
        placement = spec.placement
        group = spec.group
        if placement is None:
            base, _, grp = cfg.placement.partition(":")
            placement = base
            group = grp or None
        target = None
        if placement == "co_locate":
            if group is None:
                raise ConfigError(f"file {spec.name!r}: co_locate placement without a group")
            target = self._resolve_group(group)
        stripe = spec.stripe if spec.stripe is not None else cfg.stripe_width
        repl = spec.replication if spec.replication is not None else cfg.replication_level
        if stripe < 1 or repl < 1:
            raise ConfigError(f"file {spec.name!r}: stripe and replication must be >= 1")
        return Policy(placement, target, stripe, repl)

    def _resolve_group(self, gid: str) -> int:
        host = self._group_hosts.get(gid)
        if host is not None:
            return host
        target = self.w.groups.get(gid)
        if target is None:
            raise ConfigError(f"unknown co_locate group {gid!r}")
        if "target_host" in target:
            host = parse_int(target["target_host"], f"group {gid} target_host")
        else:
            tid = target["target_task"]
            task = self.w.tasks[tid]
            if task.pin is None and tid not in self.task_host:
                raise ConfigError(
                    f"group {gid!r}: target task {tid!r} is not pinned and not scheduled yet"
                )
            host = self.task_host.get(tid, task.pin)
        self._group_hosts[gid] = host
        return host

    def prepare(self) -> None:
        """Pre-populate workload inputs and index dependency releases."""
        written: dict[str, str] = {}
        for tid in self.w.order:
            for name in self.w.tasks[tid].writes:
                written[name] = tid
        for name in self.w.inputs:
            spec = self.w.files[name]
            self.cluster.prepopulate(name, spec.size, self._policy_for(spec))
        for tid in self.w.order:
            task = self.w.tasks[tid]
            needed = {f for f in task.reads if f in written and written[f] != tid}
            self._waiting[tid] = set(needed)
            for name in needed:
                self._dependents.setdefault(name, []).append(tid)

    def start(self) -> None:
        self.prepare()
        for tid in self.w.order:
            if not self._waiting[tid]:
                self._launch(tid)

    # -- task lifecycle ----------------------------------------------------

    def _launch(self, tid: str) -> None:
        now = self.sim.now
        if self.stagger_ns:
            if now != self._batch_time:
                self._batch_time = now
                self._batch_count = 0
            offset = self._batch_count * self.stagger_ns
            self._batch_count += 1
        else:
            offset = 0
        task = self.w.tasks[tid]
        host = self._assign(task)
        self.task_host[tid] = host
        self.loads[host] += 1
        self._op_index[tid] = 0
        self.sim.at(now + offset, self._issue_next, (tid, -1))

    def _assign(self, task: Task) -> int:
        cfg = self.cluster.config
        input_hosts: list[set[int]] = []
        complete = bool(task.reads)
        for name in sorted(task.reads):
            meta = self.cluster.state.meta(name)
            if meta is None or not meta.chunks:
                complete = False
                break
            for replicas, _nbytes in meta.chunks:
                input_hosts.append(set(replicas))
        return assign_task_node(
            task, input_hosts if complete else None, cfg.client_hosts, self.loads
        )

    def _issue_next(self, state) -> None:
        tid, prev_idx = state
        task = self.w.tasks[tid]
        idx = prev_idx + 1
        if idx >= len(task.ops):
            self.loads[self.task_host[tid]] -= 1
            return
        op = task.ops[idx]
        now = self.sim.now
        if op.kind in ("open", "close"):
            self.records.append(OpRecord(
                op_id=len(self.records),
                task_id=tid, client=op.client, host=self.task_host[tid], kind=op.kind,
                file=op.file, start=now, end=now, bytes=0, chunks=0,
                manager_requests=0, remote_data=0, loopback_data=0,
                remote_ctrl=0, loopback_ctrl=0, storage_delta=0, level=task.level,
            ))
            if op.kind == "close" and op.file in task.writes:
                self._file_closed(op.file)
            self._continue(tid, idx, now)
            return
        octx = OpCtx(
            op.kind, tid, op.client, op.file, op.offset, op.size,
            self.task_host[tid], op.line,
            self._policy_for(self.w.files[op.file]), self._op_done,
        )
        octx.start = now
        self._op_index[tid] = idx
        self.cluster.submit_op(octx)

    def _continue(self, tid: str, idx: int, done_at: int) -> None:
        task = self.w.tasks[tid]
        if idx + 1 < len(task.ops):
            gap = task.ops[idx + 1].t - task.ops[idx].t
            if gap < 0:
                gap = 0
            self.sim.at(done_at + gap, self._issue_next, (tid, idx))
        else:
            self.sim.at(done_at, self._issue_next, (tid, idx))

    def _op_done(self, octx: OpCtx) -> None:
        tid = octx.task_id
        task = self.w.tasks[tid]
        idx = self._op_index[tid]
        self.records.append(OpRecord(
            op_id=len(self.records),
            task_id=tid, client=octx.client_id, host=octx.host, kind=octx.kind,
            file=octx.file, start=octx.start, end=octx.end,
            bytes=octx.remote_data + octx.loopback_data,
            chunks=octx.chunk_transfers + octx.forwards,
            manager_requests=octx.mgr_requests,
            remote_data=octx.remote_data, loopback_data=octx.loopback_data,
            remote_ctrl=octx.remote_ctrl, loopback_ctrl=octx.loopback_ctrl,
            storage_delta=octx.stored_bytes, level=task.level,
        ))
        self._continue(tid, idx, octx.end)

    def _file_closed(self, name: str) -> None:
        for tid in self._dependents.get(name, ()):
            waiting = self._waiting[tid]
            if name in waiting:
                waiting.discard(name)
                if not waiting:
                    self._launch(tid)
