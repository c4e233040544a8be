"""Storage-system model: manager, storage nodes, clients, and protocols.

Deployment layout is fixed and deterministic: host 0 runs the manager,
hosts 1..n_storage_nodes run storage services, and clients either share
the storage hosts (collocated deployments) or occupy the hosts after
them.  Every host has a network component (see network.py); each system
service is a FIFO queue with its own service rate.

Write protocol, per trace write op: a control request to the manager
allocates chunk placements, the client then sends one chunk-data request
per chunk to the planned primaries, each primary stores the chunk and
synchronously forwards it down its replica chain, the tail replica
acknowledges the client, and a final control request commits the chunk
map at the manager.  A write therefore always costs exactly two manager
requests plus ceil(size/chunk) chunk transfers plus (replication-1)
forwards per chunk, and its latency grows with the replication level.

Read protocol, per trace read op: one control request fetches the chunk
map from the manager, then the client requests every covered chunk from
one replica (the collocated one when the reader host holds a copy,
otherwise a seeded-RNG uniform pick); responses carry the chunk payload.
"""

from __future__ import annotations

from fractions import Fraction

from .engine import Service, Simulator
from .errors import ConfigError, WorkloadError
from .network import CHUNK_DATA, CONTROL, HostNet, NetRequest, NetStats, ceil_mul, wire_size
from .profiles import PlatformProfile, StorageConfig


def ceil_frac(x: Fraction) -> int:
    x = Fraction(x)
    return -(-x.numerator // x.denominator)


class RunStats(NetStats):
    """NetStats plus protocol- and storage-level counters."""

    __slots__ = (
        "chunk_transfers", "replica_forwards", "manager_requests",
        "storage_bytes", "storage_peak",
    )

    def __init__(self):
        super().__init__()
        self.chunk_transfers = 0
        self.replica_forwards = 0
        self.manager_requests = 0
        self.storage_bytes = 0
        self.storage_peak = 0


class OpCtx:
    """Protocol state and per-op tallies for one trace read or write."""

    __slots__ = (
        "kind", "task_id", "client_id", "file", "offset", "size", "host",
        "start", "end", "line", "nchunks", "pending", "plan", "policy",
        "mgr_requests", "chunk_transfers", "forwards", "stored_bytes",
        "remote_data", "loopback_data", "remote_ctrl", "loopback_ctrl",
        "done_cb",
    )

    def __init__(self, kind, task_id, client_id, file, offset, size, host, line,
                 policy, done_cb):
        self.kind = kind
        self.task_id = task_id
        self.client_id = client_id
        self.file = file
        self.offset = offset
        self.size = size
        self.host = host
        self.start = 0
        self.end = 0
        self.line = line
        self.nchunks = 0
        self.pending = 0
        self.plan = None
        self.policy = policy
        self.mgr_requests = 0
        self.chunk_transfers = 0
        self.forwards = 0
        self.stored_bytes = 0
        self.remote_data = 0
        self.loopback_data = 0
        self.remote_ctrl = 0
        self.loopback_ctrl = 0
        self.done_cb = done_cb


class FileMeta:
    """Manager-side record of one file: committed size and chunk map."""

    __slots__ = ("name", "committed_size", "chunks")

    def __init__(self, name: str):
        self.name = name
        self.committed_size = 0
        self.chunks: list[tuple[tuple[int, ...], int]] = []  # (replica hosts, payload bytes)


class Policy:
    """Effective per-file data-distribution policy after overrides."""

    __slots__ = ("placement", "target", "stripe", "replication")

    def __init__(self, placement: str, target: int | None, stripe: int, replication: int):
        self.placement = placement
        self.target = target
        self.stripe = stripe
        self.replication = replication


class ManagerState:
    """Files, per-host usage, and the round-robin allocation cursor."""

    def __init__(self, config: StorageConfig):
        self.config = config
        self.files: dict[str, FileMeta] = {}
        self.usage: dict[int, int] = {h: 0 for h in config.storage_hosts}
        self.cursor = 0

    def meta(self, name: str) -> FileMeta | None:
        return self.files.get(name)

    def _candidates(self, subset: list[int], pos: int) -> list[int]:
        """Replica candidate ring for a primary at subset index pos.

        The stripe subset is walked first (cyclically from the primary),
        then the remaining storage nodes in cluster cycle order, so small
        stripes can still satisfy higher replication levels.
        """
        ring = [subset[(pos + k) % len(subset)] for k in range(len(subset))]
        in_subset = set(subset)
        all_nodes = self.config.storage_hosts
        start = all_nodes.index(subset[-1])
        n = len(all_nodes)
        for k in range(1, n + 1):
            node = all_nodes[(start + k) % n]
            if node not in in_subset:
                ring.append(node)
        return ring

    def allocate(self, name: str, offset: int, nbytes: int, policy: Policy,
                 client_host: int | None, line: int) -> list[tuple[tuple[int, ...], int]]:
        """Plan chunk placements for a write; commits happen separately.

        Writes are appends: offset must equal the committed size and the
        committed size must be chunk-aligned (each op starts fresh
        chunks).
        """
        cfg = self.config
        meta = self.files.get(name)
        committed = meta.committed_size if meta else 0
        if offset != committed:
            raise WorkloadError(
                f"line {line}: write to {name!r} at offset {offset} "
                f"but committed size is {committed} (writes must append)"
            )
        if committed % cfg.chunk_size:
            raise WorkloadError(
                f"line {line}: append to {name!r} whose size {committed} "
                f"is not chunk-aligned"
            )
        repl = policy.replication
        if repl > cfg.n_storage_nodes:
            raise ConfigError(
                f"file {name!r}: replication {repl} exceeds {cfg.n_storage_nodes} storage nodes"
            )
        nchunks = -(-nbytes // cfg.chunk_size) if nbytes else 0
        if nchunks == 0:
            return []
        nodes = cfg.storage_hosts
        n = len(nodes)
        if policy.placement == "round_robin":
            stripe = min(policy.stripe, n)
            subset = [nodes[(self.cursor + k) % n] for k in range(stripe)]
            self.cursor = (self.cursor + stripe) % n
        elif policy.placement == "local":
            if client_host is None or client_host not in self.usage:
                raise ConfigError(
                    f"file {name!r}: local placement needs a writing client on a "
                    f"storage host (got host {client_host})"
                )
            subset = [client_host]
        elif policy.placement == "co_locate":
            if policy.target is None or policy.target not in self.usage:
                raise ConfigError(
                    f"file {name!r}: co_locate target {policy.target} is not a storage host"
                )
            subset = [policy.target]
        else:
            raise ConfigError(f"file {name!r}: unknown placement {policy.placement!r}")
        plan = []
        rest = nbytes
        for i in range(nchunks):
            pos = i % len(subset)
            ring = self._candidates(subset, pos)
            replicas = tuple(ring[:repl])
            payload = min(cfg.chunk_size, rest)
            rest -= payload
            plan.append((replicas, payload))
        return plan

    def commit(self, name: str, plan: list[tuple[tuple[int, ...], int]], nbytes: int) -> None:
        meta = self.files.get(name)
        if meta is None:
            meta = self.files[name] = FileMeta(name)
        meta.chunks.extend(plan)
        meta.committed_size += nbytes

    def covered(self, name: str, offset: int, size: int, line: int):
        """Committed chunk entries covering [offset, offset+size)."""
        meta = self.files.get(name)
        if meta is None:
            raise WorkloadError(f"line {line}: read of unknown or unwritten file {name!r}")
        if size == 0:
            return []
        if offset < 0 or offset + size > meta.committed_size:
            raise WorkloadError(
                f"line {line}: read [{offset}, {offset + size}) of {name!r} "
                f"outside committed size {meta.committed_size}"
            )
        cs = self.config.chunk_size
        first = offset // cs
        last = (offset + size - 1) // cs
        return [(ci, *meta.chunks[ci]) for ci in range(first, last + 1)]


class Cluster:
    """All simulated services of one run, wired to one Simulator."""

    def __init__(self, sim: Simulator, profile: PlatformProfile, config: StorageConfig,
                 stats: RunStats, rng):
        self.sim = sim
        self.profile = profile
        self.config = config
        self.stats = stats
        self.rng = rng
        self.state = ManagerState(config)

        self.nets: dict[int, HostNet] = {}
        core = None
        if profile.core_mu is not None:
            cn = Fraction(profile.core_mu)
            core = Service(
                sim, "net-core",
                lambda fr, n=cn.numerator, d=cn.denominator: ceil_mul(fr.nbytes, n, d),
                self._core_done,
            )
        self.core = core
        for h in range(config.n_hosts):
            self.nets[h] = HostNet(
                h, sim, self.nets, stats,
                profile.host_value(h, "mu_net_remote"),
                profile.host_value(h, "mu_net_loopback"),
                profile.frame_size, profile.control_message_size,
                profile.core_latency, core,
            )

        mgr_ns = ceil_frac(profile.mu_manager)
        self.manager = Service(sim, "manager", lambda req: mgr_ns, self._manager_done)

        self.storage: dict[int, Service] = {}
        for h in config.storage_hosts:
            mu = Fraction(profile.host_value(h, "mu_storage"))
            self.storage[h] = Service(
                sim, f"storage@{h}",
                lambda req, n=mu.numerator, d=mu.denominator: ceil_mul(req.svc_bytes, n, d),
                self._storage_done,
            )

        cli_ns = ceil_frac(profile.mu_client)
        self.clients: dict[int, Service] = {}
        for h in config.client_hosts:
            self.clients[h] = Service(sim, f"client@{h}", lambda item: cli_ns, self._client_done)

    # -- plumbing ---------------------------------------------------------

    def _core_done(self, frame, sim) -> None:
        self.nets[frame.req.src].core_done(frame, sim)

    def _send(self, src: int, dst: int, kind: int, payload: int, msg, op,
              deliver, svc_bytes: int = 0) -> None:
        req = NetRequest(
            src, dst, kind, payload,
            wire_size(payload, self.profile.control_message_size),
            deliver, msg, op, svc_bytes,
        )
        self.nets[src].send(req)

    def _to_manager(self, octx: OpCtx, msg) -> None:
        octx.mgr_requests += 1
        self.stats.manager_requests += 1
        self._send(octx.host, self.config.manager_host, CONTROL, 0, msg, octx, self.manager)

    # -- entry point ------------------------------------------------------

    def submit_op(self, octx: OpCtx) -> None:
        """Issue a read or write op on its host's client service."""
        self.clients[octx.host].submit(("op", octx))

    def replica_select(self, replicas: tuple[int, ...], reader_host: int) -> int:
        """Collocated replica when one exists, else a seeded uniform pick."""
        if reader_host in replicas:
            return reader_host
        if len(replicas) == 1:
            return replicas[0]
        return replicas[self.rng.randrange(len(replicas))]

    def prepopulate(self, name: str, nbytes: int, policy: Policy) -> None:
        """Install a workload input file with no simulated traffic."""
        plan = self.state.allocate(name, 0, nbytes, policy, None, 0)
        self.state.commit(name, plan, nbytes)
        cs = self.config.chunk_size
        for replicas, _payload in plan:
            for h in replicas:
                self.state.usage[h] += cs
                self.stats.storage_bytes += cs
        if self.stats.storage_bytes > self.stats.storage_peak:
            self.stats.storage_peak = self.stats.storage_bytes

    # -- client service ---------------------------------------------------

    def _client_done(self, item, sim) -> None:
        if type(item) is tuple:  # driver-issued op start
            octx = item[1]
            if octx.kind == "write":
                self._to_manager(octx, ("alloc", octx))
            else:
                self._to_manager(octx, ("map", octx))
            return
        msg = item.msg
        tag = msg[0]
        octx = msg[1]
        if tag == "wack":
            octx.pending -= 1
            if octx.pending == 0:
                self._to_manager(octx, ("commit", octx))
        elif tag == "rchunk":
            octx.pending -= 1
            if octx.pending == 0:
                self._finish_op(octx, sim)
        elif tag == "alloc_ok":
            plan = octx.plan
            if not plan:
                self._to_manager(octx, ("commit", octx))
                return
            octx.pending = len(plan)
            stats = self.stats
            for ci, (replicas, payload) in enumerate(plan):
                octx.chunk_transfers += 1
                stats.chunk_transfers += 1
                self._send(
                    octx.host, replicas[0], CHUNK_DATA, payload,
                    ("store", octx, ci, replicas, 0), octx,
                    self.storage[replicas[0]], payload,
                )
        elif tag == "map_ok":
            covered = msg[2]
            if not covered:
                self._finish_op(octx, sim)
                return
            octx.pending = len(covered)
            stats = self.stats
            for ci, replicas, payload in covered:
                node = self.replica_select(replicas, octx.host)
                octx.chunk_transfers += 1
                stats.chunk_transfers += 1
                self._send(
                    octx.host, node, CONTROL, 0,
                    ("fetch", octx, ci, payload), octx,
                    self.storage[node], payload,
                )
        elif tag == "commit_ok":
            self._finish_op(octx, sim)
        else:
            raise WorkloadError(f"client received unknown message {tag!r}")

    def _finish_op(self, octx: OpCtx, sim) -> None:
        octx.end = sim.now
        octx.done_cb(octx)

    # -- manager service --------------------------------------------------

    def _manager_done(self, req: NetRequest, sim) -> None:
        msg = req.msg
        tag = msg[0]
        octx: OpCtx = msg[1]
        client = self.clients[octx.host]
        if tag == "alloc":
            octx.plan = self.state.allocate(
                octx.file, octx.offset, octx.size, octx.policy, octx.host, octx.line
            )
            octx.nchunks = len(octx.plan)
            self._send(req.dst, octx.host, CONTROL, 0, ("alloc_ok", octx), octx, client)
        elif tag == "commit":
            self.state.commit(octx.file, octx.plan, octx.size)
            self._send(req.dst, octx.host, CONTROL, 0, ("commit_ok", octx), octx, client)
        elif tag == "map":
            covered = self.state.covered(octx.file, octx.offset, octx.size, octx.line)
            octx.nchunks = len(covered)
            self._send(req.dst, octx.host, CONTROL, 0, ("map_ok", octx, covered), octx, client)
        else:
            raise WorkloadError(f"manager received unknown message {tag!r}")

    # -- storage service --------------------------------------------------

    def _storage_done(self, req: NetRequest, sim) -> None:
        msg = req.msg
        tag = msg[0]
        octx: OpCtx = msg[1]
        here = req.dst
        if tag == "store":
            _, _, ci, replicas, idx = msg
            cs = self.config.chunk_size
            self.state.usage[here] += cs
            octx.stored_bytes += cs
            st = self.stats
            st.storage_bytes += cs
            if st.storage_bytes > st.storage_peak:
                st.storage_peak = st.storage_bytes
            if idx + 1 < len(replicas):
                # Synchronous replica chain: forward before acknowledging.
                nxt = replicas[idx + 1]
                octx.forwards += 1
                st.replica_forwards += 1
                self._send(
                    here, nxt, CHUNK_DATA, req.payload_bytes,
                    ("store", octx, ci, replicas, idx + 1), octx,
                    self.storage[nxt], req.payload_bytes,
                )
            else:
                self._send(here, octx.host, CONTROL, 0, ("wack", octx), octx,
                           self.clients[octx.host])
        elif tag == "fetch":
            payload = msg[3]
            self._send(here, octx.host, CHUNK_DATA, payload, ("rchunk", octx), octx,
                       self.clients[octx.host])
        else:
            raise WorkloadError(f"storage received unknown message {tag!r}")
