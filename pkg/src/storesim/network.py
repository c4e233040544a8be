"""Frame-level network model.

Every host owns a network component with an out-queue and an in-queue,
both FIFO services.  A request submitted for sending is decomposed into
frames no larger than the configured frame size; the sender's out-queue
services each frame at the link's per-byte rate, the frame then crosses
the core (a fixed per-frame latency, plus an optional shared bandwidth-
capped queue), and the receiver's in-queue services it at the same
per-byte rate.  When the last frame of a request clears the in-queue the
request is assembled and handed to its destination service.

Consequences worth noting:
  - a host's egress is serialized (N concurrent sends take >= N times one
    send), and so is its ingress, which is what makes fan-in traffic to a
    single host a bottleneck;
  - same-host (loopback) traffic runs through the same queues at the
    loopback rate and never touches the shared core;
  - control messages all travel at one configured wire size, so a
    request's bytes on the wire are max(payload, control size).

Per-byte rates are exact rationals; each frame's service time is the
byte product rounded up to whole nanoseconds.
"""

from __future__ import annotations

from fractions import Fraction

# Request kinds
CONTROL = 0
CHUNK_DATA = 1

# Link kinds
REMOTE = 0
LOOPBACK = 1


def ceil_mul(nbytes: int, mu_num: int, mu_den: int) -> int:
    """ceil(nbytes * mu) with mu = mu_num/mu_den ns per byte."""
    return -(-nbytes * mu_num // mu_den)


class NetRequest:
    """A message between two services, carried as one or more frames."""

    __slots__ = (
        "src", "dst", "kind", "payload_bytes", "wire_bytes",
        "remaining", "deliver", "msg", "op", "svc_bytes",
    )

    def __init__(self, src: int, dst: int, kind: int, payload_bytes: int,
                 wire_bytes: int, deliver, msg, op, svc_bytes: int = 0):
        self.src = src
        self.dst = dst
        self.kind = kind
        self.payload_bytes = payload_bytes
        self.wire_bytes = wire_bytes
        self.remaining = 0  # frames still to clear the receiver in-queue
        self.deliver = deliver  # destination Service
        self.msg = msg
        self.op = op
        self.svc_bytes = svc_bytes  # bytes the destination service works on


class Frame:
    __slots__ = ("req", "nbytes", "index")

    def __init__(self, req, nbytes: int, index: int):
        self.req = req
        self.nbytes = nbytes
        self.index = index


def wire_size(payload_bytes: int, control_message_size: int) -> int:
    """Bytes a request occupies on the wire (control floor applies)."""
    return max(payload_bytes, control_message_size)


def decompose(req: NetRequest, frame_size: int) -> list[Frame]:
    """Split a request into frames of at most frame_size bytes.

    The frames partition the request's wire size; a zero-payload control
    request still yields one frame of the control message size.
    """
    total = req.wire_bytes
    if total <= 0:
        return [Frame(req, 0, 0)]
    nfull, rest = divmod(total, frame_size)
    frames = [Frame(req, frame_size, i) for i in range(nfull)]
    if rest:
        frames.append(Frame(req, rest, nfull))
    return frames


def frame_service_time(frame: Frame, link: int, profile) -> int:
    """One queue's service time for a frame plus the per-frame core latency."""
    mu = profile.mu_net_loopback if link == LOOPBACK else profile.mu_net_remote
    frac = Fraction(mu)
    return ceil_mul(frame.nbytes, frac.numerator, frac.denominator) + profile.core_latency


class NetStats:
    """Delivery-side byte and message tally, one per run."""

    __slots__ = (
        "remote_data_bytes", "loopback_data_bytes",
        "remote_ctrl_bytes", "loopback_ctrl_bytes",
        "control_messages", "requests_sent", "requests_delivered",
        "wire_bytes_sent", "wire_bytes_delivered",
    )

    def __init__(self):
        self.remote_data_bytes = 0
        self.loopback_data_bytes = 0
        self.remote_ctrl_bytes = 0
        self.loopback_ctrl_bytes = 0
        self.control_messages = 0
        self.requests_sent = 0
        self.requests_delivered = 0
        self.wire_bytes_sent = 0
        self.wire_bytes_delivered = 0


class HostNet:
    """Per-host network component: out-queue, in-queue, frame assembly."""

    __slots__ = (
        "host", "sim", "nets", "stats", "core", "core_latency",
        "frame_size", "control_size",
        "_mu_rem_n", "_mu_rem_d", "_mu_loop_n", "_mu_loop_d",
        "out", "inq",
    )

    def __init__(self, host: int, sim, nets: dict, stats: NetStats,
                 mu_remote: Fraction, mu_loopback: Fraction,
                 frame_size: int, control_size: int,
                 core_latency: int, core):
        from .engine import Service

        self.host = host
        self.sim = sim
        self.nets = nets  # shared host -> HostNet map
        self.stats = stats
        self.core = core  # optional shared core Service (bandwidth cap)
        self.core_latency = core_latency
        self.frame_size = frame_size
        self.control_size = control_size
        self._mu_rem_n = mu_remote.numerator
        self._mu_rem_d = mu_remote.denominator
        self._mu_loop_n = mu_loopback.numerator
        self._mu_loop_d = mu_loopback.denominator
        self.out = Service(sim, f"net-out@{host}", self._frame_ns_out, self._out_done)
        self.inq = Service(sim, f"net-in@{host}", self._frame_ns_in, self._in_done)

    # Per-byte rate for a frame as seen by this host's queues: the
    # sender's rate on egress, the receiver's on ingress.
    def _frame_ns_out(self, frame: Frame) -> int:
        if frame.req.dst == self.host:
            return ceil_mul(frame.nbytes, self._mu_loop_n, self._mu_loop_d)
        return ceil_mul(frame.nbytes, self._mu_rem_n, self._mu_rem_d)

    def _frame_ns_in(self, frame: Frame) -> int:
        if frame.req.src == self.host:
            return ceil_mul(frame.nbytes, self._mu_loop_n, self._mu_loop_d)
        return ceil_mul(frame.nbytes, self._mu_rem_n, self._mu_rem_d)

    def send(self, req: NetRequest) -> None:
        """Decompose and queue a request on this host's out-queue."""
        frames = decompose(req, self.frame_size)
        req.remaining = len(frames)
        st = self.stats
        st.requests_sent += 1
        st.wire_bytes_sent += req.wire_bytes
        out = self.out
        for fr in frames:
            out.submit(fr)

    def _out_done(self, frame: Frame, sim) -> None:
        req = frame.req
        # Loopback frames skip the shared core queue: same-host traffic
        # never consumes fabric bandwidth.
        if self.core is not None and req.dst != self.host:
            self.core.submit(frame)
        elif self.core_latency:
            sim.at(sim.now + self.core_latency, self._core_arrive, frame)
        else:
            self.nets[req.dst].inq.submit(frame)

    def _core_arrive(self, frame: Frame) -> None:
        self.nets[frame.req.dst].inq.submit(frame)

    def core_done(self, frame: Frame, sim) -> None:
        """Completion hook for the shared core queue."""
        if self.core_latency:
            sim.at(sim.now + self.core_latency, self._core_arrive, frame)
        else:
            self.nets[frame.req.dst].inq.submit(frame)

    def _in_done(self, frame: Frame, sim) -> None:
        req = frame.req
        req.remaining -= 1
        if req.remaining:
            return
        # Last frame assembled: account the transfer and deliver.
        st = self.stats
        st.requests_delivered += 1
        st.wire_bytes_delivered += req.wire_bytes
        remote = req.src != req.dst
        op = req.op
        if req.kind == CHUNK_DATA:
            if remote:
                st.remote_data_bytes += req.wire_bytes
                if op is not None:
                    op.remote_data += req.wire_bytes
            else:
                st.loopback_data_bytes += req.wire_bytes
                if op is not None:
                    op.loopback_data += req.wire_bytes
        else:
            st.control_messages += 1
            if remote:
                st.remote_ctrl_bytes += req.wire_bytes
                if op is not None:
                    op.remote_ctrl += req.wire_bytes
            else:
                st.loopback_ctrl_bytes += req.wire_bytes
                if op is not None:
                    op.loopback_ctrl += req.wire_bytes
        req.deliver.submit(req)
