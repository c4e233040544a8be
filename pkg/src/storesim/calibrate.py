"""Turn benchmark measurements into a simulation profile.

The measurement file carries link throughputs plus two duration sample
sets from the real system: single-chunk full writes and zero-size
writes.  Derivation follows the decomposition

    T_storage = T_total - T_network - T_manager

with the whole zero-size cost attributed to the manager path and the
client service time pinned at zero.  Per-byte link costs come straight
from throughput (8e9 / bits-per-second, kept as exact rationals).

The manager's per-request time is then solved from the model's own
closed form for a contention-free single-chunk write, so that a profile
fed back into the simulator reproduces the measured mean full-op time
exactly (closure).  The residual control-message and latency terms the
model charges explicitly are subtracted out here; a measurement set the
model cannot explain (negative derived rates) raises CalibrationError.

Also here: the t-distribution confidence-interval check used to decide
whether a sample set is statistically sufficient (95% confidence within
+/-5% of the mean by default).  The t quantile is computed with the
regularized incomplete beta continued fraction and bisection, accurate
to well under 1e-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CalibrationError, InputError
from .profiles import PlatformProfile, parse_int, parse_kv_text

NS_PER_SEC = 10**9


@dataclass
class MeasurementSet:
    remote_throughput_bps: int
    loopback_throughput_bps: int
    chunk_size_bytes: int
    full_op_ns: list[int]
    zero_size_ns: list[int]

    def __post_init__(self):
        if self.remote_throughput_bps <= 0 or self.loopback_throughput_bps <= 0:
            raise InputError("measurements: throughputs must be positive")
        if self.chunk_size_bytes <= 0:
            raise InputError("measurements: chunk_size_bytes must be positive")
        if not self.full_op_ns or not self.zero_size_ns:
            raise InputError("measurements: sample lists must be non-empty")


def _parse_ns_list(value: str, what: str) -> list[int]:
    out = []
    for part in value.split(","):
        part = part.strip()
        if part:
            out.append(parse_int(part, what))
    return out


def parse_measurements(text: str) -> MeasurementSet:
    kv = parse_kv_text(text, "measurements")
    fields = {
        "remote_throughput_bps": parse_int,
        "loopback_throughput_bps": parse_int,
        "chunk_size_bytes": parse_int,
        "full_op_ns": _parse_ns_list,
        "zero_size_ns": _parse_ns_list,
    }
    kwargs: dict = {}
    for key, value in kv.items():
        if key not in fields:
            raise InputError(f"measurements: unknown key {key!r}")
        kwargs[key] = fields[key](value, f"measurements key {key}")
    missing = fields.keys() - kwargs.keys()
    if missing:
        raise InputError(f"measurements: missing keys: {', '.join(sorted(missing))}")
    return MeasurementSet(**kwargs)


def format_measurements(m: MeasurementSet) -> str:
    return (
        f"remote_throughput_bps = {m.remote_throughput_bps}\n"
        f"loopback_throughput_bps = {m.loopback_throughput_bps}\n"
        f"chunk_size_bytes = {m.chunk_size_bytes}\n"
        f"full_op_ns = {','.join(str(v) for v in m.full_op_ns)}\n"
        f"zero_size_ns = {','.join(str(v) for v in m.zero_size_ns)}\n"
    )


def net_mu_from_throughput(throughput_bps) -> Fraction:
    """ns per byte for a link moving throughput_bps bits per second."""
    if throughput_bps <= 0:
        raise InputError("throughput must be positive")
    return Fraction(8 * NS_PER_SEC, throughput_bps)


# -- Student-t machinery ------------------------------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for the regularized incomplete beta (Lentz).
    eps = 3e-14
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def _betai(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log(1.0 - x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: int) -> float:
    if df < 1:
        raise InputError("t distribution needs df >= 1")
    if t == 0.0:
        return 0.5
    tail = 0.5 * _betai(df / 2.0, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def t_quantile(p: float, df: int) -> float:
    """Inverse t CDF by bisection; absolute error well below 1e-6."""
    if not 0.0 < p < 1.0:
        raise InputError("quantile probability must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile(1.0 - p, df)
    lo, hi = 0.0, 1.0
    while t_cdf(hi, df) < p:
        hi *= 2.0
        if hi > 1e15:
            raise CalibrationError("t quantile out of range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@dataclass
class CiResult:
    mean: float
    half_width: float
    relative_half_width: float
    sufficient: bool
    n: int


def ci_check(samples, confidence: float = 0.95, target_rel: float = 0.05) -> CiResult:
    """Is the sample mean known to within target_rel at this confidence?

    Uses the t-based interval mean +/- t_(n-1, (1+confidence)/2) * s/sqrt(n).
    Fewer than two samples can never be sufficient.
    """
    samples = list(samples)
    n = len(samples)
    if n < 2:
        mean = float(samples[0]) if samples else 0.0
        return CiResult(mean, math.inf, math.inf, False, n)
    mean = math.fsum(samples) / n
    var = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    s = math.sqrt(var)
    half = t_quantile(0.5 + confidence / 2.0, n - 1) * s / math.sqrt(n)
    if mean != 0.0:
        rel = abs(half / mean)
    else:
        rel = 0.0 if half == 0.0 else math.inf
    return CiResult(mean, half, rel, rel <= target_rel, n)


# -- profile derivation -------------------------------------------------------

def _frame_bytes(wire: int, frame_size: int) -> list[int]:
    full, rem = divmod(wire, frame_size)
    sizes = [frame_size] * full
    if rem or not sizes:
        sizes.append(rem)
    return sizes


def _ceil(x: Fraction) -> int:
    return -(-x.numerator // x.denominator)


def derive_profile(m: MeasurementSet, frame_size: int = 65536,
                   control_message_size: int = 1024,
                   core_latency: int = 0) -> PlatformProfile:
    """Decompose measured write times into per-service rates.

    mu_storage comes from the direct subtraction formula; mu_manager is
    then solved from the simulator's contention-free single-chunk write
    closed form so the round trip measurement -> profile -> simulated
    microbenchmark lands back on mean(full_op_ns) (exactly, when the
    solved rates hit whole nanoseconds; the clock quantizes otherwise).
    """
    mu_remote = net_mu_from_throughput(m.remote_throughput_bps)
    mu_loopback = net_mu_from_throughput(m.loopback_throughput_bps)
    chunk = m.chunk_size_bytes
    mean_full = Fraction(sum(m.full_op_ns), len(m.full_op_ns))
    mean_zero = Fraction(sum(m.zero_size_ns), len(m.zero_size_ns))

    t_net = chunk * mu_remote
    t_storage = mean_full - t_net - mean_zero
    if t_storage <= 0:
        raise CalibrationError(
            f"measurements inconsistent: mean full op {float(mean_full):.0f} ns "
            f"<= network {float(t_net):.0f} ns + zero-size {float(mean_zero):.0f} ns; "
            "derived storage rate would be <= 0"
        )
    mu_storage = t_storage / chunk

    # Control and data path costs the model will charge explicitly for
    # the calibration write (one chunk, replication 1, remote links):
    # 5 control messages at 2 frame services each, the chunk's frames
    # through sender and receiver queues (sum + trailing frame), one
    # core latency per message or transfer, and 2 manager visits.
    wire = max(chunk, control_message_size)
    frames = _frame_bytes(wire, frame_size)
    svc = [_ceil(b * mu_remote) for b in frames]
    ctrl_svc = _ceil(control_message_size * mu_remote)
    rounding_slack = sum(svc) - chunk * mu_remote
    mu_manager = (mean_zero - 10 * ctrl_svc - 6 * core_latency
                  - max(svc) - rounding_slack) / 2
    if mu_manager < 0:
        raise CalibrationError(
            f"measurements inconsistent: zero-size mean {float(mean_zero):.0f} ns "
            "is smaller than the control-path cost the model already charges "
            f"({10 * ctrl_svc + 6 * core_latency + max(svc)} ns plus rounding); "
            "derived manager rate would be negative"
        )
    return PlatformProfile(
        mu_net_remote=mu_remote,
        mu_net_loopback=mu_loopback,
        mu_storage=mu_storage,
        mu_manager=mu_manager,
        mu_client=Fraction(0),
        core_latency=core_latency,
        frame_size=frame_size,
        control_message_size=control_message_size,
    )
