"""Platform profiles, storage configurations, and their text formats.

Both file formats are plain ``key = value`` lines, ``#`` starts a comment,
and unknown keys are rejected.  Rates are exact rationals serialized as
integers or ``p/q`` so a profile survives a file round trip without losing
the precision the calibration worked out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError, InputError

DEFAULT_FRAME_SIZE = 65536
DEFAULT_CONTROL_SIZE = 1024

PLACEMENTS = ("round_robin", "local", "co_locate")


def parse_kv_text(text: str, what: str) -> dict[str, str]:
    """Parse key = value lines; later duplicates are rejected."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{what}: line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise InputError(f"{what}: line {lineno}: empty key or value")
        if key in out:
            raise InputError(f"{what}: line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def parse_fraction(value: str, what: str) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: not a rational number: {value!r}") from exc


def parse_int(value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise InputError(f"{what}: not an integer: {value!r}") from exc


def parse_bool(value: str, what: str) -> bool:
    v = value.lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise InputError(f"{what}: not a boolean: {value!r}")


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class PlatformProfile:
    """Calibrated service rates of one deployment.

    Rates are ns/byte for network and storage, ns/request for manager and
    client.  host_overrides maps a host id to replacement values for any
    of mu_storage, mu_net_remote, mu_net_loopback so heterogeneous nodes
    (a faster disk, a better NIC) can be expressed.
    """

    mu_net_remote: Fraction
    mu_net_loopback: Fraction
    mu_storage: Fraction
    mu_manager: Fraction
    mu_client: Fraction = Fraction(0)
    core_latency: int = 0
    core_mu: Fraction | None = None
    frame_size: int = DEFAULT_FRAME_SIZE
    control_message_size: int = DEFAULT_CONTROL_SIZE
    host_overrides: dict[int, dict[str, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("mu_net_remote", "mu_net_loopback", "mu_storage", "mu_manager", "mu_client"):
            value = Fraction(getattr(self, name))
            setattr(self, name, value)
            if value < 0:
                raise ConfigError(f"profile: {name} must be >= 0")
        if self.frame_size <= 0:
            raise ConfigError("profile: frame_size must be positive")
        if self.control_message_size < 0:
            raise ConfigError("profile: control_message_size must be >= 0")
        if self.core_latency < 0:
            raise ConfigError("profile: core_latency must be >= 0")

    def host_value(self, host: int, name: str) -> Fraction:
        over = self.host_overrides.get(host)
        if over and name in over:
            return over[name]
        return getattr(self, name)


_PROFILE_SCALARS = {
    "mu_net_remote": parse_fraction,
    "mu_net_loopback": parse_fraction,
    "mu_storage": parse_fraction,
    "mu_manager": parse_fraction,
    "mu_client": parse_fraction,
    "core_latency": parse_int,
    "core_mu": parse_fraction,
    "frame_size": parse_int,
    "control_message_size": parse_int,
}

_OVERRIDABLE = ("mu_storage", "mu_net_remote", "mu_net_loopback")


def parse_profile(text: str) -> PlatformProfile:
    kv = parse_kv_text(text, "profile")
    kwargs: dict = {}
    overrides: dict[int, dict[str, Fraction]] = {}
    for key, value in kv.items():
        if key in _PROFILE_SCALARS:
            kwargs[key] = _PROFILE_SCALARS[key](value, f"profile key {key}")
            continue
        parts = key.split(".")
        # host.<id>.<field> overrides one host's rate
        if len(parts) == 3 and parts[0] == "host" and parts[2] in _OVERRIDABLE:
            host = parse_int(parts[1], f"profile key {key}")
            overrides.setdefault(host, {})[parts[2]] = parse_fraction(value, f"profile key {key}")
            continue
        raise InputError(f"profile: unknown key {key!r}")
    missing = {"mu_net_remote", "mu_net_loopback", "mu_storage", "mu_manager"} - kwargs.keys()
    if missing:
        raise InputError(f"profile: missing keys: {', '.join(sorted(missing))}")
    if overrides:
        kwargs["host_overrides"] = overrides
    return PlatformProfile(**kwargs)


def format_profile(p: PlatformProfile) -> str:
    lines = [
        "# storesim platform profile (rates: ns/byte, times: ns)",
        f"mu_net_remote = {format_fraction(p.mu_net_remote)}",
        f"mu_net_loopback = {format_fraction(p.mu_net_loopback)}",
        f"mu_storage = {format_fraction(p.mu_storage)}",
        f"mu_manager = {format_fraction(p.mu_manager)}",
        f"mu_client = {format_fraction(p.mu_client)}",
        f"core_latency = {p.core_latency}",
        f"frame_size = {p.frame_size}",
        f"control_message_size = {p.control_message_size}",
    ]
    if p.core_mu is not None:
        lines.append(f"core_mu = {format_fraction(p.core_mu)}")
    for host in sorted(p.host_overrides):
        for name in _OVERRIDABLE:
            if name in p.host_overrides[host]:
                lines.append(f"host.{host}.{name} = {format_fraction(p.host_overrides[host][name])}")
    return "\n".join(lines) + "\n"


@dataclass
class StorageConfig:
    """Deployment shape and data-distribution policy under test."""

    n_hosts: int
    n_storage_nodes: int
    n_clients: int
    collocated: bool
    chunk_size: int
    stripe_width: int
    replication_level: int
    placement: str = "round_robin"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.chunk_size <= 0:
            raise ConfigError("config: chunk_size must be positive")
        if self.n_storage_nodes < 1:
            raise ConfigError("config: need at least one storage node")
        if self.n_clients < 1:
            raise ConfigError("config: need at least one client")
        if self.stripe_width < 1 or self.stripe_width > self.n_storage_nodes:
            raise ConfigError(
                f"config: stripe_width {self.stripe_width} not in 1..{self.n_storage_nodes}"
            )
        if self.replication_level < 1 or self.replication_level > self.n_storage_nodes:
            raise ConfigError(
                f"config: replication_level {self.replication_level} "
                f"not in 1..{self.n_storage_nodes}"
            )
        base = self.placement.split(":", 1)[0]
        if base not in PLACEMENTS:
            raise ConfigError(f"config: unknown placement {self.placement!r}")
        # Host 0 runs the manager; storage nodes occupy hosts 1..n_storage.
        need = 1 + self.n_storage_nodes
        if self.collocated:
            if self.n_clients > self.n_storage_nodes:
                raise ConfigError("config: collocated deployment needs n_clients <= n_storage_nodes")
        else:
            need += self.n_clients
        if self.n_hosts < need:
            raise ConfigError(f"config: n_hosts {self.n_hosts} < required {need}")

    # Deterministic host layout used by the whole package.
    @property
    def manager_host(self) -> int:
        return 0

    @property
    def storage_hosts(self) -> list[int]:
        return list(range(1, 1 + self.n_storage_nodes))

    @property
    def client_hosts(self) -> list[int]:
        if self.collocated:
            return list(range(1, 1 + self.n_clients))
        start = 1 + self.n_storage_nodes
        return list(range(start, start + self.n_clients))


_CONFIG_FIELDS = {
    "n_hosts": parse_int,
    "n_storage_nodes": parse_int,
    "n_clients": parse_int,
    "collocated": parse_bool,
    "chunk_size": parse_int,
    "stripe_width": parse_int,
    "replication_level": parse_int,
    "placement": lambda v, _w: v,
}


def parse_config(text: str) -> StorageConfig:
    kv = parse_kv_text(text, "config")
    kwargs: dict = {}
    for key, value in kv.items():
        if key not in _CONFIG_FIELDS:
            raise InputError(f"config: unknown key {key!r}")
        kwargs[key] = _CONFIG_FIELDS[key](value, f"config key {key}")
    missing = set(_CONFIG_FIELDS) - {"placement"} - kwargs.keys()
    if missing:
        raise InputError(f"config: missing keys: {', '.join(sorted(missing))}")
    return StorageConfig(**kwargs)


def format_config(c: StorageConfig) -> str:
    return (
        "# storesim storage configuration\n"
        f"n_hosts = {c.n_hosts}\n"
        f"n_storage_nodes = {c.n_storage_nodes}\n"
        f"n_clients = {c.n_clients}\n"
        f"collocated = {'true' if c.collocated else 'false'}\n"
        f"chunk_size = {c.chunk_size}\n"
        f"stripe_width = {c.stripe_width}\n"
        f"replication_level = {c.replication_level}\n"
        f"placement = {c.placement}\n"
    )
