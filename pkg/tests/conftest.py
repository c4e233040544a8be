"""Shared fixtures: canonical profiles and cluster layouts used across tests."""

from fractions import Fraction

import pytest

from storesim import PlatformProfile, StorageConfig

# 1 Gbps remote NIC (8 ns/byte), 10 Gbps loopback, 3 ns/byte storage,
# 200 us manager requests, zero-cost client.  Matches the calibration
# example numbers so closed forms stay easy to check by hand.
MU_REMOTE = Fraction(8)
MU_LOOPBACK = Fraction(4, 5)
MU_STORAGE = Fraction(3)
MU_MANAGER = Fraction(200_000)


def make_profile(**kw):
    base = dict(
        mu_net_remote=MU_REMOTE,
        mu_net_loopback=MU_LOOPBACK,
        mu_storage=MU_STORAGE,
        mu_manager=MU_MANAGER,
        mu_client=Fraction(0),
    )
    base.update(kw)
    return PlatformProfile(**base)


@pytest.fixture
def profile():
    return make_profile()


def tiny_config(**kw):
    """One client, one storage node, one manager host, no collocation."""
    base = dict(
        n_hosts=3, n_storage_nodes=1, n_clients=1, collocated=False,
        chunk_size=1_000_000, stripe_width=1, replication_level=1,
    )
    base.update(kw)
    return StorageConfig(**base)


def bench_config(**kw):
    """The 20-host collocated testbed shape: manager + 19 storage/client hosts."""
    base = dict(
        n_hosts=20, n_storage_nodes=19, n_clients=19, collocated=True,
        chunk_size=1_000_000, stripe_width=19, replication_level=1,
    )
    base.update(kw)
    return StorageConfig(**base)


# Headline numbers the end-to-end tests want echoed into the terminal
# summary (event counts, memory, makespans); pytest swallows stdout of
# passing tests, so they go through this hook instead.
ACCEPTANCE_METRICS: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_METRICS:
        terminalreporter.section("run metrics")
        for key, value in ACCEPTANCE_METRICS.items():
            terminalreporter.write_line(f"{key}: {value}")
