"""
Autotuning a write-heavy client by sweeping the config space
============================================================

Chunk placement has three knobs that interact: stripe width (how many
storage nodes share one file), replication level (synchronous copies
per chunk), and chunk size.  Rather than reason about the interaction,
simulate the whole grid and rank the outcomes.

Here: one client writing 100 MB to a 19-node deployment, stripe 1-5
crossed with replication 1-5.  Takes a second or two.
"""

import re

from storesim import PatternSpec, PlatformProfile, StorageConfig, compare, gen_micro, sweep

profile = PlatformProfile(
    mu_net_remote=8,          # 1 Gbps
    mu_net_loopback="4/5",    # 10 Gbps
    mu_storage=3,
    mu_manager=200_000,
    mu_client=0,
)
base = StorageConfig(n_hosts=20, n_storage_nodes=19, n_clients=19,
                     collocated=True, chunk_size=1_000_000,
                     stripe_width=1, replication_level=1)

workload = gen_micro(PatternSpec(pattern="micro_write"))  # 100 MB write
reports, skipped = sweep(profile, base, workload,
                         stripes=[1, 2, 3, 4, 5], repls=[1, 2, 3, 4, 5])
assert not skipped

# grid view: rows = stripe, cols = replication, cell = milliseconds
span = {}
for rep in reports:
    s, r = (int(n) for n in re.findall(r"\d+", rep.label))
    span[s, r] = rep.makespan_ns
print("write time (ms); rows stripe 1-5, cols replication 1-5")
for s in range(1, 6):
    print("  ".join(f"{span[s, r] / 1e6:8.1f}" for r in range(1, 6)))

# ranked view: near-ties (within 2%) share a group
print()
print("top of the ranking:")
for row in compare(reports)[:5]:
    print(f"  #{row.rank} group {row.group} {row.label:22s} "
          f"{row.makespan_ns / 1e6:9.1f} ms  ({row.vs_best:.2f}x best)")

# every extra replica is a synchronous copy on the write path, so at
# fixed stripe the time never goes down with replication
for s in range(1, 6):
    col = [span[s, r] for r in range(1, 6)]
    assert all(a <= b for a, b in zip(col, col[1:]))
print("replication monotonicity holds at every stripe width")
