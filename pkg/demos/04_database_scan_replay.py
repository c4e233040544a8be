"""
Scale check: half a million I/O operations in one process
=========================================================

A sequence-search campaign replayed at trace level: 19 workers each
read a small query set, scan a shared 1.7 GB database in 56 KiB slices,
and write a small result file.  That comes to ~563k I/O operations and
~26M simulator events.

Expect roughly a minute of wall clock.  The run is deterministic, so
the makespan printed here is reproducible to the nanosecond.
"""

import resource
import time

from storesim import PatternSpec, PlatformProfile, StorageConfig, gen_blast, simulate

profile = PlatformProfile(mu_net_remote=8, mu_net_loopback="4/5",
                          mu_storage=3, mu_manager=200_000, mu_client=0)
config = StorageConfig(n_hosts=20, n_storage_nodes=19, n_clients=19,
                       collocated=True, chunk_size=1_000_000,
                       stripe_width=19, replication_level=1)

text = gen_blast(PatternSpec(pattern="blast"))
t0 = time.perf_counter()
rep = simulate(profile, config, text, label="scan")
wall = time.perf_counter() - t0

peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
print(f"trace operations : {rep.ops:,}")
print(f"simulator events : {rep.events:,}")
print(f"simulated time   : {rep.makespan_ns / 1e9:,.1f} s")
print(f"wall clock       : {wall:.1f} s "
      f"({rep.events / wall:,.0f} events/s)")
print(f"peak rss         : {peak_mb:.0f} MiB")
print(f"remote data      : {rep.remote_data_bytes / 1e9:.2f} GB, "
      f"loopback data {rep.loopback_data_bytes / 1e9:.2f} GB")
