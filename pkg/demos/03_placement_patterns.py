"""
Workflow-aware placement vs the default configuration
=====================================================

Two classic workflow shapes, each simulated twice on the same 20-host
deployment: once with default round-robin placement and pinned tasks
(every intermediate byte crosses the network twice), once with
pattern-aware overrides.

* pipeline 19 wide x 3 stages: stage outputs placed 'local' so the
  locality-aware scheduler runs each consumer where its input lives
* reduce 19 -> 1: the 19 partial results 'co_locate' on the node that
  will run the gather task

The point is the ordering and the byte counts, not any one number.
"""

from storesim import (
    PatternSpec,
    PlatformProfile,
    StorageConfig,
    compare,
    format_ranking,
    gen_pipeline,
    gen_reduce,
    simulate,
)

profile = PlatformProfile(mu_net_remote=8, mu_net_loopback="4/5",
                          mu_storage=3, mu_manager=200_000, mu_client=0)
config = StorageConfig(n_hosts=20, n_storage_nodes=19, n_clients=19,
                       collocated=True, chunk_size=1_000_000,
                       stripe_width=19, replication_level=1)


def run(label, text):
    rep = simulate(profile, config, text, label=label)
    print(f"{label:14s} makespan {rep.makespan_ns / 1e9:7.3f} s   "
          f"remote data {rep.remote_data_bytes / 1e6:8.1f} MB   "
          f"loopback data {rep.loopback_data_bytes / 1e6:8.1f} MB")
    return rep


print("pipeline, 19 branches x 3 stages, 100 MB per hop")
pipe_dss = run("pipe_default", gen_pipeline(PatternSpec(pattern="pipeline", width=19, stages=3)))
pipe_wass = run("pipe_local", gen_pipeline(PatternSpec(pattern="pipeline", width=19,
                                                  stages=3, mode="wass")))
assert pipe_wass.makespan_ns < pipe_dss.makespan_ns

print()
print("reduce, 19 producers -> 1 consumer, 2 MB partials")
red_dss = run("reduce_default", gen_reduce(PatternSpec(pattern="reduce", width=19)))
red_wass = run("reduce_colocate", gen_reduce(PatternSpec(pattern="reduce", width=19,
                                                   mode="wass")))

# the gather stage reads every partial from its own disk
gather_reads = [r for r in red_wass.records if r.kind == "read" and r.level == 1]
assert sum(r.remote_data for r in gather_reads) == 0
print("co_locate gather stage reads 0 remote bytes")

print()
print(format_ranking(compare([pipe_dss, pipe_wass, red_dss, red_wass])), end="")
