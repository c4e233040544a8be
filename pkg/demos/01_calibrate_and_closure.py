"""
Deriving a platform profile from testbed measurements
=====================================================

The model needs four service rates: network ns/byte (remote and
loopback), storage ns/byte, and manager ns/request.  Two of them fall
out of advertised link speeds; the other two come from timing one
1 MB write and one zero-size write against the real deployment.

This script walks the derivation on the bundled synthetic measurement
set, then replays the same microbenchmark inside the simulator to show
the loop closes: the derived profile predicts the measured mean back.
"""

from pathlib import Path

from storesim import (
    StorageConfig,
    ci_check,
    derive_profile,
    format_profile,
    parse_measurements,
    simulate,
)

HERE = Path(__file__).resolve().parent
meas = parse_measurements((HERE.parent / "data" / "testbed_1gbps.meas").read_text())

# Before trusting the sample means, check the 95% confidence interval
# is tight enough (5% relative half-width by default).
for name, samples in (("full 1 MB op", meas.full_op_ns),
                      ("zero-size op", meas.zero_size_ns)):
    ci = ci_check(samples)
    verdict = "ok" if ci.sufficient else "COLLECT MORE SAMPLES"
    print(f"{name}: n={ci.n} mean={ci.mean:,.0f} ns "
          f"half-width={ci.half_width:,.0f} ns ({ci.relative_half_width:.2%}) {verdict}")

profile = derive_profile(meas)
print()
print(format_profile(profile))

# Closure: run the calibration workload (single 1 MB write, one client,
# one storage node, nothing collocated) under the derived profile.
config = StorageConfig(n_hosts=3, n_storage_nodes=1, n_clients=1,
                       collocated=False, chunk_size=meas.chunk_size_bytes,
                       stripe_width=1, replication_level=1)
workload = f"""\
[files]
name=probe size={meas.chunk_size_bytes}

[tasks]
task=bench
0,0,open,probe,0,0
0,0,write,probe,0,{meas.chunk_size_bytes}
0,0,close,probe,0,0
"""
rep = simulate(profile, config, workload, label="calibration")
mean_full = sum(meas.full_op_ns) // len(meas.full_op_ns)
print(f"measured mean : {mean_full:,} ns")
print(f"simulated     : {rep.makespan_ns:,} ns")
assert rep.makespan_ns == mean_full, "calibration loop failed to close"
print("round trip closes exactly")
