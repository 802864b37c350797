"""
Load saturation and the carbon elbow
====================================

Pushes one configuration from light load to overload. Attainment collapses
once the queue saturates; CFU falls with throughput at first, then climbs
as late tokens stop qualifying. The sweet spot is just before the knee.
"""

import csv
import pathlib

from fuel import DeviceSpec, FunctionalUnitSpec, PlatformSpec, build_report, simulate_run
from fuel.simulate import SimProfile

out_dir = pathlib.Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

profile = SimProfile(
    config_label="sweep", prefill_s=0.5, decode_s_per_token=0.05,
    concurrency=4, tokens_mean=8.0, tokens_min=8, tokens_max=8,
    qscore_mean=10.0, qscore_std=3.0, idle_power_w=80.0, busy_power_w=350.0,
)
platform = PlatformSpec(
    platform_id="one-gpu", lifetime_s=157_680_000.0,
    devices=(DeviceSpec(device_id="gpu0", kind="gpu",
                        embodied_mode="direct", total_g=29920.0),),
)

rows = []
for qps in range(1, 21):
    trace, _ = simulate_run(profile, qps=float(qps), duration=60.0, seed=0)
    spec = FunctionalUnitSpec(qps=float(qps), beta=1.0, gamma=0.2)
    report = build_report(trace, platform, ci=518.0, spec=spec)
    rows.append({
        "qps": qps,
        "n_fu": report.n_fu,
        "attainment": round(report.slo_attainment, 4),
        "cfu_g_per_token": (None if report.cfu_g_per_token is None
                            else round(report.cfu_g_per_token, 6)),
    })
    print(f"qps={qps:2d}  attainment={rows[-1]['attainment']:.3f}  "
          f"cfu={rows[-1]['cfu_g_per_token']}")

path = out_dir / "saturation.csv"
with open(path, "w", newline="") as fh:
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
print("wrote", path)
