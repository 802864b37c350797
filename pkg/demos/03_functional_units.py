"""
From tokens to functional units
===============================

Simulates one serving run, then sweeps the quality bar upward and watches
tokens drop out of the functional-unit count while the carbon bill stays
fixed. CFU is that fixed bill divided by an ever-smaller denominator.
"""

import importlib.resources

from fuel import FunctionalUnitSpec, build_report, load_platform, simulate_run
from fuel.simulate import SimProfile

profile = SimProfile(
    config_label="demo", prefill_s=0.3, decode_s_per_token=0.04,
    concurrency=4, tokens_mean=40.0, tokens_min=1, tokens_max=200,
    qscore_mean=8.0, qscore_std=2.0, idle_power_w=90.0, busy_power_w=420.0,
)
trace, _ = simulate_run(profile, qps=2.0, duration=120.0, seed=7)

resource = importlib.resources.files("fuel") / "platforms" / "h100_server.json"
platform = load_platform(str(resource))

print(f"{'alpha':>6} {'n_fu':>7} {'cfu g/token':>12} {'attainment':>11}")
for alpha in (-1.0, 4.0, 6.0, 8.0, 10.0, 12.0):
    spec = FunctionalUnitSpec(qps=2.0, alpha=alpha, beta=1.0, gamma=0.2)
    report = build_report(trace, platform, ci=518.0, spec=spec)
    cfu = "undefined" if report.cfu_g_per_token is None else f"{report.cfu_g_per_token:.5f}"
    print(f"{alpha:6.1f} {report.n_fu:7d} {cfu:>12} {report.slo_attainment:11.3f}")

report = build_report(trace, platform, ci=518.0)
print()
print(f"total tokens generated : {report.n_tokens}")
print(f"energy                 : {report.energy.total_kwh:.4f} kWh")
print(f"operational carbon     : {report.carbon.c_op_g:.2f} g")
print(f"amortized embodied     : {report.carbon.c_em_g:.2f} g")
