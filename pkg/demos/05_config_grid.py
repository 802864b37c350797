"""
Picking the greenest configuration
==================================

Two configurations trade blows: a frugal one that sips power but writes
middling answers, and a hungry one that writes better answers. Which is
greener depends on the quality bar, so we sweep it and render the grid.
"""

import pathlib

from fuel import (DeviceSpec, FunctionalUnitSpec, PlatformSpec, build_grid,
                  build_report, emit_grid, simulate_run)
from fuel.simulate import SimProfile

out_dir = pathlib.Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

frugal = SimProfile(
    config_label="frugal", prefill_s=0.3, decode_s_per_token=0.05,
    concurrency=8, tokens_mean=30.0, tokens_min=1, tokens_max=100,
    qscore_mean=7.0, qscore_std=3.0, idle_power_w=80.0, busy_power_w=250.0,
)
hungry = SimProfile(
    config_label="hungry", prefill_s=0.3, decode_s_per_token=0.05,
    concurrency=8, tokens_mean=30.0, tokens_min=1, tokens_max=100,
    qscore_mean=14.0, qscore_std=3.0, idle_power_w=80.0, busy_power_w=600.0,
)
platform = PlatformSpec(
    platform_id="one-gpu", lifetime_s=157_680_000.0,
    devices=(DeviceSpec(device_id="gpu0", kind="gpu",
                        embodied_mode="direct", total_g=29920.0),),
)

alphas = [-5.0, 0.0, 5.0, 10.0, 15.0]
reports = []
for seed, profile in ((20, frugal), (21, hungry)):
    for qps in (1.0, 2.0):
        trace, _ = simulate_run(profile, qps=qps, duration=120.0, seed=seed)
        for alpha in alphas:
            spec = FunctionalUnitSpec(qps=qps, alpha=alpha, beta=1.0, gamma=0.2)
            reports.append(build_report(trace, platform, ci=518.0, spec=spec))

grid = build_grid(reports, alphas, beta=1.0, gamma=0.2)
for cell in (grid.cell(1.0, a) for a in alphas):
    savings = "" if cell.savings_pct is None else f"  saves {cell.savings_pct:.0f}%"
    print(f"qps=1 alpha={cell.alpha:5.1f}  greenest={cell.greenest}{savings}")

for fmt in ("csv", "svg"):
    path = out_dir / f"grid.{fmt}"
    path.write_text(emit_grid(grid, fmt))
    print("wrote", path)
