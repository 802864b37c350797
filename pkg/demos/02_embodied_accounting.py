"""
Embodied carbon, bottom-up and amortized
========================================

Prices the manufacturing footprint of a GPU from fab parameters, compares
it against the shipped server fixtures, and amortizes a server's embodied
total over a one-hour window.
"""

import importlib.resources

from fuel import (DeviceSpec, FabParams, amortized_embodied, device_embodied,
                  dram_carbon, load_platform, manufacturing_carbon, packaging_carbon)

# 7nm-class fab footprint, all-renewable variant would lower ci_fab
fab = FabParams(ci_fab=518.0, epa=1.0, gpa=150.0, mpa=500.0, yield_=0.875)
gpu = DeviceSpec(
    device_id="gpu0", kind="gpu", embodied_mode="act",
    die_area_mm2=814.0, dies_per_package=1, memory_gb=80.0, n_ic=8,
    tdp_w=700.0, fab=fab,
)

print("bottom-up accelerator estimate")
print(f"  die manufacturing : {manufacturing_carbon(gpu):10.1f} g")
print(f"  packaging         : {packaging_carbon(gpu):10.1f} g")
print(f"  on-board memory   : {dram_carbon(gpu):10.1f} g")
print(f"  device total      : {device_embodied(gpu):10.1f} g")
print()

for name in ("h100_server", "l40_server"):
    resource = importlib.resources.files("fuel") / "platforms" / f"{name}.json"
    platform = load_platform(str(resource))
    print(f"{platform.platform_id}")
    for dev in platform.devices:
        print(f"  {dev.device_id:6s} {device_embodied(dev):10.1f} g")
    hour = amortized_embodied(platform, 3600.0)
    print(f"  one hour of its {platform.lifetime_s / 31_536_000:.0f}y life: {hour:.3f} g")
    print()
