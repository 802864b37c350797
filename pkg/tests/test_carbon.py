import dataclasses
import json

import numpy as np
import pytest

from fuel.carbon import (CarbonTotals, DeviceSpec, FabParams, PlatformSpec,
                         amortized_embodied, device_embodied, dram_carbon, load_platform,
                         manufacturing_carbon, operational_carbon, packaging_carbon,
                         platform_embodied_total, platform_from_dict, total_carbon)
from fuel.errors import PlatformSpecError, UnknownDeviceError
from fuel.trace import PowerSample, RunMetadata, RunTrace

FIVE_YEARS_S = 157_680_000


def direct_device(device_id="gpu0", kind="gpu", total_g=29920.0, count=1.0):
    return DeviceSpec(device_id=device_id, kind=kind, count=count,
                      embodied_mode="direct", total_g=total_g)


def act_device(**kw):
    defaults = dict(device_id="gpu0", kind="gpu", count=1.0, embodied_mode="act",
                    die_area_mm2=814.0, dies_per_package=1, n_ic=0, memory_gb=0.0,
                    fab=FabParams(ci_fab=0.0, epa=0.0, gpa=600.0, mpa=400.0, yield_=0.875))
    defaults.update(kw)
    return DeviceSpec(**defaults)


def platform(*devices, lifetime_s=float(FIVE_YEARS_S)):
    return PlatformSpec(platform_id="test", devices=tuple(devices), lifetime_s=lifetime_s)


def test_operational_carbon_values():
    assert operational_carbon(1.0, 518.0) == 518.0
    assert operational_carbon(0.0, 518.0) == 0.0
    assert operational_carbon(0.3, 518.0) == pytest.approx(155.4)


def test_operational_carbon_rejects_negatives():
    with pytest.raises(ValueError):
        operational_carbon(-1.0, 518.0)
    with pytest.raises(ValueError):
        operational_carbon(1.0, -5.0)


def test_manufacturing_hand_value():
    # Combined per-area term 1000 g/cm2, 814 mm2 die, yield 0.875.
    dev = act_device()
    assert dev.fab.g_per_cm2 == 1000.0
    assert manufacturing_carbon(dev) == pytest.approx(1000.0 * 8.14 / 0.875)
    assert manufacturing_carbon(dev) == pytest.approx(9302.857142857143)


def test_manufacturing_uses_fab_energy_term():
    dev = act_device(fab=FabParams(ci_fab=500.0, epa=1.2, gpa=250.0, mpa=150.0, yield_=1.0),
                     die_area_mm2=100.0)
    # (500*1.2 + 250 + 150) * 1 cm2 / 1.0 = 1000 g
    assert manufacturing_carbon(dev) == pytest.approx(1000.0)


def test_manufacturing_counts_dies_and_units():
    dev = act_device(dies_per_package=4, count=2.0, die_area_mm2=100.0)
    assert manufacturing_carbon(dev) == pytest.approx(4 * 1000.0 * 1.0 / 0.875 * 2)


def test_manufacturing_rejects_direct_mode():
    with pytest.raises(PlatformSpecError):
        manufacturing_carbon(direct_device())


def test_zero_area_act_device_rejected_at_load():
    with pytest.raises(PlatformSpecError):
        act_device(die_area_mm2=0.0)


def test_yield_bounds_enforced():
    with pytest.raises(PlatformSpecError):
        FabParams(ci_fab=0.0, epa=0.0, gpa=1.0, mpa=1.0, yield_=0.0)
    with pytest.raises(PlatformSpecError):
        FabParams(ci_fab=0.0, epa=0.0, gpa=1.0, mpa=1.0, yield_=1.5)


def test_zero_per_area_term_gives_zero():
    dev = act_device(fab=FabParams(ci_fab=0.0, epa=0.0, gpa=0.0, mpa=0.0, yield_=1.0))
    assert manufacturing_carbon(dev) == 0.0


def test_packaging_values():
    assert packaging_carbon(act_device(n_ic=1)) == 150.0
    assert packaging_carbon(act_device(n_ic=0)) == 0.0
    assert packaging_carbon(act_device(n_ic=4, count=2.0)) == 1200.0


def test_dram_values():
    assert dram_carbon(act_device(memory_gb=80.0)) == 5200.0
    assert dram_carbon(act_device(memory_gb=0.0)) == 0.0
    assert dram_carbon(act_device(memory_gb=1031.0)) == 67015.0


def test_platform_total_direct_gpu():
    assert platform_embodied_total(platform(direct_device())) == 29920.0


def test_platform_total_direct_sum():
    p = platform(direct_device("gpu0", "gpu", 26600.0), direct_device("cpu0", "cpu", 9980.0))
    assert platform_embodied_total(p) == 36580.0


def test_platform_total_empty():
    assert platform_embodied_total(platform()) == 0.0


def test_platform_total_act_combines_parts():
    dev = act_device(n_ic=2, memory_gb=80.0)
    total = platform_embodied_total(platform(dev))
    assert total == pytest.approx(manufacturing_carbon(dev) + 300.0 + 5200.0)


def test_act_dram_device_skips_die_manufacturing():
    dev = act_device(kind="dram", memory_gb=64.0, n_ic=8)
    assert device_embodied(dev) == pytest.approx(8 * 150.0 + 64 * 65.0)


def test_doubling_counts_doubles_total():
    rng = np.random.default_rng(31)
    for _ in range(50):
        devices = []
        for i in range(int(rng.integers(1, 5))):
            count = float(rng.uniform(0.1, 8.0))
            if rng.random() < 0.5:
                devices.append(direct_device(f"d{i}", "gpu",
                                             float(rng.uniform(0, 50000)), count))
            else:
                devices.append(act_device(device_id=f"d{i}", count=count,
                                          n_ic=int(rng.integers(0, 5)),
                                          memory_gb=float(rng.uniform(0, 100))))
        base = platform(*devices)
        doubled = platform(*[dataclasses.replace(d, count=d.count * 2) for d in devices])
        assert platform_embodied_total(doubled) == 2 * platform_embodied_total(base)


def test_fractional_count_for_shared_host():
    cpu = direct_device("cpu0", "cpu", 42810.0, count=0.125)
    assert device_embodied(cpu) == pytest.approx(42810.0 / 8)


def test_amortized_hand_value():
    p = platform(direct_device(), lifetime_s=float(FIVE_YEARS_S))
    got = amortized_embodied(p, 3600.0)
    assert got == pytest.approx(0.68311, rel=1e-4)


def test_amortized_endpoints():
    p = platform(direct_device())
    assert amortized_embodied(p, 0.0) == 0.0
    assert amortized_embodied(p, p.lifetime_s) == platform_embodied_total(p)


def test_amortized_linear_in_t():
    p = platform(direct_device())
    assert amortized_embodied(p, 7200.0) == pytest.approx(2 * amortized_embodied(p, 3600.0))


def test_carbon_totals_sum_exact():
    rng = np.random.default_rng(32)
    for _ in range(200):
        op = float(rng.uniform(0, 1e4))
        em = float(rng.uniform(0, 1e4))
        totals = CarbonTotals(c_op_g=op, c_em_g=em, ci_used=518.0, embodied_total_g=1.0)
        assert totals.c_total_g == op + em


def _constant_power_trace(power_w=360.0, duration=100.0):
    meta = RunMetadata(run_id="r", config_label="c", model_family="f", model_size_b=1.0,
                       quantization="fp16", platform_id="test", dataset_id="d",
                       target_qps=1.0, wall_start=0.0, wall_end=duration)
    return RunTrace(metadata=meta, requests=(),
                    power=(PowerSample(0.0, "gpu0", power_w),))


def test_total_carbon_worked_example():
    trace = _constant_power_trace()
    totals = total_carbon(trace, platform(direct_device()), ci=518.0)
    assert totals.c_op_g == pytest.approx(5.18, rel=1e-9)
    assert totals.c_em_g == pytest.approx(0.018975, rel=1e-3)
    assert totals.c_total_g == pytest.approx(5.198975, rel=1e-6)
    assert totals.c_total_g == totals.c_op_g + totals.c_em_g
    assert totals.embodied_total_g == 29920.0
    assert totals.ci_used == 518.0


def test_total_carbon_increasing_in_ci():
    trace = _constant_power_trace()
    p = platform(direct_device())
    values = [total_carbon(trace, p, ci=ci).c_total_g for ci in (100.0, 518.0, 900.0)]
    assert values[0] < values[1] < values[2]


def test_total_carbon_unknown_device():
    trace = _constant_power_trace()
    p = platform(direct_device(device_id="other"))
    with pytest.raises(UnknownDeviceError):
        total_carbon(trace, p)


def test_duplicate_device_ids_rejected():
    with pytest.raises(PlatformSpecError):
        platform(direct_device("x"), direct_device("x"))


def test_nonpositive_lifetime_rejected():
    with pytest.raises(PlatformSpecError):
        platform(direct_device(), lifetime_s=0.0)


def test_shipped_fixture_h100(platform_dir):
    p = load_platform(platform_dir / "h100_server.json")
    assert p.lifetime_s == FIVE_YEARS_S
    assert device_embodied(p.device("gpu0")) == 29920.0
    assert device_embodied(p.device("cpu0")) == 42810.0
    assert platform_embodied_total(p) == 72730.0


def test_shipped_fixture_l40(platform_dir):
    p = load_platform(platform_dir / "l40_server.json")
    assert device_embodied(p.device("gpu0")) == 26600.0
    assert device_embodied(p.device("cpu0")) == 9980.0
    assert platform_embodied_total(p) == 36580.0


def test_load_platform_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(PlatformSpecError):
        load_platform(bad)
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"platform_id": "x"}))
    with pytest.raises(PlatformSpecError):
        load_platform(missing)


def test_platform_from_dict_accepts_yield_alias():
    obj = {"platform_id": "x", "devices": [{
        "device_id": "g", "kind": "gpu", "embodied_mode": "act", "die_area_mm2": 100.0,
        "fab": {"ci_fab": 0.0, "epa": 0.0, "gpa": 875.0, "mpa": 0.0, "yield": 0.875}}]}
    p = platform_from_dict(obj)
    assert manufacturing_carbon(p.devices[0]) == pytest.approx(1000.0)
