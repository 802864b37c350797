import numpy as np
import pytest

import oracles
from fuel.energy import J_PER_KWH, integrate_power, run_energy
from fuel.errors import EmptyTraceError, MissingPowerError, OutOfWindowError
from fuel.trace import PowerSample, RunMetadata, RunTrace


def samples(*pairs, device="gpu0"):
    return [PowerSample(timestamp=t, device_id=device, power_w=p) for t, p in pairs]


def test_constant_power():
    s = samples((0.0, 100.0), (0.2, 100.0), (0.4, 100.0))
    assert integrate_power(s, 0.0, 0.6) == pytest.approx(60.0 / J_PER_KWH)


def test_zero_power():
    assert integrate_power(samples((0.0, 0.0)), 0.0, 10.0) == 0.0


def test_single_sample_back_extension():
    # One late sample covers the whole window, both directions.
    assert integrate_power(samples((5.0, 100.0)), 0.0, 10.0) == pytest.approx(1000.0 / J_PER_KWH)


def test_varying_power_hand_value():
    s = samples((0.0, 100.0), (1.0, 300.0))
    # 100 W for 1 s, then 300 W for 1 s.
    assert integrate_power(s, 0.0, 2.0) == pytest.approx(400.0 / J_PER_KWH)


def test_empty_samples_rejected():
    with pytest.raises(MissingPowerError):
        integrate_power([], 0.0, 1.0)


def test_inverted_window_rejected():
    with pytest.raises(OutOfWindowError):
        integrate_power(samples((0.0, 1.0)), 1.0, 0.0)


def test_tolerance_flags_stray_samples():
    s = samples((0.0, 100.0), (5.0, 100.0))
    assert integrate_power(s, 0.0, 1.0, tolerance=10.0) > 0
    with pytest.raises(OutOfWindowError):
        integrate_power(s, 0.0, 1.0, tolerance=0.5)


def test_matches_segment_sum_oracle():
    rng = np.random.default_rng(21)
    for _ in range(300):
        n = int(rng.integers(1, 1000))
        t_lo, t_hi = sorted(rng.uniform(0.0, 100.0, size=2))
        if t_hi - t_lo < 1e-6:
            t_hi = t_lo + 1.0
        s = oracles.random_power_samples(rng, n, t_lo, t_hi)
        lo, hi = sorted(rng.uniform(-10.0, 110.0, size=2))
        got = integrate_power(s, lo, hi)
        want = oracles.energy_kwh(s, lo, hi)
        assert got == pytest.approx(want, rel=1e-9, abs=1e-15)


def test_additivity_exact_split():
    rng = np.random.default_rng(22)
    for _ in range(100):
        s = oracles.random_power_samples(rng, int(rng.integers(2, 200)), 0.0, 50.0)
        cut = float(rng.uniform(0.0, 50.0))
        whole = integrate_power(s, 0.0, 50.0)
        left = integrate_power(s, 0.0, cut)
        right = integrate_power(s, cut, 50.0)
        assert left + right == pytest.approx(whole, rel=1e-12)


def test_scaling():
    rng = np.random.default_rng(23)
    s = oracles.random_power_samples(rng, 50, 0.0, 20.0)
    k = 3.5
    scaled = [PowerSample(x.timestamp, x.device_id, x.power_w * k) for x in s]
    assert integrate_power(scaled, 0.0, 20.0) == pytest.approx(
        k * integrate_power(s, 0.0, 20.0), rel=1e-12)


def test_window_extension_monotone():
    rng = np.random.default_rng(24)
    s = oracles.random_power_samples(rng, 50, 0.0, 20.0)
    values = [integrate_power(s, 0.0, end) for end in (5.0, 10.0, 20.0, 30.0)]
    assert values == sorted(values)


def _trace(power, extensions=None, wall_end=100.0):
    meta = RunMetadata(run_id="r", config_label="c", model_family="f", model_size_b=1.0,
                       quantization="fp16", platform_id="p", dataset_id="d",
                       target_qps=1.0, wall_start=0.0, wall_end=wall_end,
                       extensions=extensions or {})
    return RunTrace(metadata=meta, requests=(), power=tuple(power))


def test_run_energy_single_device():
    trace = _trace(samples((0.0, 360.0)), wall_end=100.0)
    got = run_energy(trace)
    assert got.per_device == {"gpu0": pytest.approx(0.01)}
    assert got.total_kwh == pytest.approx(0.01)


def test_run_energy_two_devices():
    power = samples((0.0, 100.0)) + samples((0.0, 200.0), device="cpu0")
    got = run_energy(_trace(power, wall_end=3600.0))
    assert got.per_device["gpu0"] == pytest.approx(0.1)
    assert got.per_device["cpu0"] == pytest.approx(0.2)
    assert got.total_kwh == pytest.approx(0.3)


def test_run_energy_total_is_sum():
    rng = np.random.default_rng(25)
    for _ in range(20):
        trace = oracles.random_trace(rng, n_devices=int(rng.integers(1, 4)))
        got = run_energy(trace)
        assert got.total_kwh == pytest.approx(sum(got.per_device.values()), rel=1e-12)
        assert all(v >= 0 for v in got.per_device.values())


def test_run_energy_constant_fallback():
    trace = _trace(samples((0.0, 100.0)), wall_end=3600.0,
                   extensions={"devices": ["gpu0", "cpu0"],
                               "constant_power_w": {"cpu0": 50.0}})
    got = run_energy(trace)
    assert got.per_device["cpu0"] == pytest.approx(0.05)


def test_run_energy_missing_declared_device():
    trace = _trace(samples((0.0, 100.0)), extensions={"devices": ["gpu0", "cpu0"]})
    with pytest.raises(MissingPowerError):
        run_energy(trace)


def test_run_energy_no_power_at_all():
    with pytest.raises(EmptyTraceError):
        run_energy(_trace([]))
