"""Energy from sampled power draw.

Samples are treated as a zero-order hold: each reading persists until the
next one arrives. The first sample's value is extended back to the window
start and the last sample's value forward to the window end, so a run metered
from its first instant loses nothing at the edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyTraceError, MissingPowerError, OutOfWindowError
from .trace import PowerSample, RunTrace

J_PER_KWH = 3.6e6


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-device and whole-run energy in kWh over the run's wall window."""

    per_device: dict[str, float]
    total_kwh: float


def integrate_power(samples: Sequence[PowerSample],
                    window_start: float,
                    window_end: float,
                    tolerance: float | None = None) -> float:
    """Energy in kWh drawn over [window_start, window_end] by one device.

    ``samples`` must be in strictly increasing timestamp order (the trace
    validator enforces this per device). When ``tolerance`` is given, any
    sample lying outside the window widened by that margin raises
    :class:`OutOfWindowError`; by default stray samples are simply clipped,
    which keeps the integral additive across adjacent sub-windows.
    """
    if window_end < window_start:
        raise OutOfWindowError(f"window_end {window_end} < window_start {window_start}")
    if not samples:
        raise MissingPowerError("no power samples to integrate")
    if tolerance is not None:
        lo, hi = window_start - tolerance, window_end + tolerance
        for s in samples:
            if not lo <= s.timestamp <= hi:
                raise OutOfWindowError(
                    f"sample at {s.timestamp} outside window "
                    f"[{window_start}, {window_end}] by more than {tolerance}")

    t = np.array([s.timestamp for s in samples], dtype=np.float64)
    p = np.array([s.power_w for s in samples], dtype=np.float64)

    # Hold interval for sample i: [t_i, t_{i+1}), first stretched back to the
    # window start, last stretched forward to the window end.
    starts = np.concatenate(([window_start], t[1:]))
    ends = np.concatenate((t[1:], [window_end]))
    lo = np.clip(starts, window_start, window_end)
    hi = np.clip(ends, window_start, window_end)
    joules = float(np.sum(p * np.maximum(hi - lo, 0.0)))
    return joules / J_PER_KWH


def run_energy(trace: RunTrace) -> EnergyBreakdown:
    """Integrate every metered device over the run's full wall window.

    Devices listed in the metadata's ``constant_power_w`` extension but
    carrying no samples contribute watts times window length. A declared
    device with neither samples nor a fallback raises
    :class:`MissingPowerError`; a run with no power data at all raises
    :class:`EmptyTraceError`.
    """
    meta = trace.metadata
    ws, we = meta.wall_start, meta.wall_end

    by_device = trace.power_by_device()
    fallbacks = trace.constant_power_fallbacks()
    declared = trace.declared_devices()
    devices = declared or sorted(set(by_device) | set(fallbacks))
    if not devices:
        raise EmptyTraceError("run has no power samples and no constant-power fallback")

    per_device: dict[str, float] = {}
    for dev in devices:
        samples = by_device.get(dev)
        if samples:
            per_device[dev] = integrate_power(samples, ws, we)
        elif dev in fallbacks:
            per_device[dev] = fallbacks[dev] * (we - ws) / J_PER_KWH
        else:
            raise MissingPowerError(f"device {dev!r} has no samples and no constant fallback")
    return EnergyBreakdown(per_device=per_device, total_kwh=float(sum(per_device.values())))
