"""Periodic device power sampling.

Backends are pluggable: an identifier string picks a factory from the
registry, the factory returns a zero-argument callable yielding watts.
Built-ins: ``constant:<watts>`` and ``file:<path>`` (the file holds one
number, re-read every sample, so any external telemetry agent can bridge).
"""

from __future__ import annotations

import asyncio
from dataclasses import dataclass
from typing import Callable

SAMPLE_PERIOD_S = 0.2

Backend = Callable[[], float]


@dataclass(frozen=True)
class PowerReading:
    timestamp: float
    device_id: str
    power_w: float


def _constant_backend(arg: str) -> Backend:
    watts = float(arg)
    return lambda: watts


def _file_backend(arg: str) -> Backend:
    def read() -> float:
        with open(arg, encoding="utf-8") as fh:
            return float(fh.read().strip())
    return read


_REGISTRY: dict[str, Callable[[str], Backend]] = {
    "constant": _constant_backend,
    "file": _file_backend,
}


def register_backend(scheme: str, factory: Callable[[str], Backend]) -> None:
    """Make ``<scheme>:<arg>`` identifiers resolvable."""
    _REGISTRY[scheme] = factory


def resolve_backend(identifier: str) -> Backend:
    scheme, _, arg = identifier.partition(":")
    factory = _REGISTRY.get(scheme)
    if factory is None:
        raise ValueError(f"unknown power backend {identifier!r} "
                         f"(have: {', '.join(sorted(_REGISTRY))})")
    return factory(arg)


async def sample_power(power_sources: dict[str, str], clock,
                       stop: asyncio.Event,
                       period_s: float = SAMPLE_PERIOD_S) -> list[PowerReading]:
    """Sample every backend on a fixed cadence until ``stop`` is set.

    The schedule is drift-corrected (tick k fires at k*period_s on the run
    clock), so cadence is independent of how long reads take. A backend
    that raises is dropped from the rest of the run; its samples so far
    are kept, other devices are unaffected.
    """
    backends = {dev: resolve_backend(ident) for dev, ident in sorted(power_sources.items())}
    readings: list[PowerReading] = []
    tick = 0
    while backends:
        tick += 1
        delay = tick * period_s - clock.now()
        if delay > 0:
            try:
                await asyncio.wait_for(stop.wait(), timeout=delay)
            except asyncio.TimeoutError:
                pass
        if stop.is_set():
            break
        now = clock.now()
        for dev in list(backends):
            try:
                watts = float(backends[dev]())
            except Exception:
                del backends[dev]
                continue
            readings.append(PowerReading(timestamp=now, device_id=dev, power_w=watts))
    return readings
