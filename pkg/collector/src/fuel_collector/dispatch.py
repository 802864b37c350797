"""Open-loop request dispatch.

The dispatcher walks a precomputed arrival schedule and fires each request
as an independent task. It never awaits a response in the dispatch loop,
so a slow or stalled server cannot push arrivals late.
"""

from __future__ import annotations

import asyncio
import itertools
import random

import httpx

from .client import RequestLog, stream_one
from .config import CollectorConfig


def build_schedule(qps: float, duration_s: float, arrivals: str, seed: int) -> list[float]:
    """Planned arrival offsets in [0, duration_s).

    poisson: exponential gaps from a seeded generator, reproducible;
    fixed: paced exactly 1/qps apart starting at 0.
    """
    times: list[float] = []
    if arrivals == "fixed":
        step = 1.0 / qps
        t = 0.0
        while t < duration_s:
            times.append(t)
            t += step
        return times
    rng = random.Random(seed)
    t = rng.expovariate(qps)
    while t < duration_s:
        times.append(t)
        t += rng.expovariate(qps)
    return times


async def dispatch_workload(config: CollectorConfig, prompts: list[str],
                            clock, client: httpx.AsyncClient) -> list[RequestLog]:
    """Drive the endpoint per the schedule; returns logs in dispatch order.

    Individual request failures are recorded, never raised.
    """
    schedule = build_schedule(config.target_qps, config.duration_s,
                              config.arrivals, config.seed)
    prompt_cycle = itertools.cycle(prompts)
    tasks: list[asyncio.Task] = []
    for i, planned in enumerate(schedule):
        delay = planned - clock.now()
        if delay > 0:
            await asyncio.sleep(delay)
        arrival = clock.now()
        tasks.append(asyncio.create_task(stream_one(
            client, config.endpoint, config.model, next(prompt_cycle),
            request_id=f"c{i:05d}", arrival=arrival, clock=clock,
            timeout_s=config.request_timeout_s)))
    if not tasks:
        return []
    return list(await asyncio.gather(*tasks))
