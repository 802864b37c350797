"""Run orchestration and the `fuel-collect` entry point.

Three independent activities share nothing but append-only logs merged at
write time: the dispatcher paces requests, per-request readers timestamp
streamed chunks, and the power sampler ticks on its own 200 ms schedule.
Scoring happens in a separate pass after the serving window closes.
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import sys
import time
from dataclasses import dataclass

import httpx

from .client import RequestLog
from .config import CollectorConfig, load_config, load_prompts
from .dispatch import dispatch_workload
from .power import PowerReading, sample_power
from .scoring import score_responses
from .tracefile import write_trace


class RunClock:
    """Monotonic seconds since the run began; every timestamp shares it."""

    def __init__(self):
        self._t0 = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._t0


@dataclass(frozen=True)
class CollectionResult:
    records: list[RequestLog]
    samples: list[PowerReading]
    qscores: dict[str, float]
    wall_start: float
    wall_end: float
    out_path: str


def _wall_end(config: CollectorConfig, records: list[RequestLog],
              samples: list[PowerReading], serving_end: float) -> float:
    """Latest observed serving event; never earlier than the dispatch window."""
    end = max(config.duration_s, serving_end)
    for r in records:
        for ts in (r.arrival, r.first_chunk_at, r.last_chunk_at):
            if ts is not None and ts > end:
                end = ts
    for s in samples:
        if s.timestamp > end:
            end = s.timestamp
    return end


async def collect(config: CollectorConfig) -> CollectionResult:
    """One full profiling run: dispatch, sample, score, write."""
    prompts = load_prompts(config.prompts_path)
    clock = RunClock()
    stop = asyncio.Event()
    sampler = asyncio.create_task(sample_power(config.power_sources, clock, stop))
    try:
        async with httpx.AsyncClient() as client:
            records = await dispatch_workload(config, prompts, clock, client)
    finally:
        stop.set()
    samples = await sampler
    # the serving window closes here; the scoring pass below must not widen it
    serving_end = clock.now()

    qscores: dict[str, float] = {}
    if config.scorer_url is not None:
        qscores = await score_responses(records, config.scorer_url,
                                        config.scorer_timeout_s)

    wall_end = _wall_end(config, records, samples, serving_end)
    out_path = write_trace(records, samples, qscores, config,
                           wall_start=0.0, wall_end=wall_end)
    return CollectionResult(records=records, samples=samples, qscores=qscores,
                            wall_start=0.0, wall_end=wall_end, out_path=out_path)


def run_collection(config: CollectorConfig) -> CollectionResult:
    return asyncio.run(collect(config))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fuel-collect",
        description="profile a streaming endpoint and write a run trace")
    parser.add_argument("--config", required=True, help="collector config JSON path")
    parser.add_argument("-o", "--out", help="override the configured output path")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.out:
            config = dataclasses.replace(config, out_path=args.out)
        result = run_collection(config)
    except (OSError, ValueError) as exc:
        print(f"fuel-collect: {exc}", file=sys.stderr)
        return 2

    failed = sum(1 for r in result.records if r.failed)
    print(f"wrote {result.out_path}: {len(result.records)} requests "
          f"({failed} failed), {len(result.samples)} power samples, "
          f"{len(result.qscores)} scored, window {result.wall_end:.1f}s",
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
