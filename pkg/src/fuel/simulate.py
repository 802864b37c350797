"""Seeded synthetic serving traces with a ground-truth manifest.

The model is deliberately small: requests arrive in an open loop (Poisson by
default), wait for one of ``concurrency`` identical servers, spend a fixed
prefill time to the first token, then stream the remaining tokens at a fixed
per-token pace. Power is two-level: the device draws busy_power_w whenever at
least one request is in service and idle_power_w otherwise, sampled on a
fixed cadence. Saturation therefore shows up purely through queueing delay
inflating TTFT, which is the phenomenon the analysis side needs to see.

Every run also yields a manifest holding the internal quantities the trace
format does not carry (per-request waits, exact energy of the emitted power
signal), so downstream computations can be checked against ground truth.
"""

from __future__ import annotations

import heapq
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .trace import PowerSample, RequestRecord, RunMetadata, RunTrace

POWER_SAMPLE_PERIOD_S = 0.2

ARRIVAL_PROCESSES = ("poisson", "uniform")


@dataclass(frozen=True)
class SimProfile:
    """Serving behavior of one synthetic configuration."""

    config_label: str
    prefill_s: float
    decode_s_per_token: float
    concurrency: int
    tokens_mean: float
    tokens_min: int
    tokens_max: int
    qscore_mean: float
    qscore_std: float
    idle_power_w: float
    busy_power_w: float
    device_id: str = "gpu0"
    #: Optional overrides for trace metadata fields the simulation itself
    #: does not determine (model_family, model_size_b, quantization,
    #: platform_id, dataset_id).
    meta_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.prefill_s < 0:
            raise ValueError(f"prefill_s must be >= 0, got {self.prefill_s}")
        if not self.decode_s_per_token > 0:
            raise ValueError(f"decode_s_per_token must be > 0, got {self.decode_s_per_token}")
        if self.concurrency < 1:
            raise ValueError(f"concurrency must be >= 1, got {self.concurrency}")
        if self.tokens_min < 1:
            raise ValueError(f"tokens_min must be >= 1, got {self.tokens_min}")
        if self.tokens_max < self.tokens_min:
            raise ValueError("tokens_max must be >= tokens_min")
        if not self.tokens_mean > 0:
            raise ValueError(f"tokens_mean must be > 0, got {self.tokens_mean}")
        if self.qscore_std < 0:
            raise ValueError(f"qscore_std must be >= 0, got {self.qscore_std}")
        if not self.busy_power_w >= self.idle_power_w >= 0:
            raise ValueError("power levels must satisfy busy >= idle >= 0")


@dataclass(frozen=True)
class SimRequestTruth:
    """Ground-truth record for one simulated request."""

    request_id: str
    arrival: float
    wait: float
    service_s: float
    first_token_at: float
    last_token_at: float
    output_tokens: int
    qscore: float


@dataclass(frozen=True)
class SimManifest:
    seed: int
    qps: float
    duration: float
    arrival_process: str
    profile: SimProfile
    wall_end: float
    true_energy_kwh: dict[str, float]
    requests: tuple[SimRequestTruth, ...]


def queue_waits(arrivals: Sequence[float],
                service_times: Sequence[float],
                concurrency: int) -> list[float]:
    """Per-request queueing delay for a first-come-first-served system of
    ``concurrency`` identical servers: each request starts on the earliest
    free server, no later than its arrival allows."""
    if len(arrivals) != len(service_times):
        raise ValueError("arrivals and service_times must have equal length")
    if concurrency < 1:
        raise ValueError(f"concurrency must be >= 1, got {concurrency}")
    free = [0.0] * concurrency
    heapq.heapify(free)
    waits = []
    for arrival, service in zip(arrivals, service_times):
        earliest = heapq.heappop(free)
        start = max(arrival, earliest)
        waits.append(start - arrival)
        heapq.heappush(free, start + service)
    return waits


def _draw_arrivals(rng: np.random.Generator, qps: float, duration: float,
                   process: str) -> list[float]:
    if process not in ARRIVAL_PROCESSES:
        raise ValueError(f"unknown arrival process {process!r}")
    if qps <= 0:
        return []
    arrivals: list[float] = []
    if process == "poisson":
        t = 0.0
        while True:
            t += float(rng.exponential(1.0 / qps))
            if t >= duration:
                break
            arrivals.append(t)
    else:
        step = 1.0 / qps
        t = 0.0
        while t < duration:
            arrivals.append(t)
            t += step
    return arrivals


def _sampled_signal_energy_kwh(times: Sequence[float], powers: Sequence[float],
                               window_end: float) -> float:
    # Plain segment sum over the emitted step signal; kept independent of the
    # analysis-side integrator on purpose.
    joules = 0.0
    for i, p in enumerate(powers):
        t_next = times[i + 1] if i + 1 < len(times) else window_end
        joules += p * (t_next - times[i])
    return joules / 3.6e6


def simulate_run(profile: SimProfile,
                 qps: float,
                 duration: float,
                 seed: int,
                 arrival_process: str = "poisson") -> tuple[RunTrace, SimManifest]:
    """Generate one run at the given request rate over [0, duration].

    Deterministic: identical arguments produce identical traces and
    manifests, byte for byte once serialized. Requests arriving before the
    duration elapses are always served to completion, so the wall window may
    extend past ``duration``.
    """
    if qps < 0:
        raise ValueError(f"qps must be >= 0, got {qps}")
    if not duration > 0:
        raise ValueError(f"duration must be > 0, got {duration}")

    rng = np.random.default_rng(seed)
    arrivals = _draw_arrivals(rng, qps, duration, arrival_process)
    n = len(arrivals)
    tokens = [int(min(max(round(rng.exponential(profile.tokens_mean)),
                          profile.tokens_min), profile.tokens_max)) for _ in range(n)]
    qscores = [float(rng.normal(profile.qscore_mean, profile.qscore_std)) for _ in range(n)]

    service = [profile.prefill_s + (tk - 1) * profile.decode_s_per_token for tk in tokens]
    waits = queue_waits(arrivals, service, profile.concurrency)

    requests = []
    truths = []
    busy_starts = []
    busy_ends = []
    for i in range(n):
        start = arrivals[i] + waits[i]
        first = start + profile.prefill_s
        last = first + (tokens[i] - 1) * profile.decode_s_per_token
        rid = f"r{i:05d}"
        requests.append(RequestRecord(
            request_id=rid, arrival=arrivals[i], output_tokens=tokens[i],
            first_token_at=first, last_token_at=last, qscore=qscores[i]))
        truths.append(SimRequestTruth(
            request_id=rid, arrival=arrivals[i], wait=waits[i], service_s=service[i],
            first_token_at=first, last_token_at=last,
            output_tokens=tokens[i], qscore=qscores[i]))
        busy_starts.append(start)
        busy_ends.append(last)

    wall_end = max([duration] + busy_ends)

    n_samples = int(np.floor(wall_end / POWER_SAMPLE_PERIOD_S)) + 1
    sample_ts = [k * POWER_SAMPLE_PERIOD_S for k in range(n_samples)]
    if busy_starts:
        starts_sorted = np.sort(np.array(busy_starts))
        ends_sorted = np.sort(np.array(busy_ends))
        ts = np.array(sample_ts)
        # In service during [start, end): count of started minus count of ended.
        in_service = (np.searchsorted(starts_sorted, ts, side="right")
                      - np.searchsorted(ends_sorted, ts, side="right"))
        levels = np.where(in_service > 0, profile.busy_power_w, profile.idle_power_w)
    else:
        levels = np.full(len(sample_ts), profile.idle_power_w)
    power = tuple(PowerSample(timestamp=sample_ts[k], device_id=profile.device_id,
                              power_w=float(levels[k])) for k in range(len(sample_ts)))

    overrides = profile.meta_overrides
    metadata = RunMetadata(
        run_id=str(overrides.get("run_id", f"sim-{profile.config_label}-qps{qps:g}-seed{seed}")),
        config_label=profile.config_label,
        model_family=str(overrides.get("model_family", "synthetic")),
        model_size_b=float(overrides.get("model_size_b", 1.0)),
        quantization=str(overrides.get("quantization", "fp16")),
        platform_id=str(overrides.get("platform_id", "sim")),
        dataset_id=str(overrides.get("dataset_id", "synthetic")),
        target_qps=qps,
        wall_start=0.0,
        wall_end=wall_end,
        extensions={"devices": [profile.device_id]},
    )
    trace = RunTrace(metadata=metadata, requests=tuple(requests), power=power)

    energy = _sampled_signal_energy_kwh(sample_ts, [float(v) for v in levels], wall_end)
    manifest = SimManifest(
        seed=seed, qps=qps, duration=duration, arrival_process=arrival_process,
        profile=profile, wall_end=wall_end,
        true_energy_kwh={profile.device_id: energy},
        requests=tuple(truths),
    )
    return trace, manifest


def manifest_to_json(manifest: SimManifest) -> str:
    return json.dumps(asdict(manifest), sort_keys=True, separators=(",", ":"))


def write_manifest(manifest: SimManifest, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(manifest_to_json(manifest))
        fh.write("\n")


# ---------------------------------------------------------------------------
# Profile files
# ---------------------------------------------------------------------------

_PROFILE_REQUIRED = ("config_label", "prefill_s", "decode_s_per_token", "concurrency",
                     "tokens_mean", "tokens_min", "tokens_max",
                     "qscore_mean", "qscore_std", "idle_power_w", "busy_power_w")


def profile_from_dict(obj: dict) -> SimProfile:
    if not isinstance(obj, dict):
        raise ValueError("profile must be a JSON object")
    missing = [k for k in _PROFILE_REQUIRED if k not in obj]
    if missing:
        raise ValueError(f"profile missing fields: {', '.join(missing)}")
    return SimProfile(
        config_label=str(obj["config_label"]),
        prefill_s=float(obj["prefill_s"]),
        decode_s_per_token=float(obj["decode_s_per_token"]),
        concurrency=int(obj["concurrency"]),
        tokens_mean=float(obj["tokens_mean"]),
        tokens_min=int(obj["tokens_min"]),
        tokens_max=int(obj["tokens_max"]),
        qscore_mean=float(obj["qscore_mean"]),
        qscore_std=float(obj["qscore_std"]),
        idle_power_w=float(obj["idle_power_w"]),
        busy_power_w=float(obj["busy_power_w"]),
        device_id=str(obj.get("device_id", "gpu0")),
        meta_overrides=dict(obj.get("meta_overrides", {})),
    )


def load_profile(path: str | os.PathLike) -> SimProfile:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed JSON: {exc.msg}") from exc
    return profile_from_dict(obj)
