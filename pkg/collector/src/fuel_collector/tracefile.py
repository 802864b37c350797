"""Run-trace file emission.

Writes the line-delimited JSON trace format consumed by the `fuel`
toolkit: a meta header line, then request and power lines. Optional
request fields are omitted when absent; the header declares the metered
devices so the downstream validator can check coverage.
"""

from __future__ import annotations

import json

from .client import RequestLog
from .config import CollectorConfig
from .power import PowerReading

SCHEMA_VERSION = 1


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def trace_lines(records: list[RequestLog], samples: list[PowerReading],
                qscores: dict[str, float], config: CollectorConfig,
                wall_start: float, wall_end: float) -> list[str]:
    extensions: dict = {"devices": sorted(config.power_sources)}
    if config.scorer_url is None:
        extensions["unscored"] = True
    lines = [_dump({
        "kind": "meta",
        "version": SCHEMA_VERSION,
        "run_id": config.run_id,
        "config_label": config.config_label,
        "model_family": config.model_family,
        "model_size_b": config.model_size_b,
        "quantization": config.quantization,
        "platform_id": config.platform_id,
        "dataset_id": config.dataset_id,
        "target_qps": config.target_qps,
        "wall_start": wall_start,
        "wall_end": wall_end,
        "extensions": extensions,
    })]
    for record in records:
        row: dict = {"kind": "request", "request_id": record.request_id,
                     "arrival": record.arrival}
        if record.first_chunk_at is not None:
            row["first_token_at"] = record.first_chunk_at
        if record.last_chunk_at is not None:
            row["last_token_at"] = record.last_chunk_at
        # token count and timestamps must agree: no timestamps -> 0 tokens,
        # timestamps -> at least the observed chunks even if a broken server
        # reported a zero usage total
        if record.first_chunk_at is None:
            row["output_tokens"] = 0
        else:
            row["output_tokens"] = record.output_tokens or record.chunks
        if record.request_id in qscores:
            row["qscore"] = qscores[record.request_id]
        row["failed"] = record.failed
        lines.append(_dump(row))
    for sample in samples:
        lines.append(_dump({"kind": "power", "timestamp": sample.timestamp,
                            "device_id": sample.device_id, "power_w": sample.power_w}))
    return lines


def write_trace(records: list[RequestLog], samples: list[PowerReading],
                qscores: dict[str, float], config: CollectorConfig,
                wall_start: float, wall_end: float) -> str:
    """Write the trace to ``config.out_path``; returns the path."""
    with open(config.out_path, "w", encoding="utf-8") as fh:
        for line in trace_lines(records, samples, qscores, config, wall_start, wall_end):
            fh.write(line + "\n")
    return config.out_path
