"""Serving-trace data model: on-disk format, validation, per-request latencies.

A trace file is line-delimited JSON. The first line is the run metadata
(``{"kind": "meta", "version": 1, ...}``); every following line is either a
``request`` or a ``power`` record, in any interleaving. Timestamps are
run-relative seconds. Absent optional fields are omitted, never null.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import NoLatencyError, TraceParseError, TraceValidationError, TraceVersionError

SCHEMA_VERSION = 1

#: Quantization labels with dedicated semantics; anything else is treated as
#: an opaque "other" label and passed through untouched.
KNOWN_QUANTIZATIONS = ("fp16", "awq", "w8a8")


@dataclass(frozen=True)
class RunMetadata:
    """Identity and conditions of one profiling run."""

    run_id: str
    config_label: str
    model_family: str
    model_size_b: float
    quantization: str
    platform_id: str
    dataset_id: str
    target_qps: float
    wall_start: float
    wall_end: float
    #: Free-form extras. Two keys are understood elsewhere in the toolkit:
    #: "devices" (list of device ids the run was supposed to meter) and
    #: "constant_power_w" (device id -> watts fallback when no samples exist).
    extensions: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RequestRecord:
    """One served request. ``first_token_at``/``last_token_at`` are absent
    exactly when the request produced zero tokens."""

    request_id: str
    arrival: float
    output_tokens: int
    first_token_at: float | None = None
    last_token_at: float | None = None
    qscore: float | None = None
    failed: bool = False


@dataclass(frozen=True)
class PowerSample:
    timestamp: float
    device_id: str
    power_w: float


@dataclass(frozen=True)
class RunTrace:
    metadata: RunMetadata
    requests: tuple[RequestRecord, ...]
    power: tuple[PowerSample, ...]

    def power_by_device(self) -> dict[str, list[PowerSample]]:
        out: dict[str, list[PowerSample]] = {}
        for s in self.power:
            out.setdefault(s.device_id, []).append(s)
        return out

    def constant_power_fallbacks(self) -> dict[str, float]:
        raw = self.metadata.extensions.get("constant_power_w", {})
        return {str(k): float(v) for k, v in raw.items()}

    def declared_devices(self) -> list[str]:
        raw = self.metadata.extensions.get("devices", [])
        return [str(d) for d in raw]


@dataclass(frozen=True)
class LatencySummary:
    """Per-request latency metrics: time to first token (seconds) and time
    per output token during decoding (seconds/token)."""

    ttft: float
    tpot: float


@dataclass(frozen=True)
class Violation:
    """One invariant breach found by :func:`validate_trace`."""

    rule: str
    record_id: str
    detail: str = ""


def derive_latencies(req: RequestRecord) -> LatencySummary:
    """TTFT and TPOT for one request.

    TPOT is the decode-phase pace: (last - first) / (tokens - 1). A
    single-token request has no decode phase, so its TPOT is defined as 0.
    Failed and zero-token requests have no latencies and raise
    :class:`NoLatencyError`; callers must exclude them from FU and SLO
    accounting (they count as SLO-violating).
    """
    if req.failed:
        raise NoLatencyError(f"request {req.request_id} failed; no latencies")
    if req.output_tokens < 1 or req.first_token_at is None or req.last_token_at is None:
        raise NoLatencyError(f"request {req.request_id} produced no tokens; no latencies")
    ttft = req.first_token_at - req.arrival
    if req.output_tokens >= 2:
        tpot = (req.last_token_at - req.first_token_at) / (req.output_tokens - 1)
    else:
        tpot = 0.0
    return LatencySummary(ttft=ttft, tpot=tpot)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_trace(trace: RunTrace) -> list[Violation]:
    """Check every data-model invariant; returns one :class:`Violation` per
    breach (empty list means the trace is valid). Never raises."""
    v: list[Violation] = []
    meta = trace.metadata

    if not meta.wall_end > meta.wall_start:
        v.append(Violation("invalid_wall_window", meta.run_id,
                           f"wall_end {meta.wall_end} <= wall_start {meta.wall_start}"))
    if meta.target_qps < 0:
        v.append(Violation("negative_target_qps", meta.run_id, str(meta.target_qps)))
    if not meta.model_size_b > 0:
        v.append(Violation("nonpositive_model_size", meta.run_id, str(meta.model_size_b)))

    seen: set[str] = set()
    for req in trace.requests:
        rid = req.request_id
        if rid in seen:
            v.append(Violation("duplicate_request_id", rid))
        seen.add(rid)

        if req.output_tokens < 0:
            v.append(Violation("negative_output_tokens", rid, str(req.output_tokens)))
        has_first = req.first_token_at is not None
        has_last = req.last_token_at is not None
        if (req.output_tokens == 0) != (not has_first) or has_first != has_last:
            v.append(Violation("token_presence_mismatch", rid,
                               f"output_tokens={req.output_tokens} "
                               f"first={'set' if has_first else 'absent'} "
                               f"last={'set' if has_last else 'absent'}"))
        if has_first and has_last:
            if not (req.arrival <= req.first_token_at <= req.last_token_at):
                v.append(Violation("timestamp_order", rid,
                                   f"arrival={req.arrival} first={req.first_token_at} "
                                   f"last={req.last_token_at}"))
        for name, ts in (("arrival", req.arrival),
                         ("first_token_at", req.first_token_at),
                         ("last_token_at", req.last_token_at)):
            if ts is not None and not (meta.wall_start <= ts <= meta.wall_end):
                v.append(Violation("timestamp_out_of_window", rid, f"{name}={ts}"))

    last_ts: dict[str, float] = {}
    for s in trace.power:
        if s.power_w < 0:
            v.append(Violation("negative_power", s.device_id, f"{s.power_w} W at {s.timestamp}"))
        prev = last_ts.get(s.device_id)
        if prev is not None and s.timestamp <= prev:
            v.append(Violation("power_not_monotone", s.device_id,
                               f"{s.timestamp} after {prev}"))
        last_ts[s.device_id] = s.timestamp

    sampled = {s.device_id for s in trace.power}
    fallbacks = trace.constant_power_fallbacks()
    declared = trace.declared_devices()
    if declared:
        for dev in declared:
            if dev not in sampled and dev not in fallbacks:
                v.append(Violation("missing_power", dev, "no samples and no constant fallback"))
    elif not sampled and not fallbacks:
        v.append(Violation("missing_power", "<run>", "trace carries no power data at all"))

    return v


# ---------------------------------------------------------------------------
# On-disk format
# ---------------------------------------------------------------------------

_META_FIELDS = ("run_id", "config_label", "model_family", "model_size_b", "quantization",
                "platform_id", "dataset_id", "target_qps", "wall_start", "wall_end")


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def trace_to_lines(trace: RunTrace) -> Iterator[str]:
    """Serialize a trace to its line-delimited form (no trailing newlines)."""
    meta = trace.metadata
    head: dict = {"kind": "meta", "version": SCHEMA_VERSION}
    for name in _META_FIELDS:
        head[name] = getattr(meta, name)
    if meta.extensions:
        head["extensions"] = meta.extensions
    yield _dump(head)
    for req in trace.requests:
        rec: dict = {"kind": "request", "request_id": req.request_id, "arrival": req.arrival}
        if req.first_token_at is not None:
            rec["first_token_at"] = req.first_token_at
        if req.last_token_at is not None:
            rec["last_token_at"] = req.last_token_at
        rec["output_tokens"] = req.output_tokens
        if req.qscore is not None:
            rec["qscore"] = req.qscore
        rec["failed"] = req.failed
        yield _dump(rec)
    for s in trace.power:
        yield _dump({"kind": "power", "timestamp": s.timestamp,
                     "device_id": s.device_id, "power_w": s.power_w})


def write_trace(trace: RunTrace, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in trace_to_lines(trace):
            fh.write(line)
            fh.write("\n")


def _require(obj: dict, key: str, line_no: int):
    try:
        return obj[key]
    except KeyError:
        raise TraceParseError(f"{obj.get('kind', '?')} record missing field {key!r}", line_no) from None


def _number(obj: dict, key: str, line_no: int) -> float:
    val = _require(obj, key, line_no)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise TraceParseError(f"field {key!r} must be a number, got {val!r}", line_no)
    return float(val)


def _opt_number(obj: dict, key: str, line_no: int) -> float | None:
    if key not in obj or obj[key] is None:
        return None
    return _number(obj, key, line_no)


def parse_trace_lines(lines: Iterable[str]) -> RunTrace:
    """Parse trace lines (without validating invariants)."""
    meta: RunMetadata | None = None
    requests: list[RequestRecord] = []
    power: list[PowerSample] = []

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceParseError(f"malformed JSON: {exc.msg}", line_no) from exc
        if not isinstance(obj, dict):
            raise TraceParseError("record is not a JSON object", line_no)
        kind = obj.get("kind")
        if meta is None:
            if kind != "meta":
                raise TraceParseError("first record must have kind 'meta'", line_no)
            version = obj.get("version")
            if not isinstance(version, int) or version < 1:
                raise TraceParseError(f"bad schema version {version!r}", line_no)
            if version > SCHEMA_VERSION:
                raise TraceVersionError(f"unsupported schema version {version} "
                                        f"(reader supports up to {SCHEMA_VERSION})", line_no)
            ext = obj.get("extensions", {})
            if not isinstance(ext, dict):
                raise TraceParseError("extensions must be an object", line_no)
            meta = RunMetadata(
                run_id=str(_require(obj, "run_id", line_no)),
                config_label=str(_require(obj, "config_label", line_no)),
                model_family=str(_require(obj, "model_family", line_no)),
                model_size_b=_number(obj, "model_size_b", line_no),
                quantization=str(_require(obj, "quantization", line_no)),
                platform_id=str(_require(obj, "platform_id", line_no)),
                dataset_id=str(_require(obj, "dataset_id", line_no)),
                target_qps=_number(obj, "target_qps", line_no),
                wall_start=_number(obj, "wall_start", line_no),
                wall_end=_number(obj, "wall_end", line_no),
                extensions=ext,
            )
        elif kind == "meta":
            raise TraceParseError("unexpected second meta record", line_no)
        elif kind == "request":
            tokens = _require(obj, "output_tokens", line_no)
            if isinstance(tokens, bool) or not isinstance(tokens, int):
                raise TraceParseError(f"output_tokens must be an integer, got {tokens!r}", line_no)
            requests.append(RequestRecord(
                request_id=str(_require(obj, "request_id", line_no)),
                arrival=_number(obj, "arrival", line_no),
                output_tokens=tokens,
                first_token_at=_opt_number(obj, "first_token_at", line_no),
                last_token_at=_opt_number(obj, "last_token_at", line_no),
                qscore=_opt_number(obj, "qscore", line_no),
                failed=bool(obj.get("failed", False)),
            ))
        elif kind == "power":
            power.append(PowerSample(
                timestamp=_number(obj, "timestamp", line_no),
                device_id=str(_require(obj, "device_id", line_no)),
                power_w=_number(obj, "power_w", line_no),
            ))
        else:
            raise TraceParseError(f"unknown record kind {kind!r}", line_no)

    if meta is None:
        raise TraceParseError("empty trace file (no meta record)", line_no=1)
    return RunTrace(metadata=meta, requests=tuple(requests), power=tuple(power))


def parse_trace(path: str | os.PathLike, validate: bool = True) -> RunTrace:
    """Read and materialize a trace file.

    Raises :class:`TraceParseError` (with a line number) for malformed input,
    :class:`TraceVersionError` for unsupported schema versions, and, when
    ``validate`` is true, :class:`TraceValidationError` naming the offending
    records if any invariant fails.
    """
    with open(path, "r", encoding="utf-8") as fh:
        trace = parse_trace_lines(fh)
    if validate:
        violations = validate_trace(trace)
        if violations:
            raise TraceValidationError(violations)
    return trace
