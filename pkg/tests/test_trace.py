import numpy as np
import pytest

import oracles
from fuel.errors import NoLatencyError, TraceParseError, TraceValidationError, TraceVersionError
from fuel.trace import (PowerSample, RequestRecord, RunMetadata, RunTrace, derive_latencies,
                        parse_trace, parse_trace_lines, trace_to_lines, validate_trace,
                        write_trace)

META_LINE = ('{"kind":"meta","version":1,"run_id":"r1","config_label":"demo",'
             '"model_family":"fam","model_size_b":7.0,"quantization":"fp16",'
             '"platform_id":"p1","dataset_id":"d1","target_qps":1.0,'
             '"wall_start":0.0,"wall_end":10.0}')


def minimal_lines():
    return [
        META_LINE,
        '{"kind":"request","request_id":"a","arrival":1.0,"first_token_at":1.5,'
        '"last_token_at":2.0,"output_tokens":6,"qscore":3.0,"failed":false}',
        '{"kind":"power","timestamp":0.0,"device_id":"gpu0","power_w":100.0}',
    ]


def test_parse_minimal_file(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text("\n".join(minimal_lines()) + "\n")
    trace = parse_trace(path)
    assert len(trace.requests) == 1
    assert len(trace.power) == 1
    assert trace.metadata.run_id == "r1"
    assert trace.requests[0].output_tokens == 6


def test_parse_reports_line_numbers(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text(META_LINE + "\n{not json}\n")
    with pytest.raises(TraceParseError) as exc:
        parse_trace(path)
    assert "line 2" in str(exc.value)
    assert exc.value.line_no == 2


def test_parse_rejects_newer_schema_version(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text(META_LINE.replace('"version":1', '"version":2') + "\n")
    with pytest.raises(TraceVersionError):
        parse_trace(path)


def test_parse_rejects_empty_file(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text("")
    with pytest.raises(TraceParseError):
        parse_trace(path)


def test_parse_rejects_missing_fields():
    with pytest.raises(TraceParseError) as exc:
        parse_trace_lines([META_LINE, '{"kind":"request","request_id":"a"}'])
    assert "arrival" in str(exc.value) or "output_tokens" in str(exc.value)


def test_parse_rejects_unknown_kind():
    with pytest.raises(TraceParseError):
        parse_trace_lines([META_LINE, '{"kind":"mystery"}'])


def test_parse_validates_by_default(tmp_path):
    bad = ('{"kind":"request","request_id":"a","arrival":5.0,"first_token_at":4.0,'
           '"last_token_at":6.0,"output_tokens":3,"failed":false}')
    path = tmp_path / "t.jsonl"
    path.write_text(META_LINE + "\n" + bad + "\n"
                    + '{"kind":"power","timestamp":0.0,"device_id":"gpu0","power_w":1.0}\n')
    with pytest.raises(TraceValidationError) as exc:
        parse_trace(path)
    assert any(v.rule == "timestamp_order" and v.record_id == "a"
               for v in exc.value.violations)


def make_trace(requests=(), power=None, wall_end=10.0, extensions=None):
    if power is None:
        power = (PowerSample(0.0, "gpu0", 100.0),)
    meta = RunMetadata(run_id="r1", config_label="demo", model_family="fam",
                       model_size_b=7.0, quantization="fp16", platform_id="p1",
                       dataset_id="d1", target_qps=1.0, wall_start=0.0, wall_end=wall_end,
                       extensions=extensions or {})
    return RunTrace(metadata=meta, requests=tuple(requests), power=tuple(power))


def req(rid="a", arrival=1.0, first=1.5, last=2.0, tokens=6, qscore=3.0, failed=False):
    return RequestRecord(request_id=rid, arrival=arrival, first_token_at=first,
                         last_token_at=last, output_tokens=tokens, qscore=qscore,
                         failed=failed)


def test_validate_clean_trace():
    assert validate_trace(make_trace([req()])) == []


def test_validate_duplicate_request_id():
    violations = validate_trace(make_trace([req("x"), req("x", arrival=2.0, first=2.5, last=3.0)]))
    assert [v.rule for v in violations] == ["duplicate_request_id"]
    assert violations[0].record_id == "x"


def test_validate_power_not_monotone():
    power = (PowerSample(1.0, "gpu0", 10.0), PowerSample(0.5, "gpu0", 10.0))
    violations = validate_trace(make_trace([req()], power=power))
    assert [v.rule for v in violations] == ["power_not_monotone"]
    assert violations[0].record_id == "gpu0"


def test_validate_interleaved_devices_are_independent():
    power = (PowerSample(1.0, "gpu0", 10.0), PowerSample(0.5, "cpu0", 10.0),
             PowerSample(2.0, "gpu0", 10.0), PowerSample(0.7, "cpu0", 10.0))
    assert validate_trace(make_trace([req()], power=power)) == []


def test_validate_timestamp_order():
    violations = validate_trace(make_trace([req(first=0.5)]))
    assert [v.rule for v in violations] == ["timestamp_order"]


def test_validate_timestamp_out_of_window():
    violations = validate_trace(make_trace([req(last=11.0)], wall_end=10.0))
    assert "timestamp_out_of_window" in [v.rule for v in violations]


def test_validate_token_presence_mismatch():
    violations = validate_trace(make_trace([req(tokens=0)]))
    assert "token_presence_mismatch" in [v.rule for v in violations]
    violations = validate_trace(make_trace(
        [RequestRecord(request_id="z", arrival=1.0, output_tokens=4)]))
    assert "token_presence_mismatch" in [v.rule for v in violations]


def test_validate_zero_token_request_is_valid():
    record = RequestRecord(request_id="z", arrival=1.0, output_tokens=0)
    assert validate_trace(make_trace([record])) == []


def test_validate_negative_power():
    violations = validate_trace(make_trace([req()], power=(PowerSample(0.0, "gpu0", -1.0),)))
    assert [v.rule for v in violations] == ["negative_power"]


def test_validate_missing_power_for_declared_device():
    trace = make_trace([req()], extensions={"devices": ["gpu0", "gpu1"]})
    violations = validate_trace(trace)
    assert [v.rule for v in violations] == ["missing_power"]
    assert violations[0].record_id == "gpu1"


def test_validate_constant_fallback_satisfies_declared_device():
    trace = make_trace([req()], extensions={"devices": ["gpu0", "cpu0"],
                                            "constant_power_w": {"cpu0": 40.0}})
    assert validate_trace(trace) == []


def test_validate_no_power_at_all():
    violations = validate_trace(make_trace([req()], power=()))
    assert [v.rule for v in violations] == ["missing_power"]


def test_validate_bad_window():
    trace = make_trace([], wall_end=0.0)
    rules = [v.rule for v in validate_trace(trace)]
    assert "invalid_wall_window" in rules


def test_derive_latencies_multi_token():
    lat = derive_latencies(req(arrival=0.5, first=1.0, last=2.0, tokens=11))
    assert lat.ttft == pytest.approx(0.5)
    assert lat.tpot == pytest.approx(0.1)


def test_derive_latencies_single_token():
    lat = derive_latencies(req(arrival=0.0, first=0.3, last=0.3, tokens=1))
    assert lat.ttft == pytest.approx(0.3)
    assert lat.tpot == 0.0


def test_derive_latencies_rejects_failed_and_empty():
    with pytest.raises(NoLatencyError):
        derive_latencies(req(failed=True))
    with pytest.raises(NoLatencyError):
        derive_latencies(RequestRecord(request_id="z", arrival=1.0, output_tokens=0))


def test_derive_latencies_matches_recomputation():
    rng = np.random.default_rng(11)
    for _ in range(100):
        arrival = float(rng.uniform(0, 50))
        tokens = int(rng.integers(1, 80))
        first = arrival + float(rng.uniform(0, 3))
        last = first + (tokens - 1) * float(rng.uniform(0.01, 0.5))
        record = req(arrival=arrival, first=first, last=last, tokens=tokens)
        lat = derive_latencies(record)
        assert lat.ttft == first - arrival
        expected_tpot = (last - first) / (tokens - 1) if tokens >= 2 else 0.0
        assert lat.tpot == expected_tpot


def test_tpot_reconstructs_last_token_time():
    rng = np.random.default_rng(12)
    for _ in range(200):
        tokens = int(rng.integers(2, 100))
        first = float(rng.uniform(0, 10))
        last = first + (tokens - 1) * float(rng.uniform(0.01, 0.5))
        lat = derive_latencies(req(arrival=0.0, first=first, last=last, tokens=tokens))
        assert first + lat.tpot * (tokens - 1) == pytest.approx(last, rel=1e-12)


def test_round_trip_identity(tmp_path):
    rng = np.random.default_rng(13)
    for i in range(25):
        trace = oracles.random_trace(rng, n_devices=int(rng.integers(1, 3)))
        path = tmp_path / f"t{i}.jsonl"
        write_trace(trace, path)
        assert parse_trace(path, validate=False) == trace


def test_emitted_lines_omit_absent_optionals():
    record = RequestRecord(request_id="z", arrival=1.0, output_tokens=0)
    lines = list(trace_to_lines(make_trace([record])))
    assert "first_token_at" not in lines[1]
    assert "qscore" not in lines[1]
    assert "null" not in lines[1]


def test_random_traces_validate_clean():
    rng = np.random.default_rng(14)
    for _ in range(50):
        assert validate_trace(oracles.random_trace(rng)) == []
