"""
Anatomy of a run trace
======================

Builds a two-request trace by hand, writes it to disk, reads it back,
and derives per-request latency summaries.
"""

import pathlib

from fuel import (PowerSample, RequestRecord, RunMetadata, RunTrace,
                  derive_latencies, parse_trace, validate_trace, write_trace)

out_dir = pathlib.Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

metadata = RunMetadata(
    run_id="demo-tiny",
    config_label="toy",
    model_family="toy",
    model_size_b=7.0,
    quantization="fp16",
    platform_id="one-gpu",
    dataset_id="handwritten",
    target_qps=0.5,
    wall_start=0.0,
    wall_end=10.0,
    extensions={"devices": ["gpu0"]},
)

requests = (
    RequestRecord(request_id="r0", arrival=0.0, output_tokens=5,
                  first_token_at=0.4, last_token_at=1.2, qscore=8.5),
    # a failed request: carbon still counts, its tokens never do
    RequestRecord(request_id="r1", arrival=2.0, output_tokens=0, failed=True),
)

power = tuple(
    PowerSample(timestamp=t, device_id="gpu0", power_w=w)
    for t, w in [(0.0, 120.0), (2.5, 310.0), (5.0, 300.0), (7.5, 150.0)]
)

trace = RunTrace(metadata=metadata, requests=requests, power=power)
print("violations:", validate_trace(trace) or "none")

path = out_dir / "tiny.jsonl"
write_trace(trace, path)
print("wrote", path)
print(path.read_text(), end="")

reparsed = parse_trace(path)
assert reparsed == trace

for req in reparsed.requests:
    if req.failed:
        print(f"{req.request_id}: failed, no latency summary")
        continue
    lat = derive_latencies(req)
    print(f"{req.request_id}: ttft={lat.ttft:.2f}s tpot={lat.tpot:.3f}s/token")
