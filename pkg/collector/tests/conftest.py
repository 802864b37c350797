import pathlib

import pytest

from fuel_collector import CollectorConfig


@pytest.fixture
def prompts_file(tmp_path) -> pathlib.Path:
    path = tmp_path / "prompts.txt"
    path.write_text("tell me a fact\nwrite a haiku\nsummarize the news\n")
    return path


@pytest.fixture
def make_config(tmp_path, prompts_file):
    """Config factory with small fast defaults; override per test."""
    def build(**overrides) -> CollectorConfig:
        base = dict(
            endpoint="http://127.0.0.1:1/unset",
            model="mock-model",
            target_qps=4.0,
            duration_s=1.0,
            prompts_path=str(prompts_file),
            out_path=str(tmp_path / "run.jsonl"),
            power_sources={"gpu0": "constant:100"},
            arrivals="fixed",
            config_label="mock",
            model_size_b=7.0,
            quantization="fp16",
            platform_id="h100_server",
            dataset_id="three-prompts",
        )
        base.update(overrides)
        return CollectorConfig(**base)
    return build
