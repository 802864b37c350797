"""Live profiling client: drives a streaming-completions endpoint, samples
device power, scores responses, and writes run traces for the fuel toolkit.
"""

from .client import RequestLog, stream_one
from .config import CollectorConfig, config_from_dict, load_config, load_prompts
from .dispatch import build_schedule, dispatch_workload
from .power import PowerReading, register_backend, resolve_backend, sample_power
from .run import CollectionResult, RunClock, collect, run_collection
from .scoring import score_responses
from .tracefile import trace_lines, write_trace

__version__ = "0.1.0"

__all__ = [
    "CollectionResult", "CollectorConfig", "PowerReading", "RequestLog", "RunClock",
    "build_schedule", "collect", "config_from_dict", "dispatch_workload", "load_config",
    "load_prompts", "register_backend", "resolve_backend", "run_collection",
    "sample_power", "score_responses", "stream_one", "trace_lines", "write_trace",
]
