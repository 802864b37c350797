"""Carbon accounting for LLM serving, measured per functional unit.

A functional unit is a generated token that meets quality (Qscore) and
latency (TTFT/TPOT) constraints at a stated request rate. The package turns
serving traces, real or simulated, into per-run carbon reports and
cross-configuration comparison grids.
"""

from .carbon import (CarbonTotals, DeviceSpec, FabParams, PlatformSpec, amortized_embodied,
                     device_embodied, dram_carbon, load_platform, manufacturing_carbon,
                     operational_carbon, packaging_carbon, platform_embodied_total,
                     total_carbon)
from .compare import (ComparisonGrid, GridCell, build_grid, carbon_savings, emit_grid,
                      parse_grid, parse_grid_csv)
from .energy import EnergyBreakdown, integrate_power, run_energy
from .errors import (EmptyTraceError, FuelError, GridError, MissingPowerError, NoLatencyError,
                     OutOfWindowError, PlatformSpecError, TraceParseError,
                     TraceValidationError, TraceVersionError, UndefinedSavingsError,
                     UnknownDeviceError)
from .funit import (CarbonReport, FunctionalUnitSpec, build_report, cfu,
                    count_functional_units, slo_attainment)
from .simulate import SimManifest, SimProfile, load_profile, queue_waits, simulate_run
from .trace import (LatencySummary, PowerSample, RequestRecord, RunMetadata, RunTrace,
                    Violation, derive_latencies, parse_trace, validate_trace, write_trace)

__version__ = "0.1.0"

__all__ = [
    "CarbonReport", "CarbonTotals", "ComparisonGrid", "DeviceSpec", "EmptyTraceError",
    "EnergyBreakdown", "FabParams", "FuelError", "FunctionalUnitSpec", "GridCell",
    "GridError", "LatencySummary", "MissingPowerError", "NoLatencyError",
    "OutOfWindowError", "PlatformSpec", "PlatformSpecError", "PowerSample",
    "RequestRecord", "RunMetadata",
    "RunTrace", "SimManifest", "SimProfile", "TraceParseError", "TraceValidationError",
    "TraceVersionError", "UndefinedSavingsError", "UnknownDeviceError", "Violation",
    "amortized_embodied", "build_grid", "build_report", "carbon_savings", "cfu",
    "count_functional_units", "derive_latencies", "device_embodied", "dram_carbon", "emit_grid",
    "integrate_power", "load_platform", "load_profile", "manufacturing_carbon",
    "operational_carbon", "packaging_carbon", "parse_grid", "parse_grid_csv",
    "parse_trace", "platform_embodied_total", "queue_waits", "run_energy",
    "simulate_run", "slo_attainment", "total_carbon", "validate_trace", "write_trace",
]
