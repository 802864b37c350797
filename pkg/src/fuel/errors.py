"""Exception types shared across the toolkit."""

from __future__ import annotations


class FuelError(Exception):
    """Base class for every error raised by this package."""


class TraceParseError(FuelError):
    """A trace file could not be read (bad JSON, wrong shape, missing field)."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class TraceVersionError(TraceParseError):
    """The trace declares a schema version this reader does not support."""


class TraceValidationError(FuelError):
    """A trace violates one or more data-model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        summary = "; ".join(f"{v.rule}[{v.record_id}]" for v in self.violations)
        super().__init__(f"trace failed validation: {summary}")


class NoLatencyError(FuelError):
    """TTFT/TPOT requested for a failed or zero-token request."""


class MissingPowerError(FuelError):
    """No power samples (and no constant-power fallback) for a device."""


class OutOfWindowError(FuelError):
    """A power sample lies outside the tolerance-widened integration window."""


class EmptyTraceError(FuelError):
    """An operation that needs at least one request got none."""


class UnknownDeviceError(FuelError):
    """A trace references a device the platform spec does not declare."""


class PlatformSpecError(FuelError):
    """A platform or device spec is malformed or used in the wrong mode."""


class UndefinedSavingsError(FuelError):
    """Carbon savings requested against an undefined or zero reference CFU."""


class GridError(FuelError):
    """A comparison grid could not be assembled from the given reports."""
