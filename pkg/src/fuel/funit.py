"""Functional units and carbon per functional unit.

A functional unit is one generated token that meets the quality and latency
constraints of its serving context: the run was driven at a stated request
rate (QPS), the response scored at least alpha, the request's TTFT was at
most beta seconds and its TPOT at most gamma seconds per token. Carbon per
functional unit (CFU) divides the whole run's carbon by the number of
qualifying tokens, so wasted work (failed, slow, or low-quality responses)
makes every good token more expensive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .carbon import DEFAULT_CI_G_PER_KWH, CarbonTotals, PlatformSpec, total_carbon
from .energy import EnergyBreakdown, run_energy
from .errors import EmptyTraceError
from .trace import RequestRecord, RunTrace, derive_latencies

DEFAULT_BETA_S = 1.0
DEFAULT_GAMMA_S_PER_TOKEN = 0.2


@dataclass(frozen=True)
class FunctionalUnitSpec:
    """The comparison basis: workload intensity plus quality and latency
    floors a token must clear to count.

    ``qps`` is a property of the run (which workload intensity the trace was
    collected at), not a per-token predicate; grid building matches it against
    the trace metadata's target_qps.
    """

    qps: float
    alpha: float = float("-inf")
    beta: float = DEFAULT_BETA_S
    gamma: float = DEFAULT_GAMMA_S_PER_TOKEN

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class CarbonReport:
    """Everything measured for one run under one functional-unit spec."""

    config_label: str
    fu_spec: FunctionalUnitSpec
    n_tokens: int
    n_fu: int
    energy: EnergyBreakdown
    carbon: CarbonTotals
    cfu_g_per_token: float | None
    slo_attainment: float


def _meets_latency(req: RequestRecord, beta: float, gamma: float) -> bool:
    """TTFT <= beta and TPOT <= gamma for a non-failed request with tokens.
    Failed and zero-token requests never meet the constraints."""
    if req.failed or req.output_tokens < 1:
        return False
    lat = derive_latencies(req)
    return lat.ttft <= beta and lat.tpot <= gamma


def _meets_quality(req: RequestRecord, alpha: float) -> bool:
    # An unscored response only qualifies when no quality floor is asked for
    # (alpha = -inf), the required setting for traces collected without a scorer.
    q = req.qscore if req.qscore is not None else float("-inf")
    return q >= alpha


def count_functional_units(trace: RunTrace, spec: FunctionalUnitSpec) -> tuple[int, int]:
    """(N, N_f): total generated tokens and tokens qualifying as functional
    units. Every token inherits its request's qscore/TTFT/TPOT, so requests
    contribute all-or-nothing. Failed requests contribute to neither count."""
    n_tokens = 0
    n_fu = 0
    for req in trace.requests:
        if req.failed or req.output_tokens < 1:
            continue
        n_tokens += req.output_tokens
        if _meets_quality(req, spec.alpha) and _meets_latency(req, spec.beta, spec.gamma):
            n_fu += req.output_tokens
    return n_tokens, n_fu


def cfu(carbon: CarbonTotals, n_fu: int) -> float | None:
    """Carbon per functional unit, g/token; None when no token qualified
    (the undefined / missing-data case, not an error)."""
    if n_fu < 0:
        raise ValueError(f"n_fu must be >= 0, got {n_fu}")
    if n_fu == 0:
        return None
    return carbon.c_total_g / n_fu


def slo_attainment(trace: RunTrace, spec: FunctionalUnitSpec) -> float:
    """Fraction of all requests (failed ones included) meeting both latency
    constraints. Quality (alpha) plays no part."""
    if not trace.requests:
        raise EmptyTraceError("slo_attainment needs at least one request")
    met = sum(1 for req in trace.requests if _meets_latency(req, spec.beta, spec.gamma))
    return met / len(trace.requests)


def build_report(trace: RunTrace,
                 platform: PlatformSpec,
                 ci: float = DEFAULT_CI_G_PER_KWH,
                 spec: FunctionalUnitSpec | None = None) -> CarbonReport:
    """Full accounting for one run: energy, carbon, FU counts, CFU, SLO."""
    if spec is None:
        spec = FunctionalUnitSpec(qps=trace.metadata.target_qps)
    energy = run_energy(trace)
    carbon = total_carbon(trace, platform, ci, energy=energy)
    n_tokens, n_fu = count_functional_units(trace, spec)
    return CarbonReport(
        config_label=trace.metadata.config_label,
        fu_spec=spec,
        n_tokens=n_tokens,
        n_fu=n_fu,
        energy=energy,
        carbon=carbon,
        cfu_g_per_token=cfu(carbon, n_fu),
        slo_attainment=slo_attainment(trace, spec),
    )


def report_to_dict(report: CarbonReport) -> dict:
    return {
        "config_label": report.config_label,
        "fu_spec": {
            "qps": report.fu_spec.qps,
            "alpha": report.fu_spec.alpha,
            "beta": report.fu_spec.beta,
            "gamma": report.fu_spec.gamma,
        },
        "n_tokens": report.n_tokens,
        "n_fu": report.n_fu,
        "energy": {
            "per_device": dict(sorted(report.energy.per_device.items())),
            "total_kwh": report.energy.total_kwh,
        },
        "carbon": {
            "c_op_g": report.carbon.c_op_g,
            "c_em_g": report.carbon.c_em_g,
            "c_total_g": report.carbon.c_total_g,
            "ci_used": report.carbon.ci_used,
            "embodied_total_g": report.carbon.embodied_total_g,
        },
        "cfu_g_per_token": report.cfu_g_per_token,
        "slo_attainment": report.slo_attainment,
    }


def report_to_json(report: CarbonReport) -> str:
    """Deterministic single-document rendering of a report.

    math.inf bounds serialize as the bare tokens Infinity/-Infinity, which
    the stdlib parser accepts back.
    """
    return json.dumps(report_to_dict(report), indent=2)
