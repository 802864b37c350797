"""Operational and embodied carbon for a serving platform.

Operational carbon is energy times grid carbon intensity. Embodied carbon is
the manufacturing footprint of the hardware, charged to a run in proportion
to the run's share of the hardware's service lifetime.

A platform file lists devices. Each device either states its lifetime
embodied total outright (embodied_mode "direct") or carries fab parameters
from which the total is computed (embodied_mode "act"):

  manufacturing = dies_per_package * (ci_fab*epa + gpa + mpa)
                    * (die_area_mm2 / 100) / yield_ * count
  packaging     = n_ic * 150 g * count
  dram          = memory_gb * 65 g/GB * count

ci_fab is the fab's electricity carbon intensity (g/kWh), epa the fab energy
per die area (kWh/cm^2), gpa and mpa the per-area gas and material footprints
(g/cm^2). Die areas are quoted in mm^2; the /100 converts to cm^2. Device
counts may be fractional to attribute a share of host hardware (one GPU of an
eight-GPU server drags 1/8 of the CPUs along).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .energy import EnergyBreakdown, run_energy
from .errors import PlatformSpecError, UnknownDeviceError
from .trace import RunTrace

#: Grid carbon intensity default, gCO2eq per kWh.
DEFAULT_CI_G_PER_KWH = 518.0

#: Hardware service lifetime default: 5 years, in seconds.
DEFAULT_LIFETIME_S = 5 * 365 * 24 * 3600

DEFAULT_YIELD = 0.875
PACKAGING_G_PER_IC = 150.0
DRAM_G_PER_GB = 65.0

DEVICE_KINDS = ("gpu", "cpu", "dram")


@dataclass(frozen=True)
class FabParams:
    """Per-area fab footprint parameters for manufacturing-carbon estimation."""

    ci_fab: float  # gCO2eq/kWh of fab electricity
    epa: float     # kWh per cm^2 manufactured
    gpa: float     # gCO2eq per cm^2, process gases
    mpa: float     # gCO2eq per cm^2, materials
    yield_: float = DEFAULT_YIELD

    def __post_init__(self):
        if not 0 < self.yield_ <= 1:
            raise PlatformSpecError(f"yield_ must be in (0, 1], got {self.yield_}")
        for name in ("ci_fab", "epa", "gpa", "mpa"):
            if getattr(self, name) < 0:
                raise PlatformSpecError(f"{name} must be >= 0")

    @property
    def g_per_cm2(self) -> float:
        return self.ci_fab * self.epa + self.gpa + self.mpa


@dataclass(frozen=True)
class DeviceSpec:
    """One device class on a platform (a GPU model, the host CPU, DRAM)."""

    device_id: str
    kind: str  # "gpu" | "cpu" | "dram"
    count: float = 1.0
    tdp_w: float | None = None  # informational only
    die_area_mm2: float | None = None
    dies_per_package: int = 1
    memory_gb: float = 0.0
    n_ic: int = 0
    embodied_mode: str = "direct"  # "direct" | "act"
    total_g: float | None = None
    fab: FabParams | None = None

    def __post_init__(self):
        if self.kind not in DEVICE_KINDS:
            raise PlatformSpecError(f"device {self.device_id!r}: unknown kind {self.kind!r}")
        if not self.count > 0:
            raise PlatformSpecError(f"device {self.device_id!r}: count must be > 0")
        if self.dies_per_package < 1:
            raise PlatformSpecError(f"device {self.device_id!r}: dies_per_package must be >= 1")
        if self.n_ic < 0 or self.memory_gb < 0:
            raise PlatformSpecError(
                f"device {self.device_id!r}: n_ic and memory_gb must be >= 0")
        if self.embodied_mode == "direct":
            if self.total_g is None or self.total_g < 0:
                raise PlatformSpecError(
                    f"device {self.device_id!r}: direct mode needs total_g >= 0")
        elif self.embodied_mode == "act":
            if self.fab is None:
                raise PlatformSpecError(f"device {self.device_id!r}: act mode needs fab params")
            if self.die_area_mm2 is None or not self.die_area_mm2 > 0:
                raise PlatformSpecError(
                    f"device {self.device_id!r}: act mode needs die_area_mm2 > 0")
        else:
            raise PlatformSpecError(
                f"device {self.device_id!r}: unknown embodied_mode {self.embodied_mode!r}")


@dataclass(frozen=True)
class PlatformSpec:
    platform_id: str
    devices: tuple[DeviceSpec, ...]
    lifetime_s: float = float(DEFAULT_LIFETIME_S)

    def __post_init__(self):
        if not self.lifetime_s > 0:
            raise PlatformSpecError(f"lifetime_s must be > 0, got {self.lifetime_s}")
        ids = [d.device_id for d in self.devices]
        if len(ids) != len(set(ids)):
            raise PlatformSpecError(f"platform {self.platform_id!r} has duplicate device ids")

    def device(self, device_id: str) -> DeviceSpec:
        for d in self.devices:
            if d.device_id == device_id:
                return d
        raise UnknownDeviceError(f"device {device_id!r} not on platform {self.platform_id!r}")


@dataclass(frozen=True)
class CarbonTotals:
    """Whole-run carbon in gCO2eq, split into operational and embodied."""

    c_op_g: float
    c_em_g: float
    ci_used: float
    embodied_total_g: float
    c_total_g: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "c_total_g", self.c_op_g + self.c_em_g)


def manufacturing_carbon(dev: DeviceSpec) -> float:
    """Die manufacturing carbon in grams across all ``count`` units.

    Only meaningful for processed silicon (gpu/cpu) in act mode; direct-mode
    devices already state their total.
    """
    if dev.embodied_mode != "act":
        raise PlatformSpecError(
            f"device {dev.device_id!r}: manufacturing_carbon needs act mode")
    if dev.kind not in ("gpu", "cpu"):
        raise PlatformSpecError(
            f"device {dev.device_id!r}: manufacturing_carbon needs kind gpu or cpu")
    per_package = (dev.dies_per_package * dev.fab.g_per_cm2
                   * (dev.die_area_mm2 / 100.0) / dev.fab.yield_)
    return per_package * dev.count


def packaging_carbon(dev: DeviceSpec) -> float:
    """Packaging overhead: 150 g per integrated circuit."""
    return dev.n_ic * PACKAGING_G_PER_IC * dev.count


def dram_carbon(dev: DeviceSpec) -> float:
    """Memory embodied carbon: 65 g per GB of capacity."""
    return dev.memory_gb * DRAM_G_PER_GB * dev.count


def device_embodied(dev: DeviceSpec) -> float:
    """Lifetime embodied total in grams for all ``count`` units of a device."""
    if dev.embodied_mode == "direct":
        return dev.total_g * dev.count
    parts = packaging_carbon(dev) + dram_carbon(dev)
    if dev.kind in ("gpu", "cpu"):
        parts += manufacturing_carbon(dev)
    return parts


def platform_embodied_total(platform: PlatformSpec) -> float:
    """Lifetime embodied total in grams for the whole platform."""
    return sum(device_embodied(d) for d in platform.devices)


def amortized_embodied(platform: PlatformSpec, t: float) -> float:
    """Embodied carbon charged to ``t`` seconds of use of the platform."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return (t / platform.lifetime_s) * platform_embodied_total(platform)


def operational_carbon(e_op: float, ci: float) -> float:
    """Grid carbon for the energy drawn: E (kWh) times CI (g/kWh)."""
    if e_op < 0:
        raise ValueError(f"e_op must be >= 0, got {e_op}")
    if ci < 0:
        raise ValueError(f"ci must be >= 0, got {ci}")
    return e_op * ci


def total_carbon(trace: RunTrace,
                 platform: PlatformSpec,
                 ci: float = DEFAULT_CI_G_PER_KWH,
                 energy: EnergyBreakdown | None = None) -> CarbonTotals:
    """Operational plus amortized embodied carbon for one run.

    Embodied carbon is amortized over the run's wall window. Every metered
    device in the trace must exist on the platform; an unknown device id
    raises :class:`UnknownDeviceError` rather than silently dropping energy.
    """
    if energy is None:
        energy = run_energy(trace)
    platform_ids = {d.device_id for d in platform.devices}
    for dev in energy.per_device:
        if dev not in platform_ids:
            raise UnknownDeviceError(
                f"trace meters device {dev!r} absent from platform {platform.platform_id!r}")
    duration = trace.metadata.wall_end - trace.metadata.wall_start
    embodied_total = platform_embodied_total(platform)
    c_op = operational_carbon(energy.total_kwh, ci)
    c_em = (duration / platform.lifetime_s) * embodied_total
    return CarbonTotals(c_op_g=c_op, c_em_g=c_em, ci_used=ci,
                        embodied_total_g=embodied_total)


# ---------------------------------------------------------------------------
# Platform files
# ---------------------------------------------------------------------------


def _fab_from_dict(obj: dict) -> FabParams:
    if not isinstance(obj, dict):
        raise PlatformSpecError("fab must be an object")
    return FabParams(
        ci_fab=float(obj.get("ci_fab", 0.0)),
        epa=float(obj.get("epa", 0.0)),
        gpa=float(obj.get("gpa", 0.0)),
        mpa=float(obj.get("mpa", 0.0)),
        yield_=float(obj.get("yield_", obj.get("yield", DEFAULT_YIELD))),
    )


def _device_from_dict(obj: dict) -> DeviceSpec:
    if not isinstance(obj, dict):
        raise PlatformSpecError("device entry must be an object")
    try:
        device_id = str(obj["device_id"])
        kind = str(obj["kind"])
    except KeyError as exc:
        raise PlatformSpecError(f"device entry missing field {exc.args[0]!r}") from None
    total = obj.get("total_g")
    return DeviceSpec(
        device_id=device_id,
        kind=kind,
        count=float(obj.get("count", 1.0)),
        tdp_w=float(obj["tdp_w"]) if obj.get("tdp_w") is not None else None,
        die_area_mm2=float(obj["die_area_mm2"]) if obj.get("die_area_mm2") is not None else None,
        dies_per_package=int(obj.get("dies_per_package", 1)),
        memory_gb=float(obj.get("memory_gb", 0.0)),
        n_ic=int(obj.get("n_ic", 0)),
        embodied_mode=str(obj.get("embodied_mode", "direct")),
        total_g=float(total) if total is not None else None,
        fab=_fab_from_dict(obj["fab"]) if "fab" in obj else None,
    )


def platform_from_dict(obj: dict) -> PlatformSpec:
    if not isinstance(obj, dict):
        raise PlatformSpecError("platform file must contain a JSON object")
    try:
        platform_id = str(obj["platform_id"])
        devices_raw = obj["devices"]
    except KeyError as exc:
        raise PlatformSpecError(f"platform file missing field {exc.args[0]!r}") from None
    if not isinstance(devices_raw, list):
        raise PlatformSpecError("devices must be a list")
    devices = tuple(_device_from_dict(d) for d in devices_raw)
    lifetime = float(obj.get("lifetime_s", DEFAULT_LIFETIME_S))
    return PlatformSpec(platform_id=platform_id, devices=devices, lifetime_s=lifetime)


def load_platform(path: str | os.PathLike) -> PlatformSpec:
    """Read a platform description from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PlatformSpecError(f"{path}: malformed JSON: {exc.msg}") from exc
    try:
        return platform_from_dict(obj)
    except PlatformSpecError as exc:
        raise PlatformSpecError(f"{path}: {exc}") from None
