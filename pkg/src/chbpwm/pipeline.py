"""Synthesis -> inverter -> spectrum pipeline and fundamental-voltage normalization."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

from scipy.optimize import brentq

from .config import ModulationConfig
from .inverter import ChbTopology, GateSchedule, InverterVoltages, build_gates, phase_and_line_voltages
from .spectral import DEFAULT_N_MAX, HarmonicSpectrum, ThdReport, spectrum, thd, total_rms
from .synthesis import MAX_AMPLITUDE_INDEX

MIN_AMPLITUDE_INDEX = 1e-3
NORMALIZE_RTOL = 1e-3


class NormalizationError(ValueError):
    """The commanded fundamental RMS cannot be produced."""


class UnreachableTargetError(NormalizationError):
    def __init__(self, target: float, max_rms: float, label: str):
        super().__init__(
            f"{label}: target {target:.3f} V RMS exceeds the maximum achievable "
            f"{max_rms:.3f} V RMS at amplitude index {MAX_AMPLITUDE_INDEX}"
        )
        self.target = target
        self.max_rms = max_rms


class TargetInGapError(NormalizationError):
    """The fundamental jumps across the target as Ma varies (no Ma hits it)."""

    def __init__(self, target: float, below: float, above: float, amplitude_index: float, label: str):
        super().__init__(
            f"{label}: the fundamental jumps from {below:.3f} to {above:.3f} V RMS near "
            f"amplitude index {amplitude_index:.6f}; target {target:.3f} V RMS lies in the gap"
        )
        self.target = target
        self.below = below
        self.above = above


@dataclass(frozen=True, eq=False)
class Synthesis:
    config: ModulationConfig
    schedule: GateSchedule
    voltages: InverterVoltages

    def line_spectrum(self, n_max: int | None = None) -> HarmonicSpectrum:
        return spectrum(self.voltages.line[0], n_max)

    def phase_spectrum(self, n_max: int | None = None) -> HarmonicSpectrum:
        return spectrum(self.voltages.phase[0], n_max)

    def line_thd(self, n_max: int | None = DEFAULT_N_MAX) -> ThdReport:
        return thd(self.line_spectrum(n_max), n_max)

    def phase_thd(self, n_max: int | None = DEFAULT_N_MAX) -> ThdReport:
        return thd(self.phase_spectrum(n_max), n_max)

    @property
    def line_total_rms(self) -> float:
        return total_rms(self.voltages.line[0])

    @property
    def phase_total_rms(self) -> float:
        return total_rms(self.voltages.phase[0])


def synthesize(config: ModulationConfig, topology: ChbTopology | None = None) -> Synthesis:
    topology = topology or config.topology
    if topology is not config.topology:
        config = config.with_topology(topology)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        schedule = build_gates(config, topology)
    return Synthesis(config, schedule, phase_and_line_voltages(schedule, topology))


def fundamental_rms(config: ModulationConfig, voltage: str = "line") -> float:
    syn = synthesize(config)
    w = syn.voltages.line[0] if voltage == "line" else syn.voltages.phase[0]
    return spectrum(w, 1).fundamental


def normalize_fundamental(
    config: ModulationConfig,
    topology: ChbTopology | None = None,
    target_rms: float | None = None,
    voltage: str = "line",
) -> ModulationConfig:
    """Return ``config`` with the amplitude index that yields ``target_rms``.

    The fundamental RMS is found by re-synthesizing and bracketing on the
    amplitude index in ``(0, 1.2]``; the result is re-measured and must be
    within 0.1 % of the target. HIPWM-FMTCt fundamentals step where the
    held blocked-window state flips, so a target can fall in a gap.
    """
    if topology is not None and topology is not config.topology:
        config = config.with_topology(topology)
    target = config.target_fundamental_rms if target_rms is None else target_rms
    if target is None or not target > 0:
        raise ValueError(f"target fundamental RMS must be positive, got {target}")
    if voltage not in ("line", "phase"):
        raise ValueError("voltage must be 'line' or 'phase'")

    def excess(ma: float) -> float:
        return fundamental_rms(config.with_amplitude(ma), voltage) - target

    top = excess(MAX_AMPLITUDE_INDEX)
    if top < 0:
        raise UnreachableTargetError(target, top + target, config.label)
    if abs(top) <= NORMALIZE_RTOL * target / 4:
        return config.with_amplitude(MAX_AMPLITUDE_INDEX)
    bottom = excess(MIN_AMPLITUDE_INDEX)
    if bottom > 0:
        raise ValueError(f"target {target} V is below the smallest synthesizable fundamental")
    ma = brentq(excess, MIN_AMPLITUDE_INDEX, MAX_AMPLITUDE_INDEX, xtol=1e-7, rtol=1e-9)
    result = config.with_amplitude(ma)
    if abs(fundamental_rms(result, voltage) - target) > NORMALIZE_RTOL * target:
        below = excess(max(MIN_AMPLITUDE_INDEX, ma - 1e-6)) + target
        above = excess(min(MAX_AMPLITUDE_INDEX, ma + 1e-6)) + target
        raise TargetInGapError(target, below, above, ma, config.label)
    return result


def scale_dc_link(
    config: ModulationConfig,
    target_rms: float | None = None,
    voltage: str = "line",
) -> ModulationConfig:
    """Keep the amplitude index and rescale ``vdc_per_cell`` to hit ``target_rms``.

    Every voltage is linear in vdc, so one synthesis gives the exact factor.
    """
    target = config.target_fundamental_rms if target_rms is None else target_rms
    if target is None or not target > 0:
        raise ValueError(f"target fundamental RMS must be positive, got {target}")
    if voltage not in ("line", "phase"):
        raise ValueError("voltage must be 'line' or 'phase'")
    now = fundamental_rms(config, voltage)
    if not now > 0:
        raise NormalizationError(f"{config.label}: zero fundamental, cannot scale the DC link")
    topo = replace(config.topology, vdc_per_cell=config.topology.vdc_per_cell * target / now)
    return replace(config, topology=topo)


POLICIES = ("amplitude", "dc_link")


def normalize(config: ModulationConfig, target_rms: float, policy: str = "amplitude", voltage: str = "line") -> ModulationConfig:
    """Dispatch to :func:`normalize_fundamental` or :func:`scale_dc_link`."""
    if policy == "amplitude":
        return normalize_fundamental(config, target_rms=target_rms, voltage=voltage)
    if policy == "dc_link":
        return scale_dc_link(config, target_rms, voltage)
    raise ValueError(f"unknown normalization policy {policy!r}; use one of {POLICIES}")
