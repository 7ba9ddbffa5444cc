"""Strategy configuration tying a modulating wave, a carrier set and a topology."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .inverter import ChbTopology
from .synthesis import (
    DEFAULT_INJECTION,
    DEFAULT_SAMPLES_PER_PERIOD,
    CarrierSpec,
    CarrierVariant,
    FmtctParams,
    ModulatingSpec,
)


class Strategy(str, enum.Enum):
    SPWM1 = "SPWM1"  # level-shifted carriers, sine modulator
    SPWM2 = "SPWM2"  # phase-shifted carriers, sine modulator
    SPWM3 = "SPWM3"  # phase-shifted carriers, harmonic-injection modulator
    HIPWM_FMTCT = "HIPWM_FMTCT"  # truncated FM carrier, harmonic-injection modulator


_VARIANT = {
    Strategy.SPWM1: CarrierVariant.LEVEL_SHIFTED,
    Strategy.SPWM2: CarrierVariant.PHASE_SHIFTED,
    Strategy.SPWM3: CarrierVariant.PHASE_SHIFTED,
    Strategy.HIPWM_FMTCT: CarrierVariant.FMTCT,
}


@dataclass(frozen=True)
class ModulationConfig:
    strategy: Strategy
    modulating: ModulatingSpec
    carrier: CarrierSpec
    topology: ChbTopology = field(default_factory=ChbTopology)
    target_fundamental_rms: float | None = None
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.carrier.variant is not _VARIANT[self.strategy]:
            raise ValueError(
                f"{self.strategy.value} needs a {_VARIANT[self.strategy].value} carrier, "
                f"got {self.carrier.variant.value}"
            )
        if self.strategy in (Strategy.SPWM3, Strategy.HIPWM_FMTCT) and not self.modulating.injection:
            raise ValueError(f"{self.strategy.value} requires harmonic injection")
        if self.carrier.fundamental_hz != self.modulating.fundamental_hz:
            raise ValueError("carrier and modulating fundamentals differ")
        if self.carrier.cells != self.topology.cells_per_phase:
            raise ValueError("carrier cell count does not match the topology")
        if self.samples_per_period < 2 or self.samples_per_period % 2:
            raise ValueError("samples_per_period must be an even integer")

    @classmethod
    def for_strategy(
        cls,
        strategy: Strategy | str,
        *,
        fundamental_hz: float = 50.0,
        amplitude_index: float = 0.9,
        m_bar: int = 15,
        k_trunc: float = 0.5,
        injection: tuple[tuple[int, float], ...] | None = None,
        topology: ChbTopology | None = None,
        target_fundamental_rms: float | None = None,
        samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    ) -> ModulationConfig:
        """Paper-style defaults: M = 15, injection only for SPWM3 and HIPWM-FMTCt."""
        strategy = Strategy(strategy)
        topology = topology or ChbTopology()
        if injection is None:
            injection = DEFAULT_INJECTION if strategy in (Strategy.SPWM3, Strategy.HIPWM_FMTCT) else ()
        fmtct = None
        if strategy is Strategy.HIPWM_FMTCT:
            fmtct = FmtctParams(k_trunc=k_trunc, m_bar=m_bar, fundamental_hz=fundamental_hz)
        carrier = CarrierSpec(
            variant=_VARIANT[strategy],
            cells=topology.cells_per_phase,
            carrier_order=m_bar,
            fmtct=fmtct,
            fundamental_hz=fundamental_hz,
        )
        modulating = ModulatingSpec(fundamental_hz, amplitude_index, tuple(injection))
        return cls(strategy, modulating, carrier, topology, target_fundamental_rms, samples_per_period)

    @property
    def sample_rate_hz(self) -> float:
        return self.samples_per_period * self.modulating.fundamental_hz

    @property
    def amplitude_index(self) -> float:
        return self.modulating.amplitude_index

    @property
    def label(self) -> str:
        if self.strategy is Strategy.HIPWM_FMTCT:
            return f"HIPWM-FMTCt K={self.carrier.fmtct.k_trunc:g}"
        return self.strategy.value

    def with_amplitude(self, amplitude_index: float) -> ModulationConfig:
        return replace(self, modulating=replace(self.modulating, amplitude_index=amplitude_index))

    def with_topology(self, topology: ChbTopology) -> ModulationConfig:
        return replace(self, topology=topology, carrier=replace(self.carrier, cells=topology.cells_per_phase,
                                                                phase_offsets_deg=None))
