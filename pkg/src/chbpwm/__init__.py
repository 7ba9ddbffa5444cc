"""Multilevel cascaded H-bridge PWM: synthesis, harmonic analysis, acoustic lines."""

from __future__ import annotations

from .acoustic import AcousticLine, AcousticPrediction, Mechanism, MotorGeometry, predict, spatial_harmonics, switching_sidebands, temporal_map
from .config import ModulationConfig, Strategy
from .inverter import ChbTopology, GateSchedule, apply_dead_time, build_gates, phase_and_line_voltages
from .pipeline import Synthesis, UnreachableTargetError, normalize_fundamental, synthesize
from .spectral import HarmonicSpectrum, ThdReport, spectrum, thd
from .synthesis import (
    CarrierSpec,
    CarrierVariant,
    FmtctParams,
    ModulatingSpec,
    SampledWaveform,
    lobe_times,
    make_fmtct_carrier,
    make_modulating,
    make_reference_carriers,
    solve_am,
)

__version__ = "0.1.0"

__all__ = [
    "AcousticLine", "AcousticPrediction", "CarrierSpec", "CarrierVariant", "ChbTopology", "FmtctParams",
    "GateSchedule", "HarmonicSpectrum", "Mechanism", "ModulatingSpec", "ModulationConfig", "MotorGeometry",
    "SampledWaveform", "Strategy", "Synthesis", "ThdReport", "UnreachableTargetError", "apply_dead_time",
    "build_gates", "lobe_times", "make_fmtct_carrier", "make_modulating", "make_reference_carriers",
    "normalize_fundamental", "phase_and_line_voltages", "predict", "solve_am", "spatial_harmonics",
    "spectrum", "switching_sidebands", "synthesize", "temporal_map", "thd",
]
