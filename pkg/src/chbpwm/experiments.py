"""Reproducible experiments: Table-1 check, K sweeps, strategy comparison."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .acoustic import (
    DEFAULT_K_MAX,
    DEFAULT_THRESHOLD,
    PREDICT_SIDEBAND_ORDER,
    AcousticPrediction,
    MotorGeometry,
    predict,
)
from .config import ModulationConfig, Strategy
from .inverter import ChbTopology, rising_edge_count
from .pipeline import Synthesis, normalize, synthesize
from .spectral import DEFAULT_N_MAX, HarmonicSpectrum
from .synthesis import DEFAULT_SAMPLES_PER_PERIOD, FmtctParams, lobe_times, solve_am, solve_am_quadrature

QUADRATURE_FLAG_RTOL = 1e-6

# Measured laboratory values, echoed verbatim for reference only.
MEASURED_REFERENCE = (
    ("Power supply", 49.6, 0.0, None),
    ("SPWM1", 59.4, 15.0, 187),
    ("SPWM2", 55.7, 4.5, 190),
    ("SPWM3", 53.5, 5.7, 226),
    ("HIPWM-FMTCt K=0.3", 56.3, 8.5, 220),
    ("HIPWM-FMTCt K=0.4", 54.9, 7.0, 223),
    ("HIPWM-FMTCt K=0.45", 53.8, 4.0, 226),
    ("HIPWM-FMTCt K=0.5", 52.9, 4.2, 231),
    ("HIPWM-FMTCt K=0.55", 52.3, 4.5, 229),
    ("HIPWM-FMTCt K=0.6", 52.3, 5.0, 228),
    ("HIPWM-FMTCt K=0.65", 52.1, 5.2, 230),
    ("HIPWM-FMTCt K=0.7", 52.0, 5.5, 230),
    ("HIPWM-FMTCt K=0.75", 52.7, 6.8, 231),
    ("HIPWM-FMTCt K=0.8", 53.0, 7.4, 231),
)
MEASURED_REFERENCE_HEADER = ("strategy", "noise_dBA", "thd_voltage_pct", "v_rms_V_dclink_75V")
MEASURED_REFERENCE_LABEL = "paper-measured, not simulated"


# --------------------------------------------------------------------------
# Table 1


def table1(m_bar: int = 15, k_list=(0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8), fundamental_hz: float = 50.0) -> list[dict]:
    rows = []
    for k in k_list:
        k = float(k)
        a_m = solve_am(k, m_bar)
        a_q = solve_am_quadrature(k, m_bar)
        rel = abs(a_m - a_q) / a_q
        t1 = math.acos(math.sqrt(k)) / (2 * math.pi * fundamental_hz)
        rows.append({
            "K": k,
            "m_bar": m_bar,
            "A_M": a_m,
            "A_M_quadrature": a_q,
            "A_M_rel_diff": rel,
            "t1_ms": 1e3 * t1,
            "A_M_1_minus_K": a_m * (1 - k),
            "disagreement": rel > QUADRATURE_FLAG_RTOL,
        })
    return rows


# --------------------------------------------------------------------------
# Single-configuration summary


def pulses_per_period(syn: Synthesis) -> int:
    """Rising edges per period of every leg's upper gate, if they all agree, else -1."""
    g = syn.schedule.gates[:, :, ::2]  # A_upper, B_upper
    counts = np.unique(rising_edge_count(g))
    return int(counts[0]) if counts.size == 1 else -1


def distinct_levels(samples: np.ndarray, vdc: float) -> int:
    return int(np.unique(np.round(samples / vdc, 9)).size)


def summarize(syn: Synthesis, n_max: int = DEFAULT_N_MAX) -> dict:
    cfg = syn.config
    line, phase = syn.voltages.line[0], syn.voltages.phase[0]
    vdc = cfg.topology.vdc_per_cell
    line_thd, phase_thd = syn.line_thd(n_max), syn.phase_thd(n_max)
    out = {
        "strategy": cfg.strategy.value,
        "label": cfg.label,
        "amplitude_index": cfg.amplitude_index,
        "fundamental_hz": cfg.modulating.fundamental_hz,
        "cells_per_phase": cfg.topology.cells_per_phase,
        "vdc_per_cell_V": vdc,
        "dead_time_s": cfg.topology.dead_time_s,
        "samples_per_period": cfg.samples_per_period,
        "n_max": n_max,
        "thd_line_pct": line_thd.thd_pct,
        "thd_phase_pct": phase_thd.thd_pct,
        "thd_line_nyquist_pct": syn.line_thd(None).thd_pct,
        "thd_phase_nyquist_pct": syn.phase_thd(None).thd_pct,
        "fundamental_rms_line_V": line_thd.fundamental_rms,
        "fundamental_rms_phase_V": phase_thd.fundamental_rms,
        "total_rms_line_V": syn.line_total_rms,
        "total_rms_phase_V": syn.phase_total_rms,
        "levels_line": distinct_levels(line.samples, vdc),
        "levels_phase": distinct_levels(phase.samples, vdc),
        "pulse_count": pulses_per_period(syn),
    }
    if cfg.strategy is Strategy.HIPWM_FMTCT:
        p = cfg.carrier.fmtct
        out.update(K=p.k_trunc, m_bar=p.m_bar, A_M=p.a_m, t1_ms=1e3 * lobe_times(p)[0])
    return out


def run_config(
    config: ModulationConfig,
    n_max: int = DEFAULT_N_MAX,
    voltage: str = "line",
    policy: str = "amplitude",
) -> tuple[Synthesis, dict]:
    """Normalize (if the config carries a target), synthesize and summarize."""
    if config.target_fundamental_rms is not None:
        config = normalize(config, config.target_fundamental_rms, policy, voltage)
    syn = synthesize(config)
    out = summarize(syn, n_max)
    out["normalization"] = policy if config.target_fundamental_rms is not None else "none"
    return syn, out


# --------------------------------------------------------------------------
# K sweep


@dataclass
class SweepReport:
    rows: list[dict]
    metadata: dict = field(default_factory=dict)

    COLUMNS = (
        ("K", "K"),
        ("A_M", "A_M"),
        ("t1_ms", "t1_ms"),
        ("amplitude_index", "amplitude_index"),
        ("vdc_per_cell_V", "vdc_per_cell_V"),
        ("thd_line_pct", "thd_line_n50_pct"),
        ("thd_phase_pct", "thd_phase_n50_pct"),
        ("fundamental_rms_line_V", "fundamental_rms_line_V"),
        ("total_rms_line_V", "total_rms_line_V"),
        ("fundamental_rms_phase_V", "fundamental_rms_phase_V"),
        ("total_rms_phase_V", "total_rms_phase_V"),
        ("pulse_count", "pulse_count"),
        ("status", "status"),
    )

    def table(self) -> tuple[list[str], list[list]]:
        header = [h for _, h in self.COLUMNS]
        if self.rows and self.rows[0].get("n_max", DEFAULT_N_MAX) != DEFAULT_N_MAX:
            n = self.rows[0]["n_max"]
            header = [h.replace("_n50_", f"_n{n}_") for h in header]
        return header, [[row.get(k) for k, _ in self.COLUMNS] for row in self.rows]

    def argmin_k(self) -> float | None:
        ok = [r for r in self.rows if r["status"] == "ok"]
        return min(ok, key=lambda r: r["thd_line_pct"])["K"] if ok else None


def _sweep_row(args) -> dict:
    k, m_bar, topology, target_rms, n_max, spp, fundamental_hz, policy, ma = args
    base = {"K": k, "A_M": solve_am(k, m_bar), "t1_ms": 1e3 * lobe_times(FmtctParams(k, m_bar, fundamental_hz))[0]}
    cfg = ModulationConfig.for_strategy(
        Strategy.HIPWM_FMTCT, k_trunc=k, m_bar=m_bar, topology=topology, amplitude_index=ma,
        target_fundamental_rms=target_rms, samples_per_period=spp, fundamental_hz=fundamental_hz,
    )
    try:
        _, summary = run_config(cfg, n_max, policy=policy)
    except (ValueError, RuntimeError) as exc:
        return {**base, "status": f"error: {exc}"}
    return {**summary, **base, "status": "ok"}


def sweep_k(
    k_list,
    m_bar: int = 15,
    topology: ChbTopology | None = None,
    target_rms: float | None = 220.0,
    *,
    n_max: int = DEFAULT_N_MAX,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    fundamental_hz: float = 50.0,
    policy: str = "amplitude",
    amplitude_index: float = 0.9,
    jobs: int = 1,
) -> SweepReport:
    """HIPWM-FMTCt pipeline per K at fixed fundamental RMS; failed rows keep an error status.

    ``policy="amplitude"`` searches Ma at the given vdc; ``"dc_link"`` keeps
    ``amplitude_index`` and rescales vdc (the amplitude search ignores it).
    """
    topology = topology or ChbTopology()
    args = [
        (float(k), m_bar, topology, target_rms, n_max, samples_per_period, fundamental_hz, policy, amplitude_index)
        for k in k_list
    ]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, args))
    else:
        rows = [_sweep_row(a) for a in args]
    meta = {
        "cells_per_phase": topology.cells_per_phase,
        "vdc_per_cell_V": topology.vdc_per_cell,
        "dead_time_s": topology.dead_time_s,
        "samples_per_period": samples_per_period,
        "target_fundamental_rms_V": target_rms,
        "normalization": policy if target_rms is not None else "none",
        "m_bar": m_bar,
        "n_max": n_max,
    }
    return SweepReport(rows, meta)


# --------------------------------------------------------------------------
# Strategy comparison


@dataclass
class ComparisonEntry:
    config: ModulationConfig
    summary: dict | None = None
    line_spectrum: HarmonicSpectrum | None = None
    phase_spectrum: HarmonicSpectrum | None = None
    prediction: AcousticPrediction | None = None
    error: str | None = None

    @property
    def label(self) -> str:
        return self.config.label


def compare(
    configs: list[ModulationConfig],
    target_rms: float | None = 220.0,
    *,
    geometry: MotorGeometry | None = None,
    n_max: int = DEFAULT_N_MAX,
    export_orders: int = 200,
    k_max: int = DEFAULT_K_MAX,
    sideband_order: int = PREDICT_SIDEBAND_ORDER,
    threshold: float = DEFAULT_THRESHOLD,
    policy: str = "amplitude",
) -> list[ComparisonEntry]:
    geometry = geometry or MotorGeometry()
    entries = []
    for cfg in configs:
        if target_rms is not None:
            cfg = replace(cfg, target_fundamental_rms=target_rms)
        entry = ComparisonEntry(cfg)
        try:
            syn, summary = run_config(cfg, n_max, policy=policy)
        except (ValueError, RuntimeError) as exc:
            entry.error = str(exc)
            entries.append(entry)
            continue
        entry.config = syn.config
        entry.summary = summary
        orders = min(export_orders, syn.config.samples_per_period // 2)
        entry.line_spectrum = syn.line_spectrum(orders)
        entry.phase_spectrum = syn.phase_spectrum(orders)
        f = syn.config.modulating.fundamental_hz
        entry.prediction = predict(
            geometry, syn.line_spectrum(n_max), f, syn.config.carrier.switching_hz,
            k_max=k_max, order_max=sideband_order, threshold=threshold,
        )
        entries.append(entry)
    return entries
