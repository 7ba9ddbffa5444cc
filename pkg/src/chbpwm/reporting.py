"""CSV / JSON export. Output is a pure function of its input (no timestamps)."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .acoustic import AcousticPrediction
from .spectral import HarmonicSpectrum


def fmt(value):
    """Stable text form for CSV cells."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return str(value)
        return f"{float(value):.10g}"
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.10g}") if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_json(path: Path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_waveform_csv(path: Path, time_s: np.ndarray, columns: dict[str, np.ndarray]) -> Path:
    """Plottable waveform file; floats are written with ``%.10g``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([time_s, *columns.values()])
    header = ",".join(["t_s", *columns])
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(header + "\r\n")
        np.savetxt(fh, data, fmt="%.10g", delimiter=",", newline="\r\n")
    return path


SPECTRUM_HEADER = ("order", "frequency_Hz", "phase_V_rms", "phase_pct", "phase_rad",
                   "line_V_rms", "line_pct", "line_rad")


def spectrum_rows(phase: HarmonicSpectrum, line: HarmonicSpectrum) -> list[list]:
    prel, lrel = 100 * phase.relative(), 100 * line.relative()
    return [
        [int(n), float(n * line.fundamental_hz), phase.magnitudes[i], prel[i], phase.phases[i],
         line.magnitudes[i], lrel[i], line.phases[i]]
        for i, n in enumerate(line.orders)
    ]


def spectrum_payload(phase: HarmonicSpectrum, line: HarmonicSpectrum) -> dict:
    return {
        "fundamental_hz": line.fundamental_hz,
        "dc_phase_V": phase.dc,
        "dc_line_V": line.dc,
        "columns": list(SPECTRUM_HEADER),
        "rows": spectrum_rows(phase, line),
    }


ACOUSTIC_HEADER = ("frequency_Hz", "mechanisms", "k_index", "vibration_mode", "amplitude_proxy_pct", "source_Hz")


def acoustic_rows(pred: AcousticPrediction) -> list[list]:
    rows = []
    for ln in pred.lines:
        src = ln.sources
        rows.append([
            ln.frequency_hz,
            ";".join(sorted(m.value for m in ln.mechanisms)),
            ";".join(str(s.k_index) for s in src),
            ";".join("" if s.vibration_mode is None else str(s.vibration_mode) for s in src),
            100 * ln.amplitude_proxy,
            ";".join("" if s.source_hz is None else fmt(s.source_hz) for s in src),
        ])
    return rows


def acoustic_payload(pred: AcousticPrediction) -> dict:
    return {
        "amplitude_note": "amplitude_proxy is a relative electrical-bin magnitude, not a sound level",
        "lines": [
            {
                "frequency_Hz": ln.frequency_hz,
                "mechanisms": sorted(m.value for m in ln.mechanisms),
                "amplitude_proxy": ln.amplitude_proxy,
                "sources": [
                    {"mechanism": s.mechanism.value, "k_index": s.k_index,
                     "vibration_mode": s.vibration_mode, "source_Hz": s.source_hz}
                    for s in ln.sources
                ],
            }
            for ln in pred.lines
        ],
    }
