"""Frequencies of induction-motor acoustic lines.

Three generators, merged by :func:`predict`:

* geometric (spatial) families from slot and pole counts,
* switching sidebands ``a*f_sw +/- b*f`` (``a``, ``b`` of opposite parity)
  and their radial-force images one fundamental away,
* the temporal map of each significant electrical harmonic ``n*f`` onto
  ``(n - 1)*f`` and ``(n + 1)*f``.

Amplitudes are not modeled: ``amplitude_proxy`` is the parent electrical
bin's magnitude relative to the fundamental for temporal lines and 1.0
otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .spectral import HarmonicSpectrum

DEFAULT_THRESHOLD = 0.01
DEFAULT_K_MAX = 5
DEFAULT_SIDEBAND_ORDER = 4
# 5 reaches the 2*f_sw +/- 5f pair as well
PREDICT_SIDEBAND_ORDER = 5
MERGE_TOLERANCE_HZ = 1.0


class Mechanism(str, enum.Enum):
    ROTOR_SPATIAL = "RotorSpatial"
    STATOR_SPATIAL = "StatorSpatial"
    STATOR_ROTOR_INTERACTION = "StatorRotorInteraction"
    SWITCHING_SIDEBAND = "SwitchingSideband"
    TEMPORAL_MAP = "TemporalMap"


@dataclass(frozen=True)
class MotorGeometry:
    pole_pairs: int = 2
    stator_slots: int = 36
    rotor_slots: int = 26
    stator_phases: int = 3
    slip: float = 0.0

    def __post_init__(self) -> None:
        if self.pole_pairs < 1:
            raise ValueError("pole_pairs must be >= 1")
        if self.rotor_slots <= 0:
            raise ValueError("rotor_slots must be positive")
        if self.stator_phases < 3:
            raise ValueError("stator_phases must be >= 3")
        if not 0.0 <= self.slip < 1.0:
            raise ValueError("slip must lie in [0, 1)")

    @property
    def rotor_slot_ratio(self) -> float:
        """(s2 / p) * (1 - s)"""
        return self.rotor_slots / self.pole_pairs * (1.0 - self.slip)


@dataclass(frozen=True)
class AcousticLine:
    frequency_hz: float
    mechanism: Mechanism
    k_index: int = 0
    vibration_mode: int | None = None
    amplitude_proxy: float = 1.0
    source_hz: float | None = None  # electrical line the acoustic line derives from

    def __post_init__(self) -> None:
        if not (math.isfinite(self.frequency_hz) and self.frequency_hz >= 0):
            raise ValueError(f"invalid acoustic frequency {self.frequency_hz}")


@dataclass(frozen=True)
class MergedLine:
    frequency_hz: float
    sources: tuple[AcousticLine, ...]

    @property
    def mechanisms(self) -> frozenset[Mechanism]:
        return frozenset(s.mechanism for s in self.sources)

    @property
    def amplitude_proxy(self) -> float:
        return max(s.amplitude_proxy for s in self.sources)


@dataclass(frozen=True)
class AcousticPrediction:
    lines: tuple[MergedLine, ...] = field(default_factory=tuple)

    @property
    def frequencies_hz(self) -> list[float]:
        return [ln.frequency_hz for ln in self.lines]

    def contains(self, freq_hz: float, tol_hz: float = MERGE_TOLERANCE_HZ) -> bool:
        return any(abs(ln.frequency_hz - freq_hz) <= tol_hz for ln in self.lines)

    def by_mechanism(self, mechanism: Mechanism) -> list[float]:
        return [ln.frequency_hz for ln in self.lines if mechanism in ln.mechanisms]


def spatial_harmonics(geom: MotorGeometry, f: float, k_max: int = DEFAULT_K_MAX) -> list[AcousticLine]:
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    ratio = geom.rotor_slot_ratio
    lines = [AcousticLine(2.0 * f, Mechanism.STATOR_SPATIAL, 0, 4)]
    for k in range(1, k_max + 1):
        for sign in (1, -1):
            lines.append(AcousticLine(abs(2.0 * f * (1 + sign * k * ratio)), Mechanism.ROTOR_SPATIAL, k))
        for offset in (-2, 0, 2):
            lines.append(AcousticLine(abs(f * (k * ratio + offset)), Mechanism.STATOR_ROTOR_INTERACTION, k))
    return lines


def switching_sidebands(f_sw: float, f: float, order_max: int = DEFAULT_SIDEBAND_ORDER) -> list[AcousticLine]:
    """Sideband lines for ``a, b = 1..order_max`` with ``a + b`` odd.

    Each electrical sideband ``|a*f_sw +/- b*f|`` is emitted itself and through
    its radial-force images ``|+/-(a*f_sw +/- b*f) - f|``; every line is mode
    r = 0 and keeps the sideband as ``source_hz``. ``k_index`` encodes
    ``10*a + b``.
    """
    if not f_sw > f > 0:
        raise ValueError("need f_sw > f > 0")
    seen: set[tuple[float, float]] = set()
    lines = []
    for a in range(1, order_max + 1):
        for b in range(1, order_max + 1):
            if (a + b) % 2 == 0:
                continue
            for sb in (a * f_sw + b * f, abs(a * f_sw - b * f)):
                for fr in (sb, abs(sb - f), sb + f):
                    if (fr, sb) in seen:
                        continue
                    seen.add((fr, sb))
                    lines.append(AcousticLine(fr, Mechanism.SWITCHING_SIDEBAND, 10 * a + b, 0, 1.0, sb))
    return lines


def temporal_map(spec: HarmonicSpectrum, f: float | None = None, threshold: float = DEFAULT_THRESHOLD) -> list[AcousticLine]:
    """Harmonics n >= 2 above ``threshold`` of the fundamental -> lines at (n -/+ 1) f."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    f = spec.fundamental_hz if f is None else f
    rel = spec.relative()
    lines = []
    for n, r in zip(spec.orders, rel):
        if n < 2 or r <= threshold:
            continue
        for m in (n - 1, n + 1):
            lines.append(AcousticLine(m * f, Mechanism.TEMPORAL_MAP, int(n), None, float(r), n * f))
    return lines


def merge_lines(lines: list[AcousticLine], tol_hz: float = MERGE_TOLERANCE_HZ) -> AcousticPrediction:
    """Sort by frequency and fuse lines closer than ``tol_hz`` (tags are kept)."""
    merged: list[list[AcousticLine]] = []
    for ln in sorted(lines, key=lambda x: (x.frequency_hz, x.mechanism.value, x.k_index)):
        if merged and ln.frequency_hz - merged[-1][0].frequency_hz <= tol_hz:
            merged[-1].append(ln)
        else:
            merged.append([ln])
    return AcousticPrediction(tuple(MergedLine(g[0].frequency_hz, tuple(g)) for g in merged))


def predict(
    geom: MotorGeometry,
    spec: HarmonicSpectrum | None,
    f: float,
    f_sw: float | None = None,
    *,
    k_max: int = DEFAULT_K_MAX,
    order_max: int = PREDICT_SIDEBAND_ORDER,
    threshold: float = DEFAULT_THRESHOLD,
) -> AcousticPrediction:
    """Union of spatial, sideband and temporal lines.

    ``spec=None`` and ``f_sw=None`` model a sinusoidal supply: only the
    spatial families appear.
    """
    lines = spatial_harmonics(geom, f, k_max)
    if f_sw is not None:
        lines += switching_sidebands(f_sw, f, order_max)
    if spec is not None:
        lines += temporal_map(spec, f, threshold)
    return merge_lines(lines)
