"""Modulating waves and carrier families.

Every waveform here is synchronously sampled: the number of samples per
fundamental period is an exact even integer, so one period can be split
into two exact halves and DFT bins fall on integer harmonics.

Triangle convention (shared by all carriers): ``tri(theta)`` is -1 at
``theta = 0`` and rising, +1 at ``theta = pi``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt

DEFAULT_SAMPLES_PER_PERIOD = 3 * 2**17
DEFAULT_INJECTION: tuple[tuple[int, float], ...] = ((3, 1.0 / 6.0),)
MAX_AMPLITUDE_INDEX = 1.2


class SynchronousSamplingError(ValueError):
    """Sample rate is not an integer multiple of the fundamental."""


class IntegrationAccuracyError(RuntimeError):
    """Accumulated carrier phase drifted from 2*pi*m_bar per period."""


@dataclass(frozen=True, eq=False)
class SampledWaveform:
    sample_rate_hz: float
    samples: npt.NDArray[np.float64]
    fundamental_hz: float

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        spp = samples_per_period(self.sample_rate_hz, self.fundamental_hz)
        if arr.size == 0 or arr.size % spp:
            raise SynchronousSamplingError(
                f"{arr.size} samples is not a whole number of {spp}-sample periods"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def samples_per_period(self) -> int:
        return samples_per_period(self.sample_rate_hz, self.fundamental_hz)

    @property
    def n_periods(self) -> int:
        return self.samples.size // self.samples_per_period

    @property
    def time(self) -> npt.NDArray[np.float64]:
        return np.arange(self.samples.size) / self.sample_rate_hz

    def with_samples(self, samples: npt.ArrayLike) -> SampledWaveform:
        return SampledWaveform(self.sample_rate_hz, np.asarray(samples), self.fundamental_hz)

    def __mul__(self, scale: float) -> SampledWaveform:
        return self.with_samples(self.samples * scale)

    __rmul__ = __mul__

    def __neg__(self) -> SampledWaveform:
        return self.with_samples(-self.samples)


def samples_per_period(rate_hz: float, fundamental_hz: float) -> int:
    """Return ``rate/fundamental`` as an int, rejecting non-integer ratios."""
    if fundamental_hz <= 0 or rate_hz <= 0:
        raise ValueError("rate and fundamental must be positive")
    ratio = rate_hz / fundamental_hz
    n = round(ratio)
    if n < 2 or abs(ratio - n) > 1e-9 * ratio:
        raise SynchronousSamplingError(
            f"rate {rate_hz} Hz is not an integer multiple of {fundamental_hz} Hz"
        )
    return n


def _even_samples_per_period(rate_hz: float, fundamental_hz: float) -> int:
    n = samples_per_period(rate_hz, fundamental_hz)
    if n % 2:
        raise SynchronousSamplingError(f"samples per period must be even, got {n}")
    return n


def _antisymmetric(first_half: np.ndarray) -> np.ndarray:
    # w(t + T/2) = -w(t) holds bit-exactly when the second half is a negated copy.
    return np.concatenate([first_half, -first_half])


def triangle(theta: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Unit triangle of phase ``theta``: -1 at 0 (rising), +1 at pi."""
    u = np.mod(np.asarray(theta, dtype=np.float64) / np.pi, 2.0)
    return 1.0 - 2.0 * np.abs(u - 1.0)


# --------------------------------------------------------------------------
# Modulating wave


@dataclass(frozen=True)
class ModulatingSpec:
    fundamental_hz: float = 50.0
    amplitude_index: float = 1.0
    injection: tuple[tuple[int, float], ...] = DEFAULT_INJECTION
    phase_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.fundamental_hz <= 0:
            raise ValueError("fundamental_hz must be positive")
        if not 0 < self.amplitude_index <= MAX_AMPLITUDE_INDEX:
            raise ValueError(
                f"amplitude_index must lie in (0, {MAX_AMPLITUDE_INDEX}], got {self.amplitude_index}"
            )
        inj = tuple((int(h), float(c)) for h, c in self.injection)
        for h, _ in inj:
            if h < 3 or h % 2 == 0:
                raise ValueError(f"injection orders must be odd and >= 3, got {h}")
        object.__setattr__(self, "injection", inj)


def make_modulating(
    spec: ModulatingSpec, n_periods: int = 1, rate: float | None = None
) -> SampledWaveform:
    """Sample ``Ma * [sin(x) + sum c_h sin(h x)]`` with ``x = wt + phase``.

    ``rate`` defaults to :data:`DEFAULT_SAMPLES_PER_PERIOD` samples per period.
    A peak above 1 (overmodulation) is allowed but warned about.
    """
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    if rate is None:
        rate = DEFAULT_SAMPLES_PER_PERIOD * spec.fundamental_hz
    n = _even_samples_per_period(rate, spec.fundamental_hz)
    x = 2.0 * np.pi * np.arange(n // 2) / n + math.radians(spec.phase_deg)
    half = np.sin(x)
    for h, c in spec.injection:
        half = half + c * np.sin(h * x)
    one_period = spec.amplitude_index * _antisymmetric(half)
    peak = np.max(np.abs(one_period))
    if peak > 1.0 + 1e-12:
        warnings.warn(f"modulating wave overmodulates (peak {peak:.4f} > 1)", stacklevel=2)
    return SampledWaveform(rate, np.tile(one_period, n_periods), spec.fundamental_hz)


# --------------------------------------------------------------------------
# Truncated frequency-modulated triangular carrier


def _lobe_area(k_trunc: float) -> float:
    # (1/pi) * integral over one period of max(0, cos^2 x - K) dx, in units
    # where mean order = a_m * lobe_area / pi.
    x1 = math.acos(math.sqrt(k_trunc))
    return x1 + math.sin(2.0 * x1) / 2.0 - 2.0 * k_trunc * x1


def solve_am(k_trunc: float, m_bar: int) -> float:
    """Scale factor A_M that makes the mean carrier order equal ``m_bar``.

    Closed form ``A_M = pi * m_bar / L(K)`` where, with ``x1 = acos(sqrt(K))``,
    ``L(K) = x1 + sin(2 x1)/2 - 2 K x1``.
    """
    if not 0.0 <= k_trunc < 1.0:
        raise ValueError(f"K must lie in [0, 1), got {k_trunc}")
    if m_bar < 1:
        raise ValueError(f"m_bar must be >= 1, got {m_bar}")
    return math.pi * m_bar / _lobe_area(k_trunc)


def solve_am_quadrature(k_trunc: float, m_bar: int) -> float:
    """A_M by adaptive quadrature of the clamped order law (cross-check path)."""
    from scipy.integrate import quad

    if not 0.0 <= k_trunc < 1.0:
        raise ValueError(f"K must lie in [0, 1), got {k_trunc}")
    x1 = math.acos(math.sqrt(k_trunc))
    edges = [0.0, x1, math.pi - x1, math.pi + x1, 2 * math.pi - x1, 2 * math.pi]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            val, _ = quad(lambda x: max(0.0, math.cos(x) ** 2 - k_trunc), lo, hi,
                          epsabs=1e-15, epsrel=1e-13, limit=200)
            total += val
    return m_bar / (total / (2 * math.pi))


@dataclass(frozen=True)
class FmtctParams:
    """Truncated cos^2 carrier law: order M(t) = max(0, A_M [cos^2(w_m t) - K])."""

    k_trunc: float = 0.5
    m_bar: int = 15
    fundamental_hz: float = 50.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.k_trunc < 1.0:
            raise ValueError(f"k_trunc must lie in [0, 1), got {self.k_trunc}")
        if self.m_bar < 3 or self.m_bar % 3 or self.m_bar % 2 == 0:
            raise ValueError(f"m_bar must be an odd multiple of 3, got {self.m_bar}")
        if self.fundamental_hz <= 0:
            raise ValueError("fundamental_hz must be positive")

    @property
    def omega_m(self) -> float:
        return 2.0 * math.pi * self.fundamental_hz

    @property
    def a_m(self) -> float:
        return solve_am(self.k_trunc, self.m_bar)

    @property
    def period_s(self) -> float:
        return 1.0 / self.fundamental_hz

    @property
    def peak_order(self) -> float:
        return self.a_m * (1.0 - self.k_trunc)


def lobe_times(params: FmtctParams) -> tuple[float, float, float, float]:
    """Edges (t1, t2, t3, t4) of the two switching-blocked windows, seconds."""
    t1 = math.acos(math.sqrt(params.k_trunc)) / params.omega_m
    half = params.period_s / 2.0
    return t1, half - t1, half + t1, params.period_s - t1


def instantaneous_order(params: FmtctParams, t: npt.ArrayLike) -> npt.NDArray[np.float64]:
    t = np.asarray(t, dtype=np.float64)
    c = np.cos(params.omega_m * t)
    return np.maximum(0.0, params.a_m * (c * c - params.k_trunc))


def blocked_sample_mask(params: FmtctParams, n: int) -> npt.NDArray[np.bool_]:
    """Samples of one ``n``-sample period lying strictly inside a blocked window."""
    t1, t2, t3, t4 = lobe_times(params)
    t = np.arange(n) / (n * params.fundamental_hz)
    return ((t > t1) & (t < t2)) | ((t > t3) & (t < t4))


@lru_cache(maxsize=64)
def _fmtct_phase(params: FmtctParams, n: int) -> np.ndarray:
    """Trapezoidal carrier phase on the first half period (n/2 + 1 points)."""
    dt_w = 2.0 * np.pi / n  # omega_m * dt
    t = np.arange(n // 2 + 1) / (n * params.fundamental_hz)
    order = instantaneous_order(params, t)
    theta = np.concatenate([[0.0], np.cumsum(0.5 * (order[1:] + order[:-1]) * dt_w)])
    expected = np.pi * params.m_bar
    if abs(theta[-1] - expected) > params.peak_order * dt_w:
        raise IntegrationAccuracyError(
            f"half-period phase {theta[-1]:.9f} rad deviates from {expected:.9f} rad"
        )
    theta.flags.writeable = False
    return theta


def make_fmtct_carrier(
    params: FmtctParams,
    rate: float | None = None,
    n_periods: int = 1,
    phase_offset_deg: float = 0.0,
) -> SampledWaveform:
    """Frequency-modulated triangle whose phase integrates the clamped order law.

    Where the order is zero the phase stops, so the carrier holds its last
    value. The first half period is built explicitly; the second half is its
    negation (m_bar is odd, so the carrier is half-wave antisymmetric).
    """
    if rate is None:
        rate = DEFAULT_SAMPLES_PER_PERIOD * params.fundamental_hz
    n = _even_samples_per_period(rate, params.fundamental_hz)
    theta = _fmtct_phase(params, n)[:-1]
    half = triangle(theta + math.radians(phase_offset_deg))
    return SampledWaveform(rate, np.tile(_antisymmetric(half), n_periods), params.fundamental_hz)


# --------------------------------------------------------------------------
# Carrier sets


class CarrierVariant(str, enum.Enum):
    FIXED_TRIANGLE = "FixedTriangle"
    LEVEL_SHIFTED = "LevelShiftedSet"
    PHASE_SHIFTED = "PhaseShiftedSet"
    FMTCT = "FmtctTruncated"


@dataclass(frozen=True)
class CarrierSpec:
    variant: CarrierVariant = CarrierVariant.PHASE_SHIFTED
    cells: int = 2
    carrier_order: int = 15
    fmtct: FmtctParams | None = None
    phase_offsets_deg: tuple[float, ...] | None = None
    fundamental_hz: float = 50.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", CarrierVariant(self.variant))
        if self.cells < 1:
            raise ValueError("cells must be >= 1")
        if self.variant is CarrierVariant.FMTCT:
            if self.fmtct is None:
                object.__setattr__(self, "fmtct", FmtctParams(fundamental_hz=self.fundamental_hz))
            object.__setattr__(self, "fundamental_hz", self.fmtct.fundamental_hz)
        if self.phase_offsets_deg is None:
            step = 180.0 / self.cells
            # FM carriers freeze where the order law is zero; centring the
            # offsets on 0 keeps every frozen value strictly inside (-1, 1).
            centre = step * (self.cells - 1) / 2 if self.variant is CarrierVariant.FMTCT else 0.0
            offsets = tuple(step * c - centre for c in range(self.cells))
            object.__setattr__(self, "phase_offsets_deg", offsets)
        else:
            object.__setattr__(self, "phase_offsets_deg", tuple(float(o) for o in self.phase_offsets_deg))
            if len(self.phase_offsets_deg) != self.cells:
                raise ValueError("need one phase offset per cell")

    @property
    def switching_hz(self) -> float:
        """Nominal (average) carrier frequency."""
        if self.variant is CarrierVariant.FMTCT:
            return self.fmtct.m_bar * self.fmtct.fundamental_hz
        return self.carrier_order * self.fundamental_hz

    @property
    def pulses_per_period(self) -> int:
        return self.fmtct.m_bar if self.variant is CarrierVariant.FMTCT else self.carrier_order


def make_fixed_triangle(
    order: int, fundamental_hz: float, rate: float, n_periods: int = 1, phase_offset_deg: float = 0.0
) -> SampledWaveform:
    n = _even_samples_per_period(rate, fundamental_hz)
    theta = 2.0 * np.pi * order * np.arange(n // 2) / n + math.radians(phase_offset_deg)
    one = triangle(theta)
    if order % 2:
        one = _antisymmetric(one)
    else:
        one = np.concatenate([one, one])
    return SampledWaveform(rate, np.tile(one, n_periods), fundamental_hz)


def make_reference_carriers(
    spec: CarrierSpec, rate: float | None = None, n_periods: int = 1
) -> list[SampledWaveform]:
    """Build the carrier list for ``spec``.

    * FixedTriangle: one triangle at ``carrier_order * f``.
    * LevelShiftedSet: ``2*cells`` in-phase triangles stacked in contiguous
      bands of height ``1/cells`` from -1 (index 0) up to +1.
    * PhaseShiftedSet: ``cells`` full-range triangles at ``phase_offsets_deg``.
    * FmtctTruncated: one FM carrier per cell with the offset added to its phase.
    """
    if rate is None:
        rate = DEFAULT_SAMPLES_PER_PERIOD * spec.fundamental_hz
    v = spec.variant
    if v is CarrierVariant.FMTCT:
        return [make_fmtct_carrier(spec.fmtct, rate, n_periods, off) for off in spec.phase_offsets_deg]

    order = spec.carrier_order
    if order % 2 == 0 or order % 3:
        warnings.warn(
            f"carrier order {order} is not an odd multiple of 3; expect even or triplen harmonics",
            stacklevel=2,
        )
    if v is CarrierVariant.FIXED_TRIANGLE:
        return [make_fixed_triangle(order, spec.fundamental_hz, rate, n_periods)]
    if v is CarrierVariant.PHASE_SHIFTED:
        return [
            make_fixed_triangle(order, spec.fundamental_hz, rate, n_periods, off)
            for off in spec.phase_offsets_deg
        ]
    base = make_fixed_triangle(order, spec.fundamental_hz, rate, n_periods).samples
    height = 1.0 / spec.cells
    return [
        SampledWaveform(rate, -1.0 + height * (j + 0.5 * (base + 1.0)), spec.fundamental_hz)
        for j in range(2 * spec.cells)
    ]


def level_bands(cells: int) -> list[tuple[float, float]]:
    height = 1.0 / cells
    return [(-1.0 + j * height, -1.0 + (j + 1) * height) for j in range(2 * cells)]
