"""Bin-exact harmonic analysis of synchronously sampled waveforms.

Magnitudes use the RMS convention: a sine of amplitude A reports A/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .synthesis import SampledWaveform

DEFAULT_N_MAX = 50


@dataclass(frozen=True, eq=False)
class HarmonicSpectrum:
    fundamental_hz: float
    orders: npt.NDArray[np.int64]
    magnitudes: npt.NDArray[np.float64]
    phases: npt.NDArray[np.float64]
    dc: float

    @property
    def n_max(self) -> int:
        return int(self.orders[-1])

    @property
    def fundamental(self) -> float:
        return float(self.magnitudes[0])

    @property
    def frequencies_hz(self) -> npt.NDArray[np.float64]:
        return self.orders * self.fundamental_hz

    def magnitude(self, order: int) -> float:
        return float(self.magnitudes[order - 1])

    def relative(self) -> npt.NDArray[np.float64]:
        """Magnitudes as a fraction of the fundamental."""
        return self.magnitudes / self.fundamental


@dataclass(frozen=True)
class ThdReport:
    thd_ratio: float
    n_max: int
    fundamental_rms: float

    @property
    def thd_pct(self) -> float:
        return 100.0 * self.thd_ratio


def nyquist_order(w: SampledWaveform) -> int:
    return w.samples_per_period // 2


def spectrum(w: SampledWaveform, n_max: int | None = None) -> HarmonicSpectrum:
    """Harmonics 1..n_max (default: Nyquist) from an exact DFT of ``w``."""
    if not isinstance(w, SampledWaveform):
        raise TypeError("spectrum() needs a SampledWaveform")
    nyq = nyquist_order(w)
    n_max = nyq if n_max is None else int(n_max)
    if not 1 <= n_max <= nyq:
        raise ValueError(f"n_max must lie in [1, {nyq}], got {n_max}")
    total = w.samples.size
    x = np.fft.rfft(w.samples)
    orders = np.arange(1, n_max + 1)
    bins = x[orders * w.n_periods]
    mags = np.abs(bins) * (np.sqrt(2.0) / total)
    if n_max == nyq:
        # the Nyquist bin is real and not mirrored
        mags[-1] = np.abs(bins[-1]) / total
    return HarmonicSpectrum(w.fundamental_hz, orders, mags, np.angle(bins), float(x[0].real / total))


def thd(spec: HarmonicSpectrum, n_max: int | None = DEFAULT_N_MAX) -> ThdReport:
    """sqrt(sum_{n=2}^{n_max} V_n^2) / V_1; ``n_max=None`` uses every bin."""
    n_max = spec.n_max if n_max is None else int(n_max)
    if n_max > spec.n_max:
        raise ValueError(f"spectrum only holds {spec.n_max} harmonics, asked for {n_max}")
    v1 = spec.fundamental
    if not v1 > 0:
        raise ZeroDivisionError("THD is undefined for a zero fundamental")
    harm = spec.magnitudes[1:n_max]
    return ThdReport(float(np.sqrt(np.sum(harm * harm)) / v1), n_max, v1)


def total_rms(w: SampledWaveform) -> float:
    x = w.samples
    return float(np.sqrt(np.mean(x * x)))


def waveform_thd(w: SampledWaveform, n_max: int | None = DEFAULT_N_MAX) -> ThdReport:
    return thd(spectrum(w, n_max), n_max)
