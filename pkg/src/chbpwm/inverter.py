"""Gate-pulse generation and voltage synthesis for a three-phase cascaded H-bridge.

Gate arrays are indexed ``[phase, cell, switch, sample]`` with the switch
axis ordered ``(A_upper, A_lower, B_upper, B_lower)``.  Leg A of every cell
compares the modulating wave with the cell's carrier; leg B compares the
180-degree shifted (negated) modulating wave with it.  Phase ``p`` is the
phase-0 pattern delayed by ``p*T/3`` (modulator and carrier together).

When both switches of a leg are off (dead time) the leg voltage is set by
the freewheeling diode, i.e. by the sign of the phase current. The current
is taken to be in phase with the phase's modulating reference.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from .synthesis import (
    CarrierVariant,
    SampledWaveform,
    blocked_sample_mask,
    make_modulating,
    make_reference_carriers,
)

if TYPE_CHECKING:
    from .config import ModulationConfig

A_UPPER, A_LOWER, B_UPPER, B_LOWER = range(4)
PHASES = 3


class GridMismatchError(ValueError):
    """Two waveforms were compared on different time grids."""


class ShootThroughError(RuntimeError):
    """Both switches of one leg are on at the same instant."""


@dataclass(frozen=True)
class ChbTopology:
    cells_per_phase: int = 2
    vdc_per_cell: float = 75.0
    dead_time_s: float = 0.0
    phases: int = PHASES

    def __post_init__(self) -> None:
        if self.cells_per_phase < 1:
            raise ValueError("cells_per_phase must be >= 1")
        if self.vdc_per_cell <= 0:
            raise ValueError("vdc_per_cell must be positive")
        if self.dead_time_s < 0:
            raise ValueError("dead_time_s must be >= 0")
        if self.phases != PHASES:
            raise ValueError("only three-phase topologies are supported")

    @property
    def phase_levels(self) -> int:
        return 2 * self.cells_per_phase + 1


@dataclass(frozen=True, eq=False)
class GateSchedule:
    gates: npt.NDArray[np.bool_]
    sample_rate_hz: float
    fundamental_hz: float
    current_sign: npt.NDArray[np.int8] | None = None  # [phase, sample], +1 or -1

    def __post_init__(self) -> None:
        g = np.asarray(self.gates, dtype=bool)
        if g.ndim != 4 or g.shape[0] != PHASES or g.shape[2] != 4:
            raise ValueError(f"gate array must have shape (3, cells, 4, n), got {g.shape}")
        g.flags.writeable = False
        object.__setattr__(self, "gates", g)
        if self.current_sign is not None:
            sgn = np.asarray(self.current_sign, dtype=np.int8)
            if sgn.shape != (PHASES, g.shape[3]) or not np.all(np.abs(sgn) == 1):
                raise ValueError("current_sign must be +/-1 with shape (3, n)")
            sgn.flags.writeable = False
            object.__setattr__(self, "current_sign", sgn)

    @property
    def cells(self) -> int:
        return self.gates.shape[1]

    @property
    def n_samples(self) -> int:
        return self.gates.shape[3]

    def leg(self, phase: int, cell: int, leg: str) -> tuple[np.ndarray, np.ndarray]:
        """``(upper, lower)`` trains of leg ``"A"`` or ``"B"``."""
        i = {"A": A_UPPER, "B": B_UPPER}[leg]
        return self.gates[phase, cell, i], self.gates[phase, cell, i + 1]


def compare_gate(modulating: SampledWaveform, carrier: SampledWaveform) -> npt.NDArray[np.bool_]:
    """True where ``modulating >= carrier`` (ties count as on)."""
    if (
        modulating.samples.shape != carrier.samples.shape
        or not math.isclose(modulating.sample_rate_hz, carrier.sample_rate_hz, rel_tol=1e-12)
        or not math.isclose(modulating.fundamental_hz, carrier.fundamental_hz, rel_tol=1e-12)
    ):
        raise GridMismatchError("modulating and carrier waves must share one time grid")
    return modulating.samples >= carrier.samples


def _compare_antisymmetric(modulating: SampledWaveform, carrier: SampledWaveform) -> npt.NDArray[np.bool_]:
    # Ties go to "on" in the first half period and "off" in the second, so a
    # half-wave antisymmetric pair yields exactly complementary halves even
    # where both waves are zero. (Level-shifted sets map leg A's second half
    # onto leg B's first half instead and keep the plain rule.)
    gate = compare_gate(modulating, carrier)
    half = gate.size // 2
    gate[half:] = modulating.samples[half:] > carrier.samples[half:]
    return gate


def check_shoot_through(gates: npt.ArrayLike) -> None:
    g = np.asarray(gates, dtype=bool)
    for upper, lower in ((A_UPPER, A_LOWER), (B_UPPER, B_LOWER)):
        both = g[..., upper, :] & g[..., lower, :]
        if both.any():
            where = np.argwhere(both)[0]
            raise ShootThroughError(f"leg shoot-through at index {tuple(int(i) for i in where)}")


def cell_voltage(
    gates: npt.ArrayLike, vdc: float, current_sign: npt.ArrayLike | None = None
) -> npt.NDArray[np.float64]:
    """H-bridge output ``vdc * (out_A - out_B)`` for a ``(..., 4, n)`` gate block.

    A leg's output is its upper switch state while either switch conducts. In
    a dead band it is high for negative cell current (upper diode) in leg A and
    for positive current in leg B. Without ``current_sign`` a dead band reads
    as the upper switch state (low).
    """
    g = np.asarray(gates, dtype=bool)
    if g.shape[-2] != 4:
        raise ValueError("expected four gate trains")
    check_shoot_through(g)
    out_a, out_b = g[..., A_UPPER, :], g[..., B_UPPER, :]
    if current_sign is not None:
        sgn = np.asarray(current_sign)
        idle_a = ~(out_a | g[..., A_LOWER, :])
        idle_b = ~(out_b | g[..., B_LOWER, :])
        out_a = np.where(idle_a, sgn < 0, out_a)
        out_b = np.where(idle_b, sgn > 0, out_b)
    return vdc * (out_a.astype(np.float64) - out_b)


def _current_sign(mod: SampledWaveform) -> np.ndarray:
    # built on the first half and negated, so it is exactly antisymmetric
    half = mod.samples[: mod.samples.size // 2]
    first = np.where(half >= 0, 1, -1).astype(np.int8)
    return np.concatenate([first, -first])


def _leg_carriers(config: ModulationConfig, rate: float) -> list[tuple[SampledWaveform, SampledWaveform]]:
    """(leg-A carrier, leg-B carrier) per cell."""
    spec = config.carrier
    carriers = make_reference_carriers(spec, rate)
    if spec.variant is CarrierVariant.LEVEL_SHIFTED:
        n = spec.cells
        # Cell c switches between 0 and +vdc in band n+c and between 0 and
        # -vdc in band n-1-c; leg B sees that lower band mirrored upward.
        return [(carriers[n + c], -carriers[n - 1 - c]) for c in range(n)]
    if spec.variant is CarrierVariant.FIXED_TRIANGLE:
        return [(carriers[0], carriers[0])] * spec.cells
    return [(c, c) for c in carriers]


def build_gates(config: ModulationConfig, topology: ChbTopology | None = None) -> GateSchedule:
    """Ideal complementary gate schedule for every phase and cell, one period."""
    topology = topology or config.topology
    if config.carrier.cells != topology.cells_per_phase:
        raise ValueError(
            f"carrier set has {config.carrier.cells} cells, topology {topology.cells_per_phase}"
        )
    rate = config.sample_rate_hz
    n = config.samples_per_period
    if n % (2 * PHASES):
        raise ValueError(f"samples per period must be divisible by 6 for exact phase shifts, got {n}")
    mod = make_modulating(config.modulating, 1, rate)
    phase0 = np.empty((topology.cells_per_phase, 4, n), dtype=bool)
    compare = compare_gate if config.carrier.variant is CarrierVariant.LEVEL_SHIFTED else _compare_antisymmetric
    for c, (car_a, car_b) in enumerate(_leg_carriers(config, rate)):
        a = compare(mod, car_a)
        b = compare(-mod, car_b)
        phase0[c] = (a, ~a, b, ~b)
    if config.carrier.variant is CarrierVariant.FMTCT:
        _hold_blocked(phase0, blocked_sample_mask(config.carrier.fmtct, n))
    gates = np.stack([np.roll(phase0, p * n // PHASES, axis=-1) for p in range(PHASES)])
    sign0 = _current_sign(mod)
    sign = np.stack([np.roll(sign0, p * n // PHASES) for p in range(PHASES)])
    schedule = GateSchedule(gates, rate, config.modulating.fundamental_hz, sign)
    if topology.dead_time_s > 0:
        schedule = apply_dead_time(schedule, topology.dead_time_s)
    return schedule


def _hold_blocked(gates: np.ndarray, mask: np.ndarray) -> None:
    # Frozen comparator: every gate keeps the state it had when its window opened.
    # This only matters when the modulating wave crosses a frozen carrier level.
    idx = np.arange(mask.size)
    opened = np.maximum.accumulate(np.where(mask, 0, idx))
    gates[..., mask] = gates[..., opened[mask]]


def _delay_rising(train: np.ndarray, d: int) -> np.ndarray:
    # On at n only if on throughout the cyclic window [n - d, n].
    n = train.shape[-1]
    ext = np.concatenate([train[..., n - d:], train], axis=-1).astype(np.int32)
    csum = np.concatenate([np.zeros(train.shape[:-1] + (1,), np.int32), np.cumsum(ext, axis=-1)], axis=-1)
    window = csum[..., d + 1:] - csum[..., :-d - 1]
    return window == d + 1


def apply_dead_time(schedule: GateSchedule, dead_time: float) -> GateSchedule:
    """Delay every off->on transition by ``dead_time`` (rounded to samples).

    Pulses shorter than the dead time disappear; a warning is issued when that
    happens.
    """
    if dead_time < 0:
        raise ValueError("dead_time must be >= 0")
    d = int(round(dead_time * schedule.sample_rate_hz))
    if d == 0:
        return schedule
    if d >= schedule.n_samples:
        raise ValueError("dead time exceeds the schedule length")
    delayed = _delay_rising(schedule.gates, d)
    lost = _rising_edges(schedule.gates).sum() - _rising_edges(delayed).sum()
    if lost:
        warnings.warn(f"dead time of {d} samples swallowed {lost} pulses", stacklevel=2)
    return GateSchedule(delayed, schedule.sample_rate_hz, schedule.fundamental_hz, schedule.current_sign)


def _rising_edges(train: np.ndarray) -> np.ndarray:
    return train & ~np.roll(train, 1, axis=-1)


def rising_edge_count(train: npt.ArrayLike) -> int | np.ndarray:
    """Cyclic count of off->on transitions along the last axis."""
    return _rising_edges(np.asarray(train, dtype=bool)).sum(axis=-1)


def switching_events(train: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    """Mask of samples where the train differs from the previous sample (cyclic)."""
    t = np.asarray(train, dtype=bool)
    return t != np.roll(t, 1, axis=-1)


@dataclass(frozen=True, eq=False)
class InverterVoltages:
    phase: tuple[SampledWaveform, SampledWaveform, SampledWaveform]
    line: tuple[SampledWaveform, SampledWaveform, SampledWaveform]
    cells: npt.NDArray[np.float64]  # [phase, cell, sample]


def phase_and_line_voltages(schedule: GateSchedule, topology: ChbTopology) -> InverterVoltages:
    """Phase-to-neutral (sum of cells) and line-to-line (ab, bc, ca) voltages."""
    sign = None if schedule.current_sign is None else schedule.current_sign[:, None, :]
    cells = cell_voltage(schedule.gates, topology.vdc_per_cell, sign)
    phase_arr = cells.sum(axis=1)

    def wrap(x: np.ndarray) -> SampledWaveform:
        return SampledWaveform(schedule.sample_rate_hz, x, schedule.fundamental_hz)

    phase = tuple(wrap(phase_arr[p]) for p in range(PHASES))
    line = tuple(wrap(phase_arr[p] - phase_arr[(p + 1) % PHASES]) for p in range(PHASES))
    return InverterVoltages(phase, line, cells)
