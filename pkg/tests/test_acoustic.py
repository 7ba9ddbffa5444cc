from __future__ import annotations

import numpy as np
import pytest

from chbpwm.acoustic import (
    Mechanism,
    MotorGeometry,
    merge_lines,
    predict,
    spatial_harmonics,
    switching_sidebands,
    temporal_map,
    AcousticLine,
)
from chbpwm.spectral import HarmonicSpectrum

GEOM = MotorGeometry(pole_pairs=2, stator_slots=36, rotor_slots=26, slip=0.0)
TYPE3 = [550, 650, 750, 1200, 1300, 1400, 1850, 1950, 2050, 2500, 2600, 2700, 3150, 3250, 3350]
ROTOR = [1200, 1400, 2500, 2700, 3800, 4000, 5100, 5300, 6400, 6600]


def freqs(lines, mechanism=None):
    return sorted({ln.frequency_hz for ln in lines if mechanism is None or ln.mechanism is mechanism})


def test_interaction_family_matches_reference_table():
    got = freqs(spatial_harmonics(GEOM, 50.0, 5), Mechanism.STATOR_ROTOR_INTERACTION)
    assert got == pytest.approx(TYPE3, abs=1e-9)


def test_rotor_family_from_formula():
    got = freqs(spatial_harmonics(GEOM, 50.0, 5), Mechanism.ROTOR_SPATIAL)
    assert got == pytest.approx(ROTOR, abs=1e-9)


def test_stator_line_is_twice_supply_with_mode_four():
    (line,) = [ln for ln in spatial_harmonics(GEOM, 50.0, 1) if ln.mechanism is Mechanism.STATOR_SPATIAL]
    assert line.frequency_hz == 100.0 and line.vibration_mode == 4


def test_slip_lowers_rotor_lines():
    slow = freqs(spatial_harmonics(MotorGeometry(slip=0.04), 50.0, 1), Mechanism.ROTOR_SPATIAL)
    assert max(slow) < 1400.0


def test_geometry_validation():
    for bad in ({"pole_pairs": 0}, {"rotor_slots": 0}, {"slip": 1.0}, {"stator_phases": 2}):
        with pytest.raises(ValueError):
            MotorGeometry(**bad)
    with pytest.raises(ValueError):
        spatial_harmonics(GEOM, 50.0, 0)


def test_sideband_pattern_and_parity():
    lines = switching_sidebands(750.0, 50.0, 4)
    sb = {ln.source_hz for ln in lines}
    for f in (650, 850, 550, 950, 1450, 1550, 1350, 1650):
        assert f in sb
    assert 2450.0 in {ln.frequency_hz for ln in lines}
    for ln in lines:
        a, b = divmod(ln.k_index, 10)
        assert (a + b) % 2 == 1
        assert ln.vibration_mode == 0
    # same-parity pairs such as f_sw +/- f or 2 f_sw +/- 2 f never appear as sources
    for f in (700, 800, 1400, 1600):
        assert f not in sb


def test_sideband_force_images_one_fundamental_away():
    lines = [ln for ln in switching_sidebands(750.0, 50.0, 4) if ln.source_hz == 2450.0]
    assert sorted(ln.frequency_hz for ln in lines) == [2400.0, 2450.0, 2500.0]


def test_sidebands_need_switching_above_fundamental():
    with pytest.raises(ValueError):
        switching_sidebands(40.0, 50.0)


def spectrum_with(rel):
    orders = np.arange(1, 51)
    mags = np.zeros(50)
    mags[0] = 100.0
    for n, r in rel.items():
        mags[n - 1] = 100.0 * r
    return HarmonicSpectrum(50.0, orders, mags, np.zeros(50), 0.0)


def test_temporal_map_uses_neighbouring_orders():
    lines = temporal_map(spectrum_with({5: 0.05, 7: 0.03, 11: 0.005}), threshold=0.01)
    assert freqs(lines) == [200.0, 300.0, 400.0]
    assert {ln.source_hz for ln in lines} == {250.0, 350.0}
    assert all(ln.amplitude_proxy in (0.05, 0.03) for ln in lines)


def test_temporal_threshold_range():
    with pytest.raises(ValueError):
        temporal_map(spectrum_with({}), threshold=0.0)


def test_merge_fuses_close_lines_and_keeps_tags():
    lines = [
        AcousticLine(1200.0, Mechanism.ROTOR_SPATIAL),
        AcousticLine(1200.4, Mechanism.STATOR_ROTOR_INTERACTION),
        AcousticLine(1300.0, Mechanism.TEMPORAL_MAP, amplitude_proxy=0.2),
    ]
    pred = merge_lines(lines)
    assert pred.frequencies_hz == [1200.0, 1300.0]
    assert pred.lines[0].mechanisms == {Mechanism.ROTOR_SPATIAL, Mechanism.STATOR_ROTOR_INTERACTION}
    assert pred.contains(1200.9) and not pred.contains(1250.0)


def test_sine_supply_predicts_only_spatial_lines():
    pred = predict(GEOM, None, 50.0)
    mech = set().union(*(ln.mechanisms for ln in pred.lines))
    assert mech <= {Mechanism.ROTOR_SPATIAL, Mechanism.STATOR_SPATIAL, Mechanism.STATOR_ROTOR_INTERACTION}
    assert pred.contains(100.0) and pred.contains(750.0)


def test_full_prediction_reaches_low_order_temporal_lines():
    # with measurable 5th and 7th harmonics the 300 and 400 Hz lines appear
    pred = predict(GEOM, spectrum_with({5: 0.03, 7: 0.02}), 50.0, 750.0)
    for f in (300.0, 400.0, 750.0, 2450.0):
        assert pred.contains(f)
    assert pred.by_mechanism(Mechanism.TEMPORAL_MAP) == [200.0, 300.0, 400.0]


def test_default_sideband_order_reaches_two_fsw_minus_five_f():
    assert predict(GEOM, None, 50.0, 750.0).contains(1250.0)
    assert not predict(GEOM, None, 50.0, 750.0, order_max=4).contains(1250.0)
