"""
Where the motor should be loud
==============================

Spatial harmonics come from slot and pole counts alone. Switching adds
sidebands around multiples of the mean carrier frequency, and each electrical
harmonic n f above 1 % shows up at (n - 1) f and (n + 1) f.
"""

from chbpwm import ModulationConfig, MotorGeometry, predict
from chbpwm.experiments import compare

motor = MotorGeometry(pole_pairs=2, stator_slots=36, rotor_slots=26)

sine = predict(motor, None, 50.0)
print("sinusoidal supply:", [int(f) for f in sine.frequencies_hz if f < 2100])

(spwm3,) = compare([ModulationConfig.for_strategy("SPWM3", amplitude_index=1.0)], 220.0, policy="dc_link")
for f in (300, 400, 750, 2450):
    print(f"SPWM3 {f} Hz predicted: {spwm3.prediction.contains(f)}")

# below 2.5 kHz, the lines that only switching explains
extra = [ln for ln in spwm3.prediction.lines if ln.frequency_hz < 2500 and not sine.contains(ln.frequency_hz)]
for ln in extra[:12]:
    print(f"{ln.frequency_hz:7.0f} Hz  {','.join(sorted(m.value for m in ln.mechanisms))}")
