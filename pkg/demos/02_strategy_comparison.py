"""
Four strategies at the same fundamental
=======================================

Every strategy runs at Ma = 1 with the DC link scaled so that the line
fundamental is 220 V RMS. THD covers harmonics 2..50.
"""

from chbpwm import ModulationConfig
from chbpwm.experiments import MEASURED_REFERENCE, compare

configs = [
    ModulationConfig.for_strategy("SPWM1", amplitude_index=1.0),
    ModulationConfig.for_strategy("SPWM2", amplitude_index=1.0),
    ModulationConfig.for_strategy("SPWM3", amplitude_index=1.0),
    ModulationConfig.for_strategy("HIPWM_FMTCT", k_trunc=0.45, amplitude_index=1.0),
]
entries = compare(configs, 220.0, policy="dc_link")

measured = {row[0]: row[2] for row in MEASURED_REFERENCE}
print(f"{'strategy':>20} {'vdc/cell V':>10} {'THD %':>7} {'lab THD %':>9}")
for e in entries:
    s = e.summary
    print(f"{e.label:>20} {s['vdc_per_cell_V']:10.2f} {s['thd_line_pct']:7.2f} {measured[e.label]:9.1f}")

# phase-shifted carriers push the first carrier cluster up near 2 * 2 * 15 = 60
spwm2 = entries[1].line_spectrum
top = max(range(2, 200), key=spwm2.magnitude)
print("largest SPWM2 harmonic order:", top)
