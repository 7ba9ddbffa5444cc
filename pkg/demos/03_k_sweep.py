"""
Sweeping the truncation level
=============================

THD of the HIPWM-FMTCt line voltage against K, under both equal-fundamental
protocols. Searching Ma at a fixed DC link leaves gaps: the held window state
makes the fundamental jump as Ma grows.
"""

from chbpwm import ChbTopology
from chbpwm.experiments import sweep_k

ks = (0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8)

fixed_ma = sweep_k(ks, policy="dc_link", amplitude_index=1.0, jobs=4)
searched = sweep_k(ks, topology=ChbTopology(vdc_per_cell=85.0), policy="amplitude", jobs=4)

print(f"{'K':>5} {'Ma=1 THD %':>11} {'Ma search THD %':>16}")
for a, b in zip(fixed_ma.rows, searched.rows):
    right = f"{b['thd_line_pct']:16.2f}" if b["status"] == "ok" else f"{'gap':>16}"
    print(f"{a['K']:5.2f} {a['thd_line_pct']:11.2f} {right}")

print("argmin K with Ma = 1:", fixed_ma.argmin_k())
print("argmin K with Ma searched:", searched.argmin_k())
