"""
Truncated frequency-modulated carrier
=====================================

The carrier order follows max(0, A_M [cos^2(w t) - K]). Where the law is
clipped the carrier stops and holds its value, so no gate can switch there.
"""

import numpy as np

from chbpwm import FmtctParams, lobe_times, make_fmtct_carrier, solve_am

# A_M keeps the mean order at 15 whatever K is
for k in (0.2, 0.5, 0.8):
    print(f"K={k}: A_M={solve_am(k, 15):8.3f}  peak order={solve_am(k, 15) * (1 - k):6.2f}")

params = FmtctParams(k_trunc=0.5, m_bar=15)
t1, t2, t3, t4 = lobe_times(params)
print(f"blocked windows: ({1e3 * t1:.2f}, {1e3 * t2:.2f}) ms and ({1e3 * t3:.2f}, {1e3 * t4:.2f}) ms")

n = 6144
carrier = make_fmtct_carrier(params, rate=n * 50.0)
x = carrier.samples
t = carrier.time

# 15 triangle periods per fundamental period: one upward zero crossing each
print("triangle periods:", np.count_nonzero((x < 0) & (np.roll(x, -1) >= 0)))

# the carrier is flat inside each window
inside = (t > t1) & (t < t2)
print("value range inside the first window:", x[inside].min(), x[inside].max())

# the density of peaks is highest around the zero crossings of the fundamental
edges = np.flatnonzero((x < 0) & (np.roll(x, -1) >= 0)) / n * 20
print("crossings (ms):", np.round(edges, 2))
