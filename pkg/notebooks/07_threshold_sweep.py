"""
Where genuine tripartite entanglement starts
============================================

Sweep the common squeezing and locate the point where I1 + I2 + I3 drops
below 2.
"""

# %%
import numpy as np

from tripol.sweep import PresetParams, bracket_crossings, format_rows, genuine_threshold_r, preset_builder, sweep_rows

rows = sweep_rows(preset_builder(PresetParams(), "r_common"), np.linspace(0, 1.5, 16))
print(format_rows(rows))
print("bracket:", bracket_crossings(rows))

# %%
for steps in (16, 31, 301):
    r_cross, bracket = genuine_threshold_r(steps)
    print(steps, f"{r_cross:.10f}", bracket)

# %% With excess anti-squeezing noise the threshold moves up
for rp in (0.0, 0.2, 0.5):
    r_cross, _ = genuine_threshold_r(31, base=PresetParams(r_prime=(rp, rp, rp)))
    print(rp, f"{r_cross:.6f}")
