"""
Stokes operators of bright beams
================================

Means and linearized fluctuations of S0..S3 for a weak H mode on top of a
strong coherent V beam.
"""

# %%
import numpy as np

from tripol.gaussian import Axis, SqueezerSpec, set_dopa_output, vacuum_state
from tripol.polarization import BrightBeam, FormMode, StokesIndex, stokes_combination_variance, stokes_fluctuation_form, stokes_means

# %% Means at intensity ratio 1/30
beam = BrightBeam("d", h_mode=0, v_mode=1, alpha_c=np.sqrt(30), alpha_a=1.0)
print(stokes_means(beam))

# %% Linear forms on (X+_H, X-_H, X+_V, X-_V)
for k in StokesIndex:
    print(k.name, stokes_fluctuation_form(beam, k, 2, FormMode.PAPER_APPROX), stokes_fluctuation_form(beam, k, 2, FormMode.FULL))

# %% Shot noise: a coherent beam gives Var(S2) = alpha_c^2
vac = vacuum_state(2)
print(stokes_combination_variance(vac, [beam], [StokesIndex.S2], [1.0]) / beam.alpha_c**2)

# %% Amplitude squeezing of the H mode lowers Var(S2) and raises Var(S3)
sq = set_dopa_output(vac, 0, SqueezerSpec(0.5, 0.0, Axis.AMPLITUDE))
for k in (StokesIndex.S2, StokesIndex.S3):
    print(k.name, stokes_combination_variance(sq, [beam], [k], [1.0]) / beam.alpha_c**2)

# %% The sum Var(S2) + Var(S3) does not depend on the H-V phase
for theta in np.linspace(0, np.pi, 5):
    b = BrightBeam("d", 0, 1, np.sqrt(30), 1.0, theta)
    v2 = stokes_combination_variance(sq, [b], [2], [1.0])
    v3 = stokes_combination_variance(sq, [b], [3], [1.0])
    print(f"theta={theta:.3f}  S2={v2:.4f}  S3={v3:.4f}  sum={v2 + v3:.4f}")
