"""
Monte Carlo oracle
==================

Sample quadratures from the Gaussian state, estimate the criteria with
standard errors, and probe how good the linearization is at finite power.
"""

# %%
import numpy as np

from tripol.circuit import compile_circuit, ghz_preset, ghz_specs
from tripol.criteria import evaluate_criteria
from tripol.montecarlo import mc_criteria, validate_linearization

state, beams = compile_circuit(ghz_preset(ghz_specs(0.6, 0, 0.6, 0, 0.6, 0), alpha_a=0.0))
analytic = evaluate_criteria(state, beams, "optimal")

# %% Linearized estimates, 10^6 samples
est = mc_criteria(state, beams, analytic.gains, 1_000_000, seed=7)
for v, se, a in zip(est.I, est.se, analytic.values):
    print(f"{v:.5f} +- {se:.5f}   analytic {a:.5f}   z={(v - a) / se:+.2f}")

# %% Exact Stokes products at alpha_c^2 = 30 for a sequence of intensity ratios
bright, bright_beams = compile_circuit(ghz_preset(ghz_specs(0.6, 0, 0.6, 0, 0.6, 0), alpha_c=np.sqrt(30), alpha_a=1.0))
for row in validate_linearization(bright, bright_beams, 400_000, seed=3, ratios=[1.0, 0.1, 1 / 30, 0.01]):
    print(f"ratio={row['ratio']:.4f}  vs full {100 * row['max_deviation_full']:.2f}%  vs paper_approx {100 * row['max_deviation_paper_approx']:.2f}%")

# %% The residual against the full linearization is second order in the field fluctuations and shrinks as 1/alpha_c^2
for alpha_c2 in (30, 120, 480):
    s, b = compile_circuit(ghz_preset(ghz_specs(0.6, 0, 0.6, 0, 0.6, 0), alpha_c=np.sqrt(alpha_c2), alpha_a=np.sqrt(alpha_c2 / 30)))
    row = validate_linearization(s, b, 400_000, seed=3, ratios=[1 / 30])[0]
    print(alpha_c2, f"{100 * row['max_deviation_full']:.2f}%")
