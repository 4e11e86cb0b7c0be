"""
Tripartite criteria and optimal gains
=====================================

Evaluate I1, I2, I3 by covariance propagation, compare with the closed
forms, and look at the optimal classical gains.
"""

# %%
import numpy as np

from tripol.circuit import compile_circuit, ghz_preset, ghz_specs
from tripol.criteria import closed_form_I, criterion_value, evaluate_criteria, optimal_gains_closed_form

# %% Coherent inputs sit exactly at the shot-noise limit
state, beams = compile_circuit(ghz_preset(alpha_a=0.0))
print(evaluate_criteria(state, beams, (0, 0, 0)).values)
print(evaluate_criteria(state, beams, (1, 1, 1)).values)

# %% Symmetric squeezing r = 0.6
params = [(0.6, 0.0)] * 3
state, beams = compile_circuit(ghz_preset(ghz_specs(0.6, 0, 0.6, 0, 0.6, 0), alpha_a=0.0))
res = evaluate_criteria(state, beams, "optimal")
print(res.as_dict())
print("closed form:", closed_form_I(params, res.gains), optimal_gains_closed_form(params))

# %% Each criterion is a parabola in its own gain
for g in np.linspace(0, 1.6, 9):
    print(f"g={g:.2f}  I1={criterion_value(state, beams, 0, g):.5f}")

# %% Optimal gain versus the exponent sum that controls it
for s in (0.5, 1.0, 1.10843, 1.5):
    print(s, optimal_gains_closed_form([(s / 2, 0.0)] * 3))

# %% Loss degrades the correlations
for eta in (1.0, 0.9, 0.7, 0.5):
    g = optimal_gains_closed_form(params, eta)
    print(eta, np.round(closed_form_I(params, g, eta), 5), "sum", round(sum(closed_form_I(params, g, eta)), 5))
