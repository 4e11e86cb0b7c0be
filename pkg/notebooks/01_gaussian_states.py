"""
Gaussian states and symplectic optics
=====================================

Covariance matrices with vacuum variance 1/4, squeezed sources, beam
splitters and loss.
"""

# %%
import numpy as np

from tripol.gaussian import (
    Axis,
    SqueezerSpec,
    apply_transform,
    beamsplitter_transform,
    linear_form_variance,
    loss_channel,
    set_dopa_output,
    vacuum_state,
)

np.set_printoptions(precision=5, suppress=True)

# %% Vacuum: every quadrature has variance 1/4
state = vacuum_state(2)
print(state.cov)

# %% Squeeze mode 0 in amplitude and mode 1 in phase, with some excess noise on mode 1
state = set_dopa_output(state, 0, SqueezerSpec(0.5, 0.0, Axis.AMPLITUDE))
state = set_dopa_output(state, 1, SqueezerSpec(0.5, 0.2, Axis.PHASE))
print(np.diag(state.cov))
print("uncertainty products:", state.cov[0, 0] * state.cov[1, 1], state.cov[2, 2] * state.cov[3, 3])

# %% A 50:50 splitter correlates the outputs; the transform is symplectic
S = beamsplitter_transform(2, 0, 1, 0.5)
print("symplectic error:", S.symplectic_error())
mixed = apply_transform(state, S)
print(mixed.cov)

# %% The X+ difference of the outputs recovers the squeezed input
c = np.array([1.0, 0.0, -1.0, 0.0]) / np.sqrt(2)
print("Var((X1 - X2)/sqrt2) =", linear_form_variance(mixed, c), " vs input", state.cov[2, 2])

# %% Loss pulls every variance toward 1/4
for eta in (1.0, 0.7, 0.3, 0.0):
    print(eta, np.diag(loss_channel(mixed, 0, eta).cov)[:2])
