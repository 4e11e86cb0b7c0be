"""
Describing networks in the circuit language
===========================================

Parse, validate, print and compile small optical networks, including the
built-in three-beam GHZ network.
"""

# %%
import numpy as np

from tripol.circuit import CircuitError, compile_circuit, format_circuit, ghz_preset, ghz_specs, mixing_coefficients, parse_circuit

np.set_printoptions(precision=5, suppress=True)

# %% A two-mode program
text = """
mode a
mode b
squeeze a r=0.6 rp=0 axis=amp
squeeze b r=0.6 rp=0 axis=phase
bs a b rt=1:1 phase=0
beam x h=a alpha_c=5.477 alpha_a=1
"""
spec = parse_circuit(text)
print(format_circuit(spec))
state, beams = compile_circuit(spec)
print(state.n_modes, "modes after appending one coherent V mode per beam")
print(beams)

# %% Diagnostics carry line and column
try:
    parse_circuit("mode a\nbs a b rt=1:2")
except CircuitError as exc:
    print(exc)

# %% The GHZ network: one phase-squeezed and two amplitude-squeezed inputs on 1:2 and 1:1 splitters
spec = ghz_preset(ghz_specs(0.6, 0.0, 0.6, 0.0, 0.6, 0.0))
print(format_circuit(spec))
U = mixing_coefficients(spec)
print(U)
print("magnitudes:", sorted(set(np.round(np.abs(U).ravel(), 5))))
