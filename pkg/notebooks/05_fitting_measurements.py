"""
Fitting squeezing parameters to measured criteria
=================================================

Three numbers cannot pin six squeezing parameters, so fits use reduced
models and report which one was used.
"""

# %%
from tripol.fit import MODELS, fit_parameters

measured = (0.42, 0.41, 0.42)
sigma = (0.08, 0.08, 0.08)

# %%
for model in MODELS:
    res = fit_parameters(measured, model, uncertainties=sigma)
    d = res.as_dict()
    print(model, res.params, f"rms={res.residual:.4f}", "sum=%.4f" % d["predicted"]["sum"], "genuine" if d["genuine"] else "")

# %% Round trip through a known point
res = fit_parameters((0.36669096842926785,) * 3)
print(res.params, res.reduced)

# %% Targets no reduced model can reach
res = fit_parameters((0.2, 1.5, 0.2))
print(res.converged, res.residual, res.predicted)
