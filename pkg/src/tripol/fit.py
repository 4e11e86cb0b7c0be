"""Estimate squeezing parameters from measured criterion values.

Three measured numbers cannot determine six squeezing parameters, so fits run
under one of a few reduced models:

``symmetric``
    one ``(r, r')`` shared by all inputs.
``two_group``
    ``(r1, r1')`` for the phase-squeezed input and ``(r23, r23')`` shared by
    the two amplitude-squeezed inputs.
``with_loss``
    the symmetric model plus a shared detection efficiency ``eta``.

Each model is searched with a bounded Nelder-Mead simplex from five starts.
Within a model the excess-noise factors usually trade off against the
squeezing, so a second search with ``r' = 0`` (and ``eta = 1``) is run and
preferred whenever it fits as well; the result records which one was kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .criteria import GainVector, closed_form_I, optimal_gains_closed_form
from .errors import InvalidArgument

R_MAX = 2.0
R_PRIME_MAX = 2.0
ETA_MIN = 1e-3
SIMPLEX_TOL = 1e-8
MAX_EVALUATIONS = 10_000
CONVERGENCE_RMS = 0.02
TIE_TOL = 1e-9
START_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)

MODELS = ("symmetric", "two_group", "with_loss")

_MODEL_PARAMS = {
    "symmetric": ("r", "r_prime"),
    "two_group": ("r1", "r1_prime", "r23", "r23_prime"),
    "with_loss": ("r", "r_prime", "eta"),
}


def _bounds(name):
    if name == "eta":
        return (ETA_MIN, 1.0)
    return (0.0, R_PRIME_MAX if name.endswith("prime") else R_MAX)


def _expand(model, values):
    """Map model parameters to per-input ``(r, r')`` pairs and ``eta``."""
    v = dict(values)
    if model == "two_group":
        modes = [(v["r1"], v["r1_prime"]), (v["r23"], v["r23_prime"]), (v["r23"], v["r23_prime"])]
    else:
        modes = [(v["r"], v["r_prime"])] * 3
    return modes, v.get("eta", 1.0)


def forward_model(model: str, values: dict, gain_policy="optimal") -> tuple[tuple[float, float, float], GainVector]:
    """Criterion values predicted by a reduced model.

    Args:
        model: One of :data:`MODELS`.
        values: Model parameter values by name.
        gain_policy: ``"optimal"`` or a fixed gain (scalar or three values).
    """
    modes, eta = _expand(model, values)
    if isinstance(gain_policy, str):
        if gain_policy != "optimal":
            raise InvalidArgument(f"unknown gain policy {gain_policy!r}")
        gains = optimal_gains_closed_form(modes, eta)
    else:
        gains = GainVector(*np.broadcast_to(np.asarray(gain_policy, dtype=float), (3,)))
    return closed_form_I(modes, gains, eta), gains


@dataclass
class FitResult:
    model: str
    params: dict
    modes: list
    eta: float
    predicted: tuple
    gains: GainVector
    residual: float
    iterations: int
    evaluations: int
    converged: bool
    reduced: bool = False
    message: str = ""
    starts: list = field(default_factory=list)

    def as_dict(self) -> dict:
        total = float(sum(self.predicted))
        return {
            "model": self.model,
            "params": self.params,
            "modes": [list(m) for m in self.modes],
            "eta": self.eta,
            "predicted": {"I1": self.predicted[0], "I2": self.predicted[1], "I3": self.predicted[2], "sum": total},
            "gains": list(self.gains),
            "residual_rms": self.residual,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "reduced": self.reduced,
            "inseparable": sum(v < 1.0 for v in self.predicted) >= 2,
            "genuine": total < 2.0,
            "message": self.message,
        }


def _search(model, names, fixed, targets, weights, gain_policy):
    bounds = [_bounds(n) for n in names]

    def values_of(x):
        return {**fixed, **dict(zip(names, x))}

    def objective(x):
        predicted, _ = forward_model(model, values_of(x), gain_policy)
        return float(np.sum(weights * (np.asarray(predicted) - targets) ** 2))

    best, runs = None, []
    nit = nfev = 0
    for index, frac in enumerate(START_FRACTIONS):
        x0 = np.array([lo + frac * (hi - lo) for lo, hi in bounds])
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": SIMPLEX_TOL, "fatol": np.inf, "maxfev": MAX_EVALUATIONS, "adaptive": len(names) > 2},
        )
        x = np.clip(res.x, [b[0] for b in bounds], [b[1] for b in bounds])
        f = objective(x)
        nit += res.nit
        nfev += res.nfev
        runs.append({"start": index, "x0": x0.tolist(), "objective": f, "success": bool(res.success)})
        # strict comparison keeps the earliest start on ties
        if best is None or f < best[0]:
            best = (f, x, bool(res.success), res.message)
    f, x, success, message = best
    values = values_of(x)
    predicted, gains = forward_model(model, values, gain_policy)
    rms = float(np.sqrt(np.mean((np.asarray(predicted) - targets) ** 2)))
    return values, predicted, gains, rms, success, str(message), nit, nfev, runs


def fit_parameters(targets, model: str = "symmetric", uncertainties=None, gain_policy="optimal") -> FitResult:
    """Fit a reduced squeezing model to measured ``(I1, I2, I3)``.

    Minimizes ``sum_j w_j (I_j^model - I_j^target)^2`` with inverse-variance
    weights when ``uncertainties`` are given, uniform weights otherwise.

    Returns:
        A :class:`FitResult`; ``converged`` is false when the search did not
        meet the simplex tolerance or no model point lies within 0.02 RMS of
        the targets.
    """
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (3,):
        raise InvalidArgument("need exactly three target values")
    if np.any(targets <= 0) or np.any(targets >= 4):
        raise InvalidArgument("target values must lie in (0, 4)")
    if model not in MODELS:
        raise InvalidArgument(f"unknown model {model!r}; choose from {MODELS}")
    if uncertainties is None:
        weights = np.ones(3)
    else:
        sigma = np.asarray(uncertainties, dtype=float)
        if sigma.shape != (3,) or np.any(sigma <= 0):
            raise InvalidArgument("uncertainties must be three positive numbers")
        weights = 1.0 / sigma**2

    names = _MODEL_PARAMS[model]
    full = _search(model, names, {}, targets, weights, gain_policy)

    nested_fixed = {n: 0.0 for n in names if n.endswith("prime")}
    if "eta" in names:
        nested_fixed["eta"] = 1.0
    nested_names = tuple(n for n in names if n not in nested_fixed)
    nested = _search(model, nested_names, nested_fixed, targets, weights, gain_policy)

    reduced = nested[3] <= full[3] + TIE_TOL
    values, predicted, gains, rms, success, message, nit, nfev, runs = nested if reduced else full
    modes, eta = _expand(model, values)
    return FitResult(
        model=model,
        params={k: float(v) for k, v in values.items()},
        modes=[tuple(float(x) for x in m) for m in modes],
        eta=float(eta),
        predicted=tuple(predicted),
        gains=gains,
        residual=rms,
        iterations=full[6] + nested[6],
        evaluations=full[7] + nested[7],
        converged=bool(success and rms <= CONVERGENCE_RMS),
        reduced=reduced,
        message=message,
        starts=runs,
    )
