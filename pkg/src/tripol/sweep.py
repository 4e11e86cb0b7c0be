"""Parameter sweeps over the GHZ network and location of the genuine-entanglement threshold."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect

from . import circuit as C
from .criteria import GENUINE_BOUND, evaluate_criteria
from .errors import InvalidArgument
from .polarization import FormMode

SWEEP_PARAMS = ("r_common", "r_prime_common", "g_common", "eta")
CSV_HEADER = "param,I1,I2,I3,sum,g1,g2,g3"


@dataclass(frozen=True)
class PresetParams:
    """Inputs of the GHZ preset: per-mode ``(r, r')``, beam amplitudes and a uniform output efficiency."""

    r: tuple = (0.0, 0.0, 0.0)
    r_prime: tuple = (0.0, 0.0, 0.0)
    alpha_c: float = 1.0
    alpha_a: float = 0.0
    theta: float = 0.0
    eta: float = 1.0

    def circuit(self) -> C.CircuitSpec:
        specs = C.ghz_specs(self.r[0], self.r_prime[0], self.r[1], self.r_prime[1], self.r[2], self.r_prime[2])
        spec = C.ghz_preset(specs, self.alpha_c, self.alpha_a, self.theta)
        return with_uniform_loss(spec, self.eta)

    def modes(self) -> list[tuple[float, float]]:
        return list(zip(self.r, self.r_prime))


def with_uniform_loss(spec: C.CircuitSpec, eta: float) -> C.CircuitSpec:
    """Append a loss of transmission ``eta`` on every mode bound to a beam."""
    if eta == 1.0:
        return spec
    losses = [C.Loss(b.h_mode, eta) for b in spec.beams]
    els = list(spec.elements)
    first_beam = next(i for i, e in enumerate(els) if isinstance(e, C.BeamDecl))
    return C.CircuitSpec(tuple(els[:first_beam] + losses + els[first_beam:]))


def sweep_rows(
    build: Callable[[float], tuple],
    values: Sequence[float],
    gains="optimal",
    mode=FormMode.PAPER_APPROX,
) -> list[tuple]:
    """Evaluate the criteria at each grid value.

    Args:
        build: Maps a grid value to ``(state, beams, gains_or_None)``; a
            non-None gain overrides ``gains`` for that point.
        values: Grid values, in output order.

    Returns:
        Rows ``(value, I1, I2, I3, sum, g1, g2, g3)``.
    """
    rows = []
    for v in values:
        state, beams, override = build(v)
        res = evaluate_criteria(state, beams, gains if override is None else override, mode)
        rows.append((float(v), res.I1, res.I2, res.I3, res.sum, *res.gains))
    return rows


def preset_builder(base: PresetParams, param: str, gains="optimal"):
    """Builder for :func:`sweep_rows` that varies one preset parameter."""
    if param not in SWEEP_PARAMS:
        raise InvalidArgument(f"unknown sweep parameter {param!r}; choose from {SWEEP_PARAMS}")

    def build(v):
        override = None
        p = base
        if param == "r_common":
            p = replace(base, r=(v, v, v))
        elif param == "r_prime_common":
            p = replace(base, r_prime=(v, v, v))
        elif param == "eta":
            p = replace(base, eta=v)
        else:
            override = (v, v, v)
        state, beams = C.compile_circuit(p.circuit())
        return state, beams, override

    return build


def format_rows(rows) -> str:
    """CSV text with 12 significant digits, independent of locale."""
    lines = [CSV_HEADER]
    lines += [",".join(f"{x:.12g}" for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def bracket_crossings(rows, level: float = GENUINE_BOUND) -> list[tuple[float, float]]:
    """Adjacent grid intervals where the ``sum`` column crosses ``level``."""
    out = []
    for a, b in zip(rows, rows[1:]):
        fa, fb = a[4] - level, b[4] - level
        if fa == 0.0:
            out.append((a[0], a[0]))
        elif fa * fb < 0:
            out.append((a[0], b[0]))
    if rows and rows[-1][4] - level == 0.0:
        out.append((rows[-1][0], rows[-1][0]))
    return out


def refine_crossing(fn: Callable[[float], float], lo: float, hi: float, level: float = GENUINE_BOUND, xtol: float = 1e-12) -> float:
    """Bisect ``fn(x) = level`` inside a bracketing interval."""
    if lo == hi:
        return lo
    return bisect(lambda x: fn(x) - level, lo, hi, xtol=xtol)


def genuine_threshold_r(steps: int, r_max: float = 1.5, base: PresetParams | None = None, xtol: float = 1e-12):
    """Common squeezing at which ``I1 + I2 + I3`` reaches 2 (``r' = 0``, optimal gains).

    A grid of ``steps`` points on ``[0, r_max]`` brackets the crossing, then
    bisection refines it.

    Returns:
        ``(r_cross, (lo, hi))``.
    """
    base = base or PresetParams()
    build = preset_builder(base, "r_common")
    rows = sweep_rows(build, np.linspace(0.0, r_max, steps))
    brackets = bracket_crossings(rows)
    if not brackets:
        raise InvalidArgument("the sum does not cross 2 on the requested grid")
    lo, hi = brackets[0]

    def total(r):
        state, beams, _ = build(r)
        return evaluate_criteria(state, beams, "optimal").sum

    return refine_crossing(total, lo, hi, xtol=xtol), (lo, hi)
