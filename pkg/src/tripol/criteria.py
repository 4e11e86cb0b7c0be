"""Tripartite inseparability and genuine-entanglement criteria on Stokes operators.

For three beams ``d1, d2, d3`` and gains ``g1, g2, g3``::

    I1 = [V(S2_d2 - S2_d3) + V(g1 S3_d1 + S3_d2 + S3_d3)] / N
    I2 = [V(S2_d1 - S2_d3) + V(S3_d1 + g2 S3_d2 + S3_d3)] / N
    I3 = [V(S2_d1 - S2_d2) + V(S3_d1 + S3_d2 + g3 S3_d3)] / N

with ``N = 4|alpha_c^2 - alpha_a^2|``. Violating any two of ``I_j >= 1``
certifies full inseparability; ``I1 + I2 + I3 < 2`` certifies genuine
tripartite entanglement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateSNL, InvalidArgument, NumericalDegeneracy
from .gaussian import GaussianState
from .polarization import BrightBeam, FormMode, StokesIndex, snl_denominator, stokes_fluctuation_form

GENUINE_BOUND = 2.0

# (S2 difference: +beam, -beam), for criterion j the gain sits on beam j of the S3 sum
_S2_PAIRS = {0: (1, 2), 1: (0, 2), 2: (0, 1)}


class GainVector(NamedTuple):
    g1: float
    g2: float
    g3: float


@dataclass(frozen=True)
class CriteriaResult:
    I1: float
    I2: float
    I3: float
    gains: GainVector
    snl: float

    @property
    def values(self) -> tuple[float, float, float]:
        return (self.I1, self.I2, self.I3)

    @property
    def sum(self) -> float:
        return self.I1 + self.I2 + self.I3

    @property
    def inseparable(self) -> bool:
        return sum(v < 1.0 for v in self.values) >= 2

    @property
    def genuine(self) -> bool:
        return self.sum < GENUINE_BOUND

    def as_dict(self) -> dict:
        return {
            "I1": self.I1,
            "I2": self.I2,
            "I3": self.I3,
            "sum": self.sum,
            "gains": list(self.gains),
            "snl": self.snl,
            "inseparable": self.inseparable,
            "genuine": self.genuine,
        }


def _check_beams(state: GaussianState, beams: Sequence[BrightBeam]) -> float:
    if len(beams) != 3:
        raise InvalidArgument(f"the tripartite criteria need exactly three beams, got {len(beams)}")
    snl = snl_denominator(beams)
    if snl == 0.0:
        raise DegenerateSNL("alpha_a == alpha_c makes the shot-noise normalization vanish")
    return snl


def _criterion_forms(state, beams, j, mode):
    """Forms of the S2 difference, the gain-free part of the S3 sum and the gained S3 term."""
    n = state.n_modes
    plus, minus = _S2_PAIRS[j]
    s2 = stokes_fluctuation_form(beams[plus], StokesIndex.S2, n, mode) - stokes_fluctuation_form(
        beams[minus], StokesIndex.S2, n, mode
    )
    s3 = [stokes_fluctuation_form(b, StokesIndex.S3, n, mode) for b in beams]
    rest = sum(s3[i] for i in range(3) if i != j)
    return s2, rest, s3[j]


def _criterion_quadratic(state, beams, j, mode):
    """Coefficients ``(a, b, c)`` with ``I_j(g) = a g^2 + 2 b g + c``."""
    snl = _check_beams(state, beams)
    s2, rest, gained = _criterion_forms(state, beams, j, mode)
    cov = state.cov
    a = gained @ cov @ gained / snl
    b = gained @ cov @ rest / snl
    c = (s2 @ cov @ s2 + rest @ cov @ rest) / snl
    return float(a), float(b), float(c)


def criterion_value(state: GaussianState, beams: Sequence[BrightBeam], j: int, gain: float, mode=FormMode.PAPER_APPROX) -> float:
    """Single criterion ``I_{j+1}`` (``j`` is 0-based) at the given gain."""
    a, b, c = _criterion_quadratic(state, beams, j, mode)
    return a * gain**2 + 2 * b * gain + c


def evaluate_criteria(state: GaussianState, beams: Sequence[BrightBeam], gains, mode=FormMode.PAPER_APPROX) -> CriteriaResult:
    """Evaluate ``I1, I2, I3`` by covariance propagation.

    Args:
        state: State holding the H modes and the coherent V modes of the beams.
        beams: ``[d1, d2, d3]`` with equal powers.
        gains: Three gains, or ``"optimal"`` to use the minimizing gains.
        mode: Stokes linearization, see :class:`~tripol.polarization.FormMode`.

    Raises:
        DegenerateSNL: if ``alpha_a == alpha_c``.
        UnsupportedConfiguration: if the beams have unequal powers.
    """
    snl = _check_beams(state, beams)
    if isinstance(gains, str):
        if gains != "optimal":
            raise InvalidArgument(f"unknown gain policy {gains!r}")
        gains = optimal_gains_numeric(state, beams, mode)
    gains = GainVector(*(float(x) for x in gains))
    values = [criterion_value(state, beams, j, gains[j], mode) for j in range(3)]
    return CriteriaResult(*values, gains=gains, snl=snl)


def optimal_gain_numeric(state: GaussianState, beams: Sequence[BrightBeam], j: int, mode=FormMode.PAPER_APPROX) -> tuple[float, float]:
    """Minimize ``I_{j+1}`` over its gain.

    ``I_j`` is an exact quadratic in its gain, so the minimizer is the vertex
    ``-b/a`` computed from the covariances.

    Returns:
        ``(g_opt, I_min)``.

    Raises:
        NumericalDegeneracy: if the quadratic has no strict minimum, which
            only happens for an invalid covariance.
    """
    a, b, c = _criterion_quadratic(state, beams, j, mode)
    if not a > 0:
        raise NumericalDegeneracy(f"criterion {j + 1} is not strictly convex in its gain (a={a:.3e})")
    g_opt = -b / a
    return g_opt, c - b * b / a


def optimal_gains_numeric(state, beams, mode=FormMode.PAPER_APPROX) -> GainVector:
    return GainVector(*(optimal_gain_numeric(state, beams, j, mode)[0] for j in range(3)))


# --- closed forms for the GHZ network -----------------------------------------


def _params_array(params) -> np.ndarray:
    p = np.asarray(params, dtype=float)
    if p.shape != (3, 2):
        raise InvalidArgument(f"expected three (r, r') pairs, got shape {p.shape}")
    if np.any(p < 0):
        raise InvalidArgument("squeezing parameters and excess noise factors must be >= 0")
    return p


def noise_factors(params, eta: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Squeezed and anti-squeezed variance factors (relative to vacuum) per input.

    A uniform loss ``eta`` maps each factor ``f`` to ``eta f + 1 - eta``.
    """
    p = _params_array(params)
    if not 0.0 < eta <= 1.0:
        raise InvalidArgument(f"efficiency must lie in (0, 1], got {eta}")
    squeezed = eta * np.exp(-2 * p[:, 0]) + (1 - eta)
    anti = eta * np.exp(2 * (p[:, 0] + p[:, 1])) + (1 - eta)
    return squeezed, anti


def closed_form_I(params, gains, eta: float = 1.0) -> tuple[float, float, float]:
    """Criteria of the GHZ network in the weak-H regime (``|alpha_c^2 - alpha_a^2| -> alpha_c^2``).

    Args:
        params: ``[(r1, r1'), (r2, r2'), (r3, r3')]``; input 1 is phase
            squeezed, inputs 2 and 3 amplitude squeezed.
        gains: ``(g1, g2, g3)``.
        eta: Uniform detection efficiency; ``1`` gives the lossless expressions.
    """
    sq, anti = noise_factors(params, eta)
    g1, g2, g3 = (float(x) for x in gains)
    I1 = (12 * sq[2] + 2 * (g1 + 2) ** 2 * sq[0] + 4 * (g1 - 1) ** 2 * anti[1]) / 24

    def _i23(gain):
        return (
            3 * sq[2]
            + 9 * sq[1]
            + 2 * (gain + 2) ** 2 * sq[0]
            + 3 * (gain - 1) ** 2 * anti[2]
            + (gain - 1) ** 2 * anti[1]
        ) / 24

    return float(I1), float(_i23(g2)), float(_i23(g3))


def optimal_gains_closed_form(params, eta: float = 1.0) -> GainVector:
    """Gains minimizing :func:`closed_form_I`.

    For ``eta = 1`` these are::

        g1 = (2 E2 - 2) / (2 E2 + 1)
        g2 = g3 = (E2 + 3 E3 - 4) / (E2 + 3 E3 + 2)

    with ``E2 = exp(2 r1 + 2 r2 + 2 r2')`` and ``E3 = exp(2 r1 + 2 r3 + 2 r3')``.
    """
    sq, anti = noise_factors(params, eta)
    e2 = anti[1] / sq[0]
    e3 = anti[2] / sq[0]
    g1 = (2 * e2 - 2) / (2 * e2 + 1)
    g23 = (e2 + 3 * e3 - 4) / (e2 + 3 * e3 + 2)
    return GainVector(float(g1), float(g23), float(g23))


def genuine_bound_check(I1: float, I2: float, I3: float) -> tuple[float, bool]:
    """Return ``(I1 + I2 + I3, sum < 2)``; separable mixtures always reach 2."""
    for v in (I1, I2, I3):
        if v < 0:
            raise InvalidArgument(f"criterion values must be >= 0, got {v}")
    total = I1 + I2 + I3
    return total, total < GENUINE_BOUND
