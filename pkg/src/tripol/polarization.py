"""Stokes operators of bright two-polarization beams.

A :class:`BrightBeam` pairs a weak H-polarized quantum mode (mean amplitude
``alpha_a``) with a strong V-polarized coherent mode (amplitude ``alpha_c``),
both real, with relative phase ``theta`` entering the Stokes operators

    S0 = a_H^dag a_H + a_V^dag a_V
    S1 = a_H^dag a_H - a_V^dag a_V
    S2 = a_H^dag a_V e^{i theta} + a_V^dag a_H e^{-i theta}
    S3 = i a_V^dag a_H e^{-i theta} - i a_H^dag a_V e^{i theta}

Fluctuations are linearized around the mean fields, giving linear forms in the
quadrature vector of a :class:`~tripol.gaussian.GaussianState`.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedConfiguration
from .gaussian import GaussianState, linear_form_variance

POWER_TOL = 1e-9
WEAK_BEAM_RATIO = 0.1


class StokesIndex(enum.IntEnum):
    S0 = 0
    S1 = 1
    S2 = 2
    S3 = 3


class FormMode(str, enum.Enum):
    """Which linearization to use.

    ``paper_approx`` keeps only the terms proportional to ``alpha_c``;
    ``full`` keeps every first-order term.
    """

    PAPER_APPROX = "paper_approx"
    FULL = "full"


@dataclass(frozen=True)
class BrightBeam:
    name: str
    h_mode: int
    v_mode: int
    alpha_c: float
    alpha_a: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.alpha_c > 0:
            raise InvalidArgument(f"beam {self.name!r}: alpha_c must be > 0, got {self.alpha_c}")
        if not self.alpha_a >= 0:
            raise InvalidArgument(f"beam {self.name!r}: alpha_a must be >= 0, got {self.alpha_a}")
        if self.h_mode == self.v_mode:
            raise InvalidArgument(f"beam {self.name!r}: H and V modes must differ")
        if (self.alpha_a / self.alpha_c) ** 2 > WEAK_BEAM_RATIO:
            warnings.warn(
                f"beam {self.name!r}: alpha_a^2/alpha_c^2 = {(self.alpha_a / self.alpha_c) ** 2:.3g} "
                "is outside the weak-H regime the linearization assumes",
                stacklevel=2,
            )


def stokes_means(beam: BrightBeam) -> tuple[float, float, float, float]:
    """Mean values ``(S0, S1, S2, S3)`` of a bright beam."""
    a, c = beam.alpha_a, beam.alpha_c
    return (
        a**2 + c**2,
        a**2 - c**2,
        2 * a * c * np.cos(beam.theta),
        2 * a * c * np.sin(beam.theta),
    )


def stokes_fluctuation_form(beam: BrightBeam, k, n_modes: int, mode=FormMode.PAPER_APPROX) -> np.ndarray:
    """Linear form ``c`` with ``delta S_k = c . delta xi`` to first order.

    At ``theta = 0`` the ``paper_approx`` forms are ``2 alpha_c X+_V`` for S0
    (negated for S1), ``2 alpha_c X+_H`` for S2 and ``-2 alpha_c X-_H`` for S3.
    A nonzero ``theta`` rotates the H quadrature seen by S2 and S3.

    Args:
        beam: The beam whose Stokes operator is linearized.
        k: Stokes index (0-3 or :class:`StokesIndex`).
        n_modes: Mode count of the state the form acts on.
        mode: ``"paper_approx"`` or ``"full"``.
    """
    k = StokesIndex(k)
    mode = FormMode(mode)
    for m in (beam.h_mode, beam.v_mode):
        if not 0 <= m < n_modes:
            raise InvalidArgument(f"beam {beam.name!r} references mode {m}, state has {n_modes}")
    full = mode is FormMode.FULL
    ct, st = np.cos(beam.theta), np.sin(beam.theta)
    hp, hm = 2 * beam.h_mode, 2 * beam.h_mode + 1
    vp, vm = 2 * beam.v_mode, 2 * beam.v_mode + 1
    two_c, two_a = 2 * beam.alpha_c, 2 * beam.alpha_a

    c = np.zeros(2 * n_modes)
    if k is StokesIndex.S0 or k is StokesIndex.S1:
        c[vp] = two_c if k is StokesIndex.S0 else -two_c
        if full:
            c[hp] = two_a
    elif k is StokesIndex.S2:
        c[hp], c[hm] = two_c * ct, two_c * st
        if full:
            c[vp], c[vm] = two_a * ct, -two_a * st
    else:
        c[hp], c[hm] = two_c * st, -two_c * ct
        if full:
            c[vp], c[vm] = two_a * st, two_a * ct
    return c


def stokes_combination_variance(
    state: GaussianState,
    beams: Sequence[BrightBeam],
    ks,
    gains,
    mode=FormMode.PAPER_APPROX,
) -> float:
    """Variance of ``sum_j gains[j] * S_{ks[j]}(beams[j])``.

    ``ks`` may be a single index applied to every beam.
    """
    if isinstance(ks, (int, StokesIndex)):
        ks = [ks] * len(beams)
    gains = np.asarray(gains, dtype=float)
    if not (len(beams) == len(ks) == gains.size):
        raise InvalidArgument("beams, Stokes indices and gains must have equal length")
    c = np.zeros(2 * state.n_modes)
    for beam, k, g in zip(beams, ks, gains):
        c += g * stokes_fluctuation_form(beam, k, state.n_modes, mode)
    return linear_form_variance(state, c)


def snl_denominator(beams: Sequence[BrightBeam]) -> float:
    """Shot-noise normalization ``4|alpha_c^2 - alpha_a^2|`` of a criterion.

    Raises:
        UnsupportedConfiguration: if the beams do not share one power setting.
    """
    if not beams:
        raise InvalidArgument("need at least one beam")
    ref = beams[0]
    for b in beams[1:]:
        if abs(b.alpha_c - ref.alpha_c) > POWER_TOL or abs(b.alpha_a - ref.alpha_a) > POWER_TOL:
            raise UnsupportedConfiguration(
                f"beams {ref.name!r} and {b.name!r} have unequal powers; the criteria assume equal powers"
            )
    return 4.0 * abs(ref.alpha_c**2 - ref.alpha_a**2)


def stokes_values(a_h, a_v, theta: float = 0.0) -> np.ndarray:
    """Evaluate the four Stokes quantities on complex field values.

    Returns an array of shape ``(4,) + a_h.shape``.
    """
    a_h = np.asarray(a_h, dtype=complex)
    a_v = np.asarray(a_v, dtype=complex)
    n_h = a_h.real**2 + a_h.imag**2
    n_v = a_v.real**2 + a_v.imag**2
    cross = np.conj(a_h) * a_v * np.exp(1j * theta)
    return np.stack([n_h + n_v, n_h - n_v, 2 * cross.real, 2 * cross.imag])
