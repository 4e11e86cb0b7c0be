"""Multimode Gaussian states in the interleaved quadrature basis.

Conventions used throughout the package:

* ``X+ = (a + a^dag)/2`` and ``X- = (a - a^dag)/(2i)``, so the vacuum variance
  of either quadrature is exactly 1/4.
* Quadratures are interleaved, ``(X+_1, X-_1, X+_2, X-_2, ...)``; mode ``k``
  occupies rows ``2k`` and ``2k + 1``.

All operations return new :class:`GaussianState` objects; inputs are never
modified.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidState, PreconditionViolation

VACUUM_VARIANCE = 0.25

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10
UNCERTAINTY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-12


def _symmetrize(cov):
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an ``n_modes``-mode Gaussian state.

    Args:
        mean: Real vector of length ``2 * n_modes``.
        cov: Real symmetric ``2n x 2n`` covariance in units where vacuum is 1/4.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 or mean.size == 0:
            raise InvalidArgument(f"mean must be a non-empty vector of even length, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise InvalidArgument(f"cov shape {cov.shape} does not match mean length {mean.size}")
        mean.setflags(write=False)
        cov = _symmetrize(cov)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def mode_block(self, mode: int) -> np.ndarray:
        """Return the 2x2 covariance block of one mode."""
        k = _check_mode(self, mode)
        return self.cov[2 * k:2 * k + 2, 2 * k:2 * k + 2].copy()

    def validate(self) -> None:
        """Check symmetry, positive semidefiniteness and per-mode uncertainty.

        Raises:
            InvalidState: if any of the three conditions fails.
        """
        if np.max(np.abs(self.cov - self.cov.T)) > SYMMETRY_TOL:
            raise InvalidState("covariance matrix is not symmetric")
        min_eig = np.linalg.eigvalsh(self.cov).min()
        if min_eig < -PSD_TOL:
            raise InvalidState(f"covariance matrix has negative eigenvalue {min_eig:.3e}")
        for k in range(self.n_modes):
            block = self.cov[2 * k:2 * k + 2, 2 * k:2 * k + 2]
            if block[0, 0] * block[1, 1] < 1 / 16 - UNCERTAINTY_TOL:
                raise InvalidState(f"mode {k} violates the quadrature uncertainty bound")

    def allclose(self, other: GaussianState, atol: float = 1e-12) -> bool:
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=0.0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0.0, atol=atol)
        )


class Axis(str, enum.Enum):
    """Which quadrature a squeezer reduces."""

    AMPLITUDE = "amplitude"
    PHASE = "phase"


@dataclass(frozen=True)
class SqueezerSpec:
    """Output noise of one degenerate parametric amplifier.

    ``r`` is the squeezing parameter and ``r_prime`` the extra noise factor on
    the anti-squeezed quadrature: the squeezed quadrature variance is
    ``e^{-2r}/4`` and the anti-squeezed one ``e^{2(r + r_prime)}/4``.
    """

    r: float
    r_prime: float = 0.0
    axis: Axis = Axis.AMPLITUDE

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r >= 0):
            raise InvalidArgument(f"squeezing parameter must be >= 0, got {self.r}")
        if not (np.isfinite(self.r_prime) and self.r_prime >= 0):
            raise InvalidArgument(f"excess noise factor must be >= 0, got {self.r_prime}")
        object.__setattr__(self, "axis", Axis(self.axis))

    def block(self) -> np.ndarray:
        squeezed = np.exp(-2 * self.r) * VACUUM_VARIANCE
        anti = np.exp(2 * (self.r + self.r_prime)) * VACUUM_VARIANCE
        if self.axis is Axis.AMPLITUDE:
            return np.diag([squeezed, anti])
        return np.diag([anti, squeezed])


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """Real ``2n x 2n`` matrix acting on the quadrature vector."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidArgument(f"symplectic matrix must be square of even size, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @classmethod
    def identity(cls, n: int) -> SymplecticTransform:
        return cls(np.eye(2 * n))

    def __matmul__(self, other: SymplecticTransform) -> SymplecticTransform:
        """``S2 @ S1`` applies ``S1`` first."""
        if self.n_modes != other.n_modes:
            raise InvalidArgument("cannot compose transforms on different mode counts")
        return SymplecticTransform(self.matrix @ other.matrix)

    def symplectic_error(self) -> float:
        J = symplectic_form(self.n_modes)
        return float(np.max(np.abs(self.matrix @ J @ self.matrix.T - J)))

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return self.symplectic_error() <= tol


def symplectic_form(n: int) -> np.ndarray:
    """Block-diagonal form with 2x2 blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_mode(state, mode) -> int:
    k = int(mode)
    if k != mode or not 0 <= k < state.n_modes:
        raise InvalidArgument(f"mode {mode!r} out of range for {state.n_modes}-mode state")
    return k


def vacuum_state(n: int) -> GaussianState:
    """Vacuum of ``n`` modes: zero mean and covariance ``I/4``."""
    if int(n) != n or n < 1:
        raise InvalidArgument(f"mode count must be a positive integer, got {n!r}")
    n = int(n)
    return GaussianState(np.zeros(2 * n), VACUUM_VARIANCE * np.eye(2 * n))


def set_dopa_output(state: GaussianState, mode: int, spec: SqueezerSpec) -> GaussianState:
    """Replace an uncorrelated mode by the output of a squeezer.

    The squeezer acts as a source: with ``r_prime > 0`` it produces an impure
    state that no symplectic map can reach from vacuum, so the mode's 2x2
    covariance block is overwritten rather than transformed.

    Raises:
        PreconditionViolation: if the mode already has cross-covariance with
            another mode.
    """
    k = _check_mode(state, mode)
    cov = np.array(state.cov)
    rows = np.delete(cov[2 * k:2 * k + 2, :], [2 * k, 2 * k + 1], axis=1)
    if np.any(np.abs(rows) > SYMMETRY_TOL):
        raise PreconditionViolation(f"mode {k} is correlated with other modes; a squeezer only sets source blocks")
    cov[2 * k:2 * k + 2, 2 * k:2 * k + 2] = spec.block()
    return GaussianState(state.mean, cov)


def loss_channel(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Attenuate one mode with power transmission ``eta``.

    The mode block becomes ``eta * block + (1 - eta) / 4 * I``, its cross blocks
    and mean scale by ``sqrt(eta)``.
    """
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgument(f"transmission must lie in [0, 1], got {eta}")
    k = _check_mode(state, mode)
    scale = np.ones(2 * state.n_modes)
    scale[2 * k:2 * k + 2] = np.sqrt(eta)
    cov = state.cov * np.outer(scale, scale)
    cov[2 * k:2 * k + 2, 2 * k:2 * k + 2] += (1.0 - eta) * VACUUM_VARIANCE * np.eye(2)
    return GaussianState(state.mean * scale, cov)


def phase_shift_transform(n: int, mode: int, phi: float) -> SymplecticTransform:
    """Rotation ``a -> a e^{i phi}`` of one mode."""
    S = np.eye(2 * n)
    k = _check_mode(vacuum_state(n), mode)
    c, s = np.cos(phi), np.sin(phi)
    S[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [[c, -s], [s, c]]
    return SymplecticTransform(S)


def beamsplitter_transform(n: int, m1: int, m2: int, reflectivity: float, phase: float = 0.0) -> SymplecticTransform:
    """Beam splitter between modes ``m1`` and ``m2``.

    With ``T = 1 - R`` the amplitudes mix as::

        out1 = sqrt(T) in1 + sqrt(R) in2
        out2 = sqrt(R) in1 - sqrt(T) in2

    after ``in2`` has been rotated by ``phase``.
    """
    if not 0.0 <= reflectivity <= 1.0:
        raise InvalidArgument(f"reflectivity must lie in [0, 1], got {reflectivity}")
    probe = vacuum_state(n)
    k1, k2 = _check_mode(probe, m1), _check_mode(probe, m2)
    if k1 == k2:
        raise InvalidArgument("beam splitter needs two distinct modes")
    t, r = np.sqrt(1.0 - reflectivity), np.sqrt(reflectivity)
    U = np.eye(n)
    U[k1, k1], U[k1, k2] = t, r
    U[k2, k1], U[k2, k2] = r, -t
    mix = SymplecticTransform(np.kron(U, np.eye(2)))
    if phase == 0.0:
        return mix
    return mix @ phase_shift_transform(n, k2, phase)


def apply_transform(state: GaussianState, S: SymplecticTransform) -> GaussianState:
    """Map ``mean -> S mean`` and ``cov -> S cov S^T``."""
    if S.n_modes != state.n_modes:
        raise InvalidArgument(f"transform acts on {S.n_modes} modes, state has {state.n_modes}")
    M = S.matrix
    return GaussianState(M @ state.mean, M @ state.cov @ M.T)


def linear_form_variance(state: GaussianState, c) -> float:
    """Variance ``c^T cov c`` of the quadrature linear form ``c . xi``."""
    c = np.asarray(c, dtype=float)
    if c.shape != state.mean.shape:
        raise InvalidArgument(f"form length {c.shape} does not match state dimension {state.mean.shape}")
    return float(c @ state.cov @ c)


def extend_with_vacuum(state: GaussianState, extra: int) -> GaussianState:
    """Append ``extra`` uncorrelated vacuum modes."""
    if extra < 0:
        raise InvalidArgument("cannot append a negative number of modes")
    if extra == 0:
        return state
    n = 2 * (state.n_modes + extra)
    cov = VACUUM_VARIANCE * np.eye(n)
    d = state.mean.size
    cov[:d, :d] = state.cov
    return GaussianState(np.concatenate([state.mean, np.zeros(n - d)]), cov)
