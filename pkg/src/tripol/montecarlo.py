"""Monte Carlo oracle for the Stokes-operator variances and criteria.

Quadrature fluctuations are drawn from the Gaussian Wigner distribution of a
state. Stokes quantities are then formed either from the linear forms of
:mod:`tripol.polarization` (``linearized``) or directly from the complex field
samples (``exact``).

Wigner samples reproduce symmetric-ordered moments. The Stokes operators of a
bright beam are products of an H and a V field, and for Gaussian states the
symmetric-ordered variance of such a product exceeds the quantum variance by
exactly 1/2 per beam, independent of the state. ``exact`` estimates subtract
``sum_j g_j^2 / 2`` from the variance of ``sum_j g_j S(d_j)`` by default, and
the S0 sample mean is lowered by 1 (1/2 per mode).

Samples are generated in fixed-size blocks; block ``b`` draws from a Philox
stream keyed by ``(seed, b)``, so every sample is a function of the seed and
its index only and results do not depend on how blocks are distributed over
workers.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .criteria import _S2_PAIRS, GainVector
from .errors import DegenerateSNL, InvalidArgument, InvalidState
from .gaussian import PSD_TOL, GaussianState, linear_form_variance
from .polarization import (
    BrightBeam,
    FormMode,
    StokesIndex,
    snl_denominator,
    stokes_fluctuation_form,
    stokes_means,
    stokes_values,
)

BLOCK_SIZE = 1 << 16
MIN_SAMPLES = 1000
ORDERING_OFFSET = 0.5
# symmetric-ordered |a|^2 exceeds a^dag a by 1/2 per mode; S0 sums two modes, S1 takes their difference
MEAN_ORDERING_OFFSET = np.array([1.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True, eq=False)
class SampleBatch:
    n_samples: int
    seed: int
    quadratures: np.ndarray

    @property
    def fields(self) -> np.ndarray:
        """Complex field fluctuations ``x+ + i x-`` per mode, shape ``(n, n_modes)``."""
        return self.quadratures[:, 0::2] + 1j * self.quadratures[:, 1::2]


def _factor(cov: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(cov)
    if w.min() < -PSD_TOL:
        raise InvalidState(f"covariance has negative eigenvalue {w.min():.3e}")
    return V * np.sqrt(np.clip(w, 0.0, None))


def _block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(ss))


def _draw_block(mean, L, seed, block, count):
    z = _block_rng(seed, block).standard_normal((BLOCK_SIZE, L.shape[0]))[:count]
    return mean + z @ L.T


def _blocks(n):
    return [(b, min(BLOCK_SIZE, n - b * BLOCK_SIZE)) for b in range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)]


def sample_quadratures(state: GaussianState, n: int, seed: int, workers: int = 1) -> SampleBatch:
    """Draw ``n`` quadrature vectors from the state's Wigner distribution.

    Raises:
        InvalidState: if the covariance is not PSD within tolerance.
    """
    if int(n) != n or n < 1:
        raise InvalidArgument(f"sample count must be a positive integer, got {n!r}")
    n = int(n)
    L = _factor(state.cov)
    jobs = _blocks(n)

    def run(job):
        return _draw_block(state.mean, L, seed, *job)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    return SampleBatch(n, int(seed), np.concatenate(parts))


def _merged_moments(values: np.ndarray):
    """Mean and variance by ordered pairwise (Chan) merging of per-block moments.

    ``values`` has shape ``(n, k)``; returns ``(mean, var)`` of length ``k``.
    """
    parts = []
    for start in range(0, values.shape[0], BLOCK_SIZE):
        chunk = values[start:start + BLOCK_SIZE]
        m = chunk.mean(axis=0)
        parts.append((chunk.shape[0], m, ((chunk - m) ** 2).sum(axis=0)))
    while len(parts) > 1:
        merged = []
        for i in range(0, len(parts) - 1, 2):
            (na, ma, sa), (nb, mb, sb) = parts[i], parts[i + 1]
            n = na + nb
            d = mb - ma
            merged.append((n, ma + d * nb / n, sa + sb + d * d * na * nb / n))
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    n, m, s = parts[0]
    return m, s / (n - 1)


def _exact_stokes(batch: SampleBatch, beam: BrightBeam) -> np.ndarray:
    f = batch.fields
    return stokes_values(beam.alpha_a + f[:, beam.h_mode], beam.alpha_c + f[:, beam.v_mode], beam.theta)


def _combination_samples(batch, beams, ks, gains, stokes_mode, form_mode):
    """Per-sample values of ``sum_j gains[j] S_{ks[j]}(beams[j])``."""
    out = np.zeros(batch.n_samples)
    for beam, k, g in zip(beams, ks, gains):
        if g == 0:
            continue
        if stokes_mode == "exact":
            out += g * _exact_stokes(batch, beam)[int(k)]
        else:
            out += g * (batch.quadratures @ stokes_fluctuation_form(beam, k, batch.quadratures.shape[1] // 2, form_mode))
    return out


def _variance_with_se(columns: np.ndarray):
    """Sample variances of the columns, plus SE of their sum from the variance-of-variance."""
    mean, var = _merged_moments(columns)
    z = ((columns - mean) ** 2).sum(axis=1)
    _, z_var = _merged_moments(z[:, None])
    return var, float(np.sqrt(z_var[0] / columns.shape[0]))


def _check_mode(stokes_mode):
    if stokes_mode not in ("linearized", "exact"):
        raise InvalidArgument(f"stokes_mode must be 'linearized' or 'exact', got {stokes_mode!r}")


@dataclass(frozen=True)
class MCCriteria:
    I: tuple
    se: tuple
    gains: GainVector
    snl: float
    n_samples: int
    seed: int
    stokes_mode: str

    def as_dict(self) -> dict:
        return {
            "I1": self.I[0],
            "I2": self.I[1],
            "I3": self.I[2],
            "se": list(self.se),
            "gains": list(self.gains),
            "snl": self.snl,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "stokes_mode": self.stokes_mode,
        }


def mc_criteria(
    state: GaussianState,
    beams: Sequence[BrightBeam],
    gains,
    n: int,
    seed: int,
    stokes_mode: str = "linearized",
    form_mode=FormMode.PAPER_APPROX,
    ordering_correction: bool = True,
    workers: int = 1,
    batch: SampleBatch | None = None,
) -> MCCriteria:
    """Estimate ``I1, I2, I3`` from samples, with standard errors.

    Args:
        gains: Three gains applied as in :func:`tripol.criteria.evaluate_criteria`.
        n: Number of samples, at least 1000.
        seed: Seed of the counter-based generator.
        stokes_mode: ``"linearized"`` or ``"exact"``.
        form_mode: Linearization used in ``linearized`` mode.
        ordering_correction: Subtract the Wigner ordering offset in ``exact`` mode.
        batch: Reuse existing samples instead of drawing new ones.
    """
    _check_mode(stokes_mode)
    if n < MIN_SAMPLES:
        raise InvalidArgument(f"refusing n={n}: at least {MIN_SAMPLES} samples are needed for meaningful standard errors")
    if len(beams) != 3:
        raise InvalidArgument("the tripartite criteria need exactly three beams")
    snl = snl_denominator(beams)
    if snl == 0.0:
        raise DegenerateSNL("alpha_a == alpha_c makes the shot-noise normalization vanish")
    gains = GainVector(*(float(x) for x in gains))
    if batch is None:
        batch = sample_quadratures(state, n, seed, workers)

    I, se = [], []
    for j in range(3):
        plus, minus = _S2_PAIRS[j]
        s2_gains = np.zeros(3)
        s2_gains[plus], s2_gains[minus] = 1.0, -1.0
        s3_gains = np.ones(3)
        s3_gains[j] = gains[j]
        cols = np.column_stack([
            _combination_samples(batch, beams, [StokesIndex.S2] * 3, s2_gains, stokes_mode, form_mode),
            _combination_samples(batch, beams, [StokesIndex.S3] * 3, s3_gains, stokes_mode, form_mode),
        ])
        var, err = _variance_with_se(cols)
        total = float(var.sum())
        if stokes_mode == "exact" and ordering_correction:
            total -= ORDERING_OFFSET * float((s2_gains**2).sum() + (s3_gains**2).sum())
        I.append(total / snl)
        se.append(err / snl)
    return MCCriteria(tuple(I), tuple(se), gains, snl, batch.n_samples, batch.seed, stokes_mode)


def mc_stokes_moments(
    state: GaussianState,
    beams: Sequence[BrightBeam],
    n: int,
    seed: int,
    stokes_mode: str = "exact",
    form_mode=FormMode.FULL,
    ordering_correction: bool = True,
    batch: SampleBatch | None = None,
) -> list[dict]:
    """Per-beam sample means and variances of S0..S3 with standard errors.

    In ``linearized`` mode the means are the analytic means plus the
    (zero-mean) linear fluctuations.
    """
    _check_mode(stokes_mode)
    if batch is None:
        batch = sample_quadratures(state, n, seed)
    rows = []
    for beam in beams:
        if stokes_mode == "exact":
            cols = _exact_stokes(batch, beam).T
        else:
            m = np.asarray(stokes_means(beam))
            forms = np.stack([stokes_fluctuation_form(beam, k, state.n_modes, form_mode) for k in StokesIndex])
            cols = m + batch.quadratures @ forms.T
        mean, var = _merged_moments(cols)
        centered = (cols - mean) ** 2
        _, var4 = _merged_moments(centered)
        if stokes_mode == "exact" and ordering_correction:
            var = var - ORDERING_OFFSET
            mean = mean - MEAN_ORDERING_OFFSET
        rows.append({
            "beam": beam.name,
            "mean": mean.tolist(),
            "mean_se": np.sqrt(var.clip(0) / batch.n_samples).tolist(),
            "var": var.tolist(),
            "var_se": np.sqrt(var4 / batch.n_samples).tolist(),
        })
    return rows


def validate_linearization(
    state: GaussianState,
    beams: Sequence[BrightBeam],
    n: int,
    seed: int,
    ratios: Sequence[float],
    ordering_correction: bool = True,
) -> list[dict]:
    """Compare exact and linearized Stokes variances as ``alpha_a^2 / alpha_c^2`` varies.

    For each ratio the beams' ``alpha_a`` is rescaled (``alpha_c`` kept) and the
    same samples are evaluated three ways: exact, fully linearized and in the
    ``paper_approx`` linearization. Relative deviations of the exact variances
    from each linearization are reported per beam and Stokes index.
    """
    for q in ratios:
        if not 0.0 < q <= 1.0:
            raise InvalidArgument(f"ratios must lie in (0, 1], got {q}")
    batch = sample_quadratures(state, n, seed)
    table = []
    for q in ratios:
        scaled = [_rescaled(b, q) for b in beams]
        exact = mc_stokes_moments(state, scaled, n, seed, "exact", ordering_correction=ordering_correction, batch=batch)
        full = mc_stokes_moments(state, scaled, n, seed, "linearized", FormMode.FULL, batch=batch)
        approx = mc_stokes_moments(state, scaled, n, seed, "linearized", FormMode.PAPER_APPROX, batch=batch)
        dev_full, dev_approx = [], []
        for e, f, a in zip(exact, full, approx):
            dev_full.append([abs(x / y - 1) for x, y in zip(e["var"], f["var"])])
            dev_approx.append([abs(x / y - 1) for x, y in zip(e["var"], a["var"])])
        table.append({
            "ratio": q,
            "exact_var": [e["var"] for e in exact],
            "full_var": [f["var"] for f in full],
            "paper_approx_var": [a["var"] for a in approx],
            "deviation_full": dev_full,
            "deviation_paper_approx": dev_approx,
            "max_deviation_full": float(np.max(dev_full)),
            "max_deviation_paper_approx": float(np.max(dev_approx)),
        })
    return table


def _rescaled(beam: BrightBeam, ratio: float) -> BrightBeam:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return replace(beam, alpha_a=beam.alpha_c * float(np.sqrt(ratio)))


def analytic_stokes_variances(state: GaussianState, beam: BrightBeam, form_mode=FormMode.FULL) -> list[float]:
    """Linearized variances of S0..S3 of one beam from the covariance."""
    return [linear_form_variance(state, stokes_fluctuation_form(beam, k, state.n_modes, form_mode)) for k in StokesIndex]
