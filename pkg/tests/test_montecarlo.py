import math

import numpy as np
import pytest
from conftest import ghz
from scipy.linalg import expm

from tripol.criteria import closed_form_I, evaluate_criteria, optimal_gains_closed_form
from tripol.errors import InvalidArgument, InvalidState
from tripol.gaussian import Axis, GaussianState, SqueezerSpec, set_dopa_output, vacuum_state
from tripol.montecarlo import (
    BLOCK_SIZE,
    analytic_stokes_variances,
    mc_criteria,
    mc_stokes_moments,
    sample_quadratures,
    validate_linearization,
)
from tripol.polarization import BrightBeam, FormMode, stokes_means

N = 200_000


class TestSampler:
    def test_vacuum_variances(self):
        n = 1_000_000
        q = sample_quadratures(vacuum_state(2), n, seed=1).quadratures
        se = 0.25 * math.sqrt(2 / n)
        assert np.all(np.abs(q.var(axis=0, ddof=1) - 0.25) <= 4 * se)

    def test_squeezed_variance(self):
        n = 1_000_000
        s = set_dopa_output(vacuum_state(1), 0, SqueezerSpec(0.5, 0.0, Axis.AMPLITUDE))
        q = sample_quadratures(s, n, seed=2).quadratures
        v = math.exp(-1) / 4
        assert abs(q[:, 0].var(ddof=1) - v) <= 4 * v * math.sqrt(2 / n)

    def test_mean_included(self):
        s = GaussianState([1.0, -2.0], 0.25 * np.eye(2))
        q = sample_quadratures(s, 10_000, seed=0).quadratures
        np.testing.assert_allclose(q.mean(axis=0), [1.0, -2.0], atol=0.03)

    def test_field_layout(self):
        batch = sample_quadratures(vacuum_state(2), 1000, seed=0)
        np.testing.assert_array_equal(batch.fields[:, 1].imag, batch.quadratures[:, 3])

    def test_bitwise_deterministic(self):
        state, _ = ghz((0.6, 0.6, 0.6))
        a = sample_quadratures(state, 3 * BLOCK_SIZE + 17, seed=42).quadratures
        b = sample_quadratures(state, 3 * BLOCK_SIZE + 17, seed=42).quadratures
        assert a.tobytes() == b.tobytes()

    def test_independent_of_workers(self):
        state, _ = ghz((0.3, 0.6, 0.9))
        n = 4 * BLOCK_SIZE + 5
        a = sample_quadratures(state, n, seed=9, workers=1).quadratures
        b = sample_quadratures(state, n, seed=9, workers=4).quadratures
        assert a.tobytes() == b.tobytes()

    def test_prefix_stable(self):
        state, _ = ghz((0.6, 0.6, 0.6))
        short = sample_quadratures(state, BLOCK_SIZE + 10, seed=3).quadratures
        long = sample_quadratures(state, 2 * BLOCK_SIZE, seed=3).quadratures
        assert short.tobytes() == long[: BLOCK_SIZE + 10].tobytes()

    def test_seeds_differ(self):
        a = sample_quadratures(vacuum_state(1), 1000, seed=0).quadratures
        b = sample_quadratures(vacuum_state(1), 1000, seed=1).quadratures
        assert not np.array_equal(a, b)

    def test_non_psd_rejected(self):
        with pytest.raises(InvalidState):
            sample_quadratures(GaussianState(np.zeros(2), np.diag([0.25, -0.5])), 1000, seed=0)

    def test_bad_count(self):
        with pytest.raises(InvalidArgument):
            sample_quadratures(vacuum_state(1), 0, seed=0)


class TestCriteriaEstimates:
    def test_coherent(self):
        state, beams = ghz()
        res = mc_criteria(state, beams, (0, 0, 0), N, seed=5)
        for v, e in zip(res.I, res.se):
            assert abs(v - 1.0) <= 3 * e

    def test_squeezed_linearized(self):
        state, beams = ghz((0.6, 0.6, 0.6))
        g = optimal_gains_closed_form([(0.6, 0.0)] * 3)
        res = mc_criteria(state, beams, g, N, seed=6)
        ref = closed_form_I([(0.6, 0.0)] * 3, g)
        for v, e, r in zip(res.I, res.se, ref):
            assert abs(v - r) <= 3 * e

    def test_asymmetric_inputs(self):
        r, rp, g = (0.2, 0.9, 0.5), (0.1, 0.3, 0.0), (0.4, 1.3, 0.8)
        state, beams = ghz(r, rp, alpha_c=2.0, alpha_a=0.2)
        ref = evaluate_criteria(state, beams, g, FormMode.FULL).values
        res = mc_criteria(state, beams, g, N, seed=7, form_mode=FormMode.FULL)
        for v, e, x in zip(res.I, res.se, ref):
            assert abs(v - x) <= 3 * e

    def test_seeds_agree_within_errors(self):
        state, beams = ghz((0.6, 0.6, 0.6))
        a = mc_criteria(state, beams, (0.8, 0.8, 0.8), N, seed=10)
        b = mc_criteria(state, beams, (0.8, 0.8, 0.8), N, seed=11)
        for x, y, ex, ey in zip(a.I, b.I, a.se, b.se):
            assert abs(x - y) <= 4 * math.hypot(ex, ey)

    def test_repeatable(self):
        state, beams = ghz((0.6, 0.6, 0.6))
        a = mc_criteria(state, beams, (0.8, 0.8, 0.8), 5000, seed=3, stokes_mode="exact")
        b = mc_criteria(state, beams, (0.8, 0.8, 0.8), 5000, seed=3, stokes_mode="exact")
        assert a == b

    def test_exact_coherent_needs_ordering_correction(self):
        state, beams = ghz(alpha_c=math.sqrt(30))
        on = mc_criteria(state, beams, (0, 0, 0), N, seed=12, stokes_mode="exact", form_mode=FormMode.FULL)
        off = mc_criteria(
            state, beams, (0, 0, 0), N, seed=12, stokes_mode="exact", form_mode=FormMode.FULL, ordering_correction=False
        )
        for v, e in zip(on.I, on.se):
            assert abs(v - 1.0) <= 3 * e
        # four unit-gain Stokes terms each carry 1/2, against 4 alpha_c^2 = 120
        for v in off.I:
            assert v - 1.0 == pytest.approx(2.0 / 120, abs=4 * on.se[0])

    @pytest.mark.parametrize("n", [0, 999])
    def test_small_n_refused(self, n):
        state, beams = ghz()
        with pytest.raises(InvalidArgument, match="at least 1000"):
            mc_criteria(state, beams, (0, 0, 0), n, seed=0)

    def test_unknown_mode(self):
        state, beams = ghz()
        with pytest.raises(InvalidArgument):
            mc_criteria(state, beams, (0, 0, 0), 1000, seed=0, stokes_mode="nonlinear")


def fock_ops(dim):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    eye = np.eye(dim)
    return np.kron(a, eye), np.kron(eye, a)


def fock_state(dim, r, theta_sq, alpha_h, alpha_v):
    """Squeezed displaced H mode and coherent V mode as a state vector."""
    aH, aV = fock_ops(dim)
    vac = np.zeros(dim * dim)
    vac[0] = 1.0
    zeta = r * np.exp(1j * theta_sq)
    S = expm(0.5 * (np.conj(zeta) * aH @ aH - zeta * aH.conj().T @ aH.conj().T))
    D = expm(alpha_h * aH.conj().T - np.conj(alpha_h) * aH + alpha_v * aV.conj().T - np.conj(alpha_v) * aV)
    return D @ S @ vac


class TestOrderingOracle:
    """Quantum Stokes moments from a truncated Fock space against Wigner sampling."""

    dim = 28

    def quantum_moments(self, psi, theta):
        aH, aV = fock_ops(self.dim)
        ph = np.exp(1j * theta)
        ops = [
            aH.conj().T @ aH + aV.conj().T @ aV,
            aH.conj().T @ aH - aV.conj().T @ aV,
            aH.conj().T @ aV * ph + aV.conj().T @ aH / ph,
            1j * aV.conj().T @ aH / ph - 1j * aH.conj().T @ aV * ph,
        ]
        means = [np.vdot(psi, O @ psi).real for O in ops]
        variances = [np.vdot(psi, O @ O @ psi).real - m**2 for O, m in zip(ops, means)]
        quads = [(aH + aH.conj().T) / 2, (aH - aH.conj().T) / 2j, (aV + aV.conj().T) / 2, (aV - aV.conj().T) / 2j]
        qm = np.array([np.vdot(psi, X @ psi).real for X in quads])
        cov = np.array([[np.vdot(psi, (X @ Y + Y @ X) @ psi).real / 2 for Y in quads] for X in quads]) - np.outer(qm, qm)
        return np.array(means), np.array(variances), cov

    @pytest.mark.parametrize("theta", [0.0, 0.7])
    def test_exact_mode_matches_quantum(self, theta):
        psi = fock_state(self.dim, 0.3, 0.4, 0.35, 1.4)
        means, variances, cov = self.quantum_moments(psi, theta)
        state = GaussianState(np.zeros(4), cov)
        beam = BrightBeam("d", 0, 1, 1.4, 0.35, theta)
        n = 1_000_000
        (row,) = mc_stokes_moments(state, [beam], n, seed=21, stokes_mode="exact")
        for k in range(4):
            assert abs(row["var"][k] - variances[k]) <= 4 * row["var_se"][k]
        # sampled S2, S3 means include the squeezed-vacuum cross moment, S0 and S1 the photon number
        for k in range(4):
            assert abs(row["mean"][k] - means[k]) <= 4 * row["mean_se"][k]

    def test_offset_is_one_half(self):
        psi = fock_state(self.dim, 0.3, 0.0, 0.0, 1.2)
        _, variances, cov = self.quantum_moments(psi, 0.0)
        state = GaussianState(np.zeros(4), cov)
        beam = BrightBeam("d", 0, 1, 1.2)
        n = 1_000_000
        (on,) = mc_stokes_moments(state, [beam], n, seed=22, stokes_mode="exact")
        (off,) = mc_stokes_moments(state, [beam], n, seed=22, stokes_mode="exact", ordering_correction=False)
        for k in range(4):
            assert off["var"][k] - on["var"][k] == pytest.approx(0.5, abs=1e-12)
            assert abs(off["var"][k] - 0.5 - variances[k]) <= 4 * off["var_se"][k]


class TestStokesMoments:
    def test_exact_means_coherent(self):
        state, beams = ghz(alpha_c=math.sqrt(30), alpha_a=1.0)
        rows = mc_stokes_moments(state, beams, N, seed=30)
        for row, beam in zip(rows, beams):
            for k, ref in enumerate(stokes_means(beam)):
                assert abs(row["mean"][k] - ref) <= 3 * row["mean_se"][k]

    def test_linearized_matches_analytic(self):
        state, beams = ghz((0.6, 0.2, 0.4), alpha_c=3.0, alpha_a=0.4)
        rows = mc_stokes_moments(state, beams, N, seed=31, stokes_mode="linearized")
        for row, beam in zip(rows, beams):
            for v, e, ref in zip(row["var"], row["var_se"], analytic_stokes_variances(state, beam)):
                assert abs(v - ref) <= 4 * e


class TestLinearizationTable:
    def test_coherent_full_form_exact(self):
        state, beams = ghz(alpha_c=math.sqrt(30))
        table = validate_linearization(state, beams, N, seed=40, ratios=[1 / 30])
        assert table[0]["max_deviation_full"] <= 0.01

    def test_approx_deviation_shrinks_with_ratio(self):
        state, beams = ghz(alpha_c=math.sqrt(30))
        ratios = [1.0, 0.3, 0.1, 1 / 30, 0.01, 0.001]
        table = validate_linearization(state, beams, N, seed=41, ratios=ratios)
        devs = [row["max_deviation_paper_approx"] for row in table]
        assert all(a > b for a, b in zip(devs, devs[1:]))
        assert devs[-1] < 0.02
        assert devs[0] > 10 * devs[3]

    def test_bad_ratio(self):
        state, beams = ghz()
        with pytest.raises(InvalidArgument):
            validate_linearization(state, beams, 1000, seed=0, ratios=[0.0])
