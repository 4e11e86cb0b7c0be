import math

import numpy as np
import pytest
from conftest import ghz
from hypothesis import given, settings
from hypothesis import strategies as st

from tripol.criteria import (
    CriteriaResult,
    GainVector,
    closed_form_I,
    criterion_value,
    evaluate_criteria,
    genuine_bound_check,
    noise_factors,
    optimal_gain_numeric,
    optimal_gains_closed_form,
    optimal_gains_numeric,
)
from tripol.errors import DegenerateSNL, InvalidArgument, UnsupportedConfiguration
from tripol.gaussian import vacuum_state
from tripol.polarization import BrightBeam

PATTERN = np.array(
    [
        [math.sqrt(1 / 3), math.sqrt(2 / 3), 0.0],
        [math.sqrt(1 / 3), -math.sqrt(1 / 6), math.sqrt(1 / 2)],
        [math.sqrt(1 / 3), -math.sqrt(1 / 6), -math.sqrt(1 / 2)],
    ]
)


def pattern_oracle(r, rp, gains):
    """Criteria from the explicit output amplitudes, independent of the circuit compiler.

    Input 1 is phase squeezed, inputs 2 and 3 amplitude squeezed. With
    ``alpha_a = 0`` the S2 fluctuation of beam j is ``2 alpha_c X+_j`` and the
    S3 fluctuation ``-2 alpha_c X-_j``; the common factor cancels against the
    shot-noise normalization.
    """
    r, rp = np.asarray(r), np.asarray(rp)
    vx = np.array([math.exp(2 * (r[0] + rp[0])), math.exp(-2 * r[1]), math.exp(-2 * r[2])]) / 4
    vp = np.array([math.exp(-2 * r[0]), math.exp(2 * (r[1] + rp[1])), math.exp(2 * (r[2] + rp[2]))]) / 4
    cx = PATTERN @ np.diag(vx) @ PATTERN.T
    cp = PATTERN @ np.diag(vp) @ PATTERN.T
    out = []
    for j, (p, m) in enumerate([(1, 2), (0, 2), (0, 1)]):
        diff = np.zeros(3)
        diff[p], diff[m] = 1.0, -1.0
        w = np.ones(3)
        w[j] = gains[j]
        out.append(4 * (diff @ cx @ diff + w @ cp @ w) / 4)
    return tuple(out)


def draw(rng):
    r = rng.uniform(0, 1.5, 3)
    rp = rng.uniform(0, 1, 3)
    g = rng.uniform(0, 2, 3)
    return r, rp, g


class TestOracleEquivalence:
    def test_pattern_oracle_vs_closed_form(self, rng):
        for _ in range(100):
            r, rp, g = draw(rng)
            ref = pattern_oracle(r, rp, g)
            got = closed_form_I(list(zip(r, rp)), g)
            np.testing.assert_allclose(got, ref, rtol=1e-12)

    def test_propagation_vs_pattern_oracle(self, rng):
        for _ in range(25):
            r, rp, g = draw(rng)
            state, beams = ghz(r, rp, alpha_c=rng.uniform(0.5, 5))
            res = evaluate_criteria(state, beams, g)
            np.testing.assert_allclose(res.values, pattern_oracle(r, rp, g), rtol=1e-10)

    def test_reference_values(self):
        p = [(0.6, 0.0)] * 3
        g = optimal_gains_closed_form(p)
        assert g.g1 == pytest.approx(0.8698275587866615, abs=1e-14)
        np.testing.assert_allclose(closed_form_I(p, g), [0.36669096842926785] * 3, rtol=1e-13)

    def test_coherent_values(self):
        p = [(0.0, 0.0)] * 3
        assert closed_form_I(p, (0, 0, 0)) == (1.0, 1.0, 1.0)
        np.testing.assert_allclose(closed_form_I(p, (1, 1, 1)), [1.25] * 3, rtol=1e-15)

    def test_bad_params(self):
        with pytest.raises(InvalidArgument):
            closed_form_I([(0.1, 0.0)] * 2, (0, 0, 0))
        with pytest.raises(InvalidArgument):
            closed_form_I([(-0.1, 0.0)] * 3, (0, 0, 0))


class TestGains:
    def test_numeric_vs_closed_form(self, rng):
        for _ in range(100):
            r, rp, _ = draw(rng)
            state, beams = ghz(r, rp)
            np.testing.assert_allclose(
                optimal_gains_numeric(state, beams), optimal_gains_closed_form(list(zip(r, rp))), atol=1e-8
            )

    def test_zero_squeezing(self):
        assert optimal_gains_closed_form([(0.0, 0.0)] * 3) == (0.0, 0.0, 0.0)
        state, beams = ghz()
        for j in range(3):
            g, i_min = optimal_gain_numeric(state, beams, j)
            assert abs(g) <= 1e-12 and abs(i_min - 1.0) <= 1e-12

    def test_symmetric_r06(self):
        state, beams = ghz((0.6, 0.6, 0.6))
        for j in range(3):
            g, _ = optimal_gain_numeric(state, beams, j)
            assert g == pytest.approx(0.86983, abs=5e-6)
            assert g == pytest.approx(optimal_gains_closed_form([(0.6, 0.0)] * 3)[j], abs=1e-9)

    def test_observed_gain(self):
        # invert g = (2E - 2)/(2E + 1) at g = 0.845 to get the exponent sum 2 * 1.10843
        s = 1.10843
        p = [(s / 3, 0.0), (s / 3, s / 3), (s / 3, s / 3)]
        g = optimal_gains_closed_form(p)
        assert abs(g.g1 - 0.845) <= 5e-4
        sym = optimal_gains_closed_form([(s / 2, 0.0)] * 3)
        assert sym.g1 == sym.g2 == sym.g3
        assert abs(sym.g1 - 0.845) <= 5e-4

    def test_vertex_beats_probes(self, rng):
        r, rp, _ = draw(rng)
        state, beams = ghz(r, rp)
        for j in range(3):
            g, i_min = optimal_gain_numeric(state, beams, j)
            probes = rng.uniform(-3, 3, 100)
            assert all(criterion_value(state, beams, j, x) >= i_min - 1e-12 for x in probes)
            assert criterion_value(state, beams, j, g) == pytest.approx(i_min, rel=1e-12)

    def test_loss_moves_gain_toward_zero(self):
        p = [(0.8, 0.1)] * 3
        g_full = optimal_gains_closed_form(p).g1
        g_lossy = optimal_gains_closed_form(p, eta=0.5).g1
        assert 0 < g_lossy < g_full


class TestLoss:
    def test_factors(self):
        sq, anti = noise_factors([(0.5, 0.1)] * 3, eta=0.8)
        assert sq[0] == pytest.approx(0.8 * math.exp(-1) + 0.2)
        assert anti[0] == pytest.approx(0.8 * math.exp(1.2) + 0.2)

    def test_closed_form_with_loss_matches_propagation(self, rng):
        from tripol.circuit import compile_circuit
        from tripol.sweep import PresetParams

        for _ in range(10):
            r, rp, g = draw(rng)
            eta = rng.uniform(0.2, 1.0)
            p = PresetParams(tuple(r), tuple(rp), eta=eta)
            state, beams = compile_circuit(p.circuit())
            got = evaluate_criteria(state, beams, g).values
            np.testing.assert_allclose(got, closed_form_I(p.modes(), g, eta), rtol=1e-10)

    def test_bad_eta(self):
        with pytest.raises(InvalidArgument):
            noise_factors([(0.1, 0.0)] * 3, eta=0.0)


class TestProperties:
    def test_symmetry(self, rng):
        for _ in range(20):
            r, rp = rng.uniform(0, 1.5), rng.uniform(0, 1)
            state, beams = ghz((r, r, r), (rp, rp, rp))
            res = evaluate_criteria(state, beams, "optimal")
            assert max(res.values) - min(res.values) <= 1e-12

    def test_monotone_in_common_r(self):
        grid = np.round(np.arange(0, 1.51, 0.1), 10)
        prev = None
        for r in grid:
            state, beams = ghz((r, r, r))
            vals = np.array(evaluate_criteria(state, beams, "optimal").values)
            if prev is not None:
                assert np.all(vals <= prev + 1e-15)
            prev = vals

    def test_scale_invariance(self, rng):
        r, rp, g = draw(rng)
        base = evaluate_criteria(*ghz(r, rp, alpha_c=1.0, alpha_a=0.1), g).values
        for s in (0.3, 7.0, 55.0):
            scaled = evaluate_criteria(*ghz(r, rp, alpha_c=s, alpha_a=0.1 * s), g).values
            assert np.max(np.abs(np.subtract(scaled, base))) <= 1e-12

    def test_degenerate_snl(self):
        with pytest.warns(UserWarning):
            state, beams = ghz(alpha_c=1.0, alpha_a=1.0)
        with pytest.raises(DegenerateSNL):
            evaluate_criteria(state, beams, (0, 0, 0))

    def test_unequal_powers(self):
        beams = [BrightBeam("a", 0, 3, 1.0), BrightBeam("b", 1, 4, 1.0), BrightBeam("c", 2, 5, 2.0)]
        with pytest.raises(UnsupportedConfiguration):
            evaluate_criteria(vacuum_state(6), beams, (0, 0, 0))

    def test_needs_three_beams(self):
        state, beams = ghz()
        with pytest.raises(InvalidArgument):
            evaluate_criteria(state, beams[:2], (0, 0, 0))

    def test_unknown_policy(self):
        with pytest.raises(InvalidArgument):
            evaluate_criteria(*ghz(), "best")


class TestVerdicts:
    @pytest.mark.parametrize(
        "values, total, genuine",
        [((1, 1, 1), 3.0, False), ((0.42, 0.41, 0.42), 1.25, True), ((0.9, 0.9, 0.9), 2.7, False)],
    )
    def test_bound(self, values, total, genuine):
        s, flag = genuine_bound_check(*values)
        assert s == pytest.approx(total, abs=1e-12)
        assert flag is genuine

    def test_inseparable_not_genuine(self):
        res = CriteriaResult(0.9, 0.9, 0.9, GainVector(0, 0, 0), 4.0)
        assert res.inseparable and not res.genuine

    def test_negative_rejected(self):
        with pytest.raises(InvalidArgument):
            genuine_bound_check(-0.1, 1, 1)

    def test_as_dict(self):
        d = evaluate_criteria(*ghz((0.6, 0.6, 0.6)), "optimal").as_dict()
        assert d["genuine"] and d["inseparable"]
        assert d["sum"] == pytest.approx(3 * 0.36669096842926785)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 4), min_size=3, max_size=3))
def test_verdict_definitions(values):
    res = CriteriaResult(*values, gains=GainVector(0, 0, 0), snl=4.0)
    assert res.inseparable == (sum(v < 1 for v in values) >= 2)
    assert res.genuine == (sum(values) < 2)
    assert res.sum == pytest.approx(sum(values))
