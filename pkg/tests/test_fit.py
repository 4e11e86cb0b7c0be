import numpy as np
import pytest

from tripol.criteria import closed_form_I, optimal_gains_closed_form
from tripol.errors import InvalidArgument
from tripol.fit import MODELS, fit_parameters, forward_model

OBSERVED = (0.42, 0.41, 0.42)


class TestForwardModel:
    def test_symmetric_matches_closed_form(self):
        p = [(0.6, 0.1)] * 3
        pred, gains = forward_model("symmetric", {"r": 0.6, "r_prime": 0.1})
        assert gains == optimal_gains_closed_form(p)
        assert pred == closed_form_I(p, gains)

    def test_fixed_gain(self):
        pred, gains = forward_model("symmetric", {"r": 0.0, "r_prime": 0.0}, 1.0)
        assert tuple(gains) == (1.0, 1.0, 1.0)
        np.testing.assert_allclose(pred, [1.25] * 3)

    def test_two_group_layout(self):
        pred, _ = forward_model("two_group", {"r1": 0.3, "r1_prime": 0.0, "r23": 0.7, "r23_prime": 0.2})
        ref = closed_form_I([(0.3, 0.0), (0.7, 0.2), (0.7, 0.2)], optimal_gains_closed_form([(0.3, 0.0), (0.7, 0.2), (0.7, 0.2)]))
        assert pred == ref

    def test_loss_raises_values(self):
        lossless, _ = forward_model("with_loss", {"r": 0.6, "r_prime": 0.0, "eta": 1.0})
        lossy, _ = forward_model("with_loss", {"r": 0.6, "r_prime": 0.0, "eta": 0.7})
        assert all(b > a for a, b in zip(lossless, lossy))


class TestFit:
    def test_observed_values(self):
        res = fit_parameters(OBSERVED, "symmetric")
        assert res.converged
        assert res.residual <= 0.005
        assert abs(sum(res.predicted) - 1.25) <= 0.01
        d = res.as_dict()
        assert d["inseparable"] and d["genuine"]
        assert res.params["r"] >= 0 and res.params["r_prime"] >= 0

    def test_coherent_targets(self):
        res = fit_parameters((1.0, 1.0, 1.0), "symmetric")
        assert res.converged
        assert res.residual < 1e-10
        assert res.params["r"] == pytest.approx(0.0, abs=1e-6)

    def test_round_trip(self):
        target = closed_form_I([(0.6, 0.0)] * 3, optimal_gains_closed_form([(0.6, 0.0)] * 3))
        res = fit_parameters(target, "symmetric")
        assert res.converged
        assert res.params["r"] == pytest.approx(0.6, abs=1e-3)
        assert res.params["r_prime"] == pytest.approx(0.0, abs=1e-3)

    @pytest.mark.parametrize("model", MODELS)
    def test_every_model_reaches_observed(self, model):
        res = fit_parameters(OBSERVED, model)
        assert res.converged
        assert res.model == model
        # the network forces I1 = I2 = I3 for these reduced models, so the mean is the best reachable point
        assert res.residual == pytest.approx(np.std(OBSERVED), abs=1e-6)
        if "eta" in res.params:
            assert 0 < res.eta <= 1

    def test_uncertainty_weights(self):
        # a very precise I2 pulls the common value toward 0.41
        res = fit_parameters(OBSERVED, "symmetric", uncertainties=(1.0, 0.01, 1.0))
        assert res.predicted[1] == pytest.approx(0.41, abs=1e-3)

    def test_unreachable_targets(self):
        res = fit_parameters((0.01, 3.9, 0.01), "symmetric")
        assert not res.converged
        assert res.residual > 0.02

    def test_deterministic(self):
        a = fit_parameters(OBSERVED, "two_group")
        b = fit_parameters(OBSERVED, "two_group")
        assert a.params == b.params and a.residual == b.residual

    @pytest.mark.parametrize(
        "targets, kw",
        [
            ((0.4, 0.4), {}),
            ((0.0, 0.4, 0.4), {}),
            ((0.4, 0.4, 4.0), {}),
            (OBSERVED, {"model": "asymmetric"}),
            (OBSERVED, {"uncertainties": (0.1, 0.0, 0.1)}),
        ],
    )
    def test_invalid(self, targets, kw):
        with pytest.raises(InvalidArgument):
            fit_parameters(targets, **kw)
