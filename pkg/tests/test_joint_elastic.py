import numpy as np
import pytest

from laws.Elastic import (elastic_law, elastic_transition_density, elastic_transition_density_integral_form,
                          sojourn_law_as_elastic_product)
from laws.FreeSojourn import free_sojourn_density
from laws.JointDensity import joint_density_v1, joint_density_v2, joint_marginal
from utils.exceptions import DomainError


def _heat(z, t):
    return np.exp(-z ** 2 / (2.0 * t)) / np.sqrt(2.0 * np.pi * t)


class TestJointDensity:
    @pytest.mark.parametrize("mu", [-0.5, 0.0, 0.5])
    def test_forms_agree(self, mu):
        t = 1.0
        for s in np.linspace(0.05, 0.95, 10):
            for x in np.linspace(-2.0, 2.0, 10):
                assert joint_density_v1(mu, t, s, x) == pytest.approx(joint_density_v2(mu, t, s, x),
                                                                      rel=1e-8, abs=1e-14)

    @pytest.mark.parametrize("mu", [-0.4, 0.0, 0.4])
    @pytest.mark.parametrize("form", ["v1", "v2"])
    def test_marginal_is_free_density(self, mu, form):
        for s in (0.2, 0.5, 0.8):
            assert joint_marginal(mu, 1.0, s, form=form) == pytest.approx(free_sojourn_density(mu, 0.0, 1.0, s),
                                                                          abs=1e-6)

    def test_girsanov_weight(self):
        ratio = joint_density_v1(0.3, 1.0, 0.4, 0.7) / joint_density_v1(0.0, 1.0, 0.4, 0.7)
        assert ratio == pytest.approx(np.exp(-0.045 + 0.21), rel=1e-12)

    def test_terminal_zero_rejected(self):
        with pytest.raises(DomainError):
            joint_density_v2(0.0, 1.0, 0.5, 0.0)


class TestElastic:
    def test_closed_form_matches_integral_form(self):
        for x in (0.0, 0.1, 0.5, 1.5):
            assert elastic_transition_density(0.5, 0.3, x, 1.0) == pytest.approx(
                elastic_transition_density_integral_form(0.5, 0.3, x, 1.0), rel=1e-9)

    def test_no_killing_is_reflection(self):
        x = np.linspace(0.0, 3.0, 7)
        np.testing.assert_allclose(elastic_transition_density(0.0, 0.3, x, 1.0), _heat(x - 0.3, 1.0) + _heat(x + 0.3, 1.0),
                                   rtol=1e-14)

    def test_negative_rate_rejected(self):
        with pytest.raises(DomainError):
            elastic_transition_density(-0.1, 0.3, 0.5, 1.0)

    @pytest.mark.parametrize("mu", [0.0, 0.3, 0.7])
    def test_product_matches_free_density(self, mu):
        for x in np.linspace(0.0, 1.0, 5):
            for s in np.linspace(0.1, 0.9, 5):
                assert sojourn_law_as_elastic_product(mu, x, 1.0, s) == pytest.approx(
                    free_sojourn_density(mu, x, 1.0, s), rel=1e-8)

    def test_product_stable_for_strong_drift(self):
        values = sojourn_law_as_elastic_product(-6.0, 0.5, 4.0, np.linspace(0.1, 3.9, 9))
        assert np.all(np.isfinite(values)) and np.all(values >= 0)

    def test_killed_mass(self):
        assert elastic_law(0.0, 0.3, 1.0).to_dict()["killed_mass"] == pytest.approx(0.0, abs=1e-9)
        killed = elastic_law(0.5, 0.3, 1.0).to_dict()["killed_mass"]
        assert 0.0 < killed < 1.0
