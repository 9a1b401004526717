import numpy as np
import pytest

from laws.Bridge import bridge_law, bridge_law_from_u, bridge_sojourn_density, bridge_sojourn_density_from_u
from laws.FreeSojourn import (free_sojourn_density, free_sojourn_law, free_sojourn_law_mu0, free_survival_probability,
                              sojourn_density_given_position)
from laws.CommonLaw import ProcessParams
from scipy.special import erf
from utils.exceptions import DomainError
from utils.quadrature import integrate_sqrt_singular


class TestBridge:
    def test_uniform_density(self):
        assert bridge_sojourn_density(2.0, 0.5) == 0.5
        assert bridge_law(2.0).cdf(1.0) == pytest.approx(0.5)
        assert bridge_law(2.0).mean() == 1.0

    def test_density_outside_support_raises(self):
        with pytest.raises(DomainError):
            bridge_sojourn_density(1.0, 1.0)
        with pytest.raises(DomainError):
            bridge_sojourn_density(0.0, 0.5)

    def test_from_u_edges(self):
        assert bridge_sojourn_density_from_u(0.5, 1.0, 0.0) == 0.0
        assert bridge_sojourn_density_from_u(0.5, 1.0, 1.0) == np.inf

    def test_from_u_small_start_is_nearly_uniform(self):
        assert bridge_sojourn_density_from_u(1e-3, 1.0, 0.5) == pytest.approx(1.0, abs=1e-2)

    def test_from_u_normalization(self):
        law = bridge_law_from_u(0.5, 1.0)
        assert law.atom_mass == 0.0
        assert law.continuous_mass == pytest.approx(1.0, abs=1e-6)

    def test_from_u_needs_positive_start(self):
        with pytest.raises(DomainError):
            bridge_sojourn_density_from_u(0.0, 1.0, 0.5)

    @pytest.mark.parametrize("k", range(6, 16))
    def test_from_u_square_root_blowup_at_horizon(self, k):
        s = 1.0 - 10.0 ** -k
        gap = 1.0 - s
        value = bridge_sojourn_density_from_u(0.5, 1.0, s)
        # Leading term 2u / (t sqrt(2 pi)), first correction of order sqrt(t - s)
        assert value * np.sqrt(gap) == pytest.approx(1.0 / np.sqrt(2.0 * np.pi), rel=3.0 * np.sqrt(gap) + 1e-6)

    def test_from_u_cdf_table(self):
        law = bridge_law_from_u(0.5, 1.0)
        direct = integrate_sqrt_singular(law.density, 0.0, 0.5).value
        assert law.continuous_cdf(0.5) == pytest.approx(direct, abs=1e-8)
        assert law.cdf(1.0) == pytest.approx(1.0, abs=1e-6)


class TestFreeDriftless:
    def test_arcsine_from_zero(self):
        law = free_sojourn_law_mu0(0.0, 1.0)
        assert law.atom_mass == 0.0
        assert law.cdf(0.25) == pytest.approx(1.0 / 3.0, abs=1e-14)
        assert law.density(0.5) == pytest.approx(2.0 / np.pi, abs=1e-14)

    def test_positive_start_atom_and_mass(self):
        law = free_sojourn_law_mu0(0.5, 1.0)
        assert law.atom_mass == pytest.approx(erf(0.5 / np.sqrt(2.0)), abs=1e-15)
        assert law.total_mass() == pytest.approx(1.0, abs=1e-8)

    def test_quadrature_route_matches_closed_form(self):
        expected = np.exp(-0.25 / 0.6) / (np.pi * np.sqrt(0.3 * 0.7))
        assert free_sojourn_density(0.0, 0.5, 1.0, 0.3) == pytest.approx(expected, rel=1e-9)

    def test_arcsine_mean(self):
        assert free_sojourn_law_mu0(0.0, 2.0).mean() == pytest.approx(1.0, abs=1e-10)


class TestFreeDrifted:
    def test_survival_probability(self):
        assert free_survival_probability(0.0, 0.5, 1.0) == pytest.approx(erf(0.5 / np.sqrt(2.0)), abs=1e-14)
        assert free_survival_probability(0.7, 0.0, 1.0) == pytest.approx(0.0, abs=1e-15)
        assert free_survival_probability(1.0, 0.5, 2.0) > free_survival_probability(-1.0, 0.5, 2.0)

    def test_total_mass(self):
        law = free_sojourn_law(0.4, 0.3, 1.0)
        assert law.atoms[0].location == 1.0
        assert law.total_mass() == pytest.approx(1.0, abs=1e-7)

    @pytest.mark.parametrize("mu", [0.0, 0.3, 0.7])
    def test_elastic_route_matches_quadrature(self, mu):
        for x in np.linspace(0.0, 1.0, 5):
            quadrature = free_sojourn_law(mu, x, 1.0)
            elastic = free_sojourn_law(mu, x, 1.0, route="elastic")
            s = np.linspace(0.1, 0.9, 5)
            np.testing.assert_allclose(elastic.density(s), quadrature.density(s), rtol=1e-8)


    @pytest.mark.parametrize("route", ["quadrature", "elastic"])
    def test_cdf_without_closed_form(self, route):
        law = free_sojourn_law(0.5, 0.3, 1.0, route=route)
        direct = integrate_sqrt_singular(law.density, 0.0, 0.5).value
        assert law.continuous_cdf(0.5) == pytest.approx(direct, abs=1e-8)
        assert law.continuous_cdf(1.0) == pytest.approx(law.continuous_mass, abs=1e-9)
        assert law.cdf(1.0) == pytest.approx(1.0, abs=1e-7)

    def test_ppf_without_closed_form(self):
        law = free_sojourn_law(0.5, 0.3, 1.0, route="elastic")
        q = np.array([0.1, 0.5, 0.95])
        np.testing.assert_allclose(law.conditional_cdf(law.ppf(q)), q, atol=1e-8)
    def test_negative_start_is_reflected(self):
        below = free_sojourn_law(0.3, -0.4, 1.5)
        above = free_sojourn_law(-0.3, 0.4, 1.5)
        s = np.array([0.2, 0.7, 1.1])
        np.testing.assert_allclose(below.density(s), above.density(1.5 - s), rtol=1e-12)
        assert below.atoms[0].location == 0.0
        assert below.atom_mass == pytest.approx(free_survival_probability(-0.3, 0.4, 1.5), abs=1e-15)

    def test_density_given_position(self):
        assert sojourn_density_given_position(0.5, 0.0, 1.0, 2.0, 0.5) == pytest.approx(0.495800, abs=1e-6)

    def test_density_given_position_checks(self):
        with pytest.raises(DomainError):
            sojourn_density_given_position(0.0, 0.0, 1.0, 2.0, 0.5)
        with pytest.raises(DomainError):
            sojourn_density_given_position(0.5, 0.0, 1.0, 2.0, 1.0)


class TestMixedLaw:
    def test_ppf_inverts_conditional_cdf(self):
        law = free_sojourn_law_mu0(0.5, 1.0)
        q = np.array([0.05, 0.3, 0.5, 0.9])
        np.testing.assert_allclose(law.conditional_cdf(law.ppf(q)), q, atol=1e-8)

    def test_cdf_includes_atom(self):
        law = free_sojourn_law_mu0(0.5, 1.0)
        assert law.cdf(1.0) == pytest.approx(1.0, abs=1e-8)
        assert law.cdf(0.999) < 1.0 - law.atom_mass + 1e-6

    def test_scalar_in_scalar_out(self):
        law = bridge_law(1.0)
        assert isinstance(law.density(0.5), float)
        assert law.density(1.5) == 0.0

    def test_process_params(self):
        with pytest.raises(DomainError):
            ProcessParams(t=1.0, l=1.0)
        with pytest.raises(DomainError):
            ProcessParams(u=-0.1)
        assert ProcessParams(mu=0.2, t=2.0).to_dict()["mu"] == 0.2
