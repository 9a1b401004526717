import numpy as np
import pytest
import scipy.stats
import torch

from fkpde.solver import laplace_of_law
from laws.Bridge import bridge_law_from_u
from laws.CommonLaw import ProcessParams
from laws.Excursion import excursion_law
from laws.FreeSojourn import free_sojourn_law_mu0
from laws.Meander import (meander_endpoint_density, meander_limit_endpoint_density, meander_limit_law,
                          meander_sojourn_law_finite_u)
from sim.campaign import SimConfig, endpoint_conditioned_gamma, run_campaign, simulate_occupation
from sim.occupation import occupation_time
from sim.paths import (SamplePath, rejection_meander_endpoints, sample_bridge_path, sample_free_path,
                       sample_limit_meander_endpoint, stream_generators)
from utils.exceptions import BudgetError, DomainError, UsageError
from utils.metrics import (EmpiricalLaw, atom_ci, chi_square_homogeneity, ks_critical_value, ks_non_increasing,
                           ks_test_continuous, mean_with_se, two_sample_ks)
from utils.quadrature import integrate_finite, integrate_gaussian_tail


class TestPaths:
    def test_shapes(self, rng):
        single = sample_free_path(0.1, 0.5, 1.0, 16, rng)
        batch = sample_free_path(0.1, 0.5, 1.0, 16, rng, n_paths=8)
        assert single.values.shape == (17,)
        assert batch.values.shape == (8, 17)
        assert torch.all(batch.values[:, 0] == 0.5)
        assert batch.dt == pytest.approx(1.0 / 16.0)
        assert batch.t_end == pytest.approx(1.0)

    def test_streams_reproduce(self):
        first = [sample_free_path(0.0, 0.0, 1.0, 32, g, n_paths=4).values for g in stream_generators(42, 3)]
        second = [sample_free_path(0.0, 0.0, 1.0, 32, g, n_paths=4).values for g in stream_generators(42, 3)]
        for a, b in zip(first, second):
            assert torch.equal(a, b)
        assert not torch.equal(first[0], first[1])

    def test_bridge_pinned(self, rng):
        path = sample_bridge_path(0.7, 2.0, 64, rng, n_paths=16)
        assert torch.all(path.values[:, 0] == 0.7)
        assert torch.all(path.terminal == 0.0)

    def test_free_terminal_moments(self, rng):
        terminal = sample_free_path(0.5, 0.2, 2.0, 8, rng, n_paths=20000).terminal
        assert float(terminal.mean()) == pytest.approx(1.2, abs=0.05)
        assert float(terminal.var()) == pytest.approx(2.0, abs=0.1)

    @pytest.mark.parametrize("mu", [-0.5, 0.0, 0.5])
    def test_limit_endpoint_mean(self, rng, mu):
        y = sample_limit_meander_endpoint(mu, 1.0, rng, 20000)
        expected = integrate_gaussian_tail(lambda w: w * meander_limit_endpoint_density(mu, 1.0, w), 0.0, 1.0,
                                           loc=mu).value
        assert torch.all(y > 0)
        assert float(y.mean()) == pytest.approx(expected, abs=0.03)

    def test_rejection_budget(self, rng):
        with pytest.raises(BudgetError) as info:
            rejection_meander_endpoints(0.01, 0.0, 1.0, 64, rng, 100, budget=1.0, batch_size=64)
        assert info.value.attempts == 64

    def test_rejection_endpoints_positive(self, rng):
        y, attempts = rejection_meander_endpoints(0.5, 0.0, 1.0, 64, rng, 200, batch_size=512)
        assert y.shape == (200,)
        assert torch.all(y > 0)
        assert attempts >= 200


class TestOccupation:
    def test_linear_crossings(self, rng):
        path = SamplePath(0.25, torch.tensor([1.0, 1.0, -1.0, -1.0, 1.0], dtype=torch.float64))
        result = occupation_time(path, rng=rng)
        assert float(result.gamma) == pytest.approx(0.5)
        assert not bool(result.atom_event)

    def test_positive_path_is_atom(self, rng):
        path = SamplePath(0.5, torch.tensor([5.0, 6.0, 7.0], dtype=torch.float64))
        result = occupation_time(path, rng=rng, window=1.0)
        assert bool(result.atom_event)
        assert float(result.gamma) == 1.0

    def test_window_offset(self, rng):
        path = SamplePath(0.5, torch.tensor([-1.0, -1.0, 5.0, 6.0], dtype=torch.float64))
        result = occupation_time(path, start=0.5, rng=rng)
        assert float(result.gamma) == pytest.approx(0.5 * (5.0 / 6.0) + 0.5)

    def test_generator_required(self):
        path = SamplePath(0.5, torch.tensor([1.0, 2.0], dtype=torch.float64))
        with pytest.raises(DomainError):
            occupation_time(path)


class TestCampaign:
    def test_config_validation(self):
        with pytest.raises(DomainError):
            SimConfig(n_paths=0)

    def test_unknown_law(self):
        with pytest.raises(UsageError):
            simulate_occupation("elastic", ProcessParams(), SimConfig(n_paths=10))

    def test_free_needs_nonnegative_start(self):
        with pytest.raises(DomainError):
            simulate_occupation("free", ProcessParams(x=-0.5), SimConfig(n_paths=10, n_steps=8))

    def test_thread_cap_does_not_change_results(self):
        params = ProcessParams(mu=0.2, t=2.0, l=1.0)
        one = simulate_occupation("meander-limit", params, SimConfig(n_paths=300, n_steps=32, streams=4, threads=1,
                                                                     batch_size=50))
        four = simulate_occupation("meander-limit", params, SimConfig(n_paths=300, n_steps=32, streams=4, threads=4,
                                                                      batch_size=50))
        np.testing.assert_array_equal(one[0], four[0])
        np.testing.assert_array_equal(one[1], four[1])

    def test_limit_meander_atom(self):
        config = SimConfig(n_paths=4000, n_steps=256, seed=1, streams=2)
        empirical = run_campaign("meander-limit", ProcessParams(t=4.0, l=1.0), config)
        low, high = atom_ci(empirical.atom_count, empirical.n_total, alpha=0.001)
        assert low <= 0.5 <= high
        assert empirical.atom_location == 3.0

    def test_bridge_has_no_atom(self):
        empirical = run_campaign("bridge", ProcessParams(t=1.0), SimConfig(n_paths=500, n_steps=64))
        assert empirical.atom_count == 0
        assert np.all((empirical.continuous_samples >= 0) & (empirical.continuous_samples <= 1.0))

    def test_endpoint_conditioned(self, rng):
        gamma = endpoint_conditioned_gamma(0.5, 0.5, 0.0, 1.0, 0.05, 2000, 64, rng)
        assert gamma.ndim == 1 and 0 < gamma.size < 2000
        assert np.all((gamma >= 0) & (gamma <= 1.0))

    @pytest.mark.slow
    def test_excursion_fit(self):
        config = SimConfig(n_paths=4000, n_steps=512, seed=3, streams=4)
        empirical = run_campaign("excursion", ProcessParams(t=2.0, l=1.0), config)
        report = ks_test_continuous(empirical, excursion_law(1.0, 2.0), alpha=0.001)
        assert report.passed
        mean, se = mean_with_se(empirical)
        assert mean == pytest.approx(np.pi / 4.0, abs=4.0 * se + 2e-3)

    @pytest.mark.slow
    def test_excursion_drift_invariance(self):
        config = SimConfig(n_paths=2000, n_steps=256, seed=5, streams=2)
        up = run_campaign("excursion-u", ProcessParams(mu=0.5, t=2.0, l=1.0, u=0.05), config)
        down = run_campaign("excursion-u", ProcessParams(mu=-0.5, t=2.0, l=1.0, u=0.05), config)
        assert two_sample_ks(up, down, alpha=0.01).passed


class TestOracles:
    def test_free_from_zero_is_arcsine(self):
        config = SimConfig(n_paths=4000, n_steps=1024, seed=11, streams=2)
        empirical = run_campaign("free", ProcessParams(t=1.0), config)
        assert empirical.atom_count == 0
        assert ks_test_continuous(empirical, free_sojourn_law_mu0(0.0, 1.0), alpha=0.01).passed

    def test_rejection_endpoints_follow_meander_density(self, rng):
        y, _ = rejection_meander_endpoints(0.5, 0.0, 1.0, 256, rng, 3000)
        # CDF of meander_endpoint_density tabulated by cellwise quadrature
        grid = np.linspace(0.0, 6.0, 601)
        cells = [integrate_finite(lambda v: meander_endpoint_density(0.5, 0.0, 1.0, v), lo, hi).value
                 for lo, hi in zip(grid[:-1], grid[1:])]
        cumulative = np.concatenate([[0.0], np.cumsum(cells)])
        result = scipy.stats.kstest(y.numpy(), lambda v: np.interp(v, grid, cumulative))
        assert result.statistic < ks_critical_value(0.01, y.numel())

    @pytest.mark.slow
    def test_bridge_from_u(self):
        config = SimConfig(n_paths=4000, n_steps=512, seed=13, streams=2)
        empirical = run_campaign("bridge-u", ProcessParams(t=1.0, u=0.5), config)
        assert ks_test_continuous(empirical, bridge_law_from_u(0.5, 1.0), alpha=0.01).passed

    @pytest.mark.slow
    def test_finite_u_meander(self):
        params = ProcessParams(mu=0.2, t=2.0, l=1.0, u=0.3)
        config = SimConfig(n_paths=4000, n_steps=512, seed=17, streams=2)
        empirical = run_campaign("meander-u", params, config)
        assert ks_test_continuous(empirical, meander_sojourn_law_finite_u(0.3, 0.2, 1.0, 2.0), alpha=0.01).passed

    @pytest.mark.slow
    def test_laplace_transform_of_limit_meander(self):
        config = SimConfig(n_paths=8000, n_steps=512, seed=19, streams=2)
        samples = np.exp(-run_campaign("meander-limit", ProcessParams(t=2.0, l=1.0), config).all_samples())
        se = samples.std(ddof=1) / np.sqrt(samples.size)
        assert laplace_of_law(meander_limit_law(1.0, 2.0), 1.0) == pytest.approx(samples.mean(), abs=3.0 * se)


class TestConsistency:
    def test_step_doubling_keeps_mean(self, rng):
        # Occupation of the same paths on the fine grid and on every other grid point
        fine = sample_free_path(0.2, 0.3, 1.0, 512, rng, n_paths=10000)
        coarse = SamplePath(2.0 * fine.dt, fine.values[:, ::2].contiguous())
        estimates = []
        for path in (coarse, fine):
            result = occupation_time(path, rng=rng, window=1.0)
            empirical = EmpiricalLaw.from_occupation(result.gamma.numpy(), result.atom_event.numpy(), atom_location=1.0)
            estimates.append(mean_with_se(empirical))
        assert abs(estimates[0][0] - estimates[1][0]) < 2.0 * estimates[1][1]

    @pytest.mark.slow
    def test_time_reversal(self):
        # Pinned at both ends the path forgets its drift, so (y -> w, mu) reverses into (w -> y, -mu)
        forward, backward = [], []
        for rng in stream_generators(23, 5):
            forward.append(endpoint_conditioned_gamma(0.5, 0.3, 0.4, 1.0, 0.05, 20000, 128, rng))
            backward.append(endpoint_conditioned_gamma(0.3, 0.5, -0.4, 1.0, 0.05, 20000, 128, rng))
        bins = np.linspace(0.0, 1.0, 11)
        assert chi_square_homogeneity(np.concatenate(forward), np.concatenate(backward), bins) > 0.01

    @pytest.mark.slow
    def test_weak_limit_trend(self):
        config = SimConfig(n_paths=3000, n_steps=256, seed=29, streams=2)
        limit = meander_limit_law(1.0, 2.0)
        reports = [ks_test_continuous(run_campaign("meander-u", ProcessParams(t=2.0, l=1.0, u=u), config), limit)
                   for u in (0.4, 0.2, 0.1, 0.05)]
        assert ks_non_increasing([r.ks_stat for r in reports], [r.ks_critical for r in reports])
