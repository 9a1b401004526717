"""
@file FreeSojourn.py

Occupation time of [0, inf) by a free drifted Brownian motion B(s) + mu s started at x, over [0, t].

With the first-passage kernel g_s(w) = w e^{-w^2/2s} / sqrt(2 pi s^3), the continuous part on (0, t) is
    f(s) = 2 e^{-2 mu x - mu^2 t/2} int_x^inf e^{mu w} g_s(w) dw * int_0^inf e^{-mu v} g_{t-s}(v) dv
and the path that never leaves [0, inf) puts an atom at s = t whose mass is the survival probability
    Phi((x + mu t)/sqrt t) - e^{-2 mu x} Phi((mu t - x)/sqrt t).
Starts below zero are handled by reflecting space: Gamma(mu, x) = t - Gamma(-mu, -x).
"""
import numpy as np

from laws.CommonLaw import MixedSojournLaw
from laws.Elastic import sojourn_law_as_elastic_product
from scipy.special import erf, log_ndtr, ndtr
from utils.exceptions import require
from utils.quadrature import integrate_gaussian_tail


def _tilted_passage_tail(lower, centre, scale):
    """
    int_lower^inf w e^{-(w - centre)^2 / 2 scale} / sqrt(2 pi scale^3) dw by Gaussian-tail quadrature
    """
    def integrand(w):
        return w * np.exp(-(w - centre) ** 2 / (2.0 * scale)) / np.sqrt(2.0 * np.pi * scale ** 3)

    return integrate_gaussian_tail(integrand, lower, np.sqrt(scale), loc=centre).value


def free_survival_probability(mu, x, t):
    """ P(B(s) + mu s stays >= 0 on [0, t] | start x >= 0) """
    x = np.asarray(x, dtype=float)
    sqrt_t = np.sqrt(t)
    reflected = np.exp(-2.0 * mu * x + log_ndtr((mu * t - x) / sqrt_t))
    out = np.clip(ndtr((x + mu * t) / sqrt_t) - reflected, 0.0, 1.0)
    return out if out.ndim else float(out)


def free_sojourn_density(mu, x, t, s):
    """
    Continuous part of the free sojourn law at s by nested Gaussian-tail quadrature, for x >= 0.
    Completing the squares moves the Girsanov weights inside the inner integrals, where they
    recombine because s + (t - s) = t.
    """
    require(x >= 0, f"free_sojourn_density needs x >= 0, got x={x}")
    require(0 < s < t, f"sojourn time outside (0, t): s={s}, t={t}")
    upper = _tilted_passage_tail(x, mu * s, s)
    lower = _tilted_passage_tail(0.0, -mu * (t - s), t - s)
    return float(2.0 * np.exp(-2.0 * mu * x) * upper * lower)


class FreeSojournLaw(MixedSojournLaw):
    def __init__(self, mu, x, t, route="quadrature"):
        """
        Free drifted sojourn law on (0, t)
        :param route: "quadrature" for the nested integrals, "elastic" for the closed elastic product
        """
        require(t > 0, f"horizon must be positive, got t={t}")
        require(route in ("quadrature", "elastic"), f"unknown evaluation route {route}")
        self.mu, self.x, self.t, self.route = mu, x, t, route

        # Below zero the law is the mirror image of the reflected start
        self.reflected = x < 0
        if self.reflected:
            atoms = [(0.0, free_survival_probability(-mu, -x, t))]
        else:
            atoms = [(t, free_survival_probability(mu, x, t))]
        super().__init__((0.0, t), atoms=atoms, name="free")

    def _positive_start_density(self, s):
        mu, x = (-self.mu, -self.x) if self.reflected else (self.mu, self.x)
        if self.route == "elastic":
            return sojourn_law_as_elastic_product(mu, x, self.t, s)
        return np.array([free_sojourn_density(mu, x, self.t, si) for si in np.ravel(s)]).reshape(np.shape(s))

    def _density(self, s):
        s = np.asarray(s, dtype=float)
        return self._positive_start_density(self.t - s if self.reflected else s)


class FreeSojournMu0Law(MixedSojournLaw):
    def __init__(self, x, t):
        """ Driftless free sojourn law from x >= 0: weighted arcsine density plus an atom at t """
        require(x >= 0, f"free_sojourn_law_mu0 needs x >= 0, got x={x}")
        require(t > 0, f"horizon must be positive, got t={t}")
        self.x, self.t = x, t
        super().__init__((0.0, t), atoms=[(t, float(erf(x / np.sqrt(2.0 * t))))], name="free")

    def _density(self, s):
        return np.exp(-self.x ** 2 / (2.0 * s)) / (np.pi * np.sqrt(s * (self.t - s)))

    def _continuous_cdf(self, z):
        # Levy arcsine law
        if self.x == 0:
            return 2.0 / np.pi * np.arcsin(np.sqrt(np.asarray(z) / self.t))
        return self._cdf_table(z)


def free_sojourn_law(mu, x, t, route="quadrature"):
    """ Sojourn law of B(s) + mu s from x over [0, t]; x < 0 is accepted through reflection """
    return FreeSojournLaw(mu, x, t, route=route)


def free_sojourn_law_mu0(x, t):
    return FreeSojournMu0Law(x, t)


def sojourn_density_given_position(y, mu, l, t, s):
    """
    Density of the sojourn over [l, t] given B(l) = y, i.e. the free law from y over a window of length t - l
    :param y: position at time l, y > 0
    :param s: sojourn time, 0 < s < t - l
    """
    require(y > 0, f"position must be positive, got y={y}")
    require(0 <= l < t, f"window needs 0 <= l < t, got l={l}, t={t}")
    require(0 < s < t - l, f"sojourn time outside (0, t - l): s={s}, t - l={t - l}")
    return free_sojourn_density(mu, y, t - l, s)
