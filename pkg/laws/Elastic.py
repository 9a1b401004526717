"""
@file Elastic.py

Elastic Brownian motion on the half-line (reflecting at 0 and killed at a rate proportional to its
local time there) and the representation of the free sojourn density as a product of two elastic
transition densities.
"""
import numpy as np

from laws.CommonLaw import MixedSojournLaw
from scipy.special import erfcx
from utils.exceptions import require
from utils.quadrature import integrate_gaussian_tail


def _heat(z, t):
    return np.exp(-z ** 2 / (2.0 * t)) / np.sqrt(2.0 * np.pi * t)


def _elastic_kernel(kappa, y, x, t):
    """
    Reflection kernel minus the killing correction, for any real rate kappa:
        [e^{-(x-y)^2/2t} + e^{-(x+y)^2/2t}] / sqrt(2 pi t) - kappa erfcx((a + kappa t)/sqrt(2t)) e^{-a^2/2t}
    with a = x + y. For negative arguments erfcx(z) = 2e^{z^2} - erfcx(-z) keeps the product finite.
    """
    x = np.asarray(x, dtype=float)
    a = x + y
    z = (a + kappa * t) / np.sqrt(2.0 * t)
    gauss = np.exp(-a ** 2 / (2.0 * t))

    with np.errstate(over="ignore"):
        positive = erfcx(np.abs(z)) * gauss
        negative = 2.0 * np.exp(kappa * a + 0.5 * kappa ** 2 * t) - positive
    tail = np.where(z >= 0, positive, negative)
    return (np.exp(-(x - y) ** 2 / (2.0 * t)) + gauss) / np.sqrt(2.0 * np.pi * t) - kappa * tail


def elastic_transition_density(mu, y, x, t):
    """
    Transition density from y to x over time t of the elastic Brownian motion whose killing rate
    equals the drift mu (closed erfc form)
    :param mu: killing rate, mu >= 0
    :param y: start level, y >= 0
    :param x: end level(s), x >= 0
    :param t: elapsed time
    """
    require(mu >= 0, f"elastic kernel needs mu >= 0 (negative drift interchanges the two motions), got mu={mu}")
    require(y >= 0, f"elastic start level must be nonnegative, got y={y}")
    require(np.all(np.asarray(x) >= 0), "elastic end level must be nonnegative")
    require(t > 0, f"elapsed time must be positive, got t={t}")
    out = _elastic_kernel(mu, y, x, t)
    return out if np.ndim(out) else float(out)


def elastic_transition_density_integral_form(mu, y, x, t):
    """
    Same density written as the absorbed kernel plus an exponentially tilted first-passage tail,
        [e^{-(x-y)^2/2t} - e^{-(x+y)^2/2t}] / sqrt(2 pi t) + 2 e^{mu a} int_a^inf e^{-mu w} w e^{-w^2/2t} / sqrt(2 pi t^3) dw
    evaluated by quadrature
    """
    require(mu >= 0, f"elastic kernel needs mu >= 0, got mu={mu}")
    require(x >= 0 and y >= 0 and t > 0, f"invalid elastic arguments y={y}, x={x}, t={t}")
    a = x + y

    def integrand(w):
        return np.exp(mu * (a - w)) * w * np.exp(-w ** 2 / (2.0 * t)) / np.sqrt(2.0 * np.pi * t ** 3)

    tail = integrate_gaussian_tail(integrand, a, np.sqrt(t), loc=-mu * t).value
    return float(_heat(x - y, t) - _heat(x + y, t) + 2.0 * tail)


def sojourn_law_as_elastic_product(mu, x, t, s):
    """
    Free sojourn density at s for drift mu started at x >= 0, written as
        1/2 e^{-mu^2 t/2 - mu x} p_{-mu}(x, s; 0) p_{mu}(0, t - s; 0)
    where p_kappa is the elastic kernel with rate kappa. Vectorized over x and s.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    require(np.all(x >= 0), "elastic product route needs x >= 0")
    require(t > 0, f"horizon must be positive, got t={t}")
    require(np.all((s > 0) & (s < t)), f"sojourn time outside (0, t) for t={t}")

    out = 0.5 * np.exp(-0.5 * mu ** 2 * t - mu * x) \
        * _elastic_kernel(-mu, 0.0, x, s) * _elastic_kernel(mu, 0.0, 0.0, t - s)
    return out if np.ndim(out) else float(out)


class ElasticLaw(MixedSojournLaw):
    def __init__(self, mu, y, t):
        """
        Sub-probability law of the surviving elastic motion at time t, on [0, y + mu t + tail]
        (a space interval rather than a time interval; the missing mass is the killed mass)
        """
        require(mu >= 0 and y >= 0 and t > 0, f"invalid elastic parameters mu={mu}, y={y}, t={t}")
        reach = y + 9.2 * np.sqrt(t)
        super().__init__((0.0, reach), name="elastic")
        self.mu, self.y, self.t = mu, y, t

    def _density(self, x):
        return _elastic_kernel(self.mu, self.y, x, self.t)

    def to_dict(self):
        out = super().to_dict()
        out["killed_mass"] = 1.0 - self.continuous_mass
        return out


def elastic_law(mu, y, t):
    return ElasticLaw(mu, y, t)
