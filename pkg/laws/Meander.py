"""
@file Meander.py

Sojourn over [l, t] of a drifted Brownian motion conditioned to stay positive on [0, l].
For a start u > 0 the law is a mixture over the position y = B(l) of free sojourn laws of
horizon t - l started at y; as u goes to 0 the position law becomes the tilted Rayleigh law
proportional to y e^{-y^2/2l + mu y}.
"""
import numpy as np

from functools import lru_cache
from laws.CommonLaw import MixedSojournLaw
from laws.Elastic import sojourn_law_as_elastic_product
from laws.FreeSojourn import free_sojourn_law, free_survival_probability, sojourn_density_given_position
from scipy.special import ndtr
from utils.exceptions import require
from utils.quadrature import integrate_gaussian_tail


def _endpoint_kernel(u, mu, l, y):
    """
    Killed-at-zero transition kernel from u to y over time l with the Girsanov factor folded into the exponent:
        (e^{-(y-u)^2/2l} - e^{-(y+u)^2/2l}) / sqrt(2 pi l) * e^{-mu^2 l/2 + mu (y - u)}
    """
    y = np.asarray(y, dtype=float)
    return np.exp(-(y - u - mu * l) ** 2 / (2.0 * l)) * -np.expm1(-2.0 * u * y / l) / np.sqrt(2.0 * np.pi * l)


def meander_endpoint_normalizer(u, mu, l):
    """ Closed form of the kernel's y-integral: the probability of staying positive on [0, l] from u """
    return free_survival_probability(mu, u, l)


@lru_cache(maxsize=256)
def _endpoint_mass(u, mu, l):
    return integrate_gaussian_tail(lambda y: _endpoint_kernel(u, mu, l, y), 0.0, np.sqrt(l), loc=u + mu * l).value


def meander_endpoint_density(u, mu, l, y):
    """
    Density of B(l) given a start at u > 0 and min over [0, l] positive, normalized by quadrature
    :param y: position(s) at time l
    """
    require(u > 0, f"meander_endpoint_density needs u > 0 (use meander_limit_endpoint_density), got u={u}")
    require(l > 0, f"meander window must be positive, got l={l}")
    out = np.where(np.asarray(y) > 0, _endpoint_kernel(u, mu, l, y), 0.0) / _endpoint_mass(float(u), float(mu), float(l))
    return out if out.ndim else float(out)


def _limit_kernel(mu, l, y):
    """ y e^{-(y - mu l)^2/2l}, the tilted Rayleigh kernel with e^{mu^2 l/2} divided out """
    y = np.asarray(y, dtype=float)
    return y * np.exp(-(y - mu * l) ** 2 / (2.0 * l))


def meander_limit_endpoint_normalizer(mu, l):
    """ Closed form of int_0^inf y e^{-(y - mu l)^2/2l} dy """
    return l * np.exp(-0.5 * mu ** 2 * l) + mu * l * np.sqrt(2.0 * np.pi * l) * ndtr(mu * np.sqrt(l))


@lru_cache(maxsize=256)
def _limit_mass(mu, l):
    return integrate_gaussian_tail(lambda y: _limit_kernel(mu, l, y), 0.0, np.sqrt(l), loc=mu * l).value


def meander_limit_endpoint_density(mu, l, y):
    """ Density proportional to y e^{-y^2/2l + mu y} on y > 0, normalized numerically """
    require(l > 0, f"meander window must be positive, got l={l}")
    out = np.where(np.asarray(y) > 0, _limit_kernel(mu, l, y), 0.0) / _limit_mass(float(mu), float(l))
    return out if out.ndim else float(out)


def meander_limit_endpoint_mode(mu, l):
    """ Root of 1/y - y/l + mu = 0 """
    return 0.5 * (mu * l + np.sqrt(mu ** 2 * l ** 2 + 4.0 * l))


class MeanderMixtureLaw(MixedSojournLaw):
    def __init__(self, endpoint, centre, mu, l, t, name, route="elastic"):
        """
        Mixture over the position y at time l of free sojourn laws on the window [l, t]
        :param endpoint: vectorized density of y
        :param centre: center of the Gaussian envelope of the endpoint density
        :param route: "elastic" evaluates the conditional density in closed form, "quadrature" by nested quadrature
        """
        self.endpoint, self.centre = endpoint, centre
        self.mu, self.l, self.t, self.route = mu, l, t, route
        self.window = t - l

        # Mass of the paths that never go negative after l
        atom = integrate_gaussian_tail(lambda y: self.endpoint(y) * free_survival_probability(mu, y, self.window),
                                       0.0, np.sqrt(l), loc=centre).value
        super().__init__((0.0, self.window), atoms=[(self.window, atom)], name=name)

    def _conditional(self, y, s):
        if self.route == "elastic":
            return sojourn_law_as_elastic_product(self.mu, y, self.window, s)
        return np.array([sojourn_density_given_position(yi, self.mu, self.l, self.t, s) if yi > 0 else 0.0
                         for yi in np.ravel(y)])

    def _density_at(self, s):
        return integrate_gaussian_tail(lambda y: self.endpoint(y) * self._conditional(y, s),
                                       0.0, np.sqrt(self.l), loc=self.centre).value

    def _density(self, s):
        return np.array([self._density_at(si) for si in np.ravel(s)]).reshape(np.shape(s))


class MeanderLimitLaw(MixedSojournLaw):
    def __init__(self, l, t):
        """
        Driftless limit law: density sqrt(s) / (pi sqrt(t - l - s) (s + l)) on (0, t - l) plus an atom
        sqrt(l/t) at t - l; the pure arcsine law when l = 0
        """
        self.l, self.t = l, t
        self.window = t - l
        atoms = [(self.window, np.sqrt(l / t))] if l > 0 else []
        super().__init__((0.0, self.window), atoms=atoms, name="meander-limit")

    def _density(self, s):
        return np.sqrt(s) / (np.pi * np.sqrt(self.window - s) * (s + self.l))

    def _continuous_cdf(self, z):
        return meander_limit_cdf(self.l, self.t, z)


def meander_limit_cdf(l, t, z):
    """
    (2/pi) arcsin sqrt(z/(t-l)) - (2/pi) sqrt(l/t) arcsin sqrt(z t / ((l + z)(t - l)))
    :param z: scalar or array in [0, t - l]
    """
    require(0 <= l < t, f"meander window needs 0 <= l < t, got l={l}, t={t}")
    z = np.asarray(z, dtype=float)
    window = t - l
    require(np.all((z >= 0) & (z <= window)), f"meander_limit_cdf argument outside [0, {window}]")

    out = 2.0 / np.pi * np.arcsin(np.sqrt(z / window))
    if l > 0:
        ratio = np.clip(z * t / ((l + z) * window), 0.0, 1.0)
        out = out - 2.0 / np.pi * np.sqrt(l / t) * np.arcsin(np.sqrt(ratio))
    return out if out.ndim else float(out)


def meander_sojourn_law_finite_u(u, mu, l, t, route="elastic"):
    """ Sojourn law over [l, t] of the drifted path started at u > 0 and kept positive on [0, l] """
    require(u > 0, f"finite-u meander needs u > 0, got u={u}")
    require(0 < l < t, f"meander window needs 0 < l < t, got l={l}, t={t}")
    return MeanderMixtureLaw(lambda y: meander_endpoint_density(u, mu, l, y), u + mu * l, mu, l, t,
                             name="meander-u", route=route)


def meander_limit_law(l, t, mu=0.0):
    """
    Limit law as the start level goes to 0. The driftless case is closed form; a nonzero drift
    mixes the free laws over the tilted Rayleigh position numerically.
    """
    require(t > 0, f"horizon must be positive, got t={t}")
    require(0 <= l < t, f"meander window needs 0 <= l < t, got l={l}, t={t}")
    if mu == 0 or l == 0:
        if mu != 0:
            # Without a conditioning window the path is free from 0
            return free_sojourn_law(mu, 0.0, t, route="elastic")
        return MeanderLimitLaw(l, t)
    return MeanderMixtureLaw(lambda y: meander_limit_endpoint_density(mu, l, y), mu * l, mu, l, t, name="meander-limit")
