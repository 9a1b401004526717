"""
@file Bridge.py

Sojourn time above zero of a Brownian bridge ending at 0, started either at 0 (uniform law)
or at a level u > 0 (first-passage mixture of uniform laws).
"""
import numpy as np

from laws.CommonLaw import MixedSojournLaw
from utils.exceptions import require
from utils.quadrature import integrate_finite


def bridge_sojourn_density(t, s):
    """
    Density of the time spent above zero by a zero-to-zero Brownian bridge on [0, t]
    :param t: horizon
    :param s: sojourn time, 0 < s < t
    """
    require(t > 0, f"horizon must be positive, got t={t}")
    require(0 < s < t, f"sojourn time outside (0, t): s={s}, t={t}")
    return 1.0 / t


def _first_passage_breakpoints(u, t, s):
    """ Breakpoints in r = 1/sqrt(t - w) around the first-passage peak at w = u^2/3, then geometric toward r(s) """
    peak = u ** 2 / 3.0
    passages = [peak * 4.0 ** k for k in range(-4, 5)]
    points = [1.0 / np.sqrt(t - w) for w in passages if 0 < w < s]
    lower, upper = 1.0 / np.sqrt(t), 1.0 / np.sqrt(t - s)
    return points + [lower * 2.0 ** k for k in range(1, 64) if lower * 2.0 ** k < upper]


def bridge_sojourn_density_from_u(u, t, s):
    """
    Density at s of the sojourn above zero of a Brownian bridge from u > 0 to 0 over [0, t].
    The bridge first hits 0 at a time w, after which the sojourn of the remaining zero-to-zero
    bridge is uniform on [0, t - w], giving
        sqrt(t / 2pi) e^{u^2/2t} int_0^s u e^{-u^2/2w} / sqrt(w^3 (t - w)^3) dw
    The integral is taken in r = 1/sqrt(t - w), where it becomes int 2u e^{-u^2/2w} / w^{3/2} dr
    with a bounded integrand up to r = 1/sqrt(t - s).
    :param u: start level, u > 0
    :param t: horizon
    :param s: sojourn time, 0 <= s <= t (the density diverges like 2u / (t sqrt(2pi (t - s))) at s = t)
    """
    require(u > 0, f"bridge_sojourn_density_from_u needs u > 0 (use bridge_sojourn_density at u=0), got u={u}")
    require(t > 0, f"horizon must be positive, got t={t}")
    require(0 <= s <= t, f"sojourn time outside [0, t]: s={s}, t={t}")
    if s == 0:
        return 0.0
    if s == t:
        return np.inf

    def integrand(r):
        w = np.maximum(t - 1.0 / r ** 2, 1e-300)
        return 2.0 * u * np.exp(-u ** 2 / (2.0 * w) - 1.5 * np.log(w))

    lower, upper = 1.0 / np.sqrt(t), 1.0 / np.sqrt(t - s)
    value = integrate_finite(integrand, lower, upper, points=_first_passage_breakpoints(u, t, s)).value
    return float(np.sqrt(t / (2.0 * np.pi)) * np.exp(u ** 2 / (2.0 * t)) * value)


class BridgeLaw(MixedSojournLaw):
    def __init__(self, t):
        """ Uniform sojourn law of the zero-to-zero bridge """
        super().__init__((0.0, t), name="bridge")
        self.t = t

    def _density(self, s):
        return np.full(np.shape(s), 1.0 / self.t)

    def _continuous_cdf(self, z):
        return np.asarray(z) / self.t

    def mean(self):
        return 0.5 * self.t


class BridgeFromULaw(MixedSojournLaw):
    def __init__(self, u, t):
        """ Sojourn law of the bridge from u > 0 to 0; no atom since the path must reach 0 """
        require(u > 0, f"bridge from u needs u > 0, got u={u}")
        super().__init__((0.0, t), name="bridge-u")
        self.u, self.t = u, t

    def _density(self, s):
        return np.array([bridge_sojourn_density_from_u(self.u, self.t, si) for si in np.ravel(s)]).reshape(np.shape(s))


def bridge_law(t):
    require(t > 0, f"horizon must be positive, got t={t}")
    return BridgeLaw(t)


def bridge_law_from_u(u, t):
    require(t > 0, f"horizon must be positive, got t={t}")
    return BridgeFromULaw(u, t)
