"""
@file JointDensity.py

Joint density of the sojourn above zero and the terminal position of B(s) + mu s started at 0,
in its two classical forms: a first-passage integral over a time variable (v1) and a Gaussian
integral over a space variable (v2). Both carry the Girsanov weight e^{-mu^2 t/2 + mu x}.
"""
import numpy as np

from utils.exceptions import require
from utils.quadrature import integrate_finite, integrate_gaussian_tail


def _check_joint_args(t, s, x):
    require(t > 0, f"horizon must be positive, got t={t}")
    require(0 < s < t, f"sojourn time outside (0, t): s={s}, t={t}")
    require(x != 0, "joint density is not defined at x = 0")


def _passage_integral(level, t, upper):
    """ level * int_0^upper e^{-level^2/2a} / (a (t - a))^{3/2} da, peaked near a = level^2/3 """
    peak = level ** 2 / 3.0
    points = [peak * 4.0 ** k for k in range(-4, 5)]

    def integrand(a):
        return level * np.exp(-level ** 2 / (2.0 * a)) / (a * (t - a)) ** 1.5

    return integrate_finite(integrand, 0.0, upper, points=points).value


def joint_density_v1(mu, t, s, x):
    """
    First-passage form. For x > 0 the last excursion below zero ends before time t - s:
        (1/2pi) e^{-mu^2 t/2 + mu x} int_{t-s}^t x e^{-x^2/2(t-z)} / sqrt(z^3 (t-z)^3) dz
    and for x < 0 the same with the range int_s^t and |x|.
    """
    _check_joint_args(t, s, x)
    upper = s if x > 0 else t - s
    weight = np.exp(-0.5 * mu ** 2 * t + mu * x) / (2.0 * np.pi)
    return float(weight * _passage_integral(abs(x), t, upper))


def joint_density_v2(mu, t, s, x):
    """
    Gaussian form with z over (0, inf):
        x > 0: (1/pi) e^{-mu^2 t/2 + mu x} (s(t-s))^{-3/2} int_0^inf z (z + x) e^{-(z+x)^2/2s - z^2/2(t-s)} dz
        x < 0: same prefactor with z (z - x) e^{-z^2/2s - (z-x)^2/2(t-s)}
    """
    _check_joint_args(t, s, x)
    level = abs(x)
    near, far = (s, t - s) if x > 0 else (t - s, s)

    def integrand(z):
        return z * (z + level) * np.exp(-(z + level) ** 2 / (2.0 * near) - z ** 2 / (2.0 * far))

    sigma = np.sqrt(s * (t - s) / t)
    value = integrate_gaussian_tail(integrand, 0.0, sigma, loc=0.0).value
    weight = np.exp(-0.5 * mu ** 2 * t + mu * x) / np.pi
    return float(weight * value / (s * (t - s)) ** 1.5)


def joint_marginal(mu, t, s, form="v1"):
    """ Integrates a joint form over the terminal position; recovers the free sojourn density from 0 """
    density = joint_density_v1 if form == "v1" else joint_density_v2

    def positive(x):
        return np.array([density(mu, t, s, xi) for xi in x])

    def negative(x):
        return np.array([density(mu, t, s, -xi) for xi in x])

    sigma = np.sqrt(t)
    right = integrate_gaussian_tail(positive, 0.0, sigma, loc=mu * t, rel_tol=1e-9).value
    left = integrate_gaussian_tail(negative, 0.0, sigma, loc=-mu * t, rel_tol=1e-9).value
    return right + left
