"""
@file Excursion.py

Generalized excursion: a meander on [0, l] pinned to 0 at time t. Its sojourn over [l, t]
does not depend on the drift, has no atom, and tends to the uniform law as t grows.
"""
import numpy as np

from laws.CommonLaw import MixedSojournLaw
from utils.exceptions import require


def _check_window(l, t):
    require(t > 0, f"horizon must be positive, got t={t}")
    require(0 <= l < t, f"excursion window needs 0 <= l < t, got l={l}, t={t}")


def _density(l, t, s):
    """ Vectorized density; written so that l = 0 reduces to 1/t without 0/0 """
    s = np.asarray(s, dtype=float)
    if l == 0:
        return np.full(s.shape, 1.0 / t)
    window = t - l
    with np.errstate(divide="ignore"):
        tail = (t - 2.0 * (l + s)) / np.sqrt((l + s) * (window - s))
    return ((t - 2.0 * l) / window - np.sqrt(l / window) * tail) / t


def _cdf(l, t, sbar):
    sbar = np.asarray(sbar, dtype=float)
    window = t - l
    root = np.sqrt(np.clip((l + sbar) * (window - sbar), 0.0, None))
    return (sbar + l) * (t - 2.0 * l) / (t * window) + l / window - 2.0 / t * np.sqrt(l / window) * root


def excursion_sojourn_density(l, t, s):
    """
    (1/t) sqrt(l/(t-l)) [(t - 2l)/sqrt(l(t-l)) - (t - 2(l+s))/sqrt((l+s)(t-l-s))], and 1/t at l = 0
    :param s: sojourn time(s) in (0, t - l)
    """
    _check_window(l, t)
    require(np.all((np.asarray(s) > 0) & (np.asarray(s) < t - l)), f"sojourn time outside (0, {t - l})")
    out = _density(l, t, s)
    return out if out.ndim else float(out)


def excursion_sojourn_cdf(l, t, sbar):
    """ Closed-form distribution function on [0, t - l] """
    _check_window(l, t)
    require(np.all((np.asarray(sbar) >= 0) & (np.asarray(sbar) <= t - l)), f"sbar outside [0, {t - l}]")
    out = _cdf(l, t, sbar)
    return out if out.ndim else float(out)


def excursion_sojourn_mean(l, t):
    """ (t/2) sqrt(l/(t-l)) arccos sqrt(l/t) + (t - 2l)/2 """
    _check_window(l, t)
    return float(0.5 * t * np.sqrt(l / (t - l)) * np.arccos(np.sqrt(l / t)) + 0.5 * (t - 2.0 * l))


def excursion_endpoint_scale(l, t):
    """ Rayleigh scale of B(l): sqrt(l (t - l) / t) """
    _check_window(l, t)
    return float(np.sqrt(l * (t - l) / t))


def excursion_endpoint_density(l, t, y):
    """ Rayleigh density y/sigma^2 e^{-y^2/2sigma^2} with sigma^2 = l(t-l)/t """
    require(l > 0, f"excursion endpoint needs l > 0, got l={l}")
    variance = excursion_endpoint_scale(l, t) ** 2
    y = np.asarray(y, dtype=float)
    out = np.where(y > 0, y / variance * np.exp(-y ** 2 / (2.0 * variance)), 0.0)
    return out if out.ndim else float(out)


def excursion_sojourn_density_half(t, s):
    """ l = t/2 specialization: 4s / (t sqrt(t^2 - 4s^2)) """
    s = np.asarray(s, dtype=float)
    return 4.0 * s / (t * np.sqrt(t ** 2 - 4.0 * s ** 2))


def excursion_sojourn_cdf_half(t, sbar):
    """ l = t/2 specialization: 1 - sqrt(t^2 - 4 sbar^2)/t """
    sbar = np.asarray(sbar, dtype=float)
    return 1.0 - np.sqrt(t ** 2 - 4.0 * sbar ** 2) / t


def excursion_uniformity_gap(l, t, n_grid=4001):
    """ sup_z |P(Gamma/t <= z) - z| over z in [0, 1], evaluated on a dense grid of sojourn times """
    _check_window(l, t)
    sbar = np.linspace(0.0, t - l, n_grid)
    gap = np.max(np.abs(_cdf(l, t, sbar) - sbar / t))

    # Above (t - l)/t the CDF is 1 and the largest gap sits at the window end
    return float(max(gap, l / t))


class ExcursionLaw(MixedSojournLaw):
    def __init__(self, l, t):
        """ Excursion sojourn law on (0, t - l); drift-free and atomless """
        _check_window(l, t)
        self.l, self.t = l, t
        super().__init__((0.0, t - l), name="excursion")

    def _density(self, s):
        return _density(self.l, self.t, s)

    def _continuous_cdf(self, z):
        return _cdf(self.l, self.t, z)

    def mean(self):
        return excursion_sojourn_mean(self.l, self.t)


def excursion_law(l, t):
    return ExcursionLaw(l, t)
