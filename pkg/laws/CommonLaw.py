"""
@file CommonLaw.py

A common class that each sojourn-time law inherits.
Holds the mixed (density + atoms) bookkeeping, the quadrature-backed normalization, CDF table,
inverse CDF and moments so that individual laws only need to provide their density and atoms.
"""
import numpy as np

from dataclasses import dataclass, asdict
from functools import cached_property
from scipy.interpolate import PchipInterpolator
from utils.exceptions import DomainError, require
from utils.quadrature import DEFAULT_ABS_TOL, DomainKind, IntegrandSpec, integrate, integrate_finite, sqrt_singular_integrand

# Number of theta-panels used by the tabulated CDF of laws without a closed form
CDF_PANELS = 128

# Error of the whole CDF table relative to the continuous mass
CDF_TABLE_TOL = 1e-10


@dataclass(frozen=True)
class ProcessParams:
    """
    Parameter block shared by every law: drift mu, horizon t, meander window l, start level u,
    generic start/end level x and (for the elastic kernel) a second level y.
    """
    mu: float = 0.0
    t: float = 1.0
    l: float = 0.0
    u: float = 0.0
    x: float = 0.0
    y: float = 0.0

    def __post_init__(self):
        require(self.t > 0, f"horizon t must be positive, got t={self.t}")
        require(0 <= self.l < self.t, f"meander window needs 0 <= l < t, got l={self.l}, t={self.t}")
        require(self.u >= 0, f"start level u must be nonnegative, got u={self.u}")

    @classmethod
    def from_cfg(cls, cfg):
        """ Builds the parameter block out of a hydra law config """
        return cls(**{key: float(cfg[key]) for key in ("mu", "t", "l", "u", "x", "y") if key in cfg})

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float


class MixedSojournLaw:
    def __init__(self, support, atoms=(), name="law"):
        """
        Generic implementation of a law made of an absolutely continuous part on an interval
        and a finite list of atoms
        :param support: (a, b) interval of the continuous part
        :param atoms: iterable of (location, mass) pairs
        :param name: law identifier used in reports
        """
        a, b = float(support[0]), float(support[1])
        require(a < b, f"law support must be a nonempty interval, got [{a}, {b}]")
        self.support = (a, b)
        self.name = name

        self.atoms = tuple(Atom(float(loc), float(mass)) for loc, mass in atoms)
        for atom in self.atoms:
            require(-1e-12 <= atom.mass <= 1 + 1e-12, f"atom mass outside [0, 1]: {atom}")

    def _density(self, s):
        """ Placeholder for the density on the open support, vectorized over s """
        raise NotImplementedError("In _density: law density not specified.")

    def _continuous_cdf(self, z):
        """ Closed-form integral of the density over [a, z]; laws without one use the CDF table """
        return self._cdf_table(z)

    def density(self, s):
        """
        Evaluates the density, zero outside the open support
        :param s: scalar or array of times
        """
        s = np.asarray(s, dtype=float)
        a, b = self.support
        out = np.zeros(s.shape)

        inside = (s > a) & (s < b)
        if np.any(inside):
            out[inside] = self._density(s[inside])
        return out if out.ndim else float(out)

    @property
    def atom_mass(self):
        return float(sum(atom.mass for atom in self.atoms))

    @cached_property
    def continuous_mass(self):
        """ Integral of the density over the support """
        a, b = self.support
        return integrate(IntegrandSpec(self.density, DomainKind.SQRT_SINGULAR_BOTH_ENDS, a, b)).value

    def total_mass(self):
        return self.continuous_mass + self.atom_mass

    def continuous_cdf(self, z):
        """ Integral of the density over [a, z], clipped to the support """
        z = np.asarray(z, dtype=float)
        a, b = self.support
        out = np.asarray(self._continuous_cdf(np.clip(z, a, b)), dtype=float)
        return out if out.ndim else float(out)

    def cdf(self, z):
        """ P(Gamma <= z), atoms included """
        z = np.asarray(z, dtype=float)
        out = np.asarray(self.continuous_cdf(z), dtype=float)
        for atom in self.atoms:
            out = out + atom.mass * (z >= atom.location)
        return out if out.ndim else float(out)

    def conditional_cdf(self, z):
        """ CDF of the continuous part renormalized to a probability law """
        mass = self.continuous_mass
        if not mass > 0:
            raise DomainError(f"Law {self.name} has no continuous part to condition on.")
        return np.asarray(self.continuous_cdf(z)) / mass

    @cached_property
    def _theta_table(self):
        """
        Cumulative integrals of the density at the nodes of a uniform grid in theta,
        s = a + (b - a) sin^2(theta), built panel by panel to an error of CDF_TABLE_TOL times
        the continuous mass
        """
        a, b = self.support
        thetas = np.linspace(0.0, 0.5 * np.pi, CDF_PANELS + 1)
        transformed = sqrt_singular_integrand(self.density, a, b)
        abs_tol = CDF_TABLE_TOL * self.continuous_mass / CDF_PANELS + DEFAULT_ABS_TOL

        panels = [integrate_finite(transformed, lo, hi, abs_tol=abs_tol).value
                  for lo, hi in zip(thetas[:-1], thetas[1:])]
        cumulative = np.concatenate([[0.0], np.cumsum(panels)])
        return thetas, np.maximum.accumulate(cumulative)

    def _cdf_table(self, z):
        """ Interpolates the cumulative table in theta space """
        a, b = self.support
        thetas, cumulative = self._theta_table
        theta_z = np.arcsin(np.sqrt(np.clip((np.asarray(z) - a) / (b - a), 0.0, 1.0)))
        return PchipInterpolator(thetas, cumulative)(theta_z)

    def ppf(self, q):
        """
        Inverse of the conditional CDF of the continuous part
        :param q: scalar or array of probabilities in [0, 1]
        """
        q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
        a, b = self.support
        thetas, cumulative = self._theta_table

        # Initial guess by inverse interpolation of the table, then Newton polish
        levels, unique = np.unique(cumulative / cumulative[-1], return_index=True)
        theta_q = PchipInterpolator(levels, thetas[unique])(q)
        s = a + (b - a) * np.sin(theta_q) ** 2
        for _ in range(3):
            with np.errstate(all="ignore"):
                residual = np.asarray(self.conditional_cdf(s)) - q
                slope = np.asarray(self.density(s)) / self.continuous_mass
                step = np.where((slope > 0) & np.isfinite(slope), residual / slope, 0.0)
            s = np.clip(s - step, a, b)
        return s if s.ndim else float(s)

    def mean(self):
        """ E[Gamma] including the atoms """
        a, b = self.support
        spec = IntegrandSpec(lambda s: s * np.asarray(self.density(s)), DomainKind.SQRT_SINGULAR_BOTH_ENDS, a, b)
        first = integrate(spec).value
        return first + sum(atom.location * atom.mass for atom in self.atoms)

    def to_dict(self):
        """ JSON-ready description of the law """
        return {
            "name": self.name,
            "support": list(self.support),
            "atoms": [{"location": atom.location, "mass": atom.mass} for atom in self.atoms],
            "continuous_mass": self.continuous_mass,
        }
