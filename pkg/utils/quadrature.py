"""
@file quadrature.py

Adaptive Gauss-Kronrod (G7/K15) integration engine used by every law evaluator.
Three integrand classes are supported: smooth integrands on a finite interval, integrands with a
Gaussian envelope on a right half-line (truncated where the envelope drops below 1e-18 of its peak),
and integrands with inverse square-root singularities at both ends of a finite interval (removed by
the substitution s = a + (b - a) sin^2(theta)).

Integrands are evaluated vectorized: f receives a numpy array of abscissae and must return an
array of the same shape.
"""
import enum
import numpy as np

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence
from utils.exceptions import DomainError, NumericError

# Kronrod abscissae on [-1, 1] together with the Kronrod and embedded Gauss weights
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

# Mirror the half tables into the full 15-point rule
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])

# Gaussian envelope e^{-z^2/2} falls below 1e-18 of its peak beyond this many standard deviations
TAIL_SIGMAS = float(np.sqrt(2.0 * np.log(1e18)))

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-14
MAX_INTERVALS = 10_000

# Intervals bisected per round, worst first
MAX_SPLITS_PER_ROUND = 32

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    """ Integral estimate, its error estimate and the number of integrand evaluations spent """
    value: float
    err_est: float
    n_evals: int

    def __float__(self):
        return float(self.value)


class DomainKind(str, enum.Enum):
    FINITE = "finite"
    GAUSSIAN_TAIL_RIGHT = "gaussian-tail-right"
    SQRT_SINGULAR_BOTH_ENDS = "sqrt-singular-both-ends"


@dataclass(frozen=True)
class IntegrandSpec:
    """
    Declarative description of an integral: the integrand, the domain class and scale hints.
    For GAUSSIAN_TAIL_RIGHT, `b` is unused and `sigma`/`loc` describe the Gaussian envelope.
    """
    func: Callable[[np.ndarray], np.ndarray]
    kind: DomainKind
    a: float
    b: Optional[float] = None
    sigma: float = 1.0
    loc: Optional[float] = None
    points: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind is DomainKind.GAUSSIAN_TAIL_RIGHT:
            if not self.sigma > 0:
                raise DomainError(f"Gaussian tail integrand needs sigma > 0, got {self.sigma}.")
        elif self.b is None or self.b < self.a:
            raise DomainError(f"Finite integrand needs a <= b, got a={self.a}, b={self.b}.")


def _gauss_kronrod(f, lefts, rights):
    """
    Applies the G7/K15 pair on a batch of intervals at once
    :return: Kronrod estimates, |K15 - G7| error estimates, and the absolute-value integrals
    """
    centers = 0.5 * (lefts + rights)
    halves = 0.5 * (rights - lefts)
    x = centers[:, None] + halves[:, None] * NODES[None, :]

    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)]
        raise NumericError(f"Integrand returned non-finite values, first at x={bad[0]:.17g}")

    kronrod = halves * (fx @ KRONROD_WEIGHTS)
    gauss = halves * (fx @ GAUSS_WEIGHTS)
    resabs = halves * (np.abs(fx) @ KRONROD_WEIGHTS)
    return kronrod, np.abs(kronrod - gauss), resabs


def integrate_finite(f, a, b, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL, points=None,
                     max_intervals=MAX_INTERVALS):
    """
    Globally adaptive bisection with the embedded G7/K15 pair.
    Every round bisects, worst first, up to MAX_SPLITS_PER_ROUND intervals whose error exceeds their
    share of the tolerance, until the summed error drops below max(rel_tol * |value|, abs_tol) or the
    subdivision cap is hit.
    :param f: vectorized integrand
    :param a: left end
    :param b: right end
    :param rel_tol: relative tolerance on the value
    :param abs_tol: absolute error floor
    :param points: optional interior breakpoints (kinks, peaks) to start the subdivision from
    :param max_intervals: subdivision cap
    :return: QuadResult
    """
    a, b = float(a), float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError(f"integrate_finite needs finite limits, got [{a}, {b}]")
    if b < a:
        raise DomainError(f"integrate_finite needs a <= b, got [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0, 0)

    # Initial partition from the breakpoints
    edges = [a, b]
    if points is not None:
        edges += [float(p) for p in np.atleast_1d(points) if a < p < b]
    edges = np.unique(np.asarray(edges))

    lefts, rights = edges[:-1], edges[1:]
    vals, errs, absvals = _gauss_kronrod(f, lefts, rights)
    n_evals = NODES.size * lefts.size
    frozen = np.zeros(lefts.size, dtype=bool)

    while True:
        value = vals.sum()
        err = errs.sum()
        tol = max(rel_tol * abs(value), abs_tol, 50.0 * _EPS * absvals.sum())
        if err <= tol:
            return QuadResult(float(value), float(err), n_evals)

        # Intervals that cannot be bisected further in floating point are frozen
        active = ~frozen
        if not np.any(active):
            return QuadResult(float(value), float(err), n_evals)

        # Worst intervals above their share of the tolerance, always including the worst one
        share = tol / lefts.size
        ranked = np.argsort(np.where(active, errs, -np.inf))[::-1]
        n_split = int(np.clip(np.sum(active & (errs > share)), 1, MAX_SPLITS_PER_ROUND))
        pick = np.zeros_like(active)
        pick[ranked[:n_split]] = True

        if lefts.size + pick.sum() > max_intervals:
            raise NumericError("Adaptive quadrature exceeded the subdivision cap",
                               best_estimate=float(value), err_est=float(err), n_intervals=int(lefts.size))

        pl, pr = lefts[pick], rights[pick]
        mids = 0.5 * (pl + pr)
        new_lefts = np.concatenate([pl, mids])
        new_rights = np.concatenate([mids, pr])
        new_vals, new_errs, new_abs = _gauss_kronrod(f, new_lefts, new_rights)
        n_evals += NODES.size * new_lefts.size

        # Freeze halves too narrow to split again
        width_floor = 8.0 * _EPS * np.maximum(np.abs(new_lefts), np.abs(new_rights))
        new_frozen = (new_rights - new_lefts) <= np.maximum(width_floor, 1e-300)

        keep = ~pick
        lefts = np.concatenate([lefts[keep], new_lefts])
        rights = np.concatenate([rights[keep], new_rights])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
        absvals = np.concatenate([absvals[keep], new_abs])
        frozen = np.concatenate([frozen[keep], new_frozen])


def gaussian_tail_limit(a, sigma_hint, loc=None):
    """ Right truncation point of a Gaussian-envelope integrand on [a, inf) """
    center = a if loc is None else max(a, loc)
    return center + TAIL_SIGMAS * sigma_hint


def integrate_gaussian_tail(f, a, sigma_hint, loc=None, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL,
                            points=None, max_intervals=MAX_INTERVALS):
    """
    Integrates f over [a, inf) for integrands bounded by C * poly(w) * exp(-(w - loc)^2 / (2 sigma^2)).
    The range is cut where the envelope drops below 1e-18 of its peak; the envelope center and the
    one and three sigma marks are seeded as breakpoints.
    :param f: vectorized integrand
    :param a: left end
    :param sigma_hint: envelope standard deviation
    :param loc: envelope center (defaults to a)
    """
    if not sigma_hint > 0:
        raise DomainError(f"integrate_gaussian_tail needs sigma_hint > 0, got {sigma_hint}")

    b = gaussian_tail_limit(a, sigma_hint, loc)
    center = a if loc is None else loc
    seeds = [center + k * sigma_hint for k in (-3.0, -1.0, 0.0, 1.0, 3.0)]
    if points is not None:
        seeds += list(np.atleast_1d(points))
    return integrate_finite(f, a, b, rel_tol=rel_tol, abs_tol=abs_tol, points=seeds, max_intervals=max_intervals)


def sqrt_singular_integrand(f, a, b):
    """
    Integrand in theta of the substitution s = a + (b - a) sin^2(theta) on [0, pi/2].
    The Jacobian 2 (b - a) sin cos is written as 2 sqrt((s - a)(b - s)) with the gaps taken from the
    rounded s, so that f and its weight see the same s. Near the ends, where sin^2 rounds s onto
    a or b, s is held a few ulps of max(|a|, |b|) inside the interval.
    """
    margin = min(4.0 * _EPS * max(abs(a), abs(b)), 0.25 * (b - a))
    lo, hi = a + margin, b - margin

    def transformed(theta):
        s = np.clip(a + (b - a) * np.sin(theta) ** 2, lo, hi)
        return np.asarray(f(s), dtype=float) * 2.0 * np.sqrt((s - a) * (b - s))

    return transformed


def integrate_sqrt_singular(f, a, b, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL, points=None,
                            max_intervals=MAX_INTERVALS):
    """
    Integrates f over (a, b) where f(s) * sqrt((s - a)(b - s)) stays bounded. Applies
    s = a + (b - a) sin^2(theta), ds = 2 sqrt((s - a)(b - s)) dtheta, then integrates on [0, pi/2].
    :param points: optional breakpoints given in the original s variable
    """
    a, b = float(a), float(b)
    if b < a:
        raise DomainError(f"integrate_sqrt_singular needs a <= b, got [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    width = b - a
    transformed = sqrt_singular_integrand(f, a, b)

    theta_points = None
    if points is not None:
        inner = [p for p in np.atleast_1d(points) if a < p < b]
        theta_points = [float(np.arcsin(np.sqrt((p - a) / width))) for p in inner]
    return integrate_finite(transformed, 0.0, 0.5 * np.pi, rel_tol=rel_tol, abs_tol=abs_tol,
                            points=theta_points, max_intervals=max_intervals)


def integrate(spec: IntegrandSpec, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """ Dispatches an IntegrandSpec to the matching integration routine """
    if spec.kind is DomainKind.FINITE:
        return integrate_finite(spec.func, spec.a, spec.b, rel_tol, abs_tol, points=spec.points)
    elif spec.kind is DomainKind.GAUSSIAN_TAIL_RIGHT:
        return integrate_gaussian_tail(spec.func, spec.a, spec.sigma, spec.loc, rel_tol, abs_tol, points=spec.points)
    elif spec.kind is DomainKind.SQRT_SINGULAR_BOTH_ENDS:
        return integrate_sqrt_singular(spec.func, spec.a, spec.b, rel_tol, abs_tol, points=spec.points)
    raise NotImplementedError(f"Domain kind {spec.kind} not implemented.")
