"""
@file solver.py

Feynman-Kac oracle for the free sojourn law. The Laplace transform w(x, t) = E_x[e^{-beta Gamma_t}] of the
time spent in (0, inf) by B(s) + mu s solves
    w_t = 1/2 w_xx + mu w_x - beta 1{x > 0} w,    w(x, 0) = 1,
which is stepped here with a theta-scheme (Crank-Nicolson at theta = 1/2) on a uniform grid, using
scipy.linalg.solve_banded for the tridiagonal solves. The substitution w = e^{-mu^2 t/2 - mu x} z removes
the drift, leaving z_t = 1/2 z_xx - beta 1{x > 0} z with z(x, 0) = e^{mu x}.
"""
import logging
import numpy as np

from dataclasses import dataclass
from scipy.linalg import solve_banded
from utils.exceptions import NumericError, require
from utils.quadrature import DomainKind, IntegrandSpec, integrate

log = logging.getLogger(__name__)

DRIFT_SCHEMES = ("upwind", "central")


@dataclass(frozen=True)
class FkGrid:
    """ Space grid, time step, potential level and drift of the Cauchy problem """
    x_min: float
    x_max: float
    nx: int
    dt: float
    beta: float
    mu: float
    drift_scheme: str = "upwind"
    theta: float = 0.5

    def __post_init__(self):
        require(self.x_min < 0 < self.x_max, f"grid must straddle 0, got [{self.x_min}, {self.x_max}]")
        require(self.nx >= 3, f"grid needs nx >= 3, got {self.nx}")
        require(self.dt > 0, f"time step must be positive, got {self.dt}")
        require(self.beta >= 0, f"potential level must be nonnegative, got {self.beta}")
        require(self.drift_scheme in DRIFT_SCHEMES, f"drift scheme must be one of {DRIFT_SCHEMES}")
        require(0 <= self.theta <= 1, f"theta must lie in [0, 1], got {self.theta}")

    @classmethod
    def symmetric(cls, width, nx, dt, beta, mu, drift_scheme="upwind", theta=0.5):
        """ Grid on [-width, width]; an odd nx puts a node at 0 """
        return cls(-width, width, nx, dt, beta, mu, drift_scheme, theta)

    @classmethod
    def from_cfg(cls, cfg, mu, horizon):
        """ Builds the grid from the hydra fk group: width in units of sqrt(horizon), steps per horizon """
        return cls.symmetric(float(cfg.width) * np.sqrt(horizon), int(cfg.nx), horizon / int(cfg.steps),
                             float(cfg.beta), float(mu), str(cfg.drift_scheme), float(cfg.theta))

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    def potential(self):
        """ beta on x > 0, zero below, and beta/2 at the node nearest 0 """
        x = self.x
        k = np.where(x > 0, self.beta, 0.0)
        k[np.argmin(np.abs(x))] = 0.5 * self.beta
        return k


@dataclass(frozen=True)
class FkSolution:
    """ w on the space grid at the stored time levels; values has shape [n_times, nx] """
    x: np.ndarray
    times: np.ndarray
    values: np.ndarray

    def at(self, x, t=None):
        """ Linear interpolation in space at the stored time level nearest t (final level by default) """
        level = -1 if t is None else int(np.argmin(np.abs(self.times - t)))
        return np.interp(x, self.x, self.values[level])

    @property
    def final(self):
        return self.values[-1]


def _operator_bands(grid, drift, potential):
    """ Sub, main and super diagonals of L = 1/2 d_xx + drift d_x - k on the interior nodes """
    dx = grid.dx
    diffusion = 0.5 / dx ** 2
    lower = np.full(grid.nx - 2, diffusion)
    upper = np.full(grid.nx - 2, diffusion)
    main = -2.0 * diffusion - potential[1:-1]

    if drift != 0:
        if grid.drift_scheme == "central":
            lower -= drift / (2.0 * dx)
            upper += drift / (2.0 * dx)
        elif drift > 0:
            upper += drift / dx
            main -= drift / dx
        else:
            lower -= drift / dx
            main += drift / dx
    return lower, main, upper


def _theta_solve(grid, horizon, drift, initial, left_boundary, right_boundary, save_every=1):
    """
    Generic theta-scheme march with Dirichlet data at both ends
    :param initial: values at t = 0 on the full grid
    :param left_boundary: callable t -> value at x_min
    :param right_boundary: callable t -> value at x_max
    """
    n_t = max(1, int(round(horizon / grid.dt)))
    dt = horizon / n_t
    theta = grid.theta
    lower, main, upper = _operator_bands(grid, drift, grid.potential())

    # Implicit matrix in solve_banded layout
    ab = np.zeros((3, grid.nx - 2))
    ab[0, 1:] = -theta * dt * upper[:-1]
    ab[1, :] = 1.0 - theta * dt * main
    ab[2, :-1] = -theta * dt * lower[1:]

    w = np.array(initial, dtype=float)
    w[0], w[-1] = left_boundary(0.0), right_boundary(0.0)
    times, levels = [0.0], [w.copy()]

    for step in range(1, n_t + 1):
        t_new = step * dt
        interior = w[1:-1]
        applied = lower * w[:-2] + main * interior + upper * w[2:]
        rhs = interior + (1.0 - theta) * dt * applied

        left_new, right_new = left_boundary(t_new), right_boundary(t_new)
        rhs[0] += theta * dt * lower[0] * left_new
        rhs[-1] += theta * dt * upper[-1] * right_new

        w = np.concatenate([[left_new], solve_banded((1, 1), ab, rhs), [right_new]])
        if not np.all(np.isfinite(w)):
            raise NumericError(f"Feynman-Kac march produced non-finite values at t={t_new}",
                               best_estimate=float("nan"), n_intervals=step)
        if step % save_every == 0 or step == n_t:
            times.append(t_new)
            levels.append(w.copy())

    return FkSolution(grid.x, np.asarray(times), np.vstack(levels))


def solve_fk(grid: FkGrid, horizon, save_every=1):
    """
    Solves w_t = 1/2 w_xx + mu w_x - k w, w(x, 0) = 1, with w = 1 at x_min and w = e^{-beta t} at x_max
    :param grid: FkGrid
    :param horizon: final time
    :param save_every: store every k-th time level (the final level is always stored)
    """
    require(horizon > 0, f"horizon must be positive, got {horizon}")
    solution = _theta_solve(grid, horizon, grid.mu, np.ones(grid.nx), lambda t: 1.0,
                            lambda t: np.exp(-grid.beta * t), save_every)
    log.debug(f"=> solve_fk: mu={grid.mu}, beta={grid.beta}, nx={grid.nx}, horizon={horizon}")
    return solution


def solve_fk_transformed(grid: FkGrid, horizon, save_every=1):
    """ Driftless problem for z = e^{mu^2 t/2 + mu x} w, with the matching far-field data """
    mu, beta = grid.mu, grid.beta
    return _theta_solve(grid, horizon, 0.0, np.exp(mu * grid.x),
                        lambda t: np.exp(0.5 * mu ** 2 * t + mu * grid.x_min),
                        lambda t: np.exp(-beta * t + 0.5 * mu ** 2 * t + mu * grid.x_max), save_every)


def check_transformation(mu, beta, grid: FkGrid, horizon=1.0):
    """
    Solves the drifted problem and the driftless transformed one on the same grid and returns
    max |w - e^{-mu^2 t/2 - mu x} z| over interior nodes at the horizon
    """
    grid = FkGrid(grid.x_min, grid.x_max, grid.nx, grid.dt, beta, mu, grid.drift_scheme, grid.theta)
    w = solve_fk(grid, horizon).final
    z = solve_fk_transformed(grid, horizon).final
    back = np.exp(-0.5 * mu ** 2 * horizon - mu * grid.x) * z
    return float(np.max(np.abs(w - back)[1:-1]))


def refinement_study(mu, beta, horizon=1.0, width=10.0, sizes=(251, 501, 1001, 2001), drift_scheme="upwind"):
    """
    check_transformation on successively refined grids (nx nodes and nx - 1 time steps)
    :return: list of (nx, discrepancy)
    """
    out = []
    for nx in sizes:
        grid = FkGrid.symmetric(width * np.sqrt(horizon), nx, horizon / (nx - 1), beta, mu, drift_scheme)
        out.append((nx, check_transformation(mu, beta, grid, horizon)))
    return out


def laplace_of_law(law, beta):
    """
    E[e^{-beta Gamma}] of a MixedSojournLaw: quadrature of the continuous part plus the weighted atoms
    """
    require(beta >= 0, f"beta must be nonnegative, got {beta}")
    a, b = law.support
    spec = IntegrandSpec(lambda s: np.exp(-beta * s) * np.asarray(law.density(s)),
                         DomainKind.SQRT_SINGULAR_BOTH_ENDS, a, b)
    continuous = integrate(spec).value
    return continuous + sum(np.exp(-beta * atom.location) * atom.mass for atom in law.atoms)
