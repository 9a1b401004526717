"""
@file paths.py

Batched float64 path samplers on uniform grids: free drifted Brownian motion, Brownian bridges,
rejection-conditioned meanders started at u > 0, the u -> 0 limit meander (exact tilted Rayleigh
position at time l) and generalized excursions. All randomness comes from the torch.Generator
passed in, so a fixed generator state reproduces every path bit for bit.
"""
import math
import numpy as np
import torch

from dataclasses import dataclass
from utils.exceptions import BudgetError, require

DTYPE = torch.float64

# Default acceptance budget of the rejection samplers, in proposal-steps per requested path
DEFAULT_BUDGET = 1e7
DEFAULT_BATCH = 2048


@dataclass(frozen=True)
class SamplePath:
    """
    Process values on the grid t0, t0 + dt, ..., t0 + n dt.
    values has shape [n + 1] for one path or [n_paths, n + 1] for a batch.
    """
    dt: float
    values: torch.Tensor
    t0: float = 0.0

    def __post_init__(self):
        require(self.dt > 0, f"SamplePath needs dt > 0, got {self.dt}")
        require(self.values.numel() > 0, "SamplePath needs at least one value")

    @property
    def n_steps(self):
        return self.values.shape[-1] - 1

    @property
    def t_end(self):
        return self.t0 + self.n_steps * self.dt

    @property
    def terminal(self):
        return self.values[..., -1]


def stream_generators(seed, streams, device="cpu"):
    """
    One torch.Generator per worker stream, seeded from numpy's SeedSequence spawned off (seed, stream index)
    :param seed: 64-bit master seed
    :param streams: number of independent streams
    """
    children = np.random.SeedSequence(int(seed)).spawn(int(streams))
    generators = []
    for child in children:
        generator = torch.Generator(device=device)
        generator.manual_seed(int(child.generate_state(1, dtype=np.uint64)[0]))
        generators.append(generator)
    return generators


def _normals(shape, rng):
    return torch.randn(shape, generator=rng, dtype=DTYPE, device=rng.device)


def _uniforms(shape, rng):
    return torch.rand(shape, generator=rng, dtype=DTYPE, device=rng.device)


def _as_start(x0, batch, rng):
    """ Broadcasts a scalar or per-path start level to a [batch, 1] column """
    x0 = torch.as_tensor(x0, dtype=DTYPE, device=rng.device)
    return x0.reshape(-1, 1).expand(batch, 1) if x0.numel() == 1 else x0.reshape(batch, 1)


def bridge_survives(left, right, dt, rng):
    """
    Brownian-bridge no-crossing draw between consecutive grid values: a step with both ends
    positive crosses zero with probability e^{-2 left right / dt}, any other step crosses surely
    """
    both_positive = (left > 0) & (right > 0)
    crossing = torch.where(both_positive, torch.exp(-2.0 * left.clamp(min=0) * right.clamp(min=0) / dt),
                           torch.ones_like(left))
    return _uniforms(left.shape, rng) >= crossing


def sample_free_path(mu, x0, horizon, n_steps, rng, n_paths=None, t0=0.0):
    """
    Exact Gaussian increments value_{k+1} = value_k + mu dt + sqrt(dt) N(0, 1)
    :param mu: drift
    :param x0: start level, scalar or one per path
    :param horizon: length of the time window
    :param n_steps: number of grid steps
    :param rng: torch.Generator
    :param n_paths: batch size; None returns a single path of shape [n_steps + 1]
    :param t0: time stamp of the first grid point
    """
    require(horizon > 0, f"horizon must be positive, got {horizon}")
    require(n_steps >= 1, f"n_steps must be >= 1, got {n_steps}")
    batch = 1 if n_paths is None else int(n_paths)
    dt = horizon / n_steps

    increments = mu * dt + math.sqrt(dt) * _normals((batch, n_steps), rng)
    start = _as_start(x0, batch, rng)
    values = torch.cat([start, start + torch.cumsum(increments, dim=1)], dim=1)
    return SamplePath(dt, values[0] if n_paths is None else values, t0)


def sample_bridge_path(u, horizon, n_steps, rng, n_paths=None, t0=0.0):
    """
    Brownian bridge from u to 0 over the window, W(k) + u (1 - k/n) - (k/n) W(n) with W a free path from 0.
    The terminal value is exactly 0.
    """
    free = sample_free_path(0.0, 0.0, horizon, n_steps, rng, n_paths=1 if n_paths is None else n_paths)
    fraction = torch.arange(n_steps + 1, dtype=DTYPE, device=rng.device) / n_steps
    start = _as_start(u, free.values.shape[0], rng)
    values = start * (1.0 - fraction) + free.values - fraction * free.values[:, -1:]
    values[:, -1] = 0.0
    return SamplePath(free.dt, values[0] if n_paths is None else values, t0)


def _conditioning_steps(l, window_dt):
    """ Grid steps on [0, l], matching the window step as closely as an integer count allows """
    return max(1, int(round(l / window_dt)))


def rejection_meander_endpoints(u, mu, l, n_steps_l, rng, n, budget=DEFAULT_BUDGET, batch_size=DEFAULT_BATCH):
    """
    Draws free paths from u on [0, l] and keeps those whose grid minimum is positive and whose every
    step survives the bridge no-crossing draw.
    :return: (accepted positions B(l) as a tensor of size n, number of proposals drawn)
    """
    require(u > 0, f"rejection meander needs u > 0, got u={u}")
    require(l > 0, f"rejection meander needs l > 0, got l={l}")
    dl = l / n_steps_l
    accepted, count, attempts = [], 0, 0

    while count < n:
        proposal = sample_free_path(mu, u, l, n_steps_l, rng, n_paths=batch_size).values
        left, right = proposal[:, :-1], proposal[:, 1:]
        alive = (right.min(dim=1).values > 0) & bridge_survives(left, right, dl, rng).all(dim=1)

        attempts += batch_size
        accepted.append(proposal[alive, -1])
        count += int(alive.sum())

        if attempts * n_steps_l > budget * n and count < n:
            raise BudgetError(f"Meander rejection budget exhausted after {attempts} proposals with {count}/{n} "
                              f"accepted at u={u}; consider a larger u", attempts=attempts, accepted=count)

    return torch.cat(accepted)[:n], attempts


def sample_meander_rejection(u, mu, l, t, n_steps, rng, n_paths=None, budget=DEFAULT_BUDGET,
                             batch_size=DEFAULT_BATCH):
    """
    Meander on [0, l] by rejection from u, then a free drifted path on [l, t].
    The returned path covers the window [l, t] with n_steps steps.
    """
    require(0 < l < t, f"meander window needs 0 < l < t, got l={l}, t={t}")
    n = 1 if n_paths is None else int(n_paths)
    window = t - l

    y, _ = rejection_meander_endpoints(u, mu, l, _conditioning_steps(l, window / n_steps), rng, n,
                                       budget=budget, batch_size=batch_size)
    path = sample_free_path(mu, y, window, n_steps, rng, n_paths=n, t0=l)
    return SamplePath(path.dt, path.values[0] if n_paths is None else path.values, l)


def sample_limit_meander_endpoint(mu, l, rng, n, max_rounds=10_000):
    """
    Tilted Rayleigh position proportional to y e^{-y^2/2l + mu y}.
    mu = 0 is inverse-CDF Rayleigh(sqrt l); mu < 0 accepts Rayleigh(sqrt l) proposals with probability
    e^{mu y}; mu > 0 accepts Rayleigh(sqrt(2l)) proposals with probability e^{-(y - 2 mu l)^2/4l}.
    """
    if l == 0:
        return torch.zeros(n, dtype=DTYPE, device=rng.device)
    if mu == 0:
        return torch.sqrt(-2.0 * l * torch.log1p(-_uniforms((n,), rng)))

    scale2 = l if mu < 0 else 2.0 * l
    accepted, count = [], 0
    for _ in range(max_rounds):
        y = torch.sqrt(-2.0 * scale2 * torch.log1p(-_uniforms((n,), rng)))
        ratio = torch.exp(mu * y) if mu < 0 else torch.exp(-(y - 2.0 * mu * l) ** 2 / (4.0 * l))
        keep = _uniforms((n,), rng) < ratio
        accepted.append(y[keep])
        count += int(keep.sum())
        if count >= n:
            return torch.cat(accepted)[:n]
    raise BudgetError(f"Tilted Rayleigh rejection exhausted {max_rounds} rounds at mu={mu}, l={l}",
                      attempts=max_rounds * n, accepted=count)


def sample_limit_meander(mu, l, t, n_steps, rng, n_paths=None):
    """
    Limit meander: exact position at l, then a free drifted path over [l, t].
    The path on [0, l) is not materialized since the sojourn over [l, t] only depends on B(l).
    """
    require(0 <= l < t, f"meander window needs 0 <= l < t, got l={l}, t={t}")
    n = 1 if n_paths is None else int(n_paths)
    y = sample_limit_meander_endpoint(mu, l, rng, n)
    path = sample_free_path(mu, y, t - l, n_steps, rng, n_paths=n, t0=l)
    return SamplePath(path.dt, path.values[0] if n_paths is None else path.values, l)


def sample_limit_excursion(l, t, n_steps, rng, n_paths=None):
    """
    Excursion: Rayleigh position at l with scale^2 = l(t - l)/t, then an exact bridge to 0 at t.
    Takes no drift since the pinned law does not depend on it.
    """
    require(0 <= l < t, f"excursion window needs 0 <= l < t, got l={l}, t={t}")
    n = 1 if n_paths is None else int(n_paths)
    scale2 = l * (t - l) / t
    y = torch.sqrt(-2.0 * scale2 * torch.log1p(-_uniforms((n,), rng)))
    path = sample_bridge_path(y, t - l, n_steps, rng, n_paths=n, t0=l)
    return SamplePath(path.dt, path.values[0] if n_paths is None else path.values, l)


def sample_excursion_rejection(u, mu, l, t, n_steps, rng, n_paths=None, budget=DEFAULT_BUDGET,
                               batch_size=DEFAULT_BATCH):
    """
    Excursion through the general conditioned route: rejection meander from u on [0, l], acceptance of
    B(l) = y with probability proportional to the drifted transition density from y to 0 over [l, t],
    then an exact bridge to 0.
    """
    require(0 < l < t, f"excursion window needs 0 < l < t, got l={l}, t={t}")
    n = 1 if n_paths is None else int(n_paths)
    window = t - l
    n_steps_l = _conditioning_steps(l, window / n_steps)

    # Transition density from y to 0 is proportional to e^{-(y + mu T)^2 / 2T}, largest at y = max(0, -mu T)
    peak = 0.0 if mu < 0 else -0.5 * mu ** 2 * window
    accepted, count, attempts = [], 0, 0
    while count < n:
        y, drawn = rejection_meander_endpoints(u, mu, l, n_steps_l, rng, n - count, budget=budget,
                                               batch_size=batch_size)
        attempts += drawn
        keep = _uniforms(y.shape, rng) < torch.exp(-(y + mu * window) ** 2 / (2.0 * window) - peak)
        accepted.append(y[keep])
        count += int(keep.sum())
        if attempts * n_steps_l > budget * n and count < n:
            raise BudgetError(f"Excursion rejection budget exhausted after {attempts} proposals at u={u}",
                              attempts=attempts, accepted=count)

    path = sample_bridge_path(torch.cat(accepted)[:n], window, n_steps, rng, n_paths=n, t0=l)
    return SamplePath(path.dt, path.values[0] if n_paths is None else path.values, l)
