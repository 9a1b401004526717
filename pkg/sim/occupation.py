"""
@file occupation.py

Occupation time of [0, inf) along a sampled path, with linear interpolation of zero crossings
inside a step and structural detection of the never-negative atom event.
"""
import torch

from dataclasses import dataclass
from sim.paths import SamplePath, bridge_survives
from utils.exceptions import require


@dataclass(frozen=True)
class OccupationResult:
    """ Sojourn value(s) and atom flag(s); atom_event implies gamma equals the window length exactly """
    gamma: torch.Tensor
    atom_event: torch.Tensor


def occupation_time(path: SamplePath, start=None, rng=None, window=None):
    """
    Time spent in [0, inf) over [start, t_end] of a sampled path
    :param path: SamplePath covering the window
    :param start: start of the window (defaults to the first grid time)
    :param rng: torch.Generator for the bridge no-crossing draws of the atom test
    :param window: exact window length assigned to atom events (defaults to the grid length)
    :return: OccupationResult
    """
    start = path.t0 if start is None else start
    offset = int(round((start - path.t0) / path.dt))
    require(0 <= offset < path.n_steps, f"path does not cover a window starting at {start}")
    require(rng is not None, "occupation_time needs a generator for the bridge no-crossing draws")

    values = path.values[..., offset:]
    left, right = values[..., :-1], values[..., 1:]
    left_up, right_up = left >= 0, right >= 0

    # Positive fraction of each step; mixed-sign steps interpolate the crossing linearly
    gap = torch.where(left_up != right_up, left - right, torch.ones_like(left))
    mixed = torch.where(left_up, left / gap, -right / gap)
    fraction = torch.where(left_up & right_up, torch.ones_like(left),
                           torch.where(~left_up & ~right_up, torch.zeros_like(left), mixed))

    full = (path.n_steps - offset) * path.dt if window is None else window
    gamma = torch.clamp(path.dt * fraction.sum(dim=-1), max=full)

    # Atom: every step nonnegative at both ends and no bridge crossing in between
    atom_event = (left_up & right_up).all(dim=-1) & bridge_survives(left, right, path.dt, rng).all(dim=-1)
    gamma = torch.where(atom_event, torch.full_like(gamma, full), gamma)
    return OccupationResult(gamma, atom_event)
