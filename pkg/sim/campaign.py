"""
@file campaign.py

Monte Carlo campaigns: splits the requested paths over seeded worker streams, samples and reduces
each stream in batches, and folds the per-stream results in stream order.
"""
import logging
import numpy as np
import torch

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from laws.CommonLaw import ProcessParams
from sim.occupation import occupation_time
from sim.paths import (DEFAULT_BATCH, DEFAULT_BUDGET, sample_bridge_path, sample_excursion_rejection,
                       sample_free_path, sample_limit_excursion, sample_limit_meander, sample_meander_rejection,
                       stream_generators)
from tqdm import tqdm
from utils.exceptions import UsageError, require
from utils.metrics import EmpiricalLaw

log = logging.getLogger(__name__)

CAMPAIGN_LAWS = ("bridge", "bridge-u", "free", "meander-u", "meander-limit", "excursion", "excursion-u")


@dataclass(frozen=True)
class SimConfig:
    """
    Campaign size and reproducibility settings. `streams` fixes the random numbers, `threads`
    only caps how many streams run at once.
    """
    n_paths: int
    n_steps: int = 4096
    seed: int = 125125125
    streams: int = 1
    threads: int = 1
    batch_size: int = DEFAULT_BATCH
    budget: float = DEFAULT_BUDGET
    device: str = "cpu"
    progress: bool = False

    def __post_init__(self):
        require(self.n_paths >= 1, f"n_paths must be >= 1, got {self.n_paths}")
        require(self.n_steps >= 1, f"n_steps must be >= 1, got {self.n_steps}")
        require(self.streams >= 1, f"streams must be >= 1, got {self.streams}")

    @classmethod
    def from_cfg(cls, cfg):
        """ Builds the config out of the hydra root config (sim group plus the top-level seed) """
        return cls(n_paths=int(cfg.sim.paths), n_steps=int(cfg.sim.steps), seed=int(cfg.seed),
                   streams=int(cfg.sim.streams), threads=max(1, int(cfg.sim.threads)),
                   batch_size=int(cfg.sim.batch_size), budget=float(cfg.sim.budget),
                   device=str(cfg.sim.device), progress=bool(cfg.sim.progress))


def campaign_window(law_id, params: ProcessParams):
    """ (window start, window length) of the sojourn functional for a law id """
    if law_id in ("bridge", "bridge-u", "free"):
        return 0.0, params.t
    return params.l, params.t - params.l


def sample_batch(law_id, params: ProcessParams, n_steps, rng, n, budget=DEFAULT_BUDGET, batch_size=DEFAULT_BATCH):
    """ Dispatches a batch of n paths to the sampler of the law id """
    p = params
    if law_id == "bridge":
        return sample_bridge_path(0.0, p.t, n_steps, rng, n_paths=n)
    elif law_id == "bridge-u":
        return sample_bridge_path(p.u, p.t, n_steps, rng, n_paths=n)
    elif law_id == "free":
        require(p.x >= 0, "free campaigns start at x >= 0 (the sampled atom is the never-negative event)")
        return sample_free_path(p.mu, p.x, p.t, n_steps, rng, n_paths=n)
    elif law_id == "meander-u":
        return sample_meander_rejection(p.u, p.mu, p.l, p.t, n_steps, rng, n_paths=n, budget=budget,
                                        batch_size=batch_size)
    elif law_id == "meander-limit":
        return sample_limit_meander(p.mu, p.l, p.t, n_steps, rng, n_paths=n)
    elif law_id == "excursion":
        return sample_limit_excursion(p.l, p.t, n_steps, rng, n_paths=n)
    elif law_id == "excursion-u":
        return sample_excursion_rejection(p.u, p.mu, p.l, p.t, n_steps, rng, n_paths=n, budget=budget,
                                          batch_size=batch_size)
    raise UsageError(f"Unknown campaign law '{law_id}', expected one of {CAMPAIGN_LAWS}")


def _split(n_paths, streams):
    """ Paths per stream, the first n_paths % streams streams taking one extra """
    base, extra = divmod(n_paths, streams)
    return [base + (index < extra) for index in range(streams)]


def _run_stream(law_id, params, config, rng, count):
    """ Samples and reduces one stream's share in batches """
    start, window = campaign_window(law_id, params)
    gammas, atoms = [], []
    done = 0
    while done < count:
        n = min(config.batch_size, count - done)
        path = sample_batch(law_id, params, config.n_steps, rng, n, budget=config.budget, batch_size=config.batch_size)
        result = occupation_time(path, start=start, rng=rng, window=window)
        gammas.append(result.gamma.cpu().numpy())
        atoms.append(result.atom_event.cpu().numpy())
        done += n
    if not gammas:
        return np.zeros(0), np.zeros(0, dtype=bool)
    return np.concatenate(gammas), np.concatenate(atoms)


def simulate_occupation(law_id, params: ProcessParams, config: SimConfig):
    """
    Raw campaign output in stream order
    :return: (gamma array, atom_event array), one entry per path
    """
    if law_id not in CAMPAIGN_LAWS:
        raise UsageError(f"Unknown campaign law '{law_id}', expected one of {CAMPAIGN_LAWS}")

    generators = stream_generators(config.seed, config.streams, device=config.device)
    counts = _split(config.n_paths, config.streams)
    log.info(f"=> Campaign {law_id}: {config.n_paths} paths x {config.n_steps} steps over {config.streams} streams")

    with torch.no_grad(), ThreadPoolExecutor(max_workers=min(config.threads, config.streams)) as pool:
        futures = [pool.submit(_run_stream, law_id, params, config, rng, count)
                   for rng, count in zip(generators, counts)]
        results = [future.result() for future in tqdm(futures, desc=f"{law_id} streams", disable=not config.progress)]

    # Deterministic fold ordered by stream index
    gamma = np.concatenate([result[0] for result in results])
    atom_event = np.concatenate([result[1] for result in results])
    return gamma, atom_event


def run_campaign(law_id, params: ProcessParams, config: SimConfig):
    """ Runs a campaign and returns its EmpiricalLaw """
    gamma, atom_event = simulate_occupation(law_id, params, config)
    _, window = campaign_window(law_id, params)
    return EmpiricalLaw.from_occupation(gamma, atom_event, atom_location=window)


def endpoint_conditioned_gamma(y, w, mu, horizon, cell, n_paths, n_steps, rng):
    """
    Sojourn values of free drifted paths from y whose endpoint lands within `cell` of w
    :return: numpy array of the retained sojourn values
    """
    path = sample_free_path(mu, y, horizon, n_steps, rng, n_paths=n_paths)
    result = occupation_time(path, rng=rng, window=horizon)
    keep = (path.terminal - w).abs() < cell
    return result.gamma[keep].cpu().numpy()
