"""
@file utils.py

Utility functions across files: law lookup by name, run manifests and the CSV/JSON writers
shared by every command.
"""
import os
import json
import numpy as np

from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from laws import __version__
from laws.CommonLaw import ProcessParams
from omegaconf import DictConfig, OmegaConf

LAW_NAMES = ("bridge", "bridge-u", "free", "meander-u", "meander-limit", "excursion", "excursion-u", "elastic")


def get_law(name, params: ProcessParams):
    """ Import and return the law of the given name built from a parameter block """
    # Lowercase name in case of misspellings
    name = name.lower()

    # Zero-to-zero bridge, uniform sojourn
    if name == "bridge":
        from laws.Bridge import bridge_law
        return bridge_law(params.t)

    # Bridge from u to 0
    elif name == "bridge-u":
        from laws.Bridge import bridge_law_from_u
        return bridge_law_from_u(params.u, params.t)

    # Free drifted Brownian motion from x
    elif name == "free":
        from laws.FreeSojourn import free_sojourn_law, free_sojourn_law_mu0
        if params.mu == 0 and params.x >= 0:
            return free_sojourn_law_mu0(params.x, params.t)
        return free_sojourn_law(params.mu, params.x, params.t)

    # Meander started at u > 0
    elif name == "meander-u":
        from laws.Meander import meander_sojourn_law_finite_u
        return meander_sojourn_law_finite_u(params.u, params.mu, params.l, params.t)

    # Limit meander
    elif name == "meander-limit":
        from laws.Meander import meander_limit_law
        return meander_limit_law(params.l, params.t, params.mu)

    # Excursions, sampled either through the limit or the conditioned route
    elif name in ("excursion", "excursion-u"):
        from laws.Excursion import excursion_law
        return excursion_law(params.l, params.t)

    # Elastic Brownian motion transition law
    elif name == "elastic":
        from laws.Elastic import elastic_law
        return elastic_law(params.mu, params.y, params.t)

    # Given no correct law name, raise error
    raise NotImplementedError("Law {} not implemented.".format(name))


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(path, header, columns):
    """
    Writes columns with 17 significant digits, one header line, no comment prefix
    :param header: comma-separated column names
    :param columns: sequence of equally long 1-D arrays
    """
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    np.savetxt(path, np.column_stack([np.asarray(column, dtype=float) for column in columns]),
               fmt="%.17g", delimiter=",", header=header, comments="")
    return path


def write_json(path, payload):
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=False)
    return path


def config_overrides(cfg: DictConfig):
    """
    Flattens a resolved root config into hydra override strings that rebuild it from the
    command line (the law group is selected by its name first)
    """
    container = OmegaConf.to_container(cfg, resolve=True)
    overrides = [f"law={container['law']['name']}"]

    def walk(prefix, node):
        for key, value in node.items():
            name = f"{prefix}{key}"
            if isinstance(value, dict):
                walk(f"{name}.", value)
            elif isinstance(value, list):
                overrides.append(f"{name}={json.dumps(value, separators=(',', ':'))}")
            else:
                overrides.append(f"{name}={'null' if value is None else value}")

    walk("", {key: value for key, value in container.items() if key != "hydra"})
    return overrides


@dataclass
class RunManifest:
    """ Provenance record written next to every output file """
    command: str
    parameters: dict
    seed: int
    overrides: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    version: str = __version__

    @classmethod
    def from_cfg(cls, cfg: DictConfig):
        return cls(command=str(cfg.command), parameters=OmegaConf.to_container(cfg, resolve=True),
                   seed=int(cfg.seed), overrides=config_overrides(cfg))

    @classmethod
    def load(cls, path):
        with open(path, "r") as f:
            return cls(**json.load(f))

    def add_output(self, path):
        self.outputs.append(os.path.abspath(path))
        return path

    def write(self, path):
        """ Writes the manifest as `<path>.manifest.json` """
        return write_json(f"{path}.manifest.json", asdict(self))
