"""
@file dataloader.py

Reading and writing raw Monte Carlo sample dumps: one row per path with columns (gamma, atom_event),
as CSV, JSON or a binary npz archive, and loading them back into an EmpiricalLaw.
"""
import os
import json
import numpy as np

from utils.exceptions import UsageError
from utils.metrics import EmpiricalLaw
from utils.utils import ensure_dir, write_csv, write_json

SAMPLE_HEADER = "gamma,atom_event"


def save_samples(path, gamma, atom_event, fmt="csv"):
    """
    Dumps the sojourn samples of a campaign
    :param path: output file without extension
    :param fmt: "csv", "json" or "npz"
    :return: path of the written file
    """
    gamma = np.asarray(gamma, dtype=float)
    atom_event = np.asarray(atom_event, dtype=bool)
    if fmt == "csv":
        return write_csv(f"{path}.csv", SAMPLE_HEADER, [gamma, atom_event.astype(float)])
    elif fmt == "npz":
        ensure_dir(os.path.dirname(os.path.abspath(path)))
        np.savez(os.path.abspath(f"{path}.npz"), gamma=gamma, atom_event=atom_event)
        return f"{path}.npz"
    elif fmt == "json":
        return write_json(f"{path}.json", {"gamma": gamma.tolist(), "atom_event": atom_event.tolist()})
    raise UsageError(f"Unknown sample format '{fmt}', expected csv, json or npz")


def load_samples(path):
    """ Reads a dump written by save_samples back into (gamma, atom_event) arrays """
    if path.endswith(".npz"):
        archive = np.load(path)
        return archive["gamma"], archive["atom_event"].astype(bool)
    elif path.endswith(".json"):
        with open(path, "r") as f:
            payload = json.load(f)
        return np.asarray(payload["gamma"], dtype=float), np.asarray(payload["atom_event"], dtype=bool)

    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return table[:, 0], table[:, 1].astype(bool)


def load_empirical_law(path, atom_location=float("nan")):
    """ Loads a dump straight into an EmpiricalLaw """
    gamma, atom_event = load_samples(path)
    return EmpiricalLaw.from_occupation(gamma, atom_event, atom_location=atom_location)
