"""
@file commands.py

Commands behind main.py: evaluate a law on a grid, dump Monte Carlo samples, validate samples
against a law, cross-check the Feynman-Kac solver, and tabulate sweep families. Each command
takes the hydra root config, writes its outputs under cfg.out with a manifest per file, and
returns a process exit code.
"""
import os
import logging
import numpy as np
import pytorch_lightning.loggers as pl_loggers

from fkpde.solver import FkGrid, laplace_of_law, solve_fk
from laws.CommonLaw import ProcessParams
from laws.Excursion import (excursion_law, excursion_sojourn_cdf, excursion_sojourn_cdf_half,
                            excursion_sojourn_density_half, excursion_uniformity_gap)
from laws.Meander import meander_limit_law
from omegaconf import DictConfig
from sim.campaign import SimConfig, run_campaign, simulate_occupation
from utils.dataloader import save_samples
from utils.exceptions import EXIT_PASS, EXIT_VALIDATION_FAIL, UsageError, require
from utils.metrics import ks_test_continuous, mean_with_se
from utils.utils import LAW_NAMES, RunManifest, ensure_dir, get_law, write_csv, write_json

log = logging.getLogger(__name__)

# Densities are singular at some support ends; the density column is read this far inside
EDGE = 1e-12


def _params(cfg):
    return ProcessParams.from_cfg(cfg.law)


def _law(name, params):
    if name not in LAW_NAMES:
        raise UsageError(f"Unknown law '{name}', expected one of {LAW_NAMES}")
    return get_law(name, params)


def _finish(cfg, manifest, path):
    """ Registers an output file and writes its manifest next to it """
    manifest.add_output(path)
    manifest.write(path)
    return path


def cmd_eval(cfg: DictConfig):
    """ Tabulates s, density and continuous CDF on grid points spanning the support, plus a law sidecar """
    name = str(cfg.law.name)
    law = _law(name, _params(cfg))
    require(int(cfg.grid) >= 2, f"grid needs at least 2 points, got {cfg.grid}")

    a, b = law.support
    s = np.linspace(a, b, int(cfg.grid))
    inset = EDGE * (b - a)
    density = np.asarray(law.density(np.clip(s, a + inset, b - inset)))
    cdf = np.asarray(law.continuous_cdf(s))

    manifest = RunManifest.from_cfg(cfg)
    base = os.path.join(cfg.out, f"eval_{name}")
    if cfg.format == "json":
        path = write_json(f"{base}.json", {"s": s.tolist(), "density": density.tolist(), "cdf": cdf.tolist()})
    else:
        path = write_csv(f"{base}.csv", "s,density,cdf", [s, density, cdf])
    _finish(cfg, manifest, path)

    # Sidecar describing the atoms and masses
    sidecar = _finish(cfg, manifest, write_json(f"{base}.law.json", law.to_dict()))
    log.info(f"=> eval {name}: {len(s)} rows to {path}, law sidecar {sidecar}")
    return EXIT_PASS


def cmd_sample(cfg: DictConfig):
    """ Runs a campaign and dumps its (gamma, atom_event) rows """
    name = str(cfg.law.name)
    params = _params(cfg)
    config = SimConfig.from_cfg(cfg)
    gamma, atom_event = simulate_occupation(name, params, config)

    manifest = RunManifest.from_cfg(cfg)
    path = save_samples(os.path.join(cfg.out, f"sample_{name}"), gamma, atom_event, fmt=str(cfg.format))
    _finish(cfg, manifest, path)

    log.info(f"=> sample {name}: {gamma.size} paths, mean {gamma.mean():.6f}, atom freq {atom_event.mean():.6f}")
    return EXIT_PASS


def cmd_validate(cfg: DictConfig):
    """ Campaign plus goodness-of-fit report against the law (or against cfg.reference_law) """
    name = str(cfg.law.name)
    params = _params(cfg)
    reference = name if cfg.reference_law is None else str(cfg.reference_law)
    law = _law(reference, params)

    empirical = run_campaign(name, params, SimConfig.from_cfg(cfg))
    report = ks_test_continuous(empirical, law, alpha=float(cfg.alpha))
    mean, se = mean_with_se(empirical)

    payload = {
        "law": name,
        "reference_law": reference,
        "report": report.to_dict(),
        "n_total": empirical.n_total,
        "sample_mean": mean,
        "sample_se": se,
        "law_mean": law.mean(),
        "law_atom_mass": law.atom_mass,
    }
    manifest = RunManifest.from_cfg(cfg)
    path = _finish(cfg, manifest, write_json(os.path.join(cfg.out, f"validate_{name}.json"), payload))

    # Tensorboard scalars of the campaign
    tb_logger = pl_loggers.TensorBoardLogger(save_dir=f"{cfg.out}/", name=f"validate_{name}")
    tb_logger.log_metrics({"ks_stat": report.ks_stat, "ks_critical": report.ks_critical,
                           "atom_freq": report.atom_freq, "sample_mean": mean, "sample_se": se})
    tb_logger.finalize("success")

    for key, value in report.to_dict().items():
        log.info(f"=> {key}: {value}")
    log.info(f"=> sample mean: {mean:.6f} +- {se:.6f} (law {payload['law_mean']:.6f}), report {path}")
    return EXIT_PASS if report.passed else EXIT_VALIDATION_FAIL


def cmd_fk_check(cfg: DictConfig):
    """ Feynman-Kac solver value at (x, t) against the Laplace transform of the free sojourn law """
    mu, x, t = float(cfg.law.mu), float(cfg.law.x), float(cfg.law.t)
    beta = float(cfg.fk.beta)
    grid = FkGrid.from_cfg(cfg.fk, mu, t)
    require(grid.x_min + 8 * np.sqrt(t) <= x <= grid.x_max - 8 * np.sqrt(t),
            f"x={x} lies within 8 sqrt(t) of the grid boundary; widen fk.width")

    solution = solve_fk(grid, t, save_every=max(1, int(cfg.fk.steps) // max(1, int(cfg.fk.slices))))
    solver_value = float(solution.at(x))
    law_value = float(laplace_of_law(get_law("free", ProcessParams(mu=mu, t=t, x=x)), beta))
    discrepancy = abs(solver_value - law_value)
    passed = discrepancy <= float(cfg.fk.tolerance)

    manifest = RunManifest.from_cfg(cfg)
    payload = {"mu": mu, "beta": beta, "x": x, "t": t, "solver": solver_value, "laplace": law_value,
               "discrepancy": discrepancy, "tolerance": float(cfg.fk.tolerance), "pass": passed}
    path = _finish(cfg, manifest, write_json(os.path.join(cfg.out, "fk_check.json"), payload))

    # Optional w(x, t_k) slices
    if cfg.fk.dump_slices:
        for time, values in zip(solution.times, solution.values):
            _finish(cfg, manifest, write_csv(os.path.join(cfg.out, "fk_slices", f"w_t{time:.6g}.csv"),
                                             "x,w", [solution.x, values]))

    log.info(f"=> fk_check: solver {solver_value:.8f}, laplace {law_value:.8f}, discrepancy {discrepancy:.2e}, {path}")
    return EXIT_PASS if passed else EXIT_VALIDATION_FAIL


def _sweep_asymptotic(cfg, manifest):
    """ CDF of Gamma/t for growing horizons at fixed l, with the uniformity gap of each """
    l = float(cfg.law.l)
    z = np.linspace(0.0, 1.0, int(cfg.sweep.grid))
    ratios, zs, values, gaps = [], [], [], {}
    for t in cfg.sweep.horizons:
        t = float(t)
        window = t - l
        cdf = np.where(z * t <= window, excursion_sojourn_cdf(l, t, np.minimum(z * t, window)), 1.0)
        ratios.append(np.full(z.size, l / t))
        zs.append(z)
        values.append(cdf)
        gaps[str(t)] = excursion_uniformity_gap(l, t)

    base = os.path.join(cfg.out, "sweep_asymptotic")
    _finish(cfg, manifest, write_csv(f"{base}.csv", "ratio,s,value",
                                     [np.concatenate(ratios), np.concatenate(zs), np.concatenate(values)]))
    ordered = [gaps[key] for key in gaps]
    summary = {"l": l, "gaps": gaps, "monotone": bool(np.all(np.diff(ordered) < 0))}
    _finish(cfg, manifest, write_json(f"{base}.json", summary))
    for key, gap in gaps.items():
        log.info(f"=> t={key}: sup_z |P(Gamma/t <= z) - z| = {gap:.6f}")


def _family(law, n):
    """ Density on cell midpoints and CDF on the closed grid over the law's support """
    a, b = law.support
    closed = np.linspace(a, b, n)
    mids = a + (b - a) * (np.arange(n) + 0.5) / n
    return mids, np.asarray(law.density(mids)), closed, np.asarray(law.continuous_cdf(closed))


def _sweep_ratios(cfg, manifest):
    """ Excursion and limit-meander density/CDF families over l/t ratios at the law's horizon """
    t = float(cfg.law.t)
    n = int(cfg.sweep.grid)
    columns = {key: ([], [], []) for key in ("excursion_density", "excursion_cdf",
                                            "meander_limit_density", "meander_limit_cdf")}
    for ratio in cfg.sweep.ratios:
        ratio = float(ratio)
        for family, law in (("excursion", excursion_law(ratio * t, t)), ("meander_limit", meander_limit_law(ratio * t, t))):
            mids, density, closed, cdf = _family(law, n)
            for key, s, value in ((f"{family}_density", mids, density), (f"{family}_cdf", closed, cdf)):
                columns[key][0].append(np.full(n, ratio))
                columns[key][1].append(s)
                columns[key][2].append(value)

    for key, (ratios, s, values) in columns.items():
        _finish(cfg, manifest, write_csv(os.path.join(cfg.out, f"sweep_ratios_{key}.csv"), "ratio,s,value",
                                         [np.concatenate(ratios), np.concatenate(s), np.concatenate(values)]))


def _sweep_half(cfg, manifest):
    """ l = t/2 excursion density and CDF, with their deviation from the specialized closed forms """
    t = float(cfg.law.t)
    n = int(cfg.sweep.grid)
    law = excursion_law(0.5 * t, t)
    mids, density, closed, cdf = _family(law, n)

    base = os.path.join(cfg.out, "sweep_half")
    _finish(cfg, manifest, write_csv(f"{base}_density.csv", "ratio,s,value", [np.full(n, 0.5), mids, density]))
    _finish(cfg, manifest, write_csv(f"{base}_cdf.csv", "ratio,s,value", [np.full(n, 0.5), closed, cdf]))
    deviation = {
        "density": float(np.max(np.abs(density - excursion_sojourn_density_half(t, mids)))),
        "cdf": float(np.max(np.abs(cdf - excursion_sojourn_cdf_half(t, closed)))),
    }
    _finish(cfg, manifest, write_json(f"{base}.json", deviation))
    log.info(f"=> l = t/2 deviations: density {deviation['density']:.2e}, cdf {deviation['cdf']:.2e}")


def cmd_sweep(cfg: DictConfig):
    """ Long-format (ratio, s, value) tables of the excursion and limit-meander families """
    manifest = RunManifest.from_cfg(cfg)
    ensure_dir(cfg.out)
    kind = str(cfg.sweep.kind)
    if kind == "asymptotic":
        _sweep_asymptotic(cfg, manifest)
    elif kind == "ratios":
        _sweep_ratios(cfg, manifest)
    elif kind == "half":
        _sweep_half(cfg, manifest)
    else:
        raise UsageError(f"Unknown sweep kind '{kind}', expected asymptotic, ratios or half")
    return EXIT_PASS


COMMANDS = {
    "eval": cmd_eval,
    "sample": cmd_sample,
    "validate": cmd_validate,
    "fk_check": cmd_fk_check,
    "sweep": cmd_sweep,
}


def run_command(cfg: DictConfig):
    """ Dispatches cfg.command and returns its exit code """
    command = str(cfg.command)
    if command not in COMMANDS:
        raise UsageError(f"Unknown command '{command}', expected one of {tuple(COMMANDS)}")
    return COMMANDS[command](cfg)
