import os
import json
import numpy as np
import pytest

from cli.commands import cmd_eval, cmd_fk_check, cmd_sample, cmd_sweep, cmd_validate, run_command
from omegaconf import OmegaConf
from utils.exceptions import EXIT_PASS, EXIT_VALIDATION_FAIL, DomainError, UsageError
from utils.utils import RunManifest, config_overrides


def _read_csv(path):
    with open(path) as f:
        header = f.readline().strip()
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_eval_table_and_sidecars(make_cfg, tmp_path):
    cfg = make_cfg("command=eval", "law=meander-limit", "law.t=4", "grid=11")
    assert cmd_eval(cfg) == EXIT_PASS

    header, table = _read_csv(tmp_path / "eval_meander-limit.csv")
    assert header == "s,density,cdf"
    assert table.shape == (11, 3)
    assert table[0, 0] == 0.0 and table[-1, 0] == 3.0
    assert table[-1, 2] == pytest.approx(0.5, abs=1e-12)
    assert np.all(np.isfinite(table[:, 1]))

    with open(tmp_path / "eval_meander-limit.law.json") as f:
        assert json.load(f)["atoms"][0]["mass"] == 0.5
    manifest = RunManifest.load(str(tmp_path / "eval_meander-limit.csv.manifest.json"))
    assert manifest.command == "eval"
    assert manifest.seed == 125125125


def test_eval_json(make_cfg, tmp_path):
    cfg = make_cfg("command=eval", "law=excursion", "grid=5", "format=json")
    assert run_command(cfg) == EXIT_PASS
    with open(tmp_path / "eval_excursion.json") as f:
        payload = json.load(f)
    assert payload["cdf"][-1] == pytest.approx(1.0, abs=1e-12)
    assert len(payload["s"]) == 5


def test_sample_rows(make_cfg, tmp_path):
    cfg = make_cfg("command=sample", "law=bridge", "sim.paths=200", "sim.steps=32", "sim.streams=2")
    assert cmd_sample(cfg) == EXIT_PASS
    header, table = _read_csv(tmp_path / "sample_bridge.csv")
    assert header == "gamma,atom_event"
    assert table.shape == (200, 2)
    assert os.path.exists(tmp_path / "sample_bridge.csv.manifest.json")


def test_sample_replays_identically(make_cfg, tmp_path):
    overrides = ("command=sample", "law=meander-limit", "sim.paths=100", "sim.steps=16", "sim.streams=3")
    cmd_sample(make_cfg(*overrides))
    with open(tmp_path / "sample_meander-limit.csv") as f:
        first = f.read()
    cmd_sample(make_cfg(*overrides))
    with open(tmp_path / "sample_meander-limit.csv") as f:
        assert f.read() == first


def test_negative_control_fails(make_cfg, tmp_path):
    cfg = make_cfg("command=validate", "law=excursion", "reference_law=free", "sim.paths=2000", "sim.steps=64")
    assert cmd_validate(cfg) == EXIT_VALIDATION_FAIL
    with open(tmp_path / "validate_excursion.json") as f:
        report = json.load(f)["report"]
    assert report["pass"] is False


@pytest.mark.slow
def test_validate_limit_meander(make_cfg, tmp_path):
    cfg = make_cfg("command=validate", "law=meander-limit", "law.t=4", "sim.paths=4000", "sim.steps=512",
                   "alpha=0.001")
    assert cmd_validate(cfg) == EXIT_PASS
    with open(tmp_path / "validate_meander-limit.json") as f:
        payload = json.load(f)
    low, high = payload["report"]["atom_ci"]
    assert low <= 0.5 <= high


def test_fk_check(make_cfg, tmp_path):
    cfg = make_cfg("command=fk_check", "law=free", "fk.dump_slices=true", "fk.slices=4")
    assert cmd_fk_check(cfg) == EXIT_PASS
    with open(tmp_path / "fk_check.json") as f:
        payload = json.load(f)
    assert payload["pass"] is True
    assert payload["discrepancy"] <= 1e-3
    assert len([name for name in os.listdir(tmp_path / "fk_slices") if name.endswith(".csv")]) == 5


def test_fk_check_start_near_boundary(make_cfg):
    with pytest.raises(DomainError):
        cmd_fk_check(make_cfg("command=fk_check", "law=free", "law.x=5", "fk.width=10"))


def test_sweep_asymptotic(make_cfg, tmp_path):
    assert cmd_sweep(make_cfg("command=sweep", "law=excursion", "sweep.kind=asymptotic", "sweep.grid=21")) == EXIT_PASS
    _, table = _read_csv(tmp_path / "sweep_asymptotic.csv")
    assert table.shape == (63, 3)
    with open(tmp_path / "sweep_asymptotic.json") as f:
        assert json.load(f)["monotone"] is True


def test_sweep_half(make_cfg, tmp_path):
    assert cmd_sweep(make_cfg("command=sweep", "law=excursion", "sweep.kind=half", "sweep.grid=50")) == EXIT_PASS
    with open(tmp_path / "sweep_half.json") as f:
        deviation = json.load(f)
    assert deviation["density"] < 1e-10 and deviation["cdf"] < 1e-12


def test_sweep_ratios(make_cfg, tmp_path):
    assert cmd_sweep(make_cfg("command=sweep", "law=excursion", "sweep.kind=ratios", "sweep.ratios=[0.0,0.5]",
                              "sweep.grid=10")) == EXIT_PASS
    _, table = _read_csv(tmp_path / "sweep_ratios_excursion_density.csv")
    np.testing.assert_allclose(table[table[:, 0] == 0.0, 2], 0.5)
    assert os.path.exists(tmp_path / "sweep_ratios_meander_limit_cdf.csv.manifest.json")


def test_unknown_inputs(make_cfg):
    with pytest.raises(UsageError):
        run_command(make_cfg("command=plot"))
    with pytest.raises(UsageError):
        cmd_sweep(make_cfg("command=sweep", "sweep.kind=spiral"))
    with pytest.raises(UsageError):
        cmd_validate(make_cfg("command=validate", "reference_law=cauchy", "sim.paths=10"))


def test_manifest_overrides_rebuild_config(make_cfg):
    cfg = make_cfg("command=validate", "law=meander-u", "law.u=0.2", "sim.paths=1234", "reference_law=meander-limit")
    rebuilt = make_cfg(*config_overrides(cfg))
    assert OmegaConf.to_container(rebuilt, resolve=True) == OmegaConf.to_container(cfg, resolve=True)


def test_eval_bridge_from_u_reaches_horizon(make_cfg, tmp_path):
    cfg = make_cfg("command=eval", "law=bridge-u", "grid=11")
    assert cmd_eval(cfg) == EXIT_PASS
    _, table = _read_csv(tmp_path / "eval_bridge-u.csv")
    assert np.all(np.isfinite(table))
    assert table[-1, 1] > 1e5
    assert table[-1, 2] == pytest.approx(1.0, abs=1e-6)


def test_eval_drifted_free_law(make_cfg, tmp_path):
    cfg = make_cfg("command=eval", "law=free", "law.mu=0.5", "law.x=0.3", "grid=11")
    assert cmd_eval(cfg) == EXIT_PASS
    _, table = _read_csv(tmp_path / "eval_free.csv")
    assert np.all(np.diff(table[:, 2]) >= 0)
    assert 0.0 < table[5, 2] < table[-1, 2] < 1.0
