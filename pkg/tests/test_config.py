import os

import pytest
import yaml

from hybridlchs.config import ExperimentConfig, deep_merge, dump_config, load_config
from hybridlchs.utils import ValidationError

REPO = os.path.join(os.path.dirname(__file__), "..")


def _write(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_defaults_load():
    cfg = load_config()
    assert isinstance(cfg, ExperimentConfig)
    assert cfg.seed == 1234
    assert cfg.benchmark.bc == "dirichlet"
    assert (cfg.kernel.r, cfg.kernel.r_prime, cfg.kernel.n_trunc) == (7.9, 4.1, 48)
    assert cfg.simulation.prep_method == "le"
    assert cfg.simulation.circuit == "gate"


@pytest.mark.parametrize(
    "name, benchmark",
    [
        ("heat_dirichlet.yaml", "heat-dirichlet"),
        ("heat_neumann.yaml", "heat-neumann"),
        ("heat_periodic.yaml", "heat-periodic"),
        ("damped_oscillator.yaml", "damped-osc"),
        ("sweep_dirichlet.yaml", "heat-dirichlet"),
    ],
)
def test_shipped_configs_validate(name, benchmark):
    cfg = load_config(os.path.join(REPO, name))
    assert cfg.benchmark.name == benchmark


def test_unknown_key_is_rejected_with_its_path(tmp_path):
    path = _write(tmp_path, {"kernel": {"betta": 0.5}})
    with pytest.raises(ValidationError, match="kernel.betta"):
        load_config(path)


@pytest.mark.parametrize(
    "override",
    [
        {"dv": {"beta_grid": []}},
        {"dv": {"beta_grid": [0.5, 1.2]}},
        {"sweep": {"r": []}},
        {"kernel": {"r_prime": 8.0}},
        {"kernel": {"beta": 1.0}},
        {"simulation": {"n_fock": 16}},
        {"simulation": {"order": 3}},
        {"simulation": {"prep_method": "gkp"}},
        {"simulation": {"circuit": "ket"}},
        {"benchmark": {"name": "custom"}},
        {"benchmark": {"dims": [1]}},
        {"seed": -1},
    ],
)
def test_invalid_values(override):
    with pytest.raises(ValidationError):
        load_config(overrides=override)


def test_missing_file():
    with pytest.raises(ValidationError):
        load_config("does/not/exist.yaml")


def test_overrides_win_over_file(tmp_path):
    path = _write(tmp_path, {"seed": 5, "kernel": {"beta": 0.3}})
    cfg = load_config(path, {"seed": 9})
    assert cfg.seed == 9
    assert cfg.kernel.beta == 0.3
    assert cfg.kernel.r == 7.9


def test_deep_merge_keeps_base():
    base = {"a": {"b": 1, "c": 2}, "d": 3}
    merged = deep_merge(base, {"a": {"b": 10}})
    assert merged == {"a": {"b": 10, "c": 2}, "d": 3}
    assert base["a"]["b"] == 1


def test_dump_and_reload(tmp_path):
    cfg = load_config(overrides={"benchmark": {"name": "heat-periodic", "dims": [2, 3]}, "seed": 77})
    path = str(tmp_path / "dumped.yaml")
    dump_config(cfg, path)
    assert load_config(path) == cfg
