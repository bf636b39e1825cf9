import json
import os

import numpy as np
import pandas as pd
import pytest

from hybridlchs import cli, stateprep
from hybridlchs.cli import (
    SCHEMA_TAG,
    build_parser,
    cmd_benchmark,
    cmd_coeffs,
    cmd_dv_baseline,
    cmd_gatecount,
    cmd_prep,
    cmd_sweep,
    cmd_truncation,
    compute_coefficients,
    initial_state,
    load_reference_values,
    load_register,
    register_model,
    run,
    stage,
    sweep_marginals,
    validate_report,
)
from hybridlchs.config import load_config
from hybridlchs.utils import NumericalError, ValidationError

REPO = os.path.join(os.path.dirname(__file__), "..")
REFERENCE = load_reference_values()["benchmarks"]
BENCHMARKS = [
    ("heat_dirichlet.yaml", "heat-dirichlet", 3e-3),
    ("heat_neumann.yaml", "heat-neumann", 1e-3),
    ("heat_periodic.yaml", "heat-periodic", 1e-3),
]


def small_config(tmp_path, **sections):
    overrides = {
        "kernel": {"beta": 0.5, "r": 2.0, "r_prime": 0.5, "n_trunc": 8, "truncation_n": [4, 8]},
        "simulation": {"n_fock": 16, "n_t": 20},
        "dv": {"beta_grid": [0.6, 0.8]},
        "output": {"dir": str(tmp_path / "out")},
    }
    for name, values in sections.items():
        overrides.setdefault(name, {}).update(values)
    return load_config(overrides=overrides)


def test_initial_state():
    np.testing.assert_array_equal(initial_state(1, 2), [0, 1, 0, 0])
    np.testing.assert_allclose(initial_state([[1, 0], [0, 1]], 1), np.array([1, 1j]) / np.sqrt(2))
    with pytest.raises(ValidationError):
        initial_state(4, 2)
    with pytest.raises(ValidationError):
        initial_state([1, 0, 0], 1)
    with pytest.raises(ValidationError):
        initial_state([0, 0], 1)


def test_stage_prefixes_errors():
    timing = {}
    with pytest.raises(ValidationError, match=r"^\[coeffs\] bad"):
        with stage("coeffs", timing):
            raise ValidationError("bad")
    with stage("quick", timing):
        pass
    assert "quick" in timing and "coeffs" not in timing


def test_gatecount_exit_codes():
    report, code = cmd_gatecount("dirichlet", [2], 100)
    assert code == 0
    assert (report.one_qubit, report.cnot) == (1400, 400)
    assert run(["gatecount", "--bc", "periodic", "--dims", "2,3", "--n-t", "10"]) == 0


def test_workers_flag_names_its_consumers(capsys):
    assert build_parser().parse_args(["sweep", "--workers", "3"]).workers == 3
    with pytest.raises(SystemExit):
        build_parser().parse_args(["benchmark", "--help"])
    text = " ".join(capsys.readouterr().out.split())
    assert "SNAP+D" in text and "sweep points" in text


def test_run_reports_validation_failures(tmp_path):
    assert run(["benchmark", "--config", str(tmp_path / "missing.yaml")]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("kernel:\n  n_truncation: 4\n")
    assert run(["coeffs", "--config", str(bad)]) == 2


def _minimal_report(**results):
    return {
        "schema": SCHEMA_TAG,
        "command": "benchmark",
        "version": "0.1.0",
        "config": {},
        "seed": 1,
        "results": results,
    }


def test_validate_report():
    validate_report(_minimal_report(prep={"prep_method": "le", "prep_fidelity": 0.99}))
    with pytest.raises(ValidationError):
        validate_report({k: v for k, v in _minimal_report().items() if k != "seed"})
    with pytest.raises(ValidationError):
        validate_report({**_minimal_report(), "schema": "other/1"})
    with pytest.raises(ValidationError):
        validate_report(_minimal_report(prep={"prep_method": "le"}))
    with pytest.raises(NumericalError):
        validate_report(_minimal_report(prep={"prep_method": "le", "prep_fidelity": 1.5}))


def test_benchmark_and_dv_baseline(tmp_path):
    cfg = small_config(tmp_path, simulation={"prep_method": "le"})
    report = cmd_benchmark(cfg, reproducible=True)
    results = report["results"]["benchmark"]
    assert 0 <= results["fidelity"] <= 1
    assert 0 < results["p_succ"] <= 1
    assert results["gate_counts"]["cnot"] == 80
    assert results["gate_counts"]["matches"] is True
    assert 1 <= results["gate_counts"]["jc_pulses"] <= 7
    assert results["prep"]["prep_fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert results["metrics"]["postselection"]["holds"] is True
    assert results["metrics"]["nongaussianity"]["delta_nG"] >= 0
    assert "timing" not in report
    assert report["reference"]["dv"]["M_DV"] == 320

    path = os.path.join(cfg.output.dir, "report.json")
    with open(path) as f:
        assert json.load(f)["schema"] == SCHEMA_TAG
    assert os.path.exists(os.path.join(cfg.output.dir, "config.yaml"))

    scan = cmd_dv_baseline(cfg, cv_report=path)
    assert list(scan.table["beta"]) == [0.6, 0.8]
    assert "fidelity_gap" in scan.table
    table = pd.read_csv(os.path.join(cfg.output.dir, "dv_baseline.csv"))
    assert list(table.columns[:8]) == ["beta", "h1", "K", "Q", "M_DV", "m_c", "l1_norm", "infidelity"]


def test_damped_oscillator_is_exact_for_any_kernel(tmp_path):
    cfg = small_config(
        tmp_path,
        benchmark={"name": "damped-osc", "u0": 0},
        simulation={"prep_method": "inject", "n_t": 3},
    )
    results = cmd_benchmark(cfg, reproducible=True)["results"]["benchmark"]
    assert results["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert results["fidelity_truncated"] == pytest.approx(1.0, abs=1e-9)
    assert "heat_error_estimate" not in results
    assert results["gate_counts"]["displace"] == 3


def test_exact_evolution_matches_trotter_limit(tmp_path):
    exact = cmd_benchmark(small_config(tmp_path, simulation={"prep_method": "inject", "evolution": "exact"}), reproducible=True)
    trotter = cmd_benchmark(small_config(tmp_path, simulation={"prep_method": "inject", "n_t": 400}), reproducible=True)
    a, b = exact["results"]["benchmark"], trotter["results"]["benchmark"]
    assert a["fidelity_prep_isolated"] == pytest.approx(1.0, abs=1e-12)
    assert b["p_succ"] == pytest.approx(a["p_succ"], rel=5e-2)


def test_le_preparation_synthesizes_once(tmp_path, monkeypatch):
    calls = []
    synthesize = stateprep.law_eberly_synthesize

    def counting(C, *args, **kwargs):
        calls.append(len(C))
        return synthesize(C, *args, **kwargs)

    monkeypatch.setattr(cli, "law_eberly_synthesize", counting)
    monkeypatch.setattr(stateprep, "law_eberly_synthesize", counting)
    cfg = small_config(tmp_path, simulation={"prep_method": "le"})
    core, info = cli.prepare_oscillator(cfg, compute_coefficients(cfg).normalized)
    assert calls == [8]
    assert 1 <= info["jc_pulses"] <= 7 and core.size == 16


def test_prep_coeffs_and_truncation(tmp_path):
    cfg = small_config(tmp_path, simulation={"prep_method": "le"})
    report = cmd_prep(cfg, reproducible=True)
    assert report["results"]["prep"]["prep_method"] == "le"
    assert os.path.exists(os.path.join(cfg.output.dir, "prep.json"))
    cs = cmd_coeffs(cfg)
    assert cs.normalized.size == 8
    assert os.path.exists(os.path.join(cfg.output.dir, "coeffs.json"))
    curve = cmd_truncation(cfg)
    assert list(curve["n"]) == [4, 8]
    assert curve["error"].iloc[1] < curve["error"].iloc[0]


def test_sweep_records_failures(tmp_path):
    cfg = small_config(
        tmp_path,
        simulation={"evolution": "exact"},
        sweep={"r": [2.0], "r_prime": [0.5, 3.0], "beta": [0.5], "n_trunc": [6, 8]},
    )
    points, marginals = cmd_sweep(cfg, executor="iterative")
    assert len(points) == 4
    failed = points[points["error"] != ""]
    assert len(failed) == 2
    assert failed["infidelity"].isna().all()
    assert set(marginals["parameter"]) == {"r", "r_prime", "beta", "n_trunc"}
    assert len(marginals[marginals["parameter"] == "n_trunc"]) == 2
    assert os.path.exists(os.path.join(cfg.output.dir, "sweep_marginals.csv"))


def test_sweep_marginals_pick_best():
    points = pd.DataFrame(
        {
            "r": [1.0, 1.0, 2.0],
            "r_prime": [0.5, 0.5, 0.5],
            "beta": [0.3, 0.5, 0.3],
            "n_trunc": [8, 8, 8],
            "infidelity": [1e-2, 1e-3, np.nan],
        }
    )
    marginals = sweep_marginals(points)
    beta_rows = marginals[marginals["parameter"] == "beta"].set_index("value")
    assert beta_rows.loc[0.3, "best_infidelity"] == 1e-2
    assert beta_rows.loc[0.5, "best_infidelity"] == 1e-3
    assert list(marginals[marginals["parameter"] == "r"]["value"]) == [1.0]


def test_register_models(tmp_path):
    cfg = small_config(tmp_path)
    space, bra_method = register_model(cfg)
    assert (space.hbar, space.r_frame, bra_method) == (1.0, 0.0, "gate")
    core = np.zeros(16, dtype=complex)
    core[0] = 1
    loaded = load_register(cfg, space, core)
    assert np.linalg.norm(loaded) == pytest.approx(1.0)
    assert abs(loaded[0]) < 1

    frame = small_config(tmp_path, simulation={"circuit": "frame"})
    space, bra_method = register_model(frame)
    assert (space.hbar, space.r_frame, bra_method) == (2.0, 0.5, "closed")
    assert load_register(frame, space, core) is core


@pytest.mark.slow
@pytest.mark.parametrize("name, benchmark, max_infidelity", BENCHMARKS)
def test_benchmark_against_reference(tmp_path, name, benchmark, max_infidelity):
    cfg = load_config(os.path.join(REPO, name), {"output": {"dir": str(tmp_path)}})
    results = cmd_benchmark(cfg, reproducible=True)["results"]["benchmark"]
    ref = REFERENCE[benchmark]
    assert results["infidelity"] <= max_infidelity
    assert results["p_succ"] == pytest.approx(ref["p_succ_le"], abs=0.015)
    assert results["metrics"]["nongaussianity"]["delta_nG"] == pytest.approx(ref["delta_nG_le"], abs=0.05)
    assert results["prep"]["prep_fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert results["gate_counts"]["one_qubit"] == ref["gates"]["one_qubit"]
    assert results["gate_counts"]["jc_pulses"] == ref["gates"]["jc"]


@pytest.mark.slow
@pytest.mark.parametrize("name, benchmark, max_infidelity", BENCHMARKS)
def test_snapd_benchmark(tmp_path, name, benchmark, max_infidelity):
    cfg = load_config(
        os.path.join(REPO, name),
        {"simulation": {"prep_method": "snapd"}, "output": {"dir": str(tmp_path)}},
    )
    assert (cfg.stateprep.layers, cfg.stateprep.budget, cfg.stateprep.n_starts) == (30, 2000, 4)
    results = cmd_benchmark(cfg, reproducible=True, workers=4)["results"]["benchmark"]
    assert 1 - results["prep"]["prep_fidelity"] <= 2e-2
    assert results["infidelity"] <= 1e-2
    assert results["prep"]["layers"] == 30
