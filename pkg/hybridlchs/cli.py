"""
Command-line driver: benchmark, sweep, dv-baseline, gatecount, coeffs, prep and truncation.

Exit codes: 0 success, 2 validation failure, 3 numerical failure, 4 gate-count mismatch.
"""

import argparse
import contextlib
import dataclasses
import importlib.resources
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from .coeffs import CoefficientSet, compute_raw_coefficients, truncation_error_curve
from .config import ExperimentConfig, dump_config, load_config
from .dv_baseline import dv_beta_scan
from .hybrid_sim import fidelity, postselected_operator, solution_state
from .kernel import KernelParams
from .metrics import postselection_analysis, qre_nongaussianity
from .oscillator import TruncatedSpace, position_norm, squeeze_gate
from .pauli_heat import (
    GeneratorSpec,
    damped_oscillator_generator,
    heat_error_estimate,
    kron_sum_generator,
    load_generator,
    theorem_gate_scaling,
)
from .stateprep import SnapCache, law_eberly_synthesize, le_prepared_state, snapd_optimize, snapd_state
from .trotter_compile import compile_circuit, export_jsonl, gate_counts, postselected_trotter_operator, tally
from .utils import LCHSError, LeakageError, NumericalError, ValidationError
from .version import __version__

logger = logging.getLogger(__name__)

SCHEMA_TAG = "hybridlchs.report/1"
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_MISMATCH = 0, 2, 3, 4


@contextlib.contextmanager
def stage(name: str, timing: Optional[Dict] = None):
    """Prefix errors raised inside the block with the stage name and record its wall time."""
    tic = time.time()
    try:
        yield
    except LCHSError as err:
        raise type(err)(f"[{name}] {err}") from err
    if timing is not None:
        timing[name] = time.time() - tic


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, pd.DataFrame):
        return _jsonable(obj.to_dict(orient="records"))
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(np.real(obj)), float(np.imag(obj))]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def load_reference_values() -> dict:
    with importlib.resources.path("hybridlchs.data", "reference_values.json") as path:
        with open(path) as f:
            return json.load(f)


def load_report_schema() -> dict:
    with importlib.resources.path("hybridlchs.data", "report_schema.json") as path:
        with open(path) as f:
            return json.load(f)


_SCHEMA_TYPES = {"string": str, "integer": int, "number": (int, float), "object": dict, "array": list}


def _check_type(value, kind: str, where: str):
    expected = _SCHEMA_TYPES[kind]
    if isinstance(value, bool) or not isinstance(value, expected):
        raise ValidationError(f"report field {where} should be {kind}, got {type(value).__name__}")


def _check_fidelities(obj, keys, where="results"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k in keys and isinstance(v, (int, float)) and not -1e-12 <= v <= 1 + 1e-12:
                raise NumericalError(f"{where}.{k}={v} outside [0, 1]")
            _check_fidelities(v, keys, f"{where}.{k}")


def validate_report(report: dict, schema: Optional[dict] = None) -> dict:
    """Required keys, their types, the schema tag and the range of every fidelity field."""
    schema = schema or load_report_schema()
    for key, kind in schema["required"].items():
        if key not in report:
            raise ValidationError(f"report misses required field {key!r}")
        _check_type(report[key], kind, key)
    for key, kind in schema["optional"].items():
        if key in report:
            _check_type(report[key], kind, key)
    if report["schema"] != schema["schema"]:
        raise ValidationError(f"report schema {report['schema']!r} differs from {schema['schema']!r}")
    for section, fields in schema["results"].items():
        if section in report["results"]:
            for key, kind in fields.items():
                if key not in report["results"][section]:
                    raise ValidationError(f"report misses results.{section}.{key}")
                _check_type(report["results"][section][key], kind, f"results.{section}.{key}")
    _check_fidelities(report["results"], set(schema["fidelity_keys"]))
    return report


def make_report(command: str, cfg: ExperimentConfig, results: dict, timing: Optional[dict] = None, reference=None) -> dict:
    report = {
        "schema": SCHEMA_TAG,
        "command": command,
        "version": __version__,
        "config": cfg.to_dict(),
        "seed": int(cfg.seed),
        "results": results,
    }
    if reference is not None:
        report["reference"] = reference
    if timing is not None:
        report["timing"] = timing
    return validate_report(_jsonable(report))


def write_report(report: dict, cfg: ExperimentConfig, name: Optional[str] = None) -> str:
    os.makedirs(cfg.output.dir, exist_ok=True)
    path = os.path.join(cfg.output.dir, name or cfg.output.report)
    with open(path, "w") as f:
        json.dump(report, f, sort_keys=True, indent=2)
    dump_config(cfg, os.path.join(cfg.output.dir, "config.yaml"))
    logger.info(f"wrote {path}")
    return path


# pipeline pieces


def build_generator(cfg: ExperimentConfig) -> GeneratorSpec:
    b = cfg.benchmark
    if b.bc is not None:
        return kron_sum_generator([(b.bc, int(m), b.h) for m in b.dims], alpha=b.alpha)
    if b.name == "damped-osc":
        return damped_oscillator_generator(b.zeta, b.kappa)
    return load_generator(b.generator_file)


def initial_state(u0, n_qubits: int) -> np.ndarray:
    """Basis index (little-endian) or a list of amplitudes, given as numbers or [re, im] pairs."""
    dim = 2**n_qubits
    if isinstance(u0, (int, np.integer)) and not isinstance(u0, bool):
        if not 0 <= u0 < dim:
            raise ValidationError(f"initial basis index {u0} outside a {n_qubits}-qubit register")
        vec = np.zeros(dim, dtype=complex)
        vec[u0] = 1
        return vec
    vec = np.array([complex(*a) if isinstance(a, (list, tuple)) else complex(a) for a in u0])
    if vec.shape != (dim,):
        raise ValidationError(f"initial state has {vec.size} amplitudes, expected {dim}")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValidationError("initial state is zero")
    return vec / norm


def kernel_params(cfg: ExperimentConfig) -> KernelParams:
    k = cfg.kernel
    return KernelParams(beta=k.beta, r=k.r, r_prime=k.r_prime, n_trunc=int(k.n_trunc))


def compute_coefficients(cfg: ExperimentConfig) -> CoefficientSet:
    return compute_raw_coefficients(kernel_params(cfg), tol=cfg.kernel.tol, domain_radius=cfg.kernel.domain_radius)


def prepare_oscillator(cfg: ExperimentConfig, C: np.ndarray, workers: int = 1):
    """
    Returns the prepared core amplitudes (length n_fock, before any register squeezing) and
    a dict describing the preparation.
    """
    n_fock = cfg.simulation.n_fock
    method = cfg.simulation.prep_method
    target = np.zeros(n_fock, dtype=complex)
    target[: C.size] = C
    info = {"prep_method": method}
    if method == "inject":
        osc = target.copy()
    elif method == "le":
        seq = law_eberly_synthesize(C)
        osc = le_prepared_state(C, n_fock, seq=seq)
        info.update({"jc_pulses": seq.n_jc, "rotations": seq.n_rot})
    else:
        sp = cfg.stateprep
        cache = SnapCache(sp.cache_dir) if sp.cache_dir else None
        key = None
        params = None
        if cache is not None:
            key = SnapCache.key(C, sp.layers, cfg.seed, sp.budget, n_starts=sp.n_starts, alpha_scale=sp.alpha_scale, n_fock=n_fock)
            params = cache.load(key)
        if params is None:
            params = snapd_optimize(
                C,
                sp.layers,
                seed=cfg.seed,
                budget=sp.budget,
                n_fock=n_fock,
                n_starts=sp.n_starts,
                alpha_scale=sp.alpha_scale,
                workers=workers,
            )
            if cache is not None:
                cache.store(key, params)
        osc = snapd_state(params, n_fock)
        info.update({"layers": params.layers, "iterations": params.n_iterations, "converged": params.converged})
    info["prep_fidelity"] = float(min(1.0, abs(np.vdot(target, osc)) ** 2))
    return osc, info


def register_model(cfg: ExperimentConfig):
    """
    Oscillator space and postselection bra method of the configured circuit model.

    "gate" is the emulated register: plain Fock basis with x = (a + a^dagger)/sqrt(2), the
    prepared state S(r')|chi> and the bra <0|S^dagger(r), both squeezers exponentiated on
    the truncated space. "frame" works in the squeezed-Fock basis of width e^{r'}, where the
    prepared state is |chi> itself and the bra is the continuum overlap <phi_r|phi_{n,r'}>.
    """
    n_fock = cfg.simulation.n_fock
    if cfg.simulation.circuit == "gate":
        return TruncatedSpace(n_fock, hbar=1.0), "gate"
    return TruncatedSpace(n_fock, r_frame=cfg.kernel.r_prime), "closed"


def load_register(cfg: ExperimentConfig, space: TruncatedSpace, core: np.ndarray) -> np.ndarray:
    """Oscillator state entering the evolution for the prepared core amplitudes ``core``."""
    if cfg.simulation.circuit == "gate":
        return squeeze_gate(space, cfg.kernel.r_prime) @ core
    return core


def _postselected(cfg, spec, osc, space, exact: bool, bra_method: str):
    s, b, k = cfg.simulation, cfg.benchmark, cfg.kernel
    if exact:
        return postselected_operator(osc, spec.L, spec.H, b.t, space, k.r, bra_method=bra_method)
    return postselected_trotter_operator(spec, osc, space, b.t, s.n_t, k.r, s.order, bra_method=bra_method)


def _normalized_output(K: np.ndarray, u0: np.ndarray, floor: float):
    raw = K @ u0
    raw_norm = float(np.linalg.norm(raw))
    if raw_norm < floor:
        raise LeakageError(f"postselection norm {raw_norm:.3e} below floor {floor:g}")
    return raw / raw_norm, raw_norm**2


def benchmark_core(cfg: ExperimentConfig, workers: int = 1, timing: Optional[Dict] = None) -> Dict:
    """Coefficients, preparation, evolution, postselection and metrics for one configuration."""
    with stage("generator", timing):
        spec = build_generator(cfg)
        u0 = initial_state(cfg.benchmark.u0, spec.n_qubits)
    with stage("coeffs", timing):
        cs = compute_coefficients(cfg)
    with stage("stateprep", timing):
        core, prep = prepare_oscillator(cfg, cs.normalized, workers)
    space, bra_method = register_model(cfg)
    osc = load_register(cfg, space, core)
    exact = cfg.simulation.evolution == "exact"
    with stage("evolution", timing):
        K = _postselected(cfg, spec, osc, space, exact, bra_method)
        u_out, p_succ = _normalized_output(K, u0, cfg.simulation.postselection_floor)
    with stage("metrics", timing):
        t = cfg.benchmark.t
        u_exact = solution_state(spec.matrix(), t, u0)
        ideal = np.zeros(space.n_fock, dtype=complex)
        ideal[: cs.normalized.size] = cs.normalized
        ideal = load_register(cfg, space, ideal)
        K_ideal = postselected_operator(ideal, spec.L, spec.H, t, space, cfg.kernel.r, bra_method=bra_method)
        K_prep = K if exact else postselected_operator(osc, spec.L, spec.H, t, space, cfg.kernel.r, bra_method=bra_method)
        u_trunc, _ = _normalized_output(K_ideal, u0, 0.0)
        u_prep, _ = _normalized_output(K_prep, u0, 0.0)
        variants = {"prepared": K, "ideal": K_ideal}
        if not exact:
            variants["prepared_exact"] = K_prep
        results = {
            "fidelity": fidelity(u_out, u_exact),
            "fidelity_truncated": fidelity(u_out, u_trunc),
            "fidelity_prep_isolated": fidelity(u_out, u_prep),
            "infidelity": 1 - fidelity(u_out, u_exact),
            "p_succ": p_succ,
            "output_state": u_out,
            "metrics": {
                "nongaussianity": qre_nongaussianity(osc).to_dict(),
                "nongaussianity_core": qre_nongaussianity(core).to_dict(),
                "postselection": postselection_analysis(variants, u0).to_dict(),
            },
            "gate_counts": gate_summary(cfg, spec, prep),
            "prep": prep,
        }
        if spec.grid and "axes" in spec.grid:
            results["heat_error_estimate"] = heat_error_estimate(spec, t, cfg.simulation.n_t, position_norm(space))
    return results


def gate_summary(cfg: ExperimentConfig, spec: GeneratorSpec, prep: Dict) -> Dict:
    n_t = cfg.simulation.n_t
    b = cfg.benchmark
    if b.bc is not None:
        report = gate_counts(b.bc, b.dims, n_t, b.t)
        out = {
            "hybrid": report.hybrid,
            "displace": report.displace,
            "cond_displace": report.cond_displace,
            "cnot": report.cnot,
            "one_qubit": report.one_qubit,
            "closed_form": report.closed_form,
            "matches": report.matches,
        }
    else:
        out = tally(compile_circuit(spec, b.t, n_t))
    out["theorem_scaling"] = theorem_gate_scaling(spec, n_t, cfg.simulation.order)
    for key in ("jc_pulses", "rotations", "layers"):
        if key in prep:
            out[key] = prep[key]
    return out


# commands


def cmd_benchmark(cfg: ExperimentConfig, reproducible: bool = False, workers: int = 1) -> dict:
    timing = {} if not reproducible else None
    tic = time.time()
    results = benchmark_core(cfg, workers, timing)
    if timing is not None:
        timing["total"] = time.time() - tic
    reference = load_reference_values()["benchmarks"].get(cfg.benchmark.name)
    report = make_report("benchmark", cfg, {"benchmark": results}, timing, reference)
    if cfg.output.gates_jsonl:
        os.makedirs(cfg.output.dir, exist_ok=True)
        ops = compile_circuit(build_generator(cfg), cfg.benchmark.t, cfg.simulation.n_t)
        export_jsonl(ops, os.path.join(cfg.output.dir, cfg.output.gates_jsonl))
    write_report(report, cfg)
    if cfg.output.csv:
        row = {
            "benchmark": cfg.benchmark.name,
            "beta": cfg.kernel.beta,
            "r": cfg.kernel.r,
            "r_prime": cfg.kernel.r_prime,
            "n_trunc": cfg.kernel.n_trunc,
            "prep_method": cfg.simulation.prep_method,
            "infidelity": results["infidelity"],
            "p_succ": results["p_succ"],
            "delta_nG": results["metrics"]["nongaussianity"]["delta_nG"],
        }
        pd.DataFrame([row]).to_csv(os.path.join(cfg.output.dir, cfg.output.csv), index=False)
    print(f"{cfg.benchmark.name}: 1-F = {results['infidelity']:.3e}, p_succ = {100 * results['p_succ']:.2f}%")
    return report


SWEEP_PARAMS = ("r", "r_prime", "beta", "n_trunc")


def sweep_point(cfg: ExperimentConfig, point) -> Dict:
    row = dict(zip(SWEEP_PARAMS, point))
    try:
        kernel = dataclasses.replace(cfg.kernel, **{**row, "n_trunc": int(row["n_trunc"])})
        sim = dataclasses.replace(cfg.simulation, prep_method="inject", n_fock=max(cfg.simulation.n_fock, int(row["n_trunc"])))
        out = benchmark_core(cfg.replace(kernel=kernel, simulation=sim))
        row.update({"infidelity": out["infidelity"], "p_succ": out["p_succ"], "error": ""})
    except (LCHSError, ValueError) as err:
        logger.warning(f"sweep point {row} failed: {err}")
        row.update({"infidelity": np.nan, "p_succ": np.nan, "error": str(err)})
    return row


def sweep_marginals(points: pd.DataFrame) -> pd.DataFrame:
    """Best infidelity with each parameter held at each of its values."""
    rows = []
    ok = points.dropna(subset=["infidelity"])
    for name in SWEEP_PARAMS:
        for value, group in ok.groupby(name):
            best = group.loc[group["infidelity"].idxmin()]
            best_point = {f"best_{p}": best[p] for p in SWEEP_PARAMS}
            rows.append({"parameter": name, "value": value, "best_infidelity": best["infidelity"], **best_point})
    return pd.DataFrame(rows)


def cmd_sweep(cfg: ExperimentConfig, workers: int = 1, executor: str = "futures"):
    sw = cfg.sweep
    grid = list(itertools.product(sw.r, sw.r_prime, sw.beta, sw.n_trunc))
    logger.info(f"sweep over {len(grid)} points with the {executor} executor")
    tic = time.time()
    if executor == "futures" and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(tqdm(pool.map(sweep_point, [cfg] * len(grid), grid), total=len(grid), desc="sweep"))
    else:
        rows = [sweep_point(cfg, point) for point in tqdm(grid, desc="sweep")]
    points = pd.DataFrame(rows)
    marginals = sweep_marginals(points)
    os.makedirs(cfg.output.dir, exist_ok=True)
    csv = cfg.output.csv or "sweep.csv"
    points.to_csv(os.path.join(cfg.output.dir, csv), index=False)
    marginals.to_csv(os.path.join(cfg.output.dir, csv.replace(".csv", "_marginals.csv")), index=False)
    dump_config(cfg, os.path.join(cfg.output.dir, "config.yaml"))
    failed = int((points["error"] != "").sum())
    print(f"Finished {len(grid)} points ({failed} failed) in {time.time() - tic:.1f}s")
    return points, marginals


DV_COLUMNS = ["beta", "h1", "K", "Q", "M_DV", "m_c", "l1_norm", "infidelity"]


def cmd_dv_baseline(cfg: ExperimentConfig, cv_report: Optional[str] = None):
    with stage("generator"):
        spec = build_generator(cfg)
        u0 = initial_state(cfg.benchmark.u0, spec.n_qubits)
    T = cfg.dv.T if cfg.dv.T is not None else cfg.benchmark.t
    with stage("dv"):
        scan = dv_beta_scan(spec, cfg.dv.eps, cfg.dv.eta, T, u0, cfg.dv.beta_grid)
    table = scan.table
    table["M_DV_per_coeff"] = table["M_DV"] / cfg.kernel.n_trunc
    if cv_report is not None:
        with open(cv_report) as f:
            f_cv = json.load(f)["results"]["benchmark"]["fidelity"]
        table["fidelity_gap"] = f_cv - table["fidelity"]
    table = table[DV_COLUMNS + [c for c in table.columns if c not in DV_COLUMNS]]
    os.makedirs(cfg.output.dir, exist_ok=True)
    table.to_csv(os.path.join(cfg.output.dir, cfg.output.csv or "dv_baseline.csv"), index=False)
    print(table[DV_COLUMNS].to_string(index=False))
    print(f"beta_opt = {scan.best_beta:.2f}")
    return scan


def cmd_gatecount(bc: str, dims, n_t: int, t: float = 1.0):
    report = gate_counts(bc, dims, n_t, t)
    df = report.to_frame()
    print(df.to_string(index=False))
    print(f"total: hybrid {report.hybrid}, CNOT {report.cnot}, 1Q {report.one_qubit} (closed form {report.closed_form})")
    return report, EXIT_OK if report.matches else EXIT_MISMATCH


def cmd_coeffs(cfg: ExperimentConfig) -> CoefficientSet:
    with stage("coeffs"):
        cs = compute_coefficients(cfg)
    os.makedirs(cfg.output.dir, exist_ok=True)
    path = os.path.join(cfg.output.dir, "coeffs.json")
    cs.to_json(path)
    print(f"wrote {cs.normalized.size} coefficients (gamma={cs.gamma:.4e}, radius={cs.domain_radius:.4g}) to {path}")
    return cs


def cmd_prep(cfg: ExperimentConfig, reproducible: bool = False, workers: int = 1) -> dict:
    timing = {} if not reproducible else None
    with stage("coeffs", timing):
        cs = compute_coefficients(cfg)
    with stage("stateprep", timing):
        core, info = prepare_oscillator(cfg, cs.normalized, workers)
    space, _ = register_model(cfg)
    info["nongaussianity"] = qre_nongaussianity(load_register(cfg, space, core)).to_dict()
    info["nongaussianity_core"] = qre_nongaussianity(core).to_dict()
    report = make_report("prep", cfg, {"prep": info}, timing)
    write_report(report, cfg, "prep.json")
    print(f"{info['prep_method']}: preparation fidelity {info['prep_fidelity']:.8f}")
    return report


def cmd_truncation(cfg: ExperimentConfig) -> pd.DataFrame:
    with stage("truncation"):
        df = truncation_error_curve(kernel_params(cfg), cfg.kernel.truncation_n, cfg.kernel.tol)
    os.makedirs(cfg.output.dir, exist_ok=True)
    df.to_csv(os.path.join(cfg.output.dir, cfg.output.csv or "truncation.csv"), index=False)
    print(df.to_string(index=False))
    if "slope" in df.attrs:
        print(f"log-log slope {df.attrs['slope']:.3f}")
    return df


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", dest="config", default=None, help="path to the YAML config", type=str)
    common.add_argument("--out", dest="out", default=None, help="output directory", type=str)
    common.add_argument("--seed", dest="seed", default=None, help="master seed", type=int)
    common.add_argument(
        "--workers", dest="workers", default=1, type=int, help="worker processes for the SNAP+D multi-start and for sweep points"
    )
    common.add_argument("--reproducible", dest="reproducible", action="store_true", help="omit timing from reports")
    common.add_argument(
        "--executor",
        type=str,
        default="futures",
        choices=["futures", "iterative"],
        help="type of executor for sweeps",
    )
    common.add_argument("-v", "--verbose", dest="verbose", action="count", default=0, help="-v info, -vv debug")

    parser = argparse.ArgumentParser(prog="hybridlchs", description="hybrid CV-DV LCHS simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("benchmark", parents=[common], help="end-to-end benchmark run")
    sub.add_parser("sweep", parents=[common], help="kernel-parameter sweep with ideal injection")
    dv = sub.add_parser("dv-baseline", parents=[common], help="classical DV quadrature baseline")
    dv.add_argument("--cv-report", dest="cv_report", default=None, help="benchmark report for the fidelity gap", type=str)
    gc = sub.add_parser("gatecount", parents=[common], help="compiled vs closed-form gate counts")
    gc.add_argument("--bc", dest="bc", default=None, help="dirichlet, neumann or periodic", type=str)
    gc.add_argument("--dims", dest="dims", default=None, help="qubits per axis separated by commas", type=str)
    gc.add_argument("--n-t", dest="n_t", default=None, help="Trotter steps", type=int)
    sub.add_parser("coeffs", parents=[common], help="dump the coefficient set")
    sub.add_parser("prep", parents=[common], help="run state preparation only")
    sub.add_parser("truncation", parents=[common], help="truncation-error curve")
    return parser


def configure_logging(verbose: int):
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")


def main(args) -> int:
    configure_logging(args.verbose)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output"] = {"dir": args.out}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "benchmark":
            cmd_benchmark(cfg, args.reproducible, args.workers)
        elif args.command == "sweep":
            cmd_sweep(cfg, args.workers, args.executor)
        elif args.command == "dv-baseline":
            cmd_dv_baseline(cfg, args.cv_report)
        elif args.command == "gatecount":
            bc = args.bc or cfg.benchmark.bc
            if bc is None:
                raise ValidationError("gatecount needs --bc or a heat benchmark in the config")
            dims = [int(m) for m in args.dims.split(",")] if args.dims else list(cfg.benchmark.dims)
            _, code = cmd_gatecount(bc, dims, args.n_t or cfg.simulation.n_t, cfg.benchmark.t)
            return code
        elif args.command == "coeffs":
            cmd_coeffs(cfg)
        elif args.command == "prep":
            cmd_prep(cfg, args.reproducible, args.workers)
        elif args.command == "truncation":
            cmd_truncation(cfg)
    except ValidationError as err:
        logger.error(str(err))
        return EXIT_VALIDATION
    except LCHSError as err:
        logger.error(str(err))
        return EXIT_NUMERICAL
    return EXIT_OK


def run(argv=None) -> int:
    return main(build_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(run())
