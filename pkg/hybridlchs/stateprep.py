"""
Oscillator state preparation for a truncated coefficient vector C.

Law-Eberly: the target |g> (x) sum C_n |n> is walked back to |g, 0> by alternating JC pulses
(zeroing <g, n|) and ancilla rotations (zeroing <e, n-1|); the preparation sequence is the
adjoint sequence in reverse order.

SNAP + displacement: layers D(alpha_l) SNAP(theta_l) tuned with L-BFGS-B from several seeded
starts, using analytic gradients.
"""

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm_frechet
from scipy.optimize import minimize
from tqdm import tqdm

from .hybrid_sim import HybridState
from .oscillator import TruncatedSpace, annihilation, apply_snap_displacement, jc_pulse_matrix, qubit_rotation_matrix
from .trotter_compile import CircuitOp, simulate_gate_list
from .utils import ValidationError, check_normalized, complex_to_pairs, pairs_to_complex

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-14


@dataclass
class LESequence:
    """Preparation pulses in application order; each is a dict with kind "jc" or "rot"."""

    pulses: List[Dict]
    n_levels: int

    @property
    def n_jc(self) -> int:
        return sum(1 for p in self.pulses if p["kind"] == "jc")

    @property
    def n_rot(self) -> int:
        return sum(1 for p in self.pulses if p["kind"] == "rot")

    def to_ops(self, qubit: int = 0) -> List[CircuitOp]:
        ops = []
        for p in self.pulses:
            if p["kind"] == "jc":
                ops.append(CircuitOp("jc", (qubit,), {"n": p["n"], "alpha": p["alpha"], "phi": p["phi"]}, mode=0))
            else:
                ops.append(CircuitOp("rot1q", (qubit,), {"theta": p["theta"], "phi": p["phi"]}))
        return ops

    def to_dict(self):
        return {"n_levels": self.n_levels, "n_jc": self.n_jc, "n_rot": self.n_rot, "pulses": self.pulses}


def law_eberly_synthesize(C: Sequence[complex], tol: float = ZERO_TOL) -> LESequence:
    C = check_normalized(C, "target coefficients")
    n_trunc = C.size
    n_levels = n_trunc + 1
    psi = np.zeros((2, n_levels), dtype=complex)  # rows |g>, |e>
    psi[0, :n_trunc] = C
    undo = []
    for n in range(n_trunc - 1, 0, -1):
        a, b = psi[1, n - 1], psi[0, n]
        if abs(b) > tol:
            alpha = float(np.arctan2(abs(b), abs(a)))
            phi = float(np.angle(b) - np.angle(a) - np.pi / 2) if abs(a) > tol else 0.0
            psi = (jc_pulse_matrix(n_levels, n, alpha, phi) @ psi.reshape(-1)).reshape(2, n_levels)
            undo.append({"kind": "jc", "n": n, "alpha": alpha, "phi": phi})
        u, v = psi[1, n - 1], psi[0, n - 1]
        if abs(u) > tol:
            theta = float(2 * np.arctan2(abs(u), abs(v)))
            phi = float(-np.angle(u) + np.angle(v) + np.pi / 2) if abs(v) > tol else 0.0
            psi = qubit_rotation_matrix(theta, phi) @ psi
            undo.append({"kind": "rot", "n": n - 1, "theta": theta, "phi": phi})
        logger.debug(f"level {n}: |<g,{n}|| = {abs(psi[0, n]):.2e}, |<e,{n - 1}|| = {abs(psi[1, n - 1]):.2e}")

    pulses = []
    for p in reversed(undo):
        if p["kind"] == "jc":
            pulses.append({**p, "alpha": -p["alpha"]})
        else:
            pulses.append({**p, "theta": -p["theta"]})
    return LESequence(pulses=pulses, n_levels=n_levels)


def simulate_le(seq: LESequence, n_levels: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """
    Run the pulses on |g>|0>. Returns the oscillator amplitudes of the |g> branch and the
    residual ancilla excitation probability.
    """
    n_levels = n_levels or seq.n_levels
    space = TruncatedSpace(n_levels)
    state = HybridState.product(space.basis(0), np.array([1, 0], dtype=complex))
    out = simulate_gate_list(seq.to_ops(), state, space).amplitudes.reshape(n_levels, 2)
    return out[:, 0], float(np.sum(np.abs(out[:, 1]) ** 2))


def le_prepared_state(C: Sequence[complex], n_fock: int, seq: Optional[LESequence] = None) -> np.ndarray:
    """Law-Eberly state for ``C`` padded to ``n_fock`` levels; ``seq`` reuses a synthesized sequence."""
    C = np.asarray(C, dtype=complex)
    if n_fock < C.size:
        raise ValidationError(f"n_fock={n_fock} cannot hold {C.size} coefficients")
    osc, excitation = simulate_le(seq if seq is not None else law_eberly_synthesize(C))
    logger.info(f"Law-Eberly: {len(C) - 1} levels, ancilla residue {excitation:.2e}")
    out = np.zeros(n_fock, dtype=complex)
    out[: min(n_fock, osc.size)] = osc[:n_fock]
    return out


# SNAP + displacement


@dataclass
class SnapDParams:
    layers: int
    alphas: np.ndarray
    thetas: np.ndarray
    achieved_fidelity: float
    converged: bool = False
    n_iterations: int = 0
    history: List[float] = field(default_factory=list)
    seed: Optional[int] = None
    budget: Optional[int] = None

    def __post_init__(self):
        if self.layers < 1:
            raise ValidationError(f"need at least one layer, got {self.layers}")
        if not -1e-12 <= self.achieved_fidelity <= 1 + 1e-12:
            raise ValidationError(f"fidelity {self.achieved_fidelity} outside [0, 1]")

    def to_dict(self):
        return {
            "layers": self.layers,
            "alphas": complex_to_pairs(self.alphas),
            "thetas": np.asarray(self.thetas).tolist(),
            "achieved_fidelity": self.achieved_fidelity,
            "converged": self.converged,
            "n_iterations": self.n_iterations,
            "history": list(self.history),
            "seed": self.seed,
            "budget": self.budget,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            layers=d["layers"],
            alphas=pairs_to_complex(d["alphas"]),
            thetas=np.asarray(d["thetas"], dtype=float),
            achieved_fidelity=d["achieved_fidelity"],
            converged=d["converged"],
            n_iterations=d["n_iterations"],
            history=d["history"],
            seed=d["seed"],
            budget=d["budget"],
        )


class _SnapObjective:
    """1 - |<target| prod_l D(alpha_l) SNAP(theta_l) |0>|^2 with its gradient."""

    def __init__(self, target: np.ndarray, layers: int, n_snap: int):
        self.target = target
        self.layers = layers
        self.n_snap = n_snap
        n = target.size
        a = annihilation(n)
        self.a = a
        self.e_re = a.conj().T - a
        self.e_im = 1j * (a.conj().T + a)
        self.vacuum = np.zeros(n, dtype=complex)
        self.vacuum[0] = 1

    def unpack(self, x):
        L = self.layers
        alphas = x[:L] + 1j * x[L : 2 * L]
        thetas = x[2 * L :].reshape(L, self.n_snap)
        return alphas, thetas

    def _phases(self, theta):
        out = np.ones(self.target.size, dtype=complex)
        out[: self.n_snap] = np.exp(1j * theta)
        return out

    def _generator(self, alpha):
        return alpha * self.a.conj().T - np.conj(alpha) * self.a

    def __call__(self, x):
        alphas, thetas = self.unpack(x)
        L = self.layers
        forward = []  # (phi_l = SNAP psi_{l-1}, D_l, dD_re, dD_im)
        psi = self.vacuum
        for alpha, theta in zip(alphas, thetas):
            G = self._generator(alpha)
            D, d_re = expm_frechet(G, self.e_re)
            d_im = expm_frechet(G, self.e_im, compute_expm=False)
            phi = self._phases(theta) * psi
            forward.append((phi, D, d_re, d_im))
            psi = D @ phi
        f = np.vdot(self.target, psi)

        grad = np.zeros_like(x)
        chi = self.target
        for ell in range(L - 1, -1, -1):
            phi, D, d_re, d_im = forward[ell]
            df_re = np.vdot(chi, d_re @ phi)
            df_im = np.vdot(chi, d_im @ phi)
            xi = D.conj().T @ chi
            df_theta = 1j * np.conj(xi[: self.n_snap]) * phi[: self.n_snap]
            grad[ell] = -2 * np.real(np.conj(f) * df_re)
            grad[L + ell] = -2 * np.real(np.conj(f) * df_im)
            start = 2 * L + ell * self.n_snap
            grad[start : start + self.n_snap] = -2 * np.real(np.conj(f) * df_theta)
            chi = np.conj(self._phases(thetas[ell])) * xi
        return 1.0 - abs(f) ** 2, grad


def _initial_point(rng: np.random.Generator, layers: int, n_snap: int, alpha_scale: float) -> np.ndarray:
    alphas = rng.normal(scale=alpha_scale, size=2 * layers)
    thetas = rng.uniform(0, 2 * np.pi, size=layers * n_snap)
    return np.concatenate([alphas, thetas])


def _optimize_single(target, layers, n_snap, seed_seq, budget, alpha_scale):
    objective = _SnapObjective(target, layers, n_snap)
    x0 = _initial_point(np.random.default_rng(seed_seq), layers, n_snap, alpha_scale)
    last = {}

    def fun(x):
        value, grad = objective(x)
        last["x"], last["value"] = x.copy(), value
        return value, grad

    history = []

    def callback(xk):
        value = last["value"] if "x" in last and np.array_equal(last["x"], xk) else objective(xk)[0]
        history.append(1.0 - value)

    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={"maxiter": budget, "ftol": 1e-15, "gtol": 1e-12, "maxcor": 30},
    )
    fid = float(np.clip(1.0 - res.fun, 0.0, 1.0))
    return res.x, fid, bool(res.success), int(res.nit), history


def snapd_optimize(
    target: Sequence[complex],
    layers: int,
    seed: int,
    budget: int,
    n_fock: Optional[int] = None,
    n_starts: int = 4,
    alpha_scale: float = 0.3,
    workers: int = 1,
) -> SnapDParams:
    """
    Maximize |<target| prod_l D(alpha_l) SNAP(theta_l) |0>|^2. Each of ``n_starts`` starts
    draws its initial point from a child of ``seed``; the best start is returned. An exhausted
    ``budget`` (iterations per start) is reported through ``converged``, not raised.
    """
    target = check_normalized(target, "SNAP+D target")
    if layers < 1 or budget < 1 or n_starts < 1:
        raise ValidationError(f"need layers, budget and n_starts >= 1, got {layers}, {budget}, {n_starts}")
    n_snap = target.size
    n_fock = n_fock or n_snap
    if n_fock < n_snap:
        raise ValidationError(f"n_fock={n_fock} smaller than the target length {n_snap}")
    padded = np.zeros(n_fock, dtype=complex)
    padded[:n_snap] = target
    children = np.random.SeedSequence(seed).spawn(n_starts)
    args = [(padded, layers, n_snap, child, budget, alpha_scale) for child in children]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(tqdm(pool.map(_optimize_single, *zip(*args)), total=n_starts, desc="SNAP+D starts"))
    else:
        results = [_optimize_single(*a) for a in tqdm(args, desc="SNAP+D starts")]

    best = max(range(n_starts), key=lambda i: results[i][1])
    x, fid, success, nit, history = results[best]
    logger.info(f"SNAP+D: best start {best} reached fidelity {fid:.6f} in {nit} iterations")
    objective = _SnapObjective(padded, layers, n_snap)
    alphas, thetas = objective.unpack(x)
    return SnapDParams(
        layers=layers,
        alphas=alphas,
        thetas=thetas,
        achieved_fidelity=fid,
        converged=success,
        n_iterations=nit,
        history=history,
        seed=seed,
        budget=budget,
    )


def snapd_state(params: SnapDParams, n_fock: int) -> np.ndarray:
    return apply_snap_displacement(zip(params.alphas, params.thetas), TruncatedSpace(n_fock))


class SnapCache:
    """On-disk store of SNAP+D results keyed by target, layers, seed and budget."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    @staticmethod
    def key(target, layers, seed, budget, **extra) -> str:
        h = hashlib.sha1()
        h.update(np.round(np.asarray(target, dtype=complex), 12).tobytes())
        h.update(json.dumps({"layers": layers, "seed": seed, "budget": budget, **extra}, sort_keys=True).encode())
        return h.hexdigest()

    def _path(self, key):
        return os.path.join(self.directory, f"snapd_{key}.json")

    def load(self, key) -> Optional[SnapDParams]:
        path = self._path(key)
        if not os.path.exists(path):
            return None
        with open(path) as f:
            return SnapDParams.from_dict(json.load(f))

    def store(self, key, params: SnapDParams):
        with open(self._path(key), "w") as f:
            json.dump(params.to_dict(), f, indent=2, sort_keys=True)
