"""
Gate-level product formulas for the hybrid step.

Each L-summand c P becomes B^dagger C^dagger e^{-i theta c x (x) Z_t} C B: basis changes B
(H for X; S^dagger then H for Y), a CNOT ladder C collecting the parity on the lowest
support qubit t, and one conditional displacement. H-summands become qubit Pauli rotations
with an R_z in place of the conditional displacement.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .hybrid_sim import HybridState, hybrid_propagator
from .oscillator import (
    TruncatedSpace,
    build_operator,
    jc_pulse_matrix,
    position_exponential,
    position_norm,
    postselection_bra,
    qubit_rotation_matrix,
)
from .pauli_heat import GeneratorSpec, PauliSum, PauliTerm, heat_error_estimate, kron_sum_generator, trotter_step_estimate
from .utils import ValidationError, loglog_slope

logger = logging.getLogger(__name__)

GATE_KINDS = ("displace", "cond_displace", "squeeze", "snap", "jc", "rot1q", "hadamard", "sgate", "rz", "cnot")
OSCILLATOR_KINDS = ("displace", "squeeze", "snap")
ONE_QUBIT_KINDS = ("rot1q", "hadamard", "sgate", "rz")

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S_GATE = np.diag([1, 1j])


@dataclass(frozen=True)
class CircuitOp:
    kind: str
    targets: Tuple[int, ...] = ()
    params: Dict = field(default_factory=dict, compare=False)
    mode: Optional[int] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        if self.kind == "cond_displace" and (len(self.targets) != 1 or self.mode is None):
            raise ValidationError("cond_displace needs one control qubit and an oscillator mode")
        if self.kind == "cnot" and (len(self.targets) != 2 or self.targets[0] == self.targets[1]):
            raise ValidationError(f"cnot needs distinct control and target, got {self.targets}")

    def to_dict(self):
        params = {}
        for key, value in self.params.items():
            if isinstance(value, complex):
                value = [value.real, value.imag]
            elif isinstance(value, np.ndarray):
                value = value.tolist()
            params[key] = value
        return {"kind": self.kind, "targets": list(self.targets), "mode": self.mode, "params": params}


def _basis_change(term: PauliTerm) -> Tuple[List[CircuitOp], List[CircuitOp]]:
    pre, post = [], []
    for q in term.support:
        site = term.site(q)
        if site == "X":
            pre.append(CircuitOp("hadamard", (q,)))
            post.append(CircuitOp("hadamard", (q,)))
        elif site == "Y":
            pre += [CircuitOp("sgate", (q,), {"dagger": True}), CircuitOp("hadamard", (q,))]
            post += [CircuitOp("hadamard", (q,)), CircuitOp("sgate", (q,), {"dagger": False})]
    return pre, post


def _ladder(term: PauliTerm) -> List[CircuitOp]:
    support = term.support
    return [CircuitOp("cnot", (support[k], support[k - 1])) for k in range(len(support) - 1, 0, -1)]


def _conjugated(term: PauliTerm, core: CircuitOp) -> List[CircuitOp]:
    pre, post = _basis_change(term)
    ladder = _ladder(term)
    return pre + ladder + [core] + ladder[::-1] + post


def compile_hybrid_factor(theta: float, term: PauliTerm, mode: int = 0) -> List[CircuitOp]:
    """Gates for e^{-i theta c x (x) P}, c the term coefficient."""
    if not term.string:
        raise ValidationError("empty Pauli string")
    lam = theta * term.coefficient
    if term.weight == 0:
        return [CircuitOp("displace", (), {"lam": lam, "alpha": complex(0, -lam)}, mode=mode)]
    core = CircuitOp("cond_displace", (term.support[0],), {"lam": lam, "beta": complex(0, -lam)}, mode=mode)
    return _conjugated(term, core)


def compile_pauli_rotation(theta: float, term: PauliTerm) -> List[CircuitOp]:
    """Gates for e^{-i theta c P} on the register; identity strings compile to nothing."""
    if term.weight == 0:
        return []
    core = CircuitOp("rz", (term.support[0],), {"phi": 2 * theta * term.coefficient})
    return _conjugated(term, core)


# simulation


def _qubit_axis(n_qubits: int, q: int) -> int:
    if not 0 <= q < n_qubits:
        raise ValidationError(f"qubit {q} out of range for {n_qubits} qubits")
    return 1 + (n_qubits - 1 - q)


def _apply_1q(psi: np.ndarray, axis: int, U: np.ndarray) -> np.ndarray:
    return np.moveaxis(np.tensordot(U, psi, axes=([1], [axis])), 0, axis)


def _slice(ndim: int, axis: int, value: int):
    idx = [slice(None)] * ndim
    idx[axis] = value
    return tuple(idx)


def _apply_osc(psi: np.ndarray, M: np.ndarray) -> np.ndarray:
    return np.tensordot(M, psi, axes=([1], [0]))


def _op_function(op: CircuitOp, space: TruncatedSpace, n_qubits: int) -> Callable[[np.ndarray], np.ndarray]:
    kind = op.kind
    if kind in ("hadamard", "sgate", "rz", "rot1q"):
        if kind == "hadamard":
            U = HADAMARD
        elif kind == "sgate":
            U = S_GATE.conj() if op.params.get("dagger") else S_GATE
        elif kind == "rz":
            phi = op.params["phi"]
            U = np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])
        else:
            U = qubit_rotation_matrix(op.params["theta"], op.params["phi"])
        axis = _qubit_axis(n_qubits, op.targets[0])
        return lambda psi: _apply_1q(psi, axis, U)
    if kind == "cnot":
        c_axis = _qubit_axis(n_qubits, op.targets[0])
        t_axis = _qubit_axis(n_qubits, op.targets[1])

        def apply_cnot(psi):
            out = psi.copy()
            ones = _slice(psi.ndim, c_axis, 1)
            out[ones] = np.flip(psi[ones], axis=t_axis if t_axis < c_axis else t_axis - 1)
            return out

        return apply_cnot
    if kind == "cond_displace":
        lam = op.params["lam"]
        plus, minus = position_exponential(space, lam), position_exponential(space, -lam)
        axis = _qubit_axis(n_qubits, op.targets[0])

        def apply_cd(psi):
            out = np.empty_like(psi)
            out[_slice(psi.ndim, axis, 0)] = _apply_osc(psi[_slice(psi.ndim, axis, 0)], plus)
            out[_slice(psi.ndim, axis, 1)] = _apply_osc(psi[_slice(psi.ndim, axis, 1)], minus)
            return out

        return apply_cd
    if kind == "displace":
        if "lam" in op.params:
            M = position_exponential(space, op.params["lam"])
        else:
            M = build_operator(space, "displace", op.params["alpha"]).matrix
        return lambda psi: _apply_osc(psi, M)
    if kind == "squeeze":
        M = build_operator(space, "squeeze", op.params["r"]).matrix
        return lambda psi: _apply_osc(psi, M)
    if kind == "snap":
        M = build_operator(space, "snap", op.params["theta"]).matrix
        return lambda psi: _apply_osc(psi, M)
    # jc: qubit target coupled to the oscillator, parameters (n, alpha, phi)
    M = jc_pulse_matrix(space.n_fock, op.params["n"], op.params["alpha"], op.params["phi"])
    M = M.reshape(2, space.n_fock, 2, space.n_fock)
    axis = _qubit_axis(n_qubits, op.targets[0])

    def apply_jc(psi):
        moved = np.moveaxis(psi, axis, 1)
        out = np.tensordot(M, moved, axes=([2, 3], [1, 0]))  # (q, m, rest...)
        out = np.moveaxis(out, 0, 1)  # (m, q, rest...)
        return np.moveaxis(out, 1, axis)

    return apply_jc


def compile_program(ops: Sequence[CircuitOp], space: TruncatedSpace, n_qubits: int):
    return [_op_function(op, space, n_qubits) for op in ops]


def _run(program, psi: np.ndarray, repeats: int = 1) -> np.ndarray:
    for _ in range(repeats):
        for fn in program:
            psi = fn(psi)
    return psi


def simulate_gate_list(ops: Sequence[CircuitOp], state: HybridState, space: TruncatedSpace) -> HybridState:
    """Apply ``ops`` in order; the oscillator dimension of ``state`` must match ``space``."""
    if state.n_fock != space.n_fock:
        raise ValidationError(f"state has {state.n_fock} levels, space has {space.n_fock}")
    single = state.amplitudes.ndim == 1
    psi = _run(compile_program(ops, space, state.n_qubits), state.tensor())
    amps = psi.reshape(state.dim, -1)
    return HybridState(state.n_fock, state.n_qubits, amps[:, 0] if single else amps, state.norm)


def trotter_layer(spec: GeneratorSpec, dt: float, order: int = 1) -> Tuple[List[CircuitOp], float]:
    """
    One product-formula step: all L factors, then all H rotations. Returns the gates and the
    global phase from identity strings in H. ``order=2`` gives the symmetric step.
    """
    phase = -dt * sum(t.coefficient for t in spec.H if t.weight == 0)
    if order == 1:
        ops = []
        for term in spec.L:
            ops += compile_hybrid_factor(dt, term)
        for term in spec.H:
            ops += compile_pauli_rotation(dt, term)
        return ops, phase
    if order != 2:
        raise ValidationError(f"product-formula order must be 1 or 2, got {order}")
    factors = [(True, t) for t in spec.L] + [(False, t) for t in spec.H]
    half = [compile_hybrid_factor(dt / 2, t) if is_l else compile_pauli_rotation(dt / 2, t) for is_l, t in factors]
    ops = [op for block in half + half[::-1] for op in block]
    return ops, phase


def trotterized_evolution(
    spec: GeneratorSpec, t: float, n_t: int, state: HybridState, space: TruncatedSpace, order: int = 1
) -> HybridState:
    if n_t < 1:
        raise ValidationError(f"n_t must be >= 1, got {n_t}")
    layer, phase = trotter_layer(spec, t / n_t, order)
    program = compile_program(layer, space, state.n_qubits)
    single = state.amplitudes.ndim == 1
    psi = _run(program, state.tensor(), repeats=n_t) * np.exp(1j * phase * n_t)
    amps = psi.reshape(state.dim, -1)
    return HybridState(state.n_fock, state.n_qubits, amps[:, 0] if single else amps, state.norm)


def trotter_operator(spec: GeneratorSpec, t: float, n_t: int, space: TruncatedSpace, order: int = 1) -> np.ndarray:
    dim = space.n_fock * 2**spec.n_qubits
    identity = HybridState(space.n_fock, spec.n_qubits, np.eye(dim, dtype=complex))
    return trotterized_evolution(spec, t, n_t, identity, space, order).amplitudes


def postselected_trotter_operator(
    spec: GeneratorSpec,
    prepared_osc: np.ndarray,
    space: TruncatedSpace,
    t: float,
    n_t: int,
    r_postselect: float,
    order: int = 1,
    bra_method: str = "closed",
) -> np.ndarray:
    """Product-formula counterpart of ``hybrid_sim.postselected_operator``: all basis inputs at once."""
    q_dim = 2**spec.n_qubits
    state = HybridState.product(prepared_osc, np.eye(q_dim, dtype=complex))
    evolved = trotterized_evolution(spec, t, n_t, state, space, order)
    bra = postselection_bra(space, r_postselect, bra_method)
    return np.einsum("m,mab->ab", bra, evolved.amplitudes.reshape(space.n_fock, q_dim, q_dim))


def trotter_error_report(
    spec: GeneratorSpec, t: float, n_values: Sequence[int], space: TruncatedSpace, order: int = 1
) -> pd.DataFrame:
    """Measured spectral-norm error of the product formula against the exact hybrid propagator."""
    exact = hybrid_propagator(spec.L, spec.H, space, t)
    x_norm = position_norm(space)
    rows = []
    for n_t in n_values:
        err = float(np.linalg.norm(trotter_operator(spec, t, n_t, space, order) - exact, 2))
        row = {"n_t": int(n_t), "error": err}
        if err > 0:
            row["n_t_bound"] = trotter_step_estimate(spec, order, t, err, x_norm)
        if spec.grid and "axes" in spec.grid:
            row["heat_estimate"] = heat_error_estimate(spec, t, n_t, x_norm)
        rows.append(row)
    df = pd.DataFrame(rows)
    if len(rows) > 1 and (df["error"] > 0).all():
        df.attrs["exponent"] = -loglog_slope(df["n_t"], df["error"])
    return df


# gate accounting


@dataclass
class GateCountReport:
    hybrid: int
    cnot: int
    one_qubit: int
    displace: int
    cond_displace: int
    per_axis: List[Dict]
    closed_form: Dict[str, int]
    matches: bool

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.per_axis)


def tally(ops: Sequence[CircuitOp]) -> Dict[str, int]:
    counts = {"displace": 0, "cond_displace": 0, "cnot": 0, "one_qubit": 0}
    for op in ops:
        if op.kind in ("displace", "cond_displace", "cnot"):
            counts[op.kind] += 1
        elif op.kind in ONE_QUBIT_KINDS:
            counts["one_qubit"] += 1
    counts["hybrid"] = counts["displace"] + counts["cond_displace"]
    return counts


def closed_form_counts(bc: str, m: int) -> Dict[str, int]:
    """Per-step counts for one axis of m qubits."""
    M = 2**m
    if m < 2:
        raise ValidationError(f"need m >= 2, got {m}")
    if bc == "dirichlet":
        return {"hybrid": M, "cnot": 2 * (m - 2) * M + 4, "one_qubit": 3 * (m - 1) * M + 2}
    if bc == "neumann":
        return {"hybrid": 3 * M // 2 - 1, "cnot": (5 * m - 10) * M // 2 + 6, "one_qubit": 3 * (m - 1) * M + 2}
    if bc == "periodic":
        one_qubit = 6 if m == 2 else 2 + (9 * m - 13) * M // 4
        return {"hybrid": 3 * M // 4, "cnot": (3 * m - 7) * M // 2 + 4, "one_qubit": one_qubit}
    raise ValidationError(f"unknown boundary condition {bc!r}")


def compile_circuit(spec: GeneratorSpec, t: float, n_t: int) -> List[CircuitOp]:
    layer, _ = trotter_layer(spec, t / n_t)
    return layer * n_t


def gate_counts(bc: str, dims: Sequence[int], n_t: int, t: float = 1.0) -> GateCountReport:
    """Closed-form and compiled gate tallies of an n_t-step first-order circuit."""
    if n_t < 1:
        raise ValidationError(f"n_t must be >= 1, got {n_t}")
    spec = kron_sum_generator([(bc, int(m), 1.0) for m in dims])
    per_axis = []
    for axis, (m, block) in enumerate(zip(dims, spec.blocks)):
        ops = []
        for _ in range(n_t):
            for term in block:
                ops += compile_hybrid_factor(t / n_t, term)
        compiled = tally(ops)
        closed = {k: n_t * v for k, v in closed_form_counts(bc, int(m)).items()}
        per_axis.append(
            {
                "axis": axis,
                "m": int(m),
                "hybrid": compiled["hybrid"],
                "displace": compiled["displace"],
                "cond_displace": compiled["cond_displace"],
                "cnot": compiled["cnot"],
                "one_qubit": compiled["one_qubit"],
                "hybrid_closed": closed["hybrid"],
                "cnot_closed": closed["cnot"],
                "one_qubit_closed": closed["one_qubit"],
            }
        )
    totals = {k: sum(row[k] for row in per_axis) for k in ("hybrid", "cnot", "one_qubit", "displace", "cond_displace")}
    closed_totals = {k: sum(row[f"{k}_closed"] for row in per_axis) for k in ("hybrid", "cnot", "one_qubit")}
    matches = all(totals[k] == closed_totals[k] for k in closed_totals)
    if not matches:
        logger.warning(f"compiled counts {totals} differ from closed forms {closed_totals}")
    return GateCountReport(per_axis=per_axis, closed_form=closed_totals, matches=matches, **totals)


def export_jsonl(ops: Sequence[CircuitOp], path: str):
    with open(path, "w") as f:
        for op in ops:
            f.write(json.dumps(op.to_dict()) + "\n")
