"""
Oscillator (x) qubit-register simulation of the hybrid LCHS step: exact evolution under
x (x) L + I (x) H, postselection on the squeezed vacuum, and the classical reference.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import expm, schur

from .oscillator import TruncatedSpace, position_matrix, postselection_bra
from .pauli_heat import PauliSum
from .utils import LeakageError, NumericalError, ValidationError, check_normalized

logger = logging.getLogger(__name__)

POSTSELECTION_FLOOR = 1e-8
MatrixLike = Union[PauliSum, np.ndarray]


@dataclass
class HybridState:
    """
    Amplitudes ordered oscillator-major, qubits little-endian. ``amplitudes`` is either a
    vector of length n_fock * 2^n_qubits or a matrix whose columns are such vectors.
    """

    n_fock: int
    n_qubits: int
    amplitudes: np.ndarray
    norm: float = 1.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape[0] != self.dim:
            raise ValidationError(f"amplitudes have {self.amplitudes.shape[0]} rows, expected {self.dim}")

    @property
    def dim(self) -> int:
        return self.n_fock * 2**self.n_qubits

    @classmethod
    def product(cls, osc: np.ndarray, qubits: np.ndarray) -> "HybridState":
        osc = np.asarray(osc, dtype=complex)
        qubits = np.asarray(qubits, dtype=complex)
        n_qubits = int(round(np.log2(qubits.shape[0])))
        if qubits.ndim == 1:
            amps = np.kron(osc, qubits)
        else:
            amps = np.einsum("m,qb->mqb", osc, qubits).reshape(osc.size * qubits.shape[0], -1)
        return cls(osc.size, n_qubits, amps)

    def tensor(self) -> np.ndarray:
        """View as (n_fock, 2, ..., 2, batch) with q_{n-1} on axis 1 and q_0 last before batch."""
        return self.amplitudes.reshape((self.n_fock,) + (2,) * self.n_qubits + (-1,))


@dataclass
class PostselectedResult:
    qubit_state: np.ndarray
    success_probability: float
    raw_norm: float
    raw_state: Optional[np.ndarray] = None


def _as_matrix(op: MatrixLike) -> np.ndarray:
    if isinstance(op, PauliSum):
        return op.matrix()
    return np.asarray(op, dtype=complex)


def exact_propagator(A: np.ndarray, t: float, method: str = "auto") -> np.ndarray:
    """
    e^{-At}. Normal matrices go through a complex Schur form (diagonal for normal A),
    everything else through scaling-and-squaring.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"A must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalError("A has non-finite entries")
    if method == "auto":
        defect = np.linalg.norm(A @ A.conj().T - A.conj().T @ A)
        method = "spectral" if defect <= 1e-12 * max(1.0, np.linalg.norm(A) ** 2) else "expm"
    if method == "spectral":
        T, Z = schur(A, output="complex")
        return (Z * np.exp(-t * np.diag(T))[None, :]) @ Z.conj().T
    if method == "expm":
        return expm(-t * A)
    raise ValidationError(f"unknown propagator method {method!r}")


def solution_state(A: np.ndarray, t: float, u0: np.ndarray) -> np.ndarray:
    """Normalized e^{-At} u0."""
    u = exact_propagator(A, t) @ np.asarray(u0, dtype=complex)
    return u / np.linalg.norm(u)


def hybrid_hamiltonian(L: MatrixLike, H: MatrixLike, space: TruncatedSpace) -> np.ndarray:
    """x (x) L + I (x) H on the truncated hybrid space."""
    Lm = _as_matrix(L)
    Hm = _as_matrix(H)
    if Lm.shape != Hm.shape:
        raise ValidationError(f"L {Lm.shape} and H {Hm.shape} differ in size")
    if np.linalg.eigvalsh((Lm + Lm.conj().T) / 2).min() < -1e-10:
        logger.warning("dissipative part L is not positive semidefinite")
    x = position_matrix(space)
    return np.kron(x, Lm) + np.kron(np.eye(space.n_fock), Hm)


def hybrid_propagator(L: MatrixLike, H: MatrixLike, space: TruncatedSpace, t: float) -> np.ndarray:
    values, vectors = np.linalg.eigh(hybrid_hamiltonian(L, H, space))
    return (vectors * np.exp(-1j * t * values)[None, :]) @ vectors.conj().T


def postselect(state: HybridState, bra: np.ndarray, floor: float = POSTSELECTION_FLOOR) -> PostselectedResult:
    """Contract the oscillator index with ``bra``; ``state`` must be a single vector."""
    amps = state.amplitudes.reshape(state.n_fock, 2**state.n_qubits)
    raw = np.asarray(bra) @ amps
    raw_norm = float(np.linalg.norm(raw))
    if raw_norm < floor:
        raise LeakageError(f"postselection norm {raw_norm:.3e} below floor {floor:g}")
    return PostselectedResult(
        qubit_state=raw / raw_norm,
        success_probability=raw_norm**2,
        raw_norm=raw_norm,
        raw_state=raw,
    )


def postselected_operator(
    prepared_osc: np.ndarray,
    L: MatrixLike,
    H: MatrixLike,
    t: float,
    space: TruncatedSpace,
    r_postselect: float,
    propagator: Optional[np.ndarray] = None,
    bra_method: str = "closed",
) -> np.ndarray:
    """
    K = (<phi_r| (x) I) e^{-itH_hyb} (|prep> (x) I), a 2^q x 2^q matrix. ``bra_method`` is
    passed to ``postselection_bra``.
    """
    Lm = _as_matrix(L)
    q_dim = Lm.shape[0]
    if propagator is None:
        propagator = hybrid_propagator(Lm, H, space, t)
    bra = postselection_bra(space, r_postselect, bra_method)
    U = propagator.reshape(space.n_fock, q_dim, space.n_fock, q_dim)
    return np.einsum("m,manb,n->ab", bra, U, np.asarray(prepared_osc, dtype=complex))


def run_lchs(
    prepared_osc: np.ndarray,
    L: MatrixLike,
    H: MatrixLike,
    t: float,
    r_postselect: float,
    u0: np.ndarray,
    space: TruncatedSpace,
    floor: float = POSTSELECTION_FLOOR,
    bra_method: str = "closed",
) -> PostselectedResult:
    """
    Evolve |prep> (x) u0 exactly for time t and postselect the oscillator on the
    squeezed vacuum of squeezing ``r_postselect``.
    """
    prepared_osc = check_normalized(prepared_osc, "prepared oscillator state")
    u0 = check_normalized(u0, "qubit input")
    if prepared_osc.size != space.n_fock:
        raise ValidationError(f"prepared state has {prepared_osc.size} levels, space has {space.n_fock}")
    K = postselected_operator(prepared_osc, L, H, t, space, r_postselect, bra_method=bra_method)
    raw = K @ u0
    raw_norm = float(np.linalg.norm(raw))
    if raw_norm < floor:
        raise LeakageError(f"postselection norm {raw_norm:.3e} below floor {floor:g}")
    logger.debug(f"run_lchs: t={t}, p_succ={raw_norm ** 2:.4e}")
    return PostselectedResult(qubit_state=raw / raw_norm, success_probability=raw_norm**2, raw_norm=raw_norm, raw_state=raw)


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    u = check_normalized(u, "first state")
    v = check_normalized(v, "second state")
    return float(min(1.0, abs(np.vdot(u, v)) ** 2))
