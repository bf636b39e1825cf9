"""
Classical evaluation of the discretized LCHS integral: composite Gauss-Legendre nodes on
[-K, K] with panel width h1 and Q points per panel.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import expm

from .hybrid_sim import fidelity, solution_state
from .kernel import eval_kernel, lorentzian_kernel
from .pauli_heat import GeneratorSpec
from .utils import NumericalError, ValidationError, gauss_legendre_panels

logger = logging.getLogger(__name__)


@dataclass
class DvQuadratureParams:
    h1: float
    K: float
    Q: int
    M_DV: int
    m_c: int
    C_beta: float
    n_half: int
    beta: float
    eps: float
    eta: float
    l1_norm: float = float("nan")

    def __post_init__(self):
        if self.M_DV != 2 * self.n_half * self.Q:
            raise NumericalError(f"M_DV={self.M_DV} inconsistent with 2*{self.n_half}*{self.Q}")
        if self.m_c != int(np.ceil(np.log2(self.M_DV))):
            raise NumericalError(f"m_c={self.m_c} inconsistent with M_DV={self.M_DV}")


@dataclass
class DvSolveResult:
    u_dv: np.ndarray
    l1_norm: float
    fidelity: float
    raw: np.ndarray


def _ceil(x: float) -> int:
    # guard against values a rounding error above an integer
    return int(np.ceil(x - 1e-9))


def dv_params(eps: float, eta: float, beta: float, T: float, L_norm: float) -> DvQuadratureParams:
    """
    h1 = 1/(e T ||L||), K = eta ceil(ln(1/eps)^{1/beta} / h1) h1,
    Q = ceil(ln(8K / (3 C_beta eps)) / ln 4), C_beta = 2 pi e^{-2^beta}.
    """
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < beta < 1:
        raise ValidationError(f"beta must lie in (0, 1), got {beta}")
    if eta <= 0 or T <= 0 or L_norm <= 0:
        raise ValidationError(f"need eta, T, ||L|| > 0, got {eta}, {T}, {L_norm}")
    h1 = 1.0 / (np.e * T * L_norm)
    steps = _ceil(np.log(1 / eps) ** (1 / beta) / h1)
    K = eta * steps * h1
    n_half = int(np.floor(eta * steps + 1e-9))
    C_beta = 2 * np.pi * np.exp(-(2.0**beta))
    Q = max(1, _ceil(np.log(8 * K / (3 * C_beta * eps)) / np.log(4)))
    M_DV = 2 * n_half * Q
    m_c = int(np.ceil(np.log2(M_DV)))
    return DvQuadratureParams(h1=h1, K=K, Q=Q, M_DV=M_DV, m_c=m_c, C_beta=C_beta, n_half=n_half, beta=beta, eps=eps, eta=eta)


def dv_nodes(params: DvQuadratureParams):
    edges = params.h1 * np.arange(-params.n_half, params.n_half + 1)
    return gauss_legendre_panels(edges, params.Q)


def dv_solve(spec: GeneratorSpec, params: DvQuadratureParams, beta: float, T: float, u0: np.ndarray) -> DvSolveResult:
    """sum_j w_j g(k_j) e^{-iT(k_j L + H)} u0, normalized, with ||c||_1 and the fidelity to e^{-AT}u0."""
    u0 = np.asarray(u0, dtype=complex)
    nodes, weights = dv_nodes(params)
    c = weights * eval_kernel(nodes, beta)
    Lm, Hm = spec.L.matrix(), spec.H.matrix()
    if np.allclose(Hm, 0):
        lam, V = np.linalg.eigh(Lm)
        coords = V.conj().T @ u0
        phases = np.exp(-1j * T * np.outer(nodes, lam))  # (nodes, eig)
        raw = V @ ((c[:, None] * phases).sum(axis=0) * coords)
    else:
        raw = sum(cj * (expm(-1j * T * (k * Lm + Hm)) @ u0) for k, cj in zip(nodes, c))
    norm = np.linalg.norm(raw)
    if not norm > 0:
        raise NumericalError("DV quadrature returned the zero vector")
    u_dv = raw / norm
    fid = fidelity(u_dv, solution_state(spec.matrix(), T, u0 / np.linalg.norm(u0)))
    l1 = float(np.sum(np.abs(c)))
    return DvSolveResult(u_dv=u_dv, l1_norm=l1, fidelity=fid, raw=raw)


@dataclass
class DvScanResult:
    best_beta: float
    best: dict
    table: pd.DataFrame


def dv_beta_scan(
    spec: GeneratorSpec,
    eps: float,
    eta: float,
    T: float,
    u0: np.ndarray,
    beta_grid: Sequence[float],
    L_norm: Optional[float] = None,
) -> DvScanResult:
    """Fidelity-maximizing beta over the grid; ties go to the smaller beta."""
    if len(beta_grid) == 0:
        raise ValidationError("beta grid is empty")
    if L_norm is None:
        L_norm = float(np.linalg.norm(spec.L.matrix(), 2))
    rows = []
    for beta in sorted(float(b) for b in beta_grid):
        params = dv_params(eps, eta, beta, T, L_norm)
        result = dv_solve(spec, params, beta, T, u0)
        params.l1_norm = result.l1_norm
        nodes, weights = dv_nodes(params)
        row = asdict(params)
        row.update(
            {
                "fidelity": result.fidelity,
                "infidelity": 1 - result.fidelity,
                "l1_norm_lorentzian": float(np.sum(np.abs(weights * lorentzian_kernel(nodes)))),
            }
        )
        rows.append(row)
        logger.info(f"beta={beta:.2f}: M_DV={params.M_DV}, 1-F={1 - result.fidelity:.3e}")
    table = pd.DataFrame(rows)
    best_idx = 0
    for i, row in enumerate(rows):
        if row["fidelity"] > rows[best_idx]["fidelity"]:
            best_idx = i
    return DvScanResult(best_beta=rows[best_idx]["beta"], best=rows[best_idx], table=table)
