"""
Non-Gaussianity diagnostics of prepared oscillator states and the postselection
perturbation analysis.
"""

import itertools
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Sequence

import numpy as np
import pandas as pd
from scipy.special import xlogy

from .utils import ValidationError, check_normalized

logger = logging.getLogger(__name__)

STELLAR_TOL = 1e-10
NU_GUARD = 1e-12


@dataclass
class NonGaussReport:
    stellar_rank: int
    alpha_moment: complex
    nbar: float
    m_moment: complex
    N_c: float
    M_c: complex
    nu: float
    delta_nG: float

    def to_dict(self):
        out = asdict(self)
        for key in ("alpha_moment", "m_moment", "M_c"):
            out[key] = [float(np.real(out[key])), float(np.imag(out[key]))]
        return out


def stellar_rank(C: Sequence[complex], tol: float = STELLAR_TOL) -> int:
    """Highest Fock index whose coefficient exceeds ``tol`` relative to max|C_n|."""
    mags = np.abs(np.asarray(C, dtype=complex))
    if mags.size == 0 or mags.max() == 0:
        raise ValidationError("coefficient vector is zero")
    above = np.nonzero(mags > tol * mags.max())[0]
    return int(above[-1])


def qre_nongaussianity(C: Sequence[complex]) -> NonGaussReport:
    """
    Relative-entropy non-Gaussianity of the pure state sum_n C_n|n>.

    Args:
        C [array]: normalized Fock coefficients

    Returns:
        NonGaussReport with the first and second moments, the symplectic eigenvalue nu of
        the moment-matched Gaussian, and delta_nG = S(gaussian), since S(pure) = 0.
    """
    C = check_normalized(np.asarray(C, dtype=complex), "Fock coefficients")
    n = np.arange(C.size)
    alpha = np.sum(np.conj(C[:-1]) * C[1:] * np.sqrt(n[1:])) if C.size > 1 else 0j
    nbar = float(np.sum(n * np.abs(C) ** 2))
    if C.size > 2:
        m = np.sum(np.conj(C[:-2]) * C[2:] * np.sqrt(n[1:-1] * n[2:]))
    else:
        m = 0j
    N_c = nbar - abs(alpha) ** 2
    M_c = m - alpha**2
    nu_sq = (N_c + 0.5) ** 2 - abs(M_c) ** 2
    nu = float(np.sqrt(max(nu_sq, 0.0)))
    if nu < 0.5:
        if nu < 0.5 - NU_GUARD:
            logger.warning(f"symplectic eigenvalue {nu:.3e} below 1/2")
        nu = 0.5
    delta = float(xlogy(nu + 0.5, nu + 0.5) - xlogy(nu - 0.5, nu - 0.5))
    return NonGaussReport(
        stellar_rank=stellar_rank(C),
        alpha_moment=complex(alpha),
        nbar=nbar,
        m_moment=complex(m),
        N_c=float(N_c),
        M_c=complex(M_c),
        nu=nu,
        delta_nG=max(delta, 0.0),
    )


def postselection_bound(K_norm: float, eps: float) -> float:
    return 2 * K_norm * eps + eps**2


@dataclass
class PostselectionReport:
    probabilities: Dict[str, float]
    pairs: pd.DataFrame
    holds: bool

    def to_dict(self):
        return {
            "probabilities": dict(self.probabilities),
            "pairs": self.pairs.to_dict(orient="records"),
            "holds": bool(self.holds),
        }


def postselection_analysis(variants: Dict[str, np.ndarray], u0: np.ndarray, slack: float = 1e-12) -> PostselectionReport:
    """
    Success probabilities ||K u0||^2 of each postselected operator and, for every ordered
    pair, the spectral gap eps = ||K_a - K_b|| with the check |p_a - p_b| <= 2||K_a|| eps + eps^2.
    """
    if not variants:
        raise ValidationError("no oracle variants given")
    u0 = check_normalized(np.asarray(u0, dtype=complex), "qubit input")
    mats = {name: np.asarray(K, dtype=complex) for name, K in variants.items()}
    probs = {name: float(np.linalg.norm(K @ u0) ** 2) for name, K in mats.items()}
    rows = []
    for a, b in itertools.permutations(mats, 2):
        K_norm = float(np.linalg.norm(mats[a], 2))
        eps = float(np.linalg.norm(mats[a] - mats[b], 2))
        bound = postselection_bound(K_norm, eps)
        diff = abs(probs[a] - probs[b])
        rows.append({"a": a, "b": b, "K_norm": K_norm, "eps": eps, "dp": diff, "bound": bound, "holds": diff <= bound + slack})
    pairs = pd.DataFrame(rows, columns=["a", "b", "K_norm", "eps", "dp", "bound", "holds"])
    holds = bool(pairs["holds"].all()) if len(pairs) else True
    if not holds:
        logger.warning("postselection perturbation bound violated")
    return PostselectionReport(probabilities=probs, pairs=pairs, holds=holds)
