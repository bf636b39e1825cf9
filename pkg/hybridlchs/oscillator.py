"""
Truncated Fock-space algebra. By default hbar = 2 (x = a + a^dagger); a space built with
hbar = 1 uses x = (a + a^dagger)/sqrt(2), the quadrature of bosonic circuit emulators.

A TruncatedSpace may carry a frame squeezing ``r_frame``: its basis vectors are then the
squeezed-Fock functions phi_{n, r_frame} and the position operator reads
e^{r_frame} sqrt(hbar/2) (a + a^dagger). With r_frame = 0 this is the ordinary Fock basis.
"""

import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .utils import (
    LeakageError,
    LeakageWarning,
    ValidationError,
    adaptive_gauss_legendre,
    graded_breakpoints,
    hermite_functions,
)

logger = logging.getLogger(__name__)

LEAKAGE_THRESHOLD = 1e-8
OPERATOR_KINDS = ("ladder", "position", "squeeze", "displace", "snap", "projector")


@dataclass(frozen=True)
class TruncatedSpace:
    n_fock: int
    r_frame: float = 0.0
    hbar: float = 2.0

    def __post_init__(self):
        if int(self.n_fock) != self.n_fock or self.n_fock < 1:
            raise ValidationError(f"n_fock must be a positive integer, got {self.n_fock}")
        if self.hbar <= 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")

    @property
    def sigma_frame(self) -> float:
        return float(np.exp(self.r_frame))

    def basis(self, n: int) -> np.ndarray:
        vec = np.zeros(self.n_fock, dtype=complex)
        vec[n] = 1
        return vec


@dataclass(frozen=True)
class OscillatorOperator:
    matrix: np.ndarray
    kind: str
    params: Dict = field(default_factory=dict, compare=False)

    def __matmul__(self, other):
        if isinstance(other, OscillatorOperator):
            return OscillatorOperator(self.matrix @ other.matrix, "product")
        return self.matrix @ other


def _require_dim(space: TruncatedSpace, minimum: int = 2):
    if space.n_fock < minimum:
        raise ValidationError(f"need at least {minimum} Fock levels, got {space.n_fock}")


def annihilation(n_fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1).astype(complex)


def position_matrix(space: TruncatedSpace) -> np.ndarray:
    a = annihilation(space.n_fock)
    return space.sigma_frame * np.sqrt(space.hbar / 2) * (a + a.conj().T)


@lru_cache(maxsize=64)
def _position_eigh(n_fock: int, r_frame: float, hbar: float):
    x = position_matrix(TruncatedSpace(n_fock, r_frame, hbar))
    values, vectors = np.linalg.eigh(x)
    return values, vectors


def position_spectrum(space: TruncatedSpace):
    """Eigenvalues and eigenvectors of the truncated position operator (cached)."""
    return _position_eigh(space.n_fock, float(space.r_frame), float(space.hbar))


def position_norm(space: TruncatedSpace) -> float:
    """||Pi_N x Pi_N||, the largest eigenvalue magnitude of the truncated position matrix."""
    values, _ = position_spectrum(space)
    return float(np.max(np.abs(values)))


def position_exponential(space: TruncatedSpace, lam: float) -> np.ndarray:
    """e^{-i lam x} on the truncated space, i.e. D(-i lam) when r_frame = 0."""
    values, vectors = position_spectrum(space)
    return (vectors * np.exp(-1j * lam * values)[None, :]) @ vectors.conj().T


def _top_population(matrix: np.ndarray) -> float:
    return float(np.abs(matrix[-1, 0]) ** 2)


def build_operator(space: TruncatedSpace, kind: str, params=None) -> OscillatorOperator:
    """
    Gate or observable on the truncated space.

    kind
        ladder      annihilation operator a
        position    x = e^{r_frame} sqrt(hbar/2) (a + a^dagger)
        squeeze     S(r) = exp[(r/2)(a^dagger^2 - a^2)], params r (so <x^2> = e^{2r} on S(r)|0>)
        displace    D(alpha) = exp(alpha a^dagger - alpha^* a), params alpha
        snap        diag(e^{i theta_n}), params theta (padded with zeros)
        projector   |v><v|, params v
    """
    if kind not in OPERATOR_KINDS:
        raise ValidationError(f"unknown operator kind {kind!r}")
    n = space.n_fock
    if kind == "ladder":
        return OscillatorOperator(annihilation(n), kind)
    if kind == "position":
        return OscillatorOperator(position_matrix(space), kind)
    if kind == "squeeze":
        _require_dim(space)
        r = float(params)
        a = annihilation(n)
        matrix = expm(0.5 * r * (a.conj().T @ a.conj().T - a @ a))
        top = _top_population(matrix)
        if top > LEAKAGE_THRESHOLD:
            warnings.warn(f"squeeze r={r} populates level {n - 1} with {top:.2e}", LeakageWarning)
        return OscillatorOperator(matrix, kind, {"r": r, "leakage": top})
    if kind == "displace":
        _require_dim(space)
        alpha = complex(params)
        a = annihilation(n)
        # D = exp(-i K) with K = i(alpha a^dagger - alpha^* a) Hermitian
        generator = 1j * (alpha * a.conj().T - np.conj(alpha) * a)
        values, vectors = np.linalg.eigh(generator)
        matrix = (vectors * np.exp(-1j * values)[None, :]) @ vectors.conj().T
        top = _top_population(matrix)
        if top > LEAKAGE_THRESHOLD:
            warnings.warn(f"displacement alpha={alpha} populates level {n - 1} with {top:.2e}", LeakageWarning)
        return OscillatorOperator(matrix, kind, {"alpha": alpha, "leakage": top})
    if kind == "snap":
        theta = np.zeros(n)
        given = np.asarray(params, dtype=float)
        if given.size > n:
            raise ValidationError(f"{given.size} SNAP phases for {n} levels")
        theta[: given.size] = given
        return OscillatorOperator(np.diag(np.exp(1j * theta)), kind, {"theta": given})
    vec = np.asarray(params, dtype=complex)
    if vec.shape != (n,):
        raise ValidationError(f"projector vector has shape {vec.shape}, expected ({n},)")
    return OscillatorOperator(np.outer(vec, vec.conj()), kind)


def squeeze_gate(space: TruncatedSpace, z: complex) -> np.ndarray:
    """
    exp[(z^* a^2 - z a^dagger^2) / 2] exponentiated on the truncated space, the single-mode
    squeezer of bosonic circuit emulators. For real z this is the unitary truncated matrix
    ``build_operator(space, "squeeze", -z)``; it is not the projection of the continuum
    squeezer once S(z)|0> outgrows the space.
    """
    _require_dim(space)
    z = complex(z)
    a = annihilation(space.n_fock)
    return expm(0.5 * (np.conj(z) * a @ a - z * a.conj().T @ a.conj().T))


def squeezed_vacuum_amplitudes(
    r: float, space: TruncatedSpace, normalize: bool = True, allow_leakage: bool = False
) -> np.ndarray:
    """
    Fock amplitudes of S(r)|0>,

        c_{2k} = (cosh r)^{-1/2} (tanh r)^k sqrt((2k)!) / (2^k k!),  c_{2k+1} = 0,

    evaluated in log space. Population outside the space is reported as leakage: a
    LeakageError unless ``allow_leakage`` (then a LeakageWarning). With ``normalize`` the
    truncated vector is rescaled to unit norm.
    """
    n = space.n_fock
    k = np.arange((n + 1) // 2)
    log_cosh = np.logaddexp(r, -r) - np.log(2)
    tanh = np.tanh(r)
    out = np.zeros(n, dtype=complex)
    if tanh == 0:
        out[0] = 1
        return out
    log_mag = -0.5 * log_cosh + k * np.log(abs(tanh)) + 0.5 * gammaln(2 * k + 1) - k * np.log(2) - gammaln(k + 1)
    out[0::2] = np.sign(tanh) ** k * np.exp(log_mag)
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(out) ** 2)))
    if leakage > LEAKAGE_THRESHOLD:
        msg = f"squeezed vacuum r={r} leaks {leakage:.2e} outside {n} Fock levels"
        if not allow_leakage:
            raise LeakageError(msg)
        warnings.warn(msg, LeakageWarning)
    if normalize:
        out /= np.linalg.norm(out)
    return out


def squeezed_fock_wavefunction(n: int, r_prime: float, x) -> np.ndarray:
    """phi_{n, r'}(x) = (sqrt(2) sigma')^{-1/2} h_n(x / (sqrt(2) sigma'))."""
    if n < 0:
        raise ValidationError(f"n must be non-negative, got {n}")
    scale = np.sqrt(2) * np.exp(r_prime)
    x = np.asarray(x, dtype=float)
    out = hermite_functions(n + 1, np.atleast_1d(x) / scale)[n] / np.sqrt(scale)
    return out if x.ndim else float(out[0])


def postselection_bra(space: TruncatedSpace, r: float, method: str = "closed") -> np.ndarray:
    """
    Overlaps <phi_r | phi_{n, r_frame}>, n < n_fock, of the squeezed-vacuum postselection
    state with the basis of ``space``. These are the (real) amplitudes of S(r - r_frame)|0>;
    the part of phi_r outside the space is dropped, not renormalized.

    method "closed" uses the amplitude formula, "quadrature" integrates the wavefunctions and
    "gate" returns the conjugated first column of ``squeeze_gate(space, r)``, i.e. the bra
    <0|S^dagger(r) of the emulated register (r_frame must be 0).
    """
    if method == "gate":
        if space.r_frame != 0:
            raise ValidationError("gate postselection needs the plain Fock basis (r_frame = 0)")
        return squeeze_gate(space, r)[:, 0].conj()
    if method == "closed":
        return squeezed_vacuum_amplitudes(r - space.r_frame, space, normalize=False, allow_leakage=True).real
    if method != "quadrature":
        raise ValidationError(f"unknown postselection method {method!r}")
    sigma = np.exp(r)
    radius = 14 * max(sigma, space.sigma_frame * np.sqrt(2 * space.n_fock + 1))
    y_scale = np.sqrt(2) * space.sigma_frame

    def integrand(x):
        bra = squeezed_fock_wavefunction(0, r, x)
        return hermite_functions(space.n_fock, x / y_scale) / np.sqrt(y_scale) * bra[None, :]

    return np.real(adaptive_gauss_legendre(integrand, graded_breakpoints(radius), tol=1e-13))


def jc_pulse_matrix(n_fock: int, n: int, alpha: float, phi: float) -> np.ndarray:
    """
    exp[-i (alpha/sqrt(n)) (e^{i phi} s_- a^dagger + e^{-i phi} s_+ a)] on qubit (x) oscillator,
    index q * n_fock + m with |g> = 0 and |e> = 1. Each manifold {|e,m-1>, |g,m>} rotates by
    alpha sqrt(m/n); |g,0> and the top level |e, n_fock-1> are left alone.
    """
    if n < 1:
        raise ValidationError(f"JC pulse needs n >= 1, got {n}")
    if n_fock < 2:
        raise ValidationError(f"need at least 2 Fock levels, got {n_fock}")
    dim = 2 * n_fock
    out = np.eye(dim, dtype=complex)
    for m in range(1, n_fock):
        angle = alpha * np.sqrt(m / n)
        e_idx, g_idx = n_fock + m - 1, m
        c, s = np.cos(angle), np.sin(angle)
        out[e_idx, e_idx] = c
        out[g_idx, g_idx] = c
        out[e_idx, g_idx] = -1j * s * np.exp(-1j * phi)
        out[g_idx, e_idx] = -1j * s * np.exp(1j * phi)
    return out


def qubit_rotation_matrix(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2) I - i sin(theta/2)(e^{-i phi} s_+ + e^{i phi} s_-) in the (g, e) basis."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s * np.exp(1j * phi)], [-1j * s * np.exp(-1j * phi), c]], dtype=complex)


def apply_snap_displacement(layers: Sequence, space: TruncatedSpace, state: Optional[np.ndarray] = None) -> np.ndarray:
    """prod_l D(alpha_l) SNAP(theta_l) applied to ``state`` (vacuum by default), first layer first."""
    psi = space.basis(0) if state is None else np.asarray(state, dtype=complex)
    for alpha, theta in layers:
        psi = build_operator(space, "snap", theta).matrix @ psi
        psi = build_operator(space, "displace", alpha).matrix @ psi
    return psi
