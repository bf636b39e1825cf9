"""
Squeezed-Fock expansion coefficients of the kernel state.

    raw[n] = sqrt(sigma/sigma') (2^n n!)^{-1/2} int H_n(x/(sqrt(2) sigma')) g(x) e^{-gamma x^2} dx

The integral is taken with composite Gauss-Legendre quadrature over a truncated domain.
The closed forms at beta in {0, 1} serve as an oracle.
"""

import json
import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
from numpy.polynomial import hermite as npherm
from numpy.polynomial import polynomial as nppoly
from scipy.special import erfc, gamma as gamma_fn

from .kernel import DEFAULT_TOL, KernelParams, eval_kernel, truncation_radius
from .utils import (
    NumericalError,
    ValidationError,
    adaptive_gauss_legendre,
    complex_to_pairs,
    graded_breakpoints,
    hermite_functions,
    loglog_slope,
    pairs_to_complex,
)

logger = logging.getLogger(__name__)

# pointwise integrand level below which the domain may be cut
ENVELOPE_FLOOR = 1e-16


@dataclass
class CoefficientSet:
    raw: np.ndarray
    normalized: np.ndarray
    params: KernelParams
    gamma: float
    domain_radius: float = float("nan")
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.raw = np.asarray(self.raw, dtype=complex)
        self.normalized = np.asarray(self.normalized, dtype=complex)
        if abs(np.sum(np.abs(self.normalized) ** 2) - 1) > 1e-12:
            raise NumericalError("normalized coefficients do not have unit norm")

    @classmethod
    def from_raw(cls, raw, params: KernelParams, **kwargs):
        raw = np.asarray(raw, dtype=complex)
        norm = np.linalg.norm(raw)
        if not np.isfinite(norm) or norm == 0:
            raise NumericalError(f"cannot normalize coefficients with norm {norm}")
        return cls(raw=raw, normalized=raw / norm, params=params, gamma=params.gamma, **kwargs)

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "gamma": self.gamma,
            "domain_radius": self.domain_radius,
            "raw": complex_to_pairs(self.raw),
            "normalized": complex_to_pairs(self.normalized),
        }

    def to_json(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, path):
        with open(path) as f:
            d = json.load(f)
        params = KernelParams(**d["params"], allow_limit=True)
        return cls.from_raw(pairs_to_complex(d["raw"]), params, domain_radius=d.get("domain_radius", float("nan")))


def _kernel_envelope(x, beta):
    # |g(x)| bound valid on the closed range beta in [0, 1]
    c_beta = np.cos(beta * np.pi / 2)
    return np.exp(2.0**beta) / (2 * np.pi * np.sqrt(1 + x**2)) * np.exp(-c_beta * (1 + x**2) ** (beta / 2))


def integration_radius(params: KernelParams, tol: float = DEFAULT_TOL, n_max: Optional[int] = None) -> float:
    """
    Radius of the coefficient integration domain: the kernel tail radius, cut further where the
    Gaussian-damped Hermite integrand drops below ENVELOPE_FLOOR.
    """
    n_max = n_max or params.n_trunc
    x_tail = truncation_radius(params.beta, tol) if 0 < params.beta < 1 else np.inf
    gamma = params.gamma
    y_scale = np.sqrt(2) * params.sigma_prime
    x_hi = min(x_tail, 1e7)
    x = np.geomspace(1e-3, x_hi, 4000)
    h = hermite_functions(n_max, x / y_scale, log_weight=-gamma * x**2)
    envelope = np.max(np.abs(h), axis=0) * _kernel_envelope(x, params.beta)
    above = np.nonzero(envelope > ENVELOPE_FLOOR)[0]
    if above.size == 0:
        return float(min(x_tail, 10 * y_scale))
    x_gauss = 1.1 * x[min(above[-1] + 1, x.size - 1)]
    return float(min(x_tail, max(x_gauss, 4 * y_scale)))


def compute_raw_coefficients(
    params: KernelParams,
    tol: float = DEFAULT_TOL,
    domain_radius: Optional[float] = None,
) -> CoefficientSet:
    """
    Quadrature evaluation of the raw coefficients, normalized set attached.

    Args
        params [KernelParams]: kernel and truncation parameters (beta in {0,1} allowed with allow_limit)
        tol [float]: refinement tolerance of the adaptive quadrature and of the tail truncation
        domain_radius [float]: overrides the automatically chosen integration radius

    Returns
        CoefficientSet
    """
    gamma = params.gamma
    if not gamma > 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    n = params.n_trunc
    radius = domain_radius or integration_radius(params, tol)
    y_scale = np.sqrt(2) * params.sigma_prime
    prefactor = np.sqrt(params.sigma / params.sigma_prime) * np.pi**0.25

    def integrand(x):
        h = hermite_functions(n, x / y_scale, log_weight=-gamma * x**2)
        return h * eval_kernel(x, params.beta)[None, :]

    logger.info(f"coefficients: beta={params.beta}, r={params.r}, r'={params.r_prime}, N={n}, radius={radius:.4g}")
    raw = prefactor * adaptive_gauss_legendre(integrand, graded_breakpoints(radius), tol=tol)
    return CoefficientSet.from_raw(raw, params, domain_radius=radius)


def _gaussian_moment(j: int, gamma: float) -> float:
    if j % 2:
        return 0.0
    return float(gamma_fn((j + 1) / 2) / gamma ** ((j + 1) / 2))


def _shifted_gaussian_moment(j: int, gamma: float) -> complex:
    # int x^j exp(-gamma x^2 - i x) dx
    mu = -1j / (2 * gamma)
    var = 1 / (2 * gamma)
    total = 0j
    for k in range(0, j + 1, 2):
        double_fact = np.prod(np.arange(k - 1, 0, -2)) if k else 1.0
        total += factorial(j) / (factorial(k) * factorial(j - k)) * mu ** (j - k) * double_fact * var ** (k / 2)
    return np.sqrt(np.pi / gamma) * np.exp(-1 / (4 * gamma)) * total


def analytic_coefficients_limit(n: int, sigma: float, sigma_prime: float, beta_limit: int) -> complex:
    """
    Closed-form raw coefficient at beta = 0 or beta = 1.

    H_n(x/(sqrt(2) sigma')) is split as H_n(-ia) + (x + i) Q(x); the first piece gives an erfc
    boundary term, the quotient a finite sum of Gaussian moments.
    """
    if beta_limit not in (0, 1):
        raise ValidationError(f"beta_limit must be 0 or 1, got {beta_limit}")
    if n < 0:
        raise ValidationError(f"n must be non-negative, got {n}")
    gamma = 0.25 * (sigma_prime**-2 - sigma**-2)
    if not gamma > 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    a = 1 / (np.sqrt(2) * sigma_prime)

    basis = np.zeros(n + 1)
    basis[n] = 1
    poly = npherm.herm2poly(basis) * a ** np.arange(n + 1)
    quotient, remainder = nppoly.polydiv(poly.astype(complex), np.array([1j, 1.0]))
    boundary = complex(remainder[0]) if n > 0 else complex(poly[0])
    if n == 0:
        quotient = np.zeros(0)

    if beta_limit == 0:
        head = 0.5 * boundary * np.exp(gamma) * erfc(np.sqrt(gamma))
        tail = 1j / (2 * np.pi) * sum(q * _gaussian_moment(j, gamma) for j, q in enumerate(quotient))
    else:
        head = 0.5 * boundary * np.exp(gamma) * erfc(np.sqrt(gamma) - 1 / (2 * np.sqrt(gamma)))
        tail = 1j * np.e / (2 * np.pi) * sum(q * _shifted_gaussian_moment(j, gamma) for j, q in enumerate(quotient))

    scale = np.sqrt(sigma / sigma_prime) / np.sqrt(2.0**n * factorial(n))
    return complex(scale * (head + tail))


def _projection_overlaps(params: KernelParams, n_max: int, tol: float):
    y_scale = np.sqrt(2) * params.sigma_prime
    radius = truncation_radius(params.beta, tol)

    def integrand(x):
        g = eval_kernel(x, params.beta)
        phi = hermite_functions(n_max, x / y_scale) / np.sqrt(y_scale)
        return np.vstack([np.abs(g) ** 2, phi * g[None, :]])

    values = adaptive_gauss_legendre(integrand, graded_breakpoints(radius), tol=tol)
    norm_sq = float(np.real(values[0]))
    if not norm_sq > 0:
        raise NumericalError("kernel normalization integral is not positive")
    return values[1:] / np.sqrt(norm_sq)


def truncation_error(params: KernelParams, n_eval: int, tol: float = DEFAULT_TOL) -> float:
    """||psi - Pi_N psi|| for the normalized kernel state, projected on phi_{n, r'} with n < n_eval."""
    if n_eval < 1:
        raise ValidationError(f"n_eval must be >= 1, got {n_eval}")
    overlaps = _projection_overlaps(params, n_eval, tol)
    captured = float(np.sum(np.abs(overlaps) ** 2))
    return float(np.sqrt(max(0.0, 1.0 - captured)))


def truncation_error_curve(params: KernelParams, n_values: Sequence[int], tol: float = DEFAULT_TOL) -> pd.DataFrame:
    n_values = sorted(int(n) for n in n_values)
    if not n_values or n_values[0] < 1:
        raise ValidationError("n_values must be a nonempty list of positive integers")
    overlaps = _projection_overlaps(params, n_values[-1], tol)
    captured = np.cumsum(np.abs(overlaps) ** 2)
    errors = [float(np.sqrt(max(0.0, 1.0 - captured[n - 1]))) for n in n_values]
    df = pd.DataFrame({"n": n_values, "error": errors})
    if len(n_values) > 1 and min(errors) > 0:
        df.attrs["slope"] = loglog_slope(n_values, errors)
    return df
