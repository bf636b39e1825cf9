"""
The near-optimal LCHS kernel

    g(k) = e^{2^beta} / (2 pi (1 - ik) e^{(1 + ik)^beta}),

its pointwise decay bound, the domain-truncation radius derived from it, and the
Gaussian-mollified time window.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf, exp1

from .utils import ValidationError, adaptive_gauss_legendre, graded_breakpoints

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class KernelParams:
    """
    Kernel and truncation parameters.

    beta is restricted to (0, 1); the closed-form limits beta in {0, 1} are only reachable
    with ``allow_limit=True``.
    """

    beta: float
    r: float
    r_prime: float
    n_trunc: int
    allow_limit: bool = field(default=False, compare=False)

    def __post_init__(self):
        lo_ok = self.beta >= 0 if self.allow_limit else self.beta > 0
        hi_ok = self.beta <= 1 if self.allow_limit else self.beta < 1
        if not (lo_ok and hi_ok):
            raise ValidationError(f"beta={self.beta} outside the admissible range")
        if self.r < 0 or self.r_prime < 0:
            raise ValidationError(f"squeezing parameters must be non-negative (r={self.r}, r'={self.r_prime})")
        if not self.r_prime < self.r:
            raise ValidationError(f"need r' < r, got r'={self.r_prime}, r={self.r}")
        if int(self.n_trunc) != self.n_trunc or self.n_trunc < 1:
            raise ValidationError(f"n_trunc must be a positive integer, got {self.n_trunc}")

    @classmethod
    def from_widths(cls, beta, sigma, sigma_prime, n_trunc, allow_limit=False):
        return cls(beta, float(np.log(sigma)), float(np.log(sigma_prime)), n_trunc, allow_limit=allow_limit)

    @property
    def sigma(self) -> float:
        return float(np.exp(self.r))

    @property
    def sigma_prime(self) -> float:
        return float(np.exp(self.r_prime))

    @property
    def gamma(self) -> float:
        # e^{-2r'} - e^{-2r} written to stay accurate when r is large
        return 0.25 * np.exp(-2 * self.r_prime) * -np.expm1(-2 * (self.r - self.r_prime))

    def to_dict(self):
        return {"beta": self.beta, "r": self.r, "r_prime": self.r_prime, "n_trunc": int(self.n_trunc)}


def _check_beta(beta, closed=True):
    if closed and not 0 <= beta <= 1:
        raise ValidationError(f"beta={beta} outside [0, 1]")
    if not closed and not 0 < beta < 1:
        raise ValidationError(f"beta={beta} outside (0, 1)")


def eval_kernel(k, beta: float):
    """g(k) on the principal branch; accepts scalars or arrays."""
    _check_beta(beta)
    k = np.asarray(k, dtype=float)
    power = (1 + k**2) ** (beta / 2) * np.exp(1j * beta * np.arctan(k))
    out = np.exp(2.0**beta) / (2 * np.pi * (1 - 1j * k)) * np.exp(-power)
    return out if out.ndim else complex(out)


def tail_bound(k, beta: float):
    """Pointwise bound |g(k)| <= e^{2^beta}/(2 pi sqrt(1+k^2)) exp(-cos(beta pi/2) (1+k^2)^{beta/2})."""
    _check_beta(beta, closed=False)
    k = np.asarray(k, dtype=float)
    c_beta = np.cos(beta * np.pi / 2)
    out = np.exp(2.0**beta) / (2 * np.pi * np.sqrt(1 + k**2)) * np.exp(-c_beta * (1 + k**2) ** (beta / 2))
    return out if out.ndim else float(out)


def tail_integral_bound(radius: float, beta: float) -> float:
    """Bound on the two-sided tail mass of |g| beyond +-radius."""
    _check_beta(beta, closed=False)
    c_beta = np.cos(beta * np.pi / 2)
    return float(2 * np.exp(2.0**beta) / (2 * np.pi * beta) * exp1(c_beta * radius**beta))


def truncation_radius(beta: float, tol: float = DEFAULT_TOL) -> float:
    """Smallest X whose tail mass bound is below tol/10."""
    _check_beta(beta, closed=False)
    target = tol / 10

    def excess(x):
        return np.log(max(tail_integral_bound(x, beta), 1e-300)) - np.log(target)

    hi = 1.0
    while excess(hi) > 0:
        hi *= 2
        if hi > 1e12:
            raise ValidationError(f"no finite truncation radius for beta={beta}, tol={tol}")
    if hi == 1.0:
        return 1.0
    return float(brentq(excess, hi / 2, hi, xtol=1e-8))


def kernel_mass(beta: float, tol: float = 1e-7, radius: float = None) -> complex:
    """Integral of g over the truncated domain; equals 1 up to the truncation error."""
    if radius is None:
        radius = truncation_radius(beta, tol)
    value = adaptive_gauss_legendre(lambda k: eval_kernel(k, beta), graded_breakpoints(radius), tol=tol * 1e-2)
    return complex(value)


def mollified_window(tau, t: float, rho: float):
    """w(tau) = (erf(tau/rho) - erf((tau - t)/rho)) / 2."""
    if t <= 0 or rho <= 0:
        raise ValidationError(f"window needs t > 0 and rho > 0, got t={t}, rho={rho}")
    tau = np.asarray(tau, dtype=float)
    out = 0.5 * (erf(tau / rho) - erf((tau - t) / rho))
    return out if out.ndim else float(out)


def window_l1_bound(rho: float) -> float:
    if rho <= 0:
        raise ValidationError(f"rho must be positive, got {rho}")
    return 2 * rho / np.sqrt(np.pi)


def lorentzian_kernel(k):
    """The simple 1/(pi(1+ik)) kernel, kept as a comparison constant."""
    k = np.asarray(k, dtype=float)
    out = 1.0 / (np.pi * (1 + 1j * k))
    return out if out.ndim else complex(out)
