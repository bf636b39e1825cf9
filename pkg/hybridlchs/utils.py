"""
Shared numerics: error types, stable Hermite functions, composite Gauss-Legendre
quadrature and small serialization helpers.
"""

import logging
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

logger = logging.getLogger(__name__)

QUADRATURE_ORDER = 16
QUADRATURE_TOL = 1e-12
MAX_REFINEMENTS = 12
NORM_TOL = 1e-8


class LCHSError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(LCHSError, ValueError):
    pass


class NumericalError(LCHSError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    pass


class LeakageError(NumericalError):
    pass


class LeakageWarning(UserWarning):
    pass


def hermite_functions(n_max: int, y: np.ndarray, log_weight: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Normalized Hermite functions h_0..h_{n_max-1} on the points ``y``, via

        h_{n+1}(y) = sqrt(2/(n+1)) y h_n(y) - sqrt(n/(n+1)) h_{n-1}(y)

    Args
        n_max [int]: number of functions to return
        y [np.ndarray]: evaluation points
        log_weight [np.ndarray]: log of the Gaussian factor carried by the seed (default -y^2/2,
            i.e. the ordinary Hermite functions). Any other weight is absorbed into h_0 so that
            the polynomial part is never formed explicitly.

    Returns
        array of shape (n_max, len(y))
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if log_weight is None:
        log_weight = -0.5 * y**2
    out = np.zeros((n_max, y.size))
    if n_max == 0:
        return out
    out[0] = np.pi ** (-0.25) * np.exp(log_weight)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * y * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * y * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def gauss_legendre_panels(edges: Sequence[float], order: int = QUADRATURE_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite Gauss-Legendre rule over consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = roots_legendre(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def graded_breakpoints(radius: float, ratio: float = 1.5, core: float = 2.0, core_step: float = 0.5) -> np.ndarray:
    """Symmetric panel edges on [-radius, radius]: uniform near the origin, geometric further out."""
    if radius <= 0:
        raise ValidationError(f"integration radius must be positive, got {radius}")
    positive = list(np.arange(core_step, min(core, radius), core_step))
    edge = core
    while edge < radius:
        positive.append(edge)
        edge *= ratio
    positive.append(radius)
    positive = np.unique(np.asarray(positive))
    positive = positive[positive <= radius]
    return np.concatenate([-positive[::-1], [0.0], positive])


def halve_panels(edges: np.ndarray) -> np.ndarray:
    mid = 0.5 * (edges[1:] + edges[:-1])
    out = np.empty(edges.size + mid.size)
    out[0::2] = edges
    out[1::2] = mid
    return out


def adaptive_gauss_legendre(
    func: Callable[[np.ndarray], np.ndarray],
    edges: Sequence[float],
    order: int = QUADRATURE_ORDER,
    tol: float = QUADRATURE_TOL,
    max_refinements: int = MAX_REFINEMENTS,
) -> np.ndarray:
    """
    Integrate ``func`` (vectorized; values of shape (..., n_nodes)) with a composite rule,
    halving every panel until two successive estimates agree to ``tol`` (relative to the
    larger of 1 and the estimate's magnitude).

    Raises ConvergenceError when ``max_refinements`` halvings do not reach the tolerance.
    """
    edges = np.asarray(edges, dtype=float)
    previous = None
    for level in range(max_refinements + 1):
        nodes, weights = gauss_legendre_panels(edges, order)
        estimate = np.asarray(func(nodes)) @ weights
        if previous is not None:
            scale = max(1.0, float(np.max(np.abs(estimate))))
            diff = float(np.max(np.abs(estimate - previous)))
            if diff <= tol * scale:
                logger.debug(f"quadrature converged after {level} refinements ({nodes.size} nodes, diff {diff:.2e})")
                return estimate
        previous = estimate
        edges = halve_panels(edges)
    raise ConvergenceError(f"quadrature did not converge to {tol:g} after {max_refinements} refinements")


def check_normalized(vec: np.ndarray, name: str = "vector", tol: float = NORM_TOL) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    if not np.all(np.isfinite(vec)):
        raise NumericalError(f"{name} has non-finite entries")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"{name} is not normalized (norm {norm:.12g})")
    return vec


def complex_to_pairs(values: Iterable[complex]) -> List[List[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def pairs_to_complex(pairs: Iterable[Sequence[float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float)), 1)
    return float(slope)
