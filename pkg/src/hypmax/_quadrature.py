"""Quadrature building blocks.

Everything here returns *rules* (nodes and weights) so that one rule can be
applied to many integrands at once, typically a whole vector of spectral
parameters.  Two kinds of panels are used:

* plain Gauss-Legendre panels for smooth integrands, and
* an endpoint panel for ``u**beta * G(u)`` on ``[0, h]`` with ``G`` smooth and
  ``beta`` possibly complex with ``Re beta > -1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_sh_legendre, roots_jacobi, roots_legendre

from .errors import QuadratureError

PANEL_NODES = 6


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for every adaptive integral in the package."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_panels: int = 4096
    jacobi_nodes: int = 64

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")
        if self.jacobi_nodes < 2:
            raise ValueError("jacobi_nodes must be >= 2")


DEFAULT_CONFIG = QuadratureConfig()


@lru_cache(maxsize=64)
def gauss_legendre_unit(k: int) -> tuple[np.ndarray, np.ndarray]:
    """k-point Gauss-Legendre rule on [0, 1]."""
    x, w = roots_legendre(k)
    return 0.5 * (x + 1.0), 0.5 * w


def _moment_weights(beta: complex, k: int) -> np.ndarray:
    # Product rule: project G onto shifted Legendre polynomials with a k-point
    # Gauss-Legendre rule, then integrate x**beta * P_j(x) exactly:
    #   int_0^1 x^beta P_j(x) dx = prod_{l<j}(beta-l) / prod_{l<=j}(beta+l+1)
    x, w = gauss_legendre_unit(k)
    mu = np.empty(k, dtype=complex)
    mu[0] = 1.0 / (beta + 1.0)
    for j in range(1, k):
        mu[j] = mu[j - 1] * (beta - (j - 1)) / (beta + j + 1)
    weights = np.zeros(k, dtype=complex)
    for j in range(k):
        weights += (2 * j + 1) * mu[j] * eval_sh_legendre(j, x)
    return w * weights


@lru_cache(maxsize=256)
def _power_rule_cached(beta_re: float, beta_im: float, k: int):
    x, _ = gauss_legendre_unit(k)
    if beta_im == 0.0:
        # Gauss-Jacobi: weight (1+y)^beta on [-1, 1], mapped to x = (1+y)/2.
        y, wy = roots_jacobi(k, 0.0, beta_re)
        return 0.5 * (y + 1.0), wy / 2.0 ** (beta_re + 1.0)
    return x, _moment_weights(complex(beta_re, beta_im), k)


def power_rule(beta: complex, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule for ``int_0^1 x**beta g(x) dx`` with g smooth.

    Real ``beta`` gives a true Gauss-Jacobi rule (exact for polynomials of
    degree < 2k).  Complex ``beta`` uses modified moments on Legendre nodes
    (exact for degree < k), since no positive weight exists.
    """
    beta = complex(beta)
    if beta.real <= -1.0:
        raise ValueError(f"endpoint exponent {beta} is not integrable")
    return _power_rule_cached(beta.real, beta.imag, int(k))


def composite_rule(a: float, b: float, npanels: int, k: int = PANEL_NODES):
    """Composite Gauss-Legendre rule with ``npanels`` equal panels."""
    x, w = gauss_legendre_unit(k)
    edges = np.linspace(a, b, npanels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def endpoint_singular_rule(beta: complex, length: float, npanels: int,
                           jacobi_nodes: int, k: int = PANEL_NODES):
    """Rule for ``int_0^L u**beta G(u) du`` on ``npanels`` equal panels.

    The returned weights already contain ``u**beta``; apply them to ``G``.
    The first panel uses :func:`power_rule`, the rest plain Gauss-Legendre.
    """
    beta = complex(beta)
    h = length / npanels
    x0, w0 = power_rule(beta, jacobi_nodes)
    nodes0 = h * x0
    weights0 = w0 * h ** (beta + 1.0)
    if npanels == 1:
        return nodes0, weights0.astype(complex)
    nodes1, weights1 = composite_rule(h, length, npanels - 1, k)
    weights1 = weights1 * nodes1 ** beta
    return (np.concatenate([nodes0, nodes1]),
            np.concatenate([weights0.astype(complex), weights1.astype(complex)]))


def oscillation_panels(length: float, omega: float, base: int = 4) -> int:
    """Panel count so that each panel spans at most a quarter period pi/(4|omega|)."""
    omega = abs(float(omega))
    if omega == 0.0 or length == 0.0:
        return base
    return max(base, int(math.ceil(length * 4.0 * omega / math.pi)))


def adaptive(evaluate, npanels: int, cfg: QuadratureConfig, what: str = "integral"):
    """Double the panel count until two successive estimates agree.

    ``evaluate(npanels)`` returns ``(value, l1)`` where ``l1`` is the integral of
    the absolute integrand (used as the roundoff floor).  Values may be arrays;
    convergence is required componentwise.
    """
    if npanels > cfg.max_panels:
        value, _ = evaluate(cfg.max_panels)
        raise QuadratureError(
            f"{what}: {npanels} panels needed, budget is {cfg.max_panels}",
            estimate=value)
    prev, _ = evaluate(npanels)
    while True:
        npanels *= 2
        if npanels > cfg.max_panels:
            raise QuadratureError(
                f"{what}: no convergence within {cfg.max_panels} panels",
                estimate=prev)
        cur, l1 = evaluate(npanels)
        err = np.abs(np.asarray(cur) - np.asarray(prev))
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(cur))
        tol = np.maximum(tol, 256 * np.finfo(float).eps * np.asarray(l1))
        if np.all(err <= tol):
            return cur
        prev = cur
