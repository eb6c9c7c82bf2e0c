"""Complex special functions used by the multiplier and its asymptotics.

The Legendre function here is only ever needed on the conical line
``nu = -1/2 + i lambda`` and for arguments ``cosh t > 1``; it is computed
from the Mehler-Dirichlet cosine integral

    P^{-mu}_{-1/2+i lam}(cosh t)
        = sqrt(2/pi) sinh(t)^{-mu} / Gamma(mu + 1/2)
          * int_0^t (cosh t - cosh s)^{mu - 1/2} cos(lam s) ds .
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _sc_gamma
from scipy.special import loggamma as _sc_loggamma

from ._quadrature import (DEFAULT_CONFIG, QuadratureConfig, adaptive,
                          endpoint_singular_rule, oscillation_panels)
from .errors import DomainError
from .geometry import Dimension, as_dimension

__all__ = [
    "ComplexOrder", "QuadratureConfig", "DEFAULT_CONFIG", "complex_gamma",
    "log_gamma", "pochhammer", "hypergeometric_2f1", "legendre_p",
    "oscillatory_j",
]

ORDER_MARGIN = 1e-6


@dataclass(frozen=True)
class ComplexOrder:
    """Order alpha of the fractional spherical mean on H^n.

    Valid for ``Re alpha > (1 - n)/2`` (with a small safety margin).
    """

    alpha: complex
    n: Dimension

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "n", as_dimension(self.n))
        if self.alpha.real <= (1 - self.n.n) / 2 + ORDER_MARGIN:
            raise DomainError(
                f"Re alpha = {self.alpha.real} must exceed (1-n)/2 = {(1 - self.n.n) / 2}")

    @property
    def dim(self) -> int:
        return self.n.n

    @property
    def mu(self) -> complex:
        """Legendre order alpha + (n-2)/2 (the function used is P^{-mu})."""
        return self.alpha + (self.dim - 2) / 2

    @property
    def is_real(self) -> bool:
        return self.alpha.imag == 0.0

    def conjugate(self) -> "ComplexOrder":
        return ComplexOrder(self.alpha.conjugate(), self.n)


def _check_pole(z):
    z = np.asarray(z, dtype=complex)
    near = (np.abs(z.imag) < 1e-12) & (z.real < 0.5) & (
        np.abs(z.real - np.round(z.real)) < 1e-12)
    if np.any(near):
        raise DomainError(f"Gamma has a pole at {z[near].ravel()[0]}")


def complex_gamma(z):
    """Gamma function for complex arguments (scalar or array)."""
    _check_pole(z)
    out = _sc_gamma(np.asarray(z, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def log_gamma(z):
    """Principal branch of log Gamma; safe where Gamma itself under/overflows."""
    _check_pole(z)
    out = _sc_loggamma(np.asarray(z, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def pochhammer(zeta, k: int):
    """Rising factorial (zeta)_k = zeta (zeta+1) ... (zeta+k-1)."""
    if k < 0 or int(k) != k:
        raise DomainError("Pochhammer index must be a nonnegative integer")
    out = np.ones_like(np.asarray(zeta, dtype=complex))
    for l in range(int(k)):
        out = out * (zeta + l)
    return complex(out) if np.ndim(out) == 0 else out


HYP_MAX_TERMS = 2000


def hypergeometric_2f1(a, b, c, nu, tol: float = 1e-16):
    """Gauss series sum_k (a)_k (b)_k / ((c)_k k!) nu^k for |nu| < 1/2.

    ``c`` may be an array (the other parameters broadcast against it).  The
    sum stops once the current term is below ``tol`` times the partial sum;
    for |nu| < 1/2 the ratio of consecutive terms tends to |nu|, so the
    neglected tail is at most about the last term.
    """
    nu = complex(nu)
    if abs(nu) >= 0.5:
        raise DomainError(f"|nu| = {abs(nu):.3f} outside the series domain |nu| < 1/2")
    c_arr = np.asarray(c, dtype=complex)
    _check_pole(c_arr)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    term = np.ones(np.broadcast(a, b, c_arr).shape, dtype=complex)
    total = term.copy()
    for k in range(HYP_MAX_TERMS):
        term = term * (a + k) * (b + k) / ((c_arr + k) * (k + 1)) * nu
        total = total + term
        if np.all(np.abs(term) <= tol * np.maximum(np.abs(total), 1e-300)):
            break
    else:
        raise DomainError("hypergeometric series did not converge")
    return complex(total) if total.ndim == 0 else total


def _mehler_integral(beta: complex, lam: np.ndarray, t: float,
                     q: QuadratureConfig, verify: bool = True):
    # int_0^t (cosh t - cosh s)^beta cos(lam s) ds with u = t - s and
    # cosh t - cosh s = 2 sinh(t - u/2) sinh(u/2) = u * g(u), g smooth, > 0.
    lam = np.asarray(lam, dtype=float)
    lam_max = float(np.max(np.abs(lam))) if lam.size else 0.0

    def evaluate(npanels):
        u, w = endpoint_singular_rule(beta, t, npanels, q.jacobi_nodes)
        g = 2.0 * np.sinh(t - 0.5 * u) * np.sinh(0.5 * u) / u
        wg = w * np.exp(beta * np.log(g))
        s = t - u
        val = np.cos(np.multiply.outer(lam, s)) @ wg
        return val, np.sum(np.abs(wg))

    npanels = max(oscillation_panels(t, lam_max), int(math.ceil(2 * t)), 2)
    if verify:
        return adaptive(evaluate, npanels, q, what="Mehler-Dirichlet integral")
    return evaluate(npanels)[0]


def legendre_p(alpha: ComplexOrder, lam, t: float,
               q: QuadratureConfig = DEFAULT_CONFIG, verify: bool = True,
               chunk: int = 256):
    """P^{-alpha-(n-2)/2}_{-1/2+i lam}(cosh t), vectorised over ``lam``.

    Even in ``lam``.  ``verify=False`` skips the panel-doubling convergence
    check and uses the quarter-period panel rule directly.
    """
    if t <= 0:
        raise DomainError("legendre_p requires t > 0")
    mu = alpha.mu
    beta = mu - 0.5
    lam_arr = np.abs(np.atleast_1d(np.asarray(lam, dtype=float)))
    out = np.empty(lam_arr.shape, dtype=complex)
    flat_in, flat_out = lam_arr.ravel(), out.reshape(-1)
    # sort so each chunk gets a panel count matched to its own largest lam
    order = np.argsort(flat_in)
    for start in range(0, flat_in.size, chunk):
        idx = order[start:start + chunk]
        flat_out[idx] = _mehler_integral(beta, flat_in[idx], t, q, verify)
    pref = math.sqrt(2.0 / math.pi) * cmath.exp(
        -mu * math.log(math.sinh(t)) - log_gamma(mu + 0.5))
    out = pref * out
    return complex(out[0]) if np.ndim(lam) == 0 else out


def oscillatory_j(m, r: float, q: QuadratureConfig = DEFAULT_CONFIG):
    """J_m(r) = int_{-1}^{1} e^{i v r} (1 - v^2)^{m - 1/2} dv for Re m > -1/2."""
    m = complex(m)
    if m.real <= -0.5:
        raise DomainError("oscillatory_j requires Re m > -1/2")
    beta = m - 0.5
    r = float(r)

    def evaluate(npanels):
        # each half-interval with u = 1 -/+ v: (1-v^2) = u (2 - u)
        u, w = endpoint_singular_rule(beta, 1.0, npanels, q.jacobi_nodes)
        wg = w * np.exp(beta * np.log(2.0 - u))
        right = np.sum(wg * np.exp(1j * r * (1.0 - u)))
        left = np.sum(wg * np.exp(-1j * r * (1.0 - u)))
        return right + left, 2 * np.sum(np.abs(wg))

    return complex(adaptive(evaluate, max(oscillation_panels(1.0, r), 2), q,
                            what="oscillatory kernel J_m"))
