"""Numerical checks of the multiplier and c-function asymptotics.

Constants are never asserted as universal: each bound is calibrated on a
sub-grid and then evaluated on held-out points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

import mpmath
import numpy as np

from .errors import DomainError
from .fourier import c_alpha, plancherel_density
from .maximal import MeanOperatorSpec, multiplier_m_alpha_t
from .special import ComplexOrder, hypergeometric_2f1

HYP_ARG_LIMIT = 0.45


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    max_residual: float  # log10 units
    npoints: int

    def __post_init__(self):
        if self.npoints < 3:
            raise DomainError("an exponent fit needs at least three points")


@dataclass(frozen=True)
class BoundReport:
    calibrated_constant: float
    worst_ratio: float
    worst_location: tuple

    def __post_init__(self):
        if self.worst_ratio < 0:
            raise DomainError("ratios are nonnegative")


def fit_loglog(x, y, xlog=np.log, ylog=np.log) -> ExponentFit:
    """Least-squares line through (xlog(x), ylog(y)); residuals in log10 units."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise DomainError("an exponent fit needs at least three points")
    if np.any(y <= 0):
        raise DomainError("log fit needs positive values")
    X, Y = xlog(x), ylog(y)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    # ylog(10) converts a residual in the ylog base to decades
    max_res = float(np.max(np.abs(resid)) / ylog(10.0))
    return ExponentFit(float(slope), float(intercept), max_res, int(x.size))


def check_plancherel_density(n, lgrid) -> bool:
    """|c(lam)|^{-2} is even in lam and nonnegative on the grid."""
    lam = np.asarray(lgrid, dtype=float)
    d_plus, d_minus = plancherel_density(lam, n), plancherel_density(-lam, n)
    return bool(np.all(d_plus >= 0) and np.array_equal(d_plus, d_minus))


def check_uniform_bound(alpha: ComplexOrder, lgrid, tgrid) -> BoundReport:
    """Calibrate C in |m^alpha_t(lam)| <= C (1+t) e^{-(n-1)t/2}, then hold out.

    The calibration sub-grid is every other point of each grid; the report's
    worst ratio is the maximum over all points, so held-out points count.
    """
    lgrid = np.asarray(lgrid, dtype=float)
    tgrid = np.asarray(tgrid, dtype=float)
    if lgrid.size == 0 or tgrid.size == 0:
        raise DomainError("grids must be nonempty")
    n = alpha.dim
    ratios = np.empty((tgrid.size, lgrid.size))
    for i, t in enumerate(tgrid):
        m = multiplier_m_alpha_t(lgrid, MeanOperatorSpec(alpha, t))
        ratios[i] = np.abs(m) / ((1.0 + t) * math.exp(-(n - 1) * t / 2.0))
    calib = float(ratios[::2, ::2].max())
    k = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    return BoundReport(calib, float(ratios[k]),
                       (float(lgrid[k[1]]), float(tgrid[k[0]])))


def sliding_envelope(lam, values, width: float):
    """Maxima of |values| over consecutive lam-windows of the given width."""
    lam = np.asarray(lam, dtype=float)
    mag = np.abs(np.asarray(values))
    edges = np.arange(lam[0], lam[-1] + width, width)
    where = np.searchsorted(edges, lam, side="right") - 1
    env_l, env_v = [], []
    for b in range(edges.size - 1):
        sel = np.nonzero(where == b)[0]
        # only complete windows: a partial window can miss the peak
        if sel.size == 0 or lam[sel[-1]] < edges[b + 1] - 2 * (lam[1] - lam[0]):
            continue
        j = sel[np.argmax(mag[sel])]
        env_l.append(lam[j])
        env_v.append(mag[j])
    return np.asarray(env_l), np.asarray(env_v)


def check_oscillatory_decay(alpha: ComplexOrder, t: float, lrange,
                            samples_per_period: int = 32,
                            scale: complex = 1.0) -> ExponentFit:
    """Decay exponent of the envelope of m^alpha_t(lam) over ``lrange``.

    The envelope is the maximum over sliding windows of one period 2 pi / t.
    """
    lo, hi = map(float, lrange)
    if t > math.pi:
        raise DomainError("oscillatory regime requires t <= pi")
    if lo * t < 1.0:
        raise DomainError("oscillatory regime requires lam t >= 1")
    period = 2.0 * math.pi / t
    count = int(math.ceil((hi - lo) / period * samples_per_period)) + 1
    lam = np.linspace(lo, hi, count)
    m = scale * multiplier_m_alpha_t(lam, MeanOperatorSpec(alpha, t))
    env_l, env_v = sliding_envelope(lam, m, period)
    return fit_loglog(env_l, env_v)


def a2_coefficient(alpha: ComplexOrder, lam: float, t: float,
                   n_terms: int | None = None) -> complex:
    """a^alpha_2(lam, t), the large-t amplitude multiplying e^{i lam t} c^alpha(lam).

    Built from the hypergeometric connection formula for the Legendre
    function; ``n_terms`` truncates the Gauss series (None: to convergence).
    """
    n, a = alpha.dim, alpha.alpha
    nu = -1.0 / math.expm1(2.0 * t)
    if abs(nu) >= HYP_ARG_LIMIT:
        raise DomainError(f"hypergeometric argument |{nu:.3f}| too large; need larger t")
    A, B, C = -a - (n - 3) / 2.0, a + (n - 1) / 2.0, 1.0 - 1j * lam
    if n_terms is None:
        F = hypergeometric_2f1(A, B, C, nu)
    else:
        F, term = 0.0, 1.0 + 0j
        for k in range(int(n_terms)):
            F += term
            term = term * (A + k) * (B + k) / ((C + k) * (k + 1)) * nu
    log_pref = (((n - 2) / 2 + a) * math.log(2.0) + math.lgamma(n / 2) + a * t
                - 2 * a * math.log(math.expm1(t))
                + (a - (n - 2) / 2 - 0.5) * math.log(math.sinh(t))
                + (n - 1) * t / 2.0
                - 0.5 * math.log(2.0) - (n - 2) * math.log(2.0) - math.lgamma(n / 2))
    return cmath.exp(log_pref) * F


def large_t_reconstruction(alpha: ComplexOrder, lam: float, t: float,
                           n_terms: int | None = None):
    """(reconstructed m, direct m, scale) for the large-t expansion."""
    n = alpha.dim
    damp = math.exp(-(n - 1) * t / 2.0)
    plus = cmath.exp(1j * lam * t) * c_alpha(lam, alpha) * a2_coefficient(alpha, lam, t, n_terms)
    minus = cmath.exp(-1j * lam * t) * c_alpha(-lam, alpha) * a2_coefficient(alpha, -lam, t, n_terms)
    recon = damp * (plus + minus)
    direct = multiplier_m_alpha_t(lam, MeanOperatorSpec(alpha, t))
    return recon, direct, damp * (abs(plus) + abs(minus))


def check_large_t_reconstruction(alpha: ComplexOrder, lam: float, t: float,
                                 n_terms: int | None = None) -> float:
    """Relative error of the large-t expansion against the multiplier.

    The error is measured relative to the size of the two oscillating terms,
    which bounds |m| and does not vanish at the zeros of m.
    """
    if t <= math.log(2.0) / 2.0:
        raise DomainError("need t > log(2)/2")
    recon, direct, scale = large_t_reconstruction(alpha, lam, t, n_terms)
    return float(abs(recon - direct) / scale)


def _lambda_c_mp(x: float, alpha: ComplexOrder, dps: int):
    with mpmath.workdps(dps):
        n = alpha.dim
        z = mpmath.mpc(0, x)
        log_c = ((n - 2) * mpmath.log(2) + mpmath.loggamma(mpmath.mpf(n) / 2)
                 - mpmath.log(mpmath.pi) / 2 + mpmath.loggamma(z)
                 - mpmath.loggamma(mpmath.mpf(n - 1) / 2 + mpmath.mpc(alpha.alpha) + z))
        return x * mpmath.exp(log_c)


def lambda_c_difference(alpha: ComplexOrder, k: int, lam, h: float = 1e-3):
    """k-th central difference (k = 0, 1, 2) of lam c^alpha(lam) with step h.

    The stencil is evaluated with 40 significant digits: in double precision
    the absolute error of log Gamma near i lam, divided by h^2, is larger than
    the second difference itself once lam is in the hundreds.
    """
    if k not in (0, 1, 2):
        raise DomainError("k must be 0, 1 or 2")
    lam = np.asarray(lam, dtype=float)
    if k == 0:
        return lam * c_alpha(lam, alpha)
    dps, out = 40, np.empty(lam.shape, dtype=complex)
    for idx, x in np.ndenumerate(lam):
        with mpmath.workdps(dps):
            hh = mpmath.mpf(h)
            gp = _lambda_c_mp(float(x) + h, alpha, dps)
            gm = _lambda_c_mp(float(x) - h, alpha, dps)
            if k == 1:
                d = (gp - gm) / (2 * hh)
            else:
                d = (gp - 2 * _lambda_c_mp(float(x), alpha, dps) + gm) / hh ** 2
            out[idx] = complex(d)
    return out if out.ndim else complex(out)


def check_c_alpha_decay(alpha: ComplexOrder, k: int, lrange,
                        npoints: int = 40) -> ExponentFit:
    lo, hi = map(float, lrange)
    if lo < 1.0:
        raise DomainError("lambda values must be >= 1")
    lam = np.geomspace(lo, hi, npoints)
    return fit_loglog(lam, np.abs(lambda_c_difference(alpha, k, lam)))


def fit_report(claim: str, parameters: dict, expected: float, fit: ExponentFit,
               tol: float, residual_tol: float = 0.15) -> dict:
    ok = abs(fit.slope - expected) <= tol and fit.max_residual <= residual_tol
    return {"claim": claim, "parameters": parameters, "expected_slope": expected,
            "fitted_slope": fit.slope, "residual": fit.max_residual, "pass": bool(ok),
            "fit": asdict(fit)}
