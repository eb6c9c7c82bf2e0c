"""Fractional spherical means M^alpha_t and the maximal function.

Two routes are provided.  The direct route integrates over the ball B_t(z)
with the kernel Gamma(alpha)^{-1} [e^t z - w]^{alpha-1}, using
[e^t z - w] = 2 e^t (cosh t - cosh d(z, w)).  The spectral route applies the
radial multiplier omega_{n-1} m^alpha_t(lam) on the Fourier side and is the
only one available once Re alpha <= 0.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import rgamma

from ._quadrature import (DEFAULT_CONFIG, QuadratureConfig, adaptive,
                          endpoint_singular_rule, composite_rule)
from .errors import DomainError
from .fourier import (RadialFunction, RadialInput, RadialProfile,
                      angular_average, plancherel_density, radial_fourier,
                      radial_inverse_fourier, spectral_cutoff)
from .geometry import HyperbolicPoint, PointLike, rho
from .special import ComplexOrder, legendre_p


@dataclass(frozen=True)
class MeanOperatorSpec:
    alpha: ComplexOrder
    t: float
    q: QuadratureConfig = DEFAULT_CONFIG

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t}")

    @property
    def n(self) -> int:
        return self.alpha.dim

    def log_prefactor(self) -> complex:
        """log of 2 e^t ((e^t-1)/sinh t)^{n-2} (e^t-1)^{-(2 alpha+n-2)}."""
        t, n, a = self.t, self.n, self.alpha.alpha
        lem = math.log(math.expm1(t))
        return (math.log(2.0) + t + (n - 2) * (lem - math.log(math.sinh(t)))
                - (2 * a + n - 2) * lem)


def multiplier_m_alpha_t(lam, spec: MeanOperatorSpec, verify: bool = True):
    """m^alpha_t(lam), the spectral symbol of M^alpha_t divided by omega_{n-1}.

    2^{(n-2)/2+alpha} Gamma(n/2) e^{alpha t} (e^t-1)^{-2alpha}
    (sinh t)^{alpha-(n-2)/2} P^{-alpha-(n-2)/2}_{-1/2+i lam}(cosh t)
    """
    t, n = spec.t, spec.n
    a = spec.alpha.alpha
    log_pref = ((n - 2) / 2 + a) * math.log(2.0) + math.lgamma(n / 2) + a * t \
        - 2 * a * math.log(math.expm1(t)) + (a - (n - 2) / 2) * math.log(math.sinh(t))
    return cmath.exp(log_pref) * legendre_p(spec.alpha, lam, t, spec.q, verify=verify)


def _as_array_point(z: PointLike) -> np.ndarray:
    return z.array if isinstance(z, HyperbolicPoint) else np.asarray(z, dtype=float)


def ball_integral(f, z: PointLike, spec: MeanOperatorSpec, s_max: float | None = None,
                  angular_nodes: int = 24):
    """Gamma(alpha)^{-1} int_{B} (2 e^t (cosh t - cosh d))^{alpha-1} f dw.

    Integrates over geodesic spheres about z, up to radius ``s_max`` (default t).
    With ``s_max < t`` the kernel is smooth and any alpha is admissible; this
    is how callers evaluate the continued mean for f supported inside the ball.
    """
    t, n, a = spec.t, spec.n, spec.alpha.alpha
    z_arr = _as_array_point(z)
    A = angular_average(f, z_arr, spec.alpha.n, angular_nodes)
    log2et = math.log(2.0) + t
    s_max = t if s_max is None else float(s_max)
    if s_max <= 0 or s_max > t:
        raise DomainError("s_max must lie in (0, t]")

    if s_max == t:
        beta = a - 1.0

        def evaluate(npanels):
            u, w = endpoint_singular_rule(beta, t, npanels, spec.q.jacobi_nodes)
            g = 2.0 * np.sinh(t - 0.5 * u) * np.sinh(0.5 * u) / u
            s = t - u
            vals = w * np.exp(beta * (np.log(g) + log2et)) * np.sinh(s) ** (n - 1) * A(s)
            return np.sum(vals), np.sum(np.abs(vals))
    else:
        def evaluate(npanels):
            s, w = composite_rule(0.0, s_max, npanels)
            d = 2.0 * np.sinh(0.5 * (t + s)) * np.sinh(0.5 * (t - s))
            vals = w * np.exp((a - 1.0) * (np.log(d) + log2et)) * np.sinh(s) ** (n - 1) * A(s)
            return np.sum(vals), np.sum(np.abs(vals))

    integral = adaptive(evaluate, max(8, int(math.ceil(8 * t))), spec.q,
                        what="ball integral")
    return complex(rgamma(a) * integral)


def spherical_mean_direct(f, z: PointLike, spec: MeanOperatorSpec,
                          angular_nodes: int = 24) -> complex:
    """M^alpha_t f(z) from the ball integral; requires Re alpha > 0.

    ``f`` is a radial input (RadialFunction/RadialProfile, radial about the
    origin) or a vectorised callable on ambient coordinates (..., n+1).
    """
    if spec.alpha.alpha.real <= 0:
        raise DomainError("direct route needs Re alpha > 0; use spherical_mean_spectral")
    integral = ball_integral(f, z, spec, angular_nodes=angular_nodes)
    return complex(cmath.exp(spec.log_prefactor()) * integral)


class _SpectralCache:
    """Per-function spectral data; single writer, many readers."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}

    def get(self, key, build):
        value = self._store.get(key)
        if value is not None:
            return value
        with self._lock:
            if key not in self._store:
                self._store[key] = build()
            return self._store[key]

    def clear(self):
        with self._lock:
            self._store.clear()


KERNEL_CACHE = _SpectralCache()


def _spectral_values(f: RadialInput, spec: MeanOperatorSpec, r_values,
                     lmax: float | None = None, tail_tol: float = 1e-8):
    if not isinstance(f, (RadialFunction, RadialProfile)):
        raise DomainError("spectral route needs a radial input")
    if lmax is None:
        lmax = spectral_cutoff(f, tail_tol=tail_tol)
    omega = f.n.omega

    def symbol(lam):
        return omega * multiplier_m_alpha_t(lam, spec) * radial_fourier(f, lam).values

    # the cutoff already certifies the tail of F f; m^alpha_t only helps
    g = radial_inverse_fourier(symbol, np.asarray(r_values, dtype=float), n=f.n,
                               lmax=lmax, tail_tol=np.inf,
                               oscillation=spec.t)
    return g.values


def spherical_mean_spectral(f: RadialInput, spec: MeanOperatorSpec, rgrid,
                            lmax: float | None = None) -> RadialFunction:
    """M^alpha_t f as a radial function, via the multiplier omega m^alpha_t(D).

    Valid for the whole range Re alpha > (1-n)/2.  ``f`` must be radial about
    the origin and compactly supported.
    """
    rgrid = np.asarray(rgrid, dtype=float)
    return RadialFunction(f.n, rgrid, _spectral_values(f, spec, rgrid, lmax))


def mean_kernel(spec: MeanOperatorSpec, rgrid, lmax: float,
                damping: float | None = None) -> RadialFunction:
    """K^alpha_t(r), the radial kernel of M^alpha_t, optionally window-damped.

    The undamped kernel is a distribution supported in [0, t]; truncating the
    spectral integral smears it, so a Gaussian window exp(-(lam/damping)^2)
    is usually wanted.  Results are cached per (alpha, t, grid, lmax, damping).
    """
    rgrid = np.asarray(rgrid, dtype=float)
    key = (spec.alpha.alpha, spec.n, spec.t, rgrid.tobytes(), float(lmax), damping)

    def build():
        omega = spec.alpha.n.omega
        return radial_inverse_fourier(
            lambda lam: omega * multiplier_m_alpha_t(lam, spec), rgrid,
            n=spec.n, lmax=lmax, damping=damping,
            tail_tol=np.inf if damping is None else 1e-8, oscillation=spec.t)
    return KERNEL_CACHE.get(key, build)


@dataclass(frozen=True)
class TGrid:
    """Strictly increasing positive t-values standing in for sup over t > 0."""

    values: np.ndarray
    factor: float = 1.05

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1 or v.size == 0:
            raise DomainError("TGrid needs at least one value")
        if np.any(v <= 0) or np.any(np.diff(v) <= 0):
            raise DomainError("TGrid values must be positive and strictly increasing")
        if not self.factor > 1:
            raise DomainError("refinement factor must exceed 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def geometric(cls, t_min: float = 0.05, gamma: float = 1.05,
                  t_max: float = 15.0) -> "TGrid":
        if not (0 < t_min < t_max and gamma > 1):
            raise DomainError("need 0 < t_min < t_max and gamma > 1")
        k = int(math.floor(math.log(t_max / t_min) / math.log(gamma) + 1e-12))
        return cls(t_min * gamma ** np.arange(k + 1), gamma)

    def refine(self) -> "TGrid":
        """Insert geometric midpoints; every old point is kept."""
        v = self.values
        if v.size == 1:
            return TGrid(v, math.sqrt(self.factor))
        mid = np.sqrt(v[:-1] * v[1:])
        out = np.empty(2 * v.size - 1)
        out[0::2], out[1::2] = v, mid
        return TGrid(out, math.sqrt(self.factor))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class MaximalResult:
    value: float
    t_at_max: float
    tgrid: TGrid
    means: np.ndarray = field(repr=False)

    def to_csv(self, z_r: float) -> str:
        return mean_rows_csv(self.tgrid.values, z_r, self.means)


def maximal_function(f, z: PointLike, alpha: ComplexOrder, tg: TGrid,
                     route: str = "auto", q: QuadratureConfig = DEFAULT_CONFIG,
                     lmax: float | None = None) -> MaximalResult:
    """max over the grid of |M^alpha_t f(z)|.

    ``route`` is "direct", "spectral" or "auto" (direct when Re alpha > 0).
    The spectral route needs a radial f and uses rho(z).
    """
    if route == "auto":
        route = "direct" if alpha.alpha.real > 0 else "spectral"
    if route not in ("direct", "spectral"):
        raise DomainError(f"unknown route {route!r}")
    means = np.empty(len(tg), dtype=complex)
    if route == "direct":
        for i, t in enumerate(tg.values):
            means[i] = spherical_mean_direct(f, z, MeanOperatorSpec(alpha, t, q))
    else:
        r = float(rho(_as_array_point(z)))
        if lmax is None:
            lmax = spectral_cutoff(f, tail_tol=1e-8)
        for i, t in enumerate(tg.values):
            # a radial grid needs two points; the second is discarded
            means[i] = _spectral_values(f, MeanOperatorSpec(alpha, t, q), [r, r + 0.5],
                                        lmax)[0]
    k = int(np.argmax(np.abs(means)))
    return MaximalResult(float(np.abs(means[k])), float(tg.values[k]), tg, means)


def _dyadic_band(j: int):
    if j < 0 or int(j) != j:
        raise DomainError("j must be a nonnegative integer")
    return (0.0, 2.0) if j == 0 else (2.0 ** (j - 1), 2.0 ** (j + 1))


def dyadic_multiplier_sup(j: int, spec: MeanOperatorSpec,
                          samples_per_period: int = 8) -> float:
    """sup of |m^alpha_t(lam)| over lam in [2^{j-1}, 2^{j+1}] ([0, 2] for j = 0).

    |m| oscillates with period about 2 pi / t in lam; the band is sampled at
    ``samples_per_period`` points per period and the best samples are refined
    with a bounded scalar search.
    """
    lo, hi = _dyadic_band(j)
    period = 2.0 * math.pi / spec.t
    count = max(64, int(math.ceil((hi - lo) / period * samples_per_period)) + 1)
    lam = np.linspace(lo, hi, count)
    vals = np.abs(multiplier_m_alpha_t(lam, spec))
    best = float(vals.max())
    step = lam[1] - lam[0]
    # refine around every local maximum that could beat the current best
    interior = np.nonzero((vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:]))[0] + 1
    candidates = set(interior.tolist()) | {0, count - 1}
    cutoff = 0.9 * best
    for i in sorted(candidates):
        if vals[i] < cutoff:
            continue
        a, b = max(lo, lam[i] - step), min(hi, lam[i] + step)
        res = minimize_scalar(lambda x: -abs(multiplier_m_alpha_t(x, spec)),
                              bounds=(a, b), method="bounded",
                              options={"xatol": 1e-10 * max(1.0, b)})
        best = max(best, -float(res.fun))
    return best


def mean_rows_csv(ts, z_r: float, values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "z_r", "value_re", "value_im"])
    for t, v in zip(np.atleast_1d(ts), np.atleast_1d(values)):
        w.writerow([repr(float(t)), repr(float(z_r)), repr(float(np.real(v))),
                    repr(float(np.imag(v)))])
    return buf.getvalue()


def dyadic_rows_csv(js, sups) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "sup"])
    for j, s in zip(js, sups):
        w.writerow([int(j), repr(float(s))])
    return buf.getvalue()
