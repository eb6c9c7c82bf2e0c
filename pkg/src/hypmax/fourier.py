"""Radial Fourier analysis on H^n.

Conventions: the c-function is normalised so that c(-i(n-1)/2) = 1 and the
forward radial transform is

    F f(lam) = omega_{n-1} int_0^inf f(r) phi_lam(r) sinh(r)^{n-1} dr .

With these conventions the inverse carries the constant
``2^{n-2} / (pi omega_{n-1})``:

    f(r) = 2^{n-2}/(pi omega_{n-1}) int_0^inf F f(lam) phi_lam(r) |c(lam)|^{-2} dlam .

The transforms are evaluated through the Abel factorisation: both
``phi_lam(r)`` and ``F f`` reduce to cosine transforms of integrals against
``(cosh r - cosh y)^{(n-3)/2}``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.interpolate import CubicSpline

from ._quadrature import (DEFAULT_CONFIG, PANEL_NODES, QuadratureConfig,
                          adaptive, composite_rule, endpoint_singular_rule,
                          gauss_legendre_unit, oscillation_panels, power_rule)
from .errors import DomainError, TailBoundError
from .geometry import (Dimension, PointLike, as_dimension, exp_at, rho,
                       sphere_area, sphere_rule)
from .special import ComplexOrder, log_gamma

ABEL_JACOBI_NODES = 24


def _c_log_constant(n: int) -> float:
    return (n - 2) * math.log(2.0) + math.lgamma(n / 2.0) - 0.5 * math.log(math.pi)


def c_alpha(lam, alpha: ComplexOrder):
    """Generalised c-function Gamma(i lam)/Gamma((n-1)/2 + alpha + i lam), normalised."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam == 0.0):
        raise DomainError("c-function has a pole at lambda = 0")
    n = alpha.dim
    z = 1j * lam
    out = np.exp(_c_log_constant(n) + log_gamma(z)
                 - log_gamma((n - 1) / 2.0 + alpha.alpha + z))
    return complex(out) if out.ndim == 0 else out


def harish_chandra_c(lam, n):
    return c_alpha(lam, ComplexOrder(0.0, n))


def _log_abs_gamma_sq(rho_: float, lam):
    return 2.0 * np.real(log_gamma(rho_ + 1j * np.asarray(lam, dtype=float)))


def plancherel_density(lam, n):
    """|c(lam)|^{-2}, evaluated without forming Gamma(i lam).

    Uses |Gamma(i lam)|^2 = pi / (lam sinh(pi lam)), so the value is smooth and
    vanishes at lam = 0.
    """
    dim = as_dimension(n)
    lam = np.abs(np.asarray(lam, dtype=float))
    out = np.zeros_like(lam)
    pos = lam > 0
    x = math.pi * lam[pos]
    log_sinh = x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)
    out[pos] = np.exp(_log_abs_gamma_sq(dim.rho, lam[pos]) + np.log(lam[pos])
                      + log_sinh - math.log(math.pi)
                      - 2.0 * _c_log_constant(dim.n))
    return float(out) if out.ndim == 0 else out


def inversion_constant(n) -> float:
    """Constant in front of the inverse radial transform."""
    dim = as_dimension(n)
    return 2.0 ** (dim.n - 2) / (math.pi * dim.omega)


def _phi_normaliser(n: int) -> float:
    return math.exp(math.lgamma(n / 2.0) - 0.5 * math.log(math.pi)
                    - math.lgamma((n - 1) / 2.0))


def _spherical_function_complex(lam, r: float, n, q: QuadratureConfig,
                                verify: bool = True):
    # Integral over s in [0, pi] of (cosh r - sinh r cos s)^{-(n-1)/2 + i lam}
    # sin(s)^{n-2}.  Panels are placed at equal steps of y = log(cosh r - sinh r
    # cos s), which keeps the phase lam*y resolved even when r is large and
    # the integrand concentrates near s = 0; Gauss nodes are placed in s.
    dim = as_dimension(n)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if r < 0:
        raise DomainError("radius must be nonnegative")
    if r == 0.0:
        return np.ones(lam.shape, dtype=complex)
    sh, ch = math.sinh(r), math.cosh(r)
    lam_max = float(np.max(np.abs(lam)))
    xg, wg = gauss_legendre_unit(PANEL_NODES)

    def s_of_y(y):
        c = np.clip((ch - np.exp(y)) / sh, -1.0, 1.0)
        return np.arccos(c)

    def evaluate(npanels):
        edges = s_of_y(np.linspace(-r, r, npanels + 1))
        # arccos(1 - ulp) is ~1e-8, not 0: pin the ends exactly
        edges[0], edges[-1] = 0.0, math.pi
        h = np.diff(edges)
        s = (edges[:-1, None] + h[:, None] * xg).ravel()
        w = (h[:, None] * wg).ravel()
        x = math.exp(-r) + 2.0 * sh * np.sin(0.5 * s) ** 2
        logx = np.log(x)
        amp = w * np.exp(-dim.rho * logx) * np.sin(s) ** (dim.n - 2)
        val = np.exp(1j * np.multiply.outer(lam, logx)) @ amp
        return _phi_normaliser(dim.n) * val, _phi_normaliser(dim.n) * np.sum(np.abs(amp))

    npanels = max(oscillation_panels(2 * r, lam_max), int(math.ceil(8 * r)), 8)
    if verify:
        return adaptive(evaluate, npanels, q, what="spherical function")
    return evaluate(npanels)[0]


def spherical_function(lam, r: float, n, q: QuadratureConfig = DEFAULT_CONFIG):
    """phi_lam(r): the radial eigenfunction with phi_lam(0) = 1 (real, even in lam)."""
    val = _spherical_function_complex(lam, float(r), n, q)
    out = np.real(val)
    return float(out[0]) if np.ndim(lam) == 0 else out


def abel_spherical_function(lam, r: float, n, panels: int | None = None):
    """phi_lam(r) from its Abel (Mehler-type) form, used inside the transforms.

    phi_lam(r) = K sinh(r)^{2-n} 2^{(n-1)/2} int_0^r (cosh r - cosh y)^{(n-3)/2} cos(lam y) dy
    """
    dim = as_dimension(n)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if r == 0.0:
        return np.ones(lam.shape)
    gam = (dim.n - 3) / 2.0
    if panels is None:
        panels = max(oscillation_panels(r, float(np.max(np.abs(lam)))),
                     int(math.ceil(4 * r)), 4)
    u, w = endpoint_singular_rule(gam, r, panels, ABEL_JACOBI_NODES)
    g = 2.0 * np.sinh(r - 0.5 * u) * np.sinh(0.5 * u) / u
    amp = np.real(w) * g ** gam
    integral = np.cos(np.multiply.outer(lam, r - u)) @ amp
    const = _phi_normaliser(dim.n) * 2.0 ** (gam + 1.0) * math.sinh(r) ** (2 - dim.n)
    return const * integral


@dataclass(frozen=True)
class RadialFunction:
    """Samples f(r) of a radial function on H^n; interpolated piecewise-cubically."""

    n: Dimension
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "n", as_dimension(self.n))
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        _check_grid(grid, "radial grid")
        if values.shape != grid.shape:
            raise DomainError("values and grid lengths differ")
        if not np.all(np.isfinite(values)):
            raise DomainError("radial function has non-finite samples")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, func: Callable, grid, n) -> "RadialFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(n, grid, np.asarray(func(grid), dtype=complex))

    @property
    def rmax(self) -> float:
        return float(self.grid[-1])

    def interpolant(self):
        return _spline(self.grid, self.values)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r >= self.grid[0]) & (r <= self.grid[-1])
        out = np.zeros(r.shape, dtype=complex)
        out[inside] = self.interpolant()(r[inside])
        return out

    def to_csv(self) -> str:
        return _to_csv("r", self.grid, self.values)

    @classmethod
    def from_csv(cls, text: str, n) -> "RadialFunction":
        grid, values = _from_csv(text)
        return cls(n, grid, values)


@dataclass(frozen=True)
class SpectralFunction:
    """Samples m(lam) of a radial multiplier on a nonnegative frequency grid."""

    n: Dimension
    lgrid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "n", as_dimension(self.n))
        lgrid = np.asarray(self.lgrid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        _check_grid(lgrid, "frequency grid")
        if values.shape != lgrid.shape:
            raise DomainError("values and grid lengths differ")
        object.__setattr__(self, "lgrid", lgrid)
        object.__setattr__(self, "values", values)

    def __call__(self, lam):
        return _spline(self.lgrid, self.values)(np.asarray(lam, dtype=float))

    def to_csv(self) -> str:
        return _to_csv("lambda", self.lgrid, self.values)

    @classmethod
    def from_csv(cls, text: str, n) -> "SpectralFunction":
        grid, values = _from_csv(text)
        return cls(n, grid, values)


def _check_grid(grid, what):
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError(f"{what} needs at least two points")
    if np.any(np.diff(grid) <= 0):
        raise DomainError(f"{what} must be strictly increasing")
    if grid[0] < 0:
        raise DomainError(f"{what} must be nonnegative")


def _spline(grid, values):
    # even functions of r (and of lam): zero slope at the origin
    if grid[0] == 0.0 and grid.size >= 3:
        return CubicSpline(grid, values, bc_type=((1, 0.0), "not-a-knot"))
    return CubicSpline(grid, values)


def _to_csv(xname, grid, values) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([xname, "value_re", "value_im"])
    for x, v in zip(grid, values):
        writer.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def _from_csv(text: str):
    rows = [row for row in csv.reader(io.StringIO(text))
            if row and not row[0].startswith("#")]
    data = np.array([[float(x) for x in row] for row in rows[1:]])
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


@dataclass(frozen=True)
class RadialProfile:
    """A radial function given by a vectorised callable of r, zero beyond ``rmax``."""

    func: Callable
    n: Dimension
    rmax: float

    def __post_init__(self):
        object.__setattr__(self, "n", as_dimension(self.n))
        if not self.rmax > 0:
            raise DomainError("support radius must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.rmax, np.asarray(self.func(np.minimum(r, self.rmax)),
                                                   dtype=complex), 0.0)

    def sample(self, grid) -> RadialFunction:
        return RadialFunction.from_callable(self, grid, self.n)


RadialInput = Union[RadialFunction, RadialProfile]


def _radial_args(f, n, rmax):
    if isinstance(f, (RadialFunction, RadialProfile)):
        return f, f.n, f.rmax if rmax is None else rmax
    if n is None or rmax is None:
        raise DomainError("a bare callable needs n and rmax")
    return f, as_dimension(n), rmax


ABEL_GRADING = 12
ABEL_PANEL_NODES = 10


def abel_transform(f: RadialInput, y, n=None, rmax: float | None = None,
                   panels: int = 48):
    """A f(y) = int_{|y|}^{R} f(r) (cosh r - cosh y)^{(n-3)/2} sinh r dr.

    Computed in w = cosh r - cosh y, where the weight is exactly w^{(n-3)/2}.
    Panel edges are equal steps in r, and the first r-panel is subdivided
    geometrically towards w = 0 so that no Gauss panel sits next to the
    endpoint singularity.  f is assumed even in r (true for smooth radial f).
    """
    f, dim, rmax = _radial_args(f, n, rmax)
    gam = (dim.n - 3) / 2.0
    y = np.abs(np.atleast_1d(np.asarray(y, dtype=float)))
    out = np.zeros(y.shape, dtype=complex)
    inside = y < rmax
    if not np.any(inside):
        return out
    yy = y[inside][:, None]
    x0, w0 = power_rule(gam, ABEL_JACOBI_NODES)
    xg, wg = gauss_legendre_unit(ABEL_PANEL_NODES)
    # cosh(y + s) - cosh(y) = 2 sinh(y + s/2) sinh(s/2), no cancellation
    s = (rmax - yy) * np.linspace(0.0, 1.0, panels + 1)[None, 1:]
    w_edges = 2.0 * np.sinh(yy + 0.5 * s) * np.sinh(0.5 * s)
    grade = w_edges[:, :1] * 0.5 ** np.arange(ABEL_GRADING, 0, -1)[None, :]
    edges = np.concatenate([grade, w_edges], axis=1)
    half = np.sinh(0.5 * yy) ** 2  # (cosh y - 1)/2

    h0 = edges[:, :1]
    r0 = 2.0 * np.arcsinh(np.sqrt(half + 0.5 * h0 * x0))
    part0 = h0[:, 0] ** (gam + 1.0) * (_eval_radial(f, r0) @ np.real(w0))
    lo, hi = edges[:, :-1], edges[:, 1:]
    hw = hi - lo
    w = lo[..., None] + hw[..., None] * xg
    fw = _eval_radial(f, 2.0 * np.arcsinh(np.sqrt(half[..., None] + 0.5 * w)))
    part1 = np.sum(fw * hw[..., None] * wg * w ** gam, axis=(1, 2))
    out[inside] = part0 + part1
    return out


def _eval_radial(f, r):
    return np.asarray(f(r), dtype=complex)


def radial_fourier(f: RadialInput, lgrid, n=None, rmax: float | None = None,
                   q: QuadratureConfig = DEFAULT_CONFIG) -> SpectralFunction:
    """F f(lam) = omega_{n-1} int f(r) phi_lam(r) sinh(r)^{n-1} dr on ``lgrid``.

    ``f`` is a :class:`RadialFunction` (taken as zero beyond its grid) or a
    callable together with ``rmax``.
    """
    f, dim, rmax = _radial_args(f, n, rmax)
    lgrid = np.asarray(lgrid, dtype=float)
    lam_max = float(np.max(np.abs(lgrid))) if lgrid.size else 0.0
    npanels = max(oscillation_panels(rmax, lam_max), int(math.ceil(8 * rmax)), 8)
    y, w = composite_rule(0.0, rmax, npanels)
    a = abel_transform(f, y, dim, rmax=rmax)
    gam = (dim.n - 3) / 2.0
    const = dim.omega * _phi_normaliser(dim.n) * 2.0 ** (gam + 1.0)
    values = const * (np.cos(np.multiply.outer(lgrid, y)) @ (w * a))
    return SpectralFunction(dim, lgrid, values) if lgrid.ndim == 1 and lgrid.size >= 2 \
        else values


def spectral_rule(lmax: float, rmax: float):
    """Gauss-Legendre nodes on [0, lmax] resolving cos(lam r) for r <= rmax."""
    npanels = max(oscillation_panels(lmax, rmax), int(math.ceil(lmax / 2.0)), 8)
    return composite_rule(0.0, lmax, npanels)


def radial_inverse_fourier(m, rgrid, n=None, lmax: float | None = None,
                           damping: float | None = None,
                           tail_tol: float = 1e-8,
                           oscillation: float = 0.0) -> RadialFunction:
    """K(r) = 2^{n-2}/(pi omega) int_0^lmax m(lam) phi_lam(r) |c(lam)|^{-2} dlam.

    ``m`` is a :class:`SpectralFunction` (integrated up to its last grid point)
    or a vectorised callable with explicit ``lmax``.  ``damping``, if given,
    multiplies the integrand by exp(-(lam/damping)^2).  The tail check
    requires the integrand envelope |m| |c|^{-2} at ``lmax`` to be below
    ``tail_tol`` times its peak; violating it raises :class:`TailBoundError`.
    """
    if isinstance(m, SpectralFunction):
        dim = m.n
        lmax = float(m.lgrid[-1]) if lmax is None else lmax
        mfun = m
    else:
        if n is None or lmax is None:
            raise DomainError("callable multiplier needs n and lmax")
        dim = as_dimension(n)
        mfun = m
    rgrid = np.asarray(rgrid, dtype=float)
    lam, w = spectral_rule(lmax, float(np.max(rgrid)) + oscillation)
    mv = np.asarray(mfun(lam), dtype=complex)
    if damping is not None:
        mv = mv * np.exp(-(lam / damping) ** 2)
    dens = plancherel_density(lam, dim)
    envelope = np.abs(mv) * dens
    tail = envelope[-PANEL_NODES:].max()
    if tail > tail_tol * envelope.max():
        raise TailBoundError(
            f"spectral tail {tail:.3e} exceeds {tail_tol:.1e} x peak {envelope.max():.3e} "
            f"at lmax = {lmax}")
    weights = w * mv * dens
    values = _abel_inverse(lam, weights, rgrid, dim)
    return RadialFunction(dim, rgrid, inversion_constant(dim) * values)


def _abel_inverse(lam, weights, rgrid, dim: Dimension):
    # sum_j weights_j phi_{lam_j}(r) for every r in rgrid.  With
    # G(y) = sum_j weights_j cos(lam_j y) this is
    #   K sinh(r)^{2-n} 2^{gam+1} int_0^r (cosh r - cosh y)^gam G(y) dy .
    # G is tabulated once on Gauss panels whose edges include every r; the
    # panel ending at r is replaced by a product rule for (r - y)^gam.
    gam = (dim.n - 3) / 2.0
    lmax = float(np.max(np.abs(lam)))
    hmax = min(0.25, math.pi / (4.0 * lmax)) if lmax > 0 else 0.25
    rs = np.unique(rgrid[rgrid > 0])
    out = np.empty(rgrid.shape, dtype=complex)
    out[rgrid == 0] = np.sum(weights)
    if rs.size == 0:
        return out
    breaks = np.concatenate([[0.0], rs])
    edges = [0.0]
    for a, b in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(math.ceil((b - a) / hmax)))
        edges.extend(np.linspace(a, b, k + 1)[1:])
    edges = np.asarray(edges)
    xg, wg = gauss_legendre_unit(PANEL_NODES)
    h = np.diff(edges)
    y = (edges[:-1, None] + h[:, None] * xg).reshape(-1)
    wy = (h[:, None] * wg).reshape(-1)
    G = np.empty(y.shape, dtype=complex)
    for start in range(0, y.size, 2048):
        G[start:start + 2048] = np.cos(np.multiply.outer(y[start:start + 2048], lam)) @ weights
    x0, w0 = power_rule(gam, ABEL_JACOBI_NODES)
    w0 = np.real(w0)
    const = _phi_normaliser(dim.n) * 2.0 ** (gam + 1.0)
    edge_index = {float(e): i for i, e in enumerate(edges)}
    vals = {}
    for r in rs:
        i = edge_index[float(r)]
        npan = i - 1  # panels strictly before the last one ending at r
        yy, ww = y[:npan * PANEL_NODES], wy[:npan * PANEL_NODES]
        body = np.sum(ww * (2.0 * np.sinh(0.5 * (r + yy)) * np.sinh(0.5 * (r - yy))) ** gam
                      * G[:npan * PANEL_NODES])
        hl = r - edges[i - 1]
        u = hl * x0
        g = 2.0 * np.sinh(r - 0.5 * u) * np.sinh(0.5 * u) / u
        Gu = np.cos(np.multiply.outer(r - u, lam)) @ weights
        last = hl ** (gam + 1.0) * np.sum(w0 * g ** gam * Gu)
        vals[float(r)] = const * math.sinh(r) ** (2 - dim.n) * (body + last)
    pos = rgrid > 0
    out[pos] = [vals[float(r)] for r in rgrid[pos]]
    return out


def spectral_cutoff(f: RadialInput, n=None, rmax: float | None = None,
                    tail_tol: float = 1e-10, probe_max: float = 200.0,
                    step: float = 1.0, window: int = 8) -> float:
    """Frequency beyond which |F f| |c|^{-2} has dropped below tail_tol x peak.

    The spectrum is probed on a grid of spacing ``step``; the cutoff is the
    first probe past the peak after which ``window`` consecutive probes are
    all small.  Roundoff keeps the computed spectrum from decaying forever, so
    "stays small" is only checked over that window.
    """
    probe = np.arange(0.0, probe_max + step, step)
    spec = radial_fourier(f, probe, n=n, rmax=rmax)
    env = np.abs(spec.values) * plancherel_density(probe, spec.n)
    small = env <= tail_tol * env.max()
    start = int(np.argmax(env))
    for i in range(start, probe.size - window):
        if np.all(small[i:i + window]):
            return float(probe[i])
    raise TailBoundError("spectrum does not decay within the probe range")


def radial_convolution(f, K: RadialFunction, z: PointLike,
                       q: QuadratureConfig = QuadratureConfig(rel_tol=1e-7, abs_tol=1e-12),
                       angular_nodes: int = 24) -> complex:
    """(f * K)(z) = int f(w) K(d(z, w)) dw with K radial.

    ``f`` is either a :class:`RadialFunction` (radial about the origin) or a
    callable taking ambient coordinates with shape (..., n+1).
    """
    dim = K.n
    z_arr = z.array if hasattr(z, "array") else np.asarray(z, dtype=float)
    A = angular_average(f, z_arr, dim, angular_nodes)
    smax = K.rmax
    kfun = K.interpolant()

    def evaluate(npanels):
        s, w = composite_rule(K.grid[0], smax, npanels)
        integrand = kfun(s) * np.sinh(s) ** (dim.n - 1) * A(s)
        return np.sum(w * integrand), np.sum(np.abs(w * integrand))

    return complex(adaptive(evaluate, max(int(math.ceil(8 * smax)), 8), q,
                            what="radial convolution"))


def angular_average(f, z_arr: np.ndarray, dim: Dimension, nodes: int = 24):
    """s -> integral of f over the geodesic sphere of radius s about z (area measure of S^{n-1}).

    For radial f the sphere integral reduces to one polar angle through
    cosh rho(w) = cosh rho(z) cosh s - sinh rho(z) sinh s cos theta.
    """
    n = dim.n
    if isinstance(f, (RadialFunction, RadialProfile)):
        R = float(rho(z_arr))
        th, wth = _gl(nodes, 0.0, math.pi)
        wth = wth * np.sin(th) ** (n - 2) * sphere_area(n - 2)
        cth = np.cos(th)

        def A(s):
            s = np.asarray(s, dtype=float)
            arg = (math.cosh(R) * np.cosh(s)[..., None]
                   - math.sinh(R) * np.sinh(s)[..., None] * cth)
            r = np.arccosh(np.maximum(arg, 1.0))
            return f(r) @ wth
        return A

    pts, wts = sphere_rule(n, nodes)

    def A(s):
        s = np.asarray(s, dtype=float)
        w = exp_at(z_arr, s, pts)
        return np.asarray(f(w), dtype=complex) @ wts
    return A


def _gl(k, a, b):
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w
