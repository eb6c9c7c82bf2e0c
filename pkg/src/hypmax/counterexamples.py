"""Extremal test functions that bound the L^p range of the maximal operator.

Three families are built, each with the evaluation point z, the time t(z)
and the z-region used to get a lower bound for ||m^alpha f||_p / ||f||_p:

* F_DELTA: rho^{1-n-alpha} / (-log rho) on a thin cone at the origin,
  t = rho(z), z near the point at distance 1/2 on the first axis;
* G_J: the indicator of a slab R_j hugging the origin, t = rho(z) ~ 1;
* H_EPS: the indicator of the annulus |rho - 1 + 2 eps| < eps, t = 1,
  z within eps/100 of the origin.

In every case the support of f lies strictly inside B_t(z), so the mean is
the ball integral with a smooth kernel and any real alpha is admissible.
This is checked geometrically before any quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from ._quadrature import DEFAULT_CONFIG, QuadratureConfig, adaptive, composite_rule
from .asymptotics import ExponentFit, fit_loglog
from .errors import ConfigurationError, DomainError
from .fourier import RadialFunction, RadialProfile
from .geometry import (Dimension, as_dimension, exp_at, gauss_legendre,
                       sphere_area, sphere_rule)
from .maximal import MeanOperatorSpec, TGrid
from .special import ComplexOrder


class Family(enum.Enum):
    F_DELTA = "F_DELTA"
    G_J = "G_J"
    H_EPS = "H_EPS"


class FitScale(enum.Enum):
    LOG_PARAM = "LOG_PARAM"  # log ratio against log(1/param)
    LOG2_J = "LOG2_J"        # log2 ratio against j


@dataclass(frozen=True)
class CounterexampleSpec:
    family: Family
    param: float
    n: Dimension
    alpha: float
    p: float
    c1: float = 0.05
    c2: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "n", as_dimension(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not (1.0 < self.p < math.inf):
            raise DomainError("p must lie in (1, inf)")
        if not (self.c1 > 0 and self.c2 > 0):
            raise DomainError("c1 and c2 must be positive")
        fam, x = self.family, self.param
        if fam is Family.F_DELTA and not (0 < x <= 1 / 20):
            raise DomainError("delta must lie in (0, 1/20]")
        if fam is Family.G_J and not (int(x) == x and 3 <= x <= 14):
            raise DomainError("j must be an integer in [3, 14]")
        if fam is Family.H_EPS and not (0 < x <= 1 / 10):
            raise DomainError("eps must lie in (0, 1/10]")


@dataclass(frozen=True)
class RatioSample:
    param: float
    ratio_lower_bound: float
    fnorm: float

    def __post_init__(self):
        if not (self.param > 0 and self.ratio_lower_bound > 0 and self.fnorm > 0):
            raise DomainError("ratio samples must be positive")


def _kernel(t, cosh_d, alpha):
    # (2 e^t (cosh t - cosh d))^{alpha-1}; requires cosh d < cosh t
    gap = math.cosh(t) - cosh_d
    return np.exp((alpha - 1.0) * (math.log(2.0) + t + np.log(gap)))


def _mean_prefactor(n: Dimension, alpha: float, t: float) -> float:
    spec = MeanOperatorSpec(ComplexOrder(alpha, n), t)
    return float(np.real(np.exp(spec.log_prefactor()))) * float(rgamma(alpha))


def _ball_points(center, radius, n, k_r=6, k_ang=12):
    """Quadrature over the geodesic ball B_radius(center): ambient points and weights."""
    s, ws = gauss_legendre(k_r, 0.0, radius)
    dirs, wd = sphere_rule(n, k_ang)
    pts = exp_at(center, s, dirs)
    w = (ws * np.sinh(s) ** (n - 1))[:, None] * wd[None, :]
    return pts.reshape(-1, n + 1), w.ravel()


# --------------------------------------------------------------------- F_DELTA

@dataclass(frozen=True)
class FDelta:
    """rho^{1-n-alpha}/(-log rho) on (B_{1/2} minus B_delta) within a cone Gamma.

    Gamma has its vertex at the origin, axis e_1, and is tangent to the ball
    of radius 3 c1 about the point at distance 1/2 on the axis, so its
    half-angle satisfies sin(theta_c) = sinh(3 c1) / sinh(1/2).
    """

    delta: float
    n: Dimension
    alpha: float
    c1: float

    @property
    def half_angle(self) -> float:
        s = math.sinh(3 * self.c1) / math.sinh(0.5)
        if s >= 1:
            raise ConfigurationError("c1 too large: the cone degenerates")
        return math.asin(s)

    @property
    def cone_solid_angle(self) -> float:
        n = self.n.n
        if n == 2:
            return 2.0 * self.half_angle
        psi, w = gauss_legendre(32, 0.0, self.half_angle)
        return sphere_area(n - 2) * float(np.sum(w * np.sin(psi) ** (n - 2)))

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        return r ** (1 - self.n.n - self.alpha) / (-np.log(r))

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        r = np.arccosh(np.maximum(w[..., 0], 1.0))
        norm = np.linalg.norm(w[..., 1:], axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            cos_angle = np.where(norm > 0, w[..., 1] / np.where(norm > 0, norm, 1.0), 1.0)
            inside = (r >= self.delta) & (r <= 0.5) & (cos_angle >= math.cos(self.half_angle))
            return np.where(inside, self.profile(np.clip(r, self.delta, 0.5)), 0.0)

    def _directions(self, k: int = 16):
        n = self.n.n
        if n == 2:
            phi, w = gauss_legendre(k, -self.half_angle, self.half_angle)
            return np.stack([np.cos(phi), np.sin(phi)], axis=-1), w
        psi, wpsi = gauss_legendre(k, 0.0, self.half_angle)
        sig, wsig = sphere_rule(n - 1, 8)
        dirs = np.concatenate(
            [np.repeat(np.cos(psi), len(sig))[:, None],
             (np.sin(psi)[:, None, None] * sig[None]).reshape(-1, n - 1)], axis=1)
        w = (wpsi * np.sin(psi) ** (n - 2))[:, None] * wsig[None, :]
        return dirs, w.ravel()

    def support_rule(self, panels_per_unit: float = 2.0):
        """Nodes and weights for integrals over supp f, in u = log r."""
        lo, hi = math.log(self.delta), math.log(0.5)
        u, wu = composite_rule(lo, hi, max(4, int(math.ceil((hi - lo) * panels_per_unit))))
        r = np.exp(u)
        dirs, wd = self._directions()
        radial_w = wu * r * np.sinh(r) ** (self.n.n - 1)
        return r, radial_w, dirs, wd

    def lp_norm(self, p: float) -> float:
        lo, hi = math.log(self.delta), math.log(0.5)

        def evaluate(npanels):
            u, w = composite_rule(lo, hi, npanels)
            r = np.exp(u)
            vals = w * r * self.profile(r) ** p * np.sinh(r) ** (self.n.n - 1)
            return np.sum(vals), np.sum(np.abs(vals))

        total = adaptive(evaluate, max(4, int(math.ceil(2 * (hi - lo)))), DEFAULT_CONFIG,
                         what="f_delta norm")
        return float((self.cone_solid_angle * total) ** (1.0 / p))

    def center(self) -> np.ndarray:
        return np.array([math.cosh(0.5), math.sinh(0.5)] + [0.0] * (self.n.n - 1))


def build_f_delta(spec: CounterexampleSpec) -> FDelta:
    if spec.family is not Family.F_DELTA:
        raise DomainError("spec is not an F_DELTA family")
    return FDelta(float(spec.param), spec.n, spec.alpha, spec.c1)


# ------------------------------------------------------------------------ G_J

@dataclass(frozen=True)
class GJ:
    """Indicator of R_j = {|w_1 - 2^{1-j}| <= 2^{-j}, |w''| <= c2 2^{-j/2}}."""

    j: int
    n: Dimension
    c2: float

    @property
    def width(self) -> float:
        return self.c2 * 2.0 ** (-self.j / 2.0)

    @property
    def w1_range(self):
        h = 2.0 ** (-self.j)
        return h, 3.0 * h

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        lo, hi = self.w1_range
        inside = (w[..., 1] >= lo) & (w[..., 1] <= hi) & \
            (np.linalg.norm(w[..., 2:], axis=-1) <= self.width)
        return inside.astype(float)

    def chart_rule(self, k1: int = 16, k2: int = 16):
        """Ambient points and hyperbolic weights covering R_j (chart measure dx/x_0)."""
        n = self.n.n
        lo, hi = self.w1_range
        x1, w1 = gauss_legendre(k1, lo, hi)
        if n == 2:
            x2, w2 = gauss_legendre(k2, -self.width, self.width)
            perp, wp = x2[:, None], w2
        else:
            rr, wr = gauss_legendre(k2, 0.0, self.width)
            sig, wsig = sphere_rule(n - 1, 8)
            perp = (rr[:, None, None] * sig[None]).reshape(-1, n - 1)
            wp = ((wr * rr ** (n - 2))[:, None] * wsig[None, :]).ravel()
        x = np.concatenate([np.repeat(x1, len(perp))[:, None],
                            np.tile(perp, (len(x1), 1))], axis=1)
        weights = np.repeat(w1, len(perp)) * np.tile(wp, len(x1))
        x0 = np.sqrt(1.0 + np.sum(x * x, axis=1))
        return np.concatenate([x0[:, None], x], axis=1), weights / x0

    def boundary_points(self, k: int = 9):
        """Closed-set sample (including faces and edges) for containment checks."""
        n = self.n.n
        lo, hi = self.w1_range
        x1 = np.linspace(lo, hi, k)
        if n == 2:
            perp = np.linspace(-self.width, self.width, k)[:, None]
        else:
            sig, _ = sphere_rule(n - 1, 4)
            perp = np.concatenate([np.zeros((1, n - 1)),
                                   (np.linspace(0, self.width, k)[1:, None, None]
                                    * sig[None]).reshape(-1, n - 1)])
        x = np.concatenate([np.repeat(x1, len(perp))[:, None],
                            np.tile(perp, (len(x1), 1))], axis=1)
        x0 = np.sqrt(1.0 + np.sum(x * x, axis=1))
        return np.concatenate([x0[:, None], x], axis=1)

    def volume(self) -> float:
        _, w = self.chart_rule()
        return float(np.sum(w))

    def lp_norm(self, p: float) -> float:
        return self.volume() ** (1.0 / p)


def build_g_j(spec: CounterexampleSpec) -> GJ:
    if spec.family is not Family.G_J:
        raise DomainError("spec is not a G_J family")
    return GJ(int(spec.param), spec.n, spec.c2)


# ---------------------------------------------------------------------- H_EPS

@dataclass(frozen=True)
class HEps:
    """Indicator of the annulus E_eps = {|rho(w) - 1 + 2 eps| < eps}."""

    eps: float
    n: Dimension

    @property
    def radii(self):
        return 1.0 - 3.0 * self.eps, 1.0 - self.eps

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        r = np.arccosh(np.maximum(w[..., 0], 1.0))
        return (np.abs(r - 1.0 + 2.0 * self.eps) < self.eps).astype(float)

    def volume(self) -> float:
        a, b = self.radii
        x, w = gauss_legendre(16, a, b)
        return float(self.n.omega * np.sum(w * np.sinh(x) ** (self.n.n - 1)))

    def lp_norm(self, p: float) -> float:
        return self.volume() ** (1.0 / p)


def build_h_eps(spec: CounterexampleSpec) -> HEps:
    if spec.family is not Family.H_EPS:
        raise DomainError("spec is not an H_EPS family")
    return HEps(float(spec.param), spec.n)


# ------------------------------------------------------------------- norms

def lp_norm(f, p: float, n=None, q: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """(int |f|^p)^{1/p}.

    Family objects use their own product or polar rule; radial inputs
    (RadialProfile / RadialFunction, supported in rho <= rmax) use polar
    quadrature.
    """
    if not (1.0 < p < math.inf):
        raise DomainError("p must lie in (1, inf)")
    if hasattr(f, "lp_norm"):
        return f.lp_norm(p)
    if not isinstance(f, (RadialProfile, RadialFunction)):
        raise DomainError("lp_norm needs a family object or a radial input")
    dim = f.n if n is None else as_dimension(n)
    rmax = f.rmax

    def evaluate(npanels):
        r, w = composite_rule(0.0, rmax, npanels)
        vals = w * np.abs(f(r)) ** p * np.sinh(r) ** (dim.n - 1)
        return np.sum(vals), np.sum(np.abs(vals))

    total = adaptive(evaluate, max(8, int(math.ceil(4 * rmax))), q, what="L^p norm")
    return float((dim.omega * total) ** (1.0 / p))


# ------------------------------------------------------------ lower bounds

def _check_inside(cosh_gap, what: str):
    if np.min(cosh_gap) <= 0:
        raise ConfigurationError(
            f"{what}: support is not strictly inside the ball; reduce the constants")


def _mean_f_delta(fd: FDelta, z: np.ndarray, rule) -> float:
    r, wr, dirs, wd = rule
    n = fd.n.n
    t = math.acosh(z[0])
    cosh_d = z[0] * np.cosh(r)[:, None] - np.sinh(r)[:, None] * (dirs @ z[1:])[None, :]
    _check_inside(math.cosh(t) - cosh_d, "F_DELTA")
    k = _kernel(t, cosh_d, fd.alpha)
    integral = np.sum((wr * fd.profile(r))[:, None] * wd[None, :] * k)
    return _mean_prefactor(fd.n, fd.alpha, t) * integral


def _mean_g_j(g: GJ, z: np.ndarray, alpha: float, pts, wts, boundary) -> float:
    t = math.acosh(z[0])
    cb = boundary[:, 0] * z[0] - boundary[:, 1:] @ z[1:]
    _check_inside(math.cosh(t) - cb, "G_J")
    cosh_d = pts[:, 0] * z[0] - pts[:, 1:] @ z[1:]
    return _mean_prefactor(g.n, alpha, t) * float(np.sum(wts * _kernel(t, cosh_d, alpha)))


def _mean_h_eps(h: HEps, R: float, alpha: float, k_theta: int = 16, k_s: int = 16) -> float:
    # z at distance R from the origin; polar coordinates (s, theta) about z with
    # cosh rho(w) = cosh R cosh s - sinh R sinh s cos theta.
    n = h.n.n
    t = 1.0
    theta, wth = gauss_legendre(k_theta, 0.0, math.pi)
    wth = wth * np.sin(theta) ** (n - 2) * sphere_area(n - 2)
    A = math.cosh(R)
    B = math.sinh(R) * np.cos(theta)
    k = np.sqrt(A * A - B * B)
    s0 = np.arctanh(B / A)
    a, b = h.radii
    s_lo = s0 + np.arccosh(math.cosh(a) / k)
    s_hi = s0 + np.arccosh(math.cosh(b) / k)
    _check_inside(t - s_hi, "H_EPS")
    x, wx = gauss_legendre(k_s, 0.0, 1.0)
    s = s_lo[:, None] + (s_hi - s_lo)[:, None] * x[None, :]
    ws = (s_hi - s_lo)[:, None] * wx[None, :]
    inner = np.sum(ws * _kernel(t, np.cosh(s), alpha) * np.sinh(s) ** (n - 1), axis=1)
    return _mean_prefactor(h.n, alpha, t) * float(np.sum(wth * inner))


def maximal_lower_bound(spec: CounterexampleSpec, tg: TGrid | None = None) -> RatioSample:
    """Lower bound for ||m^alpha f||_p / ||f||_p from the family's proof strategy.

    |M^alpha_{t(z)} f(z)| is integrated (p-th power) over the proof's z-region.
    The proofs fix t(z) (rho(z) for F_DELTA and G_J, 1 for H_EPS); ``tg`` is
    accepted for interface symmetry and is not used.
    """
    del tg
    n, p, alpha = spec.n, spec.p, spec.alpha
    if spec.family is Family.H_EPS:
        h = build_h_eps(spec)
        R, wR = gauss_legendre(8, 0.0, h.eps / 100.0)
        vals = np.array([abs(_mean_h_eps(h, float(x), alpha)) for x in R])
        integral = n.omega * np.sum(wR * vals ** p * np.sinh(R) ** (n.n - 1))
        fnorm = h.lp_norm(p)
    elif spec.family is Family.G_J:
        g = build_g_j(spec)
        pts, wts = g.chart_rule()
        boundary = g.boundary_points()
        integral = 0.0
        for z, wz in zip(*_g_j_region(g)):
            integral += wz * abs(_mean_g_j(g, z, alpha, pts, wts, boundary)) ** p
        fnorm = g.lp_norm(p)
    else:
        fd = build_f_delta(spec)
        rule = fd.support_rule()
        zs, wz = _ball_points(fd.center(), fd.c1, n.n)
        vals = np.array([abs(_mean_f_delta(fd, z, rule)) for z in zs])
        integral = float(np.sum(wz * vals ** p))
        fnorm = fd.lp_norm(p)
    return RatioSample(float(spec.param), float(integral ** (1.0 / p) / fnorm), fnorm)


def _g_j_region(g: GJ, k_rho: int = 6, k_perp: int = 6):
    """z with rho(z) in [0.9, 1.1], |z''| <= width, z_1 > 0.

    Parametrised by (rho, z''); with z_1 = sqrt(sinh^2 rho - |z''|^2) the
    volume element is sinh(rho) / z_1 d rho dz''.
    """
    n = g.n.n
    rho_, wrho = gauss_legendre(k_rho, 0.9, 1.1)
    if n == 2:
        perp, wp = gauss_legendre(k_perp, -g.width, g.width)
        perp = perp[:, None]
    else:
        rr, wr = gauss_legendre(k_perp, 0.0, g.width)
        sig, wsig = sphere_rule(n - 1, 6)
        perp = (rr[:, None, None] * sig[None]).reshape(-1, n - 1)
        wp = ((wr * rr ** (n - 2))[:, None] * wsig[None, :]).ravel()
    if g.width >= math.sinh(0.9):
        raise ConfigurationError("G_J: c2 too large for the z-region; reduce the constants")
    pts, wts = [], []
    for rv, wv in zip(rho_, wrho):
        z1 = np.sqrt(math.sinh(rv) ** 2 - np.sum(perp * perp, axis=1))
        for zp, w1, wpp in zip(perp, z1, wp):
            pts.append(np.concatenate([[math.cosh(rv), w1], zp]))
            wts.append(wv * wpp * math.sinh(rv) / w1)
    return pts, wts


def sweep(family, params, n, alpha, p, c1: float = 0.05, c2: float = 0.1):
    return [maximal_lower_bound(CounterexampleSpec(family, x, n, alpha, p, c1, c2))
            for x in params]


def fit_exponent(samples, scale) -> ExponentFit:
    """Log-log fit of the ratio lower bounds.

    LOG_PARAM regresses log(ratio) on log(1/param), so a ratio behaving like
    param^a has slope -a.  LOG2_J regresses log2(ratio) on j.
    """
    scale = FitScale(scale)
    if len(samples) < 3:
        raise DomainError("an exponent fit needs at least three samples")
    x = np.array([s.param for s in samples], dtype=float)
    y = np.array([s.ratio_lower_bound for s in samples], dtype=float)
    if scale is FitScale.LOG_PARAM:
        return fit_loglog(x, y, xlog=lambda v: -np.log(v))
    return fit_loglog(x, y, xlog=lambda v: v, ylog=np.log2)


def theorem_exponent(family, n: int, alpha: float, p: float) -> float:
    """Slope predicted by the proofs for the family's fit scale."""
    family = Family(family)
    if family is Family.G_J:
        return 1.0 / p - alpha - (n - 1) / 2.0
    if family is Family.H_EPS:
        return -(alpha + (n - 1) / p)
    raise DomainError("F_DELTA grows like log log(1/delta); no power law")


def f_delta_point(r: float, angle: float, n: int) -> np.ndarray:
    """Point at distance r from the origin, at the given angle from e_1 (in the e_1 e_2 plane)."""
    v = np.zeros(n + 1)
    v[0] = math.cosh(r)
    v[1] = math.sinh(r) * math.cos(angle)
    v[2] = math.sinh(r) * math.sin(angle)
    return v

