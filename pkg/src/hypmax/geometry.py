"""Hyperboloid model of real hyperbolic space H^n.

Points live on the upper sheet ``[z, z] = 1, z0 > 0`` of Minkowski space
R^{n+1} with form ``[z, w] = z0 w0 - z1 w1 - ... - zn wn``.  Most functions
accept either :class:`HyperbolicPoint` objects or raw arrays whose last axis
has length n+1, so that whole batches of points can be pushed through numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate
from scipy.special import gamma as _gamma

from .errors import DomainError

SHEET_TOL = 1e-10
ARCOSH_SLACK = 1e-9


@dataclass(frozen=True)
class Dimension:
    """Dimension n >= 2 of H^n, with the sphere area omega_{n-1} cached."""

    n: int
    omega: float = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "omega", sphere_area(self.n - 1))

    @property
    def rho(self) -> float:
        """Half the spectral gap exponent, (n-1)/2."""
        return 0.5 * (self.n - 1)


def as_dimension(n) -> Dimension:
    return n if isinstance(n, Dimension) else Dimension(n)


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^k in R^{k+1} (S^0 has two points)."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / _gamma((k + 1) / 2.0)


@dataclass(frozen=True)
class HyperbolicPoint:
    z0: float
    zp: np.ndarray

    def __post_init__(self):
        zp = np.atleast_1d(np.asarray(self.zp, dtype=float)).copy()
        zp.setflags(write=False)
        object.__setattr__(self, "zp", zp)
        object.__setattr__(self, "z0", float(self.z0))
        if self.z0 < 1.0 - SHEET_TOL:
            raise DomainError(f"z0 = {self.z0} < 1 is not on the upper sheet")
        defect = self.z0 ** 2 - zp @ zp - 1.0
        if abs(defect) > SHEET_TOL * max(1.0, self.z0 ** 2):
            raise DomainError(f"point is off the sheet: [z,z] - 1 = {defect:.3e}")

    @classmethod
    def from_array(cls, z) -> "HyperbolicPoint":
        z = np.asarray(z, dtype=float)
        return cls(z[0], z[1:])

    @classmethod
    def origin(cls, n) -> "HyperbolicPoint":
        return cls(1.0, np.zeros(as_dimension(n).n))

    @property
    def n(self) -> int:
        return self.zp.shape[0]

    @property
    def array(self) -> np.ndarray:
        return np.concatenate([[self.z0], self.zp])


@dataclass(frozen=True)
class PolarCoord:
    r: float
    omega: np.ndarray

    def __post_init__(self):
        om = np.atleast_1d(np.asarray(self.omega, dtype=float)).copy()
        om.setflags(write=False)
        object.__setattr__(self, "omega", om)
        if self.r < 0:
            raise DomainError(f"polar radius must be >= 0, got {self.r}")
        if abs(np.linalg.norm(om) - 1.0) > 1e-12:
            raise DomainError("polar direction must be a unit vector")


@dataclass(frozen=True)
class IwasawaCoord:
    v: np.ndarray
    u: float

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.v, dtype=float)).copy()
        v.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", float(self.u))
        if not (np.all(np.isfinite(v)) and math.isfinite(self.u)):
            raise DomainError("Iwasawa coordinates must be finite")

    def __mul__(self, other: "IwasawaCoord") -> "IwasawaCoord":
        # group law (v, u)(v', u') = (v + e^u v', u + u')
        return IwasawaCoord(self.v + math.exp(self.u) * other.v, self.u + other.u)


PointLike = Union[HyperbolicPoint, np.ndarray]


def _coords(z) -> np.ndarray:
    if isinstance(z, HyperbolicPoint):
        return z.array
    return np.asarray(z, dtype=float)


def minkowski_form(z: PointLike, w: PointLike):
    """The form [z, w]; broadcasts over leading axes of raw arrays."""
    a, b = _coords(z), _coords(w)
    if a.shape[-1] != b.shape[-1]:
        raise DomainError(
            f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]} coordinates")
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def safe_arcosh(x):
    """arcosh with arguments in [1 - 1e-9, 1) clamped to 1."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0 - ARCOSH_SLACK):
        raise DomainError(f"arcosh argument {np.min(x):.12g} is below 1")
    out = np.arccosh(np.maximum(x, 1.0))
    return out if out.ndim else float(out)


def geodesic_distance(z: PointLike, w: PointLike):
    """arcosh [z, w], computed as 2 asinh(|z - w|/2) for nearby points.

    arcosh loses half the digits near 1; the chord form [z-w, z-w] =
    -4 sinh^2(d/2) does not.
    """
    a, b = _coords(z), _coords(w)
    form = minkowski_form(a, b)
    far = safe_arcosh(form)
    v = a - b
    chord = np.sqrt(np.maximum(-minkowski_form(v, v), 0.0))
    near = 2.0 * np.arcsinh(0.5 * chord)
    out = np.where(np.asarray(form) < 2.0, near, far)
    return out if out.ndim else float(out)


def rho(z: PointLike):
    """Distance to the origin (1, 0, ..., 0)."""
    return safe_arcosh(_coords(z)[..., 0])


def from_polar(p: PolarCoord, n=None) -> HyperbolicPoint:
    if n is not None and as_dimension(n).n != p.omega.shape[0]:
        raise DomainError("direction length does not match the dimension")
    return HyperbolicPoint(math.cosh(p.r), math.sinh(p.r) * p.omega)


def to_polar(z: HyperbolicPoint) -> PolarCoord:
    r = float(rho(z))
    norm = np.linalg.norm(z.zp)
    if norm == 0.0:
        omega = np.zeros(z.n)
        omega[0] = 1.0
    else:
        omega = z.zp / norm
    return PolarCoord(r, omega)


def boost_matrix(r: float, n: int) -> np.ndarray:
    """The Lorentz boost a(r): hyperbolic rotation in the (z0, z1) plane."""
    n = as_dimension(n).n
    a = np.eye(n + 1)
    c, s = math.cosh(r), math.sinh(r)
    a[0, 0] = a[1, 1] = c
    a[0, 1] = a[1, 0] = s
    return a


def lorentz_boost(r: float, z: PointLike):
    """Apply a(r); returns a HyperbolicPoint for point input, else an array."""
    arr = _coords(z)
    out = arr @ boost_matrix(r, arr.shape[-1] - 1).T
    if isinstance(z, HyperbolicPoint):
        return HyperbolicPoint.from_array(out)
    return out


def translation_to(z: PointLike) -> np.ndarray:
    """Pure boost sending the origin to z (a Lorentz matrix)."""
    a = _coords(z)
    z0, zp = a[0], a[1:]
    n = zp.shape[0]
    m = np.empty((n + 1, n + 1))
    m[0, 0] = z0
    m[0, 1:] = zp
    m[1:, 0] = zp
    m[1:, 1:] = np.eye(n) + np.outer(zp, zp) / (1.0 + z0)
    return m


def exp_at(z: PointLike, s, directions) -> np.ndarray:
    """Points at distance ``s`` from ``z`` along unit ``directions`` (in R^n).

    ``directions`` are tangent directions at the origin, transported to ``z``
    by :func:`translation_to`.  ``s`` and ``directions`` broadcast: the result
    has shape ``s.shape + directions.shape[:-1] + (n+1,)``.
    """
    s = np.asarray(s, dtype=float)
    d = np.asarray(directions, dtype=float)
    local = np.concatenate(
        [np.broadcast_to(np.cosh(s)[(...,) + (None,) * (d.ndim - 1)],
                         s.shape + d.shape[:-1])[..., None],
         np.sinh(s)[(...,) + (None,) * d.ndim] * d],
        axis=-1)
    return local @ translation_to(z).T


def iwasawa_distance(a: IwasawaCoord, b: IwasawaCoord) -> float:
    if a.v.shape != b.v.shape:
        raise DomainError("Iwasawa coordinates of different dimension")
    dv = a.v - b.v
    arg = math.exp(-a.u - b.u) * float(dv @ dv) + math.cosh(a.u - b.u)
    return float(safe_arcosh(arg))


def hyperboloid_chart(x) -> HyperbolicPoint:
    """tau(x) = (sqrt(1 + |x|^2), x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return HyperbolicPoint(math.sqrt(1.0 + x @ x), x)


def chart_distance(x, y) -> float:
    """arcosh(sqrt(1+|x|^2) sqrt(1+|y|^2) - x.y), evaluated stably."""
    return float(geodesic_distance(hyperboloid_chart(x), hyperboloid_chart(y)))


def polar_measure_weight(r, n):
    """Density omega_{n-1} sinh(r)^{n-1} of the volume in geodesic polar coordinates."""
    dim = as_dimension(n)
    return dim.omega * np.sinh(r) ** (dim.n - 1)


def ball_volume(t: float, n) -> float:
    if t < 0:
        raise DomainError("radius must be nonnegative")
    value, _ = integrate.quad(lambda r: polar_measure_weight(r, n), 0.0, t,
                              epsabs=0.0, epsrel=1e-13, limit=200)
    return value


def sphere_rule(n: int, k: int):
    """Product rule on S^{n-1} in R^n: points (m, n) and weights summing to omega_{n-1}.

    Built recursively from S^0 = {+1, -1} through polar angles with k-point
    Gauss-Legendre nodes per angle.
    """
    n = int(n)
    pts = np.array([[1.0], [-1.0]])
    wts = np.array([1.0, 1.0])
    if n == 1:
        return pts, wts
    x, w = gauss_legendre(k, 0.0, math.pi)
    for d in range(1, n):
        # S^d from S^{d-1}: (cos th, sin th * p), weight sin^{d-1} th
        c, s = np.cos(x), np.sin(x)
        new_pts = np.concatenate(
            [np.repeat(c, len(pts))[:, None],
             (s[:, None, None] * pts[None, :, :]).reshape(-1, d)], axis=1)
        new_wts = (w * s ** (d - 1))[:, None] * wts[None, :]
        pts, wts = new_pts, new_wts.ravel()
    return pts, wts


def gauss_legendre(k: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w
