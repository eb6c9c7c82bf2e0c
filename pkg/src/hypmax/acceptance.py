"""Named acceptance checks, shared by the test suite and ``hypmax validate``."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ._quadrature import QuadratureConfig
from .asymptotics import check_large_t_reconstruction, check_oscillatory_decay
from .counterexamples import Family, fit_exponent, sweep, theorem_exponent
from .fourier import (RadialProfile, harish_chandra_c, inversion_constant,
                      plancherel_density, radial_fourier, radial_inverse_fourier,
                      spectral_cutoff, spherical_function)
from .geometry import (HyperbolicPoint, IwasawaCoord, geodesic_distance,
                       iwasawa_distance, lorentz_boost, minkowski_form,
                       translation_to)
from .maximal import (MeanOperatorSpec, dyadic_multiplier_sup,
                      multiplier_m_alpha_t, spherical_mean_direct,
                      spherical_mean_spectral)
from .regions import (RegionQuery, Status, anchors, classify,
                      necessary_boundary, new_sufficient_boundary, p_critical,
                      region_rows)
from .special import ComplexOrder


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    metric: float
    tolerance: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] {self.key} {self.title}: metric={self.metric:.3e} "
                f"tol={self.tolerance:.1e} ({self.seconds:.1f}s)")

    def to_json(self) -> dict:
        return asdict(self)


def test_bump(n: int) -> RadialProfile:
    """The fixed radial bump used by the oracle checks."""
    return RadialProfile(lambda r: np.exp(-4.0 * r ** 2), n, 3.0)


def _point_at(r: float, n: int) -> HyperbolicPoint:
    return HyperbolicPoint(math.cosh(r), np.r_[math.sinh(r), np.zeros(n - 1)])


def check_mean_equivalence() -> CheckResult:
    z_r = 0.4
    cases = [(2, 1.0), (2, 0.7), (3, 1.0), (3, 0.7), (3, 0.5 + 0.3j)]
    worst, rows = 0.0, []
    for n, a in cases:
        f = test_bump(n)
        for t in (0.5, 1.0, 2.0):
            spec = MeanOperatorSpec(ComplexOrder(a, n), t)
            d = spherical_mean_direct(f, _point_at(z_r, n), spec)
            s = spherical_mean_spectral(f, spec, [0.0, z_r]).values[1]
            err = abs(d - s) / abs(d)
            worst = max(worst, err)
            rows.append({"n": n, "alpha": str(a), "t": t, "rel_err": err})
    return CheckResult("1", "direct vs spectral mean", worst <= 1e-3, worst, 1e-3,
                       {"cases": rows})


def check_kappa() -> CheckResult:
    lams = np.array([0.2, 0.45, 0.8, 1.1, 1.5])
    ts = np.array([0.2, 0.45, 0.7, 1.0, 1.3])
    worst, kappas = 0.0, {}
    for n in (2, 3):
        ratios = []
        for t in ts:
            m0 = multiplier_m_alpha_t(lams, MeanOperatorSpec(ComplexOrder(0.0, n), t))
            ratios.extend(np.real(m0) / spherical_function(lams, t, n))
        ratios = np.asarray(ratios)
        kappa = float(np.median(ratios))
        kappas[n] = kappa
        worst = max(worst, float(np.max(np.abs(ratios / kappa - 1.0))))
    return CheckResult("2", "m^0_t / phi_lam(t) constant", worst <= 1e-6, worst, 1e-6,
                       {"kappa": kappas})


def check_n3_closed_forms() -> CheckResult:
    lam = np.geomspace(0.1, 50.0, 200)
    dens_err = float(np.max(np.abs(plancherel_density(lam, 3) / lam ** 2 - 1.0)))
    c_err = float(np.max(np.abs(np.abs(harish_chandra_c(lam, 3)) ** -2 / lam ** 2 - 1.0)))
    lg = np.linspace(0.3, 12.0, 10)
    phi_err = 0.0
    for r in np.linspace(0.1, 4.0, 10):
        exact = np.sin(lg * r) / (lg * math.sinh(r))
        phi_err = max(phi_err, float(np.max(np.abs(spherical_function(lg, r, 3) - exact))))
    ok = dens_err <= 1e-10 and c_err <= 1e-10 and phi_err <= 1e-8
    return CheckResult("3", "n=3 closed forms", ok, max(dens_err, c_err, phi_err / 100),
                       1e-10, {"density_rel": dens_err, "c_rel": c_err, "phi_abs": phi_err,
                               "phi_tol": 1e-8})


def check_decay_slopes() -> CheckResult:
    cases = [(2, 0.5, 1.0, (5.0, 200.0)), (3, 0.0, 1.0, (5.0, 200.0)),
             (3, 0.7, 2.0, (20.0, 400.0))]
    rows, worst, ok = [], 0.0, True
    for n, a, t, lr in cases:
        fit = check_oscillatory_decay(ComplexOrder(a, n), t, lr)
        expected = -(a + (n - 1) / 2)
        dev = abs(fit.slope - expected)
        worst = max(worst, dev)
        ok &= dev <= 0.1 and fit.max_residual <= 0.15
        rows.append({"n": n, "alpha": a, "t": t, "slope": fit.slope, "expected": expected,
                     "residual": fit.max_residual})
    return CheckResult("4", "multiplier envelope decay", ok, worst, 0.1, {"fits": rows})


def check_reconstruction() -> CheckResult:
    worst, where = 0.0, None
    for n in (2, 3, 4):
        for a in (0.0, 0.25, 0.5, 0.75, 1.0):
            for t in (2.0, 3.0, 5.0):
                for lam in (1.0, 2.5, 5.0, 10.0, 20.0):
                    e = check_large_t_reconstruction(ComplexOrder(a, n), lam, t)
                    if e > worst:
                        worst, where = e, (n, a, t, lam)
    return CheckResult("5", "large-t hypergeometric reconstruction", worst <= 1e-5, worst,
                       1e-5, {"worst_at": where})


def check_dyadic() -> CheckResult:
    spec = MeanOperatorSpec(ComplexOrder(0.5, 3), 12.0, QuadratureConfig(max_panels=2 ** 15))
    js = np.arange(3, 9)
    sups = np.array([dyadic_multiplier_sup(int(j), spec) for j in js])
    slope = float(np.polyfit(js, np.log2(sups), 1)[0])
    expected = -(0.5 + 1.0)
    dev = abs(slope - expected)
    return CheckResult("6", "dyadic multiplier sup slope", dev <= 0.1, dev, 0.1,
                       {"slope": slope, "expected": expected, "sups": sups.tolist()})


def check_counterexamples() -> CheckResult:
    g = sweep(Family.G_J, range(4, 11), 2, -0.3, 4.0)
    g_fit = fit_exponent(g, "LOG2_J")
    g_exp = theorem_exponent(Family.G_J, 2, -0.3, 4.0)
    h = sweep(Family.H_EPS, [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], 2, 0.2, 4.0)
    h_fit = fit_exponent(h, "LOG_PARAM")
    h_exp = theorem_exponent(Family.H_EPS, 2, 0.2, 4.0)
    p = 4.0 / 3.0
    f = sweep(Family.F_DELTA, [1e-2, 1e-4, 1e-8], 2, 1 - 2 + 2 / p, p)
    ratios = [s.ratio_lower_bound for s in f]
    norms = [s.fnorm for s in f]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    norm_spread = max(norms) / min(norms) - 1.0
    dev = max(abs(g_fit.slope - g_exp), abs(h_fit.slope - h_exp))
    ok = dev <= 0.1 and increasing and norm_spread < 0.5
    return CheckResult("7", "counterexample exponents", ok, dev, 0.1,
                       {"g_j_slope": g_fit.slope, "g_j_expected": g_exp,
                        "h_eps_slope": h_fit.slope, "h_eps_expected": h_exp,
                        "f_delta_ratios": ratios, "f_delta_norm_spread": norm_spread})


def check_regions(sweep_size: int = 10_000, seed: int = 1) -> CheckResult:
    problems = []
    for n in (2, 3, 4, 5, 6):
        rows = {r[0]: r for r in region_rows(n, np.linspace(0.01, 0.99, 99))}
        a = anchors(n)
        expect = {
            "B": (a["B"], 3), "C": (a["C"], 3), "D": (a["D"], 1),
        }
        for name, ((x, y), col) in expect.items():
            row = rows[float(x)]
            if row[col] != float(y):
                problems.append(f"n={n} anchor {name}: {row[col]} != {float(y)}")
        if rows[0.5][1] != rows[0.5][2] or rows[0.5][2] != rows[0.5][3]:
            problems.append(f"n={n}: boundaries disagree at B")
    if not (p_critical(2) == 4.0 and p_critical(3) == 4.0):
        problems.append("p_2, p_3 != 4")
    rng = np.random.default_rng(seed)
    contradictions = 0
    for _ in range(sweep_size):
        n = int(rng.integers(2, 7))
        x = float(rng.uniform(0.001, 0.999))
        alpha = float(rng.uniform(-3.0, 1.5))
        bounded = alpha > new_sufficient_boundary(x, n)
        v = classify(RegionQuery(n, 1.0 / x, alpha))
        unbounded = v.status is Status.PROVEN_UNBOUNDED
        if bounded and (alpha < necessary_boundary(x, n) or unbounded):
            contradictions += 1
    ok = not problems and contradictions == 0
    return CheckResult("8", "region map anchors and consistency", ok,
                       float(len(problems) + contradictions), 0.0,
                       {"problems": problems, "contradictions": contradictions,
                        "anchors_n3": {k: [str(c) for c in v] for k, v in anchors(3).items()}})


def _round_trip(n: int, func, rmax: float):
    f = RadialProfile(func, n, rmax)
    lmax = spectral_cutoff(f, tail_tol=1e-10)
    lam = np.linspace(0.0, lmax, 1601)
    F = radial_fourier(f, lam)
    r = np.linspace(0.0, rmax, 301)
    g = radial_inverse_fourier(F, r)
    w = np.sinh(r) ** (n - 1)
    exact = func(r)
    err = math.sqrt(np.trapezoid(np.abs(g.values - exact) ** 2 * w, r)
                    / np.trapezoid(np.abs(exact) ** 2 * w, r))
    # Plancherel identity ||f||^2 = C int |F f|^2 |c|^-2
    rr = np.linspace(0.0, rmax, 4001)
    norm_sq = f.n.omega * np.trapezoid(np.abs(func(rr)) ** 2 * np.sinh(rr) ** (n - 1), rr)
    spec_sq = inversion_constant(n) * np.trapezoid(
        np.abs(F.values) ** 2 * plancherel_density(lam, n), lam)
    return err, abs(spec_sq / norm_sq - 1.0)


def check_plancherel() -> CheckResult:
    bumps = {
        "gauss": (lambda r: np.exp(-4.0 * r ** 2), 3.0),
        "gauss_poly": (lambda r: (1.0 + r ** 2) * np.exp(-3.0 * r ** 2), 3.5),
    }
    worst, rows = 0.0, []
    for n in (2, 3, 4):
        for name, (func, rmax) in bumps.items():
            err, pl = _round_trip(n, func, rmax)
            worst = max(worst, err, pl)
            rows.append({"n": n, "bump": name, "round_trip": err, "plancherel": pl})
    return CheckResult("9", "Plancherel round trip", worst <= 1e-4, worst, 1e-4,
                       {"cases": rows})


def _random_point(rng, n, scale=2.0):
    x = rng.normal(size=n) * scale
    return HyperbolicPoint(math.sqrt(1.0 + x @ x), x)


def check_geometry(samples: int = 100, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = {"sheet": 0.0, "boost": 0.0, "ball_identity": 0.0, "iwasawa": 0.0}
    for _ in range(samples):
        n = int(rng.integers(2, 6))
        z, w = _random_point(rng, n), _random_point(rng, n)
        worst["sheet"] = max(worst["sheet"],
                             abs(minkowski_form(z, z) - 1.0) / z.z0 ** 2)
        r = float(rng.uniform(-2, 2))
        bz, bw = lorentz_boost(r, z), lorentz_boost(r, w)
        f0 = minkowski_form(z, w)
        worst["boost"] = max(worst["boost"], abs(minkowski_form(bz, bw) - f0) / abs(f0))
        t = float(rng.uniform(0.1, 3.0))
        d = geodesic_distance(z, w)
        rhs = 2 * math.exp(t) * (math.cosh(t) - math.cosh(d))
        lhs = _bracket(z.array, w.array, t)
        worst["ball_identity"] = max(worst["ball_identity"],
                                     abs(lhs - rhs) / max(1.0, abs(rhs)))
        a = IwasawaCoord(rng.normal(size=n - 1), float(rng.normal()))
        b = IwasawaCoord(rng.normal(size=n - 1), float(rng.normal()))
        g = IwasawaCoord(rng.normal(size=n - 1), float(rng.normal()))
        d0 = iwasawa_distance(a, b)
        d1 = iwasawa_distance(g * a, g * b)
        worst["iwasawa"] = max(worst["iwasawa"], abs(d1 - d0) / max(1.0, d0))
    metric = max(worst.values())
    return CheckResult("10", "geometry identities", metric <= 1e-9, metric, 1e-9, worst)


def _bracket(z, w, t):
    """Minkowski square of e^t z - w, which equals 2 e^t (cosh t - [z, w])."""
    v = math.exp(t) * z - w
    return float(minkowski_form(v, v))


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "1": check_mean_equivalence,
    "2": check_kappa,
    "3": check_n3_closed_forms,
    "4": check_decay_slopes,
    "5": check_reconstruction,
    "6": check_dyadic,
    "7": check_counterexamples,
    "8": check_regions,
    "9": check_plancherel,
    "10": check_geometry,
}


def run_check(key: str) -> CheckResult:
    start = time.perf_counter()
    result = CHECKS[key]()
    result.seconds = time.perf_counter() - start
    return result


def run_all(keys=None) -> list[CheckResult]:
    return [run_check(k) for k in (keys or CHECKS)]

