import math

import numpy as np
import pytest

from hypmax.counterexamples import (CounterexampleSpec, Family, FitScale, RatioSample,
                                    build_f_delta, build_g_j, build_h_eps, f_delta_point,
                                    fit_exponent, lp_norm, maximal_lower_bound, sweep,
                                    theorem_exponent)
from hypmax.asymptotics import fit_loglog
from hypmax.errors import ConfigurationError, DomainError
from hypmax.fourier import RadialProfile
from hypmax.geometry import Dimension


def spec(family, param, n=2, alpha=0.5, p=4.0, **kw):
    return CounterexampleSpec(family, param, n, alpha, p, **kw)


def test_spec_validation():
    with pytest.raises(DomainError):
        spec(Family.F_DELTA, 0.1)
    with pytest.raises(DomainError):
        spec(Family.G_J, 2)
    with pytest.raises(DomainError):
        spec(Family.G_J, 4.5)
    with pytest.raises(DomainError):
        spec(Family.H_EPS, 0.2)
    with pytest.raises(DomainError):
        spec(Family.H_EPS, 0.01, p=math.inf)
    with pytest.raises(DomainError):
        build_g_j(spec(Family.H_EPS, 0.01))
    with pytest.raises(DomainError):
        RatioSample(0.1, 0.0, 1.0)


def test_f_delta_membership():
    fd = build_f_delta(spec(Family.F_DELTA, 1e-3))
    assert fd(f_delta_point(5e-4, 0.0, 2)) == 0.0
    assert fd(f_delta_point(0.6, 0.0, 2)) == 0.0
    assert fd(f_delta_point(0.2, 0.0, 2)) > 0
    assert fd(f_delta_point(0.2, 1.5 * fd.half_angle, 2)) == 0.0


def test_f_delta_norms():
    n, p = 2, 4.0 / 3.0
    crit = 1 - n + n / p
    norms = [build_f_delta(spec(Family.F_DELTA, d, alpha=crit, p=p)).lp_norm(p)
             for d in (1e-3, 1e-6)]
    assert norms[1] / norms[0] < 1.5
    # above the critical order the norm blows up like delta^{1-n-alpha+n/p},
    # up to a 1/log(1/delta) factor, which is why the window is tiny
    al = 0.8
    d = np.geomspace(1e-30, 1e-20, 6)
    vals = [build_f_delta(spec(Family.F_DELTA, x, alpha=al, p=p)).lp_norm(p) for x in d]
    assert fit_loglog(d, vals).slope == pytest.approx(1 - n - al + n / p, abs=0.05)


def test_g_j_membership_and_norms():
    j = 5
    g = build_g_j(spec(Family.G_J, j))
    assert g(np.array([math.sqrt(1 + 4 * 4.0 ** -j), 2 * 2.0 ** -j, 0.0])) == 1.0
    assert g(np.array([math.sqrt(1 + 16 * 4.0 ** -j), 4 * 2.0 ** -j, 0.0])) == 0.0
    for n in (2, 3):
        p = 3.0
        js = np.arange(4, 11)
        norms = [build_g_j(spec(Family.G_J, int(k), n=n, p=p)).lp_norm(p) for k in js]
        slope = np.polyfit(js, np.log(norms), 1)[0]
        assert slope == pytest.approx(-(n + 1) / (2 * p) * math.log(2), rel=0.05)


def test_g_j_volume_ratio():
    g = [build_g_j(spec(Family.G_J, j)) for j in (6, 7)]
    # scaled width (c2 2^{-j/2}): ratio 2^{-(n+1)/2}
    assert g[1].volume() / g[0].volume() == pytest.approx(2 ** -1.5, rel=0.1)
    # fixed width: the w_1 interval alone halves
    fixed = build_g_j(spec(Family.G_J, 7, c2=0.1 * 2 ** 0.5))
    assert fixed.width == pytest.approx(g[0].width)
    assert fixed.volume() / g[0].volume() == pytest.approx(0.5, rel=0.1)


def test_h_eps():
    eps = 1e-3
    h = build_h_eps(spec(Family.H_EPS, eps))
    assert h(np.array([math.cosh(1 - 2 * eps), math.sinh(1 - 2 * eps), 0.0])) == 1.0
    assert h(np.array([math.cosh(1.0), math.sinh(1.0), 0.0])) == 0.0
    approx = Dimension(2).omega * math.sinh(1.0) * 2 * eps
    assert h.volume() == pytest.approx(approx, rel=0.1)
    exact = 2 * math.pi * (math.cosh(1 - eps) - math.cosh(1 - 3 * eps))
    assert lp_norm(h, 3.0) == pytest.approx(exact ** (1 / 3), rel=1e-12)
    es = np.geomspace(1e-4, 1e-2, 5)
    norms = [build_h_eps(spec(Family.H_EPS, e)).lp_norm(4.0) for e in es]
    assert fit_loglog(es, norms).slope == pytest.approx(0.25, abs=0.05)


def test_lp_norm_ball_indicator():
    ind = RadialProfile(lambda r: np.ones_like(r), 2, 1.0)
    v = lp_norm(ind, 2.0)
    assert v == pytest.approx(math.sqrt(2 * math.pi * (math.cosh(1) - 1)), rel=1e-8)
    assert v == pytest.approx(1.847235, rel=1e-6)
    scaled = RadialProfile(lambda r: -3.0 * np.exp(-r ** 2), 3, 2.0)
    base = RadialProfile(lambda r: np.exp(-r ** 2), 3, 2.0)
    assert lp_norm(scaled, 1.7) == pytest.approx(3 * lp_norm(base, 1.7), rel=1e-10)
    with pytest.raises(DomainError):
        lp_norm(base, 1.0)


def test_containment_checked():
    with pytest.raises(ConfigurationError):
        maximal_lower_bound(spec(Family.G_J, 4, alpha=-0.3, c2=5.0))
    with pytest.raises(ConfigurationError):
        maximal_lower_bound(spec(Family.F_DELTA, 0.01, alpha=0.5, p=4 / 3, c1=0.15))


def test_lower_bound_fits():
    h = sweep(Family.H_EPS, [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], 2, 0.2, 4.0)
    fit = fit_exponent(h, "LOG_PARAM")
    assert fit.slope == pytest.approx(theorem_exponent(Family.H_EPS, 2, 0.2, 4.0), abs=0.1)
    assert -fit.slope == pytest.approx(0.45, abs=0.1)
    g = sweep(Family.G_J, range(4, 11), 2, -0.3, 4.0)
    fit = fit_exponent(g, FitScale.LOG2_J)
    assert fit.slope == pytest.approx(0.05, abs=0.1)
    f = sweep(Family.F_DELTA, [1e-2, 1e-4, 1e-8], 2, 0.5, 4 / 3)
    r = [s.ratio_lower_bound for s in f]
    assert r[0] < r[1] < r[2]
    assert max(s.fnorm for s in f) / min(s.fnorm for s in f) < 1.5
    with pytest.raises(DomainError):
        theorem_exponent(Family.F_DELTA, 2, 0.5, 4 / 3)


def test_fit_exponent_synthetic():
    ps = np.geomspace(1e-3, 1e-1, 9)
    exact = [RatioSample(x, 2 * x ** 0.45, 1.0) for x in ps]
    fit = fit_exponent(exact, "LOG_PARAM")
    assert fit.slope == pytest.approx(-0.45, abs=1e-12)
    js = np.arange(3, 12)
    exact_j = [RatioSample(float(j), 3 * 2.0 ** (-0.7 * j), 1.0) for j in js]
    assert fit_exponent(exact_j, "LOG2_J").slope == pytest.approx(-0.7, abs=1e-12)
    rng = np.random.default_rng(3)
    noisy = [RatioSample(x, x ** 0.45 * (1 + 0.05 * rng.uniform(-1, 1)), 1.0) for x in ps]
    assert fit_exponent(noisy, "LOG_PARAM").slope == pytest.approx(-0.45, abs=0.05)
    with pytest.raises(DomainError):
        fit_exponent(exact[:2], "LOG_PARAM")
