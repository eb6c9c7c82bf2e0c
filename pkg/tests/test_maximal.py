import math

import numpy as np
import pytest

from hypmax.errors import DomainError
from hypmax.fourier import RadialProfile, spherical_function
from hypmax.geometry import HyperbolicPoint, hyperboloid_chart
from hypmax.maximal import (MaximalResult, MeanOperatorSpec, TGrid, ball_integral,
                            dyadic_multiplier_sup, maximal_function, mean_kernel,
                            mean_rows_csv, multiplier_m_alpha_t, spherical_mean_direct,
                            spherical_mean_spectral)
from hypmax.special import ComplexOrder


def at(r, n):
    return HyperbolicPoint(math.cosh(r), np.r_[math.sinh(r), np.zeros(n - 1)])


def bump(n):
    return RadialProfile(lambda r: np.exp(-4.0 * r ** 2), n, 3.0)


def one(w):
    return np.ones(np.shape(w)[:-1])


def test_multiplier_even_and_kappa():
    spec = MeanOperatorSpec(ComplexOrder(0.4 + 0.2j, 3), 1.3)
    lam = np.array([0.3, 2.0, 7.0])
    assert multiplier_m_alpha_t(-lam, spec) == pytest.approx(multiplier_m_alpha_t(lam, spec))
    # alpha = 0: m equals phi_lam(t) exactly (kappa = 1)
    for n in (2, 3, 4):
        for t in (0.4, 1.7):
            m0 = multiplier_m_alpha_t(lam, MeanOperatorSpec(ComplexOrder(0.0, n), t))
            assert m0.real == pytest.approx(spherical_function(lam, t, n), rel=1e-7)


def test_spec_validation():
    with pytest.raises(DomainError):
        MeanOperatorSpec(ComplexOrder(0.5, 2), 0.0)


def test_constant_function_n2():
    for t in (0.3, 1.0, 2.5):
        for z in (HyperbolicPoint.origin(2), hyperboloid_chart([0.4, -1.0])):
            v = spherical_mean_direct(one, z, MeanOperatorSpec(ComplexOrder(1.0, 2), t))
            assert v == pytest.approx(2 * math.pi, rel=1e-10)


def test_constant_function_n3():
    v = spherical_mean_direct(one, HyperbolicPoint.origin(3),
                              MeanOperatorSpec(ComplexOrder(1.0, 3), 1.0))
    e = math.e
    exact = 2 * e * math.pi * (math.sinh(2) - 2) / (math.sinh(1) * (e - 1) ** 2)
    assert v == pytest.approx(exact, rel=1e-10)


def test_direct_matches_spectral():
    spec = MeanOperatorSpec(ComplexOrder(0.7, 2), 1.0)
    f = bump(2)
    d = spherical_mean_direct(f, at(0.4, 2), spec)
    s = spherical_mean_spectral(f, spec, [0.0, 0.4]).values[1]
    assert abs(d - s) / abs(d) <= 1e-3


def test_direct_rejects_nonpositive_alpha():
    with pytest.raises(DomainError):
        spherical_mean_direct(bump(3), at(0.2, 3), MeanOperatorSpec(ComplexOrder(-0.1, 3), 1.0))


def test_kernel_support():
    spec = MeanOperatorSpec(ComplexOrder(1.0, 2), 1.0)
    r = np.linspace(0, 2.5, 126)
    K = mean_kernel(spec, r, lmax=360.0, damping=60.0)
    outside = np.abs(K.values[r > 1.1])
    assert outside.max() <= 1e-3 * np.abs(K.values).max()
    assert mean_kernel(spec, r, lmax=360.0, damping=60.0) is K


def test_continuity_in_alpha():
    # both sides of alpha = 0 on the continued (spectral) route
    f = RadialProfile(lambda r: np.exp(-4.0 * r ** 2), 3, 3.0)
    vals = [spherical_mean_spectral(f, MeanOperatorSpec(ComplexOrder(a, 3), 1.0), [0.0, 0.3])
            .values[1] for a in (0.05, 0.0, -0.05)]
    assert abs(vals[0] - vals[2]) < 0.3
    assert min(abs(vals[0] - vals[1]), abs(vals[1] - vals[2])) > 0
    # inside the ball the smooth-kernel integral continues the direct route past 0
    spec_pos = MeanOperatorSpec(ComplexOrder(0.05, 3), 1.0)
    d = spherical_mean_direct(f, at(0.3, 3), spec_pos)
    assert abs(d - vals[0]) / abs(d) < 1e-3


def test_ball_integral_truncated_matches_full_for_supported_f():
    f = RadialProfile(lambda r: np.exp(-40 * r ** 2), 2, 0.5)
    spec = MeanOperatorSpec(ComplexOrder(0.6, 2), 1.5)
    full = ball_integral(f, HyperbolicPoint.origin(2), spec)
    part = ball_integral(f, HyperbolicPoint.origin(2), spec, s_max=0.5)
    assert part == pytest.approx(full, rel=1e-8)


def test_tgrid():
    tg = TGrid.geometric(0.05, 1.05, 15.0)
    assert tg.values[0] == 0.05 and tg.values[-1] <= 15.0
    fine = tg.refine()
    assert len(fine) == 2 * len(tg) - 1
    assert np.all(np.isin(tg.values, fine.values))
    assert fine.factor == pytest.approx(math.sqrt(1.05))
    with pytest.raises(DomainError):
        TGrid([1.0, 0.5])


def test_maximal_function():
    tg = TGrid.geometric(0.1, 1.6, 3.0)
    f = bump(2)
    z = at(0.3, 2)
    res = maximal_function(f, z, ComplexOrder(1.0, 2), tg)
    assert isinstance(res, MaximalResult)
    assert np.all(res.value >= np.abs(res.means) - 1e-15)
    fine = maximal_function(f, z, ComplexOrder(1.0, 2), tg.refine())
    assert fine.value >= res.value
    const = maximal_function(one, z, ComplexOrder(1.0, 2), tg)
    assert const.value == pytest.approx(2 * math.pi, rel=1e-10)
    spec_route = maximal_function(f, z, ComplexOrder(1.0, 2), tg, route="spectral")
    assert spec_route.value == pytest.approx(res.value, rel=1e-3)
    text = res.to_csv(0.3)
    assert text.splitlines()[0] == "t,z_r,value_re,value_im"
    assert len(text.splitlines()) == len(tg) + 1
    assert mean_rows_csv([1.0], 0.2, [1 + 2j]) == "t,z_r,value_re,value_im\n1.0,0.2,1.0,2.0\n"


def test_dyadic_sup():
    spec = MeanOperatorSpec(ComplexOrder(0.5, 2), 2.0)
    lam = np.linspace(0, 2, 4001)
    assert dyadic_multiplier_sup(0, spec) == pytest.approx(
        np.abs(multiplier_m_alpha_t(lam, spec)).max(), rel=1e-6)
    with pytest.raises(DomainError):
        dyadic_multiplier_sup(-1, spec)
    # envelope bound from a constant calibrated on the uniform estimate
    n, a, t = 2, 0.5, 2.0
    bound = (1 + t) * math.exp(-(n - 1) * t / 2)
    c = max(dyadic_multiplier_sup(j, spec) * 2 ** ((a + 0.5) * (j - 1)) / bound for j in (1, 2))
    for j in range(3, 7):
        assert dyadic_multiplier_sup(j, spec) <= 1.5 * c * bound * 2 ** (-(a + 0.5) * (j - 1))
