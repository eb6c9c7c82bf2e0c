import math

import numpy as np
import pytest

from hypmax.asymptotics import (ExponentFit, a2_coefficient, check_c_alpha_decay,
                                check_large_t_reconstruction, check_oscillatory_decay,
                                check_plancherel_density, check_uniform_bound, fit_loglog,
                                fit_report, lambda_c_difference, sliding_envelope)
from hypmax.errors import DomainError
from hypmax.special import ComplexOrder


def test_fit_loglog_exact_and_guards():
    x = np.geomspace(1, 100, 7)
    fit = fit_loglog(x, 3 * x ** -0.45)
    assert fit.slope == pytest.approx(-0.45, abs=1e-12)
    assert fit.max_residual < 1e-12
    with pytest.raises(DomainError):
        fit_loglog([1, 2], [1, 2])
    with pytest.raises(DomainError):
        fit_loglog([1, 2, 3], [1, -2, 3])
    with pytest.raises(DomainError):
        ExponentFit(1.0, 0.0, 0.0, 2)


def test_fit_loglog_noise():
    rng = np.random.default_rng(0)
    x = np.geomspace(1, 1000, 40)
    y = x ** 1.3 * (1 + 0.05 * rng.uniform(-1, 1, x.size))
    assert fit_loglog(x, y).slope == pytest.approx(1.3, abs=0.05)


def test_plancherel_density_check():
    assert check_plancherel_density(4, np.linspace(0, 40, 81))


def test_uniform_bound_n2():
    alpha = ComplexOrder(0.5, 2)
    lg, tg = np.linspace(0, 50, 51), np.linspace(0.1, 10, 34)
    rep = check_uniform_bound(alpha, lg, tg)
    assert rep.worst_ratio <= 1.2 * rep.calibrated_constant
    dense = check_uniform_bound(alpha, np.linspace(0, 50, 101), np.linspace(0.1, 10, 67))
    assert abs(dense.worst_ratio / rep.worst_ratio - 1) < 0.05


def test_uniform_bound_n3_closed_form():
    # m = sin(lam t)/(lam sinh t): ratio peaks at lam t -> 0
    rep = check_uniform_bound(ComplexOrder(0.0, 3), np.linspace(0, 20, 41),
                              np.linspace(0.1, 8, 30))
    lam, t = rep.worst_location
    assert lam * t < 1.0
    lg = np.linspace(1e-9, 20, 41)[:, None]
    tg = np.linspace(0.1, 8, 30)[None, :]
    exact = np.abs(np.sin(lg * tg) / (lg * np.sinh(tg))) / ((1 + tg) * np.exp(-tg))
    assert rep.worst_ratio == pytest.approx(exact.max(), rel=1e-6)


def test_sliding_envelope_complete_windows():
    lam = np.linspace(0, 10, 1001)
    env_l, env_v = sliding_envelope(lam, np.sin(lam) / (1 + lam), 2 * math.pi)
    assert env_l.size == 1
    assert env_v[0] == pytest.approx(np.max(np.abs(np.sin(lam[lam < 2 * math.pi])
                                                   / (1 + lam[lam < 2 * math.pi]))))


def test_oscillatory_decay_examples():
    f3 = check_oscillatory_decay(ComplexOrder(0.0, 3), 1.0, (5.0, 200.0))
    assert f3.slope == pytest.approx(-1.0, abs=0.05)
    f2 = check_oscillatory_decay(ComplexOrder(0.5, 2), 1.0, (5.0, 200.0))
    assert f2.slope == pytest.approx(-1.0, abs=0.1)
    assert f2.max_residual <= 0.15
    scaled = check_oscillatory_decay(ComplexOrder(0.5, 2), 1.0, (5.0, 200.0), scale=7.5)
    assert scaled.slope == pytest.approx(f2.slope, abs=0.02)
    with pytest.raises(DomainError):
        check_oscillatory_decay(ComplexOrder(0.5, 2), 4.0, (5.0, 200.0))
    with pytest.raises(DomainError):
        check_oscillatory_decay(ComplexOrder(0.5, 2), 1.0, (0.5, 200.0))


def test_reconstruction_examples():
    assert check_large_t_reconstruction(ComplexOrder(0.0, 3), 2.0, 2.0) <= 1e-8
    assert check_large_t_reconstruction(ComplexOrder(0.5, 2), 3.0, 2.0) <= 1e-6
    with pytest.raises(DomainError):
        check_large_t_reconstruction(ComplexOrder(0.5, 2), 3.0, 0.3)


def test_reconstruction_truncation_error_falls_with_t():
    # (n, alpha) = (2, 1/2) makes the series exactly 1, so use a generic order
    a = ComplexOrder(0.3, 3)
    errs = [check_large_t_reconstruction(a, 2.0, t, n_terms=4) for t in (1.0, 2.0, 4.0)]
    assert errs[0] > errs[1] > errs[2]


def test_a2_n3_alpha0_is_constant_in_lambda():
    # n = 3, alpha = 0: the series is trivial and a2 is lam-independent
    a = ComplexOrder(0.0, 3)
    vals = [a2_coefficient(a, lam, 2.5) for lam in (0.5, 3.0, 11.0)]
    assert vals[0] == pytest.approx(vals[1]) == vals[2]


def test_c_alpha_decay_examples():
    assert check_c_alpha_decay(ComplexOrder(1.0, 3), 0, (10, 1000)).slope == \
        pytest.approx(-1.0, abs=0.01)
    # n = 2, alpha = 1/2: lam c(lam) is exactly constant, so the slope is 0
    # (1 - (n-1)/2 - alpha - k), not -1
    assert check_c_alpha_decay(ComplexOrder(0.5, 2), 0, (10, 1000)).slope == \
        pytest.approx(0.0, abs=0.05)
    for n, al in [(3, 0.3), (4, 0.3), (2, 0.0)]:
        a = ComplexOrder(al, n)
        s0 = check_c_alpha_decay(a, 0, (10, 1000)).slope
        s1 = check_c_alpha_decay(a, 1, (10, 1000)).slope
        s2 = check_c_alpha_decay(a, 2, (10, 1000))
        assert s1 == pytest.approx(s0 - 1, abs=0.1)
        assert s2.slope == pytest.approx(1 - (n - 1) / 2 - al - 2, abs=0.1)
        assert s2.max_residual <= 0.15
    with pytest.raises(DomainError):
        lambda_c_difference(ComplexOrder(0.5, 3), 3, [2.0])


def test_fit_report():
    fit = ExponentFit(-1.02, 0.0, 0.01, 10)
    rep = fit_report("x", {"n": 2}, -1.0, fit, 0.1)
    assert rep["pass"] and rep["fitted_slope"] == -1.02
    assert not fit_report("x", {}, -1.5, fit, 0.1)["pass"]
