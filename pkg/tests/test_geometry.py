import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypmax.errors import DomainError
from hypmax.geometry import (Dimension, HyperbolicPoint, IwasawaCoord, PolarCoord,
                             ball_volume, chart_distance, from_polar, geodesic_distance,
                             hyperboloid_chart, iwasawa_distance, lorentz_boost,
                             minkowski_form, polar_measure_weight, sphere_rule, to_polar)

coord = st.floats(-3.0, 3.0, allow_nan=False)


def vec(n):
    return st.lists(coord, min_size=n, max_size=n).map(np.array)


def unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def test_dimension_rejects_small():
    with pytest.raises(DomainError):
        Dimension(1)
    assert Dimension(3).omega == pytest.approx(4 * math.pi)


def test_origin_form():
    o = HyperbolicPoint.origin(3)
    assert minkowski_form(o, o) == 1.0


def test_off_sheet_rejected():
    with pytest.raises(DomainError):
        HyperbolicPoint(1.5, [0.0, 0.0])
    with pytest.raises(DomainError):
        HyperbolicPoint(0.5, [0.0])


def test_form_at_distance_one():
    z = HyperbolicPoint(math.cosh(1), [math.sinh(1), 0.0])
    assert minkowski_form(z, HyperbolicPoint.origin(2)) == pytest.approx(1.5430806348152437)


def test_bracket_at_origin():
    o = HyperbolicPoint.origin(2).array
    v = math.e * o - o
    assert minkowski_form(v, v) == pytest.approx((math.e - 1) ** 2)
    assert minkowski_form(v, v) == pytest.approx(2 * math.e * (math.cosh(1) - 1))


def test_distance_basics():
    rng = np.random.default_rng(0)
    z = hyperboloid_chart(rng.normal(size=3))
    assert geodesic_distance(z, z) == 0.0
    p = from_polar(PolarCoord(0.7, unit(rng, 3)))
    assert geodesic_distance(HyperbolicPoint.origin(3), p) == pytest.approx(0.7, abs=1e-12)


def test_distance_symmetric_random_pairs():
    rng = np.random.default_rng(1)
    for _ in range(100):
        z, w = hyperboloid_chart(rng.normal(size=2)), hyperboloid_chart(rng.normal(size=2))
        assert geodesic_distance(z, w) == geodesic_distance(w, z)


def test_arcosh_slack():
    z = np.array([1.0 - 5e-10, 0.0, 0.0])
    assert geodesic_distance(z, np.array([1.0, 0.0, 0.0])) == 0.0
    with pytest.raises(DomainError):
        geodesic_distance(np.array([1.0 - 1e-6, 0.0]), np.array([1.0, 0.0]))


@settings(max_examples=60, deadline=None)
@given(vec(3), vec(3), vec(3))
def test_triangle_inequality(x, y, w):
    a, b, c = hyperboloid_chart(x), hyperboloid_chart(y), hyperboloid_chart(w)
    assert geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-9


def test_polar_roundtrip_and_values():
    assert np.allclose(from_polar(PolarCoord(0.0, [1.0, 0.0])).array, [1, 0, 0])
    z = from_polar(PolarCoord(1.0, [1.0, 0.0, 0.0]))
    assert z.array == pytest.approx([1.5430806348152437, 1.1752011936438014, 0, 0])
    rng = np.random.default_rng(2)
    for r in (0.1, 1.0, 5.0):
        om = unit(rng, 4)
        p = from_polar(PolarCoord(r, om))
        assert abs(minkowski_form(p, p) - 1) <= 1e-10 * p.z0 ** 2
        back = to_polar(p)
        assert back.r == pytest.approx(r, abs=1e-10)
        assert np.allclose(back.omega, om, atol=1e-10)


def test_boost():
    rng = np.random.default_rng(3)
    z = hyperboloid_chart(rng.normal(size=3))
    assert np.allclose(lorentz_boost(0.0, z).array, z.array)
    b = lorentz_boost(0.5, HyperbolicPoint.origin(3))
    assert np.allclose(b.array, from_polar(PolarCoord(0.5, [1, 0, 0])).array)
    for _ in range(20):
        z, w = hyperboloid_chart(rng.normal(size=3)), hyperboloid_chart(rng.normal(size=3))
        assert minkowski_form(lorentz_boost(0.3, z), lorentz_boost(0.3, w)) == \
            pytest.approx(minkowski_form(z, w), rel=1e-12)


def test_iwasawa_examples():
    a = IwasawaCoord([0.0], 0.2)
    b = IwasawaCoord([0.0], -0.5)
    assert iwasawa_distance(a, b) == pytest.approx(0.7)
    assert iwasawa_distance(IwasawaCoord([0.0], 0.0), IwasawaCoord([1.0], 0.0)) == \
        pytest.approx(1.3169578969248166)


@settings(max_examples=60, deadline=None)
@given(vec(2), coord, vec(2), coord, vec(2), coord)
def test_iwasawa_left_invariance(v1, u1, v2, u2, vg, ug):
    a, b, g = IwasawaCoord(v1, u1), IwasawaCoord(v2, u2), IwasawaCoord(vg, ug)
    d0 = iwasawa_distance(a, b)
    assert iwasawa_distance(g * a, g * b) == pytest.approx(d0, rel=1e-9, abs=1e-9)
    assert iwasawa_distance(b, a) == pytest.approx(d0, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(vec(3), vec(3))
def test_chart_distance_matches(x, y):
    zx, zy = hyperboloid_chart(x), hyperboloid_chart(y)
    assert abs(minkowski_form(zx, zx) - 1) <= 1e-10 * zx.z0 ** 2
    assert chart_distance(x, y) == pytest.approx(geodesic_distance(zx, zy), abs=1e-9)


def test_chart_origin():
    assert np.array_equal(hyperboloid_chart([0.0, 0.0]).array, [1.0, 0.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(vec(2), vec(2), st.floats(0.05, 4.0))
def test_ball_identity(x, y, t):
    z, w = hyperboloid_chart(x), hyperboloid_chart(y)
    v = math.exp(t) * z.array - w.array
    lhs = minkowski_form(v, v)
    rhs = 2 * math.exp(t) * (math.cosh(t) - math.cosh(geodesic_distance(z, w)))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * math.exp(t) * w.z0 * z.z0)


def test_measure():
    assert polar_measure_weight(1.0, 2) == pytest.approx(7.384006, rel=1e-6)
    assert polar_measure_weight(1.0, 2) == pytest.approx(2 * math.pi * math.sinh(1))
    r = 1e-5
    assert polar_measure_weight(r, 4) / (Dimension(4).omega * r ** 3) == pytest.approx(1, abs=1e-9)
    assert ball_volume(1.0, 2) == pytest.approx(2 * math.pi * (math.cosh(1) - 1), rel=1e-12)
    assert ball_volume(1.0, 2) == pytest.approx(3.412276, rel=1e-6)


def test_sphere_rule_area():
    for n in (2, 3, 4):
        pts, w = sphere_rule(n, 12)
        assert w.sum() == pytest.approx(Dimension(n).omega, rel=1e-12)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
