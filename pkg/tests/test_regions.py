import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypmax.errors import DomainError
from hypmax.regions import (RegionQuery, Status, anchors, classify, emit_region_csv,
                            kohen_sufficient_boundary, necessary_bound, necessary_boundary,
                            new_sufficient_boundary, p_critical, read_region_csv,
                            region_rows, verdict_dict)


def test_p_critical():
    assert [p_critical(n) for n in (2, 3, 5)] == [4.0, 4.0, 3.0]


def test_boundary_examples():
    assert necessary_boundary(0.25, 3) == -0.5
    assert necessary_boundary(1 / 3, 3) == pytest.approx(-2 / 3)
    assert necessary_boundary(0.5, 5) == pytest.approx((2 - 5) / 2)
    assert kohen_sufficient_boundary(0.25, 3) == -0.25
    assert kohen_sufficient_boundary(0.0, 4) == 0.0
    assert new_sufficient_boundary(0.25, 3) == -5 / 16
    assert new_sufficient_boundary(0.25, 2) == -1 / 16
    for n in (2, 3, 6):
        for side in (0.5 - 1e-12, 0.5):
            assert kohen_sufficient_boundary(side, n) == pytest.approx((2 - n) / 2, abs=1e-10)
            assert new_sufficient_boundary(side, n) == pytest.approx((2 - n) / 2, abs=1e-10)
    with pytest.raises(DomainError):
        necessary_boundary(1.0, 3)


def test_strictness():
    assert necessary_bound(0.7, 3).strict
    assert not necessary_bound(0.2, 3).strict


def test_classify_examples():
    assert classify(RegionQuery(3, 4, -0.2)).status is Status.PROVEN_BOUNDED
    assert classify(RegionQuery(3, 4, -0.6)).status is Status.PROVEN_UNBOUNDED
    assert classify(RegionQuery(3, 4, -0.4)).status is Status.UNKNOWN
    v = classify(RegionQuery(3, math.inf, 0.1))
    assert v.status is Status.PROVEN_BOUNDED and v.p_infinite
    # on the necessary line for p > 2 the condition is non-strict
    assert classify(RegionQuery(3, 4, -0.5)).status is Status.UNKNOWN
    # for p <= 2 both conditions read alpha > 1-n+n/p
    assert classify(RegionQuery(3, 1.5, 1 - 3 + 2)).status is Status.PROVEN_UNBOUNDED
    with pytest.raises(DomainError):
        RegionQuery(3, 1.0, 0.0)
    d = verdict_dict(RegionQuery(2, 4, 0.0))
    assert d["status"] == "PROVEN_BOUNDED" and d["bounds"]["sufficient"]["strict"]


def test_anchors_exact():
    a = anchors(3)
    assert a["C"] == (Fraction(1, 4), Fraction(-5, 16))
    assert a["D"] == (Fraction(1, 3), Fraction(-2, 3))
    assert a["B"] == (Fraction(1, 2), Fraction(-1, 2))
    for n in range(2, 9):
        rows = {r[0]: r for r in region_rows(n, np.linspace(0.05, 0.95, 19))}
        a = anchors(n)
        assert rows[float(a["C"][0])][3] == float(a["C"][1])
        assert rows[float(a["D"][0])][1] == float(a["D"][1])
        assert rows[float(a["B"][0])][1:] == (float(a["B"][1]),) * 3
        assert rows[0.0][1:] == (0.0, 0.0, 0.0)
        assert rows[1.0][1:] == (1.0, 1.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.floats(1e-6, 0.5 - 1e-9))
def test_boundary_ordering(n, x):
    nec, new, ko = (necessary_boundary(x, n), new_sufficient_boundary(x, n),
                    kohen_sufficient_boundary(x, n))
    assert nec <= new + 1e-15 and new <= ko + 1e-15


def test_ordering_exact_arithmetic():
    for n in range(2, 7):
        for k in range(1, 200):
            x = Fraction(k, 400)
            assert new_sufficient_boundary(x, n) <= kohen_sufficient_boundary(x, n)
            assert necessary_boundary(x, n) <= new_sufficient_boundary(x, n)


def test_no_contradictions_sweep():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        n = int(rng.integers(2, 7))
        p = float(1.0 / rng.uniform(1e-3, 0.999))
        a = float(rng.uniform(-3, 1.5))
        v = classify(RegionQuery(n, p, a))
        x = 1 / p
        if v.status is Status.PROVEN_BOUNDED:
            assert a >= necessary_boundary(x, n)
        if v.status is Status.PROVEN_UNBOUNDED:
            assert a <= new_sufficient_boundary(x, n)


def test_csv_roundtrip():
    text = emit_region_csv(3, np.arange(1, 16) / 16, "hypmax test")
    assert text.startswith("# hypmax test\n")
    data, labels = read_region_csv(text)
    rows = region_rows(3, np.arange(1, 16) / 16)
    assert np.array_equal(data, np.array(rows))
    assert [l for l in labels if l] == ["O", "C", "D", "B", "A"]
    with pytest.raises(DomainError):
        region_rows(3, [0.0, 0.5])
