from fractions import Fraction

import pytest

from affgfm.catalog import get_case, with_policy
from affgfm.flatcoords import (
    chart_from_text,
    check_homogeneity,
    connecting_transformation,
    degree_spectrum,
    verify_chart,
    weighted_monomials,
)
from affgfm.pipeline import build_case

F = Fraction


def test_weighted_monomials():
    got = weighted_monomials([F(1, 3), F(2, 3)], F(4, 3))
    assert sorted(got) == [(0, 2), (2, 1), (4, 0)]


def test_degree_spectrum_a2(built):
    r = built("a2-w2")
    spec = degree_spectrum(r.generators.eta, [F(1, 3), F(2, 3)], F(1))
    assert spec.d == (F(1, 3), F(2, 3))
    assert spec.pairing == (1, 0)


def test_recorded_chart_flattens_eta(built):
    r = built("a2-w2")
    chart = chart_from_text(["3*t1", "3/2*t1^2 + t2"], [F(1, 3), F(2, 3)])
    assert verify_chart(chart, r.generators.eta).passed
    assert check_homogeneity(chart, [F(1, 3), F(2, 3)])


def test_wrong_chart_rejected(built):
    r = built("a2-w2")
    chart = chart_from_text(["3*t1", "t1^2 + t2"], [F(1, 3), F(2, 3)])
    check = verify_chart(chart, r.generators.eta)
    assert not check.passed and check.witness


def test_inhomogeneous_chart():
    chart = chart_from_text(["3*t1", "t1 + t2"], [F(1, 3), F(2, 3)])
    assert not check_homogeneity(chart, [F(1, 3), F(2, 3)])


def test_connection_is_a_rescaling():
    a = chart_from_text(["t1", "1/6*t1^2 + 3*t2"], [F(1, 3), F(2, 3)])
    b = chart_from_text(["3*t1", "3/2*t1^2 + t2"], [F(1, 3), F(2, 3)])
    conn = connecting_transformation(a, b)
    assert conn is not None
    assert conn.perm == (0, 1)
    assert conn.text() == "t1 -> 3*t1, t2 -> 1/3*t2"


def test_unrelated_charts_have_no_connection():
    a = chart_from_text(["t1", "t1^2 + t2"], [F(1, 3), F(2, 3)])
    b = chart_from_text(["t1", "t2"], [F(1, 3), F(2, 3)])
    assert connecting_transformation(a, b) is None


def _solved(case_id):
    r = build_case(with_policy(get_case(case_id), "solve"), with_checks=False)[0]
    return r, r.report["chart"]


@pytest.mark.parametrize("case_id", ["a1-w1", "a2-w2", "g2-w2", "a3-w1w3", "b3-w1-k2", "b3-w1-k3", "c3-w3"])
def test_solved_chart_connects_to_recorded(case_id):
    r, chart = _solved(case_id)
    assert chart["policy"] == "solve"
    assert verify_chart(r.chart, r.generators.eta).passed
    assert chart["connection_to_recorded_chart"]


@pytest.mark.slow
def test_solved_chart_b3_k1_needs_sixth_roots():
    r, chart = _solved("b3-w1-k1")
    assert verify_chart(r.chart, r.generators.eta).passed
    assert "3**(1/6)" in chart["connection_to_recorded_chart"]
