"""Canonical text for coefficients, polynomials and rational functions."""

import pytest

from affgfm.numbers import format_coeff, parse_coeff, quadratic_field
from affgfm.polys import format_poly, format_rational, parse_poly, parse_rational, tfield, zring

K2 = quadratic_field(2)


@pytest.mark.parametrize("text", ["0", "-3/2", "sqrt(2)", "-sqrt(2)", "1+sqrt(2)", "3/2-5*sqrt(2)", "-1/3*sqrt(2)"])
def test_coeff_round_trip(text):
    assert format_coeff(parse_coeff(text, K2), K2) == text


@pytest.mark.parametrize(
    "text",
    [
        "-2/3*z1^2 + 2*z2",
        "-1/3*z1*z2 + 3*lam",
        "(1+sqrt(2))*z2^2 + sqrt(2)*z1",
        "(3/2-5*sqrt(2))*z1*z2 + 1-sqrt(2)",
    ],
)
def test_poly_round_trip(text):
    R = zring(2, K2)
    assert format_poly(parse_poly(text, R)) == text


def test_poly_is_canonicalized():
    R = zring(2)
    assert format_poly(parse_poly("z2*2 + z1^2*(-2/3)", R)) == "-2/3*z1^2 + 2*z2"


@pytest.mark.parametrize(
    "text",
    ["-1/t1", "1/24*t1^3/t3", "(t1 + t2)/t3^2", "-2/3/(t1^2 + 2/3*t2)", "t1^2 - t2"],
)
def test_rational_round_trip(text):
    assert format_rational(parse_rational(text, tfield(3))) == text


def test_rational_is_reduced():
    assert format_rational(parse_rational("(t1^2 - t2^2)/(t1 - t2)", tfield(2))) == "t1 + t2"
