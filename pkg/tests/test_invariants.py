from fractions import Fraction

import pytest

from affgfm.errors import NotInvariant
from affgfm.invariants import basic_generators, jacobian_determinant, rewrite_in_generators, verify_leading_terms
from affgfm.lfourier import FourierPoly, grade, is_invariant
from affgfm.rootsys import build_root_system, make_weight
from affgfm.weylgroup import generate_group

CASES = [
    ("A", 1, (1,)),
    ("A", 2, (0, 1)),
    ("B", 3, (1, 0, 0)),
    ("C", 3, (0, 0, 1)),
    ("G", 2, (0, 1)),
    ("A", 3, (1, 0, 1)),
]


def _setup(family, rank, marks):
    rs = build_root_system(family, rank)
    wc = make_weight(rs, marks)
    group = generate_group(rs)
    return rs, wc, group, basic_generators(rs, wc, group)


@pytest.mark.parametrize("family,rank,marks", CASES)
def test_basic_generators(family, rank, marks):
    rs, wc, group, gens = _setup(family, rank, marks)
    assert gens.degrees == wc.theta
    for y, d in zip(gens.y, gens.degrees):
        assert is_invariant(y, group, wc)
        assert grade(y, wc) == d
    assert verify_leading_terms(gens.y, wc).passed


@pytest.mark.parametrize("family,rank,marks", CASES)
def test_jacobian_closed_form(family, rank, marks):
    rs, wc, _, gens = _setup(family, rank, marks)
    report = jacobian_determinant(gens.y, rs, wc)
    assert report.matches
    assert report.null_matches


def test_a1_generator():
    _, _, _, gens = _setup("A", 1, (1,))
    # y = X + lam X^{-1} with the root of degree kappa = 1
    want = FourierPoly.monomial(1, (1,)) + FourierPoly.monomial(1, (-1,), Fraction(1))
    assert gens.y[0] == want


def test_rewrite_round_trip():
    rs, wc, group, gens = _setup("A", 2, (0, 1))
    y1, y2 = gens.y
    f = y1 * y1 * y1 + FourierPoly.lam(2) * y2 * y1 - y2 * y2 * FourierPoly.lam(2, 0)
    p = rewrite_in_generators(f, gens.y, wc, rs, group)
    assert str(p.as_expr()) == "lam*z1*z2 + z1**3 - z2**2"


def test_rewrite_rejects_non_invariant():
    rs, wc, group, gens = _setup("A", 2, (0, 1))
    with pytest.raises(NotInvariant):
        rewrite_in_generators(FourierPoly.monomial(2, (1, 0)), gens.y, wc, rs, group)
