from fractions import Fraction

import pytest

from affgfm.errors import UnsupportedFamilyRank, ZeroWeight
from affgfm.rootsys import build_root_system, invert_matrix, make_weight

CARTAN = {
    ("A", 2): ((2, -1), (-1, 2)),
    ("B", 3): ((2, -1, 0), (-1, 2, -2), (0, -1, 2)),
    ("C", 3): ((2, -1, 0), (-1, 2, -1), (0, -2, 2)),
    ("G", 2): ((2, -1), (-3, 2)),
}
def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


POSITIVE_ROOTS = {("A", 1): 1, ("A", 2): 3, ("A", 3): 6, ("B", 3): 9, ("C", 3): 9, ("G", 2): 6, ("D", 4): 12}


@pytest.mark.parametrize("family,rank", sorted(CARTAN))
def test_cartan_matrix(family, rank):
    rs = build_root_system(family, rank)
    assert rs.cartan == CARTAN[(family, rank)]
    # a_ij = (alpha_i, alpha_j^vee) in the ambient space
    for i, a in enumerate(rs.simple_roots):
        for j, c in enumerate(rs.coroots):
            assert _dot(a, c) == rs.cartan[i][j]


@pytest.mark.parametrize("family,rank", sorted(POSITIVE_ROOTS))
def test_positive_root_count(family, rank):
    assert len(build_root_system(family, rank).positive_roots) == POSITIVE_ROOTS[(family, rank)]


@pytest.mark.parametrize("family,rank", [("A", 3), ("B", 3), ("C", 3), ("G", 2)])
def test_fundamental_weights_are_dual_to_coroots(family, rank):
    rs = build_root_system(family, rank)
    for i, w in enumerate(rs.fundamental_weights):
        for j, c in enumerate(rs.coroots):
            assert _dot(rs.ambient(w), c) == (1 if i == j else 0)


def test_invert_matrix():
    m = [[Fraction(2), Fraction(-1)], [Fraction(-1), Fraction(2)]]
    inv = invert_matrix(m)
    assert inv == ((Fraction(2, 3), Fraction(1, 3)), (Fraction(1, 3), Fraction(2, 3)))


def test_weight_a2():
    wc = make_weight(build_root_system("A", 2), (0, 1))
    assert wc.theta == (Fraction(1, 3), Fraction(2, 3))
    assert wc.kappa == 1
    assert wc.S == frozenset({1})


def test_weight_a1_has_half_degree():
    wc = make_weight(build_root_system("A", 1), (1,))
    assert wc.theta == (Fraction(1, 2),)
    assert wc.kappa == 1


def test_zero_weight_rejected():
    with pytest.raises(ZeroWeight):
        make_weight(build_root_system("B", 3), (0, 0, 0))


@pytest.mark.parametrize("family,rank", [("E", 6), ("G", 3), ("B", 1), ("A", 0)])
def test_unsupported(family, rank):
    with pytest.raises(UnsupportedFamilyRank):
        build_root_system(family, rank)
