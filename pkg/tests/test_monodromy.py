from fractions import Fraction

import pytest

from affgfm.flatcoords import chart_from_text
from affgfm.monodromy import group_label, polynomial_inverse
from affgfm.polys import format_poly
from affgfm.rootsys import build_root_system
from affgfm.weylgroup import generate_group


@pytest.mark.parametrize(
    "family,rank,gens,label",
    [
        ("A", 2, (0,), "Z2"),
        ("B", 3, (1, 2), "D4"),
        ("C", 3, (0, 1), "D3"),
        ("A", 3, (0, 2), "Z2 x Z2"),
        ("G", 2, (0, 1), "D6"),
        ("A", 3, (), "{e}"),
    ],
)
def test_group_label(family, rank, gens, label):
    assert group_label(generate_group(build_root_system(family, rank)), gens) == label


def test_polynomial_inverse_a2():
    chart = chart_from_text(["3*t1", "3/2*t1^2 + t2"], [Fraction(1, 3), Fraction(2, 3)])
    inv = polynomial_inverse(chart, [Fraction(1, 3), Fraction(2, 3)])
    assert [format_poly(p) for p in inv] == ["1/3*z1", "-1/6*z1^2 + z2"]


def test_no_polynomial_inverse_below_generator_degrees():
    # t1 has degree 1/2, below every generator degree
    chart = chart_from_text(["t1^2", "t2"], [Fraction(1, 2), Fraction(1)])
    assert polynomial_inverse(chart, [Fraction(1), Fraction(1)]) is None


@pytest.mark.parametrize(
    "case_id,label,triviality",
    [
        ("a1-w1", "{e}", "EqualsBound"),
        ("a2-w2", "Z2", "EqualsBound"),
        ("a3-w1w3", "Z2", "Undetermined"),
        ("g2-w2", "Z2", "ProperSubgroupPossible"),
    ],
)
def test_bounds(built, case_id, label, triviality):
    mono = built(case_id, checks=False).report["monodromy"]
    assert mono["group_label"] == label
    assert mono["heuristic"] is True
    assert mono["triviality"] == triviality
    # a verdict other than Undetermined always names its evidence
    assert bool(mono["witness"]) == (triviality != "Undetermined")
