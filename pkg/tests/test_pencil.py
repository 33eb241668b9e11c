import pytest
import sympy

from affgfm.errors import GFMError, ValidationError
from affgfm.invariants import basic_generators
from affgfm.numbers import format_coeff
from affgfm.pencil import check_proper, generator_set_from_coefficients, proper_ansatz, solve_pencil
from affgfm.rootsys import build_root_system, make_weight
from affgfm.weylgroup import generate_group


def _family(family, rank, marks):
    rs = build_root_system(family, rank)
    wc = make_weight(rs, marks)
    group = generate_group(rs)
    return rs, wc, group, proper_ansatz(basic_generators(rs, wc, group), wc)


@pytest.mark.parametrize(
    "family,rank,marks,unknowns",
    [("A", 1, (1,), 0), ("A", 2, (0, 1), 0), ("B", 3, (1, 0, 0), 2), ("C", 3, (0, 0, 1), 2), ("G", 2, (0, 1), 3), ("A", 3, (1, 0, 1), 3)],
)
def test_ansatz_size(family, rank, marks, unknowns):
    assert _family(family, rank, marks)[3].m == unknowns


def test_basic_generators_are_already_a_pencil():
    rs, wc, group, fam = _family("A", 2, (0, 1))
    (gs,) = solve_pencil(rs, wc, fam, group)
    assert gs.provenance == "basic"
    assert gs.g is not None and gs.eta is not None


def test_a3_has_two_solutions():
    rs, wc, group, fam = _family("A", 3, (1, 0, 1))
    found = solve_pencil(rs, wc, fam, group)
    assert len(found) == 2
    for gs in found:
        assert check_proper(gs.z, fam.gens, wc, group)
    assert len({tuple(format_coeff(c) for c in gs.coefficients) for gs in found}) == 2


def test_b3_has_three_solutions():
    rs, wc, group, fam = _family("B", 3, (1, 0, 0))
    assert len(solve_pencil(rs, wc, fam, group)) == 3


def test_pinned_coefficients_round_trip():
    rs, wc, group, fam = _family("A", 3, (1, 0, 1))
    first = solve_pencil(rs, wc, fam, group)[0]
    again = generator_set_from_coefficients(rs, wc, fam, first.coefficients, group)
    assert again.z == first.z


def test_wrong_coefficient_count():
    rs, wc, group, fam = _family("B", 3, (1, 0, 0))
    with pytest.raises(ValidationError):
        generator_set_from_coefficients(rs, wc, fam, [sympy.Integer(1)], group)


def test_wrong_coefficients_fail():
    rs, wc, group, fam = _family("B", 3, (1, 0, 0))
    with pytest.raises(GFMError):
        generator_set_from_coefficients(rs, wc, fam, [sympy.Integer(7), sympy.Integer(-3)], group)
