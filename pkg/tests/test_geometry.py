"""Curvature and Christoffel symbols against a direct sympy computation.

The oracle lowers the metric, builds the Levi-Civita connection from the
textbook formula and simplifies every Riemann component with ``cancel``.
"""

import json
from importlib import resources

import pytest
import sympy

from affgfm.geometry import check_linearity, christoffel_relations, contravariant_christoffel, curvature_is_zero
from affgfm.numbers import quadratic_field
from affgfm.polys import parse_poly, zring


def _golden(case_id):
    text = resources.files("affgfm").joinpath(f"golden/v1/{case_id}.json").read_text(encoding="utf-8")
    return json.loads(text)


def _radicand(name):
    return 1 if name == "Q" else int(name[len("Q(sqrt(") : -2])


def _poly_matrix(rows, ell, radicand):
    R = zring(ell, quadratic_field(radicand), with_lambda=False)
    return [[parse_poly(x, R) for x in row] for row in rows]


def _sympy_matrix(rows):
    return sympy.Matrix([[sympy.sympify(x.replace("^", "**")) for x in row] for row in rows])


def _levi_civita(contra, xs):
    n = len(xs)
    lower = contra.inv()
    return [
        [
            [
                sympy.cancel(
                    sum(contra[k, l] * (sympy.diff(lower[l, j], xs[i]) + sympy.diff(lower[l, i], xs[j]) - sympy.diff(lower[i, j], xs[l])) for l in range(n))
                    / 2
                )
                for j in range(n)
            ]
            for i in range(n)
        ]
        for k in range(n)
    ]


def oracle_flat(contra, xs):
    n = len(xs)
    G = _levi_civita(contra, xs)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    r = sympy.diff(G[a][d][b], xs[c]) - sympy.diff(G[a][c][b], xs[d])
                    r += sum(G[a][c][e] * G[e][d][b] - G[a][d][e] * G[e][c][b] for e in range(n))
                    if sympy.cancel(r) != 0:
                        return False
    return True


def _symbols(n):
    return sympy.symbols(" ".join(f"z{i + 1}" for i in range(n)))


@pytest.mark.parametrize("case_id", ["a2-w2", "g2-w2", "b3-w1-k2", "c3-w3"])
@pytest.mark.parametrize("which", ["g", "eta"])
def test_flat_against_oracle(case_id, which):
    data = _golden(case_id)
    ell = data["root_data"]["rank"]
    rows = data["metrics"][which]
    xs = _symbols(ell)
    assert oracle_flat(_sympy_matrix(rows), xs)
    assert curvature_is_zero(_poly_matrix(rows, ell, _radicand(data["generators"]["field"])))


@pytest.mark.parametrize("case_id", ["a2-w2", "g2-w2"])
def test_pencil_member_flat(case_id):
    data = _golden(case_id)
    xs = _symbols(2)
    g, eta = _sympy_matrix(data["metrics"]["g"]), _sympy_matrix(data["metrics"]["eta"])
    assert oracle_flat(g + sympy.Rational(3, 7) * eta, xs)


def test_curved_metric_detected():
    rows = [["1", "0"], ["0", "1 + z1^2"]]
    assert not oracle_flat(_sympy_matrix(rows), _symbols(2))
    assert not curvature_is_zero(_poly_matrix(rows, 2, 1))


def test_christoffel_matches_oracle():
    data = _golden("a2-w2")
    rows = data["metrics"]["g"]
    contra = _sympy_matrix(rows)
    xs = _symbols(2)
    lc = _levi_civita(contra, xs)
    ours = contravariant_christoffel(_poly_matrix(rows, 2, 1))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                # Gamma_k^{ij} = -g^{is} Gamma^j_{sk}
                want = -sum(contra[i, s] * lc[j][s][k] for s in range(2))
                got = sympy.sympify(str(ours.gamma[k][i][j].as_expr()))
                assert sympy.cancel(want - got) == 0


def test_christoffel_relations():
    data = _golden("g2-w2")
    metric = _poly_matrix(data["metrics"]["g"], 2, 1)
    rel = christoffel_relations(metric, contravariant_christoffel(metric))
    assert rel == {"metric_compatibility": True, "torsion_free": True}


def test_linearity():
    data = _golden("a2-w2")
    g = _poly_matrix(data["metrics"]["g"], 2, 1)
    eta = _poly_matrix(data["metrics"]["eta"], 2, 1)
    assert check_linearity(g, eta)
    assert not check_linearity(g, _poly_matrix([["1", "z1"], ["z1", "z2"]], 2, 1))
