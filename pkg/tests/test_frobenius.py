"""Potentials checked by a direct sympy computation on the packaged reports."""

import itertools
import json
from fractions import Fraction
from importlib import resources

import pytest
import sympy

from affgfm.catalog import CATALOG_IDS
from affgfm.frobenius import verify_gfm, verify_properties


def _golden(case_id):
    return json.loads(resources.files("affgfm").joinpath(f"golden/v1/{case_id}.json").read_text(encoding="utf-8"))


def _potential(data):
    n = data["root_data"]["rank"]
    ts = sympy.symbols(" ".join(f"t{i + 1}" for i in range(n)), seq=True)
    F = sympy.sympify(data["frobenius"]["F"].replace("^", "**"), locals={str(t): t for t in ts})
    eta = sympy.Matrix([[sympy.sympify(x) for x in row] for row in data["chart"]["eta_normal"]])
    return ts, F, eta


@pytest.mark.parametrize("case_id", CATALOG_IDS)
def test_wdvv_oracle(case_id):
    ts, F, eta = _potential(_golden(case_id))
    n = len(ts)
    # eta_normal is the contravariant eta^{ab}, the one WDVV contracts with
    upper = eta
    third = {
        idx: sympy.diff(F, *(ts[i] for i in idx)) for idx in itertools.combinations_with_replacement(range(n), 3)
    }
    F3 = lambda a, b, c: third[tuple(sorted((a, b, c)))]
    for a, b, c, d in itertools.product(range(n), repeat=4):
        lhs = sum(F3(a, b, e) * upper[e, f] * F3(f, c, d) for e in range(n) for f in range(n))
        rhs = sum(F3(a, c, e) * upper[e, f] * F3(f, b, d) for e in range(n) for f in range(n))
        assert sympy.cancel(lhs - rhs) == 0, (a, b, c, d)


@pytest.mark.parametrize("case_id", CATALOG_IDS)
def test_quasi_homogeneity_oracle(case_id):
    data = _golden(case_id)
    ts, F, _ = _potential(data)
    kappa = Fraction(data["weight"]["kappa"])
    d = [Fraction(x) for x in data["chart"]["d"]]
    euler = sum(sympy.Rational(x / kappa) * t * sympy.diff(F, t) for x, t in zip(d, ts))
    assert sympy.cancel(euler - 2 * F) == 0


@pytest.mark.parametrize("case_id", ["a1-w1", "a2-w2", "g2-w2", "c3-w3"])
def test_verification_suites(built, case_id):
    data = built(case_id, checks=False).frobenius
    for check in verify_gfm(data) + verify_properties(data):
        assert check.passed, f"{check.name}: {check.witness}"


def test_a2_potential(built):
    r = built("a2-w2")
    assert r.report["frobenius"]["F"] == "-3/80*t1^6 + 1/8*t1^4*t2 - 1/4*t1^2*t2^2 + 1/18*t2^3"
    assert r.frobenius.unit_form == "-dlog(z2)"
