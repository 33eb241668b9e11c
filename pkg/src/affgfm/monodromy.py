"""The monodromy bound Stab(omega) ⋊ Z^l and a chart-based triviality probe.

The probe is a heuristic classifier, not a decision procedure:

* ``EqualsBound`` when the chart t -> z has a polynomial inverse, so the flat
  coordinates are single valued on the orbit space;
* ``ProperSubgroupPossible`` when det eta(z) vanishes identically on the
  mirror of some stabilizer reflection (restricted to lambda = 0).  The flat
  coordinates then branch along that mirror and the reflection may act on
  them nontrivially;
* ``Undetermined`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Any, Sequence

import sympy

from .flatcoords import FlatChart, compose, weighted_monomials
from .lfourier import FourierPoly, null_part
from .polys import PolyMatrix, det, zring
from .rootsys import WeightChoice
from .weylgroup import IntMatrix, WeylGroup, generated_subgroup, stabilizer

EQUALS_BOUND = "EqualsBound"
PROPER_SUBGROUP_POSSIBLE = "ProperSubgroupPossible"
UNDETERMINED = "Undetermined"
LABEL_ORDER_LIMIT = 64


@dataclass
class MonodromyBound:
    stab_generators: tuple[int, ...]  # 0-based simple reflection indices
    stab_order: int
    group_label: str
    bound_statement: str
    bound_label: str
    triviality: str
    witness: str = ""
    heuristic: bool = True
    annotation: str | None = None
    notes: list[str] = field(default_factory=list)


# -- group recognition -----------------------------------------------------------


def _matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def _element_order(m: IntMatrix, identity: IntMatrix) -> int:
    k, p = 1, m
    while p != identity:
        p = _matmul(p, m)
        k += 1
    return k


def _invariant_factor_lists(n: int, smallest: int = 2) -> list[list[int]]:
    """Chains n1 | n2 | ... with product n."""
    if n == 1:
        return [[]]
    out = []
    for f in range(smallest, n + 1):
        if n % f == 0:
            for rest in _invariant_factor_lists(n // f, f):
                if not rest or rest[0] % f == 0:
                    out.append([f] + rest)
    return out


def _order_profile(factors: Sequence[int]) -> list[int]:
    orders = [1]
    for f in factors:
        orders = [_lcm(o, f // gcd(f, k)) for o in orders for k in range(f)]
    return sorted(orders)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _abelian_label(elements: Sequence[IntMatrix], identity: IntMatrix) -> str:
    """Match the multiset of element orders against every invariant-factor chain."""
    profile = sorted(_element_order(m, identity) for m in elements)
    for factors in _invariant_factor_lists(len(elements)):
        if _order_profile(factors) == profile:
            return " x ".join(f"Z{f}" for f in factors)
    return f"order {len(elements)}"


def _component_label(elements: list[IntMatrix], identity: IntMatrix) -> str:
    n = len(elements)
    if n == 1:
        return "{e}"
    if n > LABEL_ORDER_LIMIT:
        return f"order {n}"
    abelian = all(_matmul(a, b) == _matmul(b, a) for a, b in combinations(elements, 2))
    if abelian:
        return _abelian_label(elements, identity)
    half = n // 2
    rotations = [m for m in elements if _element_order(m, identity) == half]
    if n % 2 == 0 and rotations:
        r = rotations[0]
        cyclic = {identity}
        p = r
        while p != identity:
            cyclic.add(p)
            p = _matmul(p, r)
        if all(_element_order(m, identity) == 2 for m in elements if m not in cyclic):
            return f"D{half}"
    return f"order {n}"


def _components(group: WeylGroup, gens: Sequence[int]) -> list[list[int]]:
    """Connected components of the Coxeter graph restricted to ``gens``."""
    cartan = group.rs.cartan
    left = list(gens)
    out = []
    while left:
        comp = [left.pop(0)]
        grew = True
        while grew:
            grew = False
            for j in list(left):
                if any(cartan[i][j] or cartan[j][i] for i in comp):
                    comp.append(j)
                    left.remove(j)
                    grew = True
        out.append(sorted(comp))
    return out


def group_label(group: WeylGroup, gens: Sequence[int]) -> str:
    """Cyclic, dihedral or product-of-those label for a parabolic subgroup."""
    n = group.rs.rank
    identity = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
    if not gens:
        return "{e}"
    parts = []
    for comp in _components(group, gens):
        elements = sorted(generated_subgroup(group, comp))
        parts.append(_component_label(elements, identity))
    return " x ".join(parts)


# -- probes ----------------------------------------------------------------------


def polynomial_inverse(chart: FlatChart, theta: Sequence[Fraction]) -> list[Any] | None:
    """t^a as polynomials in z, found by matching weighted coefficients; None if impossible."""
    n = chart.rank
    T = chart.ring
    K = chart.domain
    Z = zring(n, K, with_lambda=False)
    out = []
    for a in range(n):
        monos = weighted_monomials(theta, chart.d[a])
        if not monos:
            return None
        cs = sympy.symbols(f"c1:{len(monos) + 1}")
        images = [compose(Z.from_dict({m: K.one}), chart.P, T) for m in monos]
        target = T.gens[a]
        keys = set(target.monoms())
        for img in images:
            keys.update(img.monoms())
        eqs = []
        for key in sorted(keys):
            lhs = sum((c * K.to_sympy(img.to_dict().get(key, K.zero)) for c, img in zip(cs, images)), sympy.Integer(0))
            rhs = K.to_sympy(target.to_dict().get(key, K.zero))
            eqs.append(sympy.expand(lhs - rhs))
        sol = sympy.linsolve(eqs, cs)
        if not sol:
            return None
        values = next(iter(sol))
        values = [v.subs({c: 0 for c in cs}) for v in values]
        out.append(Z.from_dict({m: K.from_sympy(v) for m, v in zip(monos, values) if v != 0}))
    return out


def _restrict_to_mirror(f: FourierPoly, cartan, j: int) -> FourierPoly:
    """Null part of f on the mirror sum_c cartan[j][c] x_c = 0, in half-frequency variables."""
    ell = f.ell
    terms = {}
    for (q, a), c in f.terms.items():
        if q:
            continue
        b = tuple(0 if k == j else 2 * a[k] - a[j] * cartan[j][k] for k in range(ell))
        key = (Fraction(0), b)
        terms[key] = terms[key] + c if key in terms else c
    return FourierPoly(ell, terms)


def _evaluate(p, values: Sequence[FourierPoly]) -> FourierPoly:
    ell = values[0].ell
    out = FourierPoly(ell)
    cache: dict = {}
    for monom, c in p.terms():
        term = FourierPoly.constant(ell, c)
        for k, e in enumerate(monom):
            if e:
                if (k, e) not in cache:
                    cache[(k, e)] = values[k] ** e
                term = term * cache[(k, e)]
        out = out + term
    return out


def mirror_branching(eta: PolyMatrix, z: Sequence[FourierPoly], group: WeylGroup, j: int, K) -> bool:
    """True when det eta(z|_0) vanishes identically on the mirror of sigma_j."""
    D = det(eta)
    restricted = [_restrict_to_mirror(null_part(zr).map_coeffs(K.convert), group.rs.cartan, j) for zr in z]
    return not _evaluate(D, restricted)


def monodromy_bound(
    group: WeylGroup,
    wc: WeightChoice,
    chart: FlatChart,
    z: Sequence[FourierPoly],
    eta: PolyMatrix,
    annotation: str | None = None,
) -> MonodromyBound:
    ell = wc.rank
    stab = stabilizer(group, wc)
    label = group_label(group, stab.generators)
    bound_label = f"{label} ⋊ Z^{ell}"
    statement = f"Mono ≤ Stab(ω) ⋊ Z^{ell}"
    result = MonodromyBound(
        stab_generators=stab.generators,
        stab_order=stab.order,
        group_label=label,
        bound_statement=statement,
        bound_label=bound_label,
        triviality=UNDETERMINED,
        annotation=annotation,
    )
    K = eta[0][0].ring.domain
    branching = [j for j in stab.generators if mirror_branching(eta, z, group, j, K)]
    if branching:
        result.triviality = PROPER_SUBGROUP_POSSIBLE
        names = ", ".join(f"sigma{j + 1}" for j in branching)
        result.witness = f"det eta(z|lam=0) vanishes on the mirror of {names}"
        return result
    inverse = polynomial_inverse(chart, wc.theta)
    if inverse is not None:
        result.triviality = EQUALS_BOUND
        result.witness = "the chart has a polynomial inverse"
    return result
