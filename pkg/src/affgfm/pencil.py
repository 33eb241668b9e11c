"""Proper-generator ansatz z^j = y^j + lambda s^j and the pencil-generator search."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Sequence

import sympy
from sympy import QQ
from sympy.polys.rings import PolyRing

from .elimination import require_solutions, solve_system
from .errors import (
    DegenerateEta,
    NoSolution,
    NotLinearInLambda,
    SolverCapExceeded,
    ValidationError,
)
from .geometry import check_linearity, pushforward_metric, split_pencil
from .invariants import BasicGenerators, substitute_generators
from .lfourier import FourierPoly, grade, is_invariant, null_part
from .numbers import format_coeff, quadratic_field, to_fraction
from .polys import PolyMatrix, zring
from .rootsys import RootSystem, WeightChoice
from .weylgroup import WeylGroup

DEFAULT_UNKNOWN_CAP = 12


@dataclass(frozen=True)
class AnsatzMonomial:
    """lambda^k * prod y_r^{b_r} inside s^j (all indices 0-based)."""

    j: int
    k: int
    b: tuple[int, ...]


@dataclass
class AnsatzFamily:
    gens: BasicGenerators
    monomials: list[AnsatzMonomial]
    ring: PolyRing | None
    z: list[FourierPoly]
    s: list[Any]

    @property
    def m(self) -> int:
        return len(self.monomials)

    def symbols(self) -> list[sympy.Symbol]:
        return [sympy.Symbol(f"u{i + 1}") for i in range(self.m)]


@dataclass
class GeneratorSet:
    z: list[FourierPoly]
    s: list[Any]
    provenance: str
    coefficients: tuple = ()
    radicand: int = 1
    g: PolyMatrix | None = field(default=None, repr=False)
    eta: PolyMatrix | None = field(default=None, repr=False)

    @property
    def domain(self):
        return quadratic_field(self.radicand)

    def coefficient_text(self) -> list[str]:
        return [format_coeff(c) for c in self.coefficients]


def _exponent_vectors(theta: Sequence[Fraction], kappa: Fraction, j: int):
    """(k, b) with kappa k + sum theta_r b_r = theta_j - kappa and b_r > 0 only if theta_r < theta_j."""
    target = theta[j] - kappa
    if target < 0:
        return []
    allowed = [r for r in range(len(theta)) if theta[r] < theta[j]]
    bounds = [int(target / theta[r]) for r in allowed]
    out = []
    for combo in product(*(range(n + 1) for n in bounds)):
        used = sum((theta[r] * e for r, e in zip(allowed, combo)), Fraction(0))
        rest = target - used
        if rest < 0 or (rest / kappa).denominator != 1:
            continue
        b = [0] * len(theta)
        for r, e in zip(allowed, combo):
            b[r] = e
        out.append((int(rest / kappa), tuple(b)))
    return sorted(out, key=lambda kb: (kb[0], tuple(-e for e in kb[1])))


def proper_ansatz(gens: BasicGenerators, wc: WeightChoice) -> AnsatzFamily:
    """One unknown per admissible monomial, ordered by generator index then (lambda power, y exponents)."""
    ell = wc.rank
    monomials = [
        AnsatzMonomial(j, k, b) for j in range(ell) for k, b in _exponent_vectors(wc.theta, wc.kappa, j)
    ]
    if not monomials:
        Rs = zring(ell, QQ, prefix="y")
        ys = [y.map_coeffs(QQ.convert) for y in gens.y]
        return AnsatzFamily(gens=gens, monomials=[], ring=None, z=ys, s=[Rs.zero] * ell)
    Ku = PolyRing([f"u{i + 1}" for i in range(len(monomials))], QQ)
    D = Ku.to_domain()
    Rs = zring(ell, D, prefix="y")
    ys = [y.map_coeffs(D.convert) for y in gens.y]
    s = [Rs.zero] * ell
    for idx, mono in enumerate(monomials):
        s[mono.j] = s[mono.j] + Rs.from_dict({(mono.k + 1,) + mono.b: D.convert(Ku.gens[idx])}) * 1
    # s^j carries the extra lambda already; z^j = y^j + (that polynomial evaluated on y)
    z = [ys[j] + substitute_generators(s[j], ys) for j in range(ell)]
    s = [_drop_one_lambda(p) for p in s]
    return AnsatzFamily(gens=gens, monomials=monomials, ring=Ku, z=z, s=s)


def _drop_one_lambda(p):
    R = p.ring
    return R.from_dict({(m[0] - 1,) + m[1:]: c for m, c in p.terms()}) if p else p


def _specialize(family: AnsatzFamily, values: Sequence[sympy.Expr], radicand: int):
    """Concrete z and s over Q(sqrt d) for one coefficient assignment."""
    K = quadratic_field(radicand)
    ell = len(family.z)
    ys = [y.map_coeffs(K.convert) for y in family.gens.y]
    Rs = zring(ell, K, prefix="y")
    if family.ring is None:
        return ys, [Rs.zero] * ell
    point = dict(zip(family.ring.symbols, values))
    s = []
    for p in family.s:
        terms = {m: K.from_sympy(sympy.expand(c.as_expr().subs(point))) for m, c in p.terms()}
        s.append(Rs.from_dict({m: c for m, c in terms.items() if c}))
    lam = Rs.gens[0]
    z = [ys[j] + substitute_generators(lam * s[j], ys) for j in range(ell)]
    return z, s


def check_proper(z: Sequence[FourierPoly], gens: BasicGenerators, wc: WeightChoice, group: WeylGroup) -> bool:
    """Invariance, homogeneity of degree theta_j and unchanged null parts."""
    for j, zj in enumerate(z):
        if not is_invariant(zj, group, wc) or grade(zj, wc) != wc.theta[j]:
            return False
        try:
            z0 = {k: to_fraction(c) for k, c in null_part(zj).terms.items()}
        except ValueError:
            return False
        if z0 != null_part(gens.y[j]).terms:
            return False
    return True


def _metric_pair(z, rs, wc, group, radicand):
    G = pushforward_metric(z, rs, wc, group=group, domain=quadratic_field(radicand))
    return split_pencil(G)


def generator_set_from_coefficients(
    rs: RootSystem,
    wc: WeightChoice,
    family: AnsatzFamily,
    values: Sequence[Any],
    group: WeylGroup,
    provenance: str = "catalog",
    radicand: int = 1,
) -> GeneratorSet:
    """Pin one coefficient assignment and verify it yields pencil generators."""
    if len(values) != family.m:
        raise ValidationError(f"expected {family.m} pencil coefficients, got {len(values)}")
    exprs = [sympy.nsimplify(v) if not isinstance(v, sympy.Expr) else v for v in values]
    z, s = _specialize(family, exprs, radicand)
    g, eta = _metric_pair(z, rs, wc, group, radicand)
    if not check_linearity(g, eta):
        raise NoSolution("the Christoffel symbols of the pencil are not affine in lambda")
    return GeneratorSet(
        z=z, s=s, provenance=provenance, coefficients=tuple(exprs), radicand=radicand, g=g, eta=eta
    )


def _lambda_equations(family: AnsatzFamily, rs, wc) -> list[sympy.Expr]:
    D = family.ring.to_domain()
    G = pushforward_metric(family.z, rs, wc, group=None, domain=D)
    eqs = []
    seen = set()
    for row in G:
        for entry in row:
            for monom, c in entry.terms():
                if monom[0] >= 2:
                    e = sympy.expand(c.as_expr())
                    if e != 0 and e not in seen:
                        seen.add(e)
                        eqs.append(e)
    return eqs


def _value_key(values: Sequence[sympy.Expr]) -> tuple:
    return tuple(float(v) for v in values)


def solve_pencil(
    rs: RootSystem,
    wc: WeightChoice,
    family: AnsatzFamily,
    group: WeylGroup,
    radicands: Sequence[int] = (1,),
    cap: int = DEFAULT_UNKNOWN_CAP,
) -> list[GeneratorSet]:
    """Every assignment of the ansatz unknowns that yields pencil generators."""
    if family.m > cap:
        raise SolverCapExceeded(f"{family.m} unknowns exceed the cap {cap}")
    if family.m == 0:
        try:
            g, eta = _metric_pair(family.z, rs, wc, group, 1)
        except (NotLinearInLambda, DegenerateEta) as exc:
            raise NoSolution(f"basic generators are not pencil generators: {exc}") from exc
        if not check_linearity(g, eta):
            raise NoSolution("basic generators fail the Christoffel linearity condition")
        z, s = _specialize(family, [], 1)
        return [GeneratorSet(z=z, s=s, provenance="basic", g=g, eta=eta)]
    symbols = family.symbols()
    eqs = _lambda_equations(family, rs, wc)
    res = require_solutions(solve_system(eqs, symbols, allowed_radicands=radicands, cap=cap))
    found = []
    for sol, rad in zip(res.solutions, res.radicand):
        values = [sympy.nsimplify(sol[x]) if rad == 1 else sol[x] for x in symbols]
        z, s = _specialize(family, values, rad)
        try:
            g, eta = _metric_pair(z, rs, wc, group, rad)
        except DegenerateEta:
            continue
        if not check_linearity(g, eta):
            continue
        if not check_proper(z, family.gens, wc, group):
            continue
        found.append(
            GeneratorSet(
                z=z, s=s, provenance="solved", coefficients=tuple(values), radicand=rad, g=g, eta=eta
            )
        )
    if not found:
        raise NoSolution("no coefficient assignment yields pencil generators")
    found.sort(key=lambda gs: _value_key(gs.coefficients))
    return found
