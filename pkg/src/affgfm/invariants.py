"""Basic invariant generators, rewriting invariants into generators, Jacobians."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from sympy import QQ

from .errors import MismatchWithClosedForm, NotInRing, NotInvariant, ReductionStall, RewriteFailure
from .lfourier import FourierPoly, is_invariant, normalized_derivative, null_part, term_degree
from .polys import det, zring
from .rootsys import RootSystem, WeightChoice, base_contravariant_metric
from .weylgroup import WeylGroup, orbit


@dataclass(frozen=True)
class BasicGenerators:
    y: tuple[FourierPoly, ...]
    degrees: tuple[Fraction, ...]
    wc: WeightChoice


def basic_generators(rs: RootSystem, wc: WeightChoice, group: WeylGroup) -> BasicGenerators:
    """Orbit sums y^j = lambda^{theta_j/kappa} Y_j, one monomial per orbit point."""
    ell = rs.rank
    ys = []
    for j in range(ell):
        wj = rs.fundamental_weights[j]
        points, _ = orbit(group, wj)
        terms = {}
        for mu in points:
            exp = tuple(int(rs.pairing(mu, tuple(int(k == r) for k in range(ell)))) for r in range(ell))
            lam = rs.pairing(tuple(a - b for a, b in zip(wj, mu)), wc.omega) / wc.kappa
            terms[(lam, exp)] = Fraction(1)
        ys.append(FourierPoly(ell, terms))
    return BasicGenerators(y=tuple(ys), degrees=tuple(wc.theta), wc=wc)


@dataclass
class LeadingTermReport:
    passed: bool
    single_term: dict[int, bool] = field(default_factory=dict)
    product_monomial: str = ""
    witnesses: list[str] = field(default_factory=list)


def verify_leading_terms(gens: Sequence[FourierPoly], wc: WeightChoice) -> LeadingTermReport:
    """y^j|_0 = e^{2 pi i x^j} for j in S, and prod (z^r|_0)^{m_r} = e^{2 pi i (omega, x)}."""
    ell = wc.rank
    report = LeadingTermReport(passed=True)
    for j in sorted(wc.S):
        expected = FourierPoly.monomial(ell, tuple(int(k == j) for k in range(ell)))
        ok = null_part(gens[j]) == expected
        report.single_term[j + 1] = ok
        if not ok:
            report.passed = False
            report.witnesses.append(f"null part of generator {j + 1}: {null_part(gens[j]).text()}")
    prod = FourierPoly.constant(ell)
    for r, m in enumerate(wc.marks):
        if m:
            prod = prod * null_part(gens[r]) ** m
    expected = FourierPoly.monomial(ell, wc.marks)
    report.product_monomial = prod.text()
    if prod != expected:
        report.passed = False
        report.witnesses.append(f"product of null parts: {prod.text()}")
    return report


class _ProductCache:
    def __init__(self, gens: Sequence[FourierPoly]):
        self.gens = list(gens)
        ell = gens[0].ell
        self.cache: dict[tuple[int, ...], FourierPoly] = {(0,) * len(gens): FourierPoly.constant(ell)}

    def get(self, a: tuple[int, ...]) -> FourierPoly:
        if a in self.cache:
            return self.cache[a]
        j = max(i for i, e in enumerate(a) if e)
        lower = tuple(e - int(i == j) for i, e in enumerate(a))
        value = self.get(lower) * self.gens[j]
        self.cache[a] = value
        return value


def _rho_heights(rs: RootSystem) -> tuple[Fraction, ...]:
    """(omega_j, rho): a strictly dominance-monotone tie-break."""
    a = base_contravariant_metric(rs)
    return tuple(sum(row, Fraction(0)) for row in a)


def rewrite_in_generators(
    f: FourierPoly,
    gens: Sequence[FourierPoly],
    wc: WeightChoice,
    rs: RootSystem,
    group: WeylGroup | None = None,
    domain=QQ,
    cache: _ProductCache | None = None,
):
    """Express an invariant f as a polynomial in (lambda, z^1..z^l).

    Dominant leading monomials are peeled off in the order
    ((mu, omega), (mu, rho), exponent) descending; every generator contributes
    its leading monomial with coefficient one, so each step removes the
    selected monomial and only introduces strictly smaller ones.
    """
    ell = wc.rank
    R = zring(ell, domain)
    if not f.terms:
        return R.zero
    if not f.in_strict_ring():
        raise NotInRing("input has fractional or negative lambda powers")
    if group is not None and not is_invariant(f, group, wc):
        raise NotInvariant("input is not Weyl invariant")
    cache = cache or _ProductCache(gens)
    heights = _rho_heights(rs)
    theta = wc.theta

    def order(key):
        a = key[1]
        return (
            sum((x * t for x, t in zip(a, theta)), Fraction(0)),
            sum((x * h for x, h in zip(a, heights)), Fraction(0)),
            a,
        )

    rem = dict(f.terms)
    out: dict[tuple[int, ...], Any] = {}
    while rem:
        dominant = [k for k in rem if all(e >= 0 for e in k[1])]
        if not dominant:
            raise ReductionStall(f"no dominant monomial among {len(rem)} remaining terms")
        key = max(dominant, key=order)
        q, a = key
        c = rem[key]
        monom = (int(q),) + a
        out[monom] = out[monom] + c if monom in out else c
        for (q2, a2), c2 in cache.get(a).terms.items():
            k2 = (q + q2, a2)
            val = rem.get(k2, 0) - c * c2
            if val:
                rem[k2] = val
            else:
                rem.pop(k2, None)
        if key in rem:
            raise ReductionStall(f"generator leading coefficients are not one at {key}")
    poly = R.from_dict({m: domain.convert(c) for m, c in out.items() if c})
    if substitute_generators(poly, gens, cache) != f:
        raise RewriteFailure("substitution check failed")
    return poly


def substitute_generators(poly, gens: Sequence[FourierPoly], cache: _ProductCache | None = None) -> FourierPoly:
    """Evaluate a (lambda, z) polynomial on Fourier generators."""
    ell = gens[0].ell
    cache = cache or _ProductCache(gens)
    out: dict = {}
    for monom, c in poly.terms():
        q, a = monom[0], tuple(monom[1:])
        for (q2, a2), c2 in cache.get(a).terms.items():
            key = (Fraction(q) + q2, a2)
            out[key] = out[key] + c * c2 if key in out else c * c2
    return FourierPoly(ell, out)


def rewrite_homogeneous_parts(
    f: FourierPoly, gens: Sequence[FourierPoly], wc: WeightChoice, rs: RootSystem, **kw
):
    """Split an inhomogeneous invariant by degree and rewrite each part."""
    parts: dict[Fraction, dict] = {}
    for k, c in f.terms.items():
        parts.setdefault(term_degree(k, wc), {})[k] = c
    total = None
    for deg in sorted(parts):
        p = rewrite_in_generators(FourierPoly(f.ell, parts[deg]), gens, wc, rs, **kw)
        total = p if total is None else total + p
    return total if total is not None else zring(wc.rank, kw.get("domain", QQ)).zero


@dataclass
class JacobianReport:
    determinant: FourierPoly
    closed_form: FourierPoly
    null_determinant: FourierPoly
    null_closed_form: FourierPoly
    matches: bool
    null_matches: bool


def jacobian_determinant(gens: Sequence[FourierPoly], rs: RootSystem, wc: WeightChoice) -> JacobianReport:
    """det(D_p z^j) against the product over positive roots.

    The prefactor e^{pi i sum_{a>0} (a, x)} equals e^{2 pi i (rho, x)} whose
    frequency vector is (1, ..., 1), so everything stays on the integer lattice.
    """
    ell = rs.rank
    matrix = [[normalized_derivative(z, p) for p in range(ell)] for z in gens]
    d = det(matrix)
    closed = FourierPoly.monomial(ell, (1,) * ell)
    null_closed = closed
    lengths = rs.root_lengths
    for beta in rs.positive_roots:
        exp = tuple(-e for e in rs.root_exponent(beta))
        shift = sum((k * m * l / 2 for k, m, l in zip(beta, wc.marks, lengths)), Fraction(0)) / wc.kappa
        factor = FourierPoly.constant(ell) - FourierPoly.monomial(ell, exp, shift)
        closed = closed * factor
        if shift == 0:
            null_closed = null_closed * factor
    report = JacobianReport(
        determinant=d,
        closed_form=closed,
        null_determinant=null_part(d),
        null_closed_form=null_closed,
        matches=d == closed,
        null_matches=null_part(d) == null_closed,
    )
    return report


def assert_jacobian(gens: Sequence[FourierPoly], rs: RootSystem, wc: WeightChoice) -> JacobianReport:
    report = jacobian_determinant(gens, rs, wc)
    if not (report.matches and report.null_matches):
        raise MismatchWithClosedForm("Jacobian determinant differs from the root product")
    return report
