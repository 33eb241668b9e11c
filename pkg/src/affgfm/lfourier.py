"""The extended lambda-Fourier ring.

An element is a finite sum of monomials ``lambda^q e^{2 pi i a.x}`` with
``q`` a nonnegative rational and ``a`` an integer vector.  The strict ring
only allows integer ``q``; fractional exponents appear transiently when
non-invariant monomials are pulled back by the Weyl group.

Coefficients are any exact field elements (``Fraction`` by default, but
polynomials in unknown coefficients are used by the pencil search).
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Any, Iterable, Mapping, Sequence

from .errors import FieldMismatch, Inhomogeneous, NegativeLambdaExponent
from .numbers import format_coeff
from .rootsys import WeightChoice
from .weylgroup import WeylElement, WeylGroup

Key = tuple[Fraction, tuple[int, ...]]


def _exp_order(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), exp)


class FourierPoly:
    """Immutable sparse element of the extended lambda-Fourier ring."""

    __slots__ = ("ell", "terms")

    def __init__(self, ell: int, terms: Mapping[Key, Any] | Iterable[tuple[Key, Any]] = ()):
        self.ell = ell
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, Any] = {}
        for (lam, exp), c in items:
            key = (Fraction(lam), tuple(int(e) for e in exp))
            if len(key[1]) != ell:
                raise FieldMismatch(f"exponent {exp} has wrong length for rank {ell}")
            acc[key] = acc[key] + c if key in acc else c
        self.terms = {k: c for k, c in acc.items() if c}

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, ell: int, c: Any = 1) -> "FourierPoly":
        return cls(ell, {(Fraction(0), (0,) * ell): c})

    @classmethod
    def monomial(cls, ell: int, exp: Sequence[int], lam: Fraction | int = 0, c: Any = 1) -> "FourierPoly":
        return cls(ell, {(Fraction(lam), tuple(exp)): c})

    @classmethod
    def lam(cls, ell: int, power: int = 1) -> "FourierPoly":
        return cls.monomial(ell, (0,) * ell, power)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other: Any) -> "FourierPoly":
        if isinstance(other, FourierPoly):
            if other.ell != self.ell:
                raise FieldMismatch(f"rank mismatch {self.ell} != {other.ell}")
            return other
        return FourierPoly.constant(self.ell, other)

    def __add__(self, other: Any) -> "FourierPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return FourierPoly(self.ell, out)

    __radd__ = __add__

    def __neg__(self) -> "FourierPoly":
        return FourierPoly(self.ell, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: Any) -> "FourierPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "FourierPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "FourierPoly":
        if not isinstance(other, FourierPoly):
            if not other:
                return FourierPoly(self.ell)
            return FourierPoly(self.ell, {k: c * other for k, c in self.terms.items()})
        other = self._coerce(other)
        out: dict[Key, Any] = {}
        for (q1, a1), c1 in self.terms.items():
            for (q2, a2), c2 in other.terms.items():
                key = (q1 + q2, tuple(x + y for x, y in zip(a1, a2)))
                prod = c1 * c2
                out[key] = out[key] + prod if key in out else prod
        return FourierPoly(self.ell, out)

    def __rmul__(self, other: Any) -> "FourierPoly":
        return self * other

    def __pow__(self, n: int) -> "FourierPoly":
        if n < 0:
            raise ValueError("negative powers are not ring elements")
        result = FourierPoly.constant(self.ell)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FourierPoly):
            return self.ell == other.ell and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ell, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"FourierPoly({self.text()!r})"

    # -- structure ----------------------------------------------------------
    @property
    def resolution(self) -> int:
        return lcm(1, *(q.denominator for q, _ in self.terms))

    def in_strict_ring(self) -> bool:
        return all(q.denominator == 1 and q >= 0 for q, _ in self.terms)

    def map_coeffs(self, fn) -> "FourierPoly":
        return FourierPoly(self.ell, {k: fn(c) for k, c in self.terms.items()})

    def degrees(self, wc: WeightChoice) -> set[Fraction]:
        return {term_degree(k, wc) for k in self.terms}

    def sorted_terms(self) -> list[tuple[Key, Any]]:
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0], _exp_order(kv[0][1])))

    def text(self) -> str:
        """Canonical serialization: one ``coeff * lam^q * X[a]`` line per term."""
        if not self.terms:
            return "0"
        lines = []
        for (q, exp), c in self.sorted_terms():
            lines.append(f"{format_coeff(c)} * lam^{format_coeff(q)} * X[{','.join(map(str, exp))}]")
        return "\n".join(lines)


def term_degree(key: Key, wc: WeightChoice) -> Fraction:
    q, exp = key
    return q * wc.kappa + sum((a * t for a, t in zip(exp, wc.theta)), Fraction(0))


def grade(f: FourierPoly, wc: WeightChoice) -> Fraction:
    if not f.terms:
        raise ValueError("the zero element has no degree")
    keys = list(f.terms)
    first = term_degree(keys[0], wc)
    for k in keys[1:]:
        d = term_degree(k, wc)
        if d != first:
            raise Inhomogeneous(first, d)
    return first


def normalized_derivative(f: FourierPoly, j: int) -> FourierPoly:
    """(1/2 pi i) d/dx^j: multiplies each monomial by its j-th frequency."""
    return FourierPoly(f.ell, {k: c * k[1][j] for k, c in f.terms.items() if k[1][j]})


def null_part(f: FourierPoly) -> FourierPoly:
    return FourierPoly(f.ell, {k: c for k, c in f.terms.items() if k[0] == 0})


def weyl_pullback(
    f: FourierPoly, sigma: WeylElement, wc: WeightChoice, allow_negative: bool = False
) -> FourierPoly:
    """Pull back along the affine action x -> sigma(x) + c (sigma(omega) - omega).

    The frequency vector transforms by the transpose of the coroot-coordinate
    matrix; the lambda exponent grows by ``a.(omega - sigma(omega)) / kappa``.
    """
    mt = sigma.transpose()
    shift_vec = tuple(w - s for w, s in zip(wc.omega, sigma.apply(wc.omega)))
    out = {}
    for (q, a), c in f.terms.items():
        new_a = tuple(sum(m * x for m, x in zip(row, a)) for row in mt)
        new_q = q + sum((x * s for x, s in zip(a, shift_vec)), Fraction(0)) / wc.kappa
        if new_q < 0 and not allow_negative:
            raise NegativeLambdaExponent(f"pullback produced lambda^{new_q}")
        out[(new_q, new_a)] = c
    return FourierPoly(f.ell, out)


def is_invariant(f: FourierPoly, group: WeylGroup, wc: WeightChoice) -> bool:
    return all(weyl_pullback(f, s, wc, allow_negative=True) == f for s in group.simple)
