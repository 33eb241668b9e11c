"""Polynomials in (lambda, z) or t and rational functions over them.

Sparse multivariate arithmetic, gcds and parsing are delegated to sympy's
``PolyRing`` / ``FracField``.  This module fixes the variable naming, the
canonical text form used in reports and a few small matrix helpers.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Any, Sequence

import sympy
from sympy import QQ
from sympy.polys.fields import FracField
from sympy.polys.rings import PolyRing

from .numbers import format_coeff

PolyMatrix = list[list[Any]]


@lru_cache(maxsize=None)
def zring(ell: int, domain=QQ, with_lambda: bool = True, prefix: str = "z") -> PolyRing:
    names = (["lam"] if with_lambda else []) + [f"{prefix}{i + 1}" for i in range(ell)]
    return PolyRing(names, domain)


@lru_cache(maxsize=None)
def tring(ell: int, domain=QQ) -> PolyRing:
    return PolyRing([f"t{i + 1}" for i in range(ell)], domain)


@lru_cache(maxsize=None)
def tfield(ell: int, domain=QQ) -> FracField:
    return FracField([f"t{i + 1}" for i in range(ell)], domain)


def zvars(R: PolyRing) -> list:
    """The z generators of a ring built by :func:`zring` (lambda excluded)."""
    return [g for g, s in zip(R.gens, R.symbols) if str(s) != "lam"]


def lam_index(R: PolyRing) -> int | None:
    for i, s in enumerate(R.symbols):
        if str(s) == "lam":
            return i
    return None


def _term_key(monom: tuple[int, ...], lam_pos: int | None) -> tuple:
    lam_pow = monom[lam_pos] if lam_pos is not None else 0
    rest = tuple(e for i, e in enumerate(monom) if i != lam_pos)
    return (lam_pow, -sum(rest), tuple(-e for e in rest))


def sorted_terms(p) -> list[tuple[tuple[int, ...], Any]]:
    lp = lam_index(p.ring)
    return sorted(p.terms(), key=lambda t: _term_key(t[0], lp))


def format_poly(p) -> str:
    """Canonical text: terms ``coeff*var^e*...`` ordered by (lambda power, graded lex)."""
    if not p:
        return "0"
    names = [str(s) for s in p.ring.symbols]
    parts = []
    for monom, c in sorted_terms(p):
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, monom) if e]
        coeff = format_coeff(c)
        if not factors:
            parts.append(coeff)
        elif coeff == "1":
            parts.append("*".join(factors))
        elif coeff == "-1":
            parts.append("-" + "*".join(factors))
        else:
            # a + b*sqrt(d) needs parentheses before a monomial
            if "+" in coeff or "-" in coeff[1:]:
                coeff = f"({coeff})"
            parts.append(coeff + "*" + "*".join(factors))
    return " + ".join(parts).replace("+ -", "- ")


def leading_coeff(p):
    return sorted_terms(p)[0][1]


def normalize_fraction(num, den):
    """Cancel and make the denominator monic under the canonical term order."""
    if not den:
        raise ZeroDivisionError("zero denominator")
    num, den = num.cancel(den)
    lc = leading_coeff(den)
    if lc != den.ring.domain.one:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def format_rational(f) -> str:
    """Canonical text of a FracField element or polynomial."""
    if not hasattr(f, "denom"):
        return format_poly(f)
    R = f.field.ring
    num, den = normalize_fraction(R(f.numer), R(f.denom))
    if den == R.one:
        return format_poly(num)
    top, bottom = format_poly(num), format_poly(den)
    if len(num.terms()) > 1:
        top = f"({top})"
    if len(den.terms()) > 1 or "*" in bottom:
        bottom = f"({bottom})"
    return f"{top}/{bottom}"


def parse_poly(text: str, R: PolyRing):
    expr = sympy.sympify(text, locals={str(s): s for s in R.symbols})
    return R.from_expr(expr) if expr != 0 else R.zero


def parse_rational(text: str, F: FracField):
    expr = sympy.sympify(text, locals={str(s): s for s in F.symbols})
    return F.from_expr(expr)


def det(m: Sequence[Sequence[Any]]):
    """Determinant by cofactor expansion (entries in any commutative ring)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return m[0][0] * 0
    return total


def adjugate(m: Sequence[Sequence[Any]]) -> list[list[Any]]:
    """Classical adjoint: adj(m) m = det(m) I."""
    n = len(m)
    if n == 1:
        return [[m[0][0] * 0 + 1]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1 :] for k, row in enumerate(m) if k != i]
            c = det(minor)
            adj[j][i] = -c if (i + j) % 2 else c
    return adj


def matmul(a: Sequence[Sequence[Any]], b: Sequence[Sequence[Any]]) -> list[list[Any]]:
    inner = len(b)
    out = []
    for row in a:
        new_row = []
        for j in range(len(b[0])):
            acc = row[0] * b[0][j]
            for k in range(1, inner):
                acc = acc + row[k] * b[k][j]
            new_row.append(acc)
        out.append(new_row)
    return out


def transpose(a: Sequence[Sequence[Any]]) -> list[list[Any]]:
    return [list(col) for col in zip(*a)]


def weighted_degrees(p, weights: Sequence) -> set:
    return {sum((w * e for w, e in zip(weights, monom)), 0) for monom in p.monoms()} if p else set()


def derivative(f, x):
    """d f / d x for polynomials and rational functions.

    FracElement.diff compares the generator's denominator with the integer 1,
    which fails over algebraic domains, so rational functions are
    differentiated by the quotient rule here.
    """
    if not hasattr(f, "numer"):
        return f.diff(x)
    F = f.field
    i = (x.numer if hasattr(x, "numer") else x).monoms()[0].index(1)
    g = F.ring.gens[i]
    p, q = f.numer, f.denom
    return F.new(p.diff(g) * q - p * q.diff(g), q * q)
