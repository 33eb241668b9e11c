"""Exhaustive solving of small zero-dimensional polynomial systems.

A lexicographic Groebner basis (computed by sympy) triangularizes the system;
values are then found variable by variable, last variable first, as roots of
the gcd of the basis elements that have become univariate.  Roots are kept
when they lie in Q or in one of the allowed real quadratic fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import sympy
from sympy import QQ

from .errors import NonRationalSolution, NoSolution, SolverCapExceeded
from .numbers import quadratic_field


@dataclass
class SolveResult:
    solutions: list[dict[sympy.Symbol, sympy.Expr]]
    radicand: list[int]
    skipped_minimal_polynomials: list[str] = field(default_factory=list)


def _squarefree_part(n: sympy.Rational) -> tuple[int, sympy.Rational]:
    """n = d * s^2 with d a squarefree integer (sign kept in d)."""
    n = sympy.Rational(n)
    num, den = n.p * n.q, n.q
    sign = -1 if num < 0 else 1
    num = abs(num)
    d, s = 1, 1
    for p, e in sympy.factorint(num).items():
        d *= p ** (e % 2)
        s *= p ** (e // 2)
    return sign * d, sympy.Rational(s, den)


def _roots(poly: sympy.Poly, x: sympy.Symbol, radicand: int, allowed: Sequence[int]):
    """Roots of a univariate polynomial in the current field or a quadratic extension.

    Yields (root, radicand) pairs and collects irreducible factors that would
    need an extension outside ``allowed``.
    """
    found, skipped = [], []
    ext = [sympy.sqrt(radicand)] if radicand != 1 else []
    factors = sympy.factor_list(poly.as_expr(), x, extension=ext or None)[1]
    for fac, _ in factors:
        fp = sympy.Poly(fac, x, extension=ext or None)
        deg = fp.degree()
        if deg == 1:
            a, b = fp.all_coeffs()
            found.append((sympy.nsimplify(-b / a) if radicand == 1 else sympy.radsimp(-b / a), radicand))
        elif deg == 2 and radicand == 1:
            a, b, c = [sympy.Rational(v) for v in fp.all_coeffs()]
            disc = b * b - 4 * a * c
            d, s = _squarefree_part(disc)
            if d > 1 and d in allowed:
                for sign in (1, -1):
                    found.append((sympy.expand((-b + sign * s * sympy.sqrt(d)) / (2 * a)), d))
            else:
                skipped.append(str(fp.as_expr()))
        else:
            skipped.append(str(fp.as_expr()))
    return found, skipped


def solve_system(
    equations: Sequence[sympy.Expr],
    variables: Sequence[sympy.Symbol],
    allowed_radicands: Sequence[int] = (1,),
    cap: int = 32,
    radicand: int = 1,
) -> SolveResult:
    """All solutions in Q or in Q(sqrt d), d in ``allowed_radicands``.

    ``radicand`` names the field the equations are defined over; solutions
    then stay in that field.
    """
    variables = list(variables)
    if len(variables) > cap:
        raise SolverCapExceeded(f"{len(variables)} unknowns exceed the cap {cap}")
    eqs = [sympy.expand(e) for e in equations if sympy.expand(e) != 0]
    if not variables:
        return SolveResult(solutions=[{}] if not eqs else [], radicand=[radicand] if not eqs else [])
    if not eqs:
        raise SolverCapExceeded("the system leaves every unknown free")
    G = sympy.groebner(eqs, *variables, order="lex", domain=quadratic_field(radicand))
    if list(G.exprs) == [1]:
        return SolveResult(solutions=[], radicand=[])
    if not G.is_zero_dimensional:
        raise SolverCapExceeded("solution set is positive dimensional")
    basis = list(G.exprs)
    result = SolveResult(solutions=[], radicand=[])

    def extend(k: int, partial: dict, radicand: int):
        if k < 0:
            result.solutions.append(dict(partial))
            result.radicand.append(radicand)
            return
        x = variables[k]
        tail = set(variables[k:])
        uni = []
        for p in basis:
            if p.free_symbols <= tail:
                q = sympy.expand(p.subs(partial))
                if radicand != 1:
                    q = sympy.expand(sympy.radsimp(q))
                if q != 0:
                    uni.append(q)
        if not uni:
            raise SolverCapExceeded(f"no univariate condition for {x}")
        ext = [sympy.sqrt(radicand)] if radicand != 1 else None
        g = sympy.Poly(uni[0], x, extension=ext)
        for q in uni[1:]:
            g = g.gcd(sympy.Poly(q, x, extension=ext))
        if g.degree() <= 0:
            return
        roots, skipped = _roots(g, x, radicand, allowed_radicands)
        result.skipped_minimal_polynomials.extend(skipped)
        for value, rad in roots:
            if radicand != 1 and rad != radicand:
                continue
            partial[x] = value
            extend(k - 1, partial, rad if rad != 1 else radicand)
            del partial[x]

    extend(len(variables) - 1, {}, radicand)
    order = list(zip(result.solutions, result.radicand))
    order.sort(key=lambda sr: [sympy.default_sort_key(sr[0][v]) for v in variables])
    result.solutions = [s for s, _ in order]
    result.radicand = [r for _, r in order]
    return result


def require_solutions(res: SolveResult) -> SolveResult:
    if not res.solutions and res.skipped_minimal_polynomials:
        raise NonRationalSolution(
            "solutions need a field extension outside the configured ones",
            minimal_polynomial=res.skipped_minimal_polynomials[0],
        )
    if not res.solutions:
        raise NoSolution("the system has no solutions")
    return res
