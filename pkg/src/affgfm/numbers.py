"""Exact scalars: rationals and real quadratic fields Q(sqrt d).

Quadratic fields are sympy algebraic-field domains; this module only adds
construction helpers and the canonical text form used in reports
(``"3/5"``, ``"2+sqrt(3)"``).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any

import sympy
from sympy import QQ
from sympy.polys.domains.algebraicfield import AlgebraicField

FIELD_ESCALATION = (1, 2, 3, 5)


@lru_cache(maxsize=None)
def quadratic_field(d: int):
    """QQ for d == 1, else the algebraic field QQ<sqrt(d)>."""
    if d == 1:
        return QQ
    return QQ.algebraic_field(sympy.sqrt(d))


def field_radicand(K) -> int:
    if isinstance(K, AlgebraicField):
        return int(K.ext.as_expr() ** 2)
    return 1


def sqrt_in(K):
    """The element sqrt(d) of Q(sqrt d)."""
    return K.from_sympy(sympy.sqrt(field_radicand(K)))


def to_fraction(c: Any) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if hasattr(c, "numerator") and hasattr(c, "denominator"):
        return Fraction(int(c.numerator), int(c.denominator))
    if hasattr(c, "to_list"):
        rep = c.to_list()
        if len(rep) > 1:
            raise ValueError(f"{c} is irrational")
        return to_fraction(rep[0]) if rep else Fraction(0)
    return Fraction(sympy.Rational(c).p, sympy.Rational(c).q)


def quadratic_parts(c: Any, K=None) -> tuple[Fraction, Fraction]:
    """(p, q) with c = p + q sqrt(d)."""
    if hasattr(c, "to_list") and not hasattr(c, "numerator"):
        rep = c.to_list()
        if not rep:
            return Fraction(0), Fraction(0)
        if len(rep) == 1:
            return to_fraction(rep[0]), Fraction(0)
        return to_fraction(rep[1]), to_fraction(rep[0])
    return to_fraction(c), Fraction(0)


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_coeff(c: Any, K=None) -> str:
    """Canonical exact text for a rational or quadratic-field scalar."""
    if hasattr(c, "ring") and hasattr(c, "terms") and not hasattr(c, "to_list"):
        return f"({c})"
    if hasattr(c, "to_list") and not hasattr(c, "numerator"):
        p, q = quadratic_parts(c)
        if q == 0:
            return _format_rational(p)
        d = _radicand_of_element(c)
        if abs(q) == 1:
            rad = f"{'-' if q < 0 else ''}sqrt({d})"
        else:
            rad = f"{_format_rational(q)}*sqrt({d})"
        if p == 0:
            return rad
        return f"{_format_rational(p)}{'' if rad.startswith('-') else '+'}{rad}"
    return _format_rational(to_fraction(c))


def _radicand_of_element(c: Any) -> int:
    mod = c.mod.to_list() if hasattr(c.mod, "to_list") else list(c.mod)
    # minimal polynomial x^2 - d
    return int(-to_fraction(mod[-1]))


def parse_coeff(text: str, K=QQ):
    """Inverse of :func:`format_coeff`."""
    text = text.strip()
    if "sqrt" in text:
        return K.from_sympy(sympy.sympify(text))
    return K.convert(sympy.Rational(text)) if K is not QQ else QQ(*_frac_pair(text))


def _frac_pair(text: str) -> tuple[int, int]:
    f = Fraction(text)
    return f.numerator, f.denominator


def coeff_height(c: Any) -> int:
    p, q = quadratic_parts(c)
    return max(abs(p.numerator), p.denominator, abs(q.numerator), q.denominator)
