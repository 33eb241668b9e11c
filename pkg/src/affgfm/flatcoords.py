"""Flat coordinates of eta: degree spectrum, polynomial charts z = P(t), chart checks.

A chart is kept in implicit form: each z^r is a weighted-homogeneous
polynomial in t, and flatness is the polynomial identity

    J eta_normal J^T = eta(P(t)),    J[r][a] = dP^r/dt^a.

Solving for P leaves a residual symmetry: the linear maps of t that
preserve eta_normal and the grading.  These are fixed by gauge conditions
(see :func:`solve_chart`) and a deterministic choice among the remaining
finitely many solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Any, Iterator, Sequence

import sympy
from sympy import QQ
from sympy.polys.rings import PolyRing

from .elimination import solve_system
from .errors import (
    NoChartInField,
    NonConstantSpectrum,
    NonPositiveDegree,
    NonRationalEigenvalue,
    NotDiagonalizable,
    SingularMetric,
    SolverCapExceeded,
    UnderdeterminedNormalization,
)
from .numbers import FIELD_ESCALATION, coeff_height, field_radicand, format_coeff, quadratic_field
from .polys import PolyMatrix, det, format_poly, parse_poly, tring, zvars

SPECTRUM_POINTS = 3
GAUGE_HEIGHT_BOUND = 12
_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


@dataclass(frozen=True)
class DegreeSpectrum:
    """Ascending degrees of flat coordinates; the pairing is alpha -> l - 1 - alpha."""

    d: tuple[Fraction, ...]
    kappa: Fraction

    @property
    def pairing(self) -> tuple[int, ...]:
        n = len(self.d)
        return tuple(n - 1 - a for a in range(n))


@dataclass
class FlatChart:
    """z^r = P[r](t) with t-degrees ``d`` in chart order and constant metric ``eta_normal``."""

    P: list[Any]
    d: tuple[Fraction, ...]
    eta_normal: list[list[Any]]
    radicand: int = 1
    provenance: str = "solved"
    notes: list[str] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.P)

    @property
    def ring(self) -> PolyRing:
        return self.P[0].ring

    @property
    def domain(self):
        return self.ring.domain

    def jacobian(self) -> list[list[Any]]:
        return [[p.diff(x) for x in self.ring.gens] for p in self.P]

    def text(self) -> list[str]:
        return [format_poly(p) for p in self.P]


def antidiagonal(n: int, K=QQ) -> list[list[Any]]:
    return [[K.one if i + j == n - 1 else K.zero for j in range(n)] for i in range(n)]


# -- degree spectrum -------------------------------------------------------------


def _sample_points(n: int, count: int) -> Iterator[list[Fraction]]:
    """Deterministic rational points built from consecutive primes."""
    k = 0
    while True:
        yield [
            Fraction(_PRIMES[(k + i) % len(_PRIMES)] * (-1) ** (i + k), _PRIMES[(k + 2 * i + 1) % len(_PRIMES)] + k)
            for i in range(n)
        ]
        k += 1


def _to_sympy(c, K) -> sympy.Expr:
    return K.to_sympy(c)


def _eval_matrix(M: PolyMatrix, point: Sequence[Fraction]) -> sympy.Matrix:
    K = M[0][0].ring.domain
    vals = [K.convert(QQ(p.numerator, p.denominator)) for p in point]
    return sympy.Matrix([[_to_sympy(e(*vals) if len(vals) > 1 else e(vals[0]), K) for e in row] for row in M])


def spectrum_operator(eta: PolyMatrix, theta: Sequence[Fraction], point: Sequence[Fraction]) -> sympy.Matrix:
    """A_j^i = sum_k theta_k z^k Gamma^i_{jk} + theta_j delta^i_j at a point (Gamma of eta, lower indices)."""
    n = len(eta)
    zs = zvars(eta[0][0].ring)
    H = _eval_matrix(eta, point)
    if H.det() == 0:
        raise SingularMetric("eta is degenerate at the sample point")
    L = H.inv()
    dH = [_eval_matrix([[e.diff(x) for e in row] for row in eta], point) for x in zs]
    # derivatives of the covariant metric: d_k L = -L (d_k H) L
    dL = [-L * dH[k] * L for k in range(n)]
    A = sympy.zeros(n, n)
    for i in range(n):
        for j in range(n):
            acc = sympy.Rational(theta[j]) if i == j else sympy.Integer(0)
            for k in range(n):
                if not point[k]:
                    continue
                gam = sum(
                    H[i, l] * (dL[j][l, k] + dL[k][l, j] - dL[l][j, k]) for l in range(n)
                ) / 2
                acc += sympy.Rational(theta[k]) * sympy.Rational(point[k]) * gam
            A[i, j] = sympy.radsimp(sympy.expand(acc))
    return A


def degree_spectrum(eta: PolyMatrix, theta: Sequence[Fraction], kappa: Fraction, points: int = SPECTRUM_POINTS) -> DegreeSpectrum:
    """Eigenvalues of A, checked to be point independent, rational, semisimple and positive."""
    n = len(eta)
    x = sympy.Symbol("x")
    charpolys, first = [], None
    for point in _sample_points(n, points):
        try:
            A = spectrum_operator(eta, theta, point)
        except SingularMetric:
            continue
        charpolys.append(sympy.Poly(A.charpoly(x).as_expr(), x))
        if first is None:
            first = A
        if len(charpolys) == points:
            break
    if any(cp != charpolys[0] for cp in charpolys[1:]):
        raise NonConstantSpectrum("characteristic polynomial of A depends on the point")
    roots: list[Fraction] = []
    for fac, mult in sympy.factor_list(charpolys[0].as_expr(), x)[1]:
        fp = sympy.Poly(fac, x)
        if fp.degree() != 1:
            raise NonRationalEigenvalue(f"irreducible factor {fac}")
        a, b = fp.all_coeffs()
        r = sympy.Rational(-b, a)
        roots.extend([Fraction(int(r.p), int(r.q))] * mult)
    if not first.is_diagonalizable():
        raise NotDiagonalizable("A is not diagonalizable")
    roots.sort()
    if roots[0] <= 0:
        raise NonPositiveDegree(f"degree {roots[0]} is not positive")
    spec = DegreeSpectrum(d=tuple(roots), kappa=Fraction(kappa))
    return spec


# -- chart verification ----------------------------------------------------------


def compose(p, P: Sequence[Any], T: PolyRing):
    """Substitute z^k = P[k] into a z polynomial (no lambda)."""
    K = T.domain
    out = T.zero
    powers: dict[tuple[int, int], Any] = {}

    def pw(k: int, e: int):
        if (k, e) not in powers:
            powers[(k, e)] = P[k] ** e
        return powers[(k, e)]

    for monom, c in p.terms():
        term = T.ground_new(K.convert(c)) if K != p.ring.domain else T.ground_new(c)
        for k, e in enumerate(monom):
            if e:
                term = term * pw(k, e)
        out = out + term
    return out


def _gram(J, N):
    n = len(J)
    return [
        [sum((J[r][a] * N[a][b] * J[s][b] for a in range(n) for b in range(n) if N[a][b]), J[0][0] * 0) for s in range(n)]
        for r in range(n)
    ]


@dataclass
class ChartCheck:
    passed: bool
    witness: str = ""


def verify_chart(chart: FlatChart, eta: PolyMatrix) -> ChartCheck:
    """J eta_normal J^T == eta(P(t)) entrywise."""
    T = chart.ring
    n = chart.rank
    lhs = _gram(chart.jacobian(), chart.eta_normal)
    for r in range(n):
        for s in range(r, n):
            rhs = compose(eta[r][s], chart.P, T)
            if lhs[r][s] != rhs:
                return ChartCheck(False, f"entry ({r + 1},{s + 1}): {format_poly(lhs[r][s] - rhs)}")
    return ChartCheck(True)


def check_homogeneity(chart: FlatChart, theta: Sequence[Fraction]) -> bool:
    for r, p in enumerate(chart.P):
        for monom in p.monoms():
            if sum((Fraction(e) * d for e, d in zip(monom, chart.d)), Fraction(0)) != theta[r]:
                return False
    return bool(det(chart.jacobian()))


# -- chart solving ---------------------------------------------------------------


def weighted_monomials(weights: Sequence[Fraction], target: Fraction) -> list[tuple[int, ...]]:
    """Exponent vectors m with sum m_a w_a = target, lexicographically descending."""
    n = len(weights)
    out: list[tuple[int, ...]] = []

    def rec(i: int, rest: Fraction, acc: list[int]):
        if i == n - 1:
            q = rest / weights[i]
            if q.denominator == 1 and q >= 0:
                out.append(tuple(acc + [int(q)]))
            return
        for e in range(int(rest / weights[i]) + 1):
            rec(i + 1, rest - e * weights[i], acc + [e])

    rec(0, Fraction(target), [])
    return sorted(out, reverse=True)


@dataclass
class _Ansatz:
    monomials: list[list[tuple[int, ...]]]
    symbols: list[list[sympy.Symbol]]

    def flat_symbols(self) -> list[sympy.Symbol]:
        return [s for row in self.symbols for s in row]


def _chart_equations(eta: PolyMatrix, theta, d, N) -> tuple[_Ansatz, list[sympy.Expr]]:
    n = len(eta)
    monos = [weighted_monomials(d, theta[r]) for r in range(n)]
    names = [f"c{r + 1}_{i + 1}" for r in range(n) for i in range(len(monos[r]))]
    K = eta[0][0].ring.domain
    C = PolyRing(names, K)
    T = tring(n, C.to_domain())
    D = C.to_domain()
    it = iter(C.gens)
    P = []
    syms = []
    for r in range(n):
        p = T.zero
        row = []
        for m in monos[r]:
            g = next(it)
            row.append(sympy.Symbol(str(g)))
            p = p + T.from_dict({m: D.convert(g)})
        P.append(p)
        syms.append(row)
    J = [[p.diff(x) for x in T.gens] for p in P]
    NN = [[D.convert(c) for c in row] for row in N]
    lhs = _gram(J, NN)
    eqs: list[sympy.Expr] = []
    seen = set()
    for r in range(n):
        for s in range(r, n):
            diff = lhs[r][s] - compose(eta[r][s], P, T)
            for _, c in diff.terms():
                e = sympy.expand(c.as_expr())
                if e != 0 and e not in seen:
                    seen.add(e)
                    eqs.append(e)
    return _Ansatz(monos, syms), eqs


def _rationals_by_height(bound: int) -> Iterator[sympy.Rational]:
    for h in range(1, bound + 1):
        vals = sorted(
            {sympy.Rational(p, q) for p in range(1, h + 1) for q in range(1, h + 1) if max(p, q) == h and gcd(p, q) == 1}
        )
        for v in vals:
            yield v
        for v in vals:
            yield -v


def _weight(m: tuple[int, ...], pair: tuple[int, int]) -> int:
    return m[pair[0]] - m[pair[1]]


def _gauge_candidates(ansatz: _Ansatz, pair: tuple[int, int], bound: int) -> Iterator[tuple[str, list[sympy.Expr]]]:
    """Gauge conditions fixing the scaling t_a -> c t_a, t_a* -> t_a*/c."""
    cells = [
        (r, m, s)
        for r, row in enumerate(ansatz.monomials)
        for m, s in zip(row, ansatz.symbols[r])
    ]
    for r, m, s in cells:
        w = _weight(m, pair)
        if w <= 0:
            continue
        for r2, m2, s2 in cells:
            if r2 == r and _weight(m2, pair) == -w:
                yield (f"coefficients of {_mono_text(m)} and {_mono_text(m2)} in z{r + 1} agree", [s - s2])
    weighted = [(r, m, s) for r, m, s in cells if _weight(m, pair) != 0]
    for v in _rationals_by_height(bound):
        for r, m, s in weighted:
            yield (f"coefficient of {_mono_text(m)} in z{r + 1} is {v}", [s - v])


def _mono_text(m: tuple[int, ...]) -> str:
    parts = [f"t{i + 1}" if e == 1 else f"t{i + 1}^{e}" for i, e in enumerate(m) if e]
    return "*".join(parts) or "1"


def _stages(theta: Sequence[Fraction], ansatz: _Ansatz) -> list[list[sympy.Symbol]]:
    order = sorted(set(theta))
    return [[s for r in range(len(theta)) if theta[r] == th for s in ansatz.symbols[r]] for th in order]


def _solve_staged(eqs, stages, radicands, base: int, cache: dict | None = None):
    """Solve stage by stage (generators grouped by degree), branching over solutions.

    ``cache`` memoizes per-stage solves across gauge attempts that share a prefix.
    """
    cache = {} if cache is None else cache
    branches: list[tuple[dict, int]] = [({}, base)]
    skipped: list[str] = []
    done: set = set()
    pending: list[sympy.Symbol] = []
    for idx, stage in enumerate(stages):
        if not stage:
            continue
        done |= set(stage)
        unknowns = pending + list(stage)
        stage_eqs = [e for e in eqs if e.free_symbols & set(unknowns) and e.free_symbols <= done]
        nxt = []
        try:
            for partial, rad in branches:
                key = (tuple(unknowns), tuple(sorted(partial.items(), key=str)), frozenset(stage_eqs), tuple(radicands))
                if key not in cache:
                    sub = [sympy.expand(e.subs(partial)) for e in stage_eqs]
                    if rad != 1:
                        sub = [sympy.expand(sympy.radsimp(e)) for e in sub]
                    try:
                        cache[key] = solve_system(sub, unknowns, allowed_radicands=radicands, radicand=rad)
                    except SolverCapExceeded as exc:
                        cache[key] = exc
                res = cache[key]
                if isinstance(res, SolverCapExceeded):
                    raise res
                skipped.extend(res.skipped_minimal_polynomials)
                for sol, r in zip(res.solutions, res.radicand):
                    nxt.append(({**partial, **sol}, r))
        except SolverCapExceeded:
            # this stage alone leaves a continuum; solve it together with the next one
            pending = unknowns
            continue
        pending = []
        branches = nxt
        if not branches:
            break
    if pending:
        raise SolverCapExceeded("chart equations leave a continuum of solutions")
    return branches, skipped


def _build_chart(ansatz: _Ansatz, values: dict, rad: int, d, N, provenance: str, notes) -> FlatChart:
    K = quadratic_field(rad)
    n = len(ansatz.monomials)
    T = tring(n, K)
    P = []
    for r in range(n):
        terms = {}
        for m, s in zip(ansatz.monomials[r], ansatz.symbols[r]):
            v = sympy.expand(sympy.radsimp(values[s]))
            if v != 0:
                terms[m] = K.from_sympy(v)
        P.append(T.from_dict(terms) if terms else T.zero)
    NN = [[K.convert(c) for c in row] for row in N]
    return FlatChart(P=P, d=tuple(d), eta_normal=NN, radicand=rad, provenance=provenance, notes=list(notes))


def _selection_key(chart: FlatChart) -> tuple:
    """Prefer smaller fields, positive leading coefficients, then small heights and canonical text."""
    signs, heights = [], []
    for p in chart.P:
        if not p:
            continue
        monom = max(p.monoms())
        c = dict(p.terms())[monom]
        val = float(sympy.N(chart.domain.to_sympy(c)))
        signs.append(0 if val > 0 else 1)
        heights.append(max(coeff_height(c) for c in p.coeffs()))
    return (FIELD_ESCALATION.index(chart.radicand) if chart.radicand in FIELD_ESCALATION else 99, signs, heights, chart.text())


def solve_chart(
    eta: PolyMatrix,
    spectrum: DegreeSpectrum,
    theta: Sequence[Fraction],
    radicands: Sequence[int] = FIELD_ESCALATION,
    hint: FlatChart | None = None,
    height_bound: int = GAUGE_HEIGHT_BOUND,
) -> FlatChart:
    """Solve for a polynomial chart with eta_normal antidiagonal and t ordered by ascending degree.

    Gauge fixing:
      * the block of coordinates of degree kappa/2 carries an orthogonal
        group; the first generator linear in that block is aligned with the
        middle basis vector;
      * each pair (a, a*) carries a scaling t_a -> c t_a, t_a* -> t_a*/c,
        fixed by the first condition that admits solutions among: equal
        coefficients of monomials of opposite weight, then a single
        coefficient set to a rational value of increasing height.
    Remaining signs are fixed by :func:`_selection_key`.
    """
    n = len(eta)
    d = spectrum.d
    kappa = spectrum.kappa
    base = field_radicand(eta[0][0].ring.domain)
    N = antidiagonal(n)
    ansatz, eqs = _chart_equations(eta, theta, d, N)
    if any(not e.free_symbols for e in eqs):
        raise NoChartInField("the chart equations are inconsistent", minimal_polynomial="1")
    stages = _stages(theta, ansatz)
    fixed: list[sympy.Expr] = []
    notes: list[str] = []
    block = [a for a in range(n) if d[a] == kappa / 2]
    if len(block) >= 2 and len(block) % 2 == 1:
        mid = block[len(block) // 2]
        for r in sorted(range(n), key=lambda r: theta[r]):
            if theta[r] == kappa / 2:
                for m, s in zip(ansatz.monomials[r], ansatz.symbols[r]):
                    if sum(m) == 1 and m[mid] == 0:
                        fixed.append(s)
                notes.append(f"z{r + 1} aligned with t{mid + 1}")
                break
    pairs = [(a, n - 1 - a) for a in range(n // 2)]
    allowed = tuple(sorted(set(radicands) | {1}, key=lambda r: FIELD_ESCALATION.index(r) if r in FIELD_ESCALATION else 99))

    cache: dict = {}

    def attempt(extra: list[sympy.Expr], fields: tuple[int, ...]):
        """Non-degenerate charts for one gauge, or None when the gauge leaves a continuum."""
        try:
            branches, skipped = _solve_staged(eqs + fixed + extra, stages, fields, base, cache)
        except SolverCapExceeded:
            return None, []
        charts = [_build_chart(ansatz, vals, rad, d, N, "solved", []) for vals, rad in branches]
        return [c for c in charts if check_homogeneity(c, theta)], skipped

    def search(i: int, chosen: list[sympy.Expr], labels: list[str], fields):
        if i == len(pairs):
            charts, skipped = attempt(chosen, fields)
            return charts, skipped, labels
        skipped_all: list[str] = []
        for label, cond in _gauge_candidates(ansatz, pairs[i], height_bound):
            charts, skipped, used = search(i + 1, chosen + cond, labels + [label], fields)
            if charts:
                return charts, skipped, used
            skipped_all.extend(skipped)
        return None, skipped_all, labels

    charts, skipped_all, labels = None, [], []
    for rad in [r for r in FIELD_ESCALATION if r in radicands or r == 1]:
        fields = (1,) if rad == 1 else (1, rad)
        charts, skipped, labels = search(0, [], [], fields)
        skipped_all.extend(skipped)
        if charts:
            break
    if not charts:
        if charts is None and not pairs:
            raise UnderdeterminedNormalization(
                "no gauge condition isolates finitely many charts", residual_group=_residual_group_text(d, kappa)
            )
        if skipped_all:
            raise NoChartInField("no chart over the configured fields", minimal_polynomial=skipped_all[0])
        raise UnderdeterminedNormalization(
            "no gauge condition isolates finitely many non-degenerate charts",
            residual_group=_residual_group_text(d, kappa),
        )
    for c in charts:
        c.notes = notes + list(labels)
    if hint is not None:
        for c in charts:
            if c.text() == hint.text():
                c.notes.append("matches the catalog chart")
                return c
    charts.sort(key=_selection_key)
    best = charts[0]
    if not verify_chart(best, eta).passed:
        raise NoChartInField("selected chart fails verification", minimal_polynomial="")
    return best


def _residual_group_text(d: Sequence[Fraction], kappa: Fraction) -> str:
    n = len(d)
    parts = []
    for a in range(n // 2):
        parts.append(f"t{a + 1} -> c t{a + 1}, t{n - a} -> t{n - a}/c")
    block = [a for a in range(n) if d[a] == kappa / 2]
    if len(block) >= 2:
        parts.append(f"orthogonal group of eta_normal on t{block[0] + 1}..t{block[-1] + 1}")
    return "; ".join(parts) or "finite"


# -- charts given in closed form -------------------------------------------------


def chart_from_text(
    polys: Sequence[str],
    d: Sequence[Fraction],
    eta_normal: Sequence[Sequence[str]] | None = None,
    radicand: int = 1,
    provenance: str = "paper",
) -> FlatChart:
    K = quadratic_field(radicand)
    n = len(polys)
    T = tring(n, K)
    P = [parse_poly(text, T) for text in polys]
    if eta_normal is None:
        N = antidiagonal(n, K)
    else:
        N = [[K.from_sympy(sympy.sympify(v)) for v in row] for row in eta_normal]
    return FlatChart(P=P, d=tuple(Fraction(x) for x in d), eta_normal=N, radicand=radicand, provenance=provenance)


@dataclass
class Connection:
    """t_b[perm[a]] = scale[a] * t_a maps chart a onto chart b."""

    perm: tuple[int, ...]
    scale: tuple[sympy.Expr, ...]

    def text(self) -> str:
        return ", ".join(
            f"t{a + 1} -> {_scale_text(s)}*t{p + 1}" for a, (p, s) in enumerate(zip(self.perm, self.scale))
        )


def _scale_text(s: sympy.Expr) -> str:
    text = sympy.sstr(s)
    return text if s.is_Atom or s.is_Pow or (s.is_Mul and not text.startswith("-")) else f"({text})"


def connecting_transformation(a: FlatChart, b: FlatChart, radicands: Sequence[int] = FIELD_ESCALATION) -> Connection | None:
    """A degree-preserving relabelling plus diagonal scaling with P_a(scaled t) == P_b(t).

    Scalings are looked for in the quadratic fields first; a scaling that needs
    higher radicals (a cube root, say) is then found by sympy's general solver.
    """
    n = a.rank
    syms = [sympy.Symbol(f"s{i + 1}") for i in range(n)]
    tb = sympy.symbols(f"t1:{n + 1}")
    Pb = [p.as_expr() for p in b.P]
    base = max(a.radicand, b.radicand)
    systems = []
    for perm in permutations(range(n)):
        if any(a.d[i] != b.d[perm[i]] for i in range(n)):
            continue
        sub = {sympy.Symbol(f"t{i + 1}"): syms[i] * tb[perm[i]] for i in range(n)}
        eqs = []
        for pa, pb in zip(a.P, Pb):
            diff = sympy.expand(pa.as_expr().xreplace(sub) - pb)
            if diff == 0:
                continue
            eqs.extend(sympy.Poly(diff, *tb).coeffs())
        eqs = [sympy.expand(e) for e in eqs]
        eqs = [e for e in eqs if e != 0]
        if any(not e.free_symbols for e in eqs):
            continue
        systems.append((perm, eqs))
        try:
            res = solve_system(eqs, syms, allowed_radicands=radicands, radicand=base)
        except SolverCapExceeded:
            continue
        for sol in res.solutions:
            if all(sol[s] != 0 for s in syms):
                return Connection(perm=tuple(perm), scale=tuple(sol[s] for s in syms))
    for perm, eqs in systems:
        sols = [sol for sol in sympy.solve(eqs, syms, dict=True) if all(sol.get(s, 0) != 0 for s in syms)]
        if sols:
            # prefer real scalings, then the shortest printed form
            sols.sort(key=lambda sol: (not all(sol[s].is_real for s in syms), len(sympy.sstr([sol[s] for s in syms]))))
            return Connection(perm=tuple(perm), scale=tuple(sympy.nsimplify(sols[0][s]) for s in syms))
    return None
