"""Truncated-series periods of the flat pencil g + lambda eta.

With rho = 1/lambda a period homogeneous of degree zero has the form
v = rho^(d/kappa) h(z, rho), h(z, 0) = t(z).  Writing xi = grad_z h and
expanding A(rho) of the metric eta + rho g,

    A_j^k(rho) = sum_r theta_r z^r Gamma^k_{rj}(rho) + theta_j delta_j^k,

the coefficients xi_0, xi_1, ... solve the triangular recursion

    (A_0 - d - n kappa) xi_n = -sum_{m=1..n} A_m xi_{n-m},    xi_0 = grad t.

This is the only floating point module; everything runs in mpmath at a
configurable number of decimal digits.  The exact identity A_0 grad t = d grad t
is verified symbolically before any numerics.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import mpmath
import sympy
from sympy import QQ

from .errors import BadBasePoint, ChartError, ResonantShift
from .flatcoords import FlatChart, compose
from .geometry import _numerators
from .polys import PolyMatrix, adjugate, det, derivative, zvars

DEFAULT_DIGITS = 50
NEWTON_STARTS = 24
NEWTON_STEPS = 200
BASE_POINT_ATTEMPTS = 8


@dataclass
class PeriodSeries:
    alpha: int  # 0-based chart index
    degree: Fraction
    xi: list[list[Any]]  # xi[n][j]: coefficient of rho^n in dh/dz^j
    base_point: tuple[Fraction, ...]
    order: int
    precision: int
    t0: list[Any] = field(default_factory=list)
    problem: "PeriodProblem | None" = field(default=None, repr=False, compare=False)

    def gradient(self, rho) -> list[Any]:
        """Truncated xi(rho) at the base point."""
        return [sum((self.xi[n][j] * rho**n for n in range(self.order + 1)), mpmath.mpf(0)) for j in range(len(self.xi[0]))]

    def to_json(self, digits: int | None = None) -> dict[str, Any]:
        digits = digits or self.precision
        return {
            "alpha": self.alpha + 1,
            "degree": str(self.degree),
            "base_point": [str(x) for x in self.base_point],
            "order": self.order,
            "precision": self.precision,
            "t0": [_num_text(x, digits) for x in self.t0],
            "xi": [[_num_text(x, digits) for x in row] for row in self.xi],
        }


def _num_text(x, digits: int) -> str:
    x = mpmath.mpmathify(x)
    if isinstance(x, mpmath.mpc) and x.imag != 0:
        return f"{mpmath.nstr(x.real, digits)}{'+' if x.imag >= 0 else '-'}{mpmath.nstr(abs(x.imag), digits)}j"
    return mpmath.nstr(mpmath.re(x), digits)


@dataclass
class Residuals:
    flatness: Any
    homogeneity: Any
    symmetry: Any

    @property
    def max(self):
        return max(self.flatness, self.homogeneity, self.symmetry)


# -- exact check -----------------------------------------------------------------


def eigen_identity_holds(eta: PolyMatrix, theta: Sequence[Fraction], chart: FlatChart) -> list[bool]:
    """A_0 grad t^a == d_a grad t^a as polynomial identities in t, one flag per a.

    With D = det eta, Gamma^k_{rj} = -sum_i adj(eta)_{ri} N[j][i][k] / D^2 where
    N / D are the contravariant symbols; grad t^a = adj(J)[a] / det J.
    """
    n = len(eta)
    T = chart.ring
    K = T.domain
    N, D = _numerators(eta)
    adj = adjugate(eta)
    zs = zvars(eta[0][0].ring)
    R = eta[0][0].ring
    D2 = D * D
    M = [[R.zero] * n for _ in range(n)]
    for j in range(n):
        for k in range(n):
            acc = R.zero
            for r in range(n):
                inner = sum((adj[r][i] * N[j][i][k] for i in range(n)), R.zero)
                acc = acc - zs[r] * inner * QQ(theta[r].numerator, theta[r].denominator)
            if j == k:
                acc = acc + D2 * QQ(theta[j].numerator, theta[j].denominator)
            M[j][k] = acc
    Mt = [[compose(M[j][k], chart.P, T) for k in range(n)] for j in range(n)]
    Dt = compose(D2, chart.P, T)
    adjJ = adjugate(chart.jacobian())
    out = []
    for a in range(n):
        da = K.convert(QQ(chart.d[a].numerator, chart.d[a].denominator))
        ok = True
        for j in range(n):
            lhs = sum((Mt[j][k] * adjJ[a][k] for k in range(n)), T.zero)
            if lhs - Dt * adjJ[a][j] * da:
                ok = False
                break
        out.append(ok)
    return out


# -- numeric problem -------------------------------------------------------------


def _lambdify(exprs, symbols) -> Callable:
    return sympy.lambdify(symbols, exprs, modules="mpmath")


def _matrix_expr(m: PolyMatrix) -> list[list[sympy.Expr]]:
    return [[p.as_expr() for p in row] for row in m]


def _series_mul(a: list, b: list, order: int) -> list:
    """Truncated product of matrix power series (lists of mpmath matrices)."""
    out = []
    for n in range(order + 1):
        acc = None
        for m in range(n + 1):
            if m < len(a) and n - m < len(b):
                term = a[m] * b[n - m]
                acc = term if acc is None else acc + term
        out.append(acc if acc is not None else mpmath.zeros(a[0].rows, b[0].cols))
    return out


class PeriodProblem:
    """Numeric evaluators for eta + rho g and the chart, shared by all series of a case."""

    def __init__(
        self,
        g: PolyMatrix,
        eta: PolyMatrix,
        theta: Sequence[Fraction],
        kappa: Fraction,
        chart: FlatChart,
        precision: int = DEFAULT_DIGITS,
    ):
        self.n = len(eta)
        self.g = g
        self.eta = eta
        self.theta = tuple(Fraction(x) for x in theta)
        self.kappa = Fraction(kappa)
        self.chart = chart
        self.precision = precision
        zs = zvars(eta[0][0].ring)
        zsym = sympy.symbols(f"z1:{self.n + 1}")
        ts = sympy.symbols(f"t1:{self.n + 1}")
        self._eta = _lambdify(_matrix_expr(eta), zsym)
        self._g = _lambdify(_matrix_expr(g), zsym)
        self._deta = [_lambdify(_matrix_expr([[derivative(p, x) for p in row] for row in eta]), zsym) for x in zs]
        self._dg = [_lambdify(_matrix_expr([[derivative(p, x) for p in row] for row in g]), zsym) for x in g[0][0].ring.gens]
        self._P = _lambdify([p.as_expr() for p in chart.P], ts)
        self._J = _lambdify(_matrix_expr(chart.jacobian()), ts)
        self._det_eta = det(eta)
        self._exact_checked = False

    # chart inversion

    def _digits(self):
        # never lower the precision: mpmath.diff raises it around its calls
        return mpmath.workdps(max(mpmath.mp.dps, self.precision))

    def _newton(self, guess: Sequence, target: Sequence) -> list | None:
        t = mpmath.matrix([mpmath.mpmathify(x) for x in guess])
        eps = mpmath.mpf(10) ** (-mpmath.mp.dps + 3)
        for _ in range(NEWTON_STEPS):
            f = mpmath.matrix([a - b for a, b in zip(self._P(*t), target)])
            J = mpmath.matrix(self._J(*t))
            try:
                step = mpmath.lu_solve(J, f)
            except ZeroDivisionError:
                return None
            t -= step
            if mpmath.mnorm(step, 1) <= eps * max(1, mpmath.mnorm(t, 1)):
                return [t[i] for i in range(self.n)]
        return None

    def chart_point(self, z: Sequence, start: Sequence | None = None) -> list:
        """A solution t of P(t) = z by Newton's method.

        Starting from ``start`` when given (continuation near a known point);
        otherwise from a fixed sequence of real, then complex, initial guesses.
        """
        with self._digits():
            target = [mpmath.mpmathify(x) for x in z]
            if start is not None:
                guesses = [list(start)]
            else:
                rng = random.Random(0)
                guesses = [[mpmath.mpf(1)] * self.n]
                guesses += [[mpmath.mpf(rng.uniform(0.5, 2.0)) for _ in range(self.n)] for _ in range(NEWTON_STARTS // 2)]
                guesses += [
                    [mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(self.n)]
                    for _ in range(NEWTON_STARTS // 2)
                ]
            for guess in guesses:
                t = self._newton(guess, target)
                if t is not None:
                    return [_real_if_close(v) for v in t]
        raise BadBasePoint(f"no chart preimage found for z = {[str(x) for x in z]}")

    # series of the geometry

    def christoffel_series(self, z: Sequence, order: int) -> list[list[list[list[Any]]]]:
        """gam[n][k][i][j] = coefficient of rho^n in Gamma^k_{ij} of eta + rho g."""
        n = self.n
        eta0 = mpmath.matrix(self._eta(*z))
        g0 = mpmath.matrix(self._g(*z))
        if abs(mpmath.det(eta0)) < mpmath.mpf(10) ** (-self.precision // 2):
            raise BadBasePoint(f"det eta vanishes at z = {list(z)}")
        einv = eta0**-1
        # C(rho) = (eta + rho g)^-1 = sum (-einv g)^m einv rho^m
        C = [einv]
        for _ in range(order):
            C.append(-einv * g0 * C[-1])
        G = [eta0, g0]
        dC = []
        for s in range(n):
            dG = [mpmath.matrix(self._deta[s](*z)), mpmath.matrix(self._dg[s](*z))]
            dC.append([-m for m in _series_mul(_series_mul(C, dG, order), C, order)])
        out = []
        for m in range(order + 1):
            gam = [[[mpmath.mpf(0)] * n for _ in range(n)] for _ in range(n)]
            for p in range(min(m, 1) + 1):
                q = m - p
                for k in range(n):
                    for i in range(n):
                        for j in range(i, n):
                            acc = mpmath.mpf(0)
                            for l in range(n):
                                acc += G[p][k, l] * (dC[i][q][l, j] + dC[j][q][l, i] - dC[l][q][i, j])
                            gam[k][i][j] += acc / 2
                            if j != i:
                                gam[k][j][i] = gam[k][i][j]
            out.append(gam)
        return out

    def a_series(self, z: Sequence, order: int) -> list:
        """A_n with A_n[j, k] = coefficient of rho^n in A_j^k."""
        n = self.n
        gam = self.christoffel_series(z, order)
        theta = [mpmath.mpf(x.numerator) / x.denominator for x in self.theta]
        out = []
        for m in range(order + 1):
            A = mpmath.zeros(n, n)
            for j in range(n):
                for k in range(n):
                    A[j, k] = sum((theta[r] * z[r] * gam[m][k][r][j] for r in range(n)), mpmath.mpf(0))
                    if m == 0 and j == k:
                        A[j, k] += theta[j]
            out.append(A)
        return out

    def gradient_series(self, alpha: int, z: Sequence, order: int, t: Sequence) -> list[list[Any]]:
        """xi_0 ... xi_order at z, with xi_0 the chart gradient at the preimage t."""
        n = self.n
        with self._digits():
            J = mpmath.matrix(self._J(*t))
            if abs(mpmath.det(J)) < mpmath.mpf(10) ** (-self.precision // 2):
                raise BadBasePoint(f"the chart Jacobian is singular over z = {list(z)}")
            Jinv = J**-1
            xi0 = mpmath.matrix([Jinv[alpha, j] for j in range(n)])
            A = self.a_series(z, order)
            d = mpmath.mpf(self.chart.d[alpha].numerator) / self.chart.d[alpha].denominator
            kappa = mpmath.mpf(self.kappa.numerator) / self.kappa.denominator
            xs = [xi0]
            scale = mpmath.mnorm(A[0], 1) + abs(d) + order * kappa
            for m in range(1, order + 1):
                shifted = A[0] - (d + m * kappa) * mpmath.eye(n)
                if abs(mpmath.det(shifted)) < scale**n * mpmath.mpf(10) ** (-self.precision // 2):
                    raise ResonantShift(f"A_0 - d_{alpha + 1} - {m} kappa is singular at z = {list(z)}")
                rhs = mpmath.zeros(n, 1)
                for p in range(1, m + 1):
                    rhs -= A[p] * xs[m - p]
                xs.append(mpmath.lu_solve(shifted, rhs))
            return [[x[j] for j in range(n)] for x in xs]

    def eigen_residual(self, alpha: int, z: Sequence, t: Sequence) -> Any:
        """|A_0 xi_0 - d xi_0| numerically, a cross-check of the exact identity."""
        with self._digits():
            xi0 = mpmath.matrix(self.gradient_series(alpha, z, 0, t)[0])
            A0 = self.a_series(z, 0)[0]
            d = mpmath.mpf(self.chart.d[alpha].numerator) / self.chart.d[alpha].denominator
            return mpmath.mnorm(A0 * xi0 - d * xi0, 1)

    def check_exact(self) -> None:
        if self._exact_checked:
            return
        flags = eigen_identity_holds(self.eta, self.theta, self.chart)
        bad = [a + 1 for a, ok in enumerate(flags) if not ok]
        if bad:
            raise ChartError(f"grad t^a is not an eigenvector of A_0 for a = {bad}")
        self._exact_checked = True


def _real_if_close(v):
    v = mpmath.mpmathify(v)
    if isinstance(v, mpmath.mpc) and abs(v.imag) <= abs(v) * mpmath.mpf(10) ** (-mpmath.mp.dps + 5):
        return v.real
    return v


def _as_fractions(z0: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in z0)


def _mp(z0: Sequence[Fraction]) -> list:
    return [mpmath.mpf(x.numerator) / x.denominator for x in z0]


def period_series(
    g: PolyMatrix,
    eta: PolyMatrix,
    d: Sequence[Fraction] | None,
    kappa: Fraction,
    chart: FlatChart,
    z0: Sequence,
    K: int,
    precision: int = DEFAULT_DIGITS,
    theta: Sequence[Fraction] | None = None,
) -> list[PeriodSeries]:
    """All l period series at the rational base point z0, to order K in rho.

    ``d`` defaults to the chart degrees; ``theta`` (the z degrees) is required.
    """
    if theta is None:
        raise ValueError("theta (the degrees of z) is required")
    if d is not None and tuple(Fraction(x) for x in d) != tuple(chart.d):
        raise ChartError("degrees do not match the chart")
    problem = PeriodProblem(g, eta, theta, kappa, chart, precision)
    return problem_series(problem, z0, K)


def problem_series(problem: PeriodProblem, z0: Sequence, K: int) -> list[PeriodSeries]:
    problem.check_exact()
    base = _as_fractions(z0)
    if len(base) != problem.n:
        raise BadBasePoint(f"base point needs {problem.n} coordinates, got {len(base)}")
    z_exact = [QQ(x.numerator, x.denominator) for x in base]
    if not problem._det_eta(*z_exact):
        raise BadBasePoint(f"det eta vanishes at z = {[str(x) for x in base]}")
    with mpmath.workdps(problem.precision):
        z = _mp(base)
        t0 = problem.chart_point(z)
        out = []
        for a in range(problem.n):
            xi = problem.gradient_series(a, z, K, t0)
            out.append(
                PeriodSeries(
                    alpha=a,
                    degree=problem.chart.d[a],
                    xi=xi,
                    base_point=base,
                    order=K,
                    precision=problem.precision,
                    t0=t0,
                    problem=problem,
                )
            )
    return out


def base_point_candidates(n: int, count: int = BASE_POINT_ATTEMPTS) -> list[tuple[Fraction, ...]]:
    """Deterministic rational points: (3, 5, 7, ...)/(2, 3, 4, ...) shifted by k/7."""
    primes = [3, 5, 7, 11, 13, 17]
    return [tuple(Fraction(primes[j], j + 2) + Fraction(k, 7) for j in range(n)) for k in range(count)]


def series_with_retry(problem: PeriodProblem, K: int, z0: Sequence | None = None) -> list[PeriodSeries]:
    """Use z0 when given; otherwise walk the candidate base points until one works."""
    if z0 is not None:
        return problem_series(problem, z0, K)
    last: Exception | None = None
    for point in base_point_candidates(problem.n):
        try:
            return problem_series(problem, point, K)
        except (BadBasePoint, ResonantShift) as exc:
            last = exc
    raise BadBasePoint(f"no usable base point among the candidates: {last}")


# -- residuals -------------------------------------------------------------------


def default_samples(base_point: Sequence[Fraction], offset: Fraction = Fraction(1, 20)) -> list[tuple[Fraction, ...]]:
    """The base point and one shifted point per coordinate."""
    out = [tuple(base_point)]
    for j in range(len(base_point)):
        out.append(tuple(x + (offset if i == j else 0) for i, x in enumerate(base_point)))
    return out


def residual_check(
    series: PeriodSeries,
    samples: Sequence[Sequence] | None = None,
    rho: Any = Fraction(1, 100),
) -> Residuals:
    """Max residuals of the truncated gradient xi(z, rho) at sample points z.

    flatness     d xi_j / d z^i - Gamma^k_{ij}(rho) xi_k
    homogeneity  -kappa rho d xi_j / d rho + sum theta_r z^r d xi_j / d z^r - (d - theta_j) xi_j
    symmetry     d xi_j / d z^i - d xi_i / d z^j

    z-derivatives are numeric (mpmath.diff); the rho-derivative is termwise.
    """
    problem = series.problem
    if problem is None:
        raise ValueError("series carries no problem context")
    n, K, a = problem.n, series.order, series.alpha
    points = [tuple(Fraction(x) for x in s) for s in (samples or default_samples(series.base_point))]
    with mpmath.workdps(problem.precision):
        r = mpmath.mpf(rho.numerator) / rho.denominator if isinstance(rho, Fraction) else mpmath.mpf(rho)
        kappa = mpmath.mpf(problem.kappa.numerator) / problem.kappa.denominator
        theta = [mpmath.mpf(x.numerator) / x.denominator for x in problem.theta]
        d = mpmath.mpf(series.degree.numerator) / series.degree.denominator
        t_base = series.t0
        worst = [mpmath.mpf(0)] * 3
        for point in points:
            z = _mp(point)
            t = problem.chart_point(z, start=t_base)

            def xi_at(*zz, _t=t):
                tt = problem.chart_point(list(zz), start=_t)
                coeffs = problem.gradient_series(a, list(zz), K, tt)
                return [sum((coeffs[m][j] * r**m for m in range(K + 1)), mpmath.mpf(0)) for j in range(n)]

            coeffs = problem.gradient_series(a, z, K, t)
            xi = [sum((coeffs[m][j] * r**m for m in range(K + 1)), mpmath.mpf(0)) for j in range(n)]
            rho_dxi = [sum((m * coeffs[m][j] * r**m for m in range(K + 1)), mpmath.mpf(0)) for j in range(n)]
            # dxi[i][j] = d xi_j / d z^i
            dxi = []
            for i in range(n):
                order = tuple(int(q == i) for q in range(n))
                dxi.append([mpmath.diff(lambda *zz, _j=j: xi_at(*zz)[_j], z, order) for j in range(n)])
            # Christoffel symbols at this rho by direct inversion, independent of the series
            gam_rho = _christoffel_at(problem, z, r)
            for i in range(n):
                for j in range(n):
                    flat = dxi[i][j] - sum((gam_rho[k][i][j] * xi[k] for k in range(n)), mpmath.mpf(0))
                    worst[0] = max(worst[0], abs(flat))
                    worst[2] = max(worst[2], abs(dxi[i][j] - dxi[j][i]))
            for j in range(n):
                hom = -kappa * rho_dxi[j] + sum((theta[q] * z[q] * dxi[q][j] for q in range(n)), mpmath.mpf(0))
                hom -= (d - theta[j]) * xi[j]
                worst[1] = max(worst[1], abs(hom))
        return Residuals(flatness=worst[0], homogeneity=worst[1], symmetry=worst[2])


def _christoffel_at(problem: PeriodProblem, z: Sequence, rho) -> list:
    """Gamma^k_{ij} of eta + rho g at z, by direct inversion (no series)."""
    n = problem.n
    G = mpmath.matrix(problem._eta(*z)) + rho * mpmath.matrix(problem._g(*z))
    C = G**-1
    dC = [-C * (mpmath.matrix(problem._deta[s](*z)) + rho * mpmath.matrix(problem._dg[s](*z))) * C for s in range(n)]
    return [
        [
            [sum((G[k, l] * (dC[i][l, j] + dC[j][l, i] - dC[l][i, j]) for l in range(n)), mpmath.mpf(0)) / 2 for j in range(n)]
            for i in range(n)
        ]
        for k in range(n)
    ]
