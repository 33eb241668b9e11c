"""Frobenius structure in flat coordinates: Christoffel symbols, multiplication, potential, unit, Euler field.

Everything is a rational function in t over Q or Q(sqrt d).  The Christoffel
symbols of the intersection form come from the weighted-degree formula

    Gamma_a^{bc} = d_c / (d_b + d_c) * d g^{bc} / dt^a,

and the structure constants from
    c^g_{ab} = (kappa / d_r) eta_{an} eta_{br} eta^{gz} Gamma_z^{nr}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from sympy import QQ

from .errors import IntegrabilityFailure, SingularChartJacobian
from .flatcoords import FlatChart, compose
from .geometry import contravariant_christoffel
from .polys import PolyMatrix, adjugate, derivative, det, format_rational, tfield
from .rootsys import WeightChoice


@dataclass
class FrobeniusData:
    kappa: Fraction
    d: tuple[Fraction, ...]
    eta: list[list[Any]]
    eta_lower: list[list[Any]]
    g_t: list[list[Any]]
    gamma: list  # gamma[a][b][c] = Gamma_a^{bc}
    c: list  # c[g][a][b] = c^g_{ab}
    F: Any
    e_lower: list[Any]
    e: list[Any]
    euler: list[Any]
    unit_form: str
    field: Any = field(repr=False, default=None)


def _field_of(chart: FlatChart):
    return tfield(chart.rank, chart.domain)


def _lift(F, p):
    return F.field_new(F.ring.from_dict(dict(p.terms())))


def _const(F, c):
    return F.field_new(F.ring.ground_new(F.domain.convert(c)))


def metric_in_chart(g: PolyMatrix, chart: FlatChart) -> list[list[Any]]:
    """g^{ab}(t) = (dt/dz) g(P(t)) (dt/dz)^T via the adjugate of dP/dt."""
    n = chart.rank
    F = _field_of(chart)
    J = chart.jacobian()
    dJ = det(J)
    if not dJ:
        raise SingularChartJacobian("chart Jacobian vanishes identically")
    A = adjugate(J)
    gP = [[compose(g[r][s], chart.P, chart.ring) for s in range(n)] for r in range(n)]
    den = _lift(F, dJ * dJ)
    out = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            acc = chart.ring.zero
            for r in range(n):
                if not A[a][r]:
                    continue
                for s in range(n):
                    if A[b][s] and gP[r][s]:
                        acc = acc + A[a][r] * gP[r][s] * A[b][s]
            out[a][b] = out[b][a] = _lift(F, acc) / den
    return out


def christoffel_key(g_t: list[list[Any]], d: Sequence[Fraction]) -> list:
    n = len(g_t)
    F = g_t[0][0].field
    xs = F.gens
    return [
        [[derivative(g_t[b][c], xs[a]) * QQ(d[c] / (d[b] + d[c])) for c in range(n)] for b in range(n)]
        for a in range(n)
    ]


def invert_constant(eta: list[list[Any]], K) -> list[list[Any]]:
    """Inverse of a constant matrix over K by Gauss-Jordan elimination."""
    n = len(eta)
    m = [[K.convert(eta[i][j]) for j in range(n)] + [K.one if i == j else K.zero for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col])
        m[col], m[piv] = m[piv], m[col]
        inv = K.one / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def structure_constants(gamma: list, eta: list[list[Any]], eta_lower: list[list[Any]], d, kappa, F) -> list:
    n = len(eta)
    zero = F.zero
    out = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for g in range(n):
        for a in range(n):
            for b in range(n):
                acc = zero
                for nu in range(n):
                    if not eta_lower[a][nu]:
                        continue
                    for rho in range(n):
                        if not eta_lower[b][rho]:
                            continue
                        coeff = eta_lower[a][nu] * eta_lower[b][rho] * F.domain.convert(QQ(kappa / d[rho]))
                        for z in range(n):
                            if eta[g][z]:
                                acc = acc + gamma[z][nu][rho] * (coeff * eta[g][z])
                out[g][a][b] = acc
    return out


def potential(g_t: list[list[Any]], eta_lower, d, kappa, F):
    """F from the double weighted-Euler integration; checks integrability first."""
    n = len(g_t)
    xs = F.gens
    M = [[F.zero] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            acc = F.zero
            for mu in range(n):
                for sg in range(n):
                    if eta_lower[a][mu] and eta_lower[b][sg]:
                        acc = acc + g_t[mu][sg] * (
                            eta_lower[a][mu] * eta_lower[b][sg] * F.domain.convert(QQ(kappa / (d[mu] + d[sg])))
                        )
            M[a][b] = acc
    for a in range(n):
        for b in range(a + 1, n):
            if M[a][b] - M[b][a]:
                raise IntegrabilityFailure(f"second derivatives not symmetric at ({a + 1},{b + 1})")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if derivative(M[a][b], xs[c]) - derivative(M[a][c], xs[b]):
                    raise IntegrabilityFailure(f"third derivative mismatch at ({a + 1},{b + 1},{c + 1})")
    dF = []
    for b in range(n):
        acc = F.zero
        for a in range(n):
            acc = acc + xs[a] * M[a][b] * QQ(d[a])
        dF.append(acc * QQ(1 / (2 * kappa - d[b])))
    pot = F.zero
    for b in range(n):
        pot = pot + xs[b] * dF[b] * QQ(d[b])
    pot = pot * QQ(1 / (2 * kappa))
    for a in range(n):
        for b in range(n):
            if derivative(derivative(pot, xs[a]), xs[b]) - M[a][b]:
                raise IntegrabilityFailure(f"reconstructed potential misses d{a + 1}d{b + 1}F")
    return pot


def unit_form_text(wc: WeightChoice) -> str:
    """-(1/kappa) sum m_r d log z^r as text."""
    parts = [f"{m}*dlog(z{r + 1})" if m != 1 else f"dlog(z{r + 1})" for r, m in enumerate(wc.marks) if m]
    inner = " + ".join(parts)
    scale = 1 / wc.kappa
    if scale == 1:
        return f"-({inner})" if len(parts) > 1 else f"-{inner}"
    return f"-{scale}*({inner})"


def unit_and_euler(chart: FlatChart, wc: WeightChoice, eta: list[list[Any]], F):
    n = chart.rank
    xs = F.gens
    P = [_lift(F, p) for p in chart.P]
    e_lower = []
    for a in range(n):
        acc = F.zero
        for r, m in enumerate(wc.marks):
            if m:
                acc = acc + derivative(P[r], xs[a]) / P[r] * m
        e_lower.append(acc * QQ(-1 / wc.kappa))
    e = [sum((e_lower[b] * eta[a][b] for b in range(n) if eta[a][b]), F.zero) for a in range(n)]
    euler = [xs[a] * QQ(chart.d[a] / wc.kappa) for a in range(n)]
    return e_lower, e, euler


def frobenius_structure(g: PolyMatrix, chart: FlatChart, wc: WeightChoice) -> FrobeniusData:
    F = _field_of(chart)
    K = chart.domain
    kappa = Fraction(wc.kappa)
    d = chart.d
    eta = [[K.convert(c) for c in row] for row in chart.eta_normal]
    eta_lower = invert_constant(eta, K)
    g_t = metric_in_chart(g, chart)
    gamma = christoffel_key(g_t, d)
    c = structure_constants(gamma, eta, eta_lower, d, kappa, F)
    pot = potential(g_t, eta_lower, d, kappa, F)
    e_lower, e, euler = unit_and_euler(chart, wc, eta, F)
    return FrobeniusData(
        kappa=kappa,
        d=tuple(d),
        eta=eta,
        eta_lower=eta_lower,
        g_t=g_t,
        gamma=gamma,
        c=c,
        F=pot,
        e_lower=e_lower,
        e=e,
        euler=euler,
        unit_form=unit_form_text(wc),
        field=F,
    )


# -- verification ----------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    witness: str = ""


def _first_failure(items) -> str:
    for label, lhs, rhs in items:
        diff = lhs - rhs
        if diff:
            return f"{label}: {format_rational(diff)}"
    return ""


def _check(name: str, items) -> Check:
    w = _first_failure(items)
    return Check(name, not w, w)


def verify_gfm(data: FrobeniusData) -> list[Check]:
    """The seven axioms and identities, each with a witness on failure."""
    n = len(data.d)
    F = data.field
    xs = F.gens
    c, e, k, d = data.c, data.e, data.kappa, data.d
    rng = range(n)
    zero = F.zero
    one = F.one

    def wdvv():
        for a in rng:
            for b in rng:
                for g in rng:
                    for dl in rng:
                        lhs = sum((c[eps][a][b] * c[dl][eps][g] for eps in rng), zero)
                        rhs = sum((c[eps][g][b] * c[dl][eps][a] for eps in rng), zero)
                        yield (f"a={a + 1} b={b + 1} c={g + 1} d={dl + 1}", lhs, rhs)

    def unity():
        for g in rng:
            for b in rng:
                lhs = sum((e[a] * c[g][a][b] for a in rng), zero)
                yield (f"g={g + 1} b={b + 1}", lhs, one if g == b else zero)

    def quasi():
        for g in rng:
            for a in rng:
                for b in rng:
                    lhs = sum((xs[eps] * derivative(c[g][a][b], xs[eps]) * QQ(d[eps] / k) for eps in rng), zero)
                    rhs = c[g][a][b] * QQ(1 - d[a] / k - d[b] / k + d[g] / k)
                    yield (f"g={g + 1} a={a + 1} b={b + 1}", lhs, rhs)

    def eta_degree():
        for a in rng:
            for b in rng:
                val = data.eta_lower[a][b] * F.domain.convert(QQ(1 - d[a] / k - d[b] / k))
                yield (f"a={a + 1} b={b + 1}", _lift_const(F, val), zero)

    def intersection():
        for a in rng:
            for b in rng:
                rhs = sum((xs[g] * data.gamma[g][a][b] * QQ(d[g] / d[b]) for g in rng), zero)
                yield (f"a={a + 1} b={b + 1}", data.g_t[a][b], rhs)

    def euler_potential():
        lhs = sum((xs[a] * derivative(data.F, xs[a]) * QQ(d[a] / k) for a in rng), zero)
        yield ("F", lhs, data.F * 2)

    def euler_unit():
        for a in rng:
            lhs = sum((data.euler[b] * derivative(e[a], xs[b]) for b in rng), zero) - e[a] * QQ(d[a] / k)
            yield (f"a={a + 1}", lhs, -e[a])

    return [
        _check("wdvv", wdvv()),
        _check("unity", unity()),
        _check("quasi_homogeneity", quasi()),
        _check("eta_degree", eta_degree()),
        _check("intersection_form", intersection()),
        _check("euler_potential", euler_potential()),
        _check("euler_unit", euler_unit()),
    ]


def _lift_const(F, c):
    return F.field_new(F.ring.ground_new(c))


def verify_properties(data: FrobeniusData) -> list[Check]:
    """Identities the construction guarantees beyond the axioms."""
    n = len(data.d)
    F = data.field
    xs = F.gens
    G, d, k = data.gamma, data.d, data.kappa
    rng = range(n)
    zero = F.zero
    direct = contravariant_christoffel(data.g_t, list(xs)).gamma

    def key_vs_direct():
        for a in rng:
            for b in rng:
                for c in rng:
                    yield (f"a={a + 1} b={b + 1} c={c + 1}", G[a][b][c], direct[a][b][c])

    def gradient_symmetry():
        for a in rng:
            for b in rng:
                for g in rng:
                    for dl in rng:
                        if g < dl:
                            yield (f"ab={a + 1}{b + 1} g={g + 1} d={dl + 1}", derivative(G[g][a][b], xs[dl]), derivative(G[dl][a][b], xs[g]))

    def product_symmetry():
        for a in rng:
            for b in rng:
                for g in rng:
                    for dl in rng:
                        lhs = sum((G[eps][a][b] * G[dl][eps][g] for eps in rng), zero)
                        rhs = sum((G[eps][a][g] * G[dl][eps][b] for eps in rng), zero)
                        yield (f"a={a + 1} b={b + 1} g={g + 1} d={dl + 1}", lhs, rhs)

    def degree_symmetry():
        for a in rng:
            for b in rng:
                for g in rng:
                    yield (f"a={a + 1} b={b + 1} g={g + 1}", G[a][b][g] * QQ(1 / d[g]), G[a][g][b] * QQ(1 / d[b]))

    def unit_metric():
        for b in rng:
            lhs = sum((data.e_lower[a] * data.g_t[a][b] for a in rng), zero)
            yield (f"b={b + 1}", lhs, xs[b] * QQ(d[b] / k))

    def unit_gamma():
        for b in rng:
            for g in rng:
                lhs = sum((data.e_lower[a] * G[g][a][b] for a in rng), zero)
                rhs = F.one * QQ(d[b] / k) if b == g else zero
                yield (f"b={b + 1} g={g + 1}", lhs, rhs)

    def pairing():
        for a in rng:
            for b in rng:
                if data.eta[a][b]:
                    yield (f"a={a + 1} b={b + 1}", _lift_const(F, F.domain.convert(QQ(d[a] + d[b]))), _lift_const(F, F.domain.convert(QQ(k))))

    def commutativity():
        for g in rng:
            for a in rng:
                for b in rng:
                    if a < b:
                        yield (f"g={g + 1} a={a + 1} b={b + 1}", data.c[g][a][b], data.c[g][b][a])

    return [
        _check("christoffel_key_formula", key_vs_direct()),
        _check("christoffel_gradient_symmetry", gradient_symmetry()),
        _check("christoffel_product_symmetry", product_symmetry()),
        _check("christoffel_degree_symmetry", degree_symmetry()),
        _check("unit_contracts_metric", unit_metric()),
        _check("unit_contracts_christoffel", unit_gamma()),
        _check("degree_pairing", pairing()),
        _check("commutativity", commutativity()),
        _check("potential_weighted_homogeneous", _potential_degree(data)),
    ]


def _potential_degree(data: FrobeniusData):
    """F is weighted homogeneous of degree 2 kappa with no quadratic terms."""
    F = data.field
    num, den = data.F.numer, data.F.denom
    d = data.d
    deg = lambda m: sum((Fraction(e) * w for e, w in zip(m, d)), Fraction(0))
    dens = {deg(m) for m in den.monoms()}
    nums = {deg(m) for m in num.monoms()}
    ok = len(dens) == 1 and len(nums) <= 1 and (not nums or nums.pop() - dens.pop() == 2 * data.kappa)
    quad = den.is_ground and any(sum(m) == 2 for m in num.monoms())
    yield ("degree", F.one if ok and not quad else F.zero, F.one)
