"""Pushforward metric, pencil split, contravariant Christoffel symbols, curvature.

Contravariant Christoffel symbols are assembled from the polynomial tensor

    G^{ijl} = 1/2 (g^{is} d_s g^{jl} + g^{ls} d_s g^{ij} - g^{js} d_s g^{il}),

so that Gamma_k^{ij} = g_{kl} G^{ijl} = adj(g)_{kl} G^{ijl} / det(g).  Every
identity check below is cleared of this single shared denominator and tested
as a polynomial identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from sympy import QQ
from sympy.polys.fields import FracField

from .errors import DegenerateEta, NotLinearInLambda, SingularMetric
from .invariants import _ProductCache, rewrite_in_generators
from .lfourier import FourierPoly, normalized_derivative
from .polys import PolyMatrix, adjugate, derivative, det, lam_index, zring, zvars
from .rootsys import RootSystem, WeightChoice, base_contravariant_metric
from .weylgroup import WeylGroup


def metric_fourier(gens: Sequence[FourierPoly], rs: RootSystem) -> list[list[FourierPoly]]:
    """g_lambda^{ij} = -D_r(z^i) a^{rs} D_s(z^j) as Fourier polynomials."""
    ell = rs.rank
    a = base_contravariant_metric(rs)
    d = [[normalized_derivative(z, r) for r in range(ell)] for z in gens]
    out = [[None] * ell for _ in range(ell)]
    for i in range(ell):
        # contract a with the derivatives of z^i once per row
        ad = [sum((d[i][r] * a[r][s] for r in range(ell)), FourierPoly(ell)) for s in range(ell)]
        for j in range(i, ell):
            entry = -sum((ad[s] * d[j][s] for s in range(ell)), FourierPoly(ell))
            out[i][j] = out[j][i] = entry
    return out


def pushforward_metric(
    gens: Sequence[FourierPoly],
    rs: RootSystem,
    wc: WeightChoice,
    group: WeylGroup | None = None,
    domain=QQ,
) -> PolyMatrix:
    """The metric G(z, lambda) in the generators' coordinates."""
    ell = rs.rank
    fourier = metric_fourier(gens, rs)
    cache = _ProductCache(gens)
    out = [[None] * ell for _ in range(ell)]
    for i in range(ell):
        for j in range(i, ell):
            p = rewrite_in_generators(fourier[i][j], gens, wc, rs, group=group, domain=domain, cache=cache)
            out[i][j] = out[j][i] = p
    return out


def lambda_parts(G: PolyMatrix) -> dict[int, PolyMatrix]:
    """Decompose a (lambda, z) matrix by powers of lambda into z-only matrices."""
    R = G[0][0].ring
    li = lam_index(R)
    target = zring(len(G), R.domain, with_lambda=False)
    parts: dict[int, PolyMatrix] = {}
    n = len(G)
    for i in range(n):
        for j in range(n):
            for monom, c in G[i][j].terms():
                k = monom[li]
                rest = monom[:li] + monom[li + 1 :]
                mat = parts.setdefault(k, [[target.zero] * n for _ in range(n)])
                mat[i][j] = mat[i][j] + target.from_dict({rest: c})
    return parts


def split_pencil(G: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix]:
    parts = lambda_parts(G)
    n = len(G)
    bad = [
        (i + 1, j + 1, k)
        for k, mat in parts.items()
        if k >= 2
        for i in range(n)
        for j in range(n)
        if mat[i][j]
    ]
    if bad:
        raise NotLinearInLambda(
            "metric is not affine in lambda (entries with lambda^2 or higher)", offending=bad
        )
    R = zring(n, G[0][0].ring.domain, with_lambda=False)
    zero = [[R.zero] * n for _ in range(n)]
    g = parts.get(0, zero)
    eta = parts.get(1, zero)
    if not det(eta):
        raise DegenerateEta("the lambda-coefficient metric is degenerate")
    return g, eta


def _vars_of(entry) -> list:
    if hasattr(entry, "field"):
        return list(entry.field.gens)
    return zvars(entry.ring)


def upper_christoffel_tensor(metric: PolyMatrix, variables: Sequence | None = None) -> list:
    """The tensor G^{ijl} (entries in the metric's ring)."""
    n = len(metric)
    xs = list(variables) if variables is not None else _vars_of(metric[0][0])
    dg = [[[derivative(metric[i][j], x) for x in xs] for j in range(n)] for i in range(n)]
    out = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for l in range(n):
                acc = metric[0][0] * 0
                for s in range(n):
                    acc = acc + metric[i][s] * dg[j][l][s] + metric[l][s] * dg[i][j][s] - metric[j][s] * dg[i][l][s]
                out[i][j][l] = acc * QQ(1, 2)
    return out


@dataclass
class ChristoffelData:
    """gamma[k][i][j] = Gamma_k^{ij}; numerators share the denominator ``den``."""

    gamma: list
    numerators: list
    den: Any


def _numerators(metric: PolyMatrix, variables=None):
    n = len(metric)
    D = det(metric)
    if not D:
        raise SingularMetric("metric determinant vanishes identically")
    adj = adjugate(metric)
    U = upper_christoffel_tensor(metric, variables)
    num = [
        [[sum((adj[k][l] * U[i][j][l] for l in range(n)), metric[0][0] * 0) for j in range(n)] for i in range(n)]
        for k in range(n)
    ]
    return num, D


def contravariant_christoffel(metric: PolyMatrix, variables=None) -> ChristoffelData:
    num, D = _numerators(metric, variables)
    n = len(metric)
    entry = metric[0][0]
    if hasattr(entry, "field"):
        gamma = [[[num[k][i][j] / D for j in range(n)] for i in range(n)] for k in range(n)]
    else:
        F = FracField([str(s) for s in entry.ring.symbols], entry.ring.domain)
        to_f = lambda p: F.field_new(F.ring.from_dict(dict(p.terms())))
        Df = to_f(D)
        gamma = [[[to_f(num[k][i][j]) / Df for j in range(n)] for i in range(n)] for k in range(n)]
    return ChristoffelData(gamma=gamma, numerators=num, den=D)


def christoffel_relations(metric: PolyMatrix, chr_data: ChristoffelData, variables=None) -> dict[str, bool]:
    """d_k g^{ij} = Gamma_k^{ij} + Gamma_k^{ji} and g^{ie} Gamma_e^{jk} = g^{je} Gamma_e^{ik}."""
    n = len(metric)
    xs = list(variables) if variables is not None else _vars_of(metric[0][0])
    num, D = chr_data.numerators, chr_data.den
    compat = not any(
        derivative(metric[i][j], xs[k]) * D - num[k][i][j] - num[k][j][i]
        for i in range(n)
        for j in range(n)
        for k in range(n)
    )
    zero = metric[0][0] * 0
    sym = not any(
        sum((metric[i][e] * num[e][j][k] for e in range(n)), zero)
        - sum((metric[j][e] * num[e][i][k] for e in range(n)), zero)
        for i in range(n)
        for j in range(n)
        for k in range(n)
    )
    return {"metric_compatibility": compat, "torsion_free": sym}


def curvature_is_zero(metric: PolyMatrix, variables=None) -> bool:
    """Contravariant Riemann tensor

        R^{ijk}_l = g^{is}(d_s Gamma_l^{jk} - d_l Gamma_s^{jk}) + Gamma_s^{ik} Gamma_l^{sj} - Gamma_s^{ij} Gamma_l^{sk}

    with Gamma = N / D, multiplied through by D^2.
    """
    n = len(metric)
    xs = list(variables) if variables is not None else _vars_of(metric[0][0])
    N, D = _numerators(metric, variables)
    dD = [derivative(D, x) for x in xs]
    dN = [[[[derivative(N[k][i][j], x) for x in xs] for j in range(n)] for i in range(n)] for k in range(n)]
    zero = D * 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    acc = zero
                    for s in range(n):
                        if metric[i][s]:
                            acc = acc + metric[i][s] * (
                                (dN[l][j][k][s] - dN[s][j][k][l]) * D - N[l][j][k] * dD[s] + N[s][j][k] * dD[l]
                            )
                        acc = acc + N[s][i][k] * N[l][s][j] - N[s][i][j] * N[l][s][k]
                    if acc:
                        return False
    return True


def check_linearity(g: PolyMatrix, eta: PolyMatrix) -> bool:
    """Gamma(g + lam eta) = Gamma(g) + lam Gamma(eta), as a polynomial identity in (lam, z)."""
    n = len(g)
    Rz = g[0][0].ring
    RL = zring(n, Rz.domain, with_lambda=True)
    lam = RL.gens[0]
    embed = lambda p: RL.from_dict({(0,) + m: c for m, c in p.terms()})
    zs = RL.gens[1:]
    gl = [[embed(g[i][j]) + lam * embed(eta[i][j]) for j in range(n)] for i in range(n)]
    gg = [[embed(g[i][j]) for j in range(n)] for i in range(n)]
    ee = [[embed(eta[i][j]) for j in range(n)] for i in range(n)]
    Nl, Dl = _numerators(gl, zs)
    Ng, Dg = _numerators(gg, zs)
    Ne, De = _numerators(ee, zs)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                lhs = Nl[k][i][j] * Dg * De
                rhs = (Ng[k][i][j] * De + lam * Ne[k][i][j] * Dg) * Dl
                if lhs - rhs:
                    return False
    return True
