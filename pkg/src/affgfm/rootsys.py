"""Irreducible reduced root systems and the weight-dependent constants.

Conventions follow Bourbaki.  Vectors live in an orthonormal ambient frame:
``A_l`` in the sum-zero hyperplane of ``R^(l+1)``, ``B/C/D`` in ``R^l`` and
``G_2`` in ``R^3``.  Weights are stored by their coordinates in the simple
coroot basis, which is also the coordinate system of ``x = sum x^r a_r^v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import UnsupportedFamilyRank, ZeroWeight

Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]

FAMILIES = ("A", "B", "C", "D", "G")


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _unit(n: int, i: int, scale: int = 1) -> list[Fraction]:
    v = [Fraction(0)] * n
    v[i] = Fraction(scale)
    return v


def _simple_roots(family: str, rank: int) -> list[list[Fraction]]:
    if family == "A":
        n = rank + 1
        return [[a - b for a, b in zip(_unit(n, i), _unit(n, i + 1))] for i in range(rank)]
    if family == "G":
        return [
            [Fraction(1), Fraction(-1), Fraction(0)],
            [Fraction(-2), Fraction(1), Fraction(1)],
        ]
    n = rank
    roots = [[a - b for a, b in zip(_unit(n, i), _unit(n, i + 1))] for i in range(rank - 1)]
    if family == "B":
        roots.append(_unit(n, n - 1))
    elif family == "C":
        roots.append(_unit(n, n - 1, 2))
    else:
        roots.append([a + b for a, b in zip(_unit(n, n - 2), _unit(n, n - 1))])
    return roots


def invert_matrix(m: Sequence[Sequence[Fraction]]) -> Matrix:
    """Exact Gauss-Jordan inverse of a square rational matrix."""
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def mat_vec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    return tuple(_dot(row, v) for row in m)


@dataclass(frozen=True)
class RootSystem:
    family: str
    rank: int
    simple_roots: tuple[Vector, ...]
    coroots: tuple[Vector, ...]
    cartan: tuple[tuple[int, ...], ...]
    coroot_gram: Matrix
    fundamental_weights: tuple[Vector, ...]
    positive_roots: tuple[tuple[int, ...], ...]

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def root_lengths(self) -> tuple[Fraction, ...]:
        """Squared lengths (a_i, a_i)."""
        return tuple(_dot(a, a) for a in self.simple_roots)

    def ambient(self, coroot_coords: Sequence[Fraction]) -> Vector:
        """Ambient vector of sum_r c_r a_r^v."""
        dim = len(self.coroots[0])
        return tuple(
            sum((Fraction(c) * a[k] for c, a in zip(coroot_coords, self.coroots)), Fraction(0))
            for k in range(dim)
        )

    def root_ambient(self, simple_coords: Sequence[int]) -> Vector:
        dim = len(self.simple_roots[0])
        return tuple(
            sum((c * a[k] for c, a in zip(simple_coords, self.simple_roots)), Fraction(0))
            for k in range(dim)
        )

    def pairing(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
        """Inner product of two vectors given in coroot coordinates."""
        return _dot(u, mat_vec(self.coroot_gram, v))

    def root_in_coroot_coords(self, simple_coords: Sequence[int]) -> Vector:
        """A root sum k_s a_s written in coroot coordinates (a_s = |a_s|^2/2 a_s^v)."""
        return tuple(Fraction(k) * l / 2 for k, l in zip(simple_coords, self.root_lengths))

    def root_exponent(self, simple_coords: Sequence[int]) -> tuple[int, ...]:
        """Exponent vector of e^{2 pi i (beta, x)}: entries (beta, a_r^v)."""
        return tuple(
            sum(k * self.cartan[s][r] for s, k in enumerate(simple_coords)) for r in range(self.rank)
        )


def _positive_roots(cartan: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(n):
                pair = sum(beta[s] * cartan[s][i] for s in range(n))
                new = tuple(b - pair * int(k == i) for k, b in enumerate(beta))
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
        frontier = nxt
    positive = [r for r in seen if all(c >= 0 for c in r)]
    return tuple(sorted(positive, key=lambda r: (sum(r), r)))


def _check_family_rank(family: str, rank: int) -> None:
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 3,
        "G": rank == 2,
    }.get(family, False)
    if not ok:
        raise UnsupportedFamilyRank(f"unsupported root system {family}{rank}")


def build_root_system(family: str, rank: int) -> RootSystem:
    family = family.upper()
    _check_family_rank(family, rank)
    simple = _simple_roots(family, rank)
    coroots = [[2 * x / _dot(a, a) for x in a] for a in simple]
    cartan = tuple(
        tuple(int(_dot(simple[s], coroots[r])) for r in range(rank)) for s in range(rank)
    )
    gram = tuple(tuple(_dot(u, v) for v in coroots) for u in coroots)
    weights = invert_matrix(gram)
    rs = RootSystem(
        family=family,
        rank=rank,
        simple_roots=tuple(tuple(a) for a in simple),
        coroots=tuple(tuple(a) for a in coroots),
        cartan=cartan,
        coroot_gram=gram,
        fundamental_weights=weights,
        positive_roots=_positive_roots(cartan),
    )
    _check_invariants(rs)
    return rs


def _check_invariants(rs: RootSystem) -> None:
    n = rs.rank
    for i in range(n):
        assert rs.cartan[i][i] == 2
        for j in range(n):
            if i != j:
                assert rs.cartan[i][j] <= 0
            assert rs.pairing(rs.fundamental_weights[i], _unit(n, j)) == int(i == j)
    half_sum = [Fraction(0)] * len(rs.simple_roots[0])
    for beta in rs.positive_roots:
        half_sum = [h + x / 2 for h, x in zip(half_sum, rs.root_ambient(beta))]
    rho = [Fraction(0)] * len(half_sum)
    for w in rs.fundamental_weights:
        rho = [r + x for r, x in zip(rho, rs.ambient(w))]
    assert half_sum == rho, "half-sum of positive roots differs from the sum of fundamental weights"


def base_contravariant_metric(rs: RootSystem) -> Matrix:
    """The metric a^{ij} = ((a_i^v, a_j^v))^{-1}."""
    return invert_matrix(rs.coroot_gram)


def rational_gcd(p: Fraction, q: Fraction) -> Fraction:
    """gcd(a/b, c/d) = gcd(ad, cb)/(bd); zero is absorbing."""
    p, q = Fraction(p), Fraction(q)
    if p == 0:
        return abs(q)
    if q == 0:
        return abs(p)
    num = gcd(p.numerator * q.denominator, q.numerator * p.denominator)
    return Fraction(num, p.denominator * q.denominator)


@dataclass(frozen=True)
class WeightChoice:
    marks: tuple[int, ...]
    omega: Vector
    theta: Vector
    kappa: Fraction
    S: frozenset[int]

    @property
    def rank(self) -> int:
        return len(self.marks)


def make_weight(rs: RootSystem, marks: Sequence[int]) -> WeightChoice:
    marks = tuple(int(m) for m in marks)
    if len(marks) != rs.rank or any(m < 0 for m in marks):
        raise ZeroWeight(f"marks must be {rs.rank} nonnegative integers, got {marks}")
    if not any(marks):
        raise ZeroWeight("the weight must be nonzero")
    a = base_contravariant_metric(rs)
    omega = mat_vec(a, marks)
    kappa = Fraction(0)
    for m, length in zip(marks, rs.root_lengths):
        kappa = rational_gcd(kappa, m * length / 2)
    S = frozenset(r for r, m in enumerate(marks) if m > 0)
    return WeightChoice(marks=marks, omega=omega, theta=omega, kappa=kappa, S=S)
