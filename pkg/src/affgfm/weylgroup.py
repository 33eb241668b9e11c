"""The finite Weyl group as exact integer matrices on coroot coordinates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import GroupTooLarge
from .rootsys import RootSystem, WeightChoice

IntMatrix = tuple[tuple[int, ...], ...]

DEFAULT_ORDER_CAP = 10**6


@dataclass(frozen=True)
class WeylElement:
    matrix: IntMatrix
    word: tuple[int, ...]

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(sum((c * x for c, x in zip(row, v)), Fraction(0)) for row in self.matrix)

    def transpose(self) -> IntMatrix:
        return tuple(zip(*self.matrix))


@dataclass(frozen=True)
class WeylGroup:
    rs: RootSystem
    elements: tuple[WeylElement, ...]
    simple: tuple[WeylElement, ...]

    @property
    def order(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Stabilizer:
    elements: tuple[WeylElement, ...]
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)


def _matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def simple_reflection(rs: RootSystem, j: int) -> IntMatrix:
    """sigma_j(x) = x - (a_j, x) a_j^v in coroot coordinates."""
    n = rs.rank
    return tuple(
        tuple(int(r == c) - (rs.cartan[j][c] if r == j else 0) for c in range(n)) for r in range(n)
    )


def classical_order(family: str, rank: int) -> int:
    if family == "A":
        return factorial(rank + 1)
    if family in "BC":
        return 2**rank * factorial(rank)
    if family == "D":
        return 2 ** (rank - 1) * factorial(rank)
    return 12


def generate_group(rs: RootSystem, cap: int = DEFAULT_ORDER_CAP) -> WeylGroup:
    n = rs.rank
    if n > 6:
        raise GroupTooLarge(f"rank {n} exceeds the enumeration bound 6")
    gens = [simple_reflection(rs, j) for j in range(n)]
    identity = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
    seen = {identity: ()}
    queue = deque([identity])
    while queue:
        m = queue.popleft()
        for j, s in enumerate(gens):
            new = _matmul(m, s)
            if new not in seen:
                seen[new] = seen[m] + (j,)
                if len(seen) > cap:
                    raise GroupTooLarge(f"group order exceeds cap {cap}")
                queue.append(new)
    elements = tuple(WeylElement(m, w) for m, w in seen.items())
    simple = tuple(WeylElement(g, (j,)) for j, g in enumerate(gens))
    return WeylGroup(rs=rs, elements=elements, simple=simple)


def orbit(group: WeylGroup, weight: Sequence[Fraction]) -> tuple[list[tuple[Fraction, ...]], int]:
    """Deduplicated orbit (in group enumeration order) and stabilizer size."""
    weight = tuple(Fraction(x) for x in weight)
    out: dict[tuple[Fraction, ...], None] = {}
    stab = 0
    for el in group.elements:
        image = el.apply(weight)
        out.setdefault(image, None)
        if image == weight:
            stab += 1
    return list(out), stab


def stabilizer(group: WeylGroup, wc: WeightChoice) -> Stabilizer:
    elements = tuple(el for el in group.elements if el.apply(wc.omega) == wc.omega)
    generators = tuple(
        j for j, s in enumerate(group.simple) if s.apply(wc.omega) == wc.omega
    )
    return Stabilizer(elements=elements, generators=generators)


def preserves_form(rs: RootSystem, el: WeylElement) -> bool:
    m = el.matrix
    gram = rs.coroot_gram
    n = rs.rank
    for i in range(n):
        for j in range(n):
            val = sum(m[k][i] * gram[k][l] * m[l][j] for k in range(n) for l in range(n))
            if val != gram[i][j]:
                return False
    return True


def generated_subgroup(group: WeylGroup, generators: Sequence[int]) -> set[IntMatrix]:
    """Closure of a set of simple reflections (used to cross-check parabolic stabilizers)."""
    n = group.rs.rank
    identity = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
    gens = [group.simple[j].matrix for j in generators]
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                new = _matmul(m, g)
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
        frontier = nxt
    return seen
