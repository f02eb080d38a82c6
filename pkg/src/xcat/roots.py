"""Simply-laced root systems in fundamental-weight coordinates.

Weights are tuples of ints; the i-th coordinate is the pairing with the i-th
simple coroot. Simple roots are the columns of the Cartan matrix.

Node numbering is Bourbaki's, shifted to start at 0:

* ``A<n>``: the chain ``0 - 1 - ... - n-1``.
* ``D<n>`` (n >= 4): the chain ``0 - 1 - ... - n-2`` plus the edge ``n-3 - n-1``;
  for D4 the central node is 1.
* ``E6/E7/E8``: the chain ``0 - 2 - 3 - 4 - ... - n-1`` plus the edge ``1 - 3``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement

Weight = tuple[int, ...]


def _edges(family: str, rank: int) -> list[tuple[int, int]]:
    if family == "A":
        return [(i, i + 1) for i in range(rank - 1)]
    if family == "D":
        return [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
    if family == "E":
        return [(0, 2)] + [(i, i + 1) for i in range(2, rank - 1)] + [(1, 3)]
    raise ValueError(f"unsupported family {family!r}")


def _inverse(m: list[list[int]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pr = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[pr] = aug[pr], aug[col]
        piv = aug[col][col]
        aug[col] = [x / piv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def _det(m: list[list[int]]) -> int:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        pr = next((i for i in range(col, n) if a[i][col]), None)
        if pr is None:
            return 0
        if pr != col:
            a[col], a[pr] = a[pr], a[col]
            det = -det
        det *= a[col][col]
        for i in range(col + 1, n):
            f = a[i][col] / a[col][col]
            a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return int(det)


@dataclass(frozen=True)
class RootSystem:
    family: str
    rank: int
    cartan: tuple[tuple[int, ...], ...] = field(repr=False)
    det_cartan: int = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    def __str__(self) -> str:
        return self.name

    @cached_property
    def adjugate(self) -> tuple[tuple[int, ...], ...]:
        inv = _inverse([list(r) for r in self.cartan])
        return tuple(tuple(int(x * self.det_cartan) for x in row) for row in inv)

    @cached_property
    def inverse_cartan(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(row) for row in _inverse([list(r) for r in self.cartan]))

    @cached_property
    def simple_roots(self) -> tuple[Weight, ...]:
        return tuple(tuple(self.cartan[j][i] for j in range(self.rank)) for i in range(self.rank))

    @cached_property
    def positive_roots(self) -> tuple[tuple[tuple[int, ...], Weight], ...]:
        """Pairs (simple-root coefficients, weight) for every positive root, sorted by height then coefficients."""
        n = self.rank
        simple = self.simple_roots
        found: dict[tuple[int, ...], Weight] = {}
        frontier = []
        for i in range(n):
            c = tuple(int(j == i) for j in range(n))
            found[c] = simple[i]
            frontier.append(c)
        while frontier:
            nxt = []
            for c in frontier:
                w = found[c]
                for i in range(n):
                    # simply laced: beta + alpha_i is a root iff <beta, alpha_i^vee> = -1
                    if w[i] == -1:
                        c2 = tuple(x + (j == i) for j, x in enumerate(c))
                        if c2 not in found:
                            found[c2] = add(w, simple[i])
                            nxt.append(c2)
            frontier = nxt
        return tuple(sorted(found.items(), key=lambda kv: (sum(kv[0]), kv[0])))

    def adjacent(self, i: int, j: int) -> bool:
        return i != j and self.cartan[i][j] == -1

    def check_weight(self, mu: Weight) -> Weight:
        mu = tuple(int(x) for x in mu)
        if len(mu) != self.rank:
            raise ValueError(f"weight {mu} has length {len(mu)}, expected {self.rank} for {self.name}")
        return mu


def root_system(descriptor: str) -> RootSystem:
    """Parse ``A<n>``, ``D<n>`` or ``E6|E7|E8``."""
    m = re.fullmatch(r"\s*([ADE])(\d+)\s*", descriptor)
    if not m:
        raise ValueError(f"unknown root system {descriptor!r}")
    family, rank = m.group(1), int(m.group(2))
    if family == "A" and rank < 1:
        raise ValueError("A_n needs n >= 1")
    if family == "D" and rank < 4:
        raise ValueError("D_n needs n >= 4")
    if family == "E" and rank not in (6, 7, 8):
        raise ValueError("E_n exists for n in {6, 7, 8}")
    cartan = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for i, j in _edges(family, rank):
        cartan[i][j] = cartan[j][i] = -1
    return RootSystem(family, rank, tuple(tuple(r) for r in cartan), _det(cartan))


def parse_weight(text: str) -> Weight:
    parts = [p for p in text.replace(" ", "").split(",") if p != ""]
    if not parts:
        raise ValueError(f"empty weight literal {text!r}")
    return tuple(int(p) for p in parts)


def add(a: Weight, b: Weight) -> Weight:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Weight, b: Weight) -> Weight:
    return tuple(x - y for x, y in zip(a, b))


def scale(a: Weight, k: int) -> Weight:
    return tuple(k * x for x in a)


def shift(rs: RootSystem, mu: Weight, alpha: int, n: int) -> Weight:
    """``mu + n * alpha_i``."""
    col = rs.simple_roots[alpha]
    return tuple(x + n * c for x, c in zip(mu, col))


def pairing(rs: RootSystem, mu: Weight, alpha_index: int) -> int:
    if not 0 <= alpha_index < rs.rank:
        raise IndexError(f"simple root index {alpha_index} out of range for {rs.name}")
    return mu[alpha_index]


def simple_root_as_weight(rs: RootSystem, alpha_index: int) -> Weight:
    if not 0 <= alpha_index < rs.rank:
        raise IndexError(f"simple root index {alpha_index} out of range for {rs.name}")
    return rs.simple_roots[alpha_index]


def root_coordinates(rs: RootSystem, mu: Weight) -> tuple[Fraction, ...]:
    """Coordinates of ``mu`` in the basis of simple roots (rational in general)."""
    inv = rs.inverse_cartan
    return tuple(sum(inv[i][j] * mu[j] for j in range(rs.rank)) for i in range(rs.rank))


def leq(rs: RootSystem, mu: Weight, lam: Weight) -> tuple[int, ...] | None:
    """Coefficients ``c >= 0`` with ``lam - mu = sum c_i alpha_i``, or None when ``mu`` is not below ``lam``."""
    diff = sub(lam, mu)
    d = rs.det_cartan
    out = []
    for row in rs.adjugate:
        num = sum(a * x for a, x in zip(row, diff))
        q, r = divmod(num, d)
        if r or q < 0:
            return None
        out.append(q)
    return tuple(out)


def depth_below(rs: RootSystem, mu: Weight, lam: Weight) -> int | None:
    c = leq(rs, mu, lam)
    return None if c is None else sum(c)


def is_dominant(mu: Weight) -> bool:
    return all(x >= 0 for x in mu)


def reflect(rs: RootSystem, mu: Weight, i: int) -> Weight:
    return shift(rs, mu, i, -mu[i])


def dominant_conjugate(rs: RootSystem, mu: Weight) -> Weight:
    mu = tuple(mu)
    while True:
        i = next((k for k, x in enumerate(mu) if x < 0), None)
        if i is None:
            return mu
        mu = reflect(rs, mu, i)


def lowest_weight(rs: RootSystem, lam: Weight) -> Weight:
    """``w0(lam)``, the antidominant weight of the orbit."""
    return tuple(-x for x in dominant_conjugate(rs, tuple(-x for x in lam)))


def weyl_polytope_member(rs: RootSystem, mu: Weight, lam: Weight) -> bool:
    if not is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    return leq(rs, dominant_conjugate(rs, mu), lam) is not None


def enumerate_levels(rs: RootSystem, lam: Weight, max_height: int) -> list[tuple[int, list[Weight]]]:
    """Weights ``lam - sum c_i alpha_i`` grouped by ``sum c_i``, each level sorted lexicographically."""
    if max_height < 0:
        raise ValueError("max_height must be non-negative")
    simple = rs.simple_roots
    levels = []
    for h in range(max_height + 1):
        found = set()
        for combo in combinations_with_replacement(range(rs.rank), h):
            mu = list(lam)
            for i in combo:
                for j, c in enumerate(simple[i]):
                    mu[j] -= c
            found.add(tuple(mu))
        levels.append((h, sorted(found)))
    return levels


def weyl_group_orbit(rs: RootSystem, mu: Weight) -> set[Weight]:
    seen = {tuple(mu)}
    todo = [tuple(mu)]
    while todo:
        x = todo.pop()
        for i in range(rs.rank):
            y = reflect(rs, x, i)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def inner(rs: RootSystem, a: Weight, b: Weight) -> Fraction:
    """The invariant form with ``(alpha, alpha) = 2``; in fundamental coordinates it is ``a^T C^-1 b``."""
    inv = rs.inverse_cartan
    return sum((a[i] * inv[i][j] * b[j] for i in range(rs.rank) for j in range(rs.rank)), Fraction(0))
