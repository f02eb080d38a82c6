"""Coefficient fields: the rationals, prime fields and cyclotomic fields.

Each field knows how to do scalar arithmetic, dense matrix arithmetic on numpy
arrays, canonical string encoding of its elements and parsing of the
``q`` literal grammar (``1``, ``-1``, an integer, ``zeta^k``).
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .laurent import LaurentPoly

__all__ = [
    "Field",
    "Rationals",
    "PrimeField",
    "CyclotomicField",
    "CycloElement",
    "FieldContext",
    "UnsupportedContext",
    "parse_field",
    "make_context",
    "evaluate",
    "evaluate_binomial",
    "quantum_characteristic",
]


class UnsupportedContext(ValueError):
    """A (field, q) pair outside what the engine supports."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


class Field:
    """Base class; elements are Python objects supporting ``+ - *`` and ``not``."""

    descriptor: str
    characteristic: int
    dtype = object

    # scalars

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return not a

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        result = self.one()
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def multiplicative_order(self, a) -> int | None:
        raise NotImplementedError

    def encode(self, a) -> str:
        raise NotImplementedError

    def decode(self, s: str):
        raise NotImplementedError

    def parse_element(self, literal: str):
        raise NotImplementedError

    # matrices (dense numpy arrays, shape always explicit)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.full((rows, cols), self.zero(), dtype=object)

    def identity(self, n: int) -> np.ndarray:
        m = self.zeros(n, n)
        one = self.one()
        for i in range(n):
            m[i, i] = one
        return m

    def array(self, rows, shape: tuple[int, int] | None = None) -> np.ndarray:
        if shape is not None and (shape[0] == 0 or shape[1] == 0):
            return self.zeros(*shape)
        m = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                m[i, j] = x
        return m

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return a @ b

    def madd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a + b

    def msub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a - b

    def scale(self, a: np.ndarray, s) -> np.ndarray:
        if a.size == 0:
            return a.copy()
        return a * s

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if not (a.size and b.size):
            return self.zeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
        return np.kron(a, b)

    def is_zero_matrix(self, a: np.ndarray) -> bool:
        return all(not x for x in a.flat)

    def matrices_equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and self.is_zero_matrix(self.msub(a, b))

    def rref(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns.

        Columns are scanned left to right; the pivot row is the first row (top
        to bottom) with a nonzero entry in the column.
        """
        r_mat = a.copy()
        m, n = r_mat.shape
        pivots: list[int] = []
        row = 0
        for col in range(n):
            if row == m:
                break
            pr = next((i for i in range(row, m) if r_mat[i, col]), None)
            if pr is None:
                continue
            if pr != row:
                r_mat[[row, pr]] = r_mat[[pr, row]]
            inv = self.inv(r_mat[row, col])
            r_mat[row] = r_mat[row] * inv
            prow = r_mat[row]
            for i in range(m):
                if i != row:
                    f = r_mat[i, col]
                    if f:
                        r_mat[i] = r_mat[i] - prow * f
            pivots.append(col)
            row += 1
        return r_mat, pivots

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.descriptor == self.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.descriptor!r})"


class Rationals(Field):
    descriptor = "rational"
    characteristic = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n: int):
        return Fraction(n)

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def multiplicative_order(self, a) -> int | None:
        if a == 1:
            return 1
        if a == -1:
            return 2
        return None

    def encode(self, a) -> str:
        return str(Fraction(a))

    def decode(self, s: str):
        return Fraction(s)

    def parse_element(self, literal: str):
        try:
            value = Fraction(literal.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UnsupportedContext(f"bad rational literal {literal!r}") from exc
        return value


class PrimeField(Field):
    """``F_p`` with elements stored as ints in ``[0, p)``."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise UnsupportedContext(f"{p} is not prime")
        self.p = p
        self.descriptor = f"fp:{p}"
        self.characteristic = p
        # int64 products stay exact while p^2 * (inner dimension) < 2^63
        self.dtype = np.int64 if p < (1 << 24) else object

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n: int):
        return int(n) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        a = int(a) % self.p
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def multiplicative_order(self, a) -> int | None:
        a = int(a) % self.p
        if not a:
            return None
        for d in _divisors(self.p - 1):
            if pow(a, d, self.p) == 1:
                return d
        return None  # unreachable for nonzero a

    def encode(self, a) -> str:
        return str(int(a) % self.p)

    def decode(self, s: str):
        return int(s) % self.p

    def parse_element(self, literal: str):
        try:
            return int(literal.strip()) % self.p
        except ValueError as exc:
            raise UnsupportedContext(f"bad residue literal {literal!r}") from exc

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        if self.dtype is object:
            return np.full((rows, cols), 0, dtype=object)
        return np.zeros((rows, cols), dtype=np.int64)

    def array(self, rows, shape=None) -> np.ndarray:
        if shape is not None and (shape[0] == 0 or shape[1] == 0):
            return self.zeros(*shape)
        return np.array([[int(x) % self.p for x in row] for row in rows], dtype=self.dtype).reshape(
            len(rows), len(rows[0]) if rows else 0
        )

    def identity(self, n: int) -> np.ndarray:
        m = self.zeros(n, n)
        for i in range(n):
            m[i, i] = 1
        return m

    def matmul(self, a, b):
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return (a @ b) % self.p

    def madd(self, a, b):
        return (a + b) % self.p

    def msub(self, a, b):
        return (a - b) % self.p

    def scale(self, a, s):
        return (a * (int(s) % self.p)) % self.p

    def kron(self, a, b):
        return Field.kron(self, a, b) % self.p

    def is_zero_matrix(self, a) -> bool:
        return not np.any(a % self.p)

    def rref(self, a):
        p = self.p
        r_mat = a.copy() % p
        m, n = r_mat.shape
        pivots: list[int] = []
        row = 0
        for col in range(n):
            if row == m:
                break
            nz = np.nonzero(r_mat[row:, col])[0]
            if nz.size == 0:
                continue
            pr = row + int(nz[0])
            if pr != row:
                r_mat[[row, pr]] = r_mat[[pr, row]]
            inv = pow(int(r_mat[row, col]), -1, p)
            r_mat[row] = (r_mat[row] * inv) % p
            factors = r_mat[:, col].copy()
            factors[row] = 0
            if np.any(factors):
                r_mat = (r_mat - np.outer(factors, r_mat[row])) % p
            pivots.append(col)
            row += 1
        return r_mat, pivots


def _norm(x):
    # integral coordinates are kept as ints; arithmetic on them is much cheaper
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


class CycloElement:
    """Element of Q(zeta_d) as coefficients in the basis ``1, zeta, ..., zeta^(phi-1)``."""

    __slots__ = ("K", "c")

    def __init__(self, K: CyclotomicField, c: tuple[Fraction, ...]):
        self.K = K
        self.c = c

    def _lift(self, other) -> CycloElement:
        if isinstance(other, CycloElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.K.from_fraction(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return CycloElement(self.K, tuple(_norm(x + y) for x, y in zip(self.c, other.c)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return CycloElement(self.K, tuple(_norm(x - y) for x, y in zip(self.c, other.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return CycloElement(self.K, tuple(-x for x in self.c))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.K.zero()
            if isinstance(other, int):
                return CycloElement(self.K, tuple(x * other for x in self.c))
            return CycloElement(self.K, tuple(_norm(x * other) for x in self.c))
        if not isinstance(other, CycloElement):
            return NotImplemented
        return self.K._mul(self.c, other.c)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return any(self.c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CycloElement):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == self.K.from_fraction(Fraction(other)).c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.c)

    def __repr__(self) -> str:
        return f"CycloElement({self.K.descriptor}, {self.K.encode(self)})"


@lru_cache(maxsize=None)
def cyclotomic_polynomial(d: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of the d-th cyclotomic polynomial."""
    num = [-1] + [0] * (d - 1) + [1]  # x^d - 1
    for e in _divisors(d)[:-1]:
        den = cyclotomic_polynomial(e)
        dn = len(den) - 1
        quot = [0] * (len(num) - dn)
        for i in range(len(num) - 1, dn - 1, -1):
            c = num[i]
            if c:
                quot[i - dn] = c  # den is monic
                for j in range(dn + 1):
                    num[i - dn + j] -= c * den[j]
        num = quot
    return tuple(num)


class CyclotomicField(Field):
    """``Q(zeta_d)`` realized as ``Q[x] / Phi_d(x)``."""

    characteristic = 0

    def __init__(self, d: int):
        if d < 1:
            raise UnsupportedContext("cyclotomic index must be positive")
        self.d = d
        self.descriptor = f"cyclo:{d}"
        self.phi_poly = cyclotomic_polynomial(d)
        self.degree = len(self.phi_poly) - 1
        n = self.degree
        # x^k mod Phi_d for 0 <= k < max(2n - 1, d)
        table: list[tuple[int, ...]] = []
        cur = [0] * n
        cur[0] = 1
        for _ in range(max(2 * n - 1, d, 1)):
            table.append(tuple(cur))
            top = cur[-1]
            shifted = [0] + cur[:-1]
            if top:
                for j in range(n):
                    shifted[j] -= top * self.phi_poly[j]
            cur = shifted
        self._xpow = table
        self._zero = CycloElement(self, (0,) * n)
        self._one = CycloElement(self, table[0])

    def zero(self):
        return self._zero

    def one(self):
        return self._one

    def from_fraction(self, x: Fraction) -> CycloElement:
        c = [0] * self.degree
        c[0] = _norm(x)
        return CycloElement(self, tuple(c))

    def from_int(self, n: int):
        return self.from_fraction(Fraction(n))

    def zeta(self, k: int = 1) -> CycloElement:
        return CycloElement(self, self._xpow[k % self.d])

    def _mul(self, a: tuple, b: tuple) -> CycloElement:
        n = self.degree
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = prod[:n]
        for k in range(n, 2 * n - 1):
            c = prod[k]
            if c:
                row = self._xpow[k]
                for j in range(n):
                    if row[j]:
                        out[j] += c * row[j]
        return CycloElement(self, tuple(_norm(x) for x in out))

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        n = self.degree
        # columns of the multiplication-by-a matrix are a * x^j
        cols = [self._mul(a.c, self._xpow[j]).c for j in range(n)]
        aug = [[Fraction(cols[j][i]) for j in range(n)] + [Fraction(int(i == 0))] for i in range(n)]
        for col in range(n):
            pr = next(i for i in range(col, n) if aug[i][col])
            aug[col], aug[pr] = aug[pr], aug[col]
            piv = aug[col][col]
            aug[col] = [x / piv for x in aug[col]]
            for i in range(n):
                if i != col and aug[i][col]:
                    f = aug[i][col]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
        return CycloElement(self, tuple(_norm(aug[i][n]) for i in range(n)))

    def multiplicative_order(self, a) -> int | None:
        big = self.d if self.d % 2 == 0 else 2 * self.d
        for k in _divisors(big):
            if self.pow(a, k) == self._one:
                return k
        return None

    def encode(self, a) -> str:
        return "[" + ",".join(str(x) for x in a.c) + "]"

    def decode(self, s: str):
        body = s.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"bad cyclotomic element {s!r}")
        parts = [_norm(Fraction(x)) for x in body[1:-1].split(",")] if body[1:-1] else []
        if len(parts) != self.degree:
            raise ValueError(f"expected {self.degree} coefficients in {s!r}")
        return CycloElement(self, tuple(parts))

    def parse_element(self, literal: str):
        lit = literal.strip()
        m = re.fullmatch(r"zeta\^(-?\d+)", lit)
        if m:
            return self.zeta(int(m.group(1)))
        if lit == "zeta":
            return self.zeta(1)
        if lit in ("1", "-1"):
            return self.from_int(int(lit))
        raise UnsupportedContext(f"unsupported element literal {literal!r} for {self.descriptor}")

    def is_zero_matrix(self, a) -> bool:
        return all(not x for x in a.flat)


_FIELD_CACHE: dict[str, Field] = {}


def parse_field(descriptor: str) -> Field:
    """Parse ``rational``, ``fp:<p>`` or ``cyclo:<d>``."""
    key = descriptor.strip()
    hit = _FIELD_CACHE.get(key)
    if hit is not None:
        return hit
    if key in ("rational", "Q"):
        fld: Field = Rationals()
    elif m := re.fullmatch(r"fp:(\d+)", key):
        fld = PrimeField(int(m.group(1)))
    elif m := re.fullmatch(r"cyclo:(\d+)", key):
        fld = CyclotomicField(int(m.group(1)))
    else:
        raise UnsupportedContext(f"unknown field descriptor {descriptor!r}")
    _FIELD_CACHE[fld.descriptor] = fld
    return fld


def quantum_characteristic(fld: Field, q) -> tuple[int, bool]:
    """Return ``(ell, q_order_odd_or_pm1)`` for the pair (field, q) in closed form.

    ``q = +-1`` gives the field characteristic. Otherwise the multiplicative
    order ``d`` of ``q`` decides: odd ``d`` gives ``ell = d``; ``q`` of infinite
    order gives 0. Even order with ``q != +-1`` is rejected.
    """
    if fld.is_zero(q):
        raise UnsupportedContext("q must be invertible")
    one = fld.one()
    if fld.eq(q, one) or fld.eq(q, fld.neg(one)):
        return fld.characteristic, True
    order = fld.multiplicative_order(q)
    if order is None:
        return 0, False
    if order % 2 == 1:
        return order, True
    raise UnsupportedContext(
        f"q of even multiplicative order {order} (q != +-1) is not supported in {fld.descriptor}"
    )


@dataclass(frozen=True)
class FieldContext:
    """A coefficient field with distinguished invertible ``q`` and its quantum characteristic."""

    field: Field
    q: object = dc_field(compare=False, hash=False)
    q_literal: str = ""
    ell: int = 0
    q_order: int | None = None
    q_order_odd_or_pm1: bool = True

    @property
    def descriptor(self) -> str:
        return self.field.descriptor

    @property
    def key(self) -> str:
        return f"{self.descriptor}|q={self.field.encode(self.q)}"

    @property
    def q_is_pm1(self) -> bool:
        one = self.field.one()
        return self.field.eq(self.q, one) or self.field.eq(self.q, self.field.neg(one))

    def with_q(self, literal: str) -> FieldContext:
        return make_context(self.descriptor, literal)

    def __str__(self) -> str:
        return f"({self.descriptor}, q={self.q_literal})"


def _normalize_q_literal(fld: Field, literal: str) -> str:
    lit = literal.strip()
    if isinstance(fld, CyclotomicField):
        m = re.fullmatch(r"zeta(?:\^(-?\d+))?", lit)
        if m:
            return f"zeta^{int(m.group(1) or 1) % fld.d}"
    if isinstance(fld, PrimeField):
        v = int(fld.parse_element(lit))
        return "-1" if v == fld.p - 1 and fld.p > 2 else str(v)
    return lit


def make_context(descriptor: str | Field, q_literal: str = "1") -> FieldContext:
    fld = descriptor if isinstance(descriptor, Field) else parse_field(descriptor)
    q = fld.parse_element(str(q_literal))
    ell, flag = quantum_characteristic(fld, q)
    return FieldContext(
        field=fld,
        q=q,
        q_literal=_normalize_q_literal(fld, str(q_literal)),
        ell=ell,
        q_order=fld.multiplicative_order(q),
        q_order_odd_or_pm1=flag,
    )


_POWERS: dict[str, list] = {}


def _q_powers(ctx: FieldContext) -> list:
    """``q^0, ..., q^(N-1)`` for ``q`` of finite order ``N``."""
    hit = _POWERS.get(ctx.key)
    if hit is None:
        fld = ctx.field
        hit = [fld.one()]
        for _ in range(1, ctx.q_order):
            hit.append(fld.mul(hit[-1], ctx.q))
        _POWERS[ctx.key] = hit
    return hit


def _combine(ctx: FieldContext, coeffs) -> object:
    """``sum_r coeffs[r] q^r`` for integer ``coeffs`` indexed by residues mod the order of q."""
    fld = ctx.field
    powers = _q_powers(ctx)
    if isinstance(fld, PrimeField):
        return sum(c * int(x) for c, x in zip(coeffs, powers)) % fld.p
    total = fld.zero()
    for c, x in zip(coeffs, powers):
        if c:
            total = total + x * c
    return total


def evaluate(p: LaurentPoly, ctx: FieldContext):
    """Image of ``p`` under the ring homomorphism ``v -> q``."""
    fld = ctx.field
    if not p:
        return fld.zero()
    order = ctx.q_order
    if order is not None:
        buckets = [0] * order
        for e, c in p.items():
            buckets[e % order] += c
        return _combine(ctx, buckets)
    total = fld.zero()
    for e, c in p.items():
        total = fld.add(total, fld.mul(fld.from_int(c), fld.pow(ctx.q, e)))
    return total


class _CyclicBinomials:
    """Quantum binomials in Z[v]/(v^N - 1), as length-N integer vectors.

    Rows for ``a >= 0`` come from the Pascal identity
    ``[a b] = v^b [a-1 b] + v^(b-a) [a-1 b-1]``, which holds in Z[v, v^-1] and
    so in every quotient; no division is involved.
    """

    def __init__(self, n: int):
        self.n = n
        unit = (1,) + (0,) * (n - 1)
        self.rows: list[list[tuple[int, ...]]] = [[unit]]
        self._lock = threading.Lock()

    def _rot(self, vec: tuple[int, ...], k: int) -> tuple[int, ...]:
        k %= self.n
        if not k:
            return vec
        return vec[-k:] + vec[:-k]

    def get(self, a: int, b: int) -> tuple[int, ...]:
        zero = (0,) * self.n
        if b < 0:
            return zero
        if a < 0:
            vec = self.get(b - a - 1, b)
            return tuple(-x for x in vec) if b % 2 else vec
        if b > a:
            return zero
        rows = self.rows
        if len(rows) <= a:
            with self._lock:
                self._grow(a)
        return rows[a][b]

    def _grow(self, a: int) -> None:
        rows = self.rows
        while len(rows) <= a:
            prev = rows[-1]
            m = len(rows)
            new = [prev[0]]
            for bb in range(1, m):
                x = self._rot(prev[bb], bb)
                y = self._rot(prev[bb - 1], bb - m)
                new.append(tuple(i + j for i, j in zip(x, y)))
            new.append(prev[m - 1])
            rows.append(new)


_CYCLIC: dict[int, _CyclicBinomials] = {}


def evaluate_binomial(a: int, b: int, ctx: FieldContext):
    """The image of ``[a b]`` in the context's field.

    When ``q`` has finite order ``N`` the binomial is computed in
    Z[v]/(v^N - 1) and then specialized, which keeps large ``a`` cheap; otherwise
    the full Laurent polynomial is evaluated.
    """
    from .laurent import quantum_binomial

    order = ctx.q_order
    if order is None:
        return evaluate(quantum_binomial(a, b), ctx)
    table = _CYCLIC.get(order)
    if table is None:
        table = _CYCLIC.setdefault(order, _CyclicBinomials(order))
    return _combine(ctx, table.get(a, b))
