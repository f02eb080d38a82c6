"""Laurent polynomials in ``v`` with integer coefficients, quantum integers and
quantum binomials.

Everything here lives in Z[v, v^-1]; nothing is specialized to a field.
"""

from __future__ import annotations

import threading
from typing import Iterable, Mapping

__all__ = [
    "LaurentPoly",
    "quantum_integer",
    "quantum_binomial",
    "w_quantum_integer",
    "w_binomial_quotient",
    "binomial_by_product",
]


class LaurentPoly:
    """Immutable Laurent polynomial ``sum c_e v^e`` with arbitrary-precision ``c_e``.

    Zero coefficients are never stored, so two polynomials are equal exactly
    when their coefficient maps are equal.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coefficients: Mapping[int, int] | Iterable[tuple[int, int]] | None = None):
        c: dict[int, int] = {}
        if coefficients is not None:
            items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
            for e, k in items:
                k = int(k)
                if k:
                    e = int(e)
                    s = c.get(e, 0) + k
                    if s:
                        c[e] = s
                    else:
                        c.pop(e, None)
        self._c = c
        self._hash: int | None = None

    @classmethod
    def _raw(cls, c: dict[int, int]) -> LaurentPoly:
        # caller guarantees c has no zero values
        p = cls.__new__(cls)
        p._c = c
        p._hash = None
        return p

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> LaurentPoly:
        return cls({exponent: coefficient})

    @classmethod
    def constant(cls, c: int) -> LaurentPoly:
        return cls({0: c})

    @property
    def coefficients(self) -> dict[int, int]:
        return dict(self._c)

    def items(self) -> list[tuple[int, int]]:
        return sorted(self._c.items())

    def __iter__(self):
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int | None:
        return max(self._c) if self._c else None

    def valuation(self) -> int | None:
        return min(self._c) if self._c else None

    def coefficient(self, e: int) -> int:
        return self._c.get(e, 0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LaurentPoly):
            return self._c == other._c
        if isinstance(other, int):
            return self._c == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    @staticmethod
    def _coerce(other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(other)
        raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")

    def __add__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        c = dict(self._c)
        for e, k in other._c.items():
            s = c.get(e, 0) + k
            if s:
                c[e] = s
            else:
                del c[e]
        return LaurentPoly._raw(c)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw({e: -k for e, k in self._c.items()})

    def __sub__(self, other) -> LaurentPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> LaurentPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            if not other:
                return LaurentPoly()
            return LaurentPoly._raw({e: k * other for e, k in self._c.items()})
        other = self._coerce(other)
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        c: dict[int, int] = {}
        for j, y in b.items():
            for i, x in a.items():
                e = i + j
                c[e] = c.get(e, 0) + x * y
        return LaurentPoly._raw({e: k for e, k in c.items() if k})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            raise ValueError("negative powers are only defined for monomials; use shift()")
        result = LaurentPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by ``v^k``."""
        if not k:
            return self
        return LaurentPoly._raw({e + k: c for e, c in self._c.items()})

    def bar(self) -> LaurentPoly:
        """The ring involution ``v -> v^-1``."""
        return LaurentPoly._raw({-e: c for e, c in self._c.items()})

    def is_bar_invariant(self) -> bool:
        return all(self._c.get(-e) == c for e, c in self._c.items())

    def substitute_power(self, k: int) -> LaurentPoly:
        """Substitute ``v -> v^k`` (``k != 0``)."""
        if k == 0:
            raise ValueError("k must be nonzero")
        return LaurentPoly._raw({e * k: c for e, c in self._c.items()})

    def at_one(self) -> int:
        return sum(self._c.values())

    def exact_div(self, other: LaurentPoly) -> LaurentPoly:
        """Exact quotient in Z[v, v^-1]; raises ``ValueError`` if ``other`` does not divide."""
        other = self._coerce(other)
        if not other._c:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self._c:
            return LaurentPoly()
        # move both into Z[v] and run long division on dense coefficient lists
        lo_n, lo_d = min(self._c), min(other._c)
        num = [0] * (max(self._c) - lo_n + 1)
        for e, c in self._c.items():
            num[e - lo_n] = c
        den = [0] * (max(other._c) - lo_d + 1)
        for e, c in other._c.items():
            den[e - lo_d] = c
        lead = den[-1]
        dn = len(den) - 1
        quot = [0] * max(len(num) - dn, 0)
        for i in range(len(num) - 1, dn - 1, -1):
            c = num[i]
            if not c:
                continue
            q, r = divmod(c, lead)
            if r:
                raise ValueError("inexact division in Z[v, v^-1]")
            quot[i - dn] = q
            for j in range(dn + 1):
                num[i - dn + j] -= q * den[j]
        if any(num):
            raise ValueError("inexact division in Z[v, v^-1]")
        return LaurentPoly({i + lo_n - lo_d: c for i, c in enumerate(quot) if c})

    def serialize(self) -> list[tuple[int, str]]:
        """Canonical form: sorted ``(exponent, decimal coefficient)`` pairs."""
        return [(e, str(c)) for e, c in sorted(self._c.items())]

    @classmethod
    def deserialize(cls, pairs: Iterable[tuple[int, str]]) -> LaurentPoly:
        return cls((int(e), int(c)) for e, c in pairs)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e, c in sorted(self._c.items(), reverse=True):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                mono = "v" if e == 1 else f"v^{e}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


_ZERO = LaurentPoly()
_ONE = LaurentPoly.constant(1)


def quantum_integer(n: int) -> LaurentPoly:
    """``[n] = (v^n - v^-n) / (v - v^-1)``, expanded as a sum of monomials."""
    if n == 0:
        return _ZERO
    if n > 0:
        return LaurentPoly._raw({e: 1 for e in range(-n + 1, n, 2)})
    return -quantum_integer(-n)


def w_quantum_integer(n: int) -> LaurentPoly:
    """``[n]' = (w^n - 1) / (w - 1)`` in Z[w, w^-1], written with the letter v."""
    if n == 0:
        return _ZERO
    if n > 0:
        return LaurentPoly._raw({e: 1 for e in range(n)})
    return LaurentPoly._raw({e: -1 for e in range(n, 0)})


class _GaussianRows:
    """Rows of the w-Gaussian binomials ``[a b]'`` for ``a >= 0``, grown on demand.

    Row ``a`` holds ``[a 0]', ..., [a a]'`` with non-negative coefficients,
    built with ``[a b]' = [a-1 b]' + w^(a-b) [a-1 b-1]'``.
    """

    def __init__(self) -> None:
        self._rows: list[tuple[LaurentPoly, ...]] = [(_ONE,)]
        self._lock = threading.Lock()

    def row(self, a: int) -> tuple[LaurentPoly, ...]:
        rows = self._rows
        if a < len(rows):
            return rows[a]
        with self._lock:
            while len(rows) <= a:
                prev = rows[-1]
                n = len(rows)
                new = [_ONE]
                for b in range(1, n):
                    new.append(prev[b] + prev[b - 1].shift(n - b))
                new.append(_ONE)
                rows.append(tuple(new))
        return rows[a]


_GAUSS = _GaussianRows()
_BINOM_MEMO: dict[tuple[int, int], LaurentPoly] = {}


def quantum_binomial(a: int, b: int) -> LaurentPoly:
    """The quantum binomial ``[a b]`` in Z[v, v^-1] for arbitrary integers ``a, b``.

    ``b < 0`` gives 0 and ``b == 0`` gives 1. Negative ``a`` goes through
    ``[a b] = (-1)^b [b-a-1 b]``; non-negative ``a`` through the w-Gaussian
    Pascal rows followed by ``[a b] = v^(-b(a-b)) [a b]'|_{w=v^2}``. No
    polynomial division is performed. Results are memoized.
    """
    key = (a, b)
    hit = _BINOM_MEMO.get(key)
    if hit is not None:
        return hit
    if b < 0:
        result = _ZERO
    elif b == 0:
        result = _ONE
    elif a < 0:
        pos = quantum_binomial(b - a - 1, b)
        result = -pos if b % 2 else pos
    elif b > a:
        result = _ZERO
    else:
        w = _GAUSS.row(a)[b]
        shift = -b * (a - b)
        result = LaurentPoly._raw({2 * e + shift: c for e, c in w._c.items()})
    _BINOM_MEMO[key] = result
    return result


def binomial_by_product(a: int, b: int, integer=quantum_integer) -> LaurentPoly:
    """``[a][a-1]...[a-b+1] / ([1]...[b])`` by exact division (an independent route)."""
    if b < 0:
        return _ZERO
    if b == 0:
        return _ONE
    num = _ONE
    den = _ONE
    for i in range(b):
        num = num * integer(a - i)
        den = den * integer(i + 1)
    return num.exact_div(den)


def w_binomial_quotient(a: int, b: int) -> LaurentPoly:
    """``[a b]'`` in Z[w, w^-1] from the product formula (letter v stands for w)."""
    return binomial_by_product(a, b, integer=w_quantum_integer)
