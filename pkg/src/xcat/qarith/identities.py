"""Exhaustive checks of the binomial identities, in Z[v, v^-1] and in positive quantum characteristic."""

from __future__ import annotations

from math import comb
from typing import Sequence

from ..report import Report
from . import laurent
from .fields import FieldContext, evaluate, evaluate_binomial, make_context
from .laurent import LaurentPoly, binomial_by_product, quantum_integer, w_binomial_quotient, w_quantum_integer

DEFAULT_POSITIVE_CONTEXTS: tuple[tuple[str, str], ...] = (
    ("fp:2", "1"),
    ("fp:3", "1"),
    ("fp:5", "1"),
    ("fp:7", "1"),
    ("cyclo:3", "zeta^1"),
    ("cyclo:5", "zeta^1"),
    ("cyclo:7", "zeta^1"),
)


def _qb(a: int, b: int) -> LaurentPoly:
    # resolved at call time so a replaced table is what gets checked
    return laurent.quantum_binomial(a, b)


def _gen_binom(a: int, b: int) -> int:
    """Ordinary binomial for arbitrary integer ``a`` and ``b`` (0 for ``b < 0``)."""
    if b < 0:
        return 0
    if a >= 0:
        return comb(a, b) if b <= a else 0
    return (-1) ** b * comb(b - a - 1, b)


def check_symbolic(report: Report, n: int, xy: int, m_max: int) -> None:
    rng = range(-n, n + 1)

    for a in rng:
        for b in rng:
            qb = _qb(a, b)
            report.record(
                "definition",
                qb == binomial_by_product(a, b),
                f"a={a} b={b}: Pascal-row value {qb} differs from product quotient",
            )
            report.record("bar_invariance", qb.is_bar_invariant(), f"a={a} b={b}")
            report.record(
                "value_at_one", qb.at_one() == _gen_binom(a, b), f"a={a} b={b}: {qb.at_one()} != C(a,b)"
            )

    # (1) w = v^2
    for a in rng:
        lhs = w_quantum_integer(a).substitute_power(2)
        rhs = quantum_integer(a).shift(a - 1)
        report.record("transformation_integer", lhs == rhs, f"a={a}")
        for b in rng:
            lhs = w_binomial_quotient(a, b).substitute_power(2)
            rhs = _qb(a, b).shift(b * (a - b))
            report.record("transformation_binomial", lhs == rhs, f"a={a} b={b}: {lhs} != {rhs}")

    # (2) symmetry; stated for b > 0 and meaningful for a >= 0 only
    for a in range(0, n + 1):
        for b in range(1, n + 1):
            report.record("symmetry", _qb(a, b) == _qb(a, a - b), f"a={a} b={b}")

    # (3) inversion, through the product quotient so it does not replay the engine's own rule
    for a in rng:
        for b in rng:
            lhs = binomial_by_product(a, b)
            rhs = binomial_by_product(b - a - 1, b) * (-1) ** (b % 2)
            report.record("inversion", lhs == rhs, f"a={a} b={b}")

    # (4) Pascal
    for a in rng:
        for b in rng:
            rhs = _qb(a - 1, b).shift(b) + _qb(a - 1, b - 1).shift(b - a)
            report.record("pascal", _qb(a, b) == rhs, f"a={a} b={b}")

    # (5) Chu-Vandermonde
    for a in rng:
        for b in rng:
            for k in rng:
                rhs = LaurentPoly()
                for r in range(0, k + 1):
                    s = k - r
                    term = _qb(a, r) * _qb(b, s)
                    if term:
                        rhs = rhs + term.shift(a * s - b * r)
                report.record("chu_vandermonde", _qb(a + b, k) == rhs, f"a={a} b={b} n={k}")

    # (6) Pfaff-Saalschuetz
    xy_rng = range(-xy, xy + 1)
    for x in xy_rng:
        for y in xy_rng:
            for a in rng:
                left_a = _qb(x + a, a)
                for b in rng:
                    lhs = left_a * _qb(y + b, b) if left_a else left_a
                    rhs = LaurentPoly()
                    for k in range(0, min(a, b) + 1):
                        t1 = _qb(x + a - b, a - k)
                        if not t1:
                            continue
                        t2 = _qb(y + b - a, b - k)
                        if not t2:
                            continue
                        rhs = rhs + _qb(x + y + k, k) * t1 * t2
                    report.record("pfaff_saalschuetz", lhs == rhs, f"x={x} y={y} a={a} b={b}")

    # (7) the Serre-type sum
    for m in range(2, m_max + 1):
        for x in xy_rng:
            total = LaurentPoly()
            for r in range(0, m + 1):
                term = _qb(x - r, 1) * _qb(m, r)
                if term:
                    total = total + term.shift(r * (2 - m)) * (-1) ** (r % 2)
            report.record("serre_sum", total.is_zero(), f"m={m} x={x}: sum is {total}")


def check_positive_characteristic(report: Report, ctx: FieldContext, bound: int) -> None:
    fld = ctx.field
    ell = ctx.ell
    label = f"{ctx.descriptor},q={ctx.q_literal}"

    # the closed-form ell against the defining search over [n]
    first = next((k for k in range(1, 4 * ell + 2) if fld.is_zero(evaluate(quantum_integer(k), ctx))), 0)
    report.record("quantum_characteristic", first == ell, f"{label}: closed form {ell}, search {first}")

    table = [[evaluate_binomial(a, b, ctx) for b in range(bound + 1)] for a in range(bound + 1)]

    def c(n: int):
        return fld.from_int(n)

    for a in range(bound + 1):
        a0, a1 = a % ell, a // ell
        for b in range(bound + 1):
            b0, b1 = b % ell, b // ell
            rhs = fld.mul(table[a0][b0], c(_gen_binom(a1, b1)))
            report.record("q_lucas", fld.eq(table[a][b], rhs), f"{label} a={a} b={b}")

    for a in range(bound + 1):
        for b in range(bound + 1):
            lhs = evaluate_binomial(ell * a, b, ctx)
            rhs = fld.zero() if b % ell else c(_gen_binom(a, b // ell))
            report.record("multiple_top", fld.eq(lhs, rhs), f"{label} a={a} b={b}")

    for a in range(bound + 1):
        row = table[a]
        for b in range(bound + 1):
            gb = [_gen_binom(b, s) for s in range(bound // ell + 1)]
            for n in range(bound + 1):
                lhs = evaluate_binomial(a + ell * b, n, ctx)
                rhs = fld.zero()
                for s in range(n // ell + 1):
                    if gb[s]:
                        rhs = fld.add(rhs, fld.mul(row[n - ell * s], c(gb[s])))
                report.record("split_convolution", fld.eq(lhs, rhs), f"{label} a={a} b={b} n={n}")


def verify_identities(
    range_bound: int = 10,
    *,
    xy_bound: int | None = None,
    m_max: int = 8,
    positive_bound: int = 40,
    contexts: Sequence[tuple[str, str]] | None = DEFAULT_POSITIVE_CONTEXTS,
) -> Report:
    """Check every binomial identity over the integer box of half-width ``range_bound``.

    ``x, y`` range over ``|x|, |y| <= xy_bound`` (default ``min(range_bound, 8)``)
    and the Serre-type sum over ``2 <= m <= m_max``. Each positive-characteristic
    context is checked for ``0 <= a, b, n <= positive_bound``.
    """
    if range_bound < 1:
        raise ValueError("range_bound must be positive")
    xy = min(range_bound, 8) if xy_bound is None else xy_bound
    report = Report(
        "binomial_identities",
        {"range": range_bound, "xy": xy, "m_max": m_max, "positive_bound": positive_bound},
    )
    check_symbolic(report, range_bound, xy, m_max)
    for descriptor, q in contexts or ():
        check_positive_characteristic(report, make_context(descriptor, q), positive_bound)
    return report
