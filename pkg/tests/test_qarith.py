from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcat.qarith import laurent
from xcat.qarith.fields import (
    CyclotomicField,
    PrimeField,
    Rationals,
    UnsupportedContext,
    cyclotomic_polynomial,
    evaluate,
    evaluate_binomial,
    make_context,
    parse_field,
)
from xcat.qarith.identities import verify_identities
from xcat.qarith.laurent import LaurentPoly, binomial_by_product, quantum_binomial, quantum_integer


def V(*pairs: tuple[int, int]) -> LaurentPoly:
    return LaurentPoly(dict(pairs))


# quantum integers


def test_quantum_integer_zero():
    assert quantum_integer(0).is_zero()


def test_quantum_integer_three():
    assert quantum_integer(3) == V((2, 1), (0, 1), (-2, 1))


def test_quantum_integer_minus_two():
    assert quantum_integer(-2) == V((1, -1), (-1, -1))


@given(st.integers(-30, 30))
def test_quantum_integer_odd(n):
    assert quantum_integer(n) == -quantum_integer(-n)


@given(st.integers(-30, 30))
def test_quantum_integer_times_denominator(n):
    # [n] (v - v^-1) = v^n - v^-n
    lhs = quantum_integer(n) * V((1, 1), (-1, -1))
    assert lhs == V((n, 1)) - V((-n, 1))


# quantum binomials


def test_binomial_negative_lower_is_zero():
    assert quantum_binomial(7, -1).is_zero()


def test_binomial_four_two():
    expected = V((4, 1), (2, 1), (0, 2), (-2, 1), (-4, 1))
    assert quantum_binomial(4, 2) == expected
    assert binomial_by_product(4, 2) == expected


def test_binomial_minus_one_two():
    assert quantum_binomial(-1, 2) == LaurentPoly.constant(1)
    assert binomial_by_product(-1, 2) == LaurentPoly.constant(1)


@settings(max_examples=200)
@given(st.integers(-12, 12), st.integers(-12, 12))
def test_binomial_matches_product_quotient(a, b):
    assert quantum_binomial(a, b) == binomial_by_product(a, b)


@settings(max_examples=200)
@given(st.integers(-15, 15), st.integers(-15, 15))
def test_binomial_bar_invariant_integral(a, b):
    p = quantum_binomial(a, b)
    assert p.is_bar_invariant()
    assert all(isinstance(c, int) and c != 0 for _, c in p.items())


@given(st.integers(0, 15), st.integers(0, 15))
def test_binomial_symmetry(a, b):
    if b <= a:
        assert quantum_binomial(a, b) == quantum_binomial(a, a - b)


@given(st.integers(-15, 15), st.integers(-15, 15))
def test_binomial_at_one_is_ordinary(a, b):
    if b < 0:
        want = 0
    elif a >= 0:
        want = comb(a, b)
    else:
        want = (-1) ** b * comb(b - a - 1, b)
    assert quantum_binomial(a, b).at_one() == want
    assert evaluate(quantum_binomial(a, b), make_context("rational", "1")) == want


def test_pascal_instance():
    rhs = quantum_binomial(3, 2).shift(2) + quantum_binomial(3, 1).shift(-2)
    assert quantum_binomial(4, 2) == rhs


def test_serialization_round_trip():
    p = quantum_binomial(9, 4) - V((17, 3))
    pairs = p.serialize()
    assert pairs == sorted(pairs)
    assert all(isinstance(c, str) for _, c in pairs)
    assert LaurentPoly.deserialize(pairs) == p


def test_canonical_form_drops_zeros():
    p = V((1, 2), (3, 0)) + V((1, -2))
    assert p.is_zero()
    assert p == LaurentPoly()


# evaluation and fields


def test_evaluate_five():
    assert evaluate(quantum_integer(5), make_context("rational", "1")) == 5
    assert evaluate(quantum_integer(5), make_context("fp:5", "1")) == 0


def test_evaluate_three_at_cube_root():
    ctx = make_context("cyclo:3", "zeta^1")
    assert ctx.field.is_zero(evaluate(quantum_integer(3), ctx))


CONTEXTS = [
    ("rational", "1"),
    ("rational", "-1"),
    ("rational", "2"),
    ("fp:2", "1"),
    ("fp:5", "-1"),
    ("fp:7", "2"),
    ("fp:11", "3"),
    ("cyclo:3", "zeta^1"),
    ("cyclo:5", "zeta^2"),
    ("cyclo:9", "zeta^1"),
    ("cyclo:4", "-1"),
]

polys = st.dictionaries(st.integers(-6, 6), st.integers(-5, 5), max_size=5).map(LaurentPoly)


@settings(max_examples=60)
@given(st.sampled_from(CONTEXTS), polys, polys)
def test_evaluate_is_ring_homomorphism(pair, p, r):
    ctx = make_context(*pair)
    fld = ctx.field
    assert fld.eq(evaluate(p + r, ctx), fld.add(evaluate(p, ctx), evaluate(r, ctx)))
    assert fld.eq(evaluate(p * r, ctx), fld.mul(evaluate(p, ctx), evaluate(r, ctx)))


@settings(max_examples=150)
@given(st.sampled_from(CONTEXTS), st.integers(-12, 30), st.integers(-3, 30))
def test_evaluate_binomial_matches_symbolic(pair, a, b):
    ctx = make_context(*pair)
    assert ctx.field.eq(evaluate_binomial(a, b, ctx), evaluate(quantum_binomial(a, b), ctx))


def test_quantum_characteristic_examples():
    assert make_context("rational", "1").ell == 0
    assert make_context("fp:7", "1").ell == 7
    assert make_context("cyclo:5", "zeta^1").ell == 5


def test_quantum_characteristic_odd_order_residue():
    ctx = make_context("fp:7", "2")  # 2 has order 3 mod 7
    assert (ctx.ell, ctx.q_order_odd_or_pm1) == (3, True)


@pytest.mark.parametrize("descriptor,q", [("fp:5", "2"), ("cyclo:4", "zeta^1"), ("cyclo:6", "zeta^1"), ("fp:13", "5")])
def test_even_order_rejected(descriptor, q):
    with pytest.raises(UnsupportedContext):
        make_context(descriptor, q)


@pytest.mark.parametrize("descriptor,q", [("fp:6", "1"), ("cyclo:3", "2"), ("fp:7", "0"), ("banana", "1"), ("cyclo:0", "1")])
def test_bad_contexts_rejected(descriptor, q):
    with pytest.raises(ValueError):
        make_context(descriptor, q)


def _first_vanishing(ctx, limit=200):
    return next((n for n in range(1, limit) if ctx.field.is_zero(evaluate(quantum_integer(n), ctx))), 0)


def test_closed_form_agrees_with_search_prime_fields():
    for p in (2, 3, 5, 7, 11, 13):
        for q in range(1, p):
            try:
                ctx = make_context(f"fp:{p}", str(q))
            except UnsupportedContext:
                continue
            assert ctx.ell == _first_vanishing(ctx), (p, q)


def test_closed_form_agrees_with_search_cyclotomic():
    for d in (3, 5, 7, 9, 15):
        for k in range(1, d):
            ctx = make_context(f"cyclo:{d}", f"zeta^{k}")
            assert ctx.ell == _first_vanishing(ctx), (d, k)


def test_q_lucas_instance():
    ctx = make_context("cyclo:3", "zeta^1")
    assert ctx.field.eq(evaluate_binomial(5, 2, ctx), ctx.field.one())


@pytest.mark.parametrize("descriptor,q", [("fp:3", "1"), ("fp:5", "1"), ("cyclo:5", "zeta^1"), ("fp:7", "2")])
def test_multiple_of_ell_top(descriptor, q):
    ctx = make_context(descriptor, q)
    ell, fld = ctx.ell, ctx.field
    for a, b in product(range(6), range(4 * ell)):
        want = fld.zero() if b % ell else fld.from_int(comb(a, b // ell))
        assert fld.eq(evaluate_binomial(ell * a, b, ctx), want)


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert len(cyclotomic_polynomial(12)) - 1 == 4


@given(st.sampled_from([3, 5, 7, 8, 9, 12]), st.lists(st.integers(-4, 4), min_size=1, max_size=8))
def test_cyclotomic_inverse(d, coeffs):
    K = CyclotomicField(d)
    z = K.parse_element("zeta")
    x = K.zero()
    for i, c in enumerate(coeffs):
        x = K.add(x, K.mul(K.from_int(c), K.pow(z, i)))
    if K.is_zero(x):
        return
    assert K.eq(K.mul(x, K.inv(x)), K.one())
    assert K.eq(K.decode(K.encode(x)), x)


def test_zeta_has_order_d():
    for d in (3, 5, 9, 10):
        K = CyclotomicField(d)
        z = K.parse_element("zeta")
        assert K.multiplicative_order(z) == d
        assert K.eq(K.pow(z, d), K.one())


def test_parse_field():
    assert isinstance(parse_field("rational"), Rationals)
    assert isinstance(parse_field("fp:13"), PrimeField)
    assert isinstance(parse_field("cyclo:7"), CyclotomicField)


def _brute_rank_mod_p(A: np.ndarray, p: int) -> int:
    # |ker A| = p^(n - rank)
    n = A.shape[1]
    kernel = sum(1 for x in product(range(p), repeat=n) if not np.any((A @ np.array(x)) % p))
    r = n
    while p ** (n - r) != kernel:
        r -= 1
    return r


@settings(max_examples=60)
@given(st.sampled_from([2, 3]), st.integers(1, 4), st.integers(1, 5), st.data())
def test_prime_rref_rank_against_kernel_count(p, m, n, data):
    rows = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=m, max_size=m))
    fld = PrimeField(p)
    A = fld.array(rows)
    R, piv = fld.rref(A)
    assert len(piv) == _brute_rank_mod_p(np.array(rows), p)
    for i, j in enumerate(piv):
        assert R[i, j] == 1 and not np.any(np.delete(R[:, j], i))


@settings(max_examples=40)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_rational_rref_against_sympy(m, n, data):
    sympy = pytest.importorskip("sympy")
    rows = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=m, max_size=m))
    fld = Rationals()
    R, piv = fld.rref(fld.array(rows))
    S, spiv = sympy.Matrix(rows).rref()
    assert tuple(piv) == tuple(spiv)
    assert [[Fraction(int(x.p), int(x.q)) for x in S.row(i)] for i in range(m)] == R.tolist()


# identity suite


def test_identities_small_box():
    report = verify_identities(1, positive_bound=6)
    assert report.passed
    assert report.instance_count > 0
    assert all(t.instances > 0 for t in report.checks.values())


def test_identities_detect_corrupted_table(monkeypatch):
    real = laurent.quantum_binomial

    def corrupted(a, b):
        value = real(a, b)
        return value + LaurentPoly.constant(1) if (a, b) == (2, 1) else value

    monkeypatch.setattr(laurent, "quantum_binomial", corrupted)
    report = verify_identities(3, contexts=())
    assert not report.passed
    assert any("a=2 b=1" in line for line in report.failure_lines)
