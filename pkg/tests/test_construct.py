from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcat.construct import (
    DOMINANT_AUTO,
    FIXED_DEPTH,
    BuildError,
    BuildRequest,
    build,
    build_simple,
    freudenthal_character,
    rank1_digit_character,
    rank1_gram_character,
)
import numpy as np

from xcat.gspace import assemble_delta, character, default_choice, g_delta, primitive_dims, to_dict, verify_axioms
from xcat.qarith.fields import make_context
from xcat.roots import inner, reflect, root_system

A1, A2, A3, D4 = (root_system(n) for n in ("A1", "A2", "A3", "D4"))
Q = make_context("rational", "1")
F2 = make_context("fp:2", "1")
Z3 = make_context("cyclo:3", "zeta^1")


def weyl_dimension(rs, lam):
    """Product over positive roots of (lam + rho, beta) / (rho, beta)."""
    rho = tuple([1] * rs.rank)
    lr = tuple(x + 1 for x in lam)
    out = Fraction(1)
    for _, beta in rs.positive_roots:
        out *= inner(rs, lr, beta) / inner(rs, rho, beta)
    assert out.denominator == 1
    return int(out)


def test_skyscraper():
    assert character(build(A1, Q, (0,))) == {(0,): 1}


def test_a1_two_rational():
    assert character(build(A1, Q, (2,))) == {(-2,): 1, (0,): 1, (2,): 1}


def test_a1_two_mod_two():
    assert character(build(A1, F2, (2,))) == {(-2,): 1, (2,): 1}


def test_fixed_depth_nondominant():
    M = build(A1, Q, (-1,), depth=4)
    assert character(M) == {(w,): 1 for w in (-9, -7, -5, -3, -1)}
    assert M.complete is False
    assert M.truncation_height == 4


def test_request_validation():
    with pytest.raises(BuildError):
        build_simple(BuildRequest(A2, Q, (-1, 0)))
    with pytest.raises(BuildError):
        build_simple(BuildRequest(A2, Q, (1, 0), FIXED_DEPTH, -1))
    with pytest.raises(BuildError):
        build_simple(BuildRequest(A2, Q, (1, 0), "sideways"))
    with pytest.raises(ValueError):
        build(A2, Q, (1, 0, 0))


def test_freudenthal_examples():
    assert freudenthal_character(A1, (4,)) == {(w,): 1 for w in (-4, -2, 0, 2, 4)}
    ch = freudenthal_character(A2, (1, 1))
    assert sum(ch.values()) == 8 and ch[(0, 0)] == 2
    assert sum(freudenthal_character(A2, (2, 1)).values()) == 15
    with pytest.raises(BuildError):
        freudenthal_character(A2, (-1, 0))


@pytest.mark.parametrize(
    "rs,lam",
    [(A3, (1, 0, 0)), (A3, (0, 1, 0)), (A3, (1, 0, 1)), (D4, (1, 0, 0, 0)), (D4, (0, 1, 0, 0)), (A2, (3, 2))],
)
def test_freudenthal_total_against_weyl_dimension(rs, lam):
    assert sum(freudenthal_character(rs, lam).values()) == weyl_dimension(rs, lam)


@settings(max_examples=10)
@given(st.integers(0, 3), st.integers(0, 3))
def test_rational_build_matches_freudenthal(a, b):
    assert character(build(A2, Q, (a, b))) == freudenthal_character(A2, (a, b))


def test_rank1_gram_examples():
    assert len(rank1_gram_character(Q, 4)) == 5
    assert rank1_gram_character(F2, 2) == {(-2,): 1, (2,): 1}
    assert rank1_gram_character(F2, 5) == {(-5,): 1, (-3,): 1, (3,): 1, (5,): 1}
    with pytest.raises(BuildError):
        rank1_gram_character(Q, -1)


def test_rank1_digit_examples():
    assert rank1_digit_character(2, 2, 3) == {(w,): 1 for w in (-3, -1, 1, 3)}
    assert sum(rank1_digit_character(3, 0, 4).values()) == 4
    assert rank1_digit_character(5, 7, 4) == {(w,): 1 for w in (-4, -2, 0, 2, 4)}
    with pytest.raises(BuildError):
        rank1_digit_character(0, 0, 3)


@pytest.mark.parametrize("ctx,inner_ell", [(F2, 2), (make_context("fp:3", "1"), 3), (Z3, 0)])
def test_rank1_three_routes_agree(ctx, inner_ell):
    for n in range(0, 16):
        built = character(build(A1, ctx, (n,)))
        assert built == rank1_gram_character(ctx, n) == rank1_digit_character(ctx.ell, inner_ell, n), n


@pytest.mark.parametrize("ctx,lam", [(Q, (2, 1)), (F2, (3, 1)), (Z3, (2, 2)), (F2, (1, 1, 1))])
def test_weyl_invariance_of_character(ctx, lam):
    rs = A2 if len(lam) == 2 else A3
    ch = character(build(rs, ctx, lam))
    for mu, k in ch.items():
        for i in range(rs.rank):
            assert ch.get(reflect(rs, mu, i), 0) == k


@pytest.mark.parametrize("ctx,lam", [(Q, (2, 1)), (F2, (3, 2)), (Z3, (1, 2))])
def test_built_object_invariants(ctx, lam):
    M = build(A2, ctx, lam)
    assert M.complete and M.policy == DOMINANT_AUTO
    assert primitive_dims(M) == {lam: 1}
    assert verify_axioms(M, 2 * (max(lam) + 1)).passed
    for a in range(2):
        for n in range(lam[a] + 1, 8):
            assert M.field.is_zero_matrix(M.F_down(lam, a, n))


def test_parallel_and_serial_builds_identical():
    serial = json.dumps(to_dict(build(A2, F2, (3, 3), workers=1)), sort_keys=True)
    parallel = json.dumps(to_dict(build(A2, F2, (3, 3), workers=4)), sort_keys=True)
    again = json.dumps(to_dict(build(A2, F2, (3, 3), workers=1)), sort_keys=True)
    assert serial == parallel == again


@pytest.mark.parametrize(
    "ctx,rs,lam",
    [(Q, A2, (2, 1)), (F2, A2, (3, 3)), (Z3, A2, (2, 2)), (make_context("fp:3", "1"), A3, (1, 1, 1))],
)
def test_stored_blocks_factor_g(ctx, rs, lam):
    # reassemble E and F from the stored blocks and recompute G from the finished object
    M = build(rs, ctx, lam)
    fld = M.field
    c = default_choice(ctx)
    for mu in M.support():
        if mu == lam:
            continue
        delta = assemble_delta(M, mu)
        E = np.vstack([M.E(mu, a, n) for a, n, _, _ in delta.blocks])
        F = np.hstack([M.F(mu, a, n) for a, n, _, _ in delta.blocks])
        assert fld.matrices_equal(fld.matmul(E, F), g_delta(M, mu, c, delta)), mu
