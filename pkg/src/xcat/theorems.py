"""Frobenius pull-back, Steinberg tensor products, and verifiers for the operator relations."""

from __future__ import annotations

from collections import Counter

import numpy as np

from .construct import build
from .gspace import GradedObject, character, decompose, verify_axioms
from .qarith.fields import FieldContext, evaluate_binomial, make_context
from .report import Report, TheoremReport
from .roots import RootSystem, Weight, add, is_dominant, scale, shift


class HypothesisError(ValueError):
    """The inputs do not satisfy the hypotheses of the construction."""


def _require_positive_ell(ctx: FieldContext) -> None:
    if ctx.ell <= 0:
        raise HypothesisError(f"context {ctx} has quantum characteristic 0")
    if not ctx.q_order_odd_or_pm1:
        raise HypothesisError(f"q in {ctx} has even order")


def is_restricted(lam: Weight, ell: int) -> bool:
    return ell > 0 and all(0 <= x < ell for x in lam)


def _span_of_heights(S: GradedObject, mu: Weight) -> int:
    top = S.max_height()
    if top is None:
        return 0
    gap = top - S.height(mu)
    return int(gap) if gap > 0 else 0


# constructions


def frobenius_pullback(S1: GradedObject, ell: int, target_ctx: FieldContext) -> GradedObject:
    """Stretch an object over ``(K, 1)`` by ``ell``: weight ``mu`` moves to ``ell*mu`` and index ``n`` to ``ell*n``."""
    _require_positive_ell(target_ctx)
    if ell != target_ctx.ell:
        raise HypothesisError(f"ell={ell} but {target_ctx} has quantum characteristic {target_ctx.ell}")
    src = S1.ctx
    if src.descriptor != target_ctx.descriptor:
        raise HypothesisError(f"source field {src.descriptor} differs from target field {target_ctx.descriptor}")
    if not src.field.eq(src.q, src.field.one()):
        raise HypothesisError(f"source object must be over q=1, got q={src.q_literal}")
    out = GradedObject(
        target_ctx,
        S1.rs,
        top=None if S1.top is None else scale(S1.top, ell),
        complete=S1.complete,
        truncation_height=None if S1.truncation_height is None else ell * S1.truncation_height,
        choice_tag=S1.choice_tag,
        policy="frobenius",
    )
    for mu, d in sorted(S1.spaces.items()):
        out.set_space(scale(mu, ell), d)
    for (mu, a, n), (E, F) in sorted(S1.ops.items()):
        out.set_op(scale(mu, ell), a, ell * n, E.copy(), F.copy())
    return out


def steinberg_tensor(S0: GradedObject, Sl1: GradedObject) -> GradedObject:
    """Tensor product with the convolution operators ``E'_m = sum_s E_s (x) E_{m-s}``, and likewise for F.

    The weight space at ``mu`` is the direct sum over all pairs ``(nu, rho)``
    with ``nu + rho = mu``, ordered by ``nu``; each summand uses the Kronecker
    basis ``i0 * dim(rho) + i1``.
    """
    if S0.ctx.key != Sl1.ctx.key or S0.rs != Sl1.rs:
        raise HypothesisError("both factors need the same root system and field context")
    ctx = S0.ctx
    _require_positive_ell(ctx)
    if S0.top is None or not is_restricted(S0.top, ctx.ell):
        raise HypothesisError(f"lambda0={S0.top} not restricted for ell={ctx.ell}")
    fld = ctx.field
    rs = S0.rs

    pairs: dict[Weight, dict[tuple[Weight, Weight], int]] = {}
    dims: Counter = Counter()
    for nu in S0.support():
        for rho in Sl1.support():
            mu = add(nu, rho)
            pairs.setdefault(mu, {})
    for mu in pairs:
        for nu in S0.support():
            rho = tuple(x - y for x, y in zip(mu, nu))
            if Sl1.dim(rho):
                pairs[mu][(nu, rho)] = dims[mu]
                dims[mu] += S0.dim(nu) * Sl1.dim(rho)

    top = None if Sl1.top is None else add(S0.top, Sl1.top)
    out = GradedObject(
        ctx, rs, top=top, complete=S0.complete and Sl1.complete, choice_tag=S0.choice_tag, policy="steinberg"
    )
    for mu in sorted(dims):
        out.set_space(mu, dims[mu])

    for mu in out.support():
        for a in range(rs.rank):
            for m in range(1, _span_of_heights(out, mu) + 1):
                up = shift(rs, mu, a, m)
                if not out.dim(up):
                    continue
                E = fld.zeros(out.dim(up), out.dim(mu))
                F = fld.zeros(out.dim(mu), out.dim(up))
                for (nu, rho), col in pairs[mu].items():
                    d0, d1 = S0.dim(nu), Sl1.dim(rho)
                    for s in range(m + 1):
                        key = (shift(rs, nu, a, s), shift(rs, rho, a, m - s))
                        row = pairs[up].get(key)
                        if row is None:
                            continue
                        if (s and (nu, a, s) not in S0.ops) or (m - s and (rho, a, m - s) not in Sl1.ops):
                            continue
                        u0, u1 = S0.dim(key[0]), Sl1.dim(key[1])
                        E[row : row + u0 * u1, col : col + d0 * d1] = fld.madd(
                            E[row : row + u0 * u1, col : col + d0 * d1],
                            fld.kron(S0.E(nu, a, s), Sl1.E(rho, a, m - s)),
                        )
                        F[col : col + d0 * d1, row : row + u0 * u1] = fld.madd(
                            F[col : col + d0 * d1, row : row + u0 * u1],
                            fld.kron(S0.F(nu, a, s), Sl1.F(rho, a, m - s)),
                        )
                if fld.is_zero_matrix(E) and fld.is_zero_matrix(F):
                    continue
                out.set_op(mu, a, m, E, F)
    return out


def convolve_characters(ch0: dict[Weight, int], ch1: dict[Weight, int]) -> dict[Weight, int]:
    out: Counter = Counter()
    for nu, k0 in ch0.items():
        for rho, k1 in ch1.items():
            out[add(nu, rho)] += k0 * k1
    return dict(sorted(out.items()))


def dilate_character(ch: dict[Weight, int], ell: int) -> dict[Weight, int]:
    return dict(sorted((scale(mu, ell), k) for mu, k in ch.items()))


# relation verifiers


def verify_divided_powers(S: GradedObject, bound: int) -> TheoremReport:
    fld, ctx = S.field, S.ctx
    report = Report("divided_powers", {"object": S.rs.name, "bound": bound})
    report.touch("E_product")
    report.touch("F_product")
    for mu in S.support():
        for a in range(S.rs.rank):
            for total in range(bound + 1):
                for m in range(total + 1):
                    n = total - m
                    coef = evaluate_binomial(total, m, ctx)
                    if S.dim(shift(S.rs, mu, a, total)):
                        lhs = fld.matmul(S.E(shift(S.rs, mu, a, n), a, m), S.E(mu, a, n))
                        rhs = fld.scale(S.E(mu, a, total), coef)
                        report.record("E_product", fld.matrices_equal(lhs, rhs), f"weight {mu}, alpha {a}, m {m}, n {n}")
                    if S.dim(shift(S.rs, mu, a, -total)):
                        lhs = fld.matmul(S.F_down(shift(S.rs, mu, a, -n), a, m), S.F_down(mu, a, n))
                        rhs = fld.scale(S.F_down(mu, a, total), coef)
                        report.record("F_product", fld.matrices_equal(lhs, rhs), f"weight {mu}, alpha {a}, m {m}, n {n}")
    return report


def verify_serre_lusztig(S: GradedObject, m_max: int) -> TheoremReport:
    """Higher Serre sums for adjacent nodes and commutation for orthogonal nodes."""
    fld, ctx, rs = S.field, S.ctx, S.rs
    report = Report("serre_lusztig", {"object": rs.name, "m_max": m_max})
    for check in ("E_serre", "F_serre", "E_commute", "F_commute"):
        report.touch(check)
    for mu in S.support():
        for a in range(rs.rank):
            for b in range(rs.rank):
                if a == b:
                    continue
                if rs.adjacent(a, b):
                    for m in range(2, m_max + 1):
                        up = shift(rs, shift(rs, mu, a, m), b, 1)
                        if S.dim(up):
                            total = fld.zeros(S.dim(up), S.dim(mu))
                            for r in range(m + 1):
                                coef = fld.pow(ctx.q, r * (2 - m))
                                if r % 2:
                                    coef = fld.neg(coef)
                                w1 = shift(rs, mu, a, m - r)
                                w2 = shift(rs, w1, b, 1)
                                term = fld.matmul(S.E(w2, a, r), fld.matmul(S.E(w1, b, 1), S.E(mu, a, m - r)))
                                total = fld.madd(total, fld.scale(term, coef))
                            report.record("E_serre", fld.is_zero_matrix(total), f"weight {mu}, alpha {a}, beta {b}, m {m}")
                        down = shift(rs, shift(rs, mu, a, -m), b, -1)
                        if S.dim(down):
                            total = fld.zeros(S.dim(down), S.dim(mu))
                            for r in range(m + 1):
                                coef = fld.pow(ctx.q, r * (2 - m))
                                if r % 2:
                                    coef = fld.neg(coef)
                                w1 = shift(rs, mu, a, -(m - r))
                                w2 = shift(rs, w1, b, -1)
                                term = fld.matmul(S.F_down(w2, a, r), fld.matmul(S.F_down(w1, b, 1), S.F_down(mu, a, m - r)))
                                total = fld.madd(total, fld.scale(term, coef))
                            report.record("F_serre", fld.is_zero_matrix(total), f"weight {mu}, alpha {a}, beta {b}, m {m}")
                elif a < b:
                    for m in range(1, m_max + 1):
                        for n in range(1, m_max + 1):
                            up = shift(rs, shift(rs, mu, a, m), b, n)
                            if S.dim(up):
                                lhs = fld.matmul(S.E(shift(rs, mu, b, n), a, m), S.E(mu, b, n))
                                rhs = fld.matmul(S.E(shift(rs, mu, a, m), b, n), S.E(mu, a, m))
                                report.record(
                                    "E_commute", fld.matrices_equal(lhs, rhs), f"weight {mu}, alpha {a}, beta {b}, m {m}, n {n}"
                                )
                            down = shift(rs, shift(rs, mu, a, -m), b, -n)
                            if S.dim(down):
                                lhs = fld.matmul(S.F_down(shift(rs, mu, b, -n), a, m), S.F_down(mu, b, n))
                                rhs = fld.matmul(S.F_down(shift(rs, mu, a, -m), b, n), S.F_down(mu, a, m))
                                report.record(
                                    "F_commute", fld.matrices_equal(lhs, rhs), f"weight {mu}, alpha {a}, beta {b}, m {m}, n {n}"
                                )
    return report


def verify_decomposition(S: GradedObject, bound: int) -> TheoremReport:
    """``E_{a,n}`` factors as ``E^[n0] E_{a,ell*n1}`` in both orders, with ``E^[k] = E_{a,1} E^[k-1] / [k]``; same for F."""
    ctx, fld, rs = S.ctx, S.field, S.rs
    _require_positive_ell(ctx)
    ell = ctx.ell
    inv_qint = [None] + [fld.inv(evaluate_binomial(k, 1, ctx)) for k in range(1, ell)]
    report = Report("decomposition", {"object": rs.name, "bound": bound, "ell": ell})
    for check in ("E_low_first", "E_high_first", "F_low_first", "F_high_first"):
        report.touch(check)

    e_cache: dict = {}
    f_cache: dict = {}

    def e_br(mu: Weight, a: int, k: int) -> np.ndarray:
        key = (mu, a, k)
        if key not in e_cache:
            if k == 0:
                e_cache[key] = fld.identity(S.dim(mu))
            else:
                step = S.E(shift(rs, mu, a, k - 1), a, 1)
                e_cache[key] = fld.scale(fld.matmul(step, e_br(mu, a, k - 1)), inv_qint[k])
        return e_cache[key]

    def f_br(mu: Weight, a: int, k: int) -> np.ndarray:
        key = (mu, a, k)
        if key not in f_cache:
            if k == 0:
                f_cache[key] = fld.identity(S.dim(mu))
            else:
                step = S.F_down(shift(rs, mu, a, -(k - 1)), a, 1)
                f_cache[key] = fld.scale(fld.matmul(step, f_br(mu, a, k - 1)), inv_qint[k])
        return f_cache[key]

    for mu in S.support():
        for a in range(rs.rank):
            for n in range(bound + 1):
                n0, n1 = n % ell, n // ell
                where = f"weight {mu}, alpha {a}, n {n}"
                if S.dim(shift(rs, mu, a, n)):
                    want = S.E(mu, a, n)
                    low = fld.matmul(e_br(shift(rs, mu, a, ell * n1), a, n0), S.E(mu, a, ell * n1))
                    high = fld.matmul(S.E(shift(rs, mu, a, n0), a, ell * n1), e_br(mu, a, n0))
                    report.record("E_low_first", fld.matrices_equal(want, low), where)
                    report.record("E_high_first", fld.matrices_equal(want, high), where)
                if S.dim(shift(rs, mu, a, -n)):
                    want = S.F_down(mu, a, n)
                    low = fld.matmul(f_br(shift(rs, mu, a, -ell * n1), a, n0), S.F_down(mu, a, ell * n1))
                    high = fld.matmul(S.F_down(shift(rs, mu, a, -n0), a, ell * n1), f_br(mu, a, n0))
                    report.record("F_low_first", fld.matrices_equal(want, low), where)
                    report.record("F_high_first", fld.matrices_equal(want, high), where)
    return report


def verify_dominant_vanishing(S: GradedObject) -> TheoremReport:
    """``F_{a,n}`` kills the top weight space whenever ``n`` exceeds the top weight's ``a``-coordinate."""
    lam = S.top
    report = Report("dominant_vanishing", {"top": None if lam is None else list(lam)})
    report.touch("F_from_top")
    if lam is None or not S.dim(lam):
        return report
    if not is_dominant(lam):
        raise HypothesisError(f"top weight {lam} is not dominant")
    fld = S.field
    depth = max(int(S.height(lam) - S.height(mu)) for mu in S.support())
    for a in range(S.rs.rank):
        for n in range(lam[a] + 1, max(depth, lam[a] + 1) + 1):
            report.record(
                "F_from_top", fld.is_zero_matrix(S.F_down(lam, a, n)), f"top {lam}, alpha {a}, n {n}"
            )
    return report


def verify_restricted_cyclicity(S: GradedObject) -> TheoremReport:
    """For restricted top weight the ``F_{a,1}`` blocks alone generate every weight space from the top."""
    ctx, fld, rs = S.ctx, S.field, S.rs
    _require_positive_ell(ctx)
    lam = S.top
    if lam is None or not is_restricted(lam, ctx.ell):
        raise HypothesisError(f"top weight {lam} not restricted for ell={ctx.ell}")
    report = Report("restricted_cyclicity", {"top": list(lam), "ell": ctx.ell})
    report.touch("span")
    spans: dict[Weight, np.ndarray] = {lam: fld.identity(1)}
    for mu in sorted(S.support(), key=lambda w: (-S.height(w), w)):
        if mu == lam:
            continue
        cols = [
            fld.matmul(S.F_down(shift(rs, mu, a, 1), a, 1), spans[shift(rs, mu, a, 1)])
            for a in range(rs.rank)
            if shift(rs, mu, a, 1) in spans
        ]
        gens = np.hstack(cols) if cols else fld.zeros(S.dim(mu), 0)
        R, piv = fld.rref(gens.T.copy())
        spans[mu] = R[: len(piv)].T.copy()
        report.record("span", len(piv) == S.dim(mu), f"weight {mu}: span {len(piv)} of {S.dim(mu)}")
    return report


# end-to-end theorem checks


def check_frobenius(rs: RootSystem, target_ctx: FieldContext, lam: Weight, bound: int = 6) -> tuple[TheoremReport, dict]:
    """Stretch ``S(lam)`` over ``(K, 1)`` and compare it with ``S(ell*lam)`` built directly in the target context."""
    _require_positive_ell(target_ctx)
    ell = target_ctx.ell
    source_ctx = make_context(target_ctx.descriptor, "1")
    S1 = build(rs, source_ctx, lam)
    pulled = frobenius_pullback(S1, ell, target_ctx)
    direct = build(rs, target_ctx, scale(lam, ell))
    report = Report("frobenius", {"rs": rs.name, "ctx": str(target_ctx), "lambda": list(lam), "ell": ell})
    ch = character(pulled)
    report.record("dilated_character", ch == dilate_character(character(S1), ell), "pull-back is not the dilation")
    report.record("character_matches_build", ch == character(direct), f"{ch} != {character(direct)}")
    report.record("single_top", decompose(pulled) == [scale(lam, ell)], f"primitive weights {decompose(pulled)}")
    report.merge(verify_axioms(pulled, bound), "axioms.")
    return report, {"pullback": ch, "direct": character(direct), "object": pulled}


def check_steinberg(
    rs: RootSystem, ctx: FieldContext, lam0: Weight, lam1: Weight, bound: int = 6, use_pullback: bool = False
) -> tuple[TheoremReport, dict]:
    """Tensor ``S(lam0)`` with the ``ell``-stretched ``S(lam1)`` and compare with ``S(lam0 + ell*lam1)``."""
    _require_positive_ell(ctx)
    ell = ctx.ell
    lam0, lam1 = rs.check_weight(lam0), rs.check_weight(lam1)
    if not is_restricted(lam0, ell):
        raise HypothesisError(f"lambda0={lam0} not restricted for ell={ell}")
    if not is_dominant(lam1):
        raise HypothesisError(f"lambda1={lam1} is not dominant")
    S0 = build(rs, ctx, lam0)
    if use_pullback:
        Sl1 = frobenius_pullback(build(rs, make_context(ctx.descriptor, "1"), lam1), ell, ctx)
    else:
        Sl1 = build(rs, ctx, scale(lam1, ell))
    T = steinberg_tensor(S0, Sl1)
    target = add(lam0, scale(lam1, ell))
    direct = build(rs, ctx, target)
    ch = character(T)
    report = Report(
        "steinberg", {"rs": rs.name, "ctx": str(ctx), "lambda0": list(lam0), "lambda1": list(lam1), "ell": ell}
    )
    report.record("convolution", ch == convolve_characters(character(S0), character(Sl1)), "character is not the convolution")
    report.record("character_matches_build", ch == character(direct), f"{ch} != {character(direct)}")
    report.record("single_top", decompose(T) == [target], f"primitive weights {decompose(T)}")
    report.merge(verify_axioms(T, bound), "axioms.")
    return report, {"tensor": ch, "direct": character(direct), "object": T}

