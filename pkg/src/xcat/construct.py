"""Level-by-level construction of the simple objects, plus independent character oracles."""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .gspace import CoefficientChoice, GradedObject, assemble_delta, default_choice, g_delta
from .qarith.fields import FieldContext, evaluate_binomial
from .roots import (
    RootSystem,
    Weight,
    enumerate_levels,
    inner,
    is_dominant,
    leq,
    lowest_weight,
    shift,
    weyl_polytope_member,
)

DOMINANT_AUTO = "dominant-auto"
FIXED_DEPTH = "fixed-depth"


class BuildError(ValueError):
    """Invalid build request."""


class ConsistencyFault(AssertionError):
    """A weight outside the bounding polytope came out nonzero."""


@dataclass(frozen=True)
class BuildRequest:
    rs: RootSystem
    ctx: FieldContext
    lam: Weight
    policy: str = DOMINANT_AUTO
    depth: int | None = None
    choice: CoefficientChoice | None = None

    def validate(self) -> None:
        lam = self.rs.check_weight(self.lam)
        if self.policy == DOMINANT_AUTO:
            if not is_dominant(lam):
                raise BuildError(f"highest weight {lam} is not dominant; give an explicit depth")
        elif self.policy == FIXED_DEPTH:
            if self.depth is None or self.depth < 0:
                raise BuildError("fixed-depth policy needs a depth >= 0")
        else:
            raise BuildError(f"unknown policy {self.policy!r}")
        if self.choice is not None and self.choice.ctx.key != self.ctx.key:
            raise BuildError("coefficient choice belongs to a different field context")


def _default_workers() -> int:
    return min(8, os.cpu_count() or 1)


def _extend_at(M: GradedObject, mu: Weight, c: CoefficientChoice):
    """New weight space at ``mu`` as the image of G, or None if it is zero."""
    fld = M.field
    delta = assemble_delta(M, mu)
    if not delta.total_dim:
        return None
    G = g_delta(M, mu, c, delta)
    R, piv = fld.rref(G)
    r = len(piv)
    if r == 0:
        return None
    E = G[:, piv]
    F = R[:r]
    blocks = []
    for i, (a, n, _, _) in enumerate(delta.blocks):
        sl = delta.block_slice(i)
        e_blk = E[sl, :]
        f_blk = F[:, sl]
        if fld.is_zero_matrix(e_blk) and fld.is_zero_matrix(f_blk):
            continue
        blocks.append((a, n, e_blk, f_blk))
    return r, piv, blocks


def build_simple(req: BuildRequest, workers: int | None = 1) -> GradedObject:
    """Build the simple object with highest weight ``req.lam``.

    Starting from the one-dimensional space at the top, each lower weight gets
    the image of its G endomorphism: ``E`` is the pivot columns of G and ``F``
    the nonzero rows of its reduced echelon form, so ``E F = G``. Weights of one
    level are independent and may be computed by ``workers`` threads; results
    are inserted in sorted order, so the output does not depend on scheduling.
    """
    req.validate()
    rs, ctx = req.rs, req.ctx
    lam = rs.check_weight(req.lam)
    c = default_choice(ctx) if req.choice is None else req.choice
    M = GradedObject(ctx, rs, top=lam, choice_tag=c.tag, policy=req.policy, pivots={lam: []})
    M.set_space(lam, 1)

    if req.policy == DOMINANT_AUTO:
        max_h = sum(leq(rs, lowest_weight(rs, lam), lam))
        M.complete = True
    else:
        max_h = req.depth
        M.complete = False
        M.truncation_height = req.depth

    n_workers = _default_workers() if workers is None else max(1, workers)
    pool = ThreadPoolExecutor(n_workers) if n_workers > 1 else None
    by_level: dict[int, list[Weight]] = {0: [lam]}
    try:
        for h in range(1, max_h + 1):
            cands = set()
            for n in range(1, h + 1):
                for nu in by_level.get(h - n, ()):
                    for a in range(rs.rank):
                        cands.add(shift(rs, nu, a, -n))
            inside = sorted(cands)
            shell: list[Weight] = []
            if req.policy == DOMINANT_AUTO:
                shell = [mu for mu in inside if not weyl_polytope_member(rs, mu, lam)]
                inside = [mu for mu in inside if weyl_polytope_member(rs, mu, lam)]

            def job(mu: Weight):
                return mu, _extend_at(M, mu, c)

            results = list(pool.map(job, inside)) if pool and len(inside) > 1 else [job(mu) for mu in inside]
            shell_results = list(pool.map(job, shell)) if pool and len(shell) > 1 else [job(mu) for mu in shell]
            for mu, res in shell_results:
                if res is not None:
                    raise ConsistencyFault(f"weight {mu} outside the polytope of {lam} has dimension {res[0]}")
            stored = []
            for mu, res in results:
                if res is None:
                    continue
                r, piv, blocks = res
                M.set_space(mu, r)
                M.pivots[mu] = piv
                for a, n, e_blk, f_blk in blocks:
                    M.set_op(mu, a, n, e_blk, f_blk)
                stored.append(mu)
            by_level[h] = stored
    finally:
        if pool:
            pool.shutdown()
    return M


def build(rs: RootSystem, ctx: FieldContext, lam: Weight, depth: int | None = None, workers: int | None = 1) -> GradedObject:
    """Convenience wrapper: dominant-auto when ``depth`` is None, fixed-depth otherwise."""
    if depth is None:
        return build_simple(BuildRequest(rs, ctx, tuple(lam)), workers=workers)
    return build_simple(BuildRequest(rs, ctx, tuple(lam), FIXED_DEPTH, depth), workers=workers)


# independent oracles


def freudenthal_character(rs: RootSystem, lam: Weight) -> dict[Weight, int]:
    """Characteristic-zero weight multiplicities by Freudenthal's recursion."""
    lam = rs.check_weight(lam)
    if not is_dominant(lam):
        raise BuildError(f"{lam} is not dominant")
    rho = tuple([1] * rs.rank)
    lr = tuple(x + y for x, y in zip(lam, rho))
    norm_top = inner(rs, lr, lr)
    roots = [w for _, w in rs.positive_roots]
    max_h = sum(leq(rs, lowest_weight(rs, lam), lam))
    mult: dict[Weight, int] = {lam: 1}
    for _, level in enumerate_levels(rs, lam, max_h)[1:]:
        for mu in level:
            if not weyl_polytope_member(rs, mu, lam):
                continue
            total = Fraction(0)
            for beta in roots:
                k = 1
                while True:
                    up = tuple(x + k * b for x, b in zip(mu, beta))
                    if leq(rs, up, lam) is None:
                        break
                    m_up = mult.get(up, 0)
                    if m_up:
                        total += m_up * inner(rs, up, beta)
                    k += 1
            mr = tuple(x + y for x, y in zip(mu, rho))
            denom = norm_top - inner(rs, mr, mr)
            value = 2 * total / denom
            if value.denominator != 1:
                raise ArithmeticError(f"non-integral multiplicity at {mu}")
            if value:
                mult[mu] = int(value)
    return {mu: m for mu, m in sorted(mult.items()) if m}


def rank1_gram_character(ctx: FieldContext, n: int) -> dict[Weight, int]:
    """Rank-one simple character: weight ``n - 2k`` survives iff ``[n over k] != 0`` in the context."""
    if n < 0:
        raise BuildError("n must be non-negative")
    fld = ctx.field
    out = {}
    for k in range(n + 1):
        if not fld.is_zero(evaluate_binomial(n, k, ctx)):
            out[(n - 2 * k,)] = 1
    return dict(sorted(out.items()))


def rank1_digit_character(ell: int, inner_ell: int, n: int) -> dict[Weight, int]:
    """Rank-one simple character from the digit expansion of ``n``.

    The lowest digit is taken in base ``ell``; the remaining part ``n // ell`` is
    expanded in base ``inner_ell`` when that is positive and contributes a full
    string otherwise. Each layer is dilated by the product of the bases below it.
    """
    if n < 0 or ell <= 0 or inner_ell < 0:
        raise BuildError("need n >= 0, ell > 0, inner_ell >= 0")

    def layer(base: int, m: int) -> Counter:
        if m == 0:
            return Counter({0: 1})
        if base == 0:
            return Counter({m - 2 * j: 1 for j in range(m + 1)})
        d0, rest = m % base, m // base
        low = [d0 - 2 * j for j in range(d0 + 1)]
        out: Counter = Counter()
        for w, k in layer(base, rest).items():
            for x in low:
                out[x + base * w] += k
        return out

    n0, n1 = n % ell, n // ell
    out: Counter = Counter()
    for w, k in layer(inner_ell, n1).items():
        for j in range(n0 + 1):
            out[n0 - 2 * j + ell * w] += k
    return {(w,): k for w, k in sorted(out.items())}
