"""Contravariant forms: pushed down from the top weight through the delta spaces, then checked."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gspace import (
    CoefficientChoice,
    GradedObject,
    assemble_delta,
    default_choice,
    g_delta,
    rank,
    stacked_E,
    stacked_F,
)
from .qarith.fields import Field
from .report import Report
from .roots import Weight


class FormError(ValueError):
    """The form cannot be built for this object or coefficient choice."""


@dataclass
class ContravariantForm:
    gram: dict[Weight, np.ndarray] = field(default_factory=dict)
    top_value: object = None


def _inverse(fld: Field, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    R, piv = fld.rref(np.hstack([A, fld.identity(n)]))
    if piv[:n] != list(range(n)) or (n and max(piv) >= n):
        raise FormError("matrix is singular")
    return R[:, n:]


def _block_diag(fld: Field, mats: list[np.ndarray]) -> np.ndarray:
    total = sum(m.shape[0] for m in mats)
    out = fld.zeros(total, total)
    k = 0
    for m in mats:
        d = m.shape[0]
        out[k : k + d, k : k + d] = m
        k += d
    return out


def delta_gram(S: GradedObject, b: ContravariantForm, mu: Weight, delta=None) -> np.ndarray:
    """The form restricted to the delta space of ``mu``: block diagonal of the higher Gram matrices."""
    delta = assemble_delta(S, mu) if delta is None else delta
    return _block_diag(S.field, [b.gram[w] for _, _, _, w in delta.blocks])


def _top_weight(S: GradedObject) -> Weight:
    if S.top is not None:
        return S.top
    tops = [mu for mu in S.support() if not assemble_delta(S, mu).blocks]
    if len(tops) != 1:
        raise FormError("object has no unique top weight")
    return tops[0]


def build_form(S: GradedObject, top_value=None, c: CoefficientChoice | None = None) -> ContravariantForm:
    """The unique contravariant form with the given value on the top weight vector.

    Below the top, basis vector ``i`` of ``M_mu`` is ``F_mu`` of a chosen
    preimage ``x_i`` in the delta space, and ``gram[i, j] = b_delta(x_i, E_mu e_j)``.
    Objects from the builder carry their pivots, for which ``F_mu`` restricted to
    the pivot coordinates is the identity; otherwise pivots of ``F_mu`` are
    computed and that square block is inverted. Needs ``F_mu`` onto below the top.
    """
    fld = S.field
    c = default_choice(S.ctx) if c is None else c
    if not c.symmetric:
        raise FormError(f"coefficient choice {c.tag!r} is not symmetric; no contravariant form is built")
    if c.tag != S.choice_tag:
        raise FormError(f"object was built with choice {S.choice_tag!r}, not {c.tag!r}")
    top_value = fld.one() if top_value is None else top_value
    if fld.is_zero(top_value):
        raise FormError("top value must be nonzero")
    form = ContravariantForm(top_value=top_value)
    if not S.spaces:
        return form
    top = _top_weight(S)
    if S.dim(top) != 1:
        raise FormError("top weight space must be one-dimensional")
    form.gram[top] = fld.array([[top_value]], (1, 1))

    order = sorted((mu for mu in S.spaces if mu != top), key=lambda mu: (-S.height(mu), mu))
    for mu in order:
        delta = assemble_delta(S, mu)
        missing = [w for _, _, _, w in delta.blocks if w not in form.gram]
        if missing:
            raise FormError(f"weight {mu} sits above no processed weight {missing[0]}; not F-cyclic from the top")
        B = delta_gram(S, form, mu, delta)
        BE = fld.matmul(B, stacked_E(S, mu, delta))
        d = S.dim(mu)
        piv = None if S.pivots is None else S.pivots.get(mu)
        if piv is not None and len(piv) == d:
            gram = BE[piv, :]
        else:
            Fm = stacked_F(S, mu, delta)
            _, piv = fld.rref(Fm)
            if len(piv) != d:
                raise FormError(f"F is not onto at weight {mu}")
            P = Fm[:, piv]
            gram = fld.matmul(_inverse(fld, P).T.copy(), BE[piv, :])
        form.gram[mu] = gram
    return form


def scale_form(fld: Field, b: ContravariantForm, t) -> ContravariantForm:
    return ContravariantForm({mu: fld.scale(g, t) for mu, g in b.gram.items()}, fld.mul(b.top_value, t))


def verify_adjointness(S: GradedObject, b: ContravariantForm, bound_mn: int) -> Report:
    fld = S.field
    report = Report("adjointness", {"bound": bound_mn})
    report.touch("adjoint")
    for (mu, a, n), (E, F) in sorted(S.ops.items()):
        if n > bound_mn:
            continue
        up = tuple(x + n * s for x, s in zip(mu, S.rs.simple_roots[a]))
        lhs = fld.matmul(E.T.copy(), b.gram[up])
        rhs = fld.matmul(b.gram[mu], F)
        report.record("adjoint", fld.matrices_equal(lhs, rhs), f"weight {mu}, alpha {a}, n {n}")
    return report


def verify_symmetric(b: ContravariantForm, fld: Field) -> Report:
    report = Report("symmetry")
    report.touch("symmetric")
    for mu, g in sorted(b.gram.items()):
        report.record("symmetric", fld.matrices_equal(g, g.T.copy()), f"weight {mu}")
    return report


def verify_nondegenerate(b: ContravariantForm, fld: Field) -> Report:
    report = Report("nondegenerate")
    report.touch("full_rank")
    for mu, g in sorted(b.gram.items()):
        r = rank(fld, g)
        report.record("full_rank", r == g.shape[0], f"weight {mu}: rank {r} of {g.shape[0]}")
    return report


def verify_g_self_adjoint(S: GradedObject, b: ContravariantForm, c: CoefficientChoice | None = None) -> Report:
    """``G^T B = B G`` on every delta space, and the twisted form ``B G`` has rank ``dim M_mu``."""
    fld = S.field
    c = default_choice(S.ctx) if c is None else c
    report = Report("g_self_adjoint")
    report.touch("self_adjoint")
    report.touch("twisted_rank")
    for mu in S.support():
        delta = assemble_delta(S, mu)
        if not delta.blocks:
            continue
        G = g_delta(S, mu, c, delta)
        B = delta_gram(S, b, mu, delta)
        report.record(
            "self_adjoint",
            fld.matrices_equal(fld.matmul(G.T.copy(), B), fld.matmul(B, G)),
            f"weight {mu}",
        )
        r = rank(fld, fld.matmul(B, G))
        report.record("twisted_rank", r == S.dim(mu), f"weight {mu}: rank {r}, dim {S.dim(mu)}")
    return report


def verify_form(S: GradedObject, b: ContravariantForm, bound_mn: int) -> Report:
    fld = S.field
    report = Report("contravariant_form", {"bound": bound_mn})
    report.merge(verify_adjointness(S, b, bound_mn))
    report.merge(verify_symmetric(b, fld))
    report.merge(verify_nondegenerate(b, fld))
    return report
