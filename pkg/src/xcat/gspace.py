"""Graded spaces with E/F operators: storage, the G endomorphism, axiom checks, sums, characters.

Operator storage convention: ``ops[(mu, alpha, n)] = (E, F)`` where ``E`` maps
``M_mu -> M_{mu + n alpha}`` (shape ``dim(mu + n alpha) x dim(mu)``) and ``F``
maps back (shape ``dim(mu) x dim(mu + n alpha)``). Index 0 is the identity and
negative indices are zero; absent entries are zero.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .qarith.fields import Field, FieldContext, evaluate_binomial
from .report import Report
from .roots import RootSystem, Weight, leq, shift

OpKey = tuple[Weight, int, int]


class CoefficientChoice:
    """A coefficient function ``c(mu, alpha, m, n, r)`` in the base-weight convention.

    ``mu`` is the weight whose delta space carries the G endomorphism, so the
    relation for ``v`` in ``M_{mu + n alpha}`` uses ``c(mu, alpha, m, n, r)``.
    Values are memoized; ``r = 0`` gives 1 and ``r < 0`` gives 0 regardless of
    the wrapped function.
    """

    def __init__(self, tag: str, ctx: FieldContext, func: Callable, symmetric: bool):
        self.tag = tag
        self.ctx = ctx
        self.func = func
        self.symmetric = symmetric
        self._memo: dict = {}

    def __call__(self, mu: Weight, alpha: int, m: int, n: int, r: int):
        fld = self.ctx.field
        if r < 0:
            return fld.zero()
        if r == 0:
            return fld.one()
        key = (mu, alpha, m, n, r)
        hit = self._memo.get(key)
        if hit is None:
            hit = self.func(mu, alpha, m, n, r)
            self._memo[key] = hit
        return hit

    def __repr__(self) -> str:
        return f"CoefficientChoice({self.tag!r}, {self.ctx})"


def default_choice(ctx: FieldContext) -> CoefficientChoice:
    """``c(mu, alpha, m, n, r) = [<mu, alpha^vee> + m + n  over  r]`` evaluated at ``v = q``."""
    cache: dict[tuple[int, int], object] = {}

    def func(mu, alpha, m, n, r):
        key = (mu[alpha] + m + n, r)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = evaluate_binomial(key[0], r, ctx)
        return hit

    return CoefficientChoice("qbinom", ctx, func, symmetric=True)


@dataclass
class DeltaSpace:
    base: Weight
    blocks: list[tuple[int, int, int, Weight]]  # (alpha, n, dim, weight mu + n alpha)
    offsets: list[int]
    total_dim: int

    def block_slice(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i] + self.blocks[i][2])


@dataclass
class GradedObject:
    ctx: FieldContext
    rs: RootSystem
    spaces: dict[Weight, int] = field(default_factory=dict)
    ops: dict[OpKey, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    top: Weight | None = None
    complete: bool = True
    truncation_height: int | None = None
    choice_tag: str = "qbinom"
    policy: str = ""
    pivots: dict[Weight, list[int]] | None = None

    def __post_init__(self) -> None:
        self._height_weights: tuple[Fraction, ...] | None = None
        self._max_height: Fraction | None = None

    @property
    def field(self) -> Field:
        return self.ctx.field

    def dim(self, mu: Weight) -> int:
        return self.spaces.get(mu, 0)

    def support(self) -> list[Weight]:
        return sorted(self.spaces)

    def total_dim(self) -> int:
        return sum(self.spaces.values())

    def set_space(self, mu: Weight, d: int) -> None:
        if d > 0:
            self.spaces[mu] = d
            self._max_height = None

    def height(self, mu: Weight) -> Fraction:
        """Linear height function with ``height(mu + alpha_i) = height(mu) + 1``."""
        if self._height_weights is None:
            inv = self.rs.inverse_cartan
            r = self.rs.rank
            self._height_weights = tuple(sum(inv[i][j] for i in range(r)) for j in range(r))
        return sum((w * x for w, x in zip(self._height_weights, mu)), Fraction(0))

    def max_height(self) -> Fraction | None:
        if self._max_height is None and self.spaces:
            self._max_height = max(self.height(mu) for mu in self.spaces)
        return self._max_height

    def E(self, mu: Weight, alpha: int, n: int) -> np.ndarray:
        """``E_{alpha,n}`` from ``M_mu`` to ``M_{mu + n alpha}``."""
        fld = self.field
        if n == 0:
            return fld.identity(self.dim(mu))
        if n < 0:
            return fld.zeros(0, self.dim(mu))
        pair = self.ops.get((mu, alpha, n))
        if pair is None:
            return fld.zeros(self.dim(shift(self.rs, mu, alpha, n)), self.dim(mu))
        return pair[0]

    def F(self, mu: Weight, alpha: int, n: int) -> np.ndarray:
        """``F_{alpha,n}`` from ``M_{mu + n alpha}`` to ``M_mu``."""
        fld = self.field
        if n == 0:
            return fld.identity(self.dim(mu))
        if n < 0:
            return fld.zeros(self.dim(mu), 0)
        pair = self.ops.get((mu, alpha, n))
        if pair is None:
            return fld.zeros(self.dim(mu), self.dim(shift(self.rs, mu, alpha, n)))
        return pair[1]

    def E_up(self, source: Weight, alpha: int, n: int) -> np.ndarray:
        return self.E(source, alpha, n)

    def F_down(self, source: Weight, alpha: int, n: int) -> np.ndarray:
        """``F_{alpha,n}`` applied to ``M_source``, landing in ``M_{source - n alpha}``."""
        if n == 0:
            return self.field.identity(self.dim(source))
        if n < 0:
            return self.field.zeros(0, self.dim(source))
        return self.F(shift(self.rs, source, alpha, -n), alpha, n)

    def set_op(self, mu: Weight, alpha: int, n: int, e: np.ndarray, f: np.ndarray) -> None:
        self.ops[(mu, alpha, n)] = (e, f)

    def op_keys(self) -> list[OpKey]:
        return sorted(self.ops)


def _max_n(M: GradedObject, mu: Weight) -> int:
    top = M.max_height()
    if top is None:
        return 0
    gap = top - M.height(mu)
    return int(gap) if gap > 0 else 0


def assemble_delta(M: GradedObject, mu: Weight) -> DeltaSpace:
    blocks = []
    offsets = []
    total = 0
    nmax = _max_n(M, mu)
    for alpha in range(M.rs.rank):
        for n in range(1, nmax + 1):
            w = shift(M.rs, mu, alpha, n)
            d = M.dim(w)
            if d:
                blocks.append((alpha, n, d, w))
                offsets.append(total)
                total += d
    return DeltaSpace(mu, blocks, offsets, total)


def g_delta(M: GradedObject, mu: Weight, c: CoefficientChoice, delta: DeltaSpace | None = None) -> np.ndarray:
    """The G endomorphism of the delta space at ``mu``, block by block."""
    fld = M.field
    delta = assemble_delta(M, mu) if delta is None else delta
    G = fld.zeros(delta.total_dim, delta.total_dim)
    for ti, (a, m, dt, wt) in enumerate(delta.blocks):
        rows = delta.block_slice(ti)
        for si, (b, n, ds, ws) in enumerate(delta.blocks):
            cols = delta.block_slice(si)
            if a != b:
                # M_{mu+n b} -E_{a,m}-> M_{mu+n b+m a} -F_{b,n}-> M_{mu+m a}
                if not M.dim(shift(M.rs, ws, a, m)):
                    continue
                G[rows, cols] = fld.matmul(M.F(wt, b, n), M.E(ws, a, m))
                continue
            block = None
            for r in range(0, min(m, n) + 1):
                coef = c(mu, a, m, n, r)
                if fld.is_zero(coef):
                    continue
                if not M.dim(shift(M.rs, mu, a, m + n - r)):
                    continue
                term = fld.matmul(M.F(wt, a, n - r), M.E(ws, a, m - r))
                term = fld.scale(term, coef)
                block = term if block is None else fld.madd(block, term)
            if block is not None:
                G[rows, cols] = block
    return G


def stacked_E(M: GradedObject, mu: Weight, delta: DeltaSpace | None = None) -> np.ndarray:
    """``E_mu : M_mu -> M_{delta mu}`` as a single matrix."""
    fld = M.field
    delta = assemble_delta(M, mu) if delta is None else delta
    d = M.dim(mu)
    if not delta.blocks:
        return fld.zeros(0, d)
    return np.vstack([M.E(mu, a, n) for a, n, _, _ in delta.blocks])


def stacked_F(M: GradedObject, mu: Weight, delta: DeltaSpace | None = None) -> np.ndarray:
    """``F_mu : M_{delta mu} -> M_mu`` as a single matrix."""
    fld = M.field
    delta = assemble_delta(M, mu) if delta is None else delta
    d = M.dim(mu)
    if not delta.blocks:
        return fld.zeros(d, 0)
    return np.hstack([M.F(mu, a, n) for a, n, _, _ in delta.blocks])


def rank(fld: Field, A: np.ndarray) -> int:
    if A.shape[0] == 0 or A.shape[1] == 0:
        return 0
    return len(fld.rref(A)[1])


def nullspace(fld: Field, A: np.ndarray) -> np.ndarray:
    """Columns spanning the kernel of ``A``."""
    rows, cols = A.shape
    if rows == 0:
        return fld.identity(cols)
    R, piv = fld.rref(A)
    free = [j for j in range(cols) if j not in set(piv)]
    basis = fld.zeros(cols, len(free))
    one = fld.one()
    for k, f in enumerate(free):
        basis[f, k] = one
        for i, p in enumerate(piv):
            basis[p, k] = fld.neg(R[i, f])
    return basis


def verify_axioms(M: GradedObject, sample_bound_mn: int, c: CoefficientChoice | None = None) -> Report:
    """Check support, the commutation relations and the primitive/coprimitive splitting."""
    fld = M.field
    rs = M.rs
    c = default_choice(M.ctx) if c is None else c
    report = Report("axioms", {"object": describe(M), "bound": sample_bound_mn})

    # support and storage
    report.touch("support")
    for mu, d in M.spaces.items():
        report.record("support", d > 0 and len(mu) == rs.rank, f"weight {mu} stored with dim {d}")
        if M.top is not None:
            report.record("support", leq(rs, mu, M.top) is not None, f"weight {mu} not below top {M.top}")
    for (mu, a, n), (E, F) in M.ops.items():
        up = shift(rs, mu, a, n)
        ok = E.shape == (M.dim(up), M.dim(mu)) and F.shape == (M.dim(mu), M.dim(up)) and n > 0
        report.record("support", ok and M.dim(mu) > 0 and M.dim(up) > 0, f"operator ({mu},{a},{n}) shape mismatch")

    # commutation relations, applied to v in M_mu
    report.touch("commutation")
    for mu in M.support():
        dmu = M.dim(mu)
        for a in range(rs.rank):
            for b in range(rs.rank):
                for n in range(1, sample_bound_mn + 1):
                    low = shift(rs, mu, b, -n)
                    for m in range(1, sample_bound_mn + 1):
                        target = shift(rs, low, a, m)
                        dt = M.dim(target)
                        if not dt:
                            continue
                        lhs = fld.matmul(M.E(low, a, m), M.F(low, b, n))
                        if a != b:
                            rhs = fld.matmul(M.F(target, b, n), M.E(mu, a, m))
                        else:
                            rhs = fld.zeros(dt, dmu)
                            base = shift(rs, mu, a, -n)
                            for r in range(0, min(m, n) + 1):
                                coef = c(base, a, m, n, r)
                                if fld.is_zero(coef):
                                    continue
                                term = fld.matmul(M.F(target, a, n - r), M.E(mu, a, m - r))
                                rhs = fld.madd(rhs, fld.scale(term, coef))
                        report.record(
                            "commutation",
                            fld.matrices_equal(lhs, rhs),
                            f"v in M_{mu}: E[{a},{m}]F[{b},{n}] differs from the commuted form",
                        )

    # primitive + coprimitive splitting
    report.touch("splitting")
    for mu in M.support():
        d = M.dim(mu)
        delta = assemble_delta(M, mu)
        Em = stacked_E(M, mu, delta)
        Fm = stacked_F(M, mu, delta)
        ker = nullspace(fld, Em) if Em.shape[0] else fld.identity(d)
        rf = rank(fld, Fm)
        nullity = ker.shape[1]
        joint = rank(fld, np.hstack([Fm, ker])) if Fm.shape[1] + nullity else 0
        report.record(
            "splitting",
            rf + nullity == d and joint == d,
            f"weight {mu}: dim {d}, rank F {rf}, dim ker E {nullity}, joint rank {joint}",
        )
    return report


def character(M: GradedObject) -> dict[Weight, int]:
    return {mu: d for mu, d in sorted(M.spaces.items()) if d > 0}


def _block_diag(fld: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = fld.zeros(A.shape[0] + B.shape[0], A.shape[1] + B.shape[1])
    out[: A.shape[0], : A.shape[1]] = A
    out[A.shape[0] :, A.shape[1] :] = B
    return out


def direct_sum(M: GradedObject, N: GradedObject) -> GradedObject:
    if M.ctx.key != N.ctx.key or M.rs != N.rs:
        raise ValueError("direct sum needs the same field context and root system")
    if M.choice_tag != N.choice_tag:
        raise ValueError("direct sum needs the same coefficient choice")
    fld = M.field
    out = GradedObject(
        M.ctx,
        M.rs,
        complete=M.complete and N.complete,
        choice_tag=M.choice_tag,
        policy="direct-sum",
    )
    for mu in sorted(set(M.spaces) | set(N.spaces)):
        out.set_space(mu, M.dim(mu) + N.dim(mu))
    for key in sorted(set(M.ops) | set(N.ops)):
        mu, a, n = key
        E = _block_diag(fld, M.E(mu, a, n), N.E(mu, a, n))
        F = _block_diag(fld, M.F(mu, a, n), N.F(mu, a, n))
        out.set_op(mu, a, n, E, F)
    return out


def primitive_dims(M: GradedObject) -> dict[Weight, int]:
    fld = M.field
    out = {}
    for mu in M.support():
        Em = stacked_E(M, mu)
        k = M.dim(mu) - rank(fld, Em)
        if k:
            out[mu] = k
    return out


def decompose(M: GradedObject) -> list[Weight]:
    """Highest weights of the simple summands, with multiplicity, sorted."""
    counts = Counter(primitive_dims(M))
    return sorted(counts.elements())


def describe(M: GradedObject) -> str:
    top = "" if M.top is None else ",".join(map(str, M.top))
    return f"{M.rs.name} {M.ctx.descriptor} q={M.ctx.q_literal} top=({top}) {M.policy}".strip()


# canonical serialization

def to_dict(M: GradedObject) -> dict:
    fld = M.field
    return {
        "root_system": M.rs.name,
        "field": M.ctx.descriptor,
        "q": M.ctx.q_literal,
        "q_element": fld.encode(M.ctx.q),
        "choice": M.choice_tag,
        "top": None if M.top is None else list(M.top),
        "policy": M.policy,
        "complete": M.complete,
        "truncation_height": M.truncation_height,
        "spaces": [[list(mu), d] for mu, d in sorted(M.spaces.items())],
        "ops": [
            {
                "weight": list(mu),
                "alpha": a,
                "n": n,
                "E": [[fld.encode(x) for x in row] for row in E.tolist()],
                "F": [[fld.encode(x) for x in row] for row in F.tolist()],
            }
            for (mu, a, n), (E, F) in sorted(M.ops.items())
        ],
        "pivots": None
        if M.pivots is None
        else [[list(mu), list(p)] for mu, p in sorted(M.pivots.items())],
    }


def from_dict(data: dict) -> GradedObject:
    from .qarith.fields import make_context
    from .roots import root_system

    ctx = make_context(data["field"], data["q"])
    fld = ctx.field
    if fld.encode(ctx.q) != data["q_element"]:
        raise ValueError("stored q does not match its literal")
    rs = root_system(data["root_system"])
    M = GradedObject(
        ctx,
        rs,
        top=None if data["top"] is None else tuple(data["top"]),
        complete=bool(data["complete"]),
        truncation_height=data["truncation_height"],
        choice_tag=data["choice"],
        policy=data["policy"],
    )
    for mu, d in data["spaces"]:
        if int(d) <= 0:
            raise ValueError(f"non-positive dimension at {mu}")
        M.set_space(rs.check_weight(mu), int(d))
    for entry in data["ops"]:
        mu = rs.check_weight(entry["weight"])
        a, n = int(entry["alpha"]), int(entry["n"])
        up = shift(rs, mu, a, n)
        shape_e = (M.dim(up), M.dim(mu))
        shape_f = (M.dim(mu), M.dim(up))
        E = fld.array([[fld.decode(x) for x in row] for row in entry["E"]], shape_e)
        F = fld.array([[fld.decode(x) for x in row] for row in entry["F"]], shape_f)
        if E.shape != shape_e or F.shape != shape_f:
            raise ValueError(f"operator ({mu},{a},{n}) has inconsistent shape")
        M.set_op(mu, a, n, E, F)
    if data.get("pivots") is not None:
        M.pivots = {tuple(mu): [int(x) for x in p] for mu, p in data["pivots"]}
    return M
