"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line."""

from __future__ import annotations

import io
import json
import time
from functools import lru_cache

import pytest

from xcat.cache import ObjectCache, request_key, serialize
from xcat.cli import character_table, render_table
from xcat.construct import build, freudenthal_character, rank1_digit_character, rank1_gram_character
from xcat.forms import build_form, verify_adjointness, verify_nondegenerate, verify_symmetric
from xcat.gspace import character, decompose, to_dict, verify_axioms
from xcat.qarith.identities import DEFAULT_POSITIVE_CONTEXTS, check_positive_characteristic, verify_identities
from xcat.qarith.fields import make_context
from xcat.report import Report
from xcat.roots import root_system
from xcat.theorems import (
    check_frobenius,
    check_steinberg,
    verify_decomposition,
    verify_divided_powers,
    verify_dominant_vanishing,
    verify_serre_lusztig,
)

A1, A2, A3, D4 = (root_system(n) for n in ("A1", "A2", "A3", "D4"))
Q = make_context("rational", "1")


def announce(capsys, number: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


# object grids


def zero_ell_grid():
    grid = [(A1, (n,)) for n in range(7)]
    grid += [(A2, (a, b)) for a in range(4) for b in range(4)]
    grid += [(A3, lam) for lam in ((1, 0, 0), (0, 1, 0), (1, 0, 1))]
    grid += [(D4, tuple(int(i == j) for j in range(4))) for i in range(4)]
    return grid


RANK1_CONTEXTS = [("fp:2", "1", 2), ("fp:3", "1", 3), ("fp:5", "1", 5), ("cyclo:3", "zeta^1", 0), ("cyclo:5", "zeta^1", 0)]


def frobenius_grid():
    f2 = make_context("fp:2", "1")
    grid = [(A1, f2, (n,)) for n in range(4)]
    grid += [(A2, f2, (1, 0)), (A2, f2, (1, 1)), (A2, make_context("cyclo:3", "zeta^1"), (1, 0))]
    return grid


def steinberg_grid():
    f2, f3 = make_context("fp:2", "1"), make_context("fp:3", "1")
    grid = [(A1, f2, (a,), (b,)) for a in (0, 1) for b in range(3)]
    grid += [(A1, f3, (a,), (b,)) for a in (0, 1, 2) for b in range(2)]
    grid += [(A2, f2, l0, l1) for l0 in ((0, 0), (1, 0), (0, 1), (1, 1)) for l1 in ((1, 0), (0, 1))]
    return grid


@lru_cache(maxsize=None)
def built(rs_name: str, descriptor: str, q: str, lam: tuple):
    return build(root_system(rs_name), make_context(descriptor, q), lam)


@lru_cache(maxsize=None)
def frobenius_results():
    return [(rs, ctx, lam, *check_frobenius(rs, ctx, lam, bound=6)) for rs, ctx, lam in frobenius_grid()]


@lru_cache(maxsize=None)
def steinberg_results():
    """Checked tensor products plus the wall time spent producing them."""
    t0 = time.perf_counter()
    rows = [(rs, ctx, l0, l1, *check_steinberg(rs, ctx, l0, l1, bound=6)) for rs, ctx, l0, l1 in steinberg_grid()]
    return rows, time.perf_counter() - t0


def all_objects():
    """Every object from criteria 3, 4, 6 and 7, labelled."""
    out = []
    for rs, lam in zero_ell_grid():
        out.append((f"{rs.name} Q {lam}", built(rs.name, "rational", "1", lam)))
    for desc, q, _ in RANK1_CONTEXTS:
        for n in range(21):
            out.append((f"A1 {desc} {n}", built("A1", desc, q, (n,))))
    for rs, ctx, lam, _, info in frobenius_results():
        out.append((f"pullback {rs.name} {ctx} {lam}", info["object"]))
    for rs, ctx, l0, l1, _, info in steinberg_results()[0]:
        out.append((f"tensor {rs.name} {ctx} {l0} {l1}", info["object"]))
    return out


# criteria


def test_criterion_1_identity_suite(capsys):
    t0 = time.perf_counter()
    report = verify_identities(10, xy_bound=8, m_max=8, contexts=())
    elapsed = time.perf_counter() - t0
    ok = report.passed and elapsed <= 60
    announce(capsys, 1, ok, f"{report.instance_count} instances, {sum(t.failures for t in report.checks.values())} counterexamples, {elapsed:.1f}s")
    assert report.passed, report.failure_lines[:10]
    assert elapsed <= 60


def test_criterion_2_positive_characteristic_suite(capsys):
    report = Report("positive", {"bound": 40})
    for descriptor, q in DEFAULT_POSITIVE_CONTEXTS:
        check_positive_characteristic(report, make_context(descriptor, q), 40)
    expected = {("fp:2", "1"), ("fp:3", "1"), ("fp:5", "1"), ("fp:7", "1"), ("cyclo:3", "zeta^1"), ("cyclo:5", "zeta^1"), ("cyclo:7", "zeta^1")}
    ok = report.passed and set(DEFAULT_POSITIVE_CONTEXTS) == expected
    announce(capsys, 2, ok, f"{report.instance_count} instances over {len(DEFAULT_POSITIVE_CONTEXTS)} contexts")
    assert ok, report.failure_lines[:10]


def test_criterion_3_zero_ell_characters(capsys):
    t0 = time.perf_counter()
    bad = []
    for rs, lam in zero_ell_grid():
        if character(built(rs.name, "rational", "1", lam)) != freudenthal_character(rs, lam):
            bad.append((rs.name, lam))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= 300
    announce(capsys, 3, ok, f"{len(zero_ell_grid())} weights, mismatches {bad}, {elapsed:.1f}s")
    assert ok


def test_criterion_4_rank_one_positive_ell(capsys):
    bad = []
    for desc, q, inner in RANK1_CONTEXTS:
        ctx = make_context(desc, q)
        for n in range(21):
            a = character(built("A1", desc, q, (n,)))
            if not a == rank1_gram_character(ctx, n) == rank1_digit_character(ctx.ell, inner, n):
                bad.append((desc, n))
    announce(capsys, 4, not bad, f"{len(RANK1_CONTEXTS) * 21} cases, mismatches {bad}")
    assert not bad


def test_criterion_5_axioms_and_forms(capsys):
    bad = []
    objects = all_objects()
    for label, S in objects:
        b = build_form(S)
        fld = S.field
        checks = {
            "axioms": verify_axioms(S, 6).passed,
            "adjoint": verify_adjointness(S, b, 6).passed,
            "nondegenerate": verify_nondegenerate(b, fld).passed,
            "symmetric": verify_symmetric(b, fld).passed,
        }
        bad += [(label, k) for k, v in checks.items() if not v]
    announce(capsys, 5, not bad, f"{len(objects)} objects, failures {bad[:5]}")
    assert not bad


def test_criterion_6_frobenius(capsys):
    bad = []
    results = frobenius_results()
    for rs, ctx, lam, report, info in results:
        if not (report.passed and info["pullback"] == info["direct"]):
            bad.append((rs.name, str(ctx), lam, report.failure_lines[:3]))
    announce(capsys, 6, not bad, f"{len(results)} pull-backs, failures {bad}")
    assert not bad


def test_criterion_7_steinberg(capsys):
    results, elapsed = steinberg_results()
    bad = []
    for rs, ctx, l0, l1, report, info in results:
        target = tuple(x + ctx.ell * y for x, y in zip(l0, l1))
        if not (report.passed and decompose(info["object"]) == [target] and info["tensor"] == info["direct"]):
            bad.append((rs.name, str(ctx), l0, l1, report.failure_lines[:3]))
    ok = not bad and elapsed <= 600
    announce(capsys, 7, ok, f"{len(results)} tensor products, failures {bad}, {elapsed:.1f}s")
    assert ok


def test_criterion_8_relation_verifiers(capsys):
    bad = []
    objects = all_objects()
    for label, S in objects:
        reports = [verify_divided_powers(S, 6), verify_serre_lusztig(S, 4)]
        if S.top is not None and all(x >= 0 for x in S.top):
            reports.append(verify_dominant_vanishing(S))
        if S.ctx.ell > 0:
            reports.append(verify_decomposition(S, 2 * S.ctx.ell))
        bad += [(label, r.tag) for r in reports if not r.passed]
    announce(capsys, 8, not bad, f"{len(objects)} objects, failures {bad[:5]}")
    assert not bad


def test_criterion_9_determinism_and_cache(tmp_path, capsys):
    cases = [
        (A2, make_context("fp:2", "1"), (3, 3)),
        (A2, make_context("cyclo:3", "zeta^1"), (2, 2)),
        (D4, Q, (0, 1, 0, 0)),
        (A3, make_context("fp:3", "1"), (1, 1, 1)),
    ]
    problems = []
    cache = ObjectCache(tmp_path)
    for rs, ctx, lam in cases:
        key = request_key(rs.name, ctx.descriptor, ctx.q_literal, "qbinom", lam, "dominant-auto", None)
        serial = serialize(key, build(rs, ctx, lam, workers=1))
        if serialize(key, build(rs, ctx, lam, workers=1)) != serial:
            problems.append((rs.name, lam, "repeat"))
        if serialize(key, build(rs, ctx, lam, workers=4)) != serial:
            problems.append((rs.name, lam, "parallel"))
        S = build(rs, ctx, lam)
        cache.store(key, S)
        T, _ = cache.load(key)
        if serialize(key, T) != serial or character(T) != character(S) or not verify_axioms(T, 4).passed:
            problems.append((rs.name, lam, "cache"))
        if json.dumps(to_dict(T), sort_keys=True) != json.dumps(to_dict(S), sort_keys=True):
            problems.append((rs.name, lam, "round-trip"))
    announce(capsys, 9, not problems, f"{len(cases)} objects, problems {problems}")
    assert not problems


def test_criterion_10_performance_smoke(capsys):
    t0 = time.perf_counter()
    S = build(A2, make_context("fp:2", "1"), (3, 3))
    report = verify_axioms(S, 6)
    buf = io.StringIO()
    buf.write(render_table(character_table(S), "text"))
    elapsed = time.perf_counter() - t0
    ok = report.passed and elapsed <= 10 and buf.getvalue().rstrip().endswith(f"total\t{S.total_dim()}")
    announce(capsys, 10, ok, f"dim {S.total_dim()}, {elapsed:.2f}s")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
