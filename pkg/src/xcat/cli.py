"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 invalid request, 3 unreadable cache file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys

from .cache import CacheCorruption, ObjectCache, canonical_json, request_key
from .construct import DOMINANT_AUTO, FIXED_DEPTH, BuildError, BuildRequest, build_simple
from .forms import FormError, build_form, verify_form, verify_g_self_adjoint
from .gspace import GradedObject, character, decompose, direct_sum, verify_axioms
from .qarith.fields import FieldContext, make_context
from .qarith.identities import DEFAULT_POSITIVE_CONTEXTS, verify_identities
from .report import Report
from .roots import RootSystem, is_dominant, parse_weight, root_system
from .theorems import (
    HypothesisError,
    check_frobenius,
    check_steinberg,
    is_restricted,
    verify_decomposition,
    verify_divided_powers,
    verify_dominant_vanishing,
    verify_restricted_cyclicity,
    verify_serre_lusztig,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_CACHE = 0, 1, 2, 3
SERRE_M_MAX = 4


class InvalidRequest(Exception):
    pass


# building and caching


def _context(args) -> tuple[RootSystem, FieldContext]:
    try:
        return root_system(args.rs), make_context(args.field, args.q)
    except ValueError as exc:  # includes UnsupportedContext
        raise InvalidRequest(str(exc)) from exc


def _weight(rs: RootSystem, text: str):
    try:
        return rs.check_weight(parse_weight(text))
    except ValueError as exc:
        raise InvalidRequest(str(exc)) from exc


def _cache(args) -> ObjectCache | None:
    if getattr(args, "no_cache", False):
        return None
    return ObjectCache(args.cache_dir)


def obtain(rs: RootSystem, ctx: FieldContext, lam, depth: int | None, args) -> GradedObject:
    """Load ``S(lam)`` from the cache or build and store it."""
    policy = DOMINANT_AUTO if depth is None else FIXED_DEPTH
    req = BuildRequest(rs, ctx, tuple(lam), policy, depth)
    try:
        req.validate()
    except (BuildError, ValueError) as exc:
        raise InvalidRequest(str(exc)) from exc
    cache = _cache(args)
    key = request_key(rs.name, ctx.descriptor, ctx.q_literal, "qbinom", lam, policy, depth)
    if cache is not None:
        hit = cache.load(key)
        if hit is not None:
            return hit[0]
    S = build_simple(req, workers=args.workers)
    if cache is not None:
        cache.store(key, S)
    return S


# character tables


def character_table(S: GradedObject) -> dict:
    ctx = S.ctx
    rows = sorted(character(S).items(), key=lambda kv: (-S.height(kv[0]), kv[0]))
    meta = {
        "root_system": S.rs.name,
        "field": ctx.descriptor,
        "q": ctx.q_literal,
        "ell": ctx.ell,
        "lambda": None if S.top is None else list(S.top),
        "policy": S.policy,
        "complete": S.complete,
        "total_dim": S.total_dim(),
    }
    return {"meta": meta, "rows": [{"weight": list(mu), "multiplicity": k} for mu, k in rows]}


def _fmt_weight(w) -> str:
    return "(" + ",".join(str(x) for x in w) + ")"


def render_table(table: dict, fmt: str) -> str:
    meta, rows = table["meta"], table["rows"]
    if fmt == "json":
        return canonical_json(table)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        rank = len(rows[0]["weight"]) if rows else 0
        writer.writerow([f"w{i}" for i in range(rank)] + ["multiplicity"])
        for row in rows:
            writer.writerow(row["weight"] + [row["multiplicity"]])
        return buf.getvalue()
    if fmt == "tex":
        terms = [
            ("" if r["multiplicity"] == 1 else str(r["multiplicity"])) + "e^{" + _fmt_weight(r["weight"]) + "}"
            for r in rows
        ]
        head = f"% {meta['root_system']} {meta['field']} q={meta['q']} lambda={_fmt_weight(meta['lambda'] or [])}"
        return head + "\n$" + (" + ".join(terms) or "0") + "$\n"
    lines = [
        f"# {meta['root_system']} {meta['field']} q={meta['q']} ell={meta['ell']} "
        f"lambda={_fmt_weight(meta['lambda'] or [])} policy={meta['policy']} complete={str(meta['complete']).lower()}"
    ]
    for r in rows:
        lines.append(f"{_fmt_weight(r['weight'])}\t{r['multiplicity']}")
    lines.append(f"total\t{meta['total_dim']}")
    return "\n".join(lines) + "\n"


def _emit_report(report: Report, fmt: str, out) -> None:
    if fmt == "json":
        out.write(report.to_json() + "\n")
    else:
        out.write(report.to_text() + "\n")


# commands


def cmd_char(args, out) -> int:
    rs, ctx = _context(args)
    S = obtain(rs, ctx, _weight(rs, args.lam), args.depth, args)
    out.write(render_table(character_table(S), args.format))
    return EXIT_OK


def verification_battery(S: GradedObject, bound: int, skip_forms: bool = False) -> Report:
    """Every verifier that applies to ``S``; the top-level report fails iff some check fails."""
    report = Report("verify", {"object": S.rs.name, "ctx": str(S.ctx), "top": None if S.top is None else list(S.top)})
    report.merge(verify_axioms(S, bound), "axioms.")
    if not skip_forms:
        try:
            b = build_form(S)
        except FormError as exc:
            report.record("forms.construction", False, str(exc))
        else:
            report.merge(verify_form(S, b, bound), "forms.")
            report.merge(verify_g_self_adjoint(S, b), "forms.")
    report.merge(verify_divided_powers(S, bound), "divided_powers.")
    report.merge(verify_serre_lusztig(S, SERRE_M_MAX), "serre_lusztig.")
    if S.top is not None and is_dominant(S.top):
        report.merge(verify_dominant_vanishing(S), "dominant_vanishing.")
    if S.ctx.ell > 0 and S.ctx.q_order_odd_or_pm1:
        report.merge(verify_decomposition(S, 2 * S.ctx.ell), "decomposition.")
        if S.top is not None and is_restricted(S.top, S.ctx.ell):
            report.merge(verify_restricted_cyclicity(S), "restricted_cyclicity.")
    return report


def cmd_verify(args, out) -> int:
    rs, ctx = _context(args)
    S = obtain(rs, ctx, _weight(rs, args.lam), args.depth, args)
    report = verification_battery(S, args.bound, args.skip_forms)
    _emit_report(report, args.format, out)
    return EXIT_OK if report.passed else EXIT_FAIL


def _theorem_output(report: Report, chars: dict, fmt: str, out) -> int:
    if fmt == "json":
        doc = {
            "report": json.loads(report.to_json()),
            "characters": {
                name: [{"weight": list(mu), "multiplicity": k} for mu, k in ch.items()] for name, ch in chars.items()
            },
        }
        out.write(canonical_json(doc))
    else:
        out.write(report.to_text() + "\n")
        for name, ch in chars.items():
            out.write(f"{name}: " + " ".join(f"{_fmt_weight(mu)}:{k}" for mu, k in ch.items()) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_steinberg(args, out) -> int:
    rs, ctx = _context(args)
    lam0, lam1 = _weight(rs, args.lambda0), _weight(rs, args.lambda1)
    try:
        report, info = check_steinberg(rs, ctx, lam0, lam1, args.bound, use_pullback=args.via_pullback)
    except HypothesisError as exc:
        raise InvalidRequest(str(exc)) from exc
    return _theorem_output(report, {"tensor": info["tensor"], "direct": info["direct"]}, args.format, out)


def cmd_frobenius(args, out) -> int:
    rs, ctx = _context(args)
    lam = _weight(rs, args.lam)
    if not is_dominant(lam):
        raise InvalidRequest(f"lambda={lam} is not dominant")
    try:
        report, info = check_frobenius(rs, ctx, lam, args.bound)
    except HypothesisError as exc:
        raise InvalidRequest(str(exc)) from exc
    return _theorem_output(report, {"pullback": info["pullback"], "direct": info["direct"]}, args.format, out)


def cmd_identities(args, out) -> int:
    if args.range < 1:
        raise InvalidRequest("--range must be positive")
    contexts = () if args.positive_bound < 0 else DEFAULT_POSITIVE_CONTEXTS
    report = verify_identities(args.range, positive_bound=max(args.positive_bound, 0), contexts=contexts)
    _emit_report(report, args.format, out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_decompose(args, out) -> int:
    rs, ctx = _context(args)
    if args.lambda0 is not None or args.lambda1 is not None:
        if args.lambda0 is None or args.lambda1 is None:
            raise InvalidRequest("--lambda0 and --lambda1 go together")
        try:
            _, info = check_steinberg(rs, ctx, _weight(rs, args.lambda0), _weight(rs, args.lambda1), args.bound)
        except HypothesisError as exc:
            raise InvalidRequest(str(exc)) from exc
        M = info["object"]
    else:
        if not args.lam:
            raise InvalidRequest("give --lambda (repeatable) or --lambda0/--lambda1")
        parts = [obtain(rs, ctx, _weight(rs, text), None, args) for text in args.lam]
        M = parts[0]
        for N in parts[1:]:
            M = direct_sum(M, N)
    tops = decompose(M)
    if args.format == "json":
        out.write(canonical_json({"meta": {"root_system": rs.name, "field": ctx.descriptor, "q": ctx.q_literal,
                                           "total_dim": M.total_dim()},
                                  "summands": [list(w) for w in tops]}))
    else:
        out.write(" ".join(_fmt_weight(w) for w in tops) + "\n")
    return EXIT_OK


def cmd_cache(args, out) -> int:
    cache = ObjectCache(args.cache_dir)
    if args.action == "path":
        out.write(f"{cache.directory}\n")
    elif args.action == "list":
        for path, key in cache.entries():
            out.write(f"{path.name}\t{'unreadable' if key is None else canonical_json(key).strip()}\n")
    else:
        out.write(f"removed {cache.clear()} file(s)\n")
    return EXIT_OK


# argument parsing


def _add_object_args(p: argparse.ArgumentParser, lam: str = "single") -> None:
    """Positional root system and field, ``--q``, and ``--lambda`` ("single", "repeat" or "none")."""
    p.add_argument("rs", help="root system: A<n>, D<n>, E6, E7 or E8")
    p.add_argument("field", help="field: rational, fp:<p> or cyclo:<d>")
    p.add_argument("--q", default="1", help="q literal: 1, -1, an integer residue, or zeta^<k> (default 1)")
    if lam == "repeat":
        p.add_argument("--lambda", dest="lam", action="append", help="highest weight; repeat for a direct sum")
    elif lam == "single":
        p.add_argument("--lambda", dest="lam", required=True, help="highest weight, comma separated")


def _add_common(p: argparse.ArgumentParser, formats=("text", "json")) -> None:
    p.add_argument("--format", choices=formats, default="text")
    p.add_argument("--cache-dir", default=None, help="cache directory (default $XCAT_CACHE_DIR or ~/.cache/xcat)")
    p.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    p.add_argument("--workers", type=int, default=1, help="threads per level while building; 0 picks min(8, cpus)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xcat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("char", help="character table of a simple object")
    _add_object_args(p)
    p.add_argument("--depth", type=int, default=None, help="truncate at this depth below lambda")
    _add_common(p, ("text", "json", "csv", "tex"))
    p.set_defaults(func=cmd_char)

    p = sub.add_parser("verify", help="run every verifier on a simple object")
    _add_object_args(p)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--bound", type=int, default=6, help="bound on operator indices (default 6)")
    p.add_argument("--skip-forms", action="store_true", help="leave out the contravariant form checks")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("steinberg", help="tensor product check for S(lambda0) and stretched S(lambda1)")
    _add_object_args(p, lam="none")
    p.add_argument("--lambda0", required=True)
    p.add_argument("--lambda1", required=True)
    p.add_argument("--bound", type=int, default=6)
    p.add_argument("--via-pullback", action="store_true", help="stretch S(lambda1) from q=1 instead of building S(ell*lambda1)")
    _add_common(p)
    p.set_defaults(func=cmd_steinberg)

    p = sub.add_parser("frobenius", help="pull-back check: stretched S(lambda) against S(ell*lambda)")
    _add_object_args(p)
    p.add_argument("--bound", type=int, default=6)
    _add_common(p)
    p.set_defaults(func=cmd_frobenius)

    p = sub.add_parser("identities", help="check the quantum binomial identities")
    p.add_argument("--range", type=int, default=10, help="half-width of the integer box (default 10)")
    p.add_argument(
        "--positive-bound", type=int, default=20, help="bound for the positive-characteristic checks; negative skips them"
    )
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("decompose", help="highest weights of the simple summands")
    _add_object_args(p, lam="repeat")
    p.add_argument("--lambda0", default=None)
    p.add_argument("--lambda1", default=None)
    p.add_argument("--bound", type=int, default=6)
    _add_common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("cache", help="inspect or clear the cache")
    p.add_argument("action", choices=("list", "clear", "path"))
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=cmd_cache)
    return parser


_WEIGHT_FLAGS = ("--lambda", "--lambda0", "--lambda1")


def _glue_negative_weights(argv: list[str]) -> list[str]:
    # argparse reads "-1,0" as an option; "--lambda=-1,0" is unambiguous
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in _WEIGHT_FLAGS and i + 1 < len(argv) and re.fullmatch(r"-\d[\d,\s-]*", argv[i + 1]):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = sys.argv[1:] if argv is None else list(argv)
    args = make_parser().parse_args(_glue_negative_weights(argv))
    if hasattr(args, "workers") and args.workers is not None and args.workers < 1:
        args.workers = None
    try:
        return args.func(args, out)
    except InvalidRequest as exc:
        print(f"xcat: invalid request: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CacheCorruption as exc:
        print(f"xcat: cache corruption: {exc}", file=sys.stderr)
        return EXIT_CACHE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
