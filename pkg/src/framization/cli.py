"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 the
step budget ran out.  ``--format json`` prints one JSON document per run
(errors included); ``FRAMIZATION_MAX_STEPS`` caps the step budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import algebras, verify
from .algebras import AlgebraKind, SpanningExhausted, TAGS, presentation
from .freealg import Element, element_str, word_str
from .parser import ParseError, parse_expression, parse_scalar, parse_word
from .rewrite import DEFAULT_MAX_STEPS, critical_pairs, reduce, verify_identity
from .scalar import Scalar

OK, FAILED, USAGE, EXHAUSTED = 0, 1, 2, 3
ENV_MAX_STEPS = "FRAMIZATION_MAX_STEPS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def print_element(a: Element, mode: str = "text") -> str:
    """Canonical text of ``a``; in json mode a JSON string literal of it."""
    text = element_str(a)
    return json.dumps(text) if mode == "json" else text


# -- configuration ---------------------------------------------------------


def _max_steps(flag: int | None) -> int:
    steps = flag if flag is not None else DEFAULT_MAX_STEPS
    cap = os.environ.get(ENV_MAX_STEPS)
    if cap:
        try:
            steps = min(steps, int(cap))
        except ValueError:
            raise UsageError(f"{ENV_MAX_STEPS} must be an integer, got {cap!r}") from None
    if steps < 1:
        raise UsageError("max steps must be positive")
    return steps


def _params(items: Sequence[str]) -> dict[str, Scalar]:
    out = {}
    for item in items:
        name, eq, value = item.partition("=")
        if not eq or not name.strip():
            raise UsageError(f"--param expects name=value, got {item!r}")
        try:
            out[name.strip()] = parse_scalar(value)
        except ParseError as exc:
            raise UsageError(f"--param {name}: {exc}") from None
    return out


def _kind(args) -> AlgebraKind:
    tag = args.algebra.upper()
    if tag in algebras.FRAMED:
        d = 2 if args.d is None else args.d
    elif args.d not in (None, 1):
        raise UsageError(f"{tag} has no framing generators; drop --d")
    else:
        d = 1
    try:
        return AlgebraKind.make(tag, d, args.r, _params(args.param), args.rule)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _system(args):
    kind = _kind(args)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    return presentation(kind, args.n, max_steps=_max_steps(args.max_steps))


def _bind(src: str, args, sys_) -> Element:
    """Parse with the algebra's fixed parameters substituted."""
    params = _params(args.param)
    try:
        a = parse_expression(src, sys_.ctx, params)
        sys_.check(a)
    except (ParseError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return a


# -- commands --------------------------------------------------------------


def cmd_reduce(args, out):
    sys_ = _system(args)
    a = _bind(args.expr, args, sys_)
    tr = reduce(a, sys_, trace=args.trace)
    doc = {"input": element_str(a), "result": element_str(tr.final), "exhausted": tr.exhausted}
    if args.trace:
        doc["steps"] = tr.to_json()["steps"]
    text = [element_str(tr.final)]
    if args.trace:
        text = [f"{s.rule} at {s.position}: {s.after}" for s in tr.steps] + text
    out.emit(doc, "\n".join(text))
    return EXHAUSTED if tr.exhausted else OK


def cmd_verify(args, out):
    sys_ = _system(args)
    lhs, rhs = _bind(args.lhs, args, sys_), _bind(args.rhs, args, sys_)
    v = verify_identity(lhs, rhs, sys_, trace=args.trace)
    doc = {"lhs": element_str(lhs), "rhs": element_str(rhs), "verified": v.verified,
           "exhausted": v.trace.exhausted, "residual": element_str(v.residual)}
    if args.trace:
        doc["steps"] = v.trace.to_json()["steps"]
    status = "verified" if v.verified else ("exhausted" if v.trace.exhausted else "not verified")
    out.emit(doc, f"{status}; residual {element_str(v.residual)}")
    if v.verified:
        return OK
    return EXHAUSTED if v.trace.exhausted else FAILED


def cmd_suite(args, out):
    try:
        report = verify.run_suite(args.name, args.d, args.n, params=_params(args.param),
                                  samples=args.samples, max_len=args.max_len, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.emit(report.to_json(timing=not args.no_timing), report.summary())
    return OK if report.passed else FAILED


def cmd_span(args, out):
    if args.enumerate:
        if args.expr:
            raise UsageError("--enumerate takes no word")
        try:
            result = algebras.spanning_enumerate(args.d, args.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        doc = result.to_json()
        lines = [str(a) for a in result] + [
            f"{len(result)} distinct of {result.candidates} candidates (bound {doc['bound']})"]
        out.emit(doc, "\n".join(lines))
        return EXHAUSTED if result.exhausted else OK
    if not args.expr:
        raise UsageError("span needs a word or --enumerate")
    sys_ = presentation("FBMW", args.n, d=args.d, max_steps=_max_steps(args.max_steps))
    try:
        word = parse_word(args.expr, sys_.ctx)
    except (ParseError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        result = algebras.spanning_reduce(word, sys_)
    except SpanningExhausted as exc:
        out.emit({"input": word_str(word), "exhausted": True, "error": str(exc)}, str(exc))
        return EXHAUSTED
    out.emit({"input": word_str(word), "result": element_str(result), "exhausted": False},
             element_str(result))
    return OK


def cmd_bound(args, out):
    if args.d < 1 or args.n < 1:
        raise UsageError("--d and --n must be positive")
    b = algebras.dimension_bound(args.d, args.n)
    out.emit({"d": args.d, "n": args.n, "bound": b}, str(b))
    return OK


def cmd_presentation(args, out):
    sys_ = _system(args)
    doc = sys_.to_json()
    if args.export:
        with open(args.export, "w", encoding="utf-8") as fh:
            fh.write(sys_.dumps() + "\n")
    lines = [f"{r.name}: {word_str(r.lhs)} -> {r.rhs}" for r in sys_.rules]
    lines += [f"{e.name}: {e.letter} -> {e.rhs}" for e in sys_.expansions]
    out.emit(doc, "\n".join(lines))
    return OK


def cmd_nf(args, out):
    from .freealg import Context

    ctx = Context(args.d, args.n)
    try:
        word = parse_word(args.expr, ctx)
        nf = algebras.framed_nf(word, args.d, args.n)
    except (ParseError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    doc = {"framings": list(nf.framings), "braid": word_str(nf.braid), "word": word_str(nf.word())}
    out.emit(doc, word_str(nf.word()))
    return OK


def cmd_pairs(args, out):
    sys_ = _system(args)
    report = critical_pairs(sys_, args.max_overlap)
    doc = report.to_json()
    lines = [f"{p.word_text} [{p.rules[0]} / {p.rules[1]}]: {p.left}  vs  {p.right}"
             for p in report.non_joinable]
    lines.append(f"{len(report.pairs)} pairs examined, {len(report.non_joinable)} not joinable")
    out.emit(doc, "\n".join(lines))
    return OK


# -- argument parsing ------------------------------------------------------


def _algebra_args(p, *, n_default=2):
    p.add_argument("--algebra", default="FBMW", help=f"one of {', '.join(TAGS)} (case-insensitive)")
    p.add_argument("--d", type=int, default=None, help="framing order (framized algebras)")
    p.add_argument("--n", type=int, default=n_default, help="number of strands")
    p.add_argument("--r", type=int, default=None, help="degree of the cyclotomic relation")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="fix a parameter, e.g. u=3 or q=1/2 (repeatable)")
    p.add_argument("--rule", action="append", default=[], metavar="FLAG",
                   help="rule option, e.g. no-topological-th-commute (repeatable)")
    p.add_argument("--max-steps", type=int, default=None, help="rewrite budget per monomial")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="framization", description="Rewriting and verification in framized knot algebras.")
    top.add_argument("--format", choices=("text", "json"), default="text")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("reduce", help="reduce an expression to normal form")
    _algebra_args(p)
    p.add_argument("expr")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("verify", help="check lhs = rhs by reduction")
    _algebra_args(p)
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("suite", help="run a verification suite")
    p.add_argument("name", help=", ".join(verify.SUITES))
    p.add_argument("--algebra", default="FBMW", help="accepted for symmetry; suites fix their algebra")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timing", action="store_true", help="omit wall time from JSON output")
    p.set_defaults(run=cmd_suite)

    p = sub.add_parser("span", help="spanning reduction of a word, or enumerate spanning elements")
    p.add_argument("expr", nargs="?")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--enumerate", action="store_true")
    p.add_argument("--max-steps", type=int, default=None)
    p.set_defaults(run=cmd_span)

    p = sub.add_parser("bound", help="number of spanning monomials before deduplication")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(run=cmd_bound)

    p = sub.add_parser("presentation", help="list or export a rule system")
    _algebra_args(p)
    p.add_argument("--export", metavar="FILE")
    p.set_defaults(run=cmd_presentation)

    p = sub.add_parser("nf", help="framed braid normal form of a word in t, g, G")
    p.add_argument("expr")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.set_defaults(run=cmd_nf)

    p = sub.add_parser("pairs", help="critical-pair audit")
    _algebra_args(p)
    p.add_argument("--max-overlap", type=int, default=6)
    p.set_defaults(run=cmd_pairs)
    return top


class _Output:
    def __init__(self, mode: str, stream):
        self.mode = mode
        self.stream = stream

    def emit(self, doc: dict, text: str):
        if self.mode == "json":
            self.stream.write(json.dumps(doc, indent=2) + "\n")
        else:
            self.stream.write(text + "\n")


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    mode = "json" if "--format=json" in argv or any(
        a == "--format" and b == "json" for a, b in zip(argv, argv[1:])) else "text"
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        mode = args.format
        if args.command is None:
            raise UsageError("missing command")
        return args.run(args, _Output(mode, stdout))
    except UsageError as exc:
        if mode == "json":
            stdout.write(json.dumps({"error": str(exc), "kind": "usage"}) + "\n")
        else:
            stderr.write(f"framization: error: {exc}\n")
            if "missing command" in str(exc):
                parser.print_usage(stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
