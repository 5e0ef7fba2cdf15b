"""Command-line interface: ``irva <verb> ...``.

Exit status: 0 on success or a true answer, 1 when a predicate is false,
2 for usage and I/O problems, 3 when the depth cap is hit or an automaton
fails its integrity check.
"""
from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from . import algebra
from .automaton import IntegrityError, Irva, decide_member, decide_member_affine, validate
from .formula import And, Formula, Not, Or, ParseError, evaluate, parse, to_text
from .io import FormatError, load, save, stats, to_dot
from .linalg import parse_rational

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_FAILURE = 3


class UsageError(Exception):
    pass


def _parse_point(text: str) -> tuple[Fraction, ...]:
    parts = [p.strip() for p in text.split(",")]
    if not text.strip() or any(not p for p in parts):
        raise UsageError(f"malformed point {text!r}; expected comma-separated rationals")
    try:
        return tuple(parse_rational(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed point {text!r}: {exc}") from None


def _read_formula(path: str) -> Formula:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load(path: str) -> Irva:
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _save(A: Irva, path: str) -> None:
    try:
        save(A, path)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _answer(value: bool) -> int:
    print("true" if value else "false")
    return EXIT_OK if value else EXIT_FALSE


def _combined_formula(A: Irva, B: Irva, op: str) -> str | None:
    """Formula comment for a combination, when both inputs carry one."""
    if not A.formula or not B.formula:
        return None
    try:
        fa, fb = parse(A.formula), parse(B.formula)
    except ParseError:
        return None
    a, b = fa.root, fb.root
    node = {
        "and": lambda: And((a, b)),
        "or": lambda: Or((a, b)),
        "xor": lambda: Or((And((a, Not(b))), And((Not(a), b)))),
        "diff": lambda: And((a, Not(b))),
    }[op]()
    return to_text(Formula(fa.dim, node))


# -- verbs -----------------------------------------------------------------------

def cmd_build(args) -> int:
    f = _read_formula(args.formula)
    A = algebra.build(f, depth_cap=args.depth_cap, minimize_result=not args.no_minimize)
    _save(A.with_source(A.affine_dim, to_text(f)), args.output)
    return EXIT_OK


def cmd_member(args) -> int:
    A = _load(args.irva)
    p = _parse_point(args.point)
    expected = A.n if A.affine_dim is None else A.affine_dim
    if len(p) != expected:
        raise UsageError(f"point has {len(p)} coordinates, the automaton expects {expected}")
    if args.oracle:
        if not A.formula:
            raise UsageError("the file records no formula to evaluate")
        return _answer(evaluate(parse(A.formula), p))
    if A.affine_dim is None:
        return _answer(decide_member(A, p))
    return _answer(decide_member_affine(A, p))


def cmd_op(args) -> int:
    A, B = _load(args.a), _load(args.b)
    C = algebra.combine(A, B, args.operator, depth_cap=args.depth_cap)
    _save(C.with_source(C.affine_dim, _combined_formula(A, B, args.operator)), args.output)
    return EXIT_OK


def cmd_not(args) -> int:
    A = _load(args.a)
    formula = None
    if A.formula:
        f = parse(A.formula)
        formula = to_text(Formula(f.dim, Not(f.root)))
    _save(algebra.complement(A).with_source(A.affine_dim, formula), args.output)
    return EXIT_OK


def cmd_minimize(args) -> int:
    A = _load(args.a)
    _save(algebra.minimize(A).with_source(A.affine_dim, A.formula), args.output)
    return EXIT_OK


def cmd_eq(args) -> int:
    return _answer(algebra.equal(_load(args.a), _load(args.b)))


def cmd_subset(args) -> int:
    return _answer(algebra.subset(_load(args.a), _load(args.b)))


def cmd_empty(args) -> int:
    return _answer(algebra.is_empty(_load(args.a)))


def cmd_stats(args) -> int:
    print(stats(_load(args.a)))
    return EXIT_OK


def cmd_dot(args) -> int:
    text = to_dot(_load(args.a))
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        A = load(args.a, check_structure=False)
    except OSError as exc:
        raise UsageError(f"cannot read {args.a}: {exc.strerror}") from None
    except FormatError as exc:
        raise UsageError(f"{args.a}: {exc}") from None
    problems = validate(A)
    for v in problems:
        print(v)
    return EXIT_FAILURE if problems else EXIT_OK


# -- argument parsing ------------------------------------------------------------

_POINT_LIKE = re.compile(r"^-\d+(/\d+)?(\s*,\s*-?\d+(/\d+)?)*$")


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # Let points such as "-7,1/2" through as positionals rather than flags.
        self._negative_number_matcher = _POINT_LIKE

    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="irva", description="Build and query implicit real vector automata.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="automaton of a formula file")
    p.add_argument("formula")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--no-minimize", action="store_true")
    p.add_argument("--depth-cap", type=int, default=algebra.DEFAULT_DEPTH_CAP)
    p.set_defaults(run=cmd_build)

    p = sub.add_parser("member", help="decide membership of a point")
    p.add_argument("irva")
    p.add_argument("point", help='comma-separated rationals, e.g. "1,-2/3"')
    p.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(run=cmd_member)

    p = sub.add_parser("op", help="Boolean combination of two automata")
    p.add_argument("operator", choices=["and", "or", "xor", "diff"])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--depth-cap", type=int, default=algebra.DEFAULT_DEPTH_CAP)
    p.set_defaults(run=cmd_op)

    for verb, fn, text in (("not", cmd_not, "complement"), ("minimize", cmd_minimize, "minimize")):
        p = sub.add_parser(verb, help=text)
        p.add_argument("a")
        p.add_argument("-o", "--output", required=True)
        p.set_defaults(run=fn)

    for verb, fn in (("eq", cmd_eq), ("subset", cmd_subset)):
        p = sub.add_parser(verb, help=f"{verb} predicate, prints true or false")
        p.add_argument("a")
        p.add_argument("b")
        p.set_defaults(run=fn)

    for verb, fn, text in (
        ("empty", cmd_empty, "emptiness predicate"),
        ("stats", cmd_stats, "state counts"),
        ("validate", cmd_validate, "list structural violations"),
    ):
        p = sub.add_parser(verb, help=text)
        p.add_argument("a")
        p.set_defaults(run=fn)

    p = sub.add_parser("dot", help="Graphviz drawing")
    p.add_argument("a")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_dot)
    return parser


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(f"irva: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except algebra.DepthCapExceeded as exc:
        print(f"irva: depth cap exceeded: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except IntegrityError as exc:
        print(f"irva: integrity failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:  # includes DimensionError: mismatched operands
        print(f"irva: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
