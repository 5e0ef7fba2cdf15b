"""Text serialization, statistics and Graphviz export.

File format (UTF-8, one record per line)::

    IRVA v1
    # formula: dim 1; x1 >= 0          (optional comment lines)
    dim 3
    source affine 2                    (omitted for conical automata)
    initial 0
    implicit 0 out dim 1
    1 0 1                              (one basis row per dimension)
    explicit 5 0:3 1:4
    itrans 0 +1 5

A full-dimensional space has the identity as its only reduced basis, so its
rows are left out; the reader accepts them either way.  Output is
deterministic: states are renumbered canonically first.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .automaton import ExplicitState, ImplicitState, Irva, check
from .linalg import VectorSpace, format_rational, full_space, parse_rational, rref

HEADER = "IRVA v1"


class FormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        super().__init__(message if lineno is None else f"line {lineno}: {message}")
        self.lineno = lineno


def serialize(A: Irva) -> str:
    from .algebra import canonical

    A = canonical(A)
    lines = [HEADER]
    if A.formula:
        lines.append(f"# formula: {A.formula}")
    lines.append(f"dim {A.n}")
    if A.affine_dim is not None:
        lines.append(f"source affine {A.affine_dim}")
    lines.append(f"initial {A.initial}")
    for sid in sorted(A.implicit):
        s = A.implicit[sid]
        lines.append(f"implicit {sid} {'in' if s.polarity else 'out'} dim {s.space.dim}")
        if not s.space.is_full:
            lines.extend(" ".join(map(format_rational, row)) for row in s.space.basis)
    for sid in sorted(A.explicit):
        e = A.explicit[sid]
        lines.append(f"explicit {sid} 0:{e.succ0} 1:{e.succ1}")
    for (sid, face), t in sorted(A.itrans.items(), key=lambda kv: (kv[0][0], abs(kv[0][1]), -kv[0][1])):
        lines.append(f"itrans {sid} {face:+d} {t}")
    return "\n".join(lines) + "\n"


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, found {tok!r}", lineno) from None


def _is_row(line: str) -> bool:
    return line[:1].isdigit() or line[:1] == "-"


def deserialize(text: str, *, check_structure: bool = True) -> Irva:
    """Parse the text format.

    Syntax problems raise :class:`FormatError`.  A well-formed file that
    describes a broken automaton raises :class:`IntegrityError`, unless
    ``check_structure`` is off (useful for reporting violations).
    """
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    formula = None
    body = []
    for lineno, ln in lines:
        if not ln:
            continue
        if ln.startswith("#"):
            if ln.startswith("# formula:"):
                formula = ln[len("# formula:"):].strip()
            continue
        body.append((lineno, ln))
    if not body or body[0][1] != HEADER:
        raise FormatError(f"missing {HEADER!r} header", body[0][0] if body else None)
    pos = 1
    n = affine = initial = None
    implicit: dict[int, ImplicitState] = {}
    explicit: dict[int, ExplicitState] = {}
    itrans: dict[tuple[int, int], int] = {}
    while pos < len(body):
        lineno, ln = body[pos]
        pos += 1
        tok = ln.split()
        key = tok[0]
        if key == "dim" and len(tok) == 2:
            n = _int(tok[1], lineno)
            if n < 1:
                raise FormatError("dimension must be positive", lineno)
        elif key == "source":
            if tok[1:] == ["conical"]:
                affine = None
            elif len(tok) == 3 and tok[1] == "affine":
                affine = _int(tok[2], lineno)
            else:
                raise FormatError(f"bad source line {ln!r}", lineno)
        elif key == "initial" and len(tok) == 2:
            initial = _int(tok[1], lineno)
        elif key == "implicit" and len(tok) == 5 and tok[3] == "dim":
            if n is None:
                raise FormatError("implicit state before the dim line", lineno)
            sid, m = _int(tok[1], lineno), _int(tok[4], lineno)
            if tok[2] not in ("in", "out"):
                raise FormatError(f"polarity must be in or out, not {tok[2]!r}", lineno)
            if not 0 <= m <= n:
                raise FormatError(f"space dimension {m} outside 0..{n}", lineno)
            if sid in implicit or sid in explicit:
                raise FormatError(f"duplicate state {sid}", lineno)
            rows = []
            implied = m == n and (pos >= len(body) or not _is_row(body[pos][1]))
            for _ in range(0 if implied else m):
                if pos >= len(body):
                    raise FormatError("truncated basis", lineno)
                rl, row = body[pos]
                pos += 1
                try:
                    vals = tuple(parse_rational(x) for x in row.split())
                except ValueError as exc:
                    raise FormatError(str(exc), rl) from None
                if len(vals) != n:
                    raise FormatError(f"basis row needs {n} entries", rl)
                rows.append(vals)
            if implied:
                space = full_space(n)
            else:
                red, rank = rref(rows)
                if rank != m or red != tuple(rows):
                    raise FormatError("basis is not in reduced row echelon form", lineno)
                space = VectorSpace(n, red)
            implicit[sid] = ImplicitState(sid, space, tok[2] == "in")
        elif key == "explicit" and len(tok) == 4 and tok[2].startswith("0:") and tok[3].startswith("1:"):
            sid = _int(tok[1], lineno)
            if sid in implicit or sid in explicit:
                raise FormatError(f"duplicate state {sid}", lineno)
            explicit[sid] = ExplicitState(sid, _int(tok[2][2:], lineno), _int(tok[3][2:], lineno))
        elif key == "itrans" and len(tok) == 4:
            sid, face, t = _int(tok[1], lineno), _int(tok[2], lineno), _int(tok[3], lineno)
            if (sid, face) in itrans:
                raise FormatError(f"duplicate transition {sid} {face:+d}", lineno)
            itrans[(sid, face)] = t
        else:
            raise FormatError(f"unrecognized line {ln!r}", lineno)
    if n is None or initial is None:
        raise FormatError("dim and initial lines are required")
    A = Irva(n, implicit, explicit, itrans, initial, affine, formula)
    return check(A) if check_structure else A


def save(A: Irva, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(A))


def load(path, *, check_structure: bool = True) -> Irva:
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read(), check_structure=check_structure)


@dataclass(frozen=True)
class Stats:
    dim: int
    implicit_states: int
    explicit_states: int
    transitions: int
    in_states: int
    out_states: int
    components_by_dim: dict

    def __str__(self) -> str:
        by_dim = ", ".join(f"{d}:{c}" for d, c in sorted(self.components_by_dim.items()))
        return (
            f"dim {self.dim}\n"
            f"implicit {self.implicit_states} (in {self.in_states}, out {self.out_states})\n"
            f"explicit {self.explicit_states}\n"
            f"transitions {self.transitions}\n"
            f"components by dimension {by_dim}"
        )


def stats(A: Irva) -> Stats:
    pols = Counter(s.polarity for s in A.implicit.values())
    return Stats(
        dim=A.n,
        implicit_states=len(A.implicit),
        explicit_states=len(A.explicit),
        transitions=len(A.itrans) + 2 * len(A.explicit),
        in_states=pols[True],
        out_states=pols[False],
        components_by_dim=dict(Counter(s.space.dim for s in A.implicit.values())),
    )


def to_dot(A: Irva, name: str = "irva") -> str:
    """Graphviz drawing: rounded boxes for implicit states (doubled when in),
    small circles for explicit states."""
    out = [f"digraph {name} {{", "  rankdir=TB;"]
    for sid in sorted(A.implicit):
        s = A.implicit[sid]
        basis = "\\n".join("(" + ", ".join(map(format_rational, r)) + ")" for r in s.space.basis) or "{0}"
        if s.space.is_full:
            basis = f"R^{A.n}"
        periph = 2 if s.polarity else 1
        out.append(f'  s{sid} [shape=box, style=rounded, peripheries={periph}, label="{basis}"];')
    for sid in sorted(A.explicit):
        out.append(f'  s{sid} [shape=circle, width=0.15, fixedsize=true, label=""];')
    out.append(f"  start [shape=point];\n  start -> s{A.initial};")
    for (sid, face), t in sorted(A.itrans.items()):
        out.append(f'  s{sid} -> s{t} [label="{face:+d}"];')
    for sid in sorted(A.explicit):
        e = A.explicit[sid]
        out.append(f'  s{sid} -> s{e.succ0} [label="0"];')
        out.append(f'  s{sid} -> s{e.succ1} [label="1"];')
    out.append("}")
    return "\n".join(out) + "\n"


__all__ = ["FormatError", "Stats", "deserialize", "load", "save", "serialize", "stats", "to_dot"]
