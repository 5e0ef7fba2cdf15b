"""The implicit real vector automaton and its membership procedure.

Implicit states carry a vector space and a polarity; explicit states are
binary decision nodes.  Leaving an implicit state, a vector is expressed in
coordinates that complete the state's basis, its residual part is scaled
onto a face of the cube ``[-1/2, 1/2]^d``, and the face symbol followed by
a serialized binary expansion of the position on that face selects a path
to the next implicit state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Mapping, Sequence

from .linalg import (
    DimensionError,
    VectorSpace,
    extend_basis,
    residual_coords,
    vec,
    vs_contains,
    vs_subset,
)


class IntegrityError(RuntimeError):
    """The automaton violates a structural invariant."""


@dataclass(frozen=True)
class ImplicitState:
    id: int
    space: VectorSpace
    polarity: bool  # True = in


@dataclass(frozen=True)
class ExplicitState:
    id: int
    succ0: int
    succ1: int

    def succ(self, bit: int) -> int:
        return self.succ1 if bit else self.succ0


@dataclass(frozen=True, eq=False)
class Irva:
    n: int
    implicit: Mapping[int, ImplicitState]
    explicit: Mapping[int, ExplicitState]
    itrans: Mapping[tuple[int, int], int]
    initial: int
    affine_dim: int | None = None  # set when this is the cone of an affine set
    formula: str | None = field(default=None, compare=False)

    @property
    def is_conical(self) -> bool:
        return self.affine_dim is None

    def is_implicit(self, sid: int) -> bool:
        return sid in self.implicit

    def faces(self, sid: int) -> list[int]:
        """Face symbols that must leave an implicit state, in canonical order."""
        d = self.n - self.implicit[sid].space.dim
        return [s * i for i in range(1, d + 1) for s in (1, -1)]

    def successors(self, sid: int) -> list[int]:
        if sid in self.explicit:
            e = self.explicit[sid]
            return [e.succ0, e.succ1]
        return [self.itrans[(sid, f)] for f in self.faces(sid) if (sid, f) in self.itrans]

    def labelled_successors(self, sid: int) -> list[tuple[int, int]]:
        if sid in self.explicit:
            e = self.explicit[sid]
            return [(0, e.succ0), (1, e.succ1)]
        return [(f, self.itrans[(sid, f)]) for f in self.faces(sid) if (sid, f) in self.itrans]

    def with_source(self, affine_dim: int | None, formula: str | None = None) -> "Irva":
        return Irva(self.n, self.implicit, self.explicit, self.itrans, self.initial, affine_dim, formula)

    def __len__(self) -> int:
        return len(self.implicit) + len(self.explicit)

    def __repr__(self) -> str:
        return (
            f"Irva(n={self.n}, implicit={len(self.implicit)}, "
            f"explicit={len(self.explicit)}, initial={self.initial})"
        )


# -- validation ----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    state: int | None
    message: str

    def __str__(self) -> str:
        where = "" if self.state is None else f" at state {self.state}"
        return f"{self.kind}{where}: {self.message}"


def _adjacency(A: Irva) -> dict[int, list[int]]:
    known = set(A.implicit) | set(A.explicit)
    adj: dict[int, list[int]] = {sid: [] for sid in known}
    for (sid, _), t in sorted(A.itrans.items()):
        if sid in adj and t in known:
            adj[sid].append(t)
    for sid, e in A.explicit.items():
        adj[sid] = [t for t in (e.succ0, e.succ1) if t in known]
    return adj


def topological_order(A: Irva, adj: dict[int, list[int]] | None = None) -> list[int] | None:
    """States reachable from the initial one, predecessors first; None on a cycle."""
    adj = _adjacency(A) if adj is None else adj
    order: list[int] = []
    color: dict[int, int] = {A.initial: 1}
    stack = [(A.initial, iter(adj.get(A.initial, ())))]
    while stack:
        sid, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            color[sid] = 2
            order.append(sid)
            continue
        c = color.get(nxt, 0)
        if c == 1:
            return None
        if c == 0:
            color[nxt] = 1
            stack.append((nxt, iter(adj.get(nxt, ()))))
    order.reverse()
    return order


def validate(A: Irva) -> list[Violation]:
    """All structural integrity violations of ``A`` (empty when well formed)."""
    out: list[Violation] = []
    if A.n < 1:
        out.append(Violation("BadDimension", None, f"dimension {A.n}"))
        return out
    if set(A.implicit) & set(A.explicit):
        out.append(Violation("SharedId", None, "implicit and explicit ids overlap"))
    if A.initial not in A.implicit:
        out.append(Violation("BadInitial", A.initial, "initial state is not implicit"))
        return out
    known = set(A.implicit) | set(A.explicit)
    faces_present: dict[int, set[int]] = {}
    for sid, f in A.itrans:
        faces_present.setdefault(sid, set()).add(f)
    for sid, s in A.implicit.items():
        if s.id != sid:
            out.append(Violation("BadId", sid, f"state records id {s.id}"))
        if s.space.ambient_dim != A.n:
            out.append(Violation("BadSpace", sid, f"space in dimension {s.space.ambient_dim}"))
            continue
        expected = set(A.faces(sid))
        present = faces_present.get(sid, set())
        missing, extra = expected - present, present - expected
        if missing:
            out.append(Violation("IncompleteTransitions", sid, f"missing faces {sorted(missing)}"))
        if extra:
            out.append(Violation("SpuriousTransitions", sid, f"unexpected faces {sorted(extra)}"))
    for (sid, f), t in A.itrans.items():
        if sid not in A.implicit:
            out.append(Violation("DanglingTransition", sid, "source is not an implicit state"))
        if t not in known:
            out.append(Violation("DanglingTransition", sid, f"face {f:+d} leads to unknown state {t}"))
    for sid, e in A.explicit.items():
        if e.id != sid:
            out.append(Violation("BadId", sid, f"state records id {e.id}"))
        for t in (e.succ0, e.succ1):
            if t not in known:
                out.append(Violation("DanglingTransition", sid, f"leads to unknown state {t}"))
    adj = _adjacency(A)
    order = topological_order(A, adj)
    if order is None:
        out.append(Violation("Cycle", None, "transition relation is not acyclic"))
        return out
    unreachable = known - set(order)
    if unreachable:
        out.append(Violation("Unreachable", min(unreachable), f"{len(unreachable)} unreachable states"))
    for sid in order:
        if sid not in A.implicit or A.implicit[sid].space.ambient_dim != A.n:
            continue
        space = A.implicit[sid].space
        for t in _next_implicit(A, adj, sid):
            tspace = A.implicit[t].space
            if tspace.ambient_dim != A.n:
                continue
            if tspace.dim <= space.dim or not vs_subset(space, tspace):
                out.append(
                    Violation("NonIncreasingSpace", sid, f"successor {t} does not strictly contain its space")
                )
    return out


def _next_implicit(A: Irva, adj: dict[int, list[int]], sid: int) -> set[int]:
    """Implicit states reachable from ``sid`` through explicit states only."""
    found: set[int] = set()
    seen: set[int] = set()
    todo = list(adj[sid])
    while todo:
        t = todo.pop()
        if t in seen:
            continue
        seen.add(t)
        if t in A.implicit:
            found.add(t)
        else:
            todo.extend(adj[t])
    return found


def check(A: Irva) -> Irva:
    problems = validate(A)
    if problems:
        raise IntegrityError("; ".join(map(str, problems)))
    return A


# -- direction encoding ----------------------------------------------------------

def _faces_of(z: Sequence[Fraction]) -> list[int]:
    top = max(abs(x) for x in z)
    if not top:
        raise ValueError("the zero vector has no direction")
    return [(i + 1) * (1 if x > 0 else -1) for i, x in enumerate(z) if abs(x) == top]


@dataclass(frozen=True)
class DirectionEncoding:
    """Face symbol plus an unbounded bit stream locating the point on that face."""

    face: int
    offsets: tuple[Fraction, ...]  # [[v]], coordinates in [0, 1]
    low_ties: frozenset = frozenset()  # offset coordinates taking the lower half on a tie

    def bits(self) -> Iterator[int]:
        m = len(self.offsets)
        if not m:
            return
        lo = [Fraction(0)] * m
        hi = [Fraction(1)] * m
        k = 0
        while True:
            j = k % m
            mid = (lo[j] + hi[j]) / 2
            u = self.offsets[j]
            if u > mid or (u == mid and j not in self.low_ties):
                lo[j] = mid
                yield 1
            else:
                hi[j] = mid
                yield 0
            k += 1

    def prefix(self, k: int) -> list[int]:
        out = []
        for b in self.bits():
            if len(out) == k:
                break
            out.append(b)
        return out


def encode_direction(z: Sequence, face: int | None = None, low_ties=()) -> DirectionEncoding:
    """Encode the direction of a nonzero residual vector.

    By default the face is the smallest index attaining ``max |z_i|`` and a
    coordinate sitting exactly on a midpoint takes the upper half.  ``face``
    and ``low_ties`` select one of the alternative valid encodings.
    """
    z = vec(z)
    valid = _faces_of(z)
    if face is None:
        face = valid[0]
    elif face not in valid:
        raise ValueError(f"face {face:+d} is not a face of {z}")
    i = abs(face) - 1
    scale = 2 * abs(z[i])
    offsets = tuple(x / scale + Fraction(1, 2) for j, x in enumerate(z) if j != i)
    return DirectionEncoding(face, offsets, frozenset(low_ties))


def alternative_encodings(z: Sequence) -> list[DirectionEncoding]:
    """Every distinct valid encoding of the direction of ``z``."""
    out = []
    for face in _faces_of(vec(z)):
        base = encode_direction(z, face)
        tied = [j for j, u in enumerate(base.offsets) if _has_midpoint_tie(u)]
        for mask in product((False, True), repeat=len(tied)):
            low = frozenset(j for j, m in zip(tied, mask) if m)
            out.append(DirectionEncoding(face, base.offsets, low))
    return out


def _has_midpoint_tie(u: Fraction) -> bool:
    # dyadic rationals strictly inside (0, 1) hit a midpoint exactly once
    return 0 < u < 1 and (u.denominator & (u.denominator - 1)) == 0


# -- membership ------------------------------------------------------------------

Chooser = Callable[[int, tuple], DirectionEncoding]


def _follow(A: Irva, sid: int, enc: DirectionEncoding) -> int:
    """Follow the transitions labelled by ``enc`` from implicit ``sid``."""
    try:
        t = A.itrans[(sid, enc.face)]
    except KeyError:
        raise IntegrityError(f"state {sid} has no transition for face {enc.face:+d}") from None
    if t in A.explicit:
        bits = enc.bits()
        while t in A.explicit:
            b = next(bits, None)
            if b is None:
                raise IntegrityError(f"explicit state {t} reached with a one-dimensional residual")
            t = A.explicit[t].succ(b)
    if t not in A.implicit:
        raise IntegrityError(f"transition leads to unknown state {t}")
    return t


def trace(A: Irva, v: Sequence, choose: Chooser | None = None) -> list[int]:
    """Implicit states visited when deciding ``v``; the last one decides."""
    v = vec(v)
    if len(v) != A.n:
        raise DimensionError(f"vector of dimension {len(v)} for an automaton of dimension {A.n}")
    sid = A.initial
    path = [sid]
    for _ in range(A.n + 2):
        state = A.implicit[sid]
        if state.space.is_full or vs_contains(state.space, v):
            return path
        z = residual_coords(extend_basis(state.space), v)
        enc = choose(sid, z) if choose else encode_direction(z)
        nxt = _follow(A, sid, enc)
        if A.implicit[nxt].space.dim <= state.space.dim:
            raise IntegrityError(f"space does not grow from state {sid} to {nxt}")
        sid = nxt
        path.append(sid)
    raise IntegrityError("membership walk did not terminate")


def decide_member(A: Irva, v: Sequence, choose: Chooser | None = None) -> bool:
    return A.implicit[trace(A, v, choose)[-1]].polarity


def decide_member_affine(A: Irva, v: Sequence) -> bool:
    """Membership of an affine point in the set whose representing cone is ``A``."""
    if A.affine_dim is None:
        raise ValueError("automaton does not represent an affine set")
    if len(v) != A.affine_dim:
        raise DimensionError(f"point of dimension {len(v)}, expected {A.affine_dim}")
    return decide_member(A, tuple(vec(v)) + (Fraction(1),))


def decide_member_all(A: Irva, v: Sequence) -> set[bool]:
    """Outcomes over every admissible choice of encodings along the walk."""
    v = vec(v)
    results: set[bool] = set()

    def walk(sid: int) -> None:
        state = A.implicit[sid]
        if state.space.is_full or vs_contains(state.space, v):
            results.add(state.polarity)
            return
        z = residual_coords(extend_basis(state.space), v)
        for enc in alternative_encodings(z):
            walk(_follow(A, sid, enc))

    walk(A.initial)
    return results


__all__ = [
    "DirectionEncoding",
    "ExplicitState",
    "ImplicitState",
    "IntegrityError",
    "Irva",
    "Violation",
    "alternative_encodings",
    "check",
    "decide_member",
    "decide_member_affine",
    "decide_member_all",
    "encode_direction",
    "topological_order",
    "trace",
    "validate",
]
