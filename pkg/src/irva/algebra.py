"""Constructing and combining automata.

Boolean operations follow the product construction: every implicit state of
the result pairs one implicit state of each operand, and its decision
structure is grown prefix by prefix until each prefix region isolates a
unique minimal component on both sides.
"""
from __future__ import annotations

import logging
import operator
import weakref
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

from .automaton import (
    ExplicitState,
    ImplicitState,
    IntegrityError,
    Irva,
    check,
    topological_order,
)
from .cones import (
    ConeRegion,
    cone_feasible,
    intersect,
    meets_vector_space,
    joint_meets,
    region_from_prefix,
)
from .formula import And, Const, Constraint, Formula, Node, Not, Or, conify, simplified
from .linalg import (
    DimensionError,
    extend_basis,
    full_space,
    kernel_space,
    vec,
    vs_intersect,
)

logger = logging.getLogger(__name__)

DEFAULT_DEPTH_CAP = 64

BOOLEAN_OPS: dict[str, Callable[[bool, bool], bool]] = {
    "and": operator.and_,
    "or": operator.or_,
    "xor": operator.xor,
    "diff": lambda a, b: a and not b,
    "iff": operator.eq,
}


class DepthCapExceeded(RuntimeError):
    """A product decision structure needed more bits than allowed."""


# -- elementary automata ---------------------------------------------------------

def const_irva(n: int, value: bool) -> Irva:
    if n < 1:
        raise ValueError("dimension must be positive")
    A = Irva(n, {0: ImplicitState(0, full_space(n), bool(value))}, {}, {}, 0)
    _MINIMAL.add(A)
    return A


_HOLDS = {
    "<": lambda s: s < 0,
    "<=": lambda s: s <= 0,
    "=": lambda s: s == 0,
    ">=": lambda s: s >= 0,
    ">": lambda s: s > 0,
}


def atom_irva(a: Sequence, op: str, n: int | None = None) -> Irva:
    """Automaton of the homogeneous constraint ``a . x  op  0``."""
    a = vec(a)
    n = len(a) if n is None else n
    if len(a) != n:
        raise DimensionError(f"normal of length {len(a)} in dimension {n}")
    if op not in _HOLDS:
        raise ValueError(f"unknown operator {op!r}")
    if not any(a):
        raise ValueError("the normal vector of an atom must be nonzero")
    hyper = kernel_space([a], n)
    j = extend_basis(hyper).z_indices[0]
    # Face +1 moves along e_j, where a.v takes the sign of a_j.
    sign = 1 if a[j] > 0 else -1
    implicit = {0: ImplicitState(0, hyper, _HOLDS[op](0))}
    targets = {}
    for face, s in ((1, sign), (-1, -sign)):
        pol = _HOLDS[op](s)
        if pol not in targets:
            targets[pol] = len(implicit)
            implicit[targets[pol]] = ImplicitState(targets[pol], full_space(n), pol)
    itrans = {(0, face): targets[_HOLDS[op](s)] for face, s in ((1, sign), (-1, -sign))}
    return minimize(Irva(n, implicit, {}, itrans, 0))


def _retag(A: Irva, affine_dim: int | None, formula: str | None = None) -> Irva:
    out = A.with_source(affine_dim, formula)
    if A in _MINIMAL:
        _MINIMAL.add(out)
    return out


def _flip(A: Irva, affine_dim: int | None) -> Irva:
    implicit = {k: ImplicitState(k, s.space, not s.polarity) for k, s in A.implicit.items()}
    out = Irva(A.n, implicit, dict(A.explicit), dict(A.itrans), A.initial, affine_dim)
    if A in _MINIMAL:
        _MINIMAL.add(out)
    return out


def complement(A: Irva) -> Irva:
    """Complement within the kind of set ``A`` represents.

    A conical automaton is complemented in the whole space by flipping every
    polarity.  The cone of an affine set lives in the half-space where the
    extra coordinate is positive, so the flipped automaton is cut back to it.
    """
    if A.affine_dim is None:
        return _flip(A, None)
    positive = atom_irva([0] * (A.n - 1) + [1], ">", A.n)
    return _retag(combine(_flip(A, None), positive, "and"), A.affine_dim)


# -- minimal covered component ----------------------------------------------------

@dataclass(frozen=True)
class Isolated:
    state: int


@dataclass(frozen=True)
class _Marker:
    name: str

    def __repr__(self) -> str:
        return self.name


NOT_ISOLATED = _Marker("NotIsolated")
STUCK = _Marker("Stuck")

_REACH: "weakref.WeakKeyDictionary[Irva, dict[int, frozenset]]" = weakref.WeakKeyDictionary()
_MINIMAL: "weakref.WeakSet[Irva]" = weakref.WeakSet()


def implicit_reach(A: Irva) -> dict[int, frozenset]:
    """For every state, the implicit states strictly reachable from it."""
    cached = _REACH.get(A)
    if cached is not None:
        return cached
    order = topological_order(A)
    if order is None:
        raise IntegrityError("transition relation is not acyclic")
    reach: dict[int, frozenset] = {}
    for sid in reversed(order):
        acc = set()
        for t in A.successors(sid):
            acc |= reach[t]
            if t in A.implicit:
                acc.add(t)
        reach[sid] = frozenset(acc)
    _REACH[A] = reach
    return reach


def _unique_minimum(A: Irva, candidates: set[int]):
    reach = implicit_reach(A)
    for m in sorted(candidates):
        if all(c == m or c in reach[m] for c in candidates):
            return Isolated(m)
    return NOT_ISOLATED


def minimal_covered_component(A: Irva, q: int, C: ConeRegion):
    """Unique minimal component covered by ``C`` near the component of ``q``.

    Returns :class:`Isolated`, ``NOT_ISOLATED`` when several minimal
    components are covered, or ``STUCK`` when the exploration finds nothing.

    The search follows every decision path from ``q`` whose accumulated
    region still meets ``C``.  A reached state counts as covered when its
    space meets ``C`` inside that accumulated region; the search stops
    there, since everything further down is reachable from it.  Uncovered
    states are passed through with the accumulated region.
    """
    return _query(A, q, C, frozenset())[0]


def _query(A: Irva, q: int, C: ConeRegion, known_misses: frozenset):
    """:func:`minimal_covered_component` plus the set of negative tests.

    A test that fails for a region fails for every subregion, so callers
    refining ``C`` pass the returned misses back in to skip those tests.
    Keys name a search node by its hops ``(state, face, bits)``.
    """
    if C.ambient_dim != A.n:
        raise DimensionError("region and automaton dimensions differ")
    misses = set(known_misses)
    if () not in misses:
        if meets_vector_space(C, A.implicit[q].space):
            return Isolated(q), frozenset(misses)
        misses.add(())
    found: set[int] = set()
    seen: set[tuple] = set()
    stack: list[tuple[int, tuple, tuple]] = [(q, (), ())]
    while stack:
        s, hops, path = stack.pop()
        if A.implicit[s].space.is_full:
            continue
        be = extend_basis(A.implicit[s].space)
        for face in A.faces(s):
            todo = [(A.itrans[(s, face)], ())]
            while todo:
                t, bits = todo.pop()
                key = hops + ((s, face, bits),)
                if key in misses:
                    continue
                joint = path + (region_from_prefix(be, face, bits),)
                if not joint_meets(C, joint):
                    misses.add(key)
                    continue
                if t in A.explicit:
                    e = A.explicit[t]
                    todo.append((e.succ1, bits + (1,)))
                    todo.append((e.succ0, bits + (0,)))
                    continue
                vkey = ("vs",) + key
                if vkey not in misses:
                    if joint_meets(C, joint, A.implicit[t].space):
                        found.add(t)
                        continue
                    misses.add(vkey)
                if (t, key) not in seen:
                    seen.add((t, key))
                    stack.append((t, key, joint))
    if not found:
        return STUCK, frozenset(misses)
    return _unique_minimum(A, found), frozenset(misses)


def covered_components(A: Irva, q: int, C: ConeRegion) -> set[int]:
    """Every implicit state whose component meets ``C`` near ``q``, by exhaustive search.

    Slow reference for :func:`minimal_covered_component`: each path keeps
    the conjunction of all regions it traversed, and departure from every
    visited space is required strictly.
    """
    out: set[int] = set()

    def visit(s: int, region: ConeRegion, stricts: tuple) -> None:
        space = A.implicit[s].space
        if meets_vector_space(region, space, stricts):
            out.add(s)
        if space.is_full:
            return
        be = extend_basis(space)
        for face in A.faces(s):
            todo = [(A.itrans[(s, face)], ())]
            while todo:
                t, bits = todo.pop()
                r = region_from_prefix(be, face, bits)
                joint = intersect(region, r)
                if not cone_feasible(A.n, joint.eqs, joint.ges, (region.strict, r.strict) + stricts):
                    continue
                if t in A.implicit:
                    visit(t, joint, stricts + (r.strict,))
                else:
                    e = A.explicit[t]
                    todo.append((e.succ1, bits + (1,)))
                    todo.append((e.succ0, bits + (0,)))

    visit(q, C, ())
    return out


# -- product ---------------------------------------------------------------------

def _resolve_op(op) -> Callable[[bool, bool], bool]:
    if callable(op):
        return op
    try:
        return BOOLEAN_OPS[op]
    except KeyError:
        raise ValueError(f"unknown Boolean operator {op!r}") from None


class _Product:
    def __init__(self, A: Irva, B: Irva, op, depth_cap: int):
        self.A, self.B = A, B
        self.op = op
        self.depth_cap = depth_cap
        self.implicit: dict[int, ImplicitState] = {}
        self.explicit: dict[int, ExplicitState] = {}
        self.itrans: dict[tuple[int, int], int] = {}
        self.memo: dict[tuple[int, int], int] = {}
        self.pending: list[tuple[int, int, int]] = []
        self.next_id = 0

    def _fresh(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def implicit_state(self, q1: int, q2: int, space=None) -> int:
        key = (q1, q2)
        if key in self.memo:
            return self.memo[key]
        if space is None:
            space = vs_intersect(self.A.implicit[q1].space, self.B.implicit[q2].space)
        sid = self._fresh()
        pol = bool(self.op(self.A.implicit[q1].polarity, self.B.implicit[q2].polarity))
        self.implicit[sid] = ImplicitState(sid, space, pol)
        self.memo[key] = sid
        self.pending.append((sid, q1, q2))
        return sid

    def _decided(self, X: Irva, r, first: bool):
        """Constant state when ``r`` pins one operand to a full-dimensional
        component whose polarity decides ``op`` alone; otherwise None."""
        if not isinstance(r, Isolated) or not X.implicit[r.state].space.is_full:
            return None
        p = X.implicit[r.state].polarity
        values = {self.op(p, x) if first else self.op(x, p) for x in (False, True)}
        if len(values) != 1:
            return None
        value = bool(values.pop())
        key = ("const", value)
        if key not in self.memo:
            sid = self._fresh()
            self.implicit[sid] = ImplicitState(sid, full_space(self.A.n), value)
            self.memo[key] = sid
        return self.memo[key]

    def run(self) -> Irva:
        init = self.implicit_state(self.A.initial, self.B.initial)
        while self.pending:
            sid, q1, q2 = self.pending.pop()
            space = self.implicit[sid].space
            if space.is_full:
                continue
            be = extend_basis(space)
            d = be.residual_dim
            for i in range(1, d + 1):
                for face in (i, -i):
                    self.itrans[(sid, face)] = self.expand(sid, q1, q2, be, face, ())
        return Irva(self.A.n, self.implicit, self.explicit, self.itrans, init)

    def expand(self, sid, q1, q2, be, face, bits, misses1=frozenset(), misses2=frozenset()) -> int:
        if len(bits) > self.depth_cap:
            raise DepthCapExceeded(
                f"decision structure below product state {sid} exceeds {self.depth_cap} bits "
                f"(face {face:+d})"
            )
        R = region_from_prefix(be, face, bits)
        r1, misses1 = _query(self.A, q1, R, misses1)
        const = self._decided(self.A, r1, first=True)
        if const is not None:
            return const
        r2, misses2 = _query(self.B, q2, R, misses2)
        const = self._decided(self.B, r2, first=False)
        if const is not None:
            return const
        if r1 is STUCK or r2 is STUCK:
            raise IntegrityError(f"no component covered below operand states ({q1}, {q2})")
        if isinstance(r1, Isolated) and isinstance(r2, Isolated):
            m1, m2 = r1.state, r2.state
            target = vs_intersect(self.A.implicit[m1].space, self.B.implicit[m2].space)
            if target.dim > be.space.dim and meets_vector_space(R, target):
                return self.implicit_state(m1, m2, target)
        if be.residual_dim == 1:
            raise IntegrityError(f"one-dimensional residual below ({q1}, {q2}) cannot be refined")
        eid = self._fresh()
        succ0 = self.expand(sid, q1, q2, be, face, bits + (0,), misses1, misses2)
        succ1 = self.expand(sid, q1, q2, be, face, bits + (1,), misses1, misses2)
        self.explicit[eid] = ExplicitState(eid, succ0, succ1)
        return eid


def combine(A: Irva, B: Irva, op="and", *, depth_cap: int = DEFAULT_DEPTH_CAP, minimize_result: bool = True) -> Irva:
    """Automaton of ``op(A, B)``; both operands must be conical of equal dimension."""
    if A.n != B.n:
        raise DimensionError(f"dimensions {A.n} and {B.n} differ")
    if A.affine_dim != B.affine_dim:
        raise ValueError("operands represent sets of different kinds")
    fn = _resolve_op(op)
    A, B = minimize(A), minimize(B)
    result = _Product(A, B, fn, depth_cap).run()
    result = minimize(result) if minimize_result else canonical(result)
    return _retag(result, A.affine_dim)


# -- minimization ----------------------------------------------------------------

def _explicit_contexts(A: Irva) -> dict[int, set[tuple]]:
    """For every explicit state, the (implicit owner, face, prefix) triples
    under which it is entered."""
    ctx: dict[int, set[tuple]] = {}
    for sid in A.implicit:
        for face in A.faces(sid):
            todo = [(A.itrans[(sid, face)], ())]
            while todo:
                t, bits = todo.pop()
                if t not in A.explicit:
                    continue
                key = (sid, face, bits)
                seen = ctx.setdefault(t, set())
                if key in seen:
                    continue
                seen.add(key)
                e = A.explicit[t]
                todo.append((e.succ0, bits + (0,)))
                todo.append((e.succ1, bits + (1,)))
    return ctx


def _routes_only_to(implicit, explicit, be, face, bits, node, target) -> bool:
    """True when no direction of the prefix region that lies in the space of
    ``target`` is routed to an implicit state other than ``target``."""
    if node == target:
        return True
    if not meets_vector_space(region_from_prefix(be, face, bits), implicit[target].space):
        return True
    if node in implicit:
        return False
    e = explicit[node]
    return all(
        _routes_only_to(implicit, explicit, be, face, bits + (b,), succ, target)
        for b, succ in ((0, e.succ0), (1, e.succ1))
    )


def _reduce_once(A: Irva) -> Irva:
    order = topological_order(A)
    if order is None:
        raise IntegrityError("transition relation is not acyclic")
    rep: dict[int, int] = {}
    reach: dict[int, frozenset] = {}
    table: dict[tuple, int] = {}
    implicit: dict[int, ImplicitState] = {}
    explicit: dict[int, ExplicitState] = {}
    itrans: dict[tuple[int, int], int] = {}
    contexts = _explicit_contexts(A)
    spaces = {sid: A.implicit[sid].space for sid in A.implicit}

    def absorbable(sid: int, labelled, t: int) -> bool:
        if sid in A.implicit:
            be = extend_basis(spaces[sid])
            return all(
                _routes_only_to(implicit, explicit, be, face, (), succ, t) for face, succ in labelled
            )
        for owner, face, bits in contexts.get(sid, ()):
            be = extend_basis(spaces[owner])
            for b, succ in labelled:
                if not _routes_only_to(implicit, explicit, be, face, bits + (b,), succ, t):
                    return False
        return True

    for sid in reversed(order):
        labelled = [(lab, rep[t]) for lab, t in A.labelled_successors(sid)]
        acc = set()
        for _, t in labelled:
            acc |= reach[t]
            if t in implicit:
                acc.add(t)
        own = A.implicit.get(sid)
        absorbed = None
        for _, t in labelled:
            if t not in implicit:
                continue
            if own is not None and implicit[t].polarity != own.polarity:
                continue
            if acc <= reach[t] | {t} and absorbable(sid, labelled, t):
                absorbed = t
                break
        if absorbed is not None:
            rep[sid] = absorbed
            continue
        if own is not None:
            sig = ("I", own.space, own.polarity, tuple(labelled))
        else:
            sig = ("E", tuple(labelled))
        if sig in table:
            rep[sid] = table[sig]
            continue
        new = sid
        if own is not None:
            implicit[new] = ImplicitState(new, own.space, own.polarity)
            for lab, t in labelled:
                itrans[(new, lab)] = t
        else:
            explicit[new] = ExplicitState(new, labelled[0][1], labelled[1][1])
        reach[new] = frozenset(acc)
        table[sig] = new
        rep[sid] = new
    return canonical(Irva(A.n, implicit, explicit, itrans, rep[A.initial], A.affine_dim, A.formula))


def minimize(A: Irva) -> Irva:
    """Merge indistinguishable states and absorb redundant ones, to a fixpoint."""
    if A in _MINIMAL:
        return A
    current = _reduce_once(A)
    while True:
        again = _reduce_once(current)
        if len(again) == len(current):
            break
        current = again
    _MINIMAL.add(current)
    return current


def canonical(A: Irva) -> Irva:
    """Renumber reachable states: by depth, implicit before explicit, then discovery."""
    order = topological_order(A)
    if order is None:
        raise IntegrityError("transition relation is not acyclic")
    depth = {A.initial: 0}
    for sid in order:
        for t in A.successors(sid):
            depth[t] = max(depth.get(t, 0), depth[sid] + 1)
    discovered = {A.initial: 0}
    queue = [A.initial]
    for sid in queue:
        for _, t in A.labelled_successors(sid):
            if t not in discovered:
                discovered[t] = len(discovered)
                queue.append(t)
    ranked = sorted(discovered, key=lambda s: (depth[s], s not in A.implicit, discovered[s]))
    new = {old: i for i, old in enumerate(ranked)}
    implicit = {new[s]: ImplicitState(new[s], A.implicit[s].space, A.implicit[s].polarity) for s in ranked if s in A.implicit}
    explicit = {
        new[s]: ExplicitState(new[s], new[A.explicit[s].succ0], new[A.explicit[s].succ1])
        for s in ranked
        if s in A.explicit
    }
    itrans = {(new[s], f): new[t] for (s, f), t in A.itrans.items() if s in new}
    return Irva(A.n, implicit, explicit, itrans, new[A.initial], A.affine_dim, A.formula)


# -- comparison and predicates ---------------------------------------------------

def isomorphic(A: Irva, B: Irva) -> bool:
    if A.n != B.n:
        return False
    match = {A.initial: B.initial}
    todo = [A.initial]
    while todo:
        a = todo.pop()
        b = match[a]
        if (a in A.implicit) != (b in B.implicit):
            return False
        if a in A.implicit:
            sa, sb = A.implicit[a], B.implicit[b]
            if sa.space != sb.space or sa.polarity != sb.polarity:
                return False
        la, lb = A.labelled_successors(a), B.labelled_successors(b)
        if [x for x, _ in la] != [y for y, _ in lb]:
            return False
        for (_, ta), (_, tb) in zip(la, lb):
            if ta in match:
                if match[ta] != tb:
                    return False
            else:
                match[ta] = tb
                todo.append(ta)
    return len(set(match.values())) == len(match) == len(A) and len(B) == len(A)


def _same_kind(A: Irva, B: Irva) -> None:
    if A.n != B.n:
        raise DimensionError(f"dimensions {A.n} and {B.n} differ")


def is_empty(A: Irva) -> bool:
    return not any(s.polarity for s in minimize(A).implicit.values())


def is_universal(A: Irva) -> bool:
    """Every point of the space (of affine space, for the cone of an affine set)?"""
    if A.affine_dim is not None:
        return is_empty(complement(A))
    return all(s.polarity for s in minimize(A).implicit.values())


def equal(A: Irva, B: Irva) -> bool:
    _same_kind(A, B)
    return isomorphic(minimize(A), minimize(B))


def subset(A: Irva, B: Irva) -> bool:
    _same_kind(A, B)
    # A already lies where the extra coordinate is positive, so a bare flip of B will do
    return is_empty(combine(A, _flip(B, B.affine_dim), "and"))


# -- formulas --------------------------------------------------------------------

def _build_node(node: Node, n: int, depth_cap: int, minimize_steps: bool) -> Irva:
    if isinstance(node, Const):
        return const_irva(n, node.value)
    if isinstance(node, Constraint):
        if node.b != 0:
            raise ValueError("conical construction needs homogeneous constraints")
        if not any(node.a):
            return const_irva(n, _HOLDS[node.op](0))
        return atom_irva(node.a, node.op, n)
    if isinstance(node, Not):
        return complement(_build_node(node.child, n, depth_cap, minimize_steps))
    if isinstance(node, (And, Or)):
        op = "and" if isinstance(node, And) else "or"
        parts = [_build_node(c, n, depth_cap, minimize_steps) for c in node.children]
        return reduce(
            lambda x, y: combine(x, y, op, depth_cap=depth_cap, minimize_result=minimize_steps), parts
        )
    raise TypeError(f"not a formula node: {node!r}")


def build_conical(f: Formula, *, depth_cap: int = DEFAULT_DEPTH_CAP, minimize_result: bool = True) -> Irva:
    """Automaton of a formula whose constraints are all homogeneous."""
    A = _build_node(simplified(f).root, f.dim, depth_cap, minimize_result)
    A = minimize(A) if minimize_result else A
    return check(A)


def build(f: Formula, *, depth_cap: int = DEFAULT_DEPTH_CAP, minimize_result: bool = True) -> Irva:
    """Automaton of the representing cone of an arbitrary formula."""
    A = build_conical(conify(f), depth_cap=depth_cap, minimize_result=minimize_result)
    return _retag(A, f.dim)


__all__ = [
    "BOOLEAN_OPS",
    "DepthCapExceeded",
    "Isolated",
    "NOT_ISOLATED",
    "STUCK",
    "atom_irva",
    "build",
    "build_conical",
    "canonical",
    "combine",
    "complement",
    "const_irva",
    "covered_components",
    "equal",
    "implicit_reach",
    "is_empty",
    "is_universal",
    "isomorphic",
    "minimal_covered_component",
    "minimize",
    "subset",
]
