"""Closed convex cones in H-representation, with exact feasibility tests.

A :class:`ConeRegion` is ``{v : f.v >= 0 for f in ges, g.v = 0 for g in eqs}``
together with a designated ``strict`` functional.  The interesting questions
are always about *nontrivial* points, i.e. points of the region where the
strict functional is positive; since regions are cones this is decided by
asking for ``strict.v >= 1`` instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from fractions import Fraction
from functools import lru_cache
from math import gcd
from operator import mul
from typing import Iterable, Sequence

from .linalg import (
    BasisExtension,
    DimensionError,
    RVector,
    VectorSpace,
    dot,
    nullspace,
    unit,
)

GE = ">="
EQ = "="


def _idot(a: Sequence, b: Sequence):
    return sum(map(mul, a, b))


def _primitive(f: Sequence) -> tuple[int, ...]:
    """Positive rescaling of a functional to coprime integers."""
    if all(type(x) is int for x in f):
        ints = list(f)
    else:
        den = 1
        for x in f:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
        ints = [int(x * den) for x in f]
    g = 0
    for x in ints:
        if x:
            g = gcd(g, x)
            if g == 1:
                break
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def _integer_rows(rows: Sequence[Sequence]) -> tuple[tuple[int, ...], ...]:
    """The rows multiplied by one common positive denominator."""
    den = 1
    for row in rows:
        for x in row:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
    return tuple(tuple(int(x * den) for x in row) for row in rows)


def _phase_one(cols: list[tuple[int, ...]], rhs: tuple[int, ...]) -> bool:
    """Is ``{lam >= 0 : sum(lam_j * cols[j]) = rhs}`` nonempty?

    Exact phase-1 simplex with Bland's rule on an integer tableau.  Rows are
    only ever rescaled by positive factors, which changes neither ratio
    tests nor signs, so every entry stays an integer.
    """
    m = len(rhs)
    k = len(cols)
    width = k + m  # structural columns, then one artificial per row
    tab: list[list[int]] = []
    for r in range(m):
        flip = -1 if rhs[r] < 0 else 1
        row = [flip * c[r] for c in cols] + [0] * m + [flip * rhs[r]]
        row[k + r] = 1
        tab.append(row)
    basis = list(range(k, k + m))
    # Phase-1 objective row: reduced costs of minimizing the artificial sum.
    obj = [-sum(row[j] for row in tab) for j in range(width + 1)]
    for j in range(k, width):
        obj[j] = 0
    while obj[width] < 0:
        enter = next((j for j in range(k) if obj[j] < 0), None)
        if enter is None:
            return False
        leave = -1
        for r, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                if leave < 0:
                    leave = r
                    continue
                lr = tab[leave]
                lhs, rhs_ = row[width] * lr[enter], lr[width] * a
                if lhs < rhs_ or (lhs == rhs_ and basis[r] < basis[leave]):
                    leave = r
        if leave < 0:
            return True
        prow = tab[leave]
        piv = prow[enter]
        nz = [j for j, x in enumerate(prow) if x]
        for r, row in enumerate(tab):
            if r == leave:
                continue
            f = row[enter]
            if f:
                for j in range(width + 1):
                    row[j] *= piv
                for j in nz:
                    row[j] -= f * prow[j]
                g = 0
                for x in row:
                    if x:
                        g = gcd(g, x)
                        if g == 1:
                            break
                if g > 1:
                    tab[r] = [x // g for x in row]
        f = obj[enter]
        if f:
            obj = [x * piv for x in obj]
            for j in nz:
                obj[j] -= f * prow[j]
            g = 0
            for x in obj:
                g = gcd(g, x)
            if g > 1:
                obj = [x // g for x in obj]
        basis[leave] = enter
    return True


@lru_cache(maxsize=200_000)
def _feasible_cached(
    n: int,
    eqs: tuple[tuple[int, ...], ...],
    ges: tuple[tuple[int, ...], ...],
    stricts: tuple[tuple[int, ...], ...],
) -> bool:
    if not stricts:
        return True
    if any(not any(s) for s in stricts):
        return False
    # Motzkin's alternative: no v with ges.v >= 0, eqs.v = 0 and stricts.v > 0
    # exactly when some ges/eqs combination with lam >= 0 (free on eqs) plus a
    # nonzero mu >= 0 combination of the stricts vanishes.  Normalize sum(mu) = 1.
    ges = tuple(g for g in ges if any(g))
    eqs = tuple(e for e in eqs if any(e))
    cols = [g + (0,) for g in ges]
    cols += [e + (0,) for e in eqs] + [tuple(-x for x in e) + (0,) for e in eqs]
    cols += [s + (1,) for s in stricts]
    rhs = (0,) * n + (1,)
    return not _phase_one(cols, rhs)


def cone_feasible(
    n: int,
    eqs: Iterable[Sequence] = (),
    ges: Iterable[Sequence] = (),
    stricts: Iterable[Sequence] = (),
) -> bool:
    """Is there ``v`` with ``eqs.v = 0``, ``ges.v >= 0`` and every strict ``> 0``?"""
    key = lambda fs: tuple(sorted({_primitive(f) for f in fs}))  # noqa: E731
    return _feasible_cached(n, key(eqs), key(ges), key(stricts))


@dataclass(frozen=True)
class ConeRegion:
    """Optionally carries generators: ``rays`` (each with positive strict
    functional) and a ``lineality`` basis whose sum is the whole region.
    Prefix regions also record their dyadic ``box`` (see
    :func:`region_from_prefix`) and the lineality ``span``.  These extras only
    serve as shortcuts in :func:`joint_meets`."""

    ambient_dim: int
    constraints: tuple[tuple[RVector, str], ...]
    strict: RVector
    rays: tuple[RVector, ...] | None = field(default=None, compare=False, repr=False)
    lineality: tuple[RVector, ...] = field(default=(), compare=False, repr=False)
    box: tuple | None = field(default=None, compare=False, repr=False)
    span: VectorSpace | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "eqs", tuple(f for f, rel in self.constraints if rel == EQ))
        object.__setattr__(self, "ges", tuple(f for f, rel in self.constraints if rel == GE))

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.ambient_dim, self.constraints, self.strict))
            object.__setattr__(self, "_hash", h)
        return h

    def contains(self, v: Sequence) -> bool:
        """Membership of a point in the closed cone (strictness ignored)."""
        for f, rel in self.constraints:
            x = dot(f, v)
            if (rel == EQ and x != 0) or (rel == GE and x < 0):
                return False
        return True

    def contains_strictly(self, v: Sequence) -> bool:
        return self.contains(v) and dot(self.strict, v) > 0


def make_region(n: int, ges=(), eqs=(), strict=None) -> ConeRegion:
    cons = tuple((tuple(map(Fraction, f)), GE) for f in ges)
    cons += tuple((tuple(map(Fraction, f)), EQ) for f in eqs)
    return ConeRegion(n, cons, tuple(map(Fraction, strict)))


def face_index(face: int, residual_dim: int) -> tuple[int, int]:
    """Split a face symbol ``+-i`` into ``(sign, zero-based index)``."""
    i = abs(face)
    if face == 0 or i > residual_dim:
        raise ValueError(f"face {face:+d} out of range for residual dimension {residual_dim}")
    return (1 if face > 0 else -1), i - 1


def dyadic_intervals(residual_dim: int, face: int, bits: Sequence[int]):
    """Per offset coordinate ``j != i``: the interval ``[lo, hi]`` after ``bits``.

    Bits refine the offset coordinates round-robin, in increasing order.
    """
    _, i = face_index(face, residual_dim)
    others = [j for j in range(residual_dim) if j != i]
    if bits and not others:
        raise ValueError("no bits can follow a face of a one-dimensional residual")
    box = {j: [Fraction(0), Fraction(1)] for j in others}
    for step, bit in enumerate(bits):
        lo, hi = box[others[step % len(others)]]
        mid = (lo + hi) / 2
        box[others[step % len(others)]] = [mid, hi] if bit else [lo, mid]
    return box


@lru_cache(maxsize=4096)
def _scaled_residuals(be: BasisExtension) -> tuple[tuple[int, ...], ...]:
    return _integer_rows(be.residual_functionals)


def _dyadic_numerators(residual_dim: int, face: int, bits: Sequence[int]):
    """Per offset coordinate ``j != i``: ``(k, p)`` with interval ``[p, p + 1] / 2**k``."""
    _, i = face_index(face, residual_dim)
    others = [j for j in range(residual_dim) if j != i]
    if bits and not others:
        raise ValueError("no bits can follow a face of a one-dimensional residual")
    box = {j: (0, 0) for j in others}
    for step, bit in enumerate(bits):
        j = others[step % len(others)]
        k, p = box[j]
        box[j] = (k + 1, 2 * p + bit)
    return box


def region_from_prefix(be: BasisExtension, face: int, bits: Sequence[int] = ()) -> ConeRegion:
    """Vectors whose residual direction admits an encoding starting ``face . bits``."""
    return _region_from_prefix(be, face, tuple(bits))


@lru_cache(maxsize=100_000)
def _region_from_prefix(be: BasisExtension, face: int, bits: tuple[int, ...]) -> ConeRegion:
    d = be.residual_dim
    sigma, i = face_index(face, d)
    G = _scaled_residuals(be)
    n = be.space.ambient_dim
    lead = tuple(sigma * x for x in G[i])  # sigma * z_i, up to a positive factor
    cons = [(lead, GE)]
    intervals = _dyadic_numerators(d, face, bits)
    for j, (k, p) in intervals.items():
        # (2 lo - 1) sigma z_i <= z_j <= (2 hi - 1) sigma z_i with lo = p / 2^k, hi = lo + 2^-k
        scale = 1 << k
        lo, hi = 2 * p - scale, 2 * p + 2 - scale
        cons.append((_primitive([scale * zj - lo * l for zj, l in zip(G[j], lead)]), GE))
        cons.append((_primitive([hi * l - scale * zj for zj, l in zip(G[j], lead)]), GE))
    # The same box in the coordinates of the added unit vectors, all scaled by 2**top.
    top = max((k for k, _ in intervals.values()), default=0)
    sides = []
    for j, (k, p) in intervals.items():
        shift = 1 << (top - k)
        sides.append((be.z_indices[j], (2 * p - (1 << k)) * shift, (2 * p + 2 - (1 << k)) * shift))
    box = (be.z_indices[i], sigma << top, tuple(sides))
    return ConeRegion(
        n,
        tuple(cons),
        _primitive(lead),
        _box_corners(box, n),
        _integer_basis(be.space),
        box,
        be.space,
    )


def _box_corners(box: tuple, n: int) -> tuple[tuple[int, ...], ...]:
    """Extreme rays of a prefix region, modulo its lineality space."""
    lead_index, lead_value, sides = box
    corners = []
    for combo in product(*[((idx, lo), (idx, hi)) for idx, lo, hi in sides]):
        v = [0] * n
        v[lead_index] = lead_value
        for idx, x in combo:
            v[idx] = x
        corners.append(tuple(v))
    return tuple(corners)


def _box_range(f: Sequence[int], box: tuple) -> tuple[int, int]:
    """Minimum and maximum of ``f`` over the box corners."""
    lead_index, lead_value, sides = box
    lo = hi = f[lead_index] * lead_value
    for idx, a, b in sides:
        x = f[idx]
        if x > 0:
            lo += x * a
            hi += x * b
        elif x < 0:
            lo += x * b
            hi += x * a
    return lo, hi


def feasible_strict(r: ConeRegion) -> bool:
    return cone_feasible(r.ambient_dim, r.eqs, r.ges, [r.strict])


def _plane_feasible(m: int, eqs, ges, strict) -> bool:
    """Exact cone feasibility in dimension one or two, by candidate rays.

    In the plane a nonempty feasible cone contains one of: a direction
    orthogonal to some constraint, a constraint's own normal, or the
    strict functional itself.
    """
    if m == 1:
        cands = [(1,), (-1,)]
    else:
        cands = [tuple(strict)]
        eqs = [e for e in eqs if any(e)]
        for f in eqs or [g for g in ges if any(g)]:
            cands += [(-f[1], f[0]), (f[1], -f[0])]
            if not eqs:
                cands.append(tuple(f))
    for x in cands:
        if (
            _idot(strict, x) > 0
            and all(_idot(e, x) == 0 for e in eqs)
            and all(_idot(g, x) >= 0 for g in ges)
        ):
            return True
    return False


def _feasible_in_space(vs: VectorSpace, eqs, ges, strict) -> bool:
    """Feasibility of the constraints restricted to a space of dimension <= 2."""
    basis = _integer_basis(vs)
    pull = lambda f: tuple(_idot(f, b) for b in basis)  # noqa: E731
    return _plane_feasible(vs.dim, [pull(f) for f in eqs], [pull(f) for f in ges], pull(strict))


def _corner_witness(corners, ges, eqs) -> bool:
    """Look for a feasible point among the box corners and, failing that,
    where a single constraint crosses a box edge.

    Corners are indexed so that adjacent ones differ in one bit.  Points on
    an edge are positive combinations of its two corners, so all constraint
    values follow from the corner values.
    """
    rows = [[_idot(f, v) for v in corners] for f in ges]
    erows = [[_idot(f, v) for v in corners] for f in eqs]
    count = len(corners)
    for j in range(count):
        if all(r[j] >= 0 for r in rows) and all(r[j] == 0 for r in erows):
            return True
    for j in range(count):
        bit = 1
        while bit < count:
            k = j | bit
            if k != j:
                for r in rows + erows:
                    a, b = r[j], r[k]
                    if (a > 0 > b) or (a < 0 < b):
                        wj, wk = abs(b), abs(a)
                        if all(wj * q[j] + wk * q[k] >= 0 for q in rows) and all(
                            wj * q[j] + wk * q[k] == 0 for q in erows
                        ):
                            return True
            bit <<= 1
    return False


_VANISH: dict = {}


def _vanishes_on(key, funcs: Sequence[Sequence[int]], basis: Sequence[Sequence[int]]) -> bool:
    hit = _VANISH.get(key)
    if hit is None:
        if len(_VANISH) > 200_000:
            _VANISH.clear()
        hit = not any(_idot(f, b) for f in funcs for b in basis)
        _VANISH[key] = hit
    return hit


def joint_meets(c: ConeRegion, regions: Sequence[ConeRegion] = (), vs: VectorSpace | None = None) -> bool:
    """Does ``c``, cut by ``regions`` and ``vs``, contain a point where ``c.strict > 0``?

    Only ``c``'s strict functional is enforced.  When ``c`` is a prefix
    region and every other constraint vanishes on its lineality space, the
    question lives on ``c``'s box: a constraint negative on the whole box
    rules it out, constraints nonnegative on the whole box can be dropped,
    and a corner satisfying the rest settles it positively.  Everything else
    goes to the exact feasibility test.
    """
    ges = [f for r in regions for f in r.ges]
    eqs = [f for r in regions for f in r.eqs]
    if vs is not None and vs.dim <= 2:
        if not vs.dim:
            return False
        return _feasible_in_space(vs, list(c.eqs) + eqs, list(c.ges) + ges, c.strict)
    if vs is not None and not vs.is_full:
        eqs += _integer_equations(vs)
    if c.box is not None:
        lin = c.lineality
        flat = not lin or (
            all(_vanishes_on((r, c.span), r.ges + r.eqs, lin) for r in regions)
            and (vs is None or vs.is_full or _vanishes_on((vs, c.span), _integer_equations(vs), lin))
        )
        if flat:
            box = c.box
            cut_ges, cut_eqs = [], []
            for f in ges:
                lo, hi = _box_range(f, box)
                if hi < 0:
                    return False
                if lo < 0:
                    cut_ges.append(f)
            for f in eqs:
                lo, hi = _box_range(f, box)
                if lo > 0 or hi < 0:
                    return False
                if lo or hi:
                    cut_eqs.append(f)
            if not cut_ges and not cut_eqs:
                return True
            if _corner_witness(c.rays, cut_ges, cut_eqs):
                return True
            return cone_feasible(c.ambient_dim, list(c.eqs) + cut_eqs, list(c.ges) + cut_ges, [c.strict])
    return cone_feasible(c.ambient_dim, list(c.eqs) + eqs, list(c.ges) + ges, [c.strict])


def region_meets(c: ConeRegion, x: ConeRegion) -> bool:
    """Does ``c`` intersect ``x`` in a point where ``c.strict`` is positive?"""
    return joint_meets(c, (x,))


def _check(r: ConeRegion, n: int) -> None:
    if r.ambient_dim != n:
        raise DimensionError(f"region in dimension {r.ambient_dim}, expected {n}")


@lru_cache(maxsize=4096)
def _integer_basis(vs: VectorSpace) -> tuple[tuple[int, ...], ...]:
    return tuple(_primitive(b) for b in vs.basis)


@lru_cache(maxsize=4096)
def _integer_equations(vs: VectorSpace) -> tuple[tuple[int, ...], ...]:
    return tuple(_primitive(e) for e in vs_equations(vs))


def meets_vector_space(r: ConeRegion, vs: VectorSpace, extra_stricts: Sequence = ()) -> bool:
    """Does ``vs`` contain a point of ``r`` with positive strict functional?"""
    _check(r, vs.ambient_dim)
    if not vs.dim:
        return False
    if vs.is_full:
        return cone_feasible(r.ambient_dim, r.eqs, r.ges, [r.strict, *extra_stricts])
    if r.rays is not None and not extra_stricts:
        return joint_meets(r, (), vs)
    if vs.dim <= 2 and not extra_stricts:
        return _feasible_in_space(vs, r.eqs, r.ges, r.strict)
    # Parametrize v = t @ basis; any positive rescaling of the rows will do.
    B = _integer_basis(vs)
    pull = lambda f: tuple(sum(x * y for x, y in zip(f, b)) for b in B)  # noqa: E731
    return cone_feasible(
        vs.dim,
        [pull(f) for f in r.eqs],
        [pull(f) for f in r.ges],
        [pull(r.strict)] + [pull(s) for s in extra_stricts],
    )


def intersect(a: ConeRegion, b: ConeRegion) -> ConeRegion:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError("regions live in different dimensions")
    return ConeRegion(a.ambient_dim, a.constraints + b.constraints, a.strict)


def vs_equations(vs: VectorSpace) -> tuple[RVector, ...]:
    """Functionals whose common kernel is ``vs``."""
    n = vs.ambient_dim
    if not vs.dim:
        return tuple(unit(n, i) for i in range(n))
    return nullspace(vs.basis, n)


def restrict_to_space(r: ConeRegion, vs: VectorSpace) -> ConeRegion:
    """``r`` intersected with a vector space (as extra equalities)."""
    _check(r, vs.ambient_dim)
    return ConeRegion(r.ambient_dim, r.constraints + tuple((e, EQ) for e in vs_equations(vs)), r.strict)


__all__ = [
    "ConeRegion",
    "EQ",
    "GE",
    "cone_feasible",
    "dyadic_intervals",
    "face_index",
    "feasible_strict",
    "intersect",
    "joint_meets",
    "make_region",
    "meets_vector_space",
    "region_from_prefix",
    "region_meets",
    "restrict_to_space",
    "vs_equations",
]

