"""Exact rational linear algebra.

Vectors are tuples of :class:`fractions.Fraction`, matrices are tuples of
row tuples.  Subspaces are stored by their reduced row echelon basis, which
is unique, so two :class:`VectorSpace` values describe the same subspace
exactly when they compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

RVector = tuple  # tuple[Fraction, ...]
RMatrix = tuple  # tuple[RVector, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Operands live in spaces of different dimensions."""


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q``; the sign may only prefix the numerator."""
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {text!r}") from None
    if sep and (den.strip().startswith(("-", "+")) or q == 0):
        raise ValueError(f"not a rational: {text!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vec(values: Iterable) -> RVector:
    return tuple(Fraction(v) for v in values)


def mat(rows: Iterable[Iterable]) -> RMatrix:
    return tuple(vec(r) for r in rows)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), ZERO)


def unit(n: int, i: int) -> RVector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def zero_vector(n: int) -> RVector:
    return (ZERO,) * n


def rref(m: Sequence[Sequence]) -> tuple[RMatrix, int]:
    """Reduced row echelon form with zero rows dropped, and the rank."""
    rows = [list(map(Fraction, r)) for r in m]
    if not rows:
        return (), 0
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        pr = next((r for r in range(pivot_row, len(rows)) if rows[r][col]), None)
        if pr is None:
            continue
        rows[pivot_row], rows[pr] = rows[pr], rows[pivot_row]
        p = rows[pivot_row]
        inv = 1 / p[col]
        if inv != 1:
            p[:] = [x * inv for x in p]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], p)]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    basis = tuple(tuple(r) for r in rows[:pivot_row])
    return basis, pivot_row


def rank(m: Sequence[Sequence]) -> int:
    return rref(m)[1]


def pivot_columns(basis: RMatrix) -> tuple[int, ...]:
    return tuple(next(j for j, x in enumerate(row) if x) for row in basis)


def solve(m: Sequence[Sequence], rhs: Sequence) -> RVector | None:
    """Solve ``m @ x = rhs`` exactly.

    Returns ``None`` when the system has no solution.  Free variables of an
    underdetermined system are set to zero.
    """
    if len(m) != len(rhs):
        raise DimensionError(f"{len(m)} rows but rhs of length {len(rhs)}")
    if not m:
        return ()
    ncols = len(m[0])
    aug = [tuple(row) + (b,) for row, b in zip(m, rhs)]
    red, _ = rref(aug)
    x = [ZERO] * ncols
    for row in red:
        lead = next(j for j, v in enumerate(row) if v)
        if lead == ncols:
            return None
        x[lead] = row[ncols]
    return tuple(x)


def nullspace(m: Sequence[Sequence], ncols: int) -> RMatrix:
    """A basis (as rows) of ``{x : m @ x = 0}``."""
    red, _ = rref(m) if m else ((), 0)
    pivots = pivot_columns(red)
    free = [j for j in range(ncols) if j not in pivots]
    out = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        out.append(tuple(x))
    return tuple(out)


def matvec(m: RMatrix, v: Sequence) -> RVector:
    return tuple(dot(row, v) for row in m)


def transpose(m: Sequence[Sequence]) -> RMatrix:
    return tuple(zip(*m)) if m else ()


@dataclass(frozen=True)
class VectorSpace:
    """A linear subspace of Q^n held by its canonical (RREF) basis."""

    ambient_dim: int
    basis: RMatrix

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def __contains__(self, v) -> bool:
        return vs_contains(self, v)

    def __hash__(self) -> int:
        # Spaces key many caches; hashing Fractions every time is costly.
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.ambient_dim, self.basis))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        rows = ", ".join("(" + ", ".join(map(format_rational, r)) + ")" for r in self.basis)
        return f"VectorSpace(n={self.ambient_dim}, span{{{rows}}})"


def full_space(n: int) -> VectorSpace:
    return VectorSpace(n, tuple(unit(n, i) for i in range(n)))


def zero_space(n: int) -> VectorSpace:
    return VectorSpace(n, ())


def vs_from_generators(gens: Iterable[Sequence], ambient: int) -> VectorSpace:
    gens = [vec(g) for g in gens]
    for g in gens:
        if len(g) != ambient:
            raise DimensionError(f"generator {g} is not in dimension {ambient}")
    basis, _ = rref(gens)
    return VectorSpace(ambient, basis)


def kernel_space(functionals: Sequence[Sequence], ambient: int) -> VectorSpace:
    """The subspace annihilated by every functional."""
    return vs_from_generators(nullspace([vec(f) for f in functionals], ambient), ambient)


def _check_dim(vs: VectorSpace, v: Sequence) -> None:
    if len(v) != vs.ambient_dim:
        raise DimensionError(f"vector of length {len(v)} in dimension {vs.ambient_dim}")


def vs_contains(vs: VectorSpace, v: Sequence) -> bool:
    _check_dim(vs, v)
    v = list(v)
    # The basis is in RREF: eliminate pivot coordinates and look at the rest.
    for row, p in zip(vs.basis, pivot_columns(vs.basis)):
        c = v[p]
        if c:
            v = [x - c * y for x, y in zip(v, row)]
    return not any(v)


def vs_sum(a: VectorSpace, b: VectorSpace) -> VectorSpace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    return vs_from_generators(a.basis + b.basis, a.ambient_dim)


@lru_cache(maxsize=65536)
def vs_intersect(a: VectorSpace, b: VectorSpace) -> VectorSpace:
    """Intersection via the kernel of ``[A^T | -B^T]``."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    n = a.ambient_dim
    if a == b or b.is_full:
        return a
    if a.is_full:
        return b
    if not a.dim or not b.dim:
        return zero_space(n)
    ka, kb = a.dim, b.dim
    # Columns: coefficients on a's basis, then on b's basis.
    system = [
        [a.basis[i][j] for i in range(ka)] + [-b.basis[i][j] for i in range(kb)]
        for j in range(n)
    ]
    gens = []
    for coeffs in nullspace(system, ka + kb):
        gens.append(tuple(dot(coeffs[:ka], col) for col in zip(*a.basis)))
    return vs_from_generators(gens, n)


def vs_subset(a: VectorSpace, b: VectorSpace) -> bool:
    return all(vs_contains(b, row) for row in a.basis)


@dataclass(frozen=True)
class BasisExtension:
    """Completion of a subspace basis by standard unit vectors.

    ``residual_functionals`` maps a vector to its coordinates along
    ``z_basis`` in the combined coordinate system.
    """

    space: VectorSpace
    z_indices: tuple[int, ...]
    residual_functionals: RMatrix

    @property
    def z_basis(self) -> RMatrix:
        n = self.space.ambient_dim
        return tuple(unit(n, i) for i in self.z_indices)

    @property
    def residual_dim(self) -> int:
        return len(self.z_indices)

    def __hash__(self) -> int:
        return hash((self.space, self.z_indices))


@lru_cache(maxsize=4096)
def extend_basis(vs: VectorSpace) -> BasisExtension:
    n = vs.ambient_dim
    if vs.is_full:
        raise ValueError("the full space has no proper extension")
    chosen: list[int] = []
    current = list(vs.basis)
    r = vs.dim
    for i in range(n):
        if r == n:
            break
        trial, tr = rref(current + [unit(n, i)])
        if tr > r:
            chosen.append(i)
            current, r = list(trial), tr
    # Invert the change of basis [y_1 .. y_m z_1 .. z_k] (as columns).
    cols = list(vs.basis) + [unit(n, i) for i in chosen]
    aug = [[cols[c][row] for c in range(n)] + list(unit(n, row)) for row in range(n)]
    red, _ = rref(aug)
    inverse = tuple(tuple(row[n:]) for row in red)
    return BasisExtension(vs, tuple(chosen), inverse[vs.dim:])


def residual_coords(be: BasisExtension, v: Sequence) -> RVector:
    _check_dim(be.space, v)
    return matvec(be.residual_functionals, v)
