"""Implicit real vector automata: canonical, Boolean-closed automata for
polyhedra given as Boolean combinations of linear constraints.

Typical use::

    from irva import parse, build, decide_member_affine
    A = build(parse("dim 2; x1 >= 1 & x2 < 2 & x1 - x2 <= 1"))
    decide_member_affine(A, (1, 0))   # True
"""
from .algebra import (
    DepthCapExceeded,
    Isolated,
    NOT_ISOLATED,
    STUCK,
    atom_irva,
    build,
    build_conical,
    canonical,
    combine,
    complement,
    const_irva,
    equal,
    is_empty,
    is_universal,
    isomorphic,
    minimal_covered_component,
    minimize,
    subset,
)
from .automaton import (
    DirectionEncoding,
    ExplicitState,
    ImplicitState,
    IntegrityError,
    Irva,
    Violation,
    alternative_encodings,
    decide_member,
    decide_member_affine,
    encode_direction,
    validate,
)
from .cones import ConeRegion, feasible_strict, intersect, meets_vector_space, region_from_prefix
from .formula import Formula, ParseError, conify, evaluate, parse, to_text
from .io import FormatError, deserialize, load, save, serialize, stats, to_dot
from .linalg import (
    BasisExtension,
    DimensionError,
    VectorSpace,
    extend_basis,
    residual_coords,
    rref,
    solve,
    vs_contains,
    vs_from_generators,
    vs_intersect,
)

__version__ = "0.1.0"

__all__ = [
    "BasisExtension",
    "ConeRegion",
    "DepthCapExceeded",
    "DimensionError",
    "DirectionEncoding",
    "ExplicitState",
    "FormatError",
    "Formula",
    "ImplicitState",
    "IntegrityError",
    "Irva",
    "Isolated",
    "NOT_ISOLATED",
    "ParseError",
    "STUCK",
    "VectorSpace",
    "Violation",
    "alternative_encodings",
    "atom_irva",
    "build",
    "build_conical",
    "canonical",
    "combine",
    "complement",
    "conify",
    "const_irva",
    "decide_member",
    "decide_member_affine",
    "deserialize",
    "encode_direction",
    "equal",
    "evaluate",
    "extend_basis",
    "feasible_strict",
    "intersect",
    "is_empty",
    "is_universal",
    "isomorphic",
    "load",
    "meets_vector_space",
    "minimal_covered_component",
    "minimize",
    "parse",
    "region_from_prefix",
    "residual_coords",
    "rref",
    "save",
    "serialize",
    "solve",
    "stats",
    "subset",
    "to_dot",
    "to_text",
    "validate",
    "vs_contains",
    "vs_from_generators",
    "vs_intersect",
]
