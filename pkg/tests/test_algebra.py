import random
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import SMALL, random_formula, sample_points
from irva.algebra import (
    NOT_ISOLATED,
    DepthCapExceeded,
    Isolated,
    _unique_minimum,
    atom_irva,
    build,
    build_conical,
    combine,
    complement,
    const_irva,
    covered_components,
    equal,
    is_empty,
    is_universal,
    isomorphic,
    minimal_covered_component,
    minimize,
    subset,
)
from irva.automaton import decide_member, decide_member_affine, validate
from irva.cones import make_region, region_from_prefix
from irva.formula import evaluate, parse
from irva.io import serialize
from irva.linalg import DimensionError, extend_basis, full_space, vs_from_generators

TRIANGLE = "dim 2; x1 >= 1 & x2 < 2 & x1 - x2 <= 1"


@pytest.fixture(scope="module")
def quadrant():
    return combine(atom_irva((1, 0), ">="), atom_irva((0, 1), ">="), "and")


def polarity_census(A):
    ins = sum(s.polarity for s in A.implicit.values())
    return ins, len(A.implicit) - ins


def test_const_automata():
    for value in (True, False):
        A = const_irva(2, value)
        assert len(A.implicit) == 1 and not A.explicit and not A.itrans
        assert A.implicit[A.initial].space == full_space(2)
        assert all(decide_member(A, v) == value for v in [(0, 0), (1, -3), (F(1, 2), 7)])
        assert validate(A) == []
    with pytest.raises(ValueError):
        const_irva(0, True)


def test_atom_structure():
    A = atom_irva((1, -1), "<=")
    start = A.implicit[A.initial]
    assert start.polarity and start.space == vs_from_generators([(1, 1)], 2)
    assert A.implicit[A.itrans[(A.initial, 1)]].polarity is False
    assert A.implicit[A.itrans[(A.initial, -1)]].polarity is True
    eq = atom_irva((1,), "=")
    assert eq.itrans[(eq.initial, 1)] == eq.itrans[(eq.initial, -1)]
    assert len(eq.implicit) == 2
    with pytest.raises(ValueError):
        atom_irva((0, 0), ">=")
    with pytest.raises(ValueError):
        atom_irva((1, 0), "!=")


def test_complement():
    assert isomorphic(complement(const_irva(2, True)), const_irva(2, False))
    A = build(parse(TRIANGLE))
    assert equal(complement(A), build(parse("dim 2; !(x1 >= 1 & x2 < 2 & x1 - x2 <= 1)")))
    assert serialize(complement(complement(A))) == serialize(A)
    rng = random.Random(3)
    for p in sample_points(rng, parse(TRIANGLE), 100):
        assert decide_member_affine(complement(A), p) != decide_member_affine(A, p)


def test_quadrant_components(quadrant):
    assert len(quadrant.implicit) == 5
    assert polarity_census(quadrant) == (4, 1)
    apex = quadrant.implicit[quadrant.initial]
    assert apex.space.dim == 0 and apex.polarity
    assert sorted(s.space.dim for s in quadrant.implicit.values()) == [0, 1, 1, 2, 2]


def test_query_examples(quadrant):
    q = quadrant.initial
    interior = minimal_covered_component(quadrant, q, make_region(2, ges=[(2, -1), (-1, 2)], strict=(1, 1)))
    assert isinstance(interior, Isolated)
    s = quadrant.implicit[interior.state]
    assert s.space.is_full and s.polarity
    ray = minimal_covered_component(quadrant, q, make_region(2, ges=[(1, 4), (1, -4)], strict=(1, 0)))
    assert isinstance(ray, Isolated)
    assert quadrant.implicit[ray.state].space == vs_from_generators([(1, 0)], 2)
    half = make_region(2, ges=[(1, 1)], strict=(1, 1))
    assert minimal_covered_component(quadrant, q, half) is NOT_ISOLATED


def test_query_matches_exhaustive_search():
    """The pruned query agrees with exhaustive enumeration of covered components."""
    rng = random.Random(5)
    compared = 0
    for _ in range(12):
        A = build(random_formula(rng, SMALL))
        q = A.initial
        space = A.implicit[q].space
        if space.is_full:
            continue
        be = extend_basis(space)
        for face in A.faces(q):
            for depth in range(0, 5 if be.residual_dim > 1 else 1):
                bits = tuple(rng.randint(0, 1) for _ in range(depth))
                C = region_from_prefix(be, face, bits)
                found = covered_components(A, q, C)
                expected = _unique_minimum(A, found) if found else None
                assert minimal_covered_component(A, q, C) == expected
                compared += 1
    assert compared > 40


def test_tautology_and_absorption():
    cone = build_conical(parse("dim 3; x1 - x3 >= 0 & x2 - 2*x3 < 0"))
    assert isomorphic(combine(cone, complement(cone), "or"), const_irva(3, True))
    A = build(parse(TRIANGLE))
    everything = combine(A, complement(A), "or")
    assert is_universal(everything)
    assert equal(everything, build(parse("dim 2; true")))
    line = build_conical(parse("dim 2; x1 = x2"))
    merged = combine(line, const_irva(2, True), "or")
    assert len(merged.implicit) == 1 and merged.implicit[merged.initial].polarity


def test_minimize_leaves_atoms_alone():
    A = atom_irva((2, -1, 3), "<")
    assert serialize(minimize(A)) == serialize(A)
    B = build(parse(TRIANGLE))
    assert serialize(minimize(minimize(B))) == serialize(minimize(B))


def test_dyadic_line_family():
    for k in (1, 5, 16):
        A = build_conical(parse(f"dim 2; x1 = {2 ** k}*x2"))
        assert len(A.implicit) == 2
        line = A.implicit[A.initial].space
        assert line.basis == ((1, F(1, 2 ** k)),)


def test_triangle_census():
    A = build(parse(TRIANGLE))
    assert len(A.implicit) == 9
    assert polarity_census(A) == (4, 5)


def test_predicates():
    A = build(parse(TRIANGLE))
    B = build(parse("dim 2; x1 + 2*x2 > 1 | x2 = 0"))
    assert is_empty(combine(A, complement(A), "and"))
    assert equal(combine(A, B, "or"), combine(B, A, "or"))
    assert subset(A, build(parse("dim 2; x1 >= 1")))
    assert not subset(build(parse("dim 2; x1 >= 1")), A)
    assert is_universal(build(parse("dim 1; x1 > 0 | x1 <= 0")))
    assert is_empty(build(parse("dim 3; false")))
    assert not equal(A, B)


def test_kind_and_dimension_checks():
    with pytest.raises(DimensionError):
        combine(const_irva(2, True), const_irva(3, True))
    with pytest.raises(ValueError):
        combine(build(parse("dim 1; x1 > 0")), const_irva(2, True))
    with pytest.raises(ValueError):
        combine(const_irva(2, True), const_irva(2, True), "nand")


def test_depth_cap_is_enforced():
    with pytest.raises(DepthCapExceeded):
        build(parse(TRIANGLE), depth_cap=3)


def test_absorption_keeps_boundary_points():
    """Regression: a state may only be absorbed when every direction it routes
    inside the absorber's space ends in the absorber."""
    f = parse("dim 2; -1*x1 - 3*x2 <= 5 & 2*x1 - 1*x2 = 4")
    A = build(f)
    for x1 in range(-8, 9):
        for den in (1, 2, 3):
            p = (F(x1, den), 2 * F(x1, den) - 4)
            assert decide_member_affine(A, p) == evaluate(f, p)


def test_custom_operator():
    A = build(parse("dim 1; x1 > 0"))
    B = build(parse("dim 1; x1 < 2"))
    C = combine(A, B, lambda a, b: a == b)
    for x in (-1, 0, 1, 2, 3):
        assert decide_member_affine(C, (x,)) == ((x > 0) == (x < 2))


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(["and", "or", "xor", "diff"]))
def test_combine_is_pointwise(rnd, op):
    dim = rnd.randint(1, 2)
    fa, fb = random_formula(rnd, SMALL, dim), random_formula(rnd, SMALL, dim)
    A, B = build(fa), build(fb)
    C = combine(A, B, op)
    assert validate(C) == []
    fn = {"and": bool.__and__, "or": bool.__or__, "xor": bool.__xor__, "diff": lambda a, b: a and not b}[op]
    for p in sample_points(rnd, fa, 40) + sample_points(rnd, fb, 40):
        assert decide_member_affine(C, p) == fn(evaluate(fa, p), evaluate(fb, p))


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_unminimized_build_agrees(rnd):
    f = random_formula(rnd, SMALL, rnd.randint(1, 2))
    raw = build(f, minimize_result=False)
    A = build(f)
    assert len(A) <= len(raw)
    for p in sample_points(rnd, f, 60):
        assert decide_member_affine(raw, p) == decide_member_affine(A, p) == evaluate(f, p)


def test_grid_oracle_two_dimensions():
    f = parse("dim 2; (x1 >= 0 & x2 > x1 - 1) | !(x1 + x2 < 3) & x2 = 1/2")
    A = build(f)
    for p in product([F(k, 2) for k in range(-6, 7)], repeat=2):
        assert decide_member_affine(A, p) == evaluate(f, p)
