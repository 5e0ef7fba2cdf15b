import random
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irva.automaton import encode_direction
from irva.cones import (
    cone_feasible,
    feasible_strict,
    intersect,
    joint_meets,
    make_region,
    meets_vector_space,
    region_from_prefix,
    vs_equations,
)
from irva.linalg import extend_basis, full_space, vs_from_generators, zero_space


def _grid(n, radius=3):
    return [v for v in product(range(-radius, radius + 1), repeat=n) if any(v)]


def test_feasible_examples():
    assert feasible_strict(make_region(1, ges=[(1,)], strict=(1,)))
    assert not feasible_strict(make_region(1, ges=[(1,), (-1,)], strict=(1,)))
    be = extend_basis(zero_space(2))
    assert feasible_strict(region_from_prefix(be, 1, (1,)))


def test_prefix_region_examples():
    be = extend_basis(zero_space(2))
    face = region_from_prefix(be, 1)
    upper = region_from_prefix(be, 1, (1,))
    quarter = region_from_prefix(be, 1, (1, 0))
    for z in _grid(2):
        z1, z2 = z
        assert face.contains(z) == (z1 >= 0 and -z1 <= z2 <= z1)
        assert upper.contains(z) == (z1 >= 0 and 0 <= z2 <= z1)
        assert quarter.contains(z) == (z1 >= 0 and 0 <= 2 * z2 <= z1)
    assert face.strict == (1, 0)


def test_negative_face_and_range():
    be = extend_basis(zero_space(3))
    r = region_from_prefix(be, -2, ())
    assert r.contains_strictly((0, -1, 0)) and not r.contains_strictly((0, 1, 0))
    with pytest.raises(ValueError):
        region_from_prefix(be, 4)
    with pytest.raises(ValueError):
        region_from_prefix(extend_basis(vs_from_generators([(1, 0)], 2)), 1, (0,))


def test_prefix_region_has_space_as_lineality():
    line = vs_from_generators([(1, 1, 0)], 3)
    r = region_from_prefix(extend_basis(line), 1, (0, 1))
    base = next(v for v in _grid(3, 2) if r.contains_strictly(v))
    for t in range(-3, 4):
        assert r.contains_strictly(tuple(b + t * x for b, x in zip(base, (1, 1, 0))))


def test_meets_vector_space_examples():
    r = make_region(2, ges=[(1, 0), (0, 1), (1, -1)], strict=(1, 0))
    assert meets_vector_space(r, full_space(2))
    assert not meets_vector_space(r, zero_space(2))
    assert meets_vector_space(r, vs_from_generators([(1, 0)], 2))
    assert not meets_vector_space(r, vs_from_generators([(0, 1)], 2))


def test_intersect_examples():
    a = make_region(2, ges=[(1, 0)], strict=(1, 0))
    aa = intersect(a, a)
    assert len(aa.constraints) == 2 and feasible_strict(aa)
    opposite = make_region(2, ges=[(-1, 0)], strict=(-1, 0))
    assert not feasible_strict(intersect(a, opposite))
    around = make_region(2, ges=[(2, -1), (-1, 2)], strict=(1, 1))
    assert feasible_strict(intersect(around, region_from_prefix(extend_basis(zero_space(2)), 1, (1,))))


def _brute_feasible(n, eqs, ges, strict, radius=4):
    for v in _grid(n, radius):
        if all(sum(a * b for a, b in zip(e, v)) == 0 for e in eqs) and all(
            sum(a * b for a, b in zip(g, v)) >= 0 for g in ges
        ) and sum(a * b for a, b in zip(strict, v)) > 0:
            return True
    return False


def test_feasibility_agrees_with_grid_search():
    """Small coefficients keep some witness on the grid whenever one exists."""
    rng = random.Random(11)
    checked = 0
    for _ in range(400):
        n = rng.randint(1, 3)
        fs = lambda k: [tuple(rng.randint(-1, 1) for _ in range(n)) for _ in range(k)]  # noqa: E731
        eqs, ges = fs(rng.randint(0, 1)), fs(rng.randint(0, 5))
        strict = fs(1)[0]
        expected = _brute_feasible(n, eqs, ges, strict)
        assert cone_feasible(n, eqs, ges, [strict]) == expected, (eqs, ges, strict)
        checked += 1
    assert checked == 400


def test_empty_strict_list_is_feasible():
    assert cone_feasible(2, [(1, 0), (0, 1)], [], [])


residual = st.lists(st.integers(-20, 20), min_size=1, max_size=4).filter(any)


@settings(max_examples=200, deadline=None)
@given(residual, st.integers(0, 12))
def test_encoded_direction_lies_in_its_prefix_regions(z, k):
    n = len(z)
    be = extend_basis(zero_space(n))
    enc = encode_direction(z)
    bits = enc.prefix(k) if n > 1 else []
    assert region_from_prefix(be, enc.face, bits).contains_strictly(z)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=0, max_size=8), st.sampled_from([1, -1, 2, -2, 3, -3]))
def test_child_regions_shrink(bits, face):
    be = extend_basis(zero_space(3))
    parent = region_from_prefix(be, face, bits)
    children = [region_from_prefix(be, face, list(bits) + [b]) for b in (0, 1)]
    for v in _grid(3, 3):
        for child in children:
            if child.contains(v):
                assert parent.contains(v)
        if parent.contains(v):
            assert any(c.contains(v) for c in children)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(0, 1), max_size=9),
    st.sampled_from([1, -1, 2, -2, 3, -3]),
    st.lists(st.tuples(*[st.integers(-4, 4)] * 4), min_size=1, max_size=3),
    st.lists(st.tuples(*[st.integers(-4, 4)] * 4), max_size=2),
)
def test_fast_paths_agree_with_simplex(bits, face, ges, gens):
    """The box, corner and low-dimensional shortcuts must give the exact answer."""
    space = vs_from_generators([(1, 1, 0, 0)], 4)
    be = extend_basis(space)
    r = region_from_prefix(be, face, bits)
    other = make_region(4, ges=ges, strict=(0, 0, 0, 1))
    vs = vs_from_generators(gens, 4) if gens else None
    eqs = []
    if vs is not None:
        if not vs.dim:
            assert not joint_meets(r, (other,), vs)
            return
        eqs = list(vs_equations(vs))
    expected = cone_feasible(4, list(r.eqs) + eqs, list(r.ges) + list(other.ges), [r.strict])
    assert joint_meets(r, (other,), vs) == expected


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.integers(0, 1), max_size=9),
    st.sampled_from([1, -1, 2, -2]),
    st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=1, max_size=2),
)
def test_meets_vector_space_agrees_with_simplex(bits, face, gens):
    be = extend_basis(zero_space(3))
    r = region_from_prefix(be, face, bits if face else [])
    vs = vs_from_generators(gens, 3)
    if not vs.dim:
        assert not meets_vector_space(r, vs)
        return
    expected = cone_feasible(3, list(r.eqs) + list(vs_equations(vs)), r.ges, [r.strict])
    assert meets_vector_space(r, vs) == expected


def test_cone_property():
    be = extend_basis(vs_from_generators([(1, 2, 0)], 3))
    r = region_from_prefix(be, -1, (1, 0, 1))
    assert r.contains((0, 0, 0)) and not r.contains_strictly((0, 0, 0))
    v = next(v for v in _grid(3, 4) if r.contains_strictly(v))
    assert r.contains_strictly(tuple(F(7, 3) * x for x in v))
