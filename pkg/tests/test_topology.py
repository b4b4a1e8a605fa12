import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecpen.errors import DimensionMismatchError, InvalidInputError, UnsupportedRepresentationError
from vecpen.fixtures import saturn_probes, saturn_shape
from vecpen.topology import (
    Ball,
    Box,
    EmptyShape,
    HalfspaceSet,
    ProductShape,
    Region,
    UnionShape,
    check_halfopen_segment,
    check_restriction_interior,
    classify,
    distance,
    restrict_shape_at,
    section,
    segment_exit,
    signed_distance,
)

UNIT_DISK = Ball((0.0, 0.0), 1.0)


def test_classify_ball():
    assert classify(UNIT_DISK, (0.0, 0.0)) is Region.INTERIOR
    assert classify(UNIT_DISK, (1.0, 0.0)) is Region.BOUNDARY
    assert classify(UNIT_DISK, (2.0, 0.0)) is Region.EXTERIOR


def test_classify_box_and_halfspaces():
    box = Box([0, 0], [1, 1])
    assert classify(box, (0.5, 0.5)) is Region.INTERIOR
    assert classify(box, (1.0, 0.3)) is Region.BOUNDARY
    assert classify(box, (1.1, 0.3)) is Region.EXTERIOR
    wedge = HalfspaceSet([[-1.0, 0.0], [1.0, -1.0]], [0.0, 0.0])
    assert classify(wedge, (1.0, 2.0)) is Region.INTERIOR
    assert classify(wedge, (0.0, 2.0)) is Region.BOUNDARY
    assert classify(wedge, (2.0, 1.0)) is Region.EXTERIOR


def test_classify_checks_dimension():
    with pytest.raises(DimensionMismatchError):
        classify(UNIT_DISK, (1.0, 2.0, 3.0))


def test_invalid_shapes_rejected():
    with pytest.raises(InvalidInputError):
        Ball((0.0,), -1.0)
    with pytest.raises(InvalidInputError):
        Box([1.0], [0.0])


def test_saturn_section_is_wide_disk():
    pred = restrict_shape_at(saturn_shape(), 0.0)
    wide = Ball((0.0, 0.0), 2.0)
    rng = np.random.default_rng(0)
    for x in rng.uniform(-3, 3, (300, 2)):
        assert pred(x) == wide.contains(x)


def test_product_section_inside_and_outside():
    prod = ProductShape(UNIT_DISK, Box([0.0], [1.0]))
    inside = restrict_shape_at(prod, 0.5)
    outside = restrict_shape_at(prod, 3.0)
    for x in [(0.0, 0.0), (0.9, 0.0), (1.5, 0.0)]:
        assert inside(x) == UNIT_DISK.contains(x)
        assert not outside(x)


def test_section_of_ball():
    s = section(Ball((0.0, 0.0, 0.0), 1.0), 0.6)
    assert s == Ball((0.0, 0.0), 0.8)
    assert isinstance(section(Ball((0.0, 0.0, 0.0), 1.0), 1.5), EmptyShape)


def test_halfopen_segment_examples():
    assert check_halfopen_segment(UNIT_DISK, (0.0, 0.0), (1.0, 0.0))
    assert check_halfopen_segment(UNIT_DISK, (0.0, 0.0), (1.0, 0.0), grid=[1e-3, 0.5, 1.0])
    assert check_halfopen_segment(Box([0, 0], [1, 1]), (0.5, 0.5), (1.0, 1.0))


def test_halfopen_segment_preconditions():
    with pytest.raises(UnsupportedRepresentationError):
        check_halfopen_segment(saturn_shape(), (0, 0, 0), (0.5, 0, 0))
    with pytest.raises(InvalidInputError):
        check_halfopen_segment(UNIT_DISK, (1.0, 0.0), (0.0, 0.0))
    with pytest.raises(InvalidInputError):
        check_halfopen_segment(UNIT_DISK, (0.0, 0.0), (2.0, 0.0))


def test_restriction_interior_convex_ball():
    ball = Ball((0.0, 0.0, 0.0), 1.0)
    ang = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    probes = 0.5 * np.column_stack([np.cos(ang), np.sin(ang)])
    rep = check_restriction_interior(ball, 0.0, probes)
    assert rep.consistent and len(rep.agree) == 12


def test_restriction_interior_saturn():
    shape = saturn_shape()
    rep = check_restriction_interior(shape, 0.0, [[1.5, 0.0], [0.5, 0.0]])
    assert rep.rhs_only == (0,)
    assert rep.agree == (1,)
    assert rep.lhs_only == ()


def test_saturn_mismatches_are_the_open_annulus():
    probes, radii = saturn_probes()
    rep = check_restriction_interior(saturn_shape(), 0.0, probes)
    expected = tuple(np.flatnonzero((radii > 1) & (radii < 2)))
    assert rep.rhs_only == expected


def test_saturn_unit_circle_is_a_mismatch_too():
    # on the unit circle (x, 0) is on the boundary of the ball part, so it is
    # not interior to the union, while it is interior to the radius-2 section
    rep = check_restriction_interior(saturn_shape(), 0.0, [[1.0, 0.0], [2.0, 0.0]])
    assert rep.rhs_only == (0,)
    assert rep.agree == (1,)


def test_distances_ball():
    assert distance(UNIT_DISK, (2.0, 0.0)) == pytest.approx(1.0)
    assert signed_distance(UNIT_DISK, (2.0, 0.0)) == pytest.approx(1.0)
    assert signed_distance(UNIT_DISK, (0.0, 0.0)) == pytest.approx(-1.0)
    assert signed_distance(UNIT_DISK, (0.0, 1.0)) == 0.0


def test_distance_to_polyhedron_numeric():
    tri = HalfspaceSet([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
    # nearest point to (2, 2) is (0.5, 0.5)
    assert distance(tri, (2.0, 2.0)) == pytest.approx(np.sqrt(4.5), abs=1e-6)
    # nearest point to (-1, -1) is the corner (0, 0)
    assert distance(tri, (-1.0, -1.0)) == pytest.approx(np.sqrt(2), abs=1e-6)


def test_distance_norms_on_box():
    box = Box([0.0, 0.0], [1.0, 1.0])
    x = (2.0, 3.0)
    assert distance(box, x, "l1") == pytest.approx(3.0)
    assert distance(box, x, "linf") == pytest.approx(2.0)
    assert distance(box, x, "l2") == pytest.approx(np.sqrt(5))


def test_segment_exit():
    z = segment_exit(UNIT_DISK, (0.0, 0.0), (3.0, 0.0))
    assert np.allclose(z, (1.0, 0.0))
    assert np.array_equal(segment_exit(UNIT_DISK, (0.0, 0.0), (0.5, 0.0)), (0.5, 0.0))
    z = segment_exit(Box([0, 0], [1, 1]), (0.5, 0.5), (0.5, 4.0))
    assert np.allclose(z, (0.5, 1.0))
    with pytest.raises(UnsupportedRepresentationError):
        segment_exit(saturn_shape(), (0, 0, 0), (3, 0, 0))


def test_union_interior_rule():
    u = UnionShape((Box([0.0], [1.0]), Box([2.0], [3.0])))
    assert classify(u, (0.5,)) is Region.INTERIOR
    assert classify(u, (1.0,)) is Region.BOUNDARY
    assert classify(u, (1.5,)) is Region.EXTERIOR


# --- properties -------------------------------------------------------------


@st.composite
def shapes(draw):
    m = draw(st.integers(1, 3))
    kind = draw(st.sampled_from(["ball", "box", "halfspaces"]))
    if kind == "ball":
        c = draw(st.lists(st.floats(-1, 1), min_size=m, max_size=m))
        return Ball(c, draw(st.floats(0.2, 2.0)), draw(st.sampled_from(["l1", "l2", "linf"])))
    if kind == "box":
        lo = draw(st.lists(st.floats(-2, -0.1), min_size=m, max_size=m))
        hi = draw(st.lists(st.floats(0.1, 2), min_size=m, max_size=m))
        return Box(lo, hi)
    k = draw(st.integers(1, 4))
    N = draw(st.lists(st.lists(st.floats(-1, 1), min_size=m, max_size=m), min_size=k,
                      max_size=k)).copy()
    N = [row if np.linalg.norm(row) > 0.1 else [1.0] + [0.0] * (m - 1) for row in N]
    b = draw(st.lists(st.floats(0.1, 2), min_size=k, max_size=k))
    return HalfspaceSet(N, b)


@given(shapes(), st.integers(0, 1000))
def test_classification_partitions_probes(shape, seed):
    X = np.random.default_rng(seed).uniform(-3, 3, (50, shape.dim))
    for x in X:
        flags = [shape.interior_contains(x), shape.boundary_contains(x),
                 not shape.contains(x)]
        assert sum(flags) == 1


@given(shapes(), st.integers(0, 1000))
def test_halfopen_segments_of_convex_shapes(shape, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-3, 3, (200, shape.dim))
    inner = [x for x in X if shape.interior_contains(x)]
    closed = [x for x in X if shape.contains(x)]
    for x, y in zip(inner[:5], closed[::-1][:5]):
        assert check_halfopen_segment(shape, x, y, grid=np.linspace(0.01, 1, 20))


@given(st.integers(0, 1000), st.floats(-1.5, 1.5))
def test_restriction_of_interior_lies_in_interior_of_restriction(seed, t):
    rng = np.random.default_rng(seed)
    shape = UnionShape((Ball(rng.uniform(-1, 1, 3), rng.uniform(0.3, 1.5)),
                        ProductShape(Ball(rng.uniform(-1, 1, 2), rng.uniform(0.3, 2)),
                                     Box([-0.2], [0.2]))))
    probes = rng.uniform(-3, 3, (100, 2))
    rep = check_restriction_interior(shape, t, probes)
    assert rep.lhs_only == ()


@given(shapes(), st.integers(0, 1000))
def test_signed_distance_sign_matches_region(shape, seed):
    X = np.random.default_rng(seed).uniform(-3, 3, (30, shape.dim))
    for x in X:
        sd = signed_distance(shape, x, "l2") if not isinstance(shape, Ball) \
            else signed_distance(shape, x, shape.norm)
        region = classify(shape, x)
        if region is Region.INTERIOR:
            assert sd < 0
        elif region is Region.EXTERIOR:
            assert sd > 0
