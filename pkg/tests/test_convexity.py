import numpy as np
import pytest
from conftest import table_instance
from hypothesis import given
from hypothesis import strategies as st

from vecpen.cones import Orthant, epsilon_dilation
from vecpen.convexity import (
    PASSED,
    REFUTED,
    check_A_convex,
    check_cone_monotonicity,
    check_convexity_implication,
    check_weak_A_quasiconvex,
    relation_holds,
    segment_closure,
)
from vecpen.errors import InconclusiveError, InvalidInputError
from vecpen.problem import Instance, ObjectiveSpec, PenalisationSpec, generate_random_instance
from vecpen.topology import Box

LINE = np.linspace(-1.0, 1.0, 21).reshape(-1, 1)


def line_instance(columns):
    return table_instance(np.column_stack(columns), points=LINE)


def reverify_convexity(inst, verdict, cone=None):
    """A refutation witness must break the inequality it names."""
    w = verdict.witness
    F = inst.f_values
    lam = w["lambda"]
    assert np.allclose(inst.points[w["z"]],
                       lam * inst.points[w["x1"]] + (1 - lam) * inst.points[w["x2"]])
    rhs = lam * F[w["x1"]] + (1 - lam) * F[w["x2"]]
    mag = max(np.linalg.norm(F[w["x1"]]), np.linalg.norm(F[w["x2"]]))
    return not relation_holds(cone or inst.cone, verdict.A, F[w["z"]], rhs, inst.tol, [mag])[0]


def test_linear_objective_is_convex():
    x = LINE[:, 0]
    v = check_A_convex(line_instance([2 * x + 1, -x]))
    assert v.status == PASSED and v.tested > 0


def test_quadratic_objective_is_convex():
    x = LINE[:, 0]
    assert check_A_convex(line_instance([x ** 2, (x - 0.5) ** 2])).passed


def test_concave_component_is_refuted():
    x = LINE[:, 0]
    inst = line_instance([x, -x ** 2])
    v = check_A_convex(inst)
    assert v.status == REFUTED
    assert reverify_convexity(inst, v)


def test_strict_relation_kinds():
    x = LINE[:, 0]
    linear = line_instance([x])
    assert check_A_convex(linear, A="C").passed
    assert not check_A_convex(linear, A="int C").passed
    assert not check_A_convex(linear, A="C\\{0}").passed
    assert check_A_convex(line_instance([x ** 2]), A="int C").passed


def test_lambda_grid_snaps_to_samples():
    x = LINE[:, 0]
    inst = line_instance([x ** 2])
    v = check_A_convex(inst, pair_samples=[(0, 20)], lambda_grid=[0.5, 0.333])
    assert v.tested == 1 and v.skipped == 1
    with pytest.raises(InvalidInputError):
        check_A_convex(inst, lambda_grid=[0.0, 0.5])


def test_inconclusive_without_segments():
    inst = table_instance([[0.0], [1.0]])
    with pytest.raises(InconclusiveError):
        check_A_convex(inst)
    with pytest.raises(InvalidInputError):
        check_A_convex(table_instance([[0.0], [1.0], [2.0]]), A="cone")


def test_monotone_scalar_is_weakly_quasiconvex():
    v = check_weak_A_quasiconvex(table_instance([[0.0], [1.0], [2.0], [3.0], [4.0]]))
    assert v.passed and v.x1_admissible


def test_two_valley_table_is_refuted():
    F = np.array([[3.0], [1.0], [3.0], [0.0], [3.0]])
    inst = table_instance(F)
    v = check_weak_A_quasiconvex(inst)
    assert v.status == REFUTED
    x1, x2 = v.witness["x1"], v.witness["x2"]
    assert F[x1, 0] <= F[x2, 0]
    # both neighbours of x2 sit strictly above it, so no anchor exists
    assert F[x2 - 1, 0] > F[x2, 0] and F[x2 + 1, 0] > F[x2, 0]


def test_quasiconvex_needs_an_ordered_pair():
    inst = table_instance([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(InconclusiveError):
        check_weak_A_quasiconvex(inst, A="int C")


def test_convexity_implies_weak_quasiconvexity():
    inst = generate_random_instance(3, (2, 2), profile="convex-linear")
    res = check_convexity_implication(inst, inst.all_indices)
    assert res.holds and res.convex.passed and res.quasi.x1_admissible


def test_implication_with_refuted_premise():
    x = LINE[:, 0]
    res = check_convexity_implication(line_instance([x, -x ** 2]))
    assert res.holds and res.reason == "premise refuted"


def test_cone_monotonicity():
    inst = generate_random_instance(4, (2, 2), profile="convex-quadratic")
    res = check_cone_monotonicity(inst, Orthant(2), epsilon_dilation(Orthant(2), 0.5),
                                  inst.all_indices)
    assert res.holds and res.quasi.passed


def test_segment_closure_on_disk(disk_instance):
    rep = segment_closure(disk_instance)
    assert rep.ok and rep.checked == len(disk_instance.interior_points)


def test_segment_closure_failure():
    inst = Instance(points=[[0.0], [2.0], [3.0]], feasible=[1, 2],
                    objective=ObjectiveSpec("identity"),
                    penalisation=PenalisationSpec("distance_to_s"), cone=Orthant(1),
                    shape=Box([1.5], [3.0]))
    rep = segment_closure(inst)
    assert not rep.ok
    assert {(x, y) for x, _, y in rep.failures} == {(1, 0)}


# --- properties -------------------------------------------------------------


@given(st.integers(0, 10_000), st.sampled_from(["convex-linear", "convex-quadratic"]))
def test_convex_profiles_pass_and_imply_quasiconvexity(seed, profile):
    inst = generate_random_instance(seed, (1, 2), sizes=(15, 4), profile=profile)
    res = check_convexity_implication(inst, inst.all_indices)
    assert res.convex.passed
    assert res.holds


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=12), st.integers(0, 100))
def test_refutations_reverify(ys, shift):
    F = np.array(ys).reshape(-1, 1)
    pts = np.arange(len(ys), dtype=float).reshape(-1, 1) + shift
    inst = table_instance(np.column_stack([F, -F]), points=pts)
    v = check_A_convex(inst)
    if not v.passed:
        assert reverify_convexity(inst, v)
