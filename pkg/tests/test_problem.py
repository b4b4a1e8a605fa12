import numpy as np
import pytest
from conftest import table_instance
from hypothesis import given
from hypothesis import strategies as st

from vecpen.cones import Orthant
from vecpen.convexity import check_A_convex, segment_closure
from vecpen.errors import (
    DimensionMismatchError,
    InvalidInputError,
    UnsupportedRepresentationError,
)
from vecpen.fixtures import identity_instance
from vecpen.io import dumps, instance_to_dict
from vecpen.problem import (
    BOUNDARY,
    Instance,
    ObjectiveSpec,
    PenalisationSpec,
    eval_objective,
    eval_penalisation,
    extended_objective,
    generate_random_instance,
    refine_boundary,
)
from vecpen.topology import Ball, Region, classify


def sqrt_point_instance(points):
    return Instance(points=points, feasible=range(len(points)),
                    objective=ObjectiveSpec("sqrt_example"),
                    penalisation=PenalisationSpec("neg_linf_norm"), cone=Orthant(2))


def test_identity_objective_value():
    inst = Instance(points=[[0.25]], feasible=[0], objective=ObjectiveSpec("identity"),
                    penalisation=PenalisationSpec("neg_sqrt"), cone=Orthant(1))
    assert eval_objective(inst, 0).tolist() == [0.25]


def test_sqrt_objective_branches():
    inst = sqrt_point_instance([[1.0, 1.0], [2.0, 2.0], [0.5, 0.08], [3.0, -12.0]])
    assert eval_objective(inst, 0).tolist() == [1.0, 1.0]
    # divided by |x|_inf = 2
    assert eval_objective(inst, 1).tolist() == [1.0, 1.0]
    assert np.allclose(eval_objective(inst, 2), [0.5, 0.2])
    assert np.allclose(eval_objective(inst, 3), [0.25, 0.5])


def test_penalisation_values():
    inst = identity_instance()
    k = int(np.flatnonzero(inst.points[:, 0] == 0.25)[0])
    assert eval_penalisation(inst, k) == pytest.approx(-0.5)
    single = Instance(points=[[0.04]], feasible=[0], objective=ObjectiveSpec("identity"),
                      penalisation=PenalisationSpec("neg_sqrt"), cone=Orthant(1))
    assert eval_penalisation(single, 0) == pytest.approx(-0.2)


def test_signed_distance_to_ball():
    inst = Instance(points=[[2.0, 0.0], [0.0, 0.0]], feasible=[1],
                    objective=ObjectiveSpec("identity"),
                    penalisation=PenalisationSpec("signed_distance"), cone=Orthant(2),
                    shape=Ball((0.0, 0.0), 1.0))
    assert eval_penalisation(inst, 0) == pytest.approx(1.0)
    assert eval_penalisation(inst, 1) == pytest.approx(-1.0)


def test_distance_is_zero_on_feasible_points():
    inst = generate_random_instance(5, (2, 2))
    assert all(eval_penalisation(inst, i) == 0.0 for i in inst.feasible)
    outside = [i for i in inst.all_indices if i not in set(inst.feasible)]
    assert all(eval_penalisation(inst, i) > 0 for i in outside)


def test_sample_distance_mode():
    inst = Instance(points=[[0.0], [1.0], [3.0]], feasible=[0, 1],
                    objective=ObjectiveSpec("identity"),
                    penalisation=PenalisationSpec("distance_to_s", mode="sample"), cone=Orthant(1))
    assert inst.nu_values.tolist() == [0.0, 0.0, 2.0]


def test_extended_objective():
    inst = identity_instance()
    k = int(np.flatnonzero(inst.points[:, 0] == 0.25)[0])
    assert np.allclose(extended_objective(inst, k), [0.25, -0.5])
    rnd = generate_random_instance(5, (2, 3))
    i = rnd.feasible[0]
    assert extended_objective(rnd, i).tolist() == eval_objective(rnd, i).tolist() + [0.0]
    tab = table_instance([[1.0, 2.0], [3.0, 4.0]], nu=[5.0, 6.0])
    assert extended_objective(tab, 1).tolist() == [3.0, 4.0, 6.0]


def test_index_errors():
    inst = identity_instance()
    with pytest.raises(InvalidInputError):
        eval_objective(inst, inst.n_points)
    with pytest.raises(InvalidInputError):
        eval_penalisation(inst, -1)


def test_invalid_instances():
    obj = ObjectiveSpec("identity")
    pen = PenalisationSpec("table", values=[0.0, 0.0])
    with pytest.raises(InvalidInputError):
        Instance(points=[[0.0], [1.0]], feasible=[], objective=obj, penalisation=pen,
                 cone=Orthant(1))
    with pytest.raises(InvalidInputError):
        Instance(points=[[0.0], [1.0]], feasible=[2], objective=obj, penalisation=pen,
                 cone=Orthant(1))
    with pytest.raises(InvalidInputError):
        Instance(points=[[0.0], [np.inf]], feasible=[0], objective=obj, penalisation=pen,
                 cone=Orthant(1))
    with pytest.raises(DimensionMismatchError):
        Instance(points=[[0.0], [1.0]], feasible=[0], objective=obj,
                 penalisation=PenalisationSpec("table", values=[0.0]), cone=Orthant(1))
    with pytest.raises(DimensionMismatchError):
        Instance(points=[[0.0], [1.0]], feasible=[0], objective=obj, penalisation=pen,
                 cone=Orthant(2))
    with pytest.raises(UnsupportedRepresentationError):
        Instance(points=[[0.0], [1.0]], feasible=[0], objective=obj,
                 penalisation=PenalisationSpec("signed_distance"), cone=Orthant(1))


def test_feasible_set_must_match_shape():
    with pytest.raises(InvalidInputError):
        Instance(points=[[0.0], [2.0]], feasible=[0, 1], objective=ObjectiveSpec("identity"),
                 penalisation=PenalisationSpec("distance_to_s"), cone=Orthant(1),
                 shape=Ball((0.0,), 1.0))


def test_given_tags_must_agree_with_shape():
    kw = dict(points=[[0.0], [1.0]], feasible=[0, 1], objective=ObjectiveSpec("identity"),
              penalisation=PenalisationSpec("distance_to_s"), cone=Orthant(1),
              shape=Ball((0.0,), 1.0))
    assert Instance(**kw).topo_tags == {0: "interior", 1: "boundary"}
    with pytest.raises(InvalidInputError):
        Instance(topo_tags={0: "boundary", 1: "boundary"}, **kw)


def test_unknown_specs_rejected():
    with pytest.raises(InvalidInputError):
        ObjectiveSpec("cubic")
    with pytest.raises(InvalidInputError):
        PenalisationSpec("barrier")
    with pytest.raises(InvalidInputError):
        generate_random_instance(0, profile="concave")


def test_generation_is_reproducible():
    a = generate_random_instance(1, (2, 3), profile="convex-quadratic", refine_rounds=2)
    b = generate_random_instance(1, (2, 3), profile="convex-quadratic", refine_rounds=2)
    assert dumps(instance_to_dict(a)) == dumps(instance_to_dict(b))


def test_convex_profile_passes_convexity():
    inst = generate_random_instance(3, (2, 2), profile="convex-linear")
    assert check_A_convex(inst, inst.all_indices).passed


def test_arbitrary_profile_can_fail_convexity():
    inst = generate_random_instance(3, (2, 2), profile="arbitrary-table")
    assert not check_A_convex(inst, inst.all_indices).passed


def test_generated_instances_sample_the_boundary():
    for kind in ("ball", "box"):
        inst = generate_random_instance(8, (2, 2), shape_kind=kind)
        assert len(inst.boundary_points) >= 10
        assert inst.s_closed


def test_refinement_reaches_segment_closure():
    base = generate_random_instance(2000, (2, 2), profile="convex-linear")
    refined = refine_boundary(base, rounds=3)
    assert refined.n_points >= base.n_points
    assert segment_closure(refined).ok
    new = range(base.n_points, refined.n_points)
    assert all(refined.topo_tags[i] == BOUNDARY for i in new)


def test_refinement_needs_table_function():
    inst = generate_random_instance(4, (2, 2), profile="convex-quadratic")
    with pytest.raises(InvalidInputError):
        refine_boundary(inst)


@given(st.integers(0, 10_000), st.sampled_from(["ball", "box"]), st.integers(1, 3))
def test_tags_agree_with_classification(seed, kind, dim_x):
    inst = generate_random_instance(seed, (dim_x, 2), sizes=(5, 6), shape_kind=kind)
    for i in inst.feasible:
        assert inst.topo_tags[i] == classify(inst.shape, inst.points[i]).value
    for i in set(inst.all_indices) - set(inst.feasible):
        assert classify(inst.shape, inst.points[i]) is Region.EXTERIOR
