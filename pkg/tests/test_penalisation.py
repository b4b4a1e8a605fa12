import numpy as np
import pytest
from conftest import table_instance
from hypothesis import given
from hypothesis import strategies as st

from vecpen.cones import Orthant
from vecpen.efficiency import level_set
from vecpen.errors import InvalidInputError
from vecpen.fixtures import identity_instance
from vecpen.penalisation import (
    FAILS,
    HOLDS,
    INAPPLICABLE,
    SKIPPED,
    check_A1,
    check_A2,
    check_A3,
    check_derived_consequences,
    penalisation_report,
)
from vecpen.problem import Instance, ObjectiveSpec, PenalisationSpec, generate_random_instance
from vecpen.topology import Ball, signed_distance


def ball_instance(kind="signed_distance", seed=0):
    return generate_random_instance(seed, (2, 2), sizes=(9, 24),
                                    penalisation=PenalisationSpec(kind))


def reverify(inst, verdict, U=None):
    """A failure witness must reproduce through level_set."""
    w = verdict.witness
    U = inst.all_indices if U is None else U
    lev = set(level_set(inst.nu_values, U, w["level_set"], inst.nu_values[w["x0"]]))
    return (w["element"] in lev) == (w.get("side", "extra") == "extra")


def test_signed_distance_satisfies_a1_and_a2():
    inst = ball_instance()
    assert check_A1(inst).status == HOLDS
    assert check_A2(inst).status == HOLDS


def test_neg_sqrt_fails_a1_on_wider_domain():
    inst = identity_instance(d_max=2.0)
    v = check_A1(inst)
    assert v.status == FAILS
    assert inst.points[v.witness["element"], 0] > 1.0
    assert reverify(inst, v)


def test_distance_satisfies_a1_not_a2():
    inst = ball_instance("distance_to_s")
    assert check_A1(inst).holds
    v = check_A2(inst)
    assert v.status == FAILS and v.witness["element"] in set(inst.interior_points)
    assert reverify(inst, v)


def test_boundary_only_sample_satisfies_a2_with_distance():
    ang = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    circle = np.column_stack([np.cos(ang), np.sin(ang)])
    pts = np.vstack([circle, 2 * circle])
    inst = Instance(points=pts, feasible=range(12), objective=ObjectiveSpec("identity"),
                    penalisation=PenalisationSpec("distance_to_s"), cone=Orthant(2),
                    shape=Ball((0.0, 0.0), 1.0))
    assert check_A2(inst).holds


def test_a3_verdicts():
    assert check_A3(ball_instance("distance_to_s")).holds
    v = check_A3(ball_instance("signed_distance"))
    assert v.status == FAILS
    assert reverify(ball_instance("signed_distance"), v)


def test_constant_penalisation_and_a3():
    inst = table_instance(np.zeros((4, 1)), nu=np.zeros(4), feasible=[0, 1])
    assert check_A3(inst).status == FAILS
    assert check_A3(inst, U=[0, 1]).holds


def test_a1_needs_boundary_points():
    inst = table_instance(np.zeros((3, 1)))
    assert check_A1(inst).status == INAPPLICABLE
    assert check_A2(inst).status == INAPPLICABLE


def test_universe_must_contain_s():
    inst = ball_instance()
    with pytest.raises(InvalidInputError):
        check_A3(inst, U=inst.feasible[1:])


def test_consequences_for_distance():
    inst = ball_instance("distance_to_s")
    d = check_derived_consequences(inst)
    assert d["strict_empty"].holds
    assert d["strict_in_interior"].holds
    assert d["strict_is_interior"].status == SKIPPED


def test_consequences_for_signed_distance():
    inst = ball_instance("signed_distance")
    d = check_derived_consequences(inst)
    assert d["strict_is_interior"].holds
    assert d["strict_empty"].status == SKIPPED
    lev = set(level_set(inst.nu_values, None, "<", 0.0))
    assert lev == set(inst.interior_points)


def test_kinked_penalisation_is_a1_only():
    base = ball_instance("signed_distance")
    sd = np.array([signed_distance(base.shape, x) for x in base.points])
    sd[np.abs(sd) <= 1e-9] = 0.0
    # zero on a band inside the boundary, negative deeper inside
    nu = np.maximum(sd, 0.0) - np.maximum(-sd - 0.3, 0.0)
    inst = base.replace(penalisation=PenalisationSpec("table", values=nu))
    rep = penalisation_report(inst)
    assert rep.a1.holds and rep.a2.status == FAILS and rep.a3.status == FAILS
    assert rep.derived["strict_in_interior"].holds
    lev = set(level_set(nu, None, "<", 0.0))
    assert lev and lev < set(inst.interior_points)


def test_report_dictionary():
    d = penalisation_report(ball_instance("distance_to_s")).to_dict()
    assert d["A3"] == {"status": "holds"}
    assert d["A2"]["status"] == "fails" and "witness" in d["A2"]


@given(st.integers(0, 10_000), st.sampled_from(["ball", "box"]))
def test_a3_and_closedness_imply_a1(seed, kind):
    inst = generate_random_instance(seed, (2, 2), sizes=(7, 10), shape_kind=kind)
    assert inst.s_closed
    assert check_A3(inst).holds
    assert check_A1(inst).holds


@given(st.integers(0, 10_000), st.sampled_from(["ball", "box"]), st.integers(1, 3))
def test_signed_distance_consequences(seed, kind, dim_x):
    inst = generate_random_instance(seed, (dim_x, 2), sizes=(5, 8), shape_kind=kind,
                                    penalisation=PenalisationSpec("signed_distance"))
    rep = penalisation_report(inst)
    assert rep.a1.holds and rep.a2.holds
    assert rep.derived["strict_is_interior"].holds
