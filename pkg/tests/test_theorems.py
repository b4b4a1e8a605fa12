import numpy as np
import pytest
from conftest import table_instance

from vecpen.cones import HalfspacePoly, Orthant, epsilon_dilation
from vecpen.errors import InvalidInputError
from vecpen.fixtures import identity_instance
from vecpen.problem import generate_random_instance
from vecpen.theorems import (
    SKIPPED,
    VERIFIED,
    VIOLATED,
    check_claimed_sets,
    default_lift_fixtures,
    recheck,
    reproduce_paper_example,
    run_corpus,
    run_instance,
    set_cache,
    verify_convex_barrier,
    verify_gain_mechanism,
    verify_lifted_cone_lemma,
    verify_loss_mechanism,
    verify_main_decomposition,
    verify_subset_theorem,
    worker_count,
)


@pytest.fixture(scope="module")
def convex_instance():
    return generate_random_instance(2000, (2, 2), profile="convex-linear", refine_rounds=3)


def test_subset_theorem(disk_instance):
    v = verify_subset_theorem(disk_instance)
    assert v.verified and v.details["chain_length"] == 2
    middle = sorted(set(disk_instance.feasible) | {0})
    assert verify_subset_theorem(disk_instance, [middle]).verified


def test_subset_theorem_rejects_bad_chain(disk_instance):
    with pytest.raises(InvalidInputError):
        verify_subset_theorem(disk_instance, [disk_instance.feasible[1:]])


def test_convex_barrier_verified(convex_instance):
    v = verify_convex_barrier(convex_instance)
    assert v.conclusion == VERIFIED
    assert "barrier:PS-PD<=BD" in v.details["displays"]


def test_convex_barrier_needs_tags():
    v = verify_convex_barrier(table_instance([[0.0], [1.0], [2.0]]))
    assert v.conclusion == SKIPPED
    assert v.hypotheses == (("topo_tags", "fails"),)


def test_convex_barrier_skips_nonconvex_objective():
    inst = generate_random_instance(0, (2, 2), profile="arbitrary-table")
    v = verify_convex_barrier(inst)
    assert v.conclusion == SKIPPED
    assert dict(v.hypotheses)["C_convex_on_D"] == "fails"


def test_loss_mechanism_on_identity_example():
    inst = identity_instance()
    v = verify_loss_mechanism(inst)
    assert v.verified
    zero = int(np.flatnonzero(inst.points[:, 0] == 0)[0])
    assert zero in v.details["difference"]
    nu = inst.nu_values
    assert all(nu[y] < nu[x] for x, y in v.details["witnesses"].items())


def test_gain_mechanism_crafted_example():
    # point 0 is dominated in f by point 1, but point 1 pays a larger penalty
    inst = table_instance([[1.0], [0.0], [2.0]], nu=[0.0, 1.0, 5.0])
    v = verify_gain_mechanism(inst)
    assert v.verified
    assert v.details["gained"] == {0: {"y": 1, "member": 0}}
    assert 0 in set_cache(inst).result("PXS") and 0 not in set_cache(inst).result("PS")


def test_main_decomposition_on_convex_instance(convex_instance):
    v = verify_main_decomposition(convex_instance)
    assert v.verified and v.details["skipped"] == []
    assert "main:PS==(S&PD)|(BD&PXD)" in v.details["displays"]


def test_main_decomposition_skips_without_hypotheses():
    v = verify_main_decomposition(table_instance([[1.0], [0.0], [2.0]], nu=[0.0, 1.0, 5.0]))
    assert v.conclusion == SKIPPED
    assert v.details["skipped"] == ["inclusions", "A3_equality", "equalities"]


def test_recheck_confirms_real_counterexamples():
    inst = generate_random_instance(0, (2, 2), profile="arbitrary-table")
    sets = set_cache(inst).sets()
    extra = sorted((sets["PS"] - sets["PD"]) - sets["BD"])
    assert extra
    bundle = {"display": "main:PS-PD<=BD", "element": extra[0], "side": "lhs_only"}
    assert recheck(inst, bundle)
    assert not recheck(inst, dict(bundle, element=sorted(sets["BD"])[0]))
    with pytest.raises(InvalidInputError):
        recheck(inst, {"display": "nonsense", "element": 0, "side": "lhs_only"})


def test_claimed_sets_consistency(convex_instance):
    sets = set_cache(convex_instance).sets()
    good = check_claimed_sets(convex_instance, {"PS": sets["PS"]})
    assert all(v.verified for v in good)
    bad = check_claimed_sets(convex_instance, {"PS": sets["PS"] - {min(sets["PS"])}})
    assert bad[-1].conclusion == VIOLATED and bad[-1].counterexample["sets"] == ["PS"]
    with pytest.raises(InvalidInputError):
        check_claimed_sets(convex_instance, {"PQ": []})


def test_lifted_cone_lemma_default_fixtures():
    v = verify_lifted_cone_lemma(default_lift_fixtures(30), n_samples=200)
    assert v.verified and v.details["fixtures"] == 30


def test_lifted_cone_lemma_invalid_lift_point():
    H = epsilon_dilation(Orthant(2), 1.0)
    v = verify_lifted_cone_lemma([(Orthant(2), H, (-1.0, -1.0))], n_samples=50)
    assert v.violated and v.counterexample["part"] == "construction"


def test_lifted_cone_lemma_gates_on_dilation():
    v = verify_lifted_cone_lemma([(Orthant(2), HalfspacePoly([[1.0, 0.0]]), None)])
    assert v.conclusion == SKIPPED


@pytest.mark.parametrize("name", ["halfspace", "bp", "sqrt", "identity", "saturn"])
def test_worked_examples_reproduce(name):
    v = reproduce_paper_example(name)
    assert v.verified, v.counterexample


def test_unknown_example():
    with pytest.raises(InvalidInputError):
        reproduce_paper_example("torus")


def test_run_instance_rejects_unknown_theorem(disk_instance):
    with pytest.raises(InvalidInputError):
        run_instance(disk_instance, ["subset", "fermat"])


def test_run_corpus_keeps_input_order():
    insts = [generate_random_instance(s, (1, 2), sizes=(6, 4)).replace(name=f"r{s}")
             for s in range(6)]
    out = run_corpus(insts, ["subset", "loss"], threads=3)
    assert [name for name, _ in out] == [f"r{s}" for s in range(6)]
    assert all(len(v) == 2 for _, v in out)
    serial = run_corpus(insts, ["subset", "loss"], threads=1)
    assert [[v.to_dict() for v in vs] for _, vs in out] == \
        [[v.to_dict() for v in vs] for _, vs in serial]


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv("VECPEN_THREADS", "7")
    assert worker_count() == 7
    monkeypatch.setenv("VECPEN_THREADS", "lots")
    assert worker_count(3) == 3
