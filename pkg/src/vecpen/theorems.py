"""Executable checks of the efficiency and penalisation theorems on sampled instances.

Every check returns a :class:`TheoremVerdict`. Hypotheses are evaluated first;
if one does not hold the conclusion is ``skipped_hypothesis_failed``.
Set relations are evaluated on index sets computed by the efficiency engine,
with the product-space family obtained by lifting the base family (matched
families), so every member of the lifted family has a base member as its
zero-section.

Named sets used in displays:

* ``S``, ``INT``, ``BD``: feasible, interior-tagged and boundary-tagged points;
* ``PS``, ``PD``: Henig-proper efficient points of ``f`` over ``S`` and ``D``;
* ``PXS``, ``PXD``: the same for the extended objective ``(f, nu)``.
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cones import (
    DEFAULT_TOL,
    BishopPhelps,
    Cone,
    HalfspacePoly,
    Lifted,
    Orthant,
    canonical_interior_point,
    contains_many,
    epsilon_dilation,
    interior_many,
    is_dilating_for,
    lift_cone,
    product_with_ray,
    ray_samples,
    restrict_to_zero,
)
from .convexity import check_A_convex, segment_closure
from .efficiency import henig_peff_set, pairwise_differences
from .errors import InconclusiveError, InvalidInputError, InvalidLiftError
from .penalisation import check_A1, check_A3

VERIFIED = "verified"
VIOLATED = "violated"
SKIPPED = "skipped_hypothesis_failed"

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TheoremVerdict:
    """Outcome of one theorem check.

    ``hypotheses`` is a tuple of ``(name, status)`` pairs. ``counterexample``
    names the failing display and element so that :func:`recheck` can
    confirm it against freshly computed sets.
    """

    theorem_id: str
    hypotheses: tuple
    conclusion: str
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.conclusion == VERIFIED

    @property
    def violated(self) -> bool:
        return self.conclusion == VIOLATED

    @property
    def hypotheses_hold(self) -> bool:
        return all(status == HOLDS for _, status in self.hypotheses)

    @property
    def build_breaking(self) -> bool:
        """A violated display is only ever checked once its own gates hold."""
        return self.violated

    def to_dict(self) -> dict:
        out = {"theorem": self.theorem_id,
               "hypotheses": [[n, s] for n, s in self.hypotheses],
               "conclusion": self.conclusion}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.details:
            out["details"] = self.details
        return out


# ---------------------------------------------------------------------------
# Set cache
# ---------------------------------------------------------------------------


class SetCache:
    """Lazily computed named index sets of one instance."""

    def __init__(self, inst):
        self.inst = inst
        self._results = {}
        self._lock = threading.Lock()

    def result(self, name: str):
        with self._lock:
            if name not in self._results:
                self._results[name] = self._compute(name)
            return self._results[name]

    def _compute(self, name: str):
        inst = self.inst
        if name == "PS":
            return henig_peff_set(inst, inst.feasible, inst.cone, inst.family, inst.tol)
        if name == "PD":
            return henig_peff_set(inst, None, inst.cone, inst.family, inst.tol)
        if name == "PXS":
            return henig_peff_set(inst, inst.feasible, inst.extended_cone, inst.lifted_family,
                                  inst.tol, extended=True)
        if name == "PXD":
            return henig_peff_set(inst, None, inst.extended_cone, inst.lifted_family,
                                  inst.tol, extended=True)
        raise KeyError(name)

    def sets(self) -> dict:
        inst = self.inst
        out = {"S": frozenset(inst.feasible), "INT": frozenset(inst.interior_points),
               "BD": frozenset(inst.boundary_points), "D": frozenset(inst.all_indices)}
        for name in ("PS", "PD", "PXS", "PXD"):
            out[name] = self.result(name).as_set()
        return out


_CACHES: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
_CACHE_LOCK = threading.Lock()


def set_cache(inst) -> SetCache:
    with _CACHE_LOCK:
        cache = _CACHES.get(inst)
        if cache is None:
            cache = _CACHES[inst] = SetCache(inst)
        return cache


# ---------------------------------------------------------------------------
# Displays
# ---------------------------------------------------------------------------

# name -> (lhs, rhs, relation) over the named sets; relation is "<=" or "=="
DISPLAYS = {
    "subset:S&PD<=PU": None,  # ground set dependent, handled in verify_subset_theorem
    "barrier:INT&PS<=INT&PD": (lambda s: s["INT"] & s["PS"], lambda s: s["INT"] & s["PD"], "<="),
    "barrier:S&PD<=PS": (lambda s: s["S"] & s["PD"], lambda s: s["PS"], "<="),
    "barrier:PS<=(INT&PD)|BD": (lambda s: s["PS"], lambda s: (s["INT"] & s["PD"]) | s["BD"], "<="),
    "barrier:PS-PD<=BD": (lambda s: s["PS"] - s["PD"], lambda s: s["BD"], "<="),
    "barrier:open:PS==S&PD": (lambda s: s["PS"], lambda s: s["S"] & s["PD"], "=="),
    "main:PS>=(INT&PD)|(BD&PXD)": (lambda s: (s["INT"] & s["PD"]) | (s["BD"] & s["PXD"]),
                                   lambda s: s["PS"], "<="),
    "main:PS>=(S&PD)|(BD&PXD)": (lambda s: (s["S"] & s["PD"]) | (s["BD"] & s["PXD"]),
                                 lambda s: s["PS"], "<="),
    "main:PS==S&PXD": (lambda s: s["PS"], lambda s: s["S"] & s["PXD"], "=="),
    "main:PS-PD<=BD": (lambda s: s["PS"] - s["PD"], lambda s: s["BD"], "<="),
    "main:PS==(INT&PD)|(BD&PXD)": (lambda s: s["PS"],
                                   lambda s: (s["INT"] & s["PD"]) | (s["BD"] & s["PXD"]), "=="),
    "main:PS==(S&PD)|(BD&PXD)": (lambda s: s["PS"],
                                 lambda s: (s["S"] & s["PD"]) | (s["BD"] & s["PXD"]), "=="),
}


def _evaluate(name: str, sets: dict) -> dict | None:
    """Counterexample bundle for a display, or None when it holds."""
    lhs_fn, rhs_fn, rel = DISPLAYS[name]
    lhs, rhs = lhs_fn(sets), rhs_fn(sets)
    extra = sorted(lhs - rhs)
    if extra:
        return {"display": name, "element": int(extra[0]), "side": "lhs_only",
                "count": len(extra)}
    if rel == "==":
        missing = sorted(rhs - lhs)
        if missing:
            return {"display": name, "element": int(missing[0]), "side": "rhs_only",
                    "count": len(missing)}
    return None


def recheck(inst, bundle: dict) -> bool:
    """Re-derive a counterexample from freshly computed sets (no cache)."""
    if bundle.get("display") not in DISPLAYS or DISPLAYS[bundle["display"]] is None:
        raise InvalidInputError("bundle does not name a set display")
    fresh = SetCache(inst).sets()
    lhs_fn, rhs_fn, _ = DISPLAYS[bundle["display"]]
    lhs, rhs = lhs_fn(fresh), rhs_fn(fresh)
    i = bundle["element"]
    if bundle["side"] == "lhs_only":
        return i in lhs and i not in rhs
    return i in rhs and i not in lhs


def _check_displays(theorem_id, hypotheses, names, sets, details=None) -> TheoremVerdict:
    details = dict(details or {})
    details["displays"] = list(names)
    for name in names:
        bundle = _evaluate(name, sets)
        if bundle is not None:
            return TheoremVerdict(theorem_id, tuple(hypotheses), VIOLATED, bundle, details)
    return TheoremVerdict(theorem_id, tuple(hypotheses), VERIFIED, None, details)


def _gate(theorem_id, hypotheses, details=None):
    if all(s == HOLDS for _, s in hypotheses):
        return None
    return TheoremVerdict(theorem_id, tuple(hypotheses), SKIPPED, None, dict(details or {}))


# ---------------------------------------------------------------------------
# Hypothesis helpers
# ---------------------------------------------------------------------------


def matched_families(inst) -> str:
    """Each lifted member's zero-section is the base member it was lifted from."""
    base = {id(H): H for H in inst.family.cones}
    for _, L in inst.lifted_family.members:
        if not isinstance(L, Lifted) or restrict_to_zero(L) not in set(base.values()):
            return FAILS
    return HOLDS


def convexity_status(inst, subset=None) -> str:
    """C-convexity of ``f`` on the samples of ``D`` (or ``subset``)."""
    try:
        v = check_A_convex(inst, inst.all_indices if subset is None else subset, "C")
    except InconclusiveError:
        return INCONCLUSIVE
    return HOLDS if v.passed else FAILS


def _tags_status(inst) -> str:
    return HOLDS if inst.topo_tags is not None else FAILS


def _closure_status(inst) -> str:
    if inst.topo_tags is None:
        return FAILS
    return HOLDS if segment_closure(inst).ok else FAILS


# ---------------------------------------------------------------------------
# Efficiency theorems
# ---------------------------------------------------------------------------


def verify_subset_theorem(inst, U_chain=None) -> TheoremVerdict:
    """``S & PEff(f, D) <= PEff(f, U)`` for every ``U`` with ``S <= U <= D``.

    Defaults to ``U in {S, D}``. A ``U`` outside that range raises
    InvalidInputError.
    """
    tid = "subset_theorem"
    S = frozenset(inst.feasible)
    chain = [inst.feasible, inst.all_indices] if U_chain is None else list(U_chain)
    Us = []
    for U in chain:
        U = frozenset(int(i) for i in U)
        if not S <= U or any(i < 0 or i >= inst.n_points for i in U):
            raise InvalidInputError("every U must satisfy S <= U <= D")
        Us.append(U)
    cache = set_cache(inst)
    lhs = S & cache.result("PD").as_set()
    hyp = (("S<=U<=D", HOLDS),)
    for k, U in enumerate(Us):
        PU = henig_peff_set(inst, sorted(U), inst.cone, inst.family, inst.tol).as_set()
        missing = sorted(lhs - PU)
        if missing:
            bundle = {"display": "subset:S&PD<=PU", "element": int(missing[0]),
                      "side": "lhs_only", "count": len(missing), "chain_index": k}
            return TheoremVerdict(tid, hyp, VIOLATED, bundle, {"chain_length": len(Us)})
    return TheoremVerdict(tid, hyp, VERIFIED, None, {"chain_length": len(Us)})


def verify_convex_barrier(inst) -> TheoremVerdict:
    """Interior proper efficiency over ``S`` transfers to ``D`` for convex ``f``.

    Gates: topological tags, sampled C-convexity of ``f`` on ``D`` and
    sampled segment closure (see :func:`vecpen.convexity.segment_closure`).
    With no boundary-tagged point ``S`` is treated as open and the equality
    ``PS == S & PD`` is checked as well.
    """
    tid = "convex_barrier"
    hyp = [("topo_tags", _tags_status(inst))]
    if hyp[0][1] == HOLDS:
        hyp.append(("C_convex_on_D", convexity_status(inst)))
        hyp.append(("segment_closure", _closure_status(inst)))
    early = _gate(tid, hyp)
    if early:
        return early
    names = ["barrier:INT&PS<=INT&PD", "barrier:S&PD<=PS", "barrier:PS<=(INT&PD)|BD",
             "barrier:PS-PD<=BD"]
    if not inst.boundary_points:
        names.append("barrier:open:PS==S&PD")
    return _check_displays(tid, hyp, names, set_cache(inst).sets())


# ---------------------------------------------------------------------------
# Penalisation mechanisms
# ---------------------------------------------------------------------------


def verify_loss_mechanism(inst) -> TheoremVerdict:
    """Every point of ``PS - PXS`` has a feasible ``y`` with smaller ``nu``.

    The witness is the dominator found by the efficiency engine in the lifted
    problem when it qualifies, otherwise the feasible minimiser of ``nu``.
    """
    tid = "loss_mechanism"
    hyp = (("matched_families", matched_families(inst)),)
    early = _gate(tid, hyp)
    if early:
        return early
    cache = set_cache(inst)
    ps, pxs = cache.result("PS"), cache.result("PXS")
    nu = inst.nu_values
    feas = np.array(inst.feasible)
    best = int(feas[np.argmin(nu[feas])])
    witnesses = {}
    for x in sorted(ps.as_set() - pxs.as_set()):
        w = pxs.witnesses.get(x)
        y = w.by if w is not None and nu[w.by] < nu[x] else best
        if not nu[y] < nu[x]:
            bundle = {"display": "loss:witness", "element": int(x), "side": "lhs_only"}
            return TheoremVerdict(tid, hyp, VIOLATED, bundle, {"difference": len(witnesses)})
        witnesses[int(x)] = int(y)
    return TheoremVerdict(tid, hyp, VERIFIED, None,
                          {"difference": sorted(witnesses), "witnesses": witnesses})


def _dominators(inst, x: int, H: Cone, ground: np.ndarray) -> np.ndarray:
    D = pairwise_differences(inst.f_values, np.array([x]), ground, inst.tol)[0]
    return ground[contains_many(H, D, inst.tol) & np.any(D != 0, axis=1)]


def verify_gain_mechanism(inst) -> TheoremVerdict:
    """Points gained by penalisation are dominated in ``f`` by feasible points with larger ``nu``.

    Checked in two ways:

    * union level: for each ``x`` in ``PXS - PS`` the base member ``H``
      matched to ``x``'s certifying lifted member yields ``y`` in ``S`` with
      ``f(y) <=_H f(x)``, ``f(y) != f(x)`` and ``nu(y) > nu(x)``;
    * family-relative equality: for each matched pair ``(H, H_lift)``,
      ``Eff(f_ext, S, H_lift) - Eff(f, S, H)`` equals the set of
      ``x`` in ``Eff(f_ext, S, H_lift)`` with such a ``y`` for ``H``.

    ``details["union_converse"]`` reports whether the union-level converse
    (every ``x`` in ``PXS`` with a witness for some member lies outside
    ``PS``) also holds on this instance; it is informational only.
    """
    tid = "gain_mechanism"
    hyp = (("matched_families", matched_families(inst)),)
    early = _gate(tid, hyp)
    if early:
        return early
    cache = set_cache(inst)
    ps, pxs = cache.result("PS"), cache.result("PXS")
    nu = inst.nu_values
    feas = np.array(inst.feasible)
    lifted = inst.lifted_family.members
    base = inst.family.members
    section_of = {}
    for k, (_, L) in enumerate(lifted):
        H = restrict_to_zero(L)
        section_of[k] = next(j for j, (_, B) in enumerate(base) if B == H)

    @lru_cache(maxsize=None)
    def witness(x, j):
        ys = _dominators(inst, x, base[j][1], feas)
        ys = ys[nu[ys] > nu[x]]
        return int(ys[0]) if len(ys) else None

    gained = {}
    for x in sorted(pxs.as_set() - ps.as_set()):
        j = section_of[pxs.certificates[x].member]
        y = witness(x, j)
        if y is None:
            bundle = {"display": "gain:witness", "element": int(x), "side": "lhs_only",
                      "member": j}
            return TheoremVerdict(tid, hyp, VIOLATED, bundle)
        gained[int(x)] = {"y": y, "member": j}

    base_eff = {j: frozenset(e) for j, _, e in ps.per_member}
    lift_eff = {k: frozenset(e) for k, _, e in pxs.per_member}
    for k, j in section_of.items():
        diff = lift_eff[k] - base_eff[j]
        char = frozenset(x for x in lift_eff[k] if witness(x, j) is not None)
        if diff != char:
            bad = min(diff ^ char)
            bundle = {"display": "gain:family_relative", "element": int(bad),
                      "side": "lhs_only" if bad in diff else "rhs_only", "member": k}
            return TheoremVerdict(tid, hyp, VIOLATED, bundle, {"gained": gained})

    converse_bad = [x for x in sorted(pxs.as_set() & ps.as_set())
                    if any(witness(x, j) is not None for j in range(len(base)))]
    details = {"gained": gained, "family_relative": True,
               "union_converse": not converse_bad}
    if converse_bad:
        details["union_converse_counterexample"] = int(converse_bad[0])
    return TheoremVerdict(tid, hyp, VERIFIED, None, details)


# ---------------------------------------------------------------------------
# Lifted cones
# ---------------------------------------------------------------------------


def default_lift_fixtures(count: int = 30, seed: int = 0) -> list:
    """``(C, H, h)`` triples: orthants with epsilon dilations, a polyhedral cone
    and Bishop-Phelps cones, with canonical and random interior ``h``."""
    rng = np.random.default_rng(seed)
    fixtures = [(Orthant(2), BishopPhelps((1.0, 1.0), np.sqrt(2) / 2 * 0.999), None)]
    bp3 = BishopPhelps((1.0, 1.0, 1.0), np.sqrt(3) / 2)
    fixtures.append((Orthant(3), bp3, None))
    fixtures.append((Orthant(2), BishopPhelps((1.0, 1.0), np.sqrt(3) / 2 * 0.8), None))
    wedge = HalfspacePoly([[2.0, -1.0], [-1.0, 2.0]])
    fixtures.append((wedge, epsilon_dilation(wedge, 0.5), None))
    eps = (1e-3, 1e-1, 1.0, 10.0)
    m = 1
    while len(fixtures) < count:
        C = Orthant(m)
        H = epsilon_dilation(C, eps[len(fixtures) % len(eps)])
        fixtures.append((C, H, None))
        if len(fixtures) < count:
            h = canonical_interior_point(H) + rng.uniform(0, 1, m)
            fixtures.append((C, H, tuple(h)))
        m = m % 3 + 1
    return fixtures[:count]


def _lemma_one(C, H, h, n_samples, rng, tol) -> dict | None:
    """First failing part for one fixture, or None."""
    h = canonical_interior_point(H, tol) if h is None else np.asarray(h, dtype=float)
    L = lift_cone(H, h)
    m = H.dim
    if not is_dilating_for(product_with_ray(C), L, tol=tol):
        return {"part": "lift_is_dilating"}
    R = restrict_to_zero(L)
    V = np.vstack([rng.standard_normal((n_samples // 2, m)),
                   ray_samples(H, n_samples - n_samples // 2, int(rng.integers(1 << 30)), tol)])
    if not (np.array_equal(contains_many(R, V, tol), contains_many(H, V, tol))
            and np.array_equal(interior_many(R, V, tol), interior_many(H, V, tol))):
        return {"part": "zero_section"}
    if not is_dilating_for(C, R, tol=tol):
        return {"part": "section_is_dilating"}
    members = V[contains_many(H, V, tol)]
    t = rng.uniform(0, 3, len(members)) * np.linalg.norm(members, axis=1)
    if not contains_many(L, np.column_stack([members, t]), tol).all():
        return {"part": "H_times_ray_in_lift"}
    inner = members[interior_many(H, members, tol)]
    t = rng.uniform(0.01, 3, len(inner)) * np.linalg.norm(inner, axis=1)
    if not interior_many(L, np.column_stack([inner, t]), tol).all():
        return {"part": "int_H_times_open_ray_in_int_lift"}
    return None


def _section_part(C, eps_grid, tol) -> dict | None:
    """Zero-sections of dilating cones of ``C x R_>=`` are dilating cones of ``C``."""
    P = product_with_ray(C)
    for e in eps_grid:
        K = epsilon_dilation(P, e)
        if not is_dilating_for(P, K, tol=tol):
            continue
        if not is_dilating_for(C, restrict_to_zero(K), tol=tol):
            return {"part": "sections_of_dilating_cones", "eps": e}
    return None


def verify_lifted_cone_lemma(fixtures=None, n_samples: int = 1000, seed: int = 0,
                             tol=DEFAULT_TOL) -> TheoremVerdict:
    """Properties of lifted cones on sampled fixtures.

    For each ``(C, H, h)``: the lift at ``h`` (canonical when ``None``) is a
    dilating cone of ``C x R_>=``; its zero-section agrees with ``H`` on
    ``n_samples`` vectors and is a dilating cone of ``C``; ``H x R_>=`` and
    ``int H x R_>`` lie in the lift and its interior. Sections of epsilon
    dilations of ``C x R_>=`` are checked to be dilating cones of ``C``.
    """
    tid = "lifted_cone_lemma"
    fixtures = default_lift_fixtures(seed=seed) if fixtures is None else list(fixtures)
    rng = np.random.default_rng(seed)
    hyp = []
    for k, (C, H, h) in enumerate(fixtures):
        dil = is_dilating_for(C, H, tol=tol)
        hyp.append((f"fixture_{k}:H_dilating", HOLDS if dil else FAILS))
    early = _gate(tid, hyp)
    if early:
        return early
    checked_cones = []
    for k, (C, H, h) in enumerate(fixtures):
        try:
            bad = _lemma_one(C, H, h, n_samples, rng, tol)
        except InvalidLiftError as exc:
            bad = {"part": "construction", "reason": str(exc)}
        if bad is None and C not in checked_cones and isinstance(C, (Orthant, HalfspacePoly)):
            checked_cones.append(C)
            bad = _section_part(C, (1e-2, 1.0, 1e2), tol)
        if bad is not None:
            bad.update({"display": "lemma", "fixture": k})
            return TheoremVerdict(tid, tuple(hyp), VIOLATED, bad, {"fixtures": len(fixtures)})
    return TheoremVerdict(tid, tuple(hyp), VERIFIED, None,
                          {"fixtures": len(fixtures), "samples": n_samples})


# ---------------------------------------------------------------------------
# Main decomposition
# ---------------------------------------------------------------------------


def verify_main_decomposition(inst) -> TheoremVerdict:
    """Characterisation of ``PEff(f, S)`` by the unconstrained problems over ``D``.

    * A1 and ``S`` closed: both inclusions ``PS >= ... | (BD & PXD)``;
    * A3: ``PS == S & PXD``;
    * A3, ``S`` closed and ``PS - PD <= BD``: both union formulas as equalities;
    * A3, ``S`` closed, sampled C-convexity on ``D`` and segment closure: the
      condition ``PS - PD <= BD`` itself and both equalities.

    Blocks whose hypotheses fail are listed in ``details["skipped"]``; the
    verdict is skipped only when no block applies.
    """
    tid = "main_decomposition"
    a1, a3 = check_A1(inst), check_A3(inst)
    hyp = [("matched_families", matched_families(inst)),
           ("S_closed", HOLDS if inst.s_closed else FAILS),
           ("A1", HOLDS if a1.holds else FAILS),
           ("A3", HOLDS if a3.holds else FAILS)]
    status = dict(hyp)
    if status["matched_families"] != HOLDS:
        return TheoremVerdict(tid, tuple(hyp), SKIPPED)
    sets = set_cache(inst).sets()
    names, skipped = [], []
    closed = status["S_closed"] == HOLDS
    if closed and (status["A1"] == HOLDS or status["A3"] == HOLDS):
        names += ["main:PS>=(INT&PD)|(BD&PXD)", "main:PS>=(S&PD)|(BD&PXD)"]
    else:
        skipped.append("inclusions")
    if status["A3"] == HOLDS:
        names.append("main:PS==S&PXD")
    else:
        skipped.append("A3_equality")
    if closed and status["A3"] == HOLDS:
        boundary_cond = _evaluate("main:PS-PD<=BD", sets) is None
        hyp.append(("PS-PD<=BD", HOLDS if boundary_cond else FAILS))
        conv = convexity_status(inst)
        clos = _closure_status(inst)
        hyp += [("C_convex_on_D", conv), ("segment_closure", clos)]
        if conv == HOLDS and clos == HOLDS:
            names += ["main:PS-PD<=BD"]
        if boundary_cond or (conv == HOLDS and clos == HOLDS):
            names += ["main:PS==(INT&PD)|(BD&PXD)", "main:PS==(S&PD)|(BD&PXD)"]
        else:
            skipped.append("equalities")
    else:
        skipped.append("equalities")
    if not names:
        return TheoremVerdict(tid, tuple(hyp), SKIPPED, None, {"skipped": skipped})
    return _check_displays(tid, hyp, names, sets, {"skipped": skipped})


# ---------------------------------------------------------------------------
# Worked examples
# ---------------------------------------------------------------------------


def _example(name, checks: list, details: dict) -> TheoremVerdict:
    """Verdict from ``(check name, passed)`` pairs; the first failure is the bundle."""
    for label, ok in checks:
        if not ok:
            return TheoremVerdict(f"example:{name}", (), VIOLATED,
                                  {"display": f"example:{name}", "check": label}, details)
    return TheoremVerdict(f"example:{name}", (), VERIFIED, None,
                          dict(details, checks=[label for label, _ in checks]))


def _repro_halfspace(tol) -> TheoremVerdict:
    from .cones import FullSpace, build_family
    from .efficiency import efficient_set
    from .fixtures import HALFSPACE_CONE, halfspace_candidates

    C = HALFSPACE_CONE
    checks = [(f"{label}_rejected", not is_dilating_for(C, H, tol=tol))
              for label, H in halfspace_candidates()]
    checks.append(("full_space_accepted", bool(is_dilating_for(C, FullSpace(2), tol=tol))))
    fam = build_family(C, "henig_epsilon_orthant", tol=tol)
    checks.append(("family_is_full_space", [type(H) for H in fam.cones] == [FullSpace]))
    varied = np.array([[0.0, 1.0], [1.0, 0.0], [2.0, -1.0]])
    constant = np.ones((3, 2))
    checks.append(("nonconstant_f_has_empty_peff",
                   len(henig_peff_set(varied, None, C, fam, tol)) == 0))
    checks.append(("constant_f_keeps_all",
                   henig_peff_set(constant, None, C, fam, tol).indices == (0, 1, 2)))
    checks.append(("full_space_eff_consistent",
                   len(efficient_set(varied, None, FullSpace(2), tol)) == 0))
    return _example("halfspace", checks, {"family": fam.summary()})


def _repro_bp(tol, n: int = 1000, seed: int = 0) -> TheoremVerdict:
    from .fixtures import BP_LIFT_DIRECTION, BP_PRODUCT, BP_SECTION

    rng = np.random.default_rng(seed)
    c = 2 / np.sqrt(3)
    P = np.abs(rng.standard_normal((n, 3)))
    s = P.sum(axis=1)
    Q = P[:, :2]
    sq = Q.sum(axis=1)
    checks = [
        ("product_inequality_chain",
         bool(np.all((P ** 2).sum(1) <= s ** 2 + 1e-12) and np.all(s ** 2 < 4 / 3 * s ** 2))),
        ("product_dilates_R3", bool(is_dilating_for(Orthant(3), BP_PRODUCT, tol=tol))),
        ("positive_vectors_interior", bool(interior_many(BP_PRODUCT, P, tol).all())),
        ("section_structural", restrict_to_zero(BP_PRODUCT) == BP_SECTION),
        ("section_inequality_chain",
         bool(np.all((Q ** 2).sum(1) <= sq ** 2 + 1e-12) and np.all(sq ** 2 < 4 / 3 * sq ** 2))),
        ("section_dilates_R2", bool(is_dilating_for(Orthant(2), BP_SECTION, tol=tol))),
    ]
    V = rng.standard_normal((n, 3)) * rng.uniform(0.1, 10, (n, 1))
    on_plane = np.column_stack([V[:, :2], np.zeros(n)])
    checks.append(("section_on_samples",
                   np.array_equal(contains_many(BP_PRODUCT, on_plane, tol),
                                  contains_many(BP_SECTION, V[:, :2], tol))))
    L = lift_cone(BP_SECTION, BP_LIFT_DIRECTION)
    shifted = V[:, :2] + V[:, 2:]
    formula = c * shifted.sum(axis=1) - np.linalg.norm(shifted, axis=1)
    decided = np.abs(formula) > 1e-7 * np.linalg.norm(V, axis=1)
    checks += [
        ("lift_matches_formula",
         np.array_equal(contains_many(L, V, tol)[decided], (formula >= 0)[decided])),
        ("lift_section_is_H", restrict_to_zero(L) == BP_SECTION),
        ("lift_dilates_R3", bool(is_dilating_for(Orthant(3), L, tol=tol))),
        ("nonneg_nonzero_in_int_lift", bool(interior_many(L, P, tol).all())),
    ]
    return _example("bp", checks, {"samples": n})


def _repro_sqrt(tol) -> TheoremVerdict:
    from .cones import DEFAULT_EPS_GRID, epsilon_dilation
    from .fixtures import SQRT_HALFSPACE, sqrt_instance

    inst = sqrt_instance()
    P, F, X = inst.points, inst.f_values, inst.ext_values
    feas = np.array(inst.feasible)
    ps = set_cache(inst).result("PS")
    pxs = set_cache(inst).result("PXS")
    zero_rows = feas[np.all(F[feas] == 0, axis=1)]
    diagonal = np.flatnonzero((P[:, 0] == P[:, 1]) & (P[:, 0] >= 1))

    def defeats(K) -> int | None:
        D = pairwise_differences(X, np.array([0]), diagonal, tol)[0]
        hit = contains_many(K, D, tol) & np.any(D != 0, axis=1)
        return int(diagonal[np.argmax(hit)]) if hit.any() else None

    lifted_ok = all(defeats(L) is not None for L in inst.lifted_family.cones)
    radius_needed = {}
    for e in DEFAULT_EPS_GRID:
        y = defeats(epsilon_dilation(Orthant(3), e))
        radius_needed[e] = None if y is None else float(P[y, 0])
    loss = verify_loss_mechanism(inst)
    witness = loss.details.get("witnesses", {}).get(0)
    checks = [
        ("origin_in_peff_S", 0 in ps),
        ("origin_certified_by_halfspace",
         0 in set(next(e for k, _, e in ps.per_member if inst.family.members[k][1]
                       == SQRT_HALFSPACE))),
        ("halfspace_dilates", bool(is_dilating_for(inst.cone, SQRT_HALFSPACE, tol=tol))),
        ("diagonal_extended_values", bool(np.allclose(X[diagonal], np.column_stack(
            [np.ones(len(diagonal)), np.ones(len(diagonal)), -P[diagonal, 0]])))),
        ("every_lifted_member_defeated", lifted_ok),
        ("every_product_dilation_defeated", all(v is not None for v in radius_needed.values())),
        ("origin_not_in_peff_extended", 0 not in pxs),
        ("zero_set_is_axis", set(zero_rows.tolist()) == set(feas[P[feas, 0] == 0].tolist())),
        ("loss_mechanism", loss.verified and witness is not None
         and np.abs(P[witness]).max() > 0),
    ]
    details = {"truncation_radius": float(P[:, 0].max()),
               "largest_witness_radius": max(v for v in radius_needed.values() if v),
               "f_nonzero_off_origin": len(zero_rows) == 1}
    return _example("sqrt", checks, details)


def _repro_identity(tol) -> TheoremVerdict:
    from .cones import DEFAULT_EPS_GRID, epsilon_dilation
    from .fixtures import identity_instance, identity_threshold

    inst = identity_instance()
    x = inst.points[:, 0]
    X = inst.ext_values
    feas = np.array(inst.feasible)
    zero = int(np.flatnonzero(x == 0)[0])
    ps, pxs = set_cache(inst).result("PS"), set_cache(inst).result("PXS")
    others = feas[feas != zero]
    D = pairwise_differences(X, np.array([zero]), others, tol)[0]
    witnesses, thresholds, sound = {}, {}, True
    for e in DEFAULT_EPS_GRID:
        K = epsilon_dilation(Orthant(2), e)
        hit = contains_many(K, D, tol) & np.any(D != 0, axis=1)
        if hit.any():
            witnesses[e] = float(x[others[hit]].min())
            # with relative slack tau the cone admits sqrt(y) up to (eps + 2 tau) / (1 + eps)
            loose = ((e + 2 * tol.mem) / (1 + e)) ** 2
            sound = sound and bool(np.all(x[others[hit]] <= loose))
        thresholds[e] = identity_threshold(e)
    lifted_hits = []
    for L in inst.lifted_family.cones:
        hit = contains_many(L, D, tol) & np.any(D != 0, axis=1)
        lifted_hits.append(bool(hit.any()))
    checks = [
        ("origin_in_peff_S", zero in ps),
        ("f_increases_off_origin", bool(np.all(x[others] > 0))),
        ("every_eps_defeated", len(witnesses) == len(DEFAULT_EPS_GRID)),
        ("witness_below_threshold",
         all(witnesses[e] <= thresholds[e] for e in witnesses)),
        ("all_hits_within_tolerant_threshold", sound),
        ("witness_nu_decreases", bool(np.all(inst.nu_values[others] < inst.nu_values[zero]))),
        ("every_lifted_member_defeated", all(lifted_hits)),
        ("origin_not_in_peff_extended", zero not in pxs),
        ("loss_mechanism", verify_loss_mechanism(inst).verified),
    ]
    details = {"smallest_sample": float(x[x > 0].min()),
               "smallest_threshold": min(thresholds.values())}
    return _example("identity", checks, details)


def _repro_saturn(tol) -> TheoremVerdict:
    from .fixtures import saturn_probes, saturn_shape
    from .topology import check_restriction_interior

    shape = saturn_shape()
    probes, radii = saturn_probes()
    rep = check_restriction_interior(shape, 0.0, probes, tol.mem)
    annulus = tuple(int(k) for k in np.flatnonzero((radii > 1) & (radii < 2)))
    above = check_restriction_interior(shape, 0.5, probes * 0.5, tol.mem)
    checks = [
        ("mismatches_are_annulus", rep.rhs_only == annulus),
        ("no_reverse_mismatch", rep.lhs_only == ()),
        ("section_above_plane_consistent", above.consistent),
    ]
    return _example("saturn", checks, {"mismatches": list(rep.rhs_only),
                                       "probes": len(probes)})


_REPRODUCERS = {"halfspace": _repro_halfspace, "bp": _repro_bp, "sqrt": _repro_sqrt,
                "identity": _repro_identity, "saturn": _repro_saturn}


def reproduce_paper_example(name: str, tol=DEFAULT_TOL) -> TheoremVerdict:
    """Re-derive the stated conclusion of one worked example.

    ``name`` is one of ``halfspace``, ``bp``, ``sqrt``, ``identity`` or
    ``saturn``; anything else raises InvalidInputError.
    """
    if name not in _REPRODUCERS:
        raise InvalidInputError(f"unknown example {name!r}; choose from {sorted(_REPRODUCERS)}")
    return _REPRODUCERS[name](tol)


# ---------------------------------------------------------------------------
# Claimed sets and corpus runs
# ---------------------------------------------------------------------------


def check_claimed_sets(inst, claimed: dict) -> list:
    """Evaluate the set displays on externally supplied PEff sets.

    ``claimed`` maps any of ``PS``, ``PD``, ``PXS``, ``PXD`` to index
    collections; missing names are computed. Returns one verdict per theorem
    family whose gates hold plus a consistency verdict comparing the claims
    with the efficiency engine.
    """
    sets = set_cache(inst).sets()
    computed = dict(sets)
    for name, val in claimed.items():
        if name not in ("PS", "PD", "PXS", "PXD"):
            raise InvalidInputError(f"unknown claimed set {name!r}")
        sets[name] = frozenset(int(i) for i in val)
    out = [_check_displays("claimed:subset_theorem", [("S<=U<=D", HOLDS)],
                           ["barrier:S&PD<=PS"], sets)]
    if inst.topo_tags is not None and convexity_status(inst) == HOLDS \
            and _closure_status(inst) == HOLDS:
        out.append(_check_displays("claimed:convex_barrier", [("gates", HOLDS)],
                                   ["barrier:INT&PS<=INT&PD", "barrier:PS-PD<=BD"], sets))
    if inst.s_closed and check_A3(inst).holds:
        out.append(_check_displays("claimed:main_decomposition", [("A3", HOLDS)],
                                   ["main:PS>=(S&PD)|(BD&PXD)", "main:PS==S&PXD"], sets))
    diff = sorted(n for n in claimed if sets[n] != computed[n])
    out.append(TheoremVerdict("claimed:consistency", (), VIOLATED if diff else VERIFIED,
                              {"display": "claimed:consistency", "sets": diff} if diff else None))
    return out


INSTANCE_THEOREMS = {
    "subset": verify_subset_theorem,
    "convex_barrier": verify_convex_barrier,
    "loss": verify_loss_mechanism,
    "gain": verify_gain_mechanism,
    "main": verify_main_decomposition,
}


def peff_equivalence(inst) -> TheoremVerdict:
    """Eff-union and WEff-union over the family coincide (both problems over ``S``)."""
    hyp = (("family_nonempty", HOLDS if len(inst.family) else FAILS),)
    bad = []
    for label, res in (("S", set_cache(inst).result("PS")),
                       ("S_ext", set_cache(inst).result("PXS"))):
        if not res.routes_agree:
            bad.append(label)
    if bad:
        return TheoremVerdict("peff_equivalence", hyp, VIOLATED,
                              {"display": "peff_equivalence", "problems": bad})
    return TheoremVerdict("peff_equivalence", hyp, VERIFIED)


INSTANCE_THEOREMS["peff_equivalence"] = peff_equivalence


def run_instance(inst, theorems=None) -> list:
    names = list(INSTANCE_THEOREMS) if theorems is None else list(theorems)
    unknown = [n for n in names if n not in INSTANCE_THEOREMS]
    if unknown:
        raise InvalidInputError(f"unknown theorem(s) {unknown}; choose from {list(INSTANCE_THEOREMS)}")
    return [INSTANCE_THEOREMS[n](inst) for n in names]


def worker_count(default: int = 4) -> int:
    """Worker cap from ``VECPEN_THREADS`` (at least one)."""
    import os

    raw = os.environ.get("VECPEN_THREADS")
    try:
        return max(1, int(raw)) if raw else default
    except ValueError:
        return default


def run_corpus(instances, theorems=None, threads: int | None = None) -> list:
    """``[(name, verdicts)]`` in input order; instances run concurrently."""
    from concurrent.futures import ThreadPoolExecutor

    instances = list(instances)
    threads = worker_count() if threads is None else max(1, int(threads))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda inst: run_instance(inst, theorems), instances))
    return [(inst.name, res) for inst, res in zip(instances, results)]
