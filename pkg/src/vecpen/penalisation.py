"""Level-set properties of a penalisation function on a sampled instance.

With ``U`` a set of indices satisfying ``S <= U <= D``:

* A1: ``lev_<=(U, nu, nu(x0)) = S`` for every boundary point ``x0``;
* A2: ``lev_=(U, nu, nu(x0)) = bd S`` for every boundary point ``x0``;
* A3: ``lev_=(U, nu, nu(x0)) = lev_<=(U, nu, nu(x0)) = S`` for every ``x0`` in ``S``.

Derived consequences: A1 gives ``lev_< in int S``, A1 and A2 give
``lev_< = int S`` and A3 gives ``lev_< = {}`` (levels taken at ``nu(x0)``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .efficiency import level_set
from .errors import InvalidInputError

HOLDS = "holds"
FAILS = "fails"
INAPPLICABLE = "inapplicable"
SKIPPED = "skipped"


@dataclass(frozen=True)
class Verdict:
    """``witness`` names the level ``x0`` and one offending index ``element``."""

    status: str
    witness: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.witness:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        return out


def _universe(inst, U) -> tuple:
    U = inst.all_indices if U is None else tuple(sorted(set(int(i) for i in U)))
    if not set(inst.feasible) <= set(U):
        raise InvalidInputError("U must contain the feasible set")
    if any(i < 0 or i >= inst.n_points for i in U):
        raise InvalidInputError("U index out of range")
    return U


def _mismatch(x0: int, got, expected, label: str) -> Verdict:
    got, expected = set(got), set(expected)
    extra = sorted(got - expected)
    missing = sorted(expected - got)
    element, side = (extra[0], "extra") if extra else (missing[0], "missing")
    return Verdict(FAILS, {"x0": x0, "element": element, "side": side, "level_set": label})


def _boundary_or_inapplicable(inst, U):
    if inst.topo_tags is None:
        return None, Verdict(INAPPLICABLE, reason="no topological tags")
    bd = inst.boundary_points
    if not bd:
        return None, Verdict(INAPPLICABLE, reason="no boundary-tagged points")
    if not set(bd) <= set(U):
        raise InvalidInputError("boundary points must lie in U")
    return bd, None


def check_A1(inst, U=None) -> Verdict:
    U = _universe(inst, U)
    bd, early = _boundary_or_inapplicable(inst, U)
    if early:
        return early
    nu = inst.nu_values
    for x0 in bd:
        lev = level_set(nu, U, "<=", nu[x0], inst.tol)
        if set(lev) != set(inst.feasible):
            return _mismatch(x0, lev, inst.feasible, "<=")
    return Verdict(HOLDS)


def check_A2(inst, U=None) -> Verdict:
    U = _universe(inst, U)
    bd, early = _boundary_or_inapplicable(inst, U)
    if early:
        return early
    nu = inst.nu_values
    for x0 in bd:
        lev = level_set(nu, U, "==", nu[x0], inst.tol)
        if set(lev) != set(bd):
            return _mismatch(x0, lev, bd, "==")
    return Verdict(HOLDS)


def check_A3(inst, U=None) -> Verdict:
    U = _universe(inst, U)
    nu = inst.nu_values
    for x0 in inst.feasible:
        for comp in ("==", "<="):
            lev = level_set(nu, U, comp, nu[x0], inst.tol)
            if set(lev) != set(inst.feasible):
                return _mismatch(x0, lev, inst.feasible, comp)
    return Verdict(HOLDS)


@dataclass(frozen=True)
class PenalisationReport:
    a1: Verdict
    a2: Verdict
    a3: Verdict
    derived: dict

    def to_dict(self) -> dict:
        return {"A1": self.a1.to_dict(), "A2": self.a2.to_dict(), "A3": self.a3.to_dict(),
                "derived": {k: v.to_dict() for k, v in self.derived.items()}}


def check_derived_consequences(inst, U=None, a1: Verdict | None = None,
                               a2: Verdict | None = None, a3: Verdict | None = None) -> dict:
    """Re-derive the strict level-set consequences that the base properties imply.

    Returns verdicts keyed ``strict_in_interior`` (A1), ``strict_is_interior``
    (A1 and A2) and ``strict_empty`` (A3); a consequence whose premise does not
    hold is ``skipped``.
    """
    U = _universe(inst, U)
    a1 = a1 or check_A1(inst, U)
    a2 = a2 or check_A2(inst, U)
    a3 = a3 or check_A3(inst, U)
    nu = inst.nu_values
    interior = set(inst.interior_points)
    out = {}

    def run(premise: bool, levels, test, name):
        if not premise:
            out[name] = Verdict(SKIPPED, reason="premise does not hold")
            return
        for x0 in levels:
            lev = set(level_set(nu, U, "<", nu[x0], inst.tol))
            bad = test(lev)
            if bad:
                out[name] = Verdict(FAILS, {"x0": x0, "element": min(bad), "level_set": "<"})
                return
        out[name] = Verdict(HOLDS)

    bd = inst.boundary_points
    run(a1.holds, bd, lambda lev: lev - interior, "strict_in_interior")
    run(a1.holds and a2.holds, bd, lambda lev: lev ^ interior, "strict_is_interior")
    run(a3.holds, inst.feasible, lambda lev: lev, "strict_empty")
    return out


def penalisation_report(inst, U=None) -> PenalisationReport:
    a1, a2, a3 = check_A1(inst, U), check_A2(inst, U), check_A3(inst, U)
    return PenalisationReport(a1, a2, a3, check_derived_consequences(inst, U, a1, a2, a3))
