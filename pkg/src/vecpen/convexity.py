"""Sampled refuters for A-convexity and weak A-quasiconvexity.

``A`` is one of ``"C"``, ``"C\\{0}"`` or ``"int C"`` for the instance cone
(or an explicitly supplied cone). A segment ``[x1, x2]`` is sampled by the
sample points lying on it. By default these are all subset points collinear
with and between the end points (within ``snap_tol``); with a ``lambda_grid``
only the convex combinations at those weights are used, each snapped to a
sample point within ``snap_tol`` or skipped. ``snap_tol`` defaults to
``1e-12`` times the largest coordinate magnitude (at least one): tight enough
that a snapped point is the combination up to rounding, so ``f`` is compared
at the point the inequality is about.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .cones import Cone, DilatingFamily, contains_many, interior_many
from .efficiency import pairwise_differences
from .errors import InconclusiveError, InvalidInputError

A_KINDS = ("C", "C\\{0}", "int C")
PASSED = "passed_samples"
REFUTED = "refuted"
DEFAULT_MAX_PAIRS = 3000


@dataclass(frozen=True)
class ConvexityVerdict:
    property: str
    A: str
    status: str
    witness: dict = field(default_factory=dict)
    tested: int = 0
    skipped: int = 0
    pairs: int = 0
    x1_admissible: bool = True

    @property
    def passed(self) -> bool:
        return self.status == PASSED

    def to_dict(self) -> dict:
        out = {"property": self.property, "A": self.A, "status": self.status,
               "tested": self.tested, "skipped": self.skipped, "pairs": self.pairs}
        if self.witness:
            out["witness"] = self.witness
        if self.property == "weak_A_quasiconvex":
            out["x1_admissible"] = self.x1_admissible
        return out


def relation_holds(cone: Cone, A: str, lower: np.ndarray, upper: np.ndarray, tol,
                   scale: np.ndarray | None = None) -> np.ndarray:
    """Vectorised ``lower <=_A upper`` over rows, i.e. ``upper - lower in A``.

    Differences below ``tol.mem * scale`` count as zero; ``scale`` defaults to
    the larger row norm of the two sides. Pass the operand magnitudes when
    ``upper`` is itself a computed combination that may cancel.
    """
    if A not in A_KINDS:
        raise InvalidInputError(f"A must be one of {A_KINDS}")
    lower = np.atleast_2d(lower)
    upper = np.atleast_2d(upper)
    d = upper - lower
    scale = np.maximum(np.linalg.norm(lower, axis=1), np.linalg.norm(upper, axis=1)) \
        if scale is None else np.maximum(scale, np.linalg.norm(lower, axis=1))
    d[np.linalg.norm(d, axis=1) <= tol.mem * scale] = 0.0
    if A == "int C":
        return interior_many(cone, d, tol)
    ok = contains_many(cone, d, tol)
    if A == "C\\{0}":
        ok &= np.any(d != 0, axis=1)
    return ok


class _Sampler:
    def __init__(self, inst, subset, lambda_grid, snap_tol):
        self.idx = np.array(sorted(set(inst.feasible if subset is None else subset)), dtype=int)
        if len(self.idx) < 2:
            raise InconclusiveError("need at least two points")
        self.P = inst.points[self.idx]
        self.F = inst.f_values[self.idx]
        scale = max(1.0, float(np.abs(self.P).max()))
        self.snap = 1e-12 * scale if snap_tol is None else float(snap_tol)
        self.grid = None if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
        if self.grid is not None and (np.any(self.grid <= 0) or np.any(self.grid >= 1)):
            raise InvalidInputError("lambda grid must lie in (0, 1)")
        self.tree = cKDTree(self.P) if self.grid is not None else None

    def between(self, a: int, b: int):
        """Local indices strictly inside segment [a, b] and their weights on ``a``."""
        x1, x2 = self.P[a], self.P[b]
        w = x1 - x2
        ww = float(w @ w)
        if ww == 0:
            # coincident samples span no segment
            return np.zeros(0, dtype=int), np.zeros(0), 0
        if self.grid is not None:
            Z = x2 + self.grid[:, None] * w
            dist, loc = self.tree.query(Z)
            ok = dist <= self.snap
            return loc[ok], self.grid[ok], int((~ok).sum())
        lam = (self.P - x2) @ w / ww
        resid = np.linalg.norm(self.P - x2 - lam[:, None] * w, axis=1)
        margin = self.snap / np.sqrt(ww)
        on = (resid <= self.snap) & (lam > margin) & (lam < 1 - margin)
        loc = np.flatnonzero(on)
        return loc, lam[loc], 0


def sample_pairs(n: int, max_pairs: int = DEFAULT_MAX_PAIRS, seed: int = 0) -> np.ndarray:
    """Ordered pairs ``(a, b)``, ``a != b``: all of them or a seeded sample."""
    if n * (n - 1) <= max_pairs:
        a, b = np.nonzero(~np.eye(n, dtype=bool))
        return np.column_stack([a, b])
    rng = np.random.default_rng(seed)
    a = rng.integers(0, n, size=max_pairs)
    b = (a + rng.integers(1, n, size=max_pairs)) % n
    return np.column_stack([a, b])


def _pairs(sampler, pair_samples, max_pairs, seed):
    if pair_samples is None:
        return sample_pairs(len(sampler.idx), max_pairs, seed)
    pos = {int(g): k for k, g in enumerate(sampler.idx)}
    try:
        return np.array([(pos[int(i)], pos[int(j)]) for i, j in pair_samples if i != j], dtype=int)
    except KeyError as exc:
        raise InvalidInputError(f"pair index {exc} is not in the subset") from None


def check_A_convex(inst, subset=None, A: str = "C", pair_samples=None, lambda_grid=None,
                   cone: Cone | None = None, max_pairs: int = DEFAULT_MAX_PAIRS,
                   seed: int = 0, snap_tol: float | None = None) -> ConvexityVerdict:
    """Test ``f(z) <=_A lam f(x1) + (1 - lam) f(x2)`` for sampled ``z`` on ``[x1, x2]``.

    Raises InconclusiveError when no triple could be tested.
    """
    cone = cone or inst.cone
    s = _Sampler(inst, subset, lambda_grid, snap_tol)
    pairs = _pairs(s, pair_samples, max_pairs, seed)
    tested = skipped = 0
    for a, b in pairs:
        loc, lam, miss = s.between(a, b)
        skipped += miss
        if len(loc) == 0:
            continue
        tested += len(loc)
        rhs = lam[:, None] * s.F[a] + (1 - lam[:, None]) * s.F[b]
        mag = max(np.linalg.norm(s.F[a]), np.linalg.norm(s.F[b]))
        ok = relation_holds(cone, A, s.F[loc], rhs, inst.tol, np.full(len(loc), mag))
        if not ok.all():
            k = int(np.argmin(ok))
            w = {"x1": int(s.idx[a]), "x2": int(s.idx[b]), "z": int(s.idx[loc[k]]),
                 "lambda": float(lam[k])}
            return ConvexityVerdict("A_convex", A, REFUTED, w, tested, skipped, len(pairs))
    if tested == 0:
        raise InconclusiveError("no sample point lies inside any sampled segment")
    return ConvexityVerdict("A_convex", A, PASSED, {}, tested, skipped, len(pairs))


def _anchor_ok(s: _Sampler, cone, A, tol, x0: int, x2: int, ok_upper: np.ndarray):
    """Whether every sampled point of ``[x0, x2)`` satisfies ``f(.) <=_A f(x2)``."""
    if not ok_upper[x0]:
        return False
    loc, _, _ = s.between(x0, x2)
    return bool(ok_upper[loc].all())


def _exists_anchor(s: _Sampler, x2: int, ok_upper: np.ndarray, cone, A, tol) -> bool:
    if s.grid is None:
        # collinear sampling: [x0, x2) holds iff it holds up to the first point
        # on that ray, so only ray-nearest anchors need checking
        U = s.P - s.P[x2]
        r = np.linalg.norm(U, axis=1)
        keep = r > s.snap
        cand = np.flatnonzero(keep)
        dirs = np.round(U[cand] / r[cand, None], 7) + 0.0
        order = np.lexsort((r[cand],) + tuple(dirs.T[::-1]))
        dirs, cand = dirs[order], cand[order]
        first = np.ones(len(cand), dtype=bool)
        first[1:] = np.any(dirs[1:] != dirs[:-1], axis=1)
        for x0 in cand[first][ok_upper[cand[first]]]:
            if _anchor_ok(s, cone, A, tol, int(x0), x2, ok_upper):
                return True
        return False
    for x0 in np.flatnonzero(ok_upper):
        if x0 != x2 and _anchor_ok(s, cone, A, tol, int(x0), x2, ok_upper):
            return True
    return False


def check_weak_A_quasiconvex(inst, subset=None, A: str = "C", pair_samples=None,
                             segment_grid=None, cone: Cone | None = None,
                             max_pairs: int = DEFAULT_MAX_PAIRS, seed: int = 0,
                             snap_tol: float | None = None) -> ConvexityVerdict:
    """For sampled pairs with ``f(x1) <=_A f(x2)`` search an anchor ``x0 != x2``.

    ``x0 = x1`` is tried first; ``x1_admissible`` reports whether it always
    worked. A pair without any admissible anchor refutes the property.
    """
    cone = cone or inst.cone
    s = _Sampler(inst, subset, segment_grid, snap_tol)
    pairs = _pairs(s, pair_samples, max_pairs, seed)
    tested, x1_all = 0, True
    cache = {}
    for a, b in pairs:
        if not relation_holds(cone, A, s.F[a], s.F[b], inst.tol)[0]:
            continue
        tested += 1
        if b not in cache:
            cache[b] = relation_holds(cone, A, s.F, np.broadcast_to(s.F[b], s.F.shape).copy(),
                                      inst.tol)
        ok_upper = cache[b]
        if _anchor_ok(s, cone, A, inst.tol, int(a), int(b), ok_upper):
            continue
        x1_all = False
        if not _exists_anchor(s, int(b), ok_upper, cone, A, inst.tol):
            w = {"x1": int(s.idx[a]), "x2": int(s.idx[b])}
            return ConvexityVerdict("weak_A_quasiconvex", A, REFUTED, w, tested, 0,
                                    len(pairs), False)
    if tested == 0:
        raise InconclusiveError("no sampled pair satisfies f(x1) <=_A f(x2)")
    return ConvexityVerdict("weak_A_quasiconvex", A, PASSED, {}, tested, 0, len(pairs), x1_all)


@dataclass(frozen=True)
class ImplicationResult:
    holds: bool
    convex: ConvexityVerdict | None
    quasi: ConvexityVerdict | None
    reason: str = ""


def check_convexity_implication(inst, subset=None, A: str = "C", **kw) -> ImplicationResult:
    """A-convex on the samples must imply weak A-quasiconvexity with ``x0 = x1``."""
    try:
        conv = check_A_convex(inst, subset, A, **kw)
    except InconclusiveError as exc:
        return ImplicationResult(True, None, None, f"convexity inconclusive: {exc}")
    if not conv.passed:
        return ImplicationResult(True, conv, None, "premise refuted")
    qkw = {k: v for k, v in kw.items() if k != "lambda_grid"}
    qkw["segment_grid"] = kw.get("lambda_grid")
    try:
        quasi = check_weak_A_quasiconvex(inst, subset, A, **qkw)
    except InconclusiveError as exc:
        return ImplicationResult(True, conv, None, f"no ordered pair: {exc}")
    return ImplicationResult(quasi.passed and quasi.x1_admissible, conv, quasi)


def check_cone_monotonicity(inst, inner: Cone, outer: Cone, subset=None, A: str = "C",
                            **kw) -> ImplicationResult:
    """``inner <= outer`` and ``inner``-convexity on samples imply ``outer``-convexity."""
    first = check_A_convex(inst, subset, A, cone=inner, **kw)
    if not first.passed:
        return ImplicationResult(True, first, None, "premise refuted")
    second = check_A_convex(inst, subset, A, cone=outer, **kw)
    return ImplicationResult(second.passed, first, second)


@dataclass(frozen=True)
class ClosureReport:
    """``failures`` holds ``(x, member, y)``: ``y`` dominates ``x`` for family
    member ``member`` but no feasible sample lies on ``(x, y]``."""

    ok: bool
    failures: tuple = ()
    checked: int = 0


def _closed_targets(P: np.ndarray, x: int, feasible: np.ndarray, snap: float) -> np.ndarray:
    """Mask over all points ``y``: ``y`` is feasible or a feasible sample lies on ``(x, y)``."""
    W = P - P[x]
    Z = P[feasible] - P[x]
    ww = np.einsum("ij,ij->i", W, W)
    safe = np.where(ww > 0, ww, 1.0)
    lam = (W @ Z.T) / safe[:, None]
    resid = np.linalg.norm(Z[None, :, :] - lam[..., None] * W[:, None, :], axis=2)
    margin = snap / np.sqrt(safe)[:, None]
    on = (resid <= snap) & (lam > margin) & (lam < 1 + margin)
    closed = on.any(axis=1)
    closed[feasible] = True
    return closed


def segment_closure(inst, family: DilatingFamily | None = None, points=None,
                    snap_tol: float | None = None) -> ClosureReport:
    """Sampled segment closure of ``S`` towards its dominators.

    For each ``x`` in ``points`` (default: interior-tagged points) and each
    family member ``H`` under which some sample ``y`` of ``D`` dominates
    ``x``, at least one such dominator must be feasible or have a feasible
    sample on the segment ``(x, y)``. With a convex objective that sample
    dominates ``x`` inside ``S``, which is what transfers efficiency from
    ``S`` to ``D`` at interior points.
    """
    family = family or inst.family
    pts = inst.interior_points if points is None else tuple(int(i) for i in points)
    P = inst.points
    snap = 1e-9 * max(1.0, float(np.abs(P).max())) if snap_tol is None else float(snap_tol)
    feasible = np.array(inst.feasible, dtype=int)
    everyone = np.arange(inst.n_points)
    failures = []
    for x in pts:
        D = pairwise_differences(inst.f_values, np.array([x]), everyone, inst.tol)[0]
        nz = np.any(D != 0, axis=1)
        closed = None
        for k, (_, H) in enumerate(family.members):
            dom = contains_many(H, D, inst.tol) & nz
            if not dom.any():
                continue
            if closed is None:
                closed = _closed_targets(P, x, feasible, snap)
            if not (dom & closed).any():
                failures.append((int(x), k, int(np.argmax(dom))))
    return ClosureReport(not failures, tuple(failures), len(pts))
