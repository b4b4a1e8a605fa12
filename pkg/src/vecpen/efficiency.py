"""Efficient, weakly efficient and Henig-properly efficient index sets.

All routines operate on a value table ``values`` of shape ``(N, m)`` and a
subset of row indices; indices in results are always global row indices.
Passing an :class:`~vecpen.problem.Instance` instead of a table uses its
objective values (``extended=True`` selects ``(f, nu)``).

Two values are treated as equal when ``|a - b| <= tau_mem * max(|a|, |b|)``,
which absorbs rounding noise without merging genuinely distinct small values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cones import (
    DEFAULT_TOL,
    Cone,
    DilatingFamily,
    FullSpace,
    Orthant,
    Tolerances,
    contains_many,
    has_interior,
    int_union_zero,
    interior_many,
)
from .errors import EmptyInteriorError, InvalidInputError, UnsupportedRepresentationError

CHUNK = 1 << 18
CACHE_PAIRS = 4_000_000


@dataclass(frozen=True)
class DominanceWitness:
    """``by`` dominates the excluded point: ``f(point) - f(by) = direction``."""

    by: int
    direction: tuple


@dataclass(frozen=True)
class ConeCertificate:
    """PEff membership certified by the family member with parameter ``param``."""

    param: float
    member: int


@dataclass(frozen=True)
class IndexSet:
    indices: tuple
    witnesses: dict = field(default_factory=dict, compare=False)

    def __contains__(self, i):
        return i in self.as_set()

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def as_set(self) -> frozenset:
        return frozenset(self.indices)


@dataclass(frozen=True)
class PeffResult(IndexSet):
    certificates: dict = field(default_factory=dict, compare=False)
    weff_union: tuple = ()
    routes_agree: bool = True
    per_member: tuple = field(default=(), compare=False)


def _values(source, extended: bool = False) -> np.ndarray:
    if hasattr(source, "f_values"):
        return source.ext_values if extended else source.f_values
    V = np.asarray(source, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if V.ndim != 2:
        raise InvalidInputError("value table must be two-dimensional")
    return V


def _subset(V: np.ndarray, subset) -> np.ndarray:
    idx = np.arange(len(V)) if subset is None else np.asarray(sorted(set(int(i) for i in subset)))
    if len(idx) == 0:
        raise InvalidInputError("subset must be non-empty")
    if idx.min() < 0 or idx.max() >= len(V):
        raise InvalidInputError("subset index out of range")
    return idx


def pairwise_differences(V: np.ndarray, rows: np.ndarray, cols: np.ndarray,
                         tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``V[rows][:, None] - V[cols][None]`` with near-equal pairs snapped to exact zero."""
    A, B = V[rows][:, None, :], V[cols][None, :, :]
    D = A - B
    scale = np.maximum(np.linalg.norm(A, axis=-1), np.linalg.norm(B, axis=-1))
    D[np.linalg.norm(D, axis=-1) <= tol.mem * scale] = 0.0
    return D


class PairTable:
    """Snapped pairwise differences of a subset, computed once per table.

    Blocks are cached when the subset has at most ``CACHE_PAIRS`` pairs so
    that every cone of a family reuses them.
    """

    def __init__(self, V: np.ndarray, idx: np.ndarray, tol: Tolerances = DEFAULT_TOL):
        self.V, self.idx, self.tol = V, idx, tol
        n = len(idx)
        self.step = max(1, CHUNK // max(n, 1))
        self._cache = [] if n * n <= CACHE_PAIRS else None

    def blocks(self):
        if self._cache:
            yield from self._cache
            return
        n, m = len(self.idx), self.V.shape[1]
        for s in range(0, n, self.step):
            rows = self.idx[s:s + self.step]
            D = pairwise_differences(self.V, rows, self.idx, self.tol).reshape(-1, m)
            blk = (s, len(rows), D, np.any(D != 0, axis=1))
            if self._cache is not None:
                self._cache.append(blk)
            yield blk

    def matrix(self, cone: Cone, strict: bool = False) -> np.ndarray:
        """``M[a, b]``: ``V[idx[a]] - V[idx[b]]`` lies in ``cone \\ {0}``
        (``strict``: in the interior of ``cone``)."""
        n = len(self.idx)
        M = np.zeros((n, n), dtype=bool)
        for s, k, D, nz in self.blocks():
            if strict:
                hit = interior_many(cone, D, self.tol)
            else:
                hit = contains_many(cone, D, self.tol) & nz
            M[s:s + k] = hit.reshape(k, n)
        return M


def dominance_matrix(V: np.ndarray, idx: np.ndarray, cone: Cone, strict: bool = False,
                     tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """See :meth:`PairTable.matrix`."""
    return PairTable(V, np.asarray(idx), tol).matrix(cone, strict)


def _from_matrix(V, idx, M) -> IndexSet:
    members, witnesses = [], {}
    for a, row in enumerate(M):
        if row.any():
            b = int(np.argmax(row))
            i, j = int(idx[a]), int(idx[b])
            witnesses[i] = DominanceWitness(j, tuple(float(c) for c in V[i] - V[j]))
        else:
            members.append(int(idx[a]))
    return IndexSet(tuple(members), witnesses)


def efficient_set(source, subset, cone: Cone, tol: Tolerances = DEFAULT_TOL,
                  extended: bool = False) -> IndexSet:
    """Points of ``subset`` that no other subset point dominates in ``cone \\ {0}``."""
    V = _values(source, extended)
    idx = _subset(V, subset)
    return _from_matrix(V, idx, PairTable(V, idx, tol).matrix(cone))


def weakly_efficient_set(source, subset, cone: Cone, tol: Tolerances = DEFAULT_TOL,
                         extended: bool = False) -> IndexSet:
    """Points of ``subset`` with no strict improvement in ``int cone``."""
    if not has_interior(cone):
        raise EmptyInteriorError("weak efficiency needs a cone with interior")
    V = _values(source, extended)
    idx = _subset(V, subset)
    return _from_matrix(V, idx, PairTable(V, idx, tol).matrix(cone, strict=True))


def weakly_efficient_via_int_union_zero(source, subset, cone: Cone,
                                        tol: Tolerances = DEFAULT_TOL,
                                        extended: bool = False) -> IndexSet:
    """Weak efficiency computed as efficiency for ``int cone U {0}``."""
    return efficient_set(source, subset, int_union_zero(cone), tol, extended)


def _hits(cone: Cone, D: np.ndarray, strict: bool, tol: Tolerances) -> np.ndarray:
    if strict:
        return interior_many(cone, D, tol)
    return contains_many(cone, D, tol) & np.any(D != 0, axis=1)


def _snapped(A: np.ndarray, B: np.ndarray, tol: Tolerances) -> np.ndarray:
    D = A - B
    scale = np.maximum(np.linalg.norm(A, axis=-1), np.linalg.norm(B, axis=-1))
    D[np.linalg.norm(D, axis=-1) <= tol.mem * scale] = 0.0
    return D


def dominated_rows(V: np.ndarray, idx: np.ndarray, cone: Cone, strict: bool,
                   hint: np.ndarray, tol: Tolerances = DEFAULT_TOL):
    """Which subset points have a dominator for ``cone``.

    ``hint[a]`` is a candidate dominator position for row ``a`` (or -1); it is
    tried first and the full row is scanned only when it fails. Returns the
    boolean mask and the updated hints.
    """
    n, m = len(idx), V.shape[1]
    dominated = np.zeros(n, dtype=bool)
    hint = hint.copy()
    a = np.flatnonzero(hint >= 0)
    if len(a):
        D = _snapped(V[idx[a]], V[idx[hint[a]]], tol)
        dominated[a[_hits(cone, D, strict, tol)]] = True
    rest = np.flatnonzero(~dominated)
    step = max(1, CHUNK // max(n, 1))
    for s in range(0, len(rest), step):
        rows = rest[s:s + step]
        D = pairwise_differences(V, idx[rows], idx, tol).reshape(-1, m)
        hit = _hits(cone, D, strict, tol).reshape(len(rows), n)
        found = hit.any(axis=1)
        dominated[rows[found]] = True
        hint[rows[found]] = hit[found].argmax(axis=1)
    return dominated, hint


def henig_peff_set(source, subset, cone: Cone, family: DilatingFamily,
                   tol: Tolerances = DEFAULT_TOL, extended: bool = False) -> PeffResult:
    """Union over family members ``H`` of the efficient sets for ``H``.

    The union of weakly efficient sets over the same members is computed
    alongside and compared (``routes_agree``). A point outside the result is
    dominated for every member; its witness comes from the member with the
    smallest parameter.
    """
    if family.base_cone.dim != cone.dim:
        raise InvalidInputError("family does not belong to this cone")
    V = _values(source, extended)
    idx = _subset(V, subset)
    n = len(idx)
    certificates, weff, per_member = {}, set(), []
    hint = np.full(n, -1)
    strict_hint = np.full(n, -1)
    first_hint = None
    order = sorted(range(len(family.members)), key=lambda k: family.members[k][0])
    for k in order:
        p, H = family.members[k]
        dom, hint = dominated_rows(V, idx, H, False, hint, tol)
        if first_hint is None:
            first_hint = np.where(dom, hint, -1)
        eff = idx[~dom]
        per_member.append((k, p, tuple(int(i) for i in eff)))
        for i in eff:
            certificates.setdefault(int(i), ConeCertificate(float(p), k))
        if isinstance(H, FullSpace):
            # weak efficiency for the whole space is always empty
            continue
        sdom, strict_hint = dominated_rows(V, idx, H, True, strict_hint, tol)
        weff.update(int(i) for i in idx[~sdom])
    members = tuple(sorted(certificates))
    witnesses = {}
    for a in range(n):
        i = int(idx[a])
        if i not in certificates and first_hint[a] >= 0:
            j = int(idx[first_hint[a]])
            witnesses[i] = DominanceWitness(j, tuple(float(c) for c in V[i] - V[j]))
    return PeffResult(members, witnesses, certificates, tuple(sorted(weff)),
                      set(members) == weff, tuple(per_member))


@dataclass(frozen=True)
class EfficiencyReport:
    eff: IndexSet
    weff: IndexSet
    peff: PeffResult
    family_used: dict

    def to_dict(self) -> dict:
        certs = {}
        for i, w in self.eff.witnesses.items():
            certs[str(i)] = {"type": "dominance", "by": w.by, "direction": list(w.direction)}
        for i, c in self.peff.certificates.items():
            certs[str(i)] = {"type": "cone", "eps": c.param, "member": c.member}
        return {
            "eff": list(self.eff.indices),
            "weff": list(self.weff.indices),
            "peff": list(self.peff.indices),
            "peff_routes_agree": self.peff.routes_agree,
            "certificates": dict(sorted(certs.items(), key=lambda kv: int(kv[0]))),
            "family": self.family_used,
        }


def efficiency_report(source, subset, cone: Cone, family: DilatingFamily,
                      tol: Tolerances = DEFAULT_TOL, extended: bool = False) -> EfficiencyReport:
    eff = efficient_set(source, subset, cone, tol, extended)
    weff = weakly_efficient_set(source, subset, cone, tol, extended)
    peff = henig_peff_set(source, subset, cone, family, tol, extended)
    return EfficiencyReport(eff, weff, peff, family.summary())


def level_set(values, subset, comparator: str, threshold: float,
              tol: Tolerances = DEFAULT_TOL) -> tuple:
    """``{s in subset : values[s] comparator threshold}`` for scalar values.

    ``comparator`` is one of ``"<="``, ``"=="``, ``"<"``; equality uses the
    same relative slack as value comparison in the engine.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError("level sets are defined for scalar values")
    idx = _subset(v.reshape(-1, 1), subset)
    slack = tol.mem * np.maximum(np.abs(v[idx]), abs(threshold))
    eq = np.abs(v[idx] - threshold) <= slack
    if comparator == "<=":
        hit = (v[idx] < threshold) | eq
    elif comparator == "==":
        hit = eq
    elif comparator == "<":
        hit = (v[idx] < threshold) & ~eq
    else:
        raise InvalidInputError(f"unknown comparator {comparator!r}")
    return tuple(int(i) for i in idx[hit])


def simplex_grid(m: int, resolution: int = 12) -> np.ndarray:
    """Strictly positive weights ``k / resolution`` summing to one."""
    if m == 1:
        return np.ones((1, 1))
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for k in range(1, remaining - slots + 2):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], resolution, m)
    return np.array(out, dtype=float) / resolution


@dataclass(frozen=True)
class OracleResult:
    indices: tuple
    implied_eps_bound: float

    def as_set(self) -> frozenset:
        return frozenset(self.indices)


def scalarization_oracle(source, subset, cone: Cone, weights=None,
                         tol: Tolerances = DEFAULT_TOL) -> OracleResult:
    """Union over strictly positive weights of all minimisers of ``w . f``.

    A minimiser for ``w`` is efficient for the orthant dilation with
    parameter ``eps`` whenever ``eps / (1 + m eps) < min_j w_j / sum w``;
    ``implied_eps_bound`` is the largest such bound over the grid, so the
    oracle set is contained in the Henig set once the family reaches it.
    """
    if not isinstance(cone, Orthant):
        raise UnsupportedRepresentationError("the scalarisation oracle needs an orthant cone")
    V = _values(source)
    idx = _subset(V, subset)
    W = simplex_grid(cone.dim) if weights is None else np.asarray(weights, dtype=float)
    if W.ndim != 2 or W.shape[1] != cone.dim or np.any(W <= 0):
        raise InvalidInputError("weights must be strictly positive rows of length m")
    S = V[idx] @ W.T
    chosen = set()
    for k in range(W.shape[0]):
        col = S[:, k]
        lo = col.min()
        chosen.update(int(i) for i in idx[col <= lo + tol.mem * max(1.0, abs(lo))])
    ratio = (W.min(axis=1) / W.sum(axis=1)).min()
    m = cone.dim
    # eps / (1 + m eps) < ratio  <=>  eps < ratio / (1 - m ratio)
    bound = math.inf if m * ratio >= 1 else float(ratio / (1 - m * ratio))
    return OracleResult(tuple(sorted(chosen)), bound)
