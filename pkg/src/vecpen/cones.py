"""Cones, cone-induced relations, dilating families and product-space lifts.

Vectors are plain 1-D numpy arrays. Every membership predicate exists in a
vectorised form (``contains_many``/``interior_many`` over an ``(N, dim)``
array) because the efficiency engine tests all pairwise differences at once.

Tolerances are relative: a non-strict row ``w.v >= 0`` is accepted when
``w.v >= -tau_mem * |v|`` with ``w`` normalised, and a strict row needs
``w.v > tau_strict * |v|``. Relative slack keeps every predicate positively
homogeneous, so a cone stays a cone after relaxation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, nnls

from .errors import (
    DimensionMismatchError,
    EmptyFamilyError,
    EmptyInteriorError,
    InvalidInputError,
    InvalidLiftError,
    UnsupportedRepresentationError,
)

TAU_MEM = 1e-9
TAU_STRICT = 1e-9
NORMS = ("l1", "l2", "linf")
DEFAULT_EPS_GRID = tuple(float(e) for e in np.logspace(-6, 6, 25))


@dataclass(frozen=True)
class Tolerances:
    mem: float = TAU_MEM
    strict: float = TAU_STRICT

    def __post_init__(self):
        if not (self.mem > 0 and self.strict > 0):
            raise InvalidInputError("tolerances must be positive")


DEFAULT_TOL = Tolerances()


def as_vec(x, dim: int | None = None) -> np.ndarray:
    """Validate ``x`` as a finite point of R^dim and return it as a float array."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector has non-finite entries")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


def vec_norm(V: np.ndarray, kind: str = "l2") -> np.ndarray:
    if kind == "l2":
        return np.linalg.norm(V, axis=-1)
    if kind == "l1":
        return np.abs(V).sum(axis=-1)
    if kind == "linf":
        return np.abs(V).max(axis=-1)
    raise InvalidInputError(f"unknown norm {kind!r}")


def dual_norm_kind(kind: str) -> str:
    return {"l1": "linf", "l2": "l2", "linf": "l1"}[kind]


def _tuple_vec(x) -> tuple:
    return tuple(float(c) for c in as_vec(x))


def _tuple_rows(rows) -> tuple:
    out = tuple(_tuple_vec(r) for r in rows)
    if not out:
        raise InvalidInputError("at least one row/generator is required")
    if len({len(r) for r in out}) != 1:
        raise DimensionMismatchError("rows have inconsistent lengths")
    return out


# ---------------------------------------------------------------------------
# Cone kinds
# ---------------------------------------------------------------------------


class Cone:
    """Base class of all cone representations (immutable, hashable)."""

    dim: int

    def contains(self, v, tol: Tolerances = DEFAULT_TOL) -> bool:
        return contains(self, v, tol)

    def interior_contains(self, v, tol: Tolerances = DEFAULT_TOL) -> bool:
        return interior_contains(self, v, tol)


@dataclass(frozen=True)
class Orthant(Cone):
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("orthant dimension must be positive")

    @property
    def dim(self):
        return self.m


@dataclass(frozen=True)
class FullSpace(Cone):
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("space dimension must be positive")

    @property
    def dim(self):
        return self.m


@dataclass(frozen=True)
class HalfspacePoly(Cone):
    """``{v : w_i . v >= 0 for every row w_i}``."""

    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", _tuple_rows(self.rows))

    @property
    def dim(self):
        return len(self.rows[0])

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


@dataclass(frozen=True)
class GeneratorPoly(Cone):
    """Conic hull of finitely many generators."""

    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", _tuple_rows(self.generators))

    @property
    def dim(self):
        return len(self.generators[0])

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.generators, dtype=float)


@dataclass(frozen=True)
class BishopPhelps(Cone):
    """``{v : q . v >= alpha * ||v||}`` for the chosen norm."""

    q: tuple
    alpha: float
    norm: str = "l2"

    def __post_init__(self):
        object.__setattr__(self, "q", _tuple_vec(self.q))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise InvalidInputError("Bishop-Phelps alpha must be finite and >= 0")
        if self.norm not in NORMS:
            raise InvalidInputError(f"unknown norm {self.norm!r}")
        if not any(self.q):
            raise InvalidInputError("Bishop-Phelps q must be non-zero")

    @property
    def dim(self):
        return len(self.q)

    @property
    def is_solid(self) -> bool:
        q = np.array(self.q)
        return self.alpha < float(vec_norm(q, dual_norm_kind(self.norm)))


@dataclass(frozen=True)
class ProductWithRay(Cone):
    """``base x R_>=``: the ordering cone of the penalised problem."""

    base: Cone

    @property
    def dim(self):
        return self.base.dim + 1


@dataclass(frozen=True)
class Lifted(Cone):
    """``{(v, t) : v + t h in base}`` for an interior direction ``h`` of ``base``."""

    base: Cone
    h: tuple

    def __post_init__(self):
        object.__setattr__(self, "h", _tuple_vec(self.h))
        if len(self.h) != self.base.dim:
            raise DimensionMismatchError("lifting direction has wrong dimension")
        if not interior_contains(self.base, np.array(self.h)):
            raise InvalidLiftError("h is not an interior point of the base cone")

    @property
    def dim(self):
        return self.base.dim + 1


@dataclass(frozen=True)
class IntUnionZero(Cone):
    """``int(base) U {0}``."""

    base: Cone

    @property
    def dim(self):
        return self.base.dim


class RelationKind(Enum):
    LEQ = "leq"      # x <=_A y  iff  y in x + A
    LNEQ = "lneq"    # y in x + A \ {0}
    LT = "lt"        # y in x + int A


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def _as_batch(cone: Cone, V) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V.reshape(1, -1)
    if V.ndim != 2 or V.shape[1] != cone.dim:
        raise DimensionMismatchError(
            f"cone has dimension {cone.dim}, got vectors of shape {V.shape}")
    return V


def _normalised_rows(W: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(W, axis=1)
    keep = n > 0
    return W[keep] / n[keep, None]


def _generator_contains(G: np.ndarray, V: np.ndarray, tol: Tolerances) -> np.ndarray:
    out = np.empty(len(V), dtype=bool)
    for k, v in enumerate(V):
        nv = np.linalg.norm(v)
        if nv == 0:
            out[k] = True
            continue
        _, res = nnls(G.T, v / nv)
        out[k] = res <= max(tol.mem, 1e-12)
    return out


def contains_many(cone: Cone, V, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorised :func:`contains` over the rows of ``V``."""
    V = _as_batch(cone, V)
    nv = np.linalg.norm(V, axis=1)
    if isinstance(cone, FullSpace):
        return np.ones(len(V), dtype=bool)
    if isinstance(cone, Orthant):
        return np.all(V >= -tol.mem * nv[:, None], axis=1)
    if isinstance(cone, HalfspacePoly):
        W = _normalised_rows(cone.matrix)
        if len(W) == 0:
            return np.ones(len(V), dtype=bool)
        return np.all(V @ W.T >= -tol.mem * nv[:, None], axis=1)
    if isinstance(cone, GeneratorPoly):
        return _generator_contains(cone.matrix, V, tol)
    if isinstance(cone, BishopPhelps):
        q = np.array(cone.q)
        s = (V @ q - cone.alpha * vec_norm(V, cone.norm)) / np.linalg.norm(q)
        return s >= -tol.mem * nv
    if isinstance(cone, ProductWithRay):
        return contains_many(cone.base, V[:, :-1], tol) & (V[:, -1] >= -tol.mem * nv)
    if isinstance(cone, Lifted):
        return contains_many(cone.base, V[:, :-1] + V[:, -1:] * np.array(cone.h), tol)
    if isinstance(cone, IntUnionZero):
        # the zero test is exact here; callers snap near-zero differences first
        return interior_many(cone.base, V, tol) | (nv == 0)
    raise UnsupportedRepresentationError(f"unknown cone kind {type(cone).__name__}")


def interior_many(cone: Cone, V, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorised :func:`interior_contains` over the rows of ``V``."""
    V = _as_batch(cone, V)
    nv = np.linalg.norm(V, axis=1)
    if isinstance(cone, FullSpace):
        return np.ones(len(V), dtype=bool)
    if isinstance(cone, Orthant):
        return np.all(V > tol.strict * nv[:, None], axis=1)
    if isinstance(cone, HalfspacePoly):
        W = _normalised_rows(cone.matrix)
        if len(W) == 0:
            return np.ones(len(V), dtype=bool)
        return np.all(V @ W.T > tol.strict * nv[:, None], axis=1)
    if isinstance(cone, GeneratorPoly):
        return interior_many(to_halfspace(cone), V, tol)
    if isinstance(cone, BishopPhelps):
        q = np.array(cone.q)
        s = (V @ q - cone.alpha * vec_norm(V, cone.norm)) / np.linalg.norm(q)
        return s > tol.strict * nv
    if isinstance(cone, ProductWithRay):
        return interior_many(cone.base, V[:, :-1], tol) & (V[:, -1] > tol.strict * nv)
    if isinstance(cone, Lifted):
        return interior_many(cone.base, V[:, :-1] + V[:, -1:] * np.array(cone.h), tol)
    if isinstance(cone, IntUnionZero):
        return interior_many(cone.base, V, tol)
    raise UnsupportedRepresentationError(f"unknown cone kind {type(cone).__name__}")


def contains(cone: Cone, v, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``v`` lies in ``cone`` (non-strict rows relaxed by ``tol.mem``)."""
    return bool(contains_many(cone, as_vec(v, cone.dim), tol)[0])


def interior_contains(cone: Cone, v, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``v`` lies in the interior of ``cone`` (strict margin ``tol.strict``)."""
    return bool(interior_many(cone, as_vec(v, cone.dim), tol)[0])


def snap_zero(D: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Replace rows of norm <= tol.mem by exact zeros."""
    D = np.array(D, dtype=float, copy=True)
    small = np.linalg.norm(D, axis=-1) <= tol.mem
    D[small] = 0.0
    return D


def has_interior(cone: Cone) -> bool:
    if isinstance(cone, (Orthant, FullSpace)):
        return True
    if isinstance(cone, HalfspacePoly):
        return _halfspace_interior_point(cone) is not None
    if isinstance(cone, GeneratorPoly):
        return np.linalg.matrix_rank(cone.matrix) == cone.dim
    if isinstance(cone, BishopPhelps):
        return cone.is_solid
    if isinstance(cone, (ProductWithRay, Lifted, IntUnionZero)):
        return has_interior(cone.base)
    raise UnsupportedRepresentationError(f"unknown cone kind {type(cone).__name__}")


def relate(rel: RelationKind, cone: Cone, x, y, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Evaluate ``x rel_A y`` for the relation induced by ``cone``."""
    x = as_vec(x, cone.dim)
    y = as_vec(y, cone.dim)
    d = snap_zero(y - x, tol)
    if rel is RelationKind.LEQ:
        return contains(cone, d, tol)
    if rel is RelationKind.LNEQ:
        return bool(np.any(d != 0)) and contains(cone, d, tol)
    if rel is RelationKind.LT:
        if not has_interior(cone):
            raise EmptyInteriorError("strict relation needs a cone with interior")
        return interior_contains(cone, d, tol)
    raise InvalidInputError(f"unknown relation {rel!r}")


# ---------------------------------------------------------------------------
# Small-dimension double description
# ---------------------------------------------------------------------------


def _null_directions(A: np.ndarray, n: int) -> list[np.ndarray]:
    """One-dimensional null spaces of all (n-1)-row subsets of ``A``."""
    out = []
    k = n - 1
    if k == 0:
        return [np.eye(n)[0]]
    for idx in itertools.combinations(range(len(A)), k):
        N = null_space(A[list(idx)])
        if N.shape[1] == 1:
            out.append(N[:, 0])
    return out


def _dedupe(vectors: Sequence[np.ndarray], decimals: int = 9) -> list[np.ndarray]:
    seen, out = set(), []
    for v in vectors:
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        u = v / nv
        key = tuple(np.round(u, decimals) + 0.0)
        if key not in seen:
            seen.add(key)
            out.append(u)
    return out


def _dual_candidates(A: np.ndarray, n: int) -> list[np.ndarray]:
    lineality = null_space(A) if len(A) else np.eye(n)
    aug = np.vstack([A] + ([lineality.T] if lineality.size else []))
    cands = []
    for d in _null_directions(aug, n):
        cands += [d, -d]
    for col in lineality.T:
        cands += [col, -col]
    return _dedupe(cands)


def to_halfspace(cone: GeneratorPoly) -> Cone:
    """Facet normals of a generated cone (supported for dim <= 3)."""
    if cone.dim > 3:
        raise UnsupportedRepresentationError(
            "generator-to-halfspace conversion is only available for dim <= 3")
    G = cone.matrix
    G = G[np.linalg.norm(G, axis=1) > 0]
    if len(G) == 0:
        # the zero cone: every direction is a (two-sided) facet normal
        eye = np.eye(cone.dim)
        return HalfspacePoly(np.vstack([eye, -eye]))
    Gn = G / np.linalg.norm(G, axis=1)[:, None]
    normals = [w for w in _dual_candidates(Gn, cone.dim) if np.all(Gn @ w >= -1e-12)]
    if not normals:
        return FullSpace(cone.dim)
    return HalfspacePoly(np.array(normals))


def polyhedral_generators(cone: Cone) -> list[np.ndarray]:
    """Extreme rays plus two-sided lineality directions of a polyhedral cone."""
    if isinstance(cone, Orthant):
        return list(np.eye(cone.m))
    if isinstance(cone, FullSpace):
        eye = np.eye(cone.m)
        return list(eye) + list(-eye)
    if isinstance(cone, GeneratorPoly):
        return _dedupe(list(cone.matrix))
    if isinstance(cone, HalfspacePoly):
        W = _normalised_rows(cone.matrix)
        return [r for r in _dual_candidates(W, cone.dim) if np.all(W @ r >= -1e-12)]
    if isinstance(cone, ProductWithRay):
        base = polyhedral_generators(cone.base)
        z = np.zeros(cone.base.dim)
        return [np.append(g, 0.0) for g in base] + [np.append(z, 1.0)]
    raise UnsupportedRepresentationError(
        f"{type(cone).__name__} has no finite generator list")


# ---------------------------------------------------------------------------
# Interior points, sampling, dilation
# ---------------------------------------------------------------------------


def _halfspace_interior_point(cone: HalfspacePoly) -> np.ndarray | None:
    W = _normalised_rows(cone.matrix)
    n = cone.dim
    if len(W) == 0:
        return np.ones(n)
    # maximise s subject to W v >= s, -1 <= v <= 1, s <= 1
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-W, np.ones((len(W), 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(len(W)),
                  bounds=[(-1, 1)] * n + [(None, 1)], method="highs")
    if res.status != 0 or -res.fun <= 1e-9:
        return None
    return res.x[:n]


def canonical_interior_point(cone: Cone, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Deterministic interior point used as the lifting direction.

    Orthant and full space give the all-ones vector, a halfspace cone the sum
    of its row normals, a Bishop-Phelps cone its vector ``q``. When the
    preferred candidate is not strictly interior a deterministic fallback is
    used (LP centre for rows, norm-dual maximiser for Bishop-Phelps).
    """
    if isinstance(cone, (Orthant, FullSpace)):
        return np.ones(cone.dim)
    if not has_interior(cone):
        raise EmptyInteriorError(f"{type(cone).__name__} has empty interior")
    if isinstance(cone, HalfspacePoly):
        h = cone.matrix.sum(axis=0)
        if interior_contains(cone, h, tol):
            return h
        return _halfspace_interior_point(cone)
    if isinstance(cone, GeneratorPoly):
        h = cone.matrix.sum(axis=0)
        if interior_contains(cone, h, tol):
            return h
        return canonical_interior_point(to_halfspace(cone), tol)
    if isinstance(cone, BishopPhelps):
        q = np.array(cone.q)
        if interior_contains(cone, q, tol):
            return q
        if cone.norm == "linf":
            h = np.sign(q)
        elif cone.norm == "l1":
            h = np.zeros_like(q)
            i = int(np.argmax(np.abs(q)))
            h[i] = np.sign(q[i])
        else:
            h = q
        return h
    if isinstance(cone, ProductWithRay):
        return np.append(canonical_interior_point(cone.base, tol), 1.0)
    if isinstance(cone, Lifted):
        return np.append(np.zeros(cone.base.dim), 1.0)
    if isinstance(cone, IntUnionZero):
        return canonical_interior_point(cone.base, tol)
    raise UnsupportedRepresentationError(f"unknown cone kind {type(cone).__name__}")


def _boundary_points(cone: Cone, inside: np.ndarray, outside: np.ndarray,
                     tol: Tolerances, steps: int = 60) -> np.ndarray:
    """Bisect every segment ``inside -> outside[k]`` for the last member point."""
    lo = np.zeros(len(outside))
    hi = np.ones(len(outside))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        ok = contains_many(cone, (1 - mid)[:, None] * inside + mid[:, None] * outside, tol)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return (1 - lo)[:, None] * inside + lo[:, None] * outside


def ray_samples(cone: Cone, n: int = 32, seed: int = 0,
                tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Deterministic unit-norm sample of ``cone \\ {0}``.

    Combines the finite generators (polyhedral kinds), random members and
    points located on the boundary by bisection, so that boundary rays are
    always represented.
    """
    rng = np.random.default_rng(seed)
    m = cone.dim
    out: list[np.ndarray] = []
    try:
        gens = polyhedral_generators(cone)
        out += gens
    except UnsupportedRepresentationError:
        gens = []
    dirs = rng.standard_normal((4 * n, m))
    member = contains_many(cone, dirs, tol)
    out += list(dirs[member][:n])
    if len(gens) > 1:
        G = np.array(gens)
        for _ in range(n // 2):
            w = rng.exponential(size=len(G))
            out.append(w @ G)
    if has_interior(cone):
        try:
            h = canonical_interior_point(cone, tol)
        except EmptyInteriorError:
            h = None
        if h is not None:
            h = h / np.linalg.norm(h)
            out.append(h)
            outside = dirs[~member][:n]
            if len(outside):
                outside = outside / np.linalg.norm(outside, axis=1, keepdims=True)
                out += list(_boundary_points(cone, h, outside, tol))
    out = _dedupe(out)
    out = [v for v, ok in zip(out, contains_many(cone, np.array(out), tol)) if ok] if out else []
    if not out:
        raise EmptyInteriorError("cone has no non-zero sampled member")
    return np.array(out)


@dataclass(frozen=True)
class DilationCheck:
    ok: bool
    witness: np.ndarray | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_dilating_for(C: Cone, H: Cone, rays=None, tol: Tolerances = DEFAULT_TOL,
                    convexity_samples: int = 24) -> DilationCheck:
    """Sampled test that ``H`` is a Henig dilating cone of ``C``.

    Checks ``H + H in H`` on pairwise sums of a member sample of ``H`` and
    ``interior_contains(H, r)`` for every supplied ray of ``C``.
    """
    if C.dim != H.dim:
        raise DimensionMismatchError("C and H live in different spaces")
    if rays is None:
        rays = ray_samples(C, tol=tol)
    rays = np.asarray(rays, dtype=float)
    if rays.ndim != 2 or len(rays) == 0:
        raise InvalidInputError("ray_samples must be a non-empty list of vectors")
    if not has_interior(H):
        return DilationCheck(False, rays[0], "H has empty interior")
    hs = ray_samples(H, n=convexity_samples, seed=1, tol=tol)
    i, j = np.triu_indices(len(hs))
    sums = hs[i] + hs[j]
    for k in np.flatnonzero(~contains_many(H, sums, tol)):
        # the slack of a sum is only bounded by the summed slacks of its unit
        # terms; the extra factor 2 absorbs rounding at that bound
        ns = np.linalg.norm(sums[k])
        scale = 4.0 / ns if ns > 0 else np.inf
        if ns == 0 or contains(H, sums[k], Tolerances(tol.mem * scale, tol.strict)):
            continue
        return DilationCheck(False, sums[k], "H + H not contained in H")
    inside = interior_many(H, rays, tol)
    if not inside.all():
        k = int(np.argmin(inside))
        return DilationCheck(False, rays[k], "ray of C not in int H")
    return DilationCheck(True)


# ---------------------------------------------------------------------------
# Derived cones
# ---------------------------------------------------------------------------


def product_with_ray(C: Cone) -> ProductWithRay:
    return ProductWithRay(C)


def int_union_zero(C: Cone) -> IntUnionZero:
    if isinstance(C, FullSpace):
        return C
    if not has_interior(C):
        raise EmptyInteriorError("int C U {0} needs a cone with interior")
    return IntUnionZero(C)


def lift_cone(H: Cone, h) -> Lifted:
    """``{(v, t) : v in H - t h}``; raises InvalidLiftError unless h is interior."""
    return Lifted(H, as_vec(h, H.dim))


def restrict_to_zero(K: Cone) -> Cone:
    """Section ``{v : (v, 0) in K}`` of a cone over ``Y x R``."""
    if K.dim < 2:
        raise DimensionMismatchError("restriction needs a cone of dimension >= 2")
    if isinstance(K, Lifted):
        return K.base
    if isinstance(K, ProductWithRay):
        return K.base
    if isinstance(K, Orthant):
        return Orthant(K.m - 1)
    if isinstance(K, FullSpace):
        return FullSpace(K.m - 1)
    if isinstance(K, HalfspacePoly):
        W = K.matrix[:, :-1]
        W = W[np.linalg.norm(W, axis=1) > 0]
        if len(W) == 0:
            return FullSpace(K.dim - 1)
        return HalfspacePoly(W)
    if isinstance(K, BishopPhelps):
        return BishopPhelps(K.q[:-1], K.alpha, K.norm)
    if isinstance(K, GeneratorPoly):
        return restrict_to_zero(to_halfspace(K))
    if isinstance(K, IntUnionZero):
        section = restrict_to_zero(K.base)
        if has_interior(section):
            p = canonical_interior_point(section)
            if interior_contains(K.base, np.append(p, 0.0)):
                return IntUnionZero(section)
        raise UnsupportedRepresentationError(
            "section of int(K) U {0} without interior points at level zero")
    raise UnsupportedRepresentationError(f"unknown cone kind {type(K).__name__}")


def halfspace_rows(cone: Cone) -> np.ndarray:
    if isinstance(cone, Orthant):
        return np.eye(cone.m)
    if isinstance(cone, HalfspacePoly):
        return cone.matrix
    if isinstance(cone, GeneratorPoly):
        return halfspace_rows(to_halfspace(cone))
    if isinstance(cone, ProductWithRay):
        W = halfspace_rows(cone.base)
        top = np.column_stack([W, np.zeros(len(W))])
        return np.vstack([top, np.eye(cone.dim)[-1]])
    raise UnsupportedRepresentationError(
        f"{type(cone).__name__} has no halfspace representation")


def intersect(A: Cone, B: Cone) -> Cone:
    """Intersection of two cones; closed form only for row-representable kinds."""
    if A.dim != B.dim:
        raise DimensionMismatchError("cones live in different spaces")
    if isinstance(A, FullSpace):
        return B
    if isinstance(B, FullSpace):
        return A
    return HalfspacePoly(np.vstack([halfspace_rows(A), halfspace_rows(B)]))


# ---------------------------------------------------------------------------
# Dilating families
# ---------------------------------------------------------------------------

FAMILY_KINDS = ("henig_epsilon_orthant", "bishop_phelps_sweep", "explicit", "lifted")


@dataclass(frozen=True)
class DilatingFamily:
    """Finite list of validated dilating cones ``(parameter, cone)`` of ``base_cone``."""

    base_cone: Cone
    members: tuple
    kind: str
    rejected: tuple = field(default=(), compare=False)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def cones(self) -> list[Cone]:
        return [c for _, c in self.members]

    @property
    def params(self) -> list[float]:
        return [p for p, _ in self.members]

    def summary(self) -> dict:
        finite = [p for p in self.params if math.isfinite(p)]
        return {
            "kind": self.kind,
            "size": len(self.members),
            "rejected": len(self.rejected),
            "param_min": min(finite) if finite else None,
            "param_max": max(finite) if finite else None,
            "full_space_fallback": any(isinstance(c, FullSpace) for c in self.cones),
        }


def epsilon_dilation(C: Cone, eps: float) -> HalfspacePoly:
    """Rows ``w_i + eps * sum_j w_j``; for the orthant ``v_i + eps * sum(v) >= 0``."""
    W = halfspace_rows(C)
    return HalfspacePoly(W + eps * W.sum(axis=0, keepdims=True))


def build_family(C: Cone, kind: str = "henig_epsilon_orthant", eps_grid=DEFAULT_EPS_GRID,
                 members=None, norm: str = "l2", fallback_full_space: bool = True,
                 tol: Tolerances = DEFAULT_TOL) -> DilatingFamily:
    """Build and validate a finite family of Henig dilating cones of ``C``.

    Members failing :func:`is_dilating_for` are dropped and listed in
    ``rejected``. If nothing survives, the full space (a dilating cone of
    every cone) is used when ``fallback_full_space`` is set; otherwise
    EmptyFamilyError is raised. Results are memoised on the (hashable) inputs.
    """
    grid = tuple(float(e) for e in eps_grid)
    members = tuple((float(p), H) for p, H in members) if members else None
    return _build_family(C, kind, grid, members, norm, fallback_full_space, tol)


@lru_cache(maxsize=256)
def _build_family(C: Cone, kind: str, eps_grid: tuple, members, norm: str,
                  fallback_full_space: bool, tol: Tolerances) -> DilatingFamily:
    if kind == "explicit":
        if not members:
            raise EmptyFamilyError("explicit family needs members")
        candidates = [(float(p), H) for p, H in members]
    else:
        grid = [float(e) for e in eps_grid]
        if not grid or any(e <= 0 for e in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidInputError("eps_grid must be positive and strictly increasing")
        if kind == "henig_epsilon_orthant":
            candidates = [(e, epsilon_dilation(C, e)) for e in grid]
        elif kind == "bishop_phelps_sweep":
            q = np.ones(C.dim)
            candidates = [(e, BishopPhelps(q, e, norm)) for e in grid]
        else:
            raise InvalidInputError(f"unknown family kind {kind!r}")
    rays = ray_samples(C, tol=tol)
    kept, rejected = [], []
    for p, H in candidates:
        check = is_dilating_for(C, H, rays, tol)
        if check.ok:
            kept.append((p, H))
        else:
            rejected.append((p, check.reason))
    if not kept:
        if not fallback_full_space:
            raise EmptyFamilyError(f"no member of the {kind} family dilates the cone")
        kept = [(math.inf, FullSpace(C.dim))]
    return DilatingFamily(C, tuple(kept), kind, tuple(rejected))


DEFAULT_LIFT_SCALES = (1.0, 1e2, 1e4, 1e6)


def lift_family(family: DilatingFamily, scales=DEFAULT_LIFT_SCALES) -> DilatingFamily:
    """Matched product-space family: every member lifted along its canonical
    interior direction, once per scale. Zero-sections return the base members."""
    return _lift_family(family, tuple(float(s) for s in scales))


@lru_cache(maxsize=256)
def _lift_family(family: DilatingFamily, scales: tuple) -> DilatingFamily:
    members = []
    for p, H in family.members:
        h = canonical_interior_point(H)
        for s in scales:
            members.append((p, Lifted(H, s * h)))
    return DilatingFamily(ProductWithRay(family.base_cone), tuple(members), "lifted")
