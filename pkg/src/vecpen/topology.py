"""Analytic shapes with exact interior, boundary and distance predicates.

Every shape is closed. Classification works on the defining inequalities
with an absolute slack ``tol`` so that points placed on a boundary by a
formula (for instance ``cos``/``sin`` samples of a circle) classify as
boundary points.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .cones import TAU_MEM, _tuple_rows, _tuple_vec, as_vec, dual_norm_kind, vec_norm
from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    UnsupportedRepresentationError,
)


class Region(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class Shape:
    dim: int

    def classify(self, x, tol: float = TAU_MEM) -> Region:
        return classify(self, x, tol)

    def contains(self, x, tol: float = TAU_MEM) -> bool:
        return classify(self, x, tol) is not Region.EXTERIOR

    def interior_contains(self, x, tol: float = TAU_MEM) -> bool:
        return classify(self, x, tol) is Region.INTERIOR

    def boundary_contains(self, x, tol: float = TAU_MEM) -> bool:
        return classify(self, x, tol) is Region.BOUNDARY


@dataclass(frozen=True)
class Ball(Shape):
    center: tuple
    radius: float
    norm: str = "l2"

    def __post_init__(self):
        object.__setattr__(self, "center", _tuple_vec(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius >= 0:
            raise InvalidInputError("ball radius must be >= 0")
        vec_norm(np.zeros(1), self.norm)

    @property
    def dim(self):
        return len(self.center)


@dataclass(frozen=True)
class Box(Shape):
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", _tuple_vec(self.lo))
        object.__setattr__(self, "hi", _tuple_vec(self.hi))
        if len(self.lo) != len(self.hi):
            raise DimensionMismatchError("box corners have different dimensions")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise InvalidInputError("box requires lo <= hi componentwise")

    @property
    def dim(self):
        return len(self.lo)


@dataclass(frozen=True)
class HalfspaceSet(Shape):
    """``{x : n_i . x <= b_i for all i}``."""

    normals: tuple
    offsets: tuple

    def __post_init__(self):
        object.__setattr__(self, "normals", _tuple_rows(self.normals))
        object.__setattr__(self, "offsets", _tuple_vec(self.offsets))
        if len(self.offsets) != len(self.normals):
            raise DimensionMismatchError("one offset per normal is required")

    @property
    def dim(self):
        return len(self.normals[0])


@dataclass(frozen=True)
class ProductShape(Shape):
    a: Shape
    b: Shape

    @property
    def dim(self):
        return self.a.dim + self.b.dim


@dataclass(frozen=True)
class UnionShape(Shape):
    """Finite union. A point counts as interior when it is interior to some part,
    which is exact as long as no two parts glue along a common boundary."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise InvalidInputError("union needs at least one part")
        if len({p.dim for p in parts}) != 1:
            raise DimensionMismatchError("union parts have different dimensions")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim


@dataclass(frozen=True)
class EmptyShape(Shape):
    m: int

    @property
    def dim(self):
        return self.m


CONVEX_KINDS = (Ball, Box, HalfspaceSet, EmptyShape)


def is_convex_kind(shape: Shape) -> bool:
    if isinstance(shape, ProductShape):
        return is_convex_kind(shape.a) and is_convex_kind(shape.b)
    return isinstance(shape, CONVEX_KINDS)


def _check(shape: Shape, x) -> np.ndarray:
    return as_vec(x, shape.dim)


def _classify(shape: Shape, x: np.ndarray, tol: float) -> Region:
    if isinstance(shape, EmptyShape):
        return Region.EXTERIOR
    if isinstance(shape, Ball):
        d = float(vec_norm(x - np.array(shape.center), shape.norm))
        if d < shape.radius - tol:
            return Region.INTERIOR
        return Region.BOUNDARY if d <= shape.radius + tol else Region.EXTERIOR
    if isinstance(shape, Box):
        lo, hi = np.array(shape.lo), np.array(shape.hi)
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            return Region.EXTERIOR
        if np.all(x > lo + tol) and np.all(x < hi - tol):
            return Region.INTERIOR
        return Region.BOUNDARY
    if isinstance(shape, HalfspaceSet):
        N = np.array(shape.normals)
        b = np.array(shape.offsets)
        n = np.linalg.norm(N, axis=1)
        zero = n == 0
        if np.any(b[zero] < -tol):
            return Region.EXTERIOR
        s = (N[~zero] @ x - b[~zero]) / n[~zero]
        if np.any(s > tol):
            return Region.EXTERIOR
        return Region.INTERIOR if np.all(s < -tol) else Region.BOUNDARY
    if isinstance(shape, ProductShape):
        ra = _classify(shape.a, x[: shape.a.dim], tol)
        rb = _classify(shape.b, x[shape.a.dim:], tol)
        if Region.EXTERIOR in (ra, rb):
            return Region.EXTERIOR
        if ra is Region.INTERIOR and rb is Region.INTERIOR:
            return Region.INTERIOR
        return Region.BOUNDARY
    if isinstance(shape, UnionShape):
        regions = [_classify(p, x, tol) for p in shape.parts]
        if Region.INTERIOR in regions:
            return Region.INTERIOR
        if Region.BOUNDARY in regions:
            return Region.BOUNDARY
        return Region.EXTERIOR
    raise UnsupportedRepresentationError(f"unknown shape kind {type(shape).__name__}")


def classify(shape: Shape, x, tol: float = TAU_MEM) -> Region:
    """Interior, boundary or exterior, decided from the defining inequalities."""
    return _classify(shape, _check(shape, x), tol)


def classify_many(shape: Shape, X, tol: float = TAU_MEM) -> list[Region]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != shape.dim:
        raise DimensionMismatchError(f"expected points of dimension {shape.dim}")
    return [_classify(shape, x, tol) for x in X]


# ---------------------------------------------------------------------------
# Sections at the last coordinate
# ---------------------------------------------------------------------------


def section(shape: Shape, t: float, tol: float = TAU_MEM) -> Shape:
    """Analytic shape ``{x : (x, t) in shape}`` over the first ``dim - 1`` coordinates."""
    if shape.dim < 2:
        raise DimensionMismatchError("section needs a shape of dimension >= 2")
    t = float(t)
    m = shape.dim - 1
    if isinstance(shape, EmptyShape):
        return EmptyShape(m)
    if isinstance(shape, Ball):
        c = np.array(shape.center)
        gap = abs(t - c[-1])
        if gap > shape.radius + tol:
            return EmptyShape(m)
        gap = min(gap, shape.radius)
        if shape.norm == "l2":
            r = np.sqrt(shape.radius ** 2 - gap ** 2)
        elif shape.norm == "l1":
            r = shape.radius - gap
        else:
            r = shape.radius
        return Ball(c[:-1], r, shape.norm)
    if isinstance(shape, Box):
        if not (shape.lo[-1] - tol <= t <= shape.hi[-1] + tol):
            return EmptyShape(m)
        return Box(shape.lo[:-1], shape.hi[:-1])
    if isinstance(shape, HalfspaceSet):
        N = np.array(shape.normals)
        b = np.array(shape.offsets) - N[:, -1] * t
        return HalfspaceSet(N[:, :-1], b)
    if isinstance(shape, ProductShape):
        if shape.b.dim == 1:
            return shape.a if shape.b.contains([t], tol) else EmptyShape(m)
        return ProductShape(shape.a, section(shape.b, t, tol))
    if isinstance(shape, UnionShape):
        parts = [section(p, t, tol) for p in shape.parts]
        parts = [p for p in parts if not isinstance(p, EmptyShape)]
        if not parts:
            return EmptyShape(m)
        return parts[0] if len(parts) == 1 else UnionShape(tuple(parts))
    raise UnsupportedRepresentationError(f"unknown shape kind {type(shape).__name__}")


def restrict_shape_at(shape: Shape, t: float, tol: float = TAU_MEM) -> Callable:
    """Membership predicate ``x -> (x, t) in shape``."""
    def predicate(x) -> bool:
        return shape.contains(np.append(as_vec(x, shape.dim - 1), t), tol)
    return predicate


# ---------------------------------------------------------------------------
# Topology checks
# ---------------------------------------------------------------------------


def segment_grid(n: int = 64) -> np.ndarray:
    """``n`` uniform interior samples of (0, 1) followed by 1."""
    return np.append(np.arange(1, n + 1) / (n + 1), 1.0)


def check_halfopen_segment(shape: Shape, x, y, grid=None, tol: float = TAU_MEM) -> bool:
    """Whether every sampled point ``y + lam (x - y)``, lam in (0, 1], is interior.

    ``x`` must be interior and ``y`` in the closed shape; only convex kinds are
    accepted because the property is a statement about convex sets.
    """
    if not is_convex_kind(shape):
        raise UnsupportedRepresentationError("half-open segment check needs a convex shape")
    x = _check(shape, x)
    y = _check(shape, y)
    if classify(shape, x, tol) is not Region.INTERIOR:
        raise InvalidInputError("x must be an interior point")
    if classify(shape, y, tol) is Region.EXTERIOR:
        raise InvalidInputError("y must lie in the closure")
    lam = segment_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(lam <= 0) or np.any(lam > 1):
        raise InvalidInputError("segment grid must lie in (0, 1]")
    return all(classify(shape, y + l * (x - y), tol) is Region.INTERIOR for l in lam)


def segment_exit(shape: Shape, x, y) -> np.ndarray:
    """Farthest point of the segment ``[x, y]`` that stays in a convex shape.

    ``x`` must lie in the shape. Returns ``y`` itself when the whole segment is
    inside, otherwise the crossing point with the boundary. Supported for l2
    balls, boxes and halfspace sets.
    """
    x = _check(shape, x)
    y = _check(shape, y)
    d = y - x
    if isinstance(shape, Ball) and shape.norm == "l2":
        w = x - np.array(shape.center)
        a, b, c = float(d @ d), float(w @ d), float(w @ w) - shape.radius ** 2
        if a == 0 or c > 0:
            s = 1.0
        else:
            s = (-b + np.sqrt(max(b * b - a * c, 0.0))) / a
    elif isinstance(shape, (Box, HalfspaceSet)):
        if isinstance(shape, Box):
            m = shape.dim
            N = np.vstack([np.eye(m), -np.eye(m)])
            off = np.concatenate([shape.hi, -np.array(shape.lo)])
        else:
            N, off = np.array(shape.normals), np.array(shape.offsets)
        rate = N @ d
        slack = off - N @ x
        pos = rate > 0
        s = float(np.min(np.maximum(slack[pos], 0.0) / rate[pos])) if pos.any() else 1.0
    else:
        raise UnsupportedRepresentationError(
            f"segment exit is not available for {type(shape).__name__}")
    s = min(max(s, 0.0), 1.0)
    return y if s == 1.0 else x + s * d


@dataclass(frozen=True)
class RestrictionReport:
    """Probes in only one of restriction-of-interior (lhs) and interior-of-restriction (rhs)."""

    lhs_only: tuple
    rhs_only: tuple
    agree: tuple

    @property
    def consistent(self) -> bool:
        return not self.lhs_only and not self.rhs_only


def check_restriction_interior(shape: Shape, t: float, probes, tol: float = TAU_MEM) -> RestrictionReport:
    """Compare ``{x : (x,t) in int S}`` with ``int {x : (x,t) in S}`` on probe points.

    Returned tuples hold probe indices.
    """
    probes = np.asarray(probes, dtype=float)
    if probes.ndim != 2 or probes.shape[1] != shape.dim - 1:
        raise DimensionMismatchError(f"probes must have dimension {shape.dim - 1}")
    sec = section(shape, t, tol)
    lhs_only, rhs_only, agree = [], [], []
    for k, x in enumerate(probes):
        lhs = classify(shape, np.append(x, t), tol) is Region.INTERIOR
        rhs = classify(sec, x, tol) is Region.INTERIOR
        if lhs and not rhs:
            lhs_only.append(k)
        elif rhs and not lhs:
            rhs_only.append(k)
        else:
            agree.append(k)
    return RestrictionReport(tuple(lhs_only), tuple(rhs_only), tuple(agree))


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def _combine(da: float, db: float, norm: str) -> float:
    if norm == "l2":
        return float(np.hypot(da, db))
    if norm == "l1":
        return da + db
    return max(da, db)


def _numeric_distance(shape: Shape, x: np.ndarray, norm: str) -> float:
    if not is_convex_kind(shape):
        raise UnsupportedRepresentationError("numeric distance needs a convex shape")
    cons = []
    if isinstance(shape, HalfspaceSet):
        N, b = np.array(shape.normals), np.array(shape.offsets)
        cons.append({"type": "ineq", "fun": lambda z: b - N @ z, "jac": lambda z: -N})
    elif isinstance(shape, Ball):
        c = np.array(shape.center)
        cons.append({"type": "ineq",
                     "fun": lambda z: shape.radius ** 2 - float(vec_norm(z - c, shape.norm)) ** 2})
    else:
        raise UnsupportedRepresentationError(
            f"no distance routine for {type(shape).__name__} in the {norm} norm")
    res = minimize(lambda z: float(np.sum((z - x) ** 2)), x, jac=lambda z: 2 * (z - x),
                   constraints=cons, method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    if not res.success:
        raise UnsupportedRepresentationError(f"distance computation failed: {res.message}")
    if norm != "l2":
        # the l2 projection is only an upper bound in other norms; refine directly
        res = minimize(lambda z: float(vec_norm(z - x, norm)), res.x, constraints=cons,
                       method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    return float(vec_norm(res.x - x, norm))


def distance(shape: Shape, x, norm: str = "l2", tol: float = TAU_MEM) -> float:
    """Distance from ``x`` to the closed shape in the given norm (0 on the shape)."""
    x = _check(shape, x)
    if classify(shape, x, tol) is not Region.EXTERIOR:
        return 0.0
    if isinstance(shape, EmptyShape):
        return float("inf")
    if isinstance(shape, Ball) and shape.norm == norm:
        return max(0.0, float(vec_norm(x - np.array(shape.center), norm)) - shape.radius)
    if isinstance(shape, Box):
        return float(vec_norm(x - np.clip(x, shape.lo, shape.hi), norm))
    if isinstance(shape, HalfspaceSet) and len(shape.normals) == 1:
        n = np.array(shape.normals[0])
        return max(0.0, (n @ x - shape.offsets[0]) / float(vec_norm(n, dual_norm_kind(norm))))
    if isinstance(shape, ProductShape):
        da = distance(shape.a, x[: shape.a.dim], norm, tol)
        db = distance(shape.b, x[shape.a.dim:], norm, tol)
        return _combine(da, db, norm)
    if isinstance(shape, UnionShape):
        return min(distance(p, x, norm, tol) for p in shape.parts)
    return _numeric_distance(shape, x, norm)


def distance_to_complement(shape: Shape, x, norm: str = "l2", tol: float = TAU_MEM) -> float:
    """Distance from ``x`` to the closure of the complement (0 outside the interior)."""
    x = _check(shape, x)
    if classify(shape, x, tol) is not Region.INTERIOR:
        return 0.0
    if isinstance(shape, Ball):
        if shape.norm != norm:
            raise UnsupportedRepresentationError("complement distance needs matching norms")
        return shape.radius - float(vec_norm(x - np.array(shape.center), norm))
    if isinstance(shape, Box):
        return float(min(np.min(x - np.array(shape.lo)), np.min(np.array(shape.hi) - x)))
    if isinstance(shape, HalfspaceSet):
        N, b = np.array(shape.normals), np.array(shape.offsets)
        keep = np.linalg.norm(N, axis=1) > 0
        dn = vec_norm(N[keep], dual_norm_kind(norm))
        return float(np.min((b[keep] - N[keep] @ x) / dn))
    if isinstance(shape, ProductShape):
        return min(distance_to_complement(shape.a, x[: shape.a.dim], norm, tol),
                   distance_to_complement(shape.b, x[shape.a.dim:], norm, tol))
    raise UnsupportedRepresentationError(
        f"complement distance is not available for {type(shape).__name__}")


def signed_distance(shape: Shape, x, norm: str = "l2", tol: float = TAU_MEM) -> float:
    """``dist(x, S) - dist(x, complement)``: negative inside, zero on the boundary."""
    return distance(shape, x, norm, tol) - distance_to_complement(shape, x, norm, tol)
