"""Optimisation instances on a finite sample of the ambient domain.

An :class:`Instance` stores the sample ``D`` as an ``(N, dim_x)`` array, the
feasible subset ``S`` as sorted point indices and, optionally, an analytic
shape for ``S`` from which every feasible point receives an interior or
boundary tag. Objective, penalisation and extended-objective values are
evaluated once at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import (
    DEFAULT_EPS_GRID,
    DEFAULT_LIFT_SCALES,
    DEFAULT_TOL,
    Cone,
    DilatingFamily,
    Orthant,
    Tolerances,
    build_family,
    lift_family,
    product_with_ray,
)
from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    UnsupportedRepresentationError,
)
from .convexity import segment_closure
from .topology import (
    Ball,
    Box,
    Region,
    Shape,
    classify,
    distance,
    segment_exit,
    signed_distance,
)

OBJECTIVE_KINDS = ("table", "linear", "sqrt_example", "identity")
PENALISATION_KINDS = ("distance_to_s", "signed_distance", "table", "neg_sqrt", "neg_linf_norm")
PROFILES = ("convex-linear", "convex-quadratic", "arbitrary-table")
INTERIOR = Region.INTERIOR.value
BOUNDARY = Region.BOUNDARY.value


def _freeze(a):
    if a is None:
        return None
    arr = np.array(a, dtype=float)
    return tuple(map(tuple, arr)) if arr.ndim == 2 else tuple(arr.tolist())


@dataclass(frozen=True)
class ObjectiveSpec:
    """Objective ``f``: a value table, ``x -> A x + b``, or one of two builtins.

    ``sqrt_example`` maps ``x in R^2`` to ``(x1, sqrt|x1 x2|)``, divided by
    ``|x|_inf`` whenever that norm exceeds one. ``identity`` is ``f(x) = x``.
    """

    kind: str
    values: tuple | None = None
    matrix: tuple | None = None
    offset: tuple | None = None

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise InvalidInputError(f"unknown objective kind {self.kind!r}")
        for name in ("values", "matrix", "offset"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        if self.kind == "table" and self.values is None:
            raise InvalidInputError("table objective needs values")
        if self.kind == "linear" and self.matrix is None:
            raise InvalidInputError("linear objective needs a matrix")

    def output_dim(self, dim_x: int) -> int:
        if self.kind == "table":
            return len(self.values[0])
        if self.kind == "linear":
            return len(self.matrix)
        if self.kind == "sqrt_example":
            return 2
        return dim_x

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        n, dim_x = points.shape
        if self.kind == "table":
            vals = np.array(self.values, dtype=float)
            if len(vals) != n:
                raise DimensionMismatchError(
                    f"objective table has {len(vals)} rows for {n} points")
            return vals
        if self.kind == "linear":
            A = np.array(self.matrix, dtype=float)
            if A.shape[1] != dim_x:
                raise DimensionMismatchError("objective matrix does not match dim_x")
            b = np.zeros(len(A)) if self.offset is None else np.array(self.offset)
            if b.shape != (len(A),):
                raise DimensionMismatchError("objective offset does not match dim_y")
            return points @ A.T + b
        if self.kind == "identity":
            return points.copy()
        if dim_x != 2:
            raise DimensionMismatchError("the sqrt example objective lives on R^2")
        x1, x2 = points[:, 0], points[:, 1]
        vals = np.column_stack([x1, np.sqrt(np.abs(x1 * x2))])
        scale = np.abs(points).max(axis=1)
        big = scale > 1
        vals[big] /= scale[big, None]
        return vals


@dataclass(frozen=True)
class PenalisationSpec:
    """Penalisation ``nu``.

    ``distance_to_s`` measures the distance to ``S`` either analytically from
    the shape (``mode="shape"``) or to the nearest feasible sample point
    (``mode="sample"``). ``signed_distance`` needs the shape. ``neg_sqrt`` is
    ``-sqrt(x)`` on ``[0, inf)`` and ``neg_linf_norm`` is ``-|x|_inf``.
    """

    kind: str
    values: tuple | None = None
    norm: str = "l2"
    mode: str = "shape"

    def __post_init__(self):
        if self.kind not in PENALISATION_KINDS:
            raise InvalidInputError(f"unknown penalisation kind {self.kind!r}")
        if self.norm not in ("l1", "l2", "linf"):
            raise InvalidInputError(f"unknown norm {self.norm!r}")
        if self.mode not in ("shape", "sample"):
            raise InvalidInputError(f"unknown distance mode {self.mode!r}")
        object.__setattr__(self, "values", _freeze(self.values))
        if self.kind == "table" and self.values is None:
            raise InvalidInputError("table penalisation needs values")

    def evaluate(self, points: np.ndarray, feasible: tuple, shape: Shape | None,
                 tol: Tolerances) -> np.ndarray:
        n = len(points)
        if self.kind == "table":
            vals = np.array(self.values, dtype=float)
            if vals.shape != (n,):
                raise DimensionMismatchError(
                    f"penalisation table has {vals.size} entries for {n} points")
            return vals
        if self.kind == "neg_sqrt":
            if points.shape[1] != 1:
                raise DimensionMismatchError("neg_sqrt penalisation lives on R")
            if np.any(points[:, 0] < 0):
                raise InvalidInputError("neg_sqrt penalisation is defined for x >= 0 only")
            return -np.sqrt(points[:, 0])
        if self.kind == "neg_linf_norm":
            return -np.abs(points).max(axis=1)
        if self.kind == "signed_distance":
            if shape is None:
                raise UnsupportedRepresentationError("signed distance needs an analytic shape")
            vals = np.array([signed_distance(shape, x, self.norm, tol.mem) for x in points])
            vals[np.abs(vals) <= tol.mem] = 0.0
            return vals
        # distance_to_s
        if self.mode == "shape":
            if shape is None:
                raise UnsupportedRepresentationError(
                    "distance in shape mode needs an analytic shape")
            vals = np.array([distance(shape, x, self.norm, tol.mem) for x in points])
        else:
            from .cones import vec_norm
            F = points[list(feasible)]
            vals = np.array([vec_norm(F - x, self.norm).min() for x in points])
        vals[list(feasible)] = 0.0
        return vals


@dataclass(frozen=True)
class FamilySpec:
    kind: str = "henig_epsilon_orthant"
    eps: tuple = DEFAULT_EPS_GRID
    members: tuple = ()
    lift_scales: tuple = DEFAULT_LIFT_SCALES

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "lift_scales", tuple(float(s) for s in self.lift_scales))
        object.__setattr__(self, "members", tuple(self.members))
        if not self.lift_scales or any(s <= 0 for s in self.lift_scales):
            raise InvalidInputError("lift scales must be positive")

    def build(self, cone: Cone, tol: Tolerances) -> DilatingFamily:
        return build_family(cone, self.kind, self.eps, members=self.members, tol=tol)


@dataclass(eq=False, frozen=True)
class Instance:
    """Finite vector optimisation instance; see the module docstring."""

    points: np.ndarray
    feasible: tuple
    objective: ObjectiveSpec
    penalisation: PenalisationSpec
    cone: Cone
    family_spec: FamilySpec = field(default_factory=FamilySpec)
    shape: Shape | None = None
    topo_tags: dict | None = None
    tol: Tolerances = DEFAULT_TOL
    name: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or len(pts) == 0:
            raise InvalidInputError("points must be a non-empty list of vectors")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points contain non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        feas = [int(i) for i in self.feasible]
        if not feas:
            raise InvalidInputError("feasible set is empty")
        if any(i < 0 or i >= len(pts) for i in feas):
            raise InvalidInputError("feasible index out of range")
        if len(set(feas)) != len(feas):
            raise InvalidInputError("feasible indices are not unique")
        object.__setattr__(self, "feasible", tuple(sorted(feas)))
        if self.shape is not None and self.shape.dim != self.dim_x:
            raise DimensionMismatchError("shape dimension differs from dim_x")
        object.__setattr__(self, "topo_tags", self._resolve_tags())

        f = self.objective.evaluate(pts)
        if f.shape[0] != len(pts) or not np.all(np.isfinite(f)):
            raise InvalidInputError("objective values must be finite for every point")
        if f.shape[1] != self.cone.dim:
            raise DimensionMismatchError("objective dimension differs from the cone dimension")
        nu = self.penalisation.evaluate(pts, self.feasible, self.shape, self.tol)
        if not np.all(np.isfinite(nu)):
            raise InvalidInputError("penalisation values must be finite")
        ext = np.column_stack([f, nu])
        for a in (f, nu, ext):
            a.setflags(write=False)
        object.__setattr__(self, "f_values", f)
        object.__setattr__(self, "nu_values", nu)
        object.__setattr__(self, "ext_values", ext)
        object.__setattr__(self, "family", self.family_spec.build(self.cone, self.tol))
        object.__setattr__(self, "lifted_family",
                           lift_family(self.family, self.family_spec.lift_scales))

    def _resolve_tags(self):
        given = None if self.topo_tags is None else {int(k): str(v) for k, v in self.topo_tags.items()}
        if given is not None:
            if set(given) != set(self.feasible):
                raise InvalidInputError("topo_tags must tag exactly the feasible points")
            if any(v not in (INTERIOR, BOUNDARY) for v in given.values()):
                raise InvalidInputError("topo tags must be 'interior' or 'boundary'")
        if self.shape is None:
            return given
        tags = {}
        feas = set(self.feasible)
        for i, x in enumerate(self.points):
            region = classify(self.shape, x, self.tol.mem)
            inside = region is not Region.EXTERIOR
            if inside != (i in feas):
                where = "outside" if i in feas else "inside"
                raise InvalidInputError(
                    f"point {i} lies {where} the shape but is {'' if i in feas else 'not '}feasible")
            if inside:
                tags[i] = region.value
        if given is not None and given != tags:
            bad = min(k for k in tags if tags[k] != given[k])
            raise InvalidInputError(f"topo tag of point {bad} disagrees with the shape")
        return tags

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def dim_x(self) -> int:
        return self.points.shape[1]

    @property
    def dim_y(self) -> int:
        return self.cone.dim

    @property
    def all_indices(self) -> tuple:
        return tuple(range(len(self.points)))

    @property
    def extended_cone(self) -> Cone:
        return product_with_ray(self.cone)

    def tagged(self, tag: str) -> tuple:
        if self.topo_tags is None:
            return ()
        return tuple(i for i in self.feasible if self.topo_tags[i] == tag)

    @property
    def interior_points(self) -> tuple:
        return self.tagged(INTERIOR)

    @property
    def boundary_points(self) -> tuple:
        return self.tagged(BOUNDARY)

    @property
    def s_closed(self) -> bool:
        """Closedness at sample level: a closed analytic shape with sampled boundary."""
        return self.shape is not None and bool(self.boundary_points)

    def replace(self, **changes) -> "Instance":
        kw = dict(points=self.points, feasible=self.feasible, objective=self.objective,
                  penalisation=self.penalisation, cone=self.cone,
                  family_spec=self.family_spec, shape=self.shape,
                  topo_tags=self.topo_tags, tol=self.tol, name=self.name)
        if "shape" in changes and "topo_tags" not in changes:
            kw["topo_tags"] = None
        kw.update(changes)
        return Instance(**kw)


def _check_index(inst: Instance, idx: int) -> int:
    if not 0 <= int(idx) < inst.n_points:
        raise InvalidInputError(f"point index {idx} out of range")
    return int(idx)


def eval_objective(inst: Instance, idx: int) -> np.ndarray:
    return inst.f_values[_check_index(inst, idx)].copy()


def eval_penalisation(inst: Instance, idx: int) -> float:
    return float(inst.nu_values[_check_index(inst, idx)])


def extended_objective(inst: Instance, idx: int) -> np.ndarray:
    """``(f(x), nu(x))``, compared with respect to ``C x R_>=``."""
    return inst.ext_values[_check_index(inst, idx)].copy()


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def sphere_samples(center, radius: float, count: int, rng) -> np.ndarray:
    """Points exactly on an l2 sphere; equally spaced on a circle in 2-D."""
    c = np.asarray(center, dtype=float)
    m = len(c)
    if m == 1:
        return np.array([[c[0] - radius], [c[0] + radius]])
    if m == 2:
        ang = 2 * np.pi * (np.arange(count) + rng.uniform()) / count
        return c + radius * np.column_stack([np.cos(ang), np.sin(ang)])
    u = rng.standard_normal((count, m))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return c + radius * u


def box_face_samples(lo, hi, count: int, rng) -> np.ndarray:
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    m = len(lo)
    pts = rng.uniform(lo, hi, size=(count, m))
    axis = rng.integers(0, m, size=count)
    side = rng.integers(0, 2, size=count)
    pts[np.arange(count), axis] = np.where(side == 1, hi[axis], lo[axis])
    return pts


def generate_random_instance(seed: int, dims=(2, 2), sizes=None, profile: str = "convex-linear",
                             shape_kind: str = "ball", penalisation: PenalisationSpec | None = None,
                             family_spec: FamilySpec | None = None,
                             tol: Tolerances = DEFAULT_TOL, refine_rounds: int = 0) -> Instance:
    """Reproducible random instance on a grid of the box ``[-1.5, 1.5]^dim_x``.

    ``sizes = (grid points per axis, boundary samples)``. ``S`` is a ball or
    box shape intersected with the sample; extra points are placed exactly on
    its boundary. Convex profiles use an orthant-convex objective (affine or
    separable convex quadratic per component); ``arbitrary-table`` draws
    independent Gaussian values.

    ``refine_rounds > 0`` applies :func:`refine_boundary` to convex profiles.
    """
    if profile not in PROFILES:
        raise InvalidInputError(f"unknown profile {profile!r}")
    dim_x, dim_y = (int(d) for d in dims)
    if dim_x < 1 or dim_y < 1:
        raise InvalidInputError("dimensions must be positive")
    default_sizes = {1: (41, 2), 2: (13, 40), 3: (7, 60)}
    per_axis, n_bd = sizes or default_sizes.get(dim_x, (4, 40))
    rng = np.random.default_rng(seed)

    axis = np.linspace(-1.5, 1.5, per_axis)
    grid = np.stack(np.meshgrid(*[axis] * dim_x, indexing="ij"), -1).reshape(-1, dim_x)
    if shape_kind == "ball":
        center = rng.uniform(-0.3, 0.3, dim_x)
        radius = float(rng.uniform(0.6, 1.0))
        shape = Ball(center, radius)
        extra = sphere_samples(center, radius, n_bd, rng)
    elif shape_kind == "box":
        lo = rng.uniform(-1.0, -0.3, dim_x)
        hi = rng.uniform(0.3, 1.0, dim_x)
        shape = Box(lo, hi)
        extra = box_face_samples(lo, hi, n_bd, rng)
    else:
        raise InvalidInputError(f"unknown shape kind {shape_kind!r}")
    points = np.vstack([grid, extra])
    _, first = np.unique(points, axis=0, return_index=True)
    points = points[np.sort(first)]
    feasible = [i for i, x in enumerate(points) if classify(shape, x, tol.mem) is not Region.EXTERIOR]

    if profile == "convex-linear":
        objective = ObjectiveSpec("linear", matrix=rng.standard_normal((dim_y, dim_x)),
                                  offset=rng.standard_normal(dim_y))
        table = None
    elif profile == "convex-quadratic":
        anchors = rng.uniform(-1.2, 1.2, (dim_y, dim_x))
        weights = rng.uniform(0.5, 2.0, (dim_y, dim_x))

        def table(P):
            return np.stack([((P - a) ** 2 * w).sum(axis=1) for a, w in zip(anchors, weights)], 1)

        objective = ObjectiveSpec("table", values=table(points))
    else:
        table = None
        objective = ObjectiveSpec("table", values=rng.standard_normal((len(points), dim_y)))

    inst = Instance(points=points, feasible=feasible, objective=objective,
                    penalisation=penalisation or PenalisationSpec("distance_to_s"),
                    cone=Orthant(dim_y), family_spec=family_spec or FamilySpec(),
                    shape=shape, tol=tol, name=f"{profile}-seed{seed}")
    if refine_rounds > 0 and profile != "arbitrary-table":
        inst = refine_boundary(inst, table, refine_rounds)
    return inst


def refine_boundary(inst: Instance, table_fn=None, rounds: int = 3) -> Instance:
    """Add boundary samples until :func:`segment_closure` holds or rounds run out.

    For every failing pair ``(x, y)`` the point where the segment from ``x``
    towards ``y`` leaves the shape is appended. ``table_fn`` re-evaluates a
    table objective on the enlarged sample; other objectives and
    penalisations are re-evaluated from their specs.
    """
    if inst.shape is None:
        raise InvalidInputError("boundary refinement needs an analytic shape")
    if inst.objective.kind == "table" and table_fn is None:
        raise InvalidInputError("a table objective needs table_fn for refinement")
    if inst.penalisation.kind == "table":
        raise InvalidInputError("a table penalisation cannot be refined")
    for _ in range(rounds):
        report = segment_closure(inst)
        if report.ok:
            break
        new = []
        for x, _, y in report.failures:
            z = segment_exit(inst.shape, inst.points[x], inst.points[y])
            if classify(inst.shape, z, inst.tol.mem) is not Region.BOUNDARY:
                continue
            known = np.linalg.norm(inst.points - z, axis=1).min() <= 1e-12
            if not known and all(np.linalg.norm(z - w) > 1e-12 for w in new):
                new.append(z)
        if not new:
            break
        points = np.vstack([inst.points, new])
        start = inst.n_points
        feasible = inst.feasible + tuple(range(start, start + len(new)))
        objective = inst.objective
        if objective.kind == "table":
            objective = ObjectiveSpec("table", values=table_fn(points))
        inst = inst.replace(points=points, feasible=feasible, objective=objective,
                            topo_tags=None)
    return inst
