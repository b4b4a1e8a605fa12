"""Sample instances and cones for the worked examples.

Each builder returns plain library objects; the checks that reproduce the
examples' conclusions live in :mod:`vecpen.theorems`.
"""

from __future__ import annotations

import numpy as np

from .cones import BishopPhelps, HalfspacePoly, Orthant
from .problem import FamilySpec, Instance, ObjectiveSpec, PenalisationSpec
from .topology import Ball, Box, HalfspaceSet, ProductShape, UnionShape

EXAMPLE_NAMES = ("halfspace", "bp", "sqrt", "identity", "saturn")


def identity_instance(lo_exp: int = -14, per_decade: int = 2, d_max: float = 1.0,
                      linear: int = 21) -> Instance:
    """``f(x) = x`` on ``S = [0, 1]`` with ``nu(x) = -sqrt(x)`` and cone ``R_>=``.

    The sample holds ``0``, a geometric grid ``10**lo_exp .. 1`` and a linear
    grid of ``[0, d_max]``; ``d_max > 1`` adds infeasible points.
    """
    geo = np.logspace(lo_exp, 0, per_decade * (-lo_exp) + 1)
    lin = np.linspace(0.0, d_max, linear)
    xs = np.unique(np.concatenate([[0.0], geo, lin]))
    feasible = [i for i, x in enumerate(xs) if x <= 1.0]
    return Instance(points=xs.reshape(-1, 1), feasible=feasible,
                    objective=ObjectiveSpec("identity"),
                    penalisation=PenalisationSpec("neg_sqrt"), cone=Orthant(1),
                    shape=Box([0.0], [1.0]), name="identity")


def identity_threshold(eps: float) -> float:
    """Largest ``y`` that defeats ``0`` for the eps-dilation of ``R^2_>=``."""
    return (eps / (1.0 + eps)) ** 2


SQRT_HALFSPACE = HalfspacePoly([[1.0, 1.0]])
SQRT_SHAPE = HalfspaceSet([[-1.0, 0.0], [1.0, -1.0]], [0.0, 0.0])


def sqrt_instance(n_max: float = 2e6, per_decade: int = 4) -> Instance:
    """``f(x) = (x1, sqrt|x1 x2|)`` (scaled beyond the unit box) on ``x2 >= x1 >= 0``.

    ``nu = -|x|_inf`` and ``C = R^2_>=``. The sample contains the origin, the
    diagonal ``(n, n)`` for geometric ``n`` up to ``n_max`` (the truncation
    radius), the axis ``x1 = 0`` and a grid of interior points. The base
    family is the eps-dilation family plus the half space ``<(1,1), v> >= 0``.
    """
    n = np.logspace(-3, np.log10(n_max), int(per_decade * (np.log10(n_max) + 3)) + 1)
    diag = np.column_stack([n, n])
    axis = np.column_stack([np.zeros(9), np.logspace(-2, 2, 9)])
    g = np.linspace(0.0, 2.0, 9)[1:]
    inner = np.array([(a, b) for a in g for b in g if b > a])
    pts = np.vstack([[0.0, 0.0], diag, axis, inner])
    spec = FamilySpec(kind="explicit", members=((0.0, SQRT_HALFSPACE),)
                      + tuple((e, _eps_member(e)) for e in (1e-6, 1e-3, 1.0, 1e3, 1e6)))
    return Instance(points=pts, feasible=range(len(pts)),
                    objective=ObjectiveSpec("sqrt_example"),
                    penalisation=PenalisationSpec("neg_linf_norm"), cone=Orthant(2),
                    family_spec=spec, shape=SQRT_SHAPE, name="sqrt")


def _eps_member(eps: float) -> HalfspacePoly:
    return HalfspacePoly(np.eye(2) + eps)


BP_PRODUCT = BishopPhelps((1.0, 1.0, 1.0), np.sqrt(3) / 2)
BP_SECTION = BishopPhelps((1.0, 1.0), np.sqrt(3) / 2)
BP_LIFT_DIRECTION = (1.0, 1.0)

HALFSPACE_CONE = HalfspacePoly([[1.0, 0.0]])


def halfspace_candidates() -> list:
    """Pointed convex cones that are natural dilation candidates for ``v1 >= 0``."""
    return [
        ("orthant", Orthant(2)),
        ("eps_dilation", HalfspacePoly(np.eye(2) + 0.5)),
        ("wide_wedge", HalfspacePoly([[1.0, 10.0], [1.0, -10.0]])),
        ("very_wide_wedge", HalfspacePoly([[1.0, 1e3], [1.0, -1e3]])),
        ("bishop_phelps", BishopPhelps((1.0, 0.0), 0.01)),
    ]


def saturn_shape() -> UnionShape:
    """Unit ball of ``R^3`` joined with the radius-2 disk in the plane ``t = 0``."""
    return UnionShape((Ball((0.0, 0.0, 0.0), 1.0),
                       ProductShape(Ball((0.0, 0.0), 2.0), Box([0.0], [0.0]))))


def saturn_probes(radii=(0.0, 0.3, 0.7, 0.95, 1.05, 1.3, 1.6, 1.95, 2.05, 2.5, 3.0),
                  angles: int = 5) -> tuple:
    """Probe points of the plane ``t = 0`` and their radii (radius 1 and 2 excluded)."""
    pts, rs = [], []
    for r in radii:
        for k in range(angles):
            a = 2 * np.pi * k / angles + 0.1
            pts.append((r * np.cos(a), r * np.sin(a)))
            rs.append(r)
    return np.array(pts), np.array(rs)
