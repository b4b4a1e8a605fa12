import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vecpen.cones import Orthant
from vecpen.problem import Instance, ObjectiveSpec, PenalisationSpec
from vecpen.topology import Ball

settings.register_profile(
    "vecpen", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("vecpen")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def table_instance(values, nu=None, feasible=None, cone=None, points=None, **kw):
    """Instance over ``len(values)`` abstract points with a tabulated objective."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    pts = np.arange(n, dtype=float).reshape(-1, 1) if points is None else points
    pen = PenalisationSpec("table", values=np.zeros(n) if nu is None else nu)
    return Instance(points=pts, feasible=range(n) if feasible is None else feasible,
                    objective=ObjectiveSpec("table", values=values), penalisation=pen,
                    cone=cone or Orthant(values.shape[1]), **kw)


@pytest.fixture
def disk_instance():
    """Grid of ``[-1.5, 1.5]^2`` with the unit disk as ``S`` and ``f = identity``."""
    axis = np.linspace(-1.5, 1.5, 7)
    grid = np.array([(a, b) for a in axis for b in axis])
    ang = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    circle = np.column_stack([np.cos(ang), np.sin(ang)])
    pts = np.vstack([grid, circle])
    shape = Ball((0.0, 0.0), 1.0)
    feas = [i for i, x in enumerate(pts) if shape.contains(x)]
    return Instance(points=pts, feasible=feas, objective=ObjectiveSpec("identity"),
                    penalisation=PenalisationSpec("signed_distance"), cone=Orthant(2),
                    shape=shape, name="disk")
