"""The shipped instance corpus, rebuilt deterministically from seeds."""

from __future__ import annotations

from pathlib import Path

from .fixtures import identity_instance, sqrt_instance
from .io import save_instance
from .problem import PenalisationSpec, generate_random_instance

# (seed, dims, profile, shape, penalisation kind, distance mode)
RANDOM_SPECS = (
    (101, (2, 2), "convex-linear", "ball", "distance_to_s", "shape"),
    (102, (2, 2), "convex-quadratic", "box", "distance_to_s", "shape"),
    (103, (2, 3), "convex-linear", "box", "signed_distance", "shape"),
    (104, (3, 2), "convex-quadratic", "ball", "distance_to_s", "shape"),
    (105, (1, 2), "convex-linear", "box", "distance_to_s", "sample"),
    (106, (2, 4), "convex-linear", "ball", "signed_distance", "shape"),
    (107, (2, 2), "arbitrary-table", "ball", "distance_to_s", "shape"),
    (108, (2, 3), "arbitrary-table", "box", "signed_distance", "shape"),
    (109, (1, 1), "convex-quadratic", "ball", "signed_distance", "shape"),
)


def default_corpus() -> list:
    out = []
    for seed, dims, profile, shape, pen, mode in RANDOM_SPECS:
        inst = generate_random_instance(seed, dims, profile=profile, shape_kind=shape,
                                        penalisation=PenalisationSpec(pen, mode=mode),
                                        refine_rounds=3)
        out.append(inst.replace(name=f"{profile}-{shape}-{pen}-{seed}"))
    out.append(identity_instance())
    out.append(identity_instance(d_max=2.0).replace(name="identity-wide-domain"))
    out.append(sqrt_instance())
    return out


def write_corpus(directory) -> list:
    """Write every corpus instance as ``NN-name.json``; returns the paths."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, inst in enumerate(default_corpus()):
        p = d / f"{k:02d}-{inst.name}.json"
        save_instance(inst, p)
        paths.append(p)
    return paths
