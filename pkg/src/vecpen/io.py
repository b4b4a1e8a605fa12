"""JSON instance documents and deterministic report serialisation.

Instance documents are validated against :data:`INSTANCE_SCHEMA`; every
failure is raised as :class:`~vecpen.errors.SchemaError` naming the offending
field (``$.objective.kind``, ``$.points[3]`` ...). Reports are written with
sorted keys, floats at 17 significant digits and infinities as ``"inf"`` so
that identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .cones import (
    BishopPhelps,
    Cone,
    FullSpace,
    GeneratorPoly,
    HalfspacePoly,
    Orthant,
    Tolerances,
)
from .errors import SchemaError, VecpenError
from .problem import FamilySpec, Instance, ObjectiveSpec, PenalisationSpec
from .topology import Ball, Box, EmptyShape, HalfspaceSet, ProductShape, Shape, UnionShape

FORMAT_VERSION = 1

_num = {"type": "number"}
_vec = {"type": "array", "items": _num}
_mat = {"type": "array", "items": _vec, "minItems": 1}
_index_list = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}
_positive = {"type": "number", "exclusiveMinimum": 0}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["dim_x", "dim_y", "points", "feasible", "objective", "penalisation", "cone"],
    "properties": {
        "name": {"type": "string"},
        "dim_x": {"type": "integer", "minimum": 1},
        "dim_y": {"type": "integer", "minimum": 1},
        "points": {"type": "array", "items": _vec, "minItems": 1},
        "feasible": _index_list,
        "shape": {"type": "object", "required": ["kind"]},
        "topo_tags": {"type": "array", "items": {"enum": ["interior", "boundary"]}},
        "objective": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["table", "linear", "sqrt_example", "identity", "builtin"]},
                "values": _mat,
                "matrix": _mat,
                "offset": _vec,
                "name": {"enum": ["sqrt_example", "identity"]},
            },
        },
        "penalisation": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["distance_to_s", "signed_distance", "table", "neg_sqrt",
                                  "neg_linf_norm"]},
                "values": _vec,
                "norm": {"enum": ["l1", "l2", "linf"]},
                "mode": {"enum": ["shape", "sample"]},
            },
        },
        "cone": {"type": "object", "required": ["kind"]},
        "family": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["henig_epsilon_orthant", "bishop_phelps_sweep", "explicit"]},
                "eps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                        "minItems": 1},
                "lift_scales": {"type": "array",
                                "items": {"type": "number", "exclusiveMinimum": 0},
                                "minItems": 1},
                "members": {"type": "array", "items": {
                    "type": "object", "required": ["param", "cone"]}},
            },
        },
        "tol": {"type": "object", "properties": {"mem": _positive, "strict": _positive}},
    },
}


def _location(path) -> str:
    out = "$"
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


# ---------------------------------------------------------------------------
# Cones and shapes
# ---------------------------------------------------------------------------


def cone_to_dict(cone: Cone) -> dict:
    if isinstance(cone, Orthant):
        return {"kind": "orthant", "params": {"m": cone.m}}
    if isinstance(cone, FullSpace):
        return {"kind": "full_space", "params": {"m": cone.m}}
    if isinstance(cone, HalfspacePoly):
        return {"kind": "halfspace", "params": {"rows": [list(r) for r in cone.rows]}}
    if isinstance(cone, GeneratorPoly):
        return {"kind": "generators", "params": {"generators": [list(g) for g in cone.generators]}}
    if isinstance(cone, BishopPhelps):
        return {"kind": "bishop_phelps",
                "params": {"q": list(cone.q), "alpha": cone.alpha, "norm": cone.norm}}
    raise SchemaError("$.cone", f"{type(cone).__name__} cannot be stored in an instance file")


def cone_from_dict(doc: dict, where: str = "$.cone") -> Cone:
    kind = doc.get("kind")
    p = doc.get("params", {})
    try:
        if kind == "orthant":
            return Orthant(int(p["m"]))
        if kind == "full_space":
            return FullSpace(int(p["m"]))
        if kind == "halfspace":
            return HalfspacePoly(p["rows"])
        if kind == "generators":
            return GeneratorPoly(p["generators"])
        if kind == "bishop_phelps":
            return BishopPhelps(p["q"], float(p["alpha"]), p.get("norm", "l2"))
    except KeyError as exc:
        raise SchemaError(f"{where}.params", f"missing parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}.params", str(exc)) from None
    raise SchemaError(f"{where}.kind", f"unknown cone kind {kind!r}")


def shape_to_dict(shape: Shape) -> dict:
    if isinstance(shape, Ball):
        return {"kind": "ball", "params": {"center": list(shape.center), "radius": shape.radius,
                                           "norm": shape.norm}}
    if isinstance(shape, Box):
        return {"kind": "box", "params": {"lo": list(shape.lo), "hi": list(shape.hi)}}
    if isinstance(shape, HalfspaceSet):
        return {"kind": "halfspaces", "params": {"normals": [list(n) for n in shape.normals],
                                                 "offsets": list(shape.offsets)}}
    if isinstance(shape, ProductShape):
        return {"kind": "product", "params": {"a": shape_to_dict(shape.a),
                                              "b": shape_to_dict(shape.b)}}
    if isinstance(shape, UnionShape):
        return {"kind": "union", "params": {"parts": [shape_to_dict(s) for s in shape.parts]}}
    if isinstance(shape, EmptyShape):
        return {"kind": "empty", "params": {"m": shape.m}}
    raise SchemaError("$.shape", f"{type(shape).__name__} cannot be stored")


def shape_from_dict(doc: dict, where: str = "$.shape") -> Shape:
    kind = doc.get("kind")
    p = doc.get("params", {})
    try:
        if kind == "ball":
            return Ball(p["center"], float(p["radius"]), p.get("norm", "l2"))
        if kind == "box":
            return Box(p["lo"], p["hi"])
        if kind == "halfspaces":
            return HalfspaceSet(p["normals"], p["offsets"])
        if kind == "product":
            return ProductShape(shape_from_dict(p["a"], f"{where}.params.a"),
                                shape_from_dict(p["b"], f"{where}.params.b"))
        if kind == "union":
            return UnionShape(tuple(shape_from_dict(s, f"{where}.params.parts[{k}]")
                                    for k, s in enumerate(p["parts"])))
        if kind == "empty":
            return EmptyShape(int(p["m"]))
    except KeyError as exc:
        raise SchemaError(f"{where}.params", f"missing parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}.params", str(exc)) from None
    raise SchemaError(f"{where}.kind", f"unknown shape kind {kind!r}")


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


def instance_from_dict(doc) -> Instance:
    """Validate a parsed document and build the instance."""
    validator = jsonschema.Draft202012Validator(INSTANCE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaError(_location(err.absolute_path), err.message)
    pts = doc["points"]
    if any(len(p) != doc["dim_x"] for p in pts):
        k = next(k for k, p in enumerate(pts) if len(p) != doc["dim_x"])
        raise SchemaError(f"$.points[{k}]", f"expected {doc['dim_x']} coordinates")
    cone = cone_from_dict(doc["cone"])
    if cone.dim != doc["dim_y"]:
        raise SchemaError("$.cone", f"cone dimension {cone.dim} differs from dim_y")
    shape = shape_from_dict(doc["shape"]) if "shape" in doc else None
    tags = None
    if "topo_tags" in doc:
        feas = sorted(doc["feasible"])
        if len(doc["topo_tags"]) != len(feas):
            raise SchemaError("$.topo_tags", "one tag per feasible index is required")
        tags = dict(zip(feas, doc["topo_tags"]))
    o = doc["objective"]
    okind = o["name"] if o["kind"] == "builtin" and "name" in o else o["kind"]
    if okind == "builtin":
        raise SchemaError("$.objective.name", "a builtin objective needs a name")
    fam = doc.get("family", {})
    members = tuple((float(m["param"]), cone_from_dict(m["cone"], f"$.family.members[{k}].cone"))
                    for k, m in enumerate(fam.get("members", [])))
    tol = doc.get("tol", {})
    try:
        family_kw = {k: fam[k] for k in ("kind", "eps", "lift_scales") if k in fam}
        return Instance(
            points=np.array(pts, dtype=float),
            feasible=doc["feasible"],
            objective=ObjectiveSpec(okind, o.get("values"), o.get("matrix"), o.get("offset")),
            penalisation=PenalisationSpec(doc["penalisation"]["kind"],
                                          doc["penalisation"].get("values"),
                                          doc["penalisation"].get("norm", "l2"),
                                          doc["penalisation"].get("mode", "shape")),
            cone=cone,
            family_spec=FamilySpec(members=members, **family_kw),
            shape=shape,
            topo_tags=tags,
            tol=Tolerances(tol.get("mem", 1e-9), tol.get("strict", 1e-9)),
            name=doc.get("name", ""),
        )
    except SchemaError:
        raise
    except VecpenError as exc:
        raise SchemaError("$", str(exc)) from None


def instance_to_dict(inst: Instance) -> dict:
    o = inst.objective
    obj = {"kind": o.kind}
    for key in ("values", "matrix", "offset"):
        val = getattr(o, key)
        if val is not None:
            obj[key] = [list(r) for r in val] if key != "offset" else list(val)
    p = inst.penalisation
    pen = {"kind": p.kind, "norm": p.norm, "mode": p.mode}
    if p.values is not None:
        pen["values"] = list(p.values)
    fs = inst.family_spec
    fam = {"kind": fs.kind, "eps": list(fs.eps), "lift_scales": list(fs.lift_scales)}
    if fs.members:
        fam["members"] = [{"param": p, "cone": cone_to_dict(c)} for p, c in fs.members]
    doc = {
        "name": inst.name,
        "dim_x": inst.dim_x,
        "dim_y": inst.dim_y,
        "points": inst.points.tolist(),
        "feasible": list(inst.feasible),
        "objective": obj,
        "penalisation": pen,
        "cone": cone_to_dict(inst.cone),
        "family": fam,
        "tol": {"mem": inst.tol.mem, "strict": inst.tol.strict},
    }
    if inst.shape is not None:
        doc["shape"] = shape_to_dict(inst.shape)
    if inst.topo_tags is not None:
        doc["topo_tags"] = [inst.topo_tags[i] for i in inst.feasible]
    return doc


def load_instance(path) -> Instance:
    """Read an instance file. OSError propagates; bad content raises SchemaError."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from None
    return instance_from_dict(doc)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)))


# ---------------------------------------------------------------------------
# Deterministic JSON
# ---------------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"nan"'
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        text = format(obj, ".17g")
        return text if any(c in text for c in ".e") else text + ".0"
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    """Serialise with sorted keys and 17 significant digits per float."""
    return _encode(_plain(obj), indent, 0) + "\n"


def write_report(report: dict, path) -> None:
    Path(path).write_text(dumps(report))


def read_report(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"report is not valid JSON: {exc}") from None
