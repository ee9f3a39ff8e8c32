"""JSON instance files and report helpers."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .cones import PolyhedralCone
from .errors import ConecertError, InstanceError
from .instance import SetValuedMap, VPInstance

SCHEMA = "conecert/1"


def instance_to_dict(instance: VPInstance) -> dict:
    out = {
        "schema": SCHEMA,
        "dimensions": {"p": instance.p, "q": instance.q, "r": instance.r},
        "cone_Y": instance.cone_y.to_dict(),
        "cone_Z": instance.cone_z.to_dict(),
        "points": [
            {
                "label": x,
                "f": instance.f[x].tolist(),
                "g": instance.g[x].tolist(),
                "h": instance.h[x].tolist(),
            }
            for x in instance.labels
        ],
    }
    if instance.meta:
        out["meta"] = dict(instance.meta)
    return out


def _int_field(d: dict, key: str, lo: int) -> int:
    v = d.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < lo:
        raise InstanceError(f"must be an integer >= {lo}", f"dimensions.{key}")
    return v


def _rows(raw, dim: int, where: str) -> list[list[float]]:
    if not isinstance(raw, list) or not raw:
        raise InstanceError("must be a nonempty list of points", where)
    out = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            raise InstanceError(f"row {i} must have length {dim}", f"{where}[{i}]")
        vals = []
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InstanceError(f"row {i} has a non-numeric entry", f"{where}[{i}]")
            vals.append(float(v))
        out.append(vals)
    return out


def _cone(raw, dim: int, name: str) -> PolyhedralCone:
    if raw is None:
        return PolyhedralCone.orthant(dim)
    if not isinstance(raw, dict) or "generators" not in raw:
        raise InstanceError("must be an object with 'generators'", name)
    gens = _rows(raw["generators"], dim, f"{name}.generators")
    try:
        return PolyhedralCone(gens)
    except ConecertError as exc:
        raise InstanceError(str(exc), name) from exc


def instance_from_dict(doc: Any) -> VPInstance:
    if not isinstance(doc, dict):
        raise InstanceError("top level must be an object")
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise InstanceError(f"unsupported schema {schema!r}", "schema")
    dims = doc.get("dimensions")
    if not isinstance(dims, dict):
        raise InstanceError("missing or not an object", "dimensions")
    p, q, r = _int_field(dims, "p", 1), _int_field(dims, "q", 1), _int_field(dims, "r", 0)
    cone_y = _cone(doc.get("cone_Y"), p, "cone_Y")
    cone_z = _cone(doc.get("cone_Z"), q, "cone_Z")
    points = doc.get("points")
    if not isinstance(points, list) or not points:
        raise InstanceError("must be a nonempty list", "points")
    labels, fv, gv, hv = [], {}, {}, {}
    for i, pt in enumerate(points):
        where = f"points[{i}]"
        if not isinstance(pt, dict):
            raise InstanceError("must be an object", where)
        label = pt.get("label")
        if not isinstance(label, str) or not label:
            raise InstanceError("label must be a nonempty string", f"{where}.label")
        if label in fv:
            raise InstanceError(f"duplicate label {label!r}", f"{where}.label")
        where = f"points[{i}] (label {label!r})"
        labels.append(label)
        fv[label] = _rows(pt.get("f"), p, f"{where}.f")
        gv[label] = _rows(pt.get("g"), q, f"{where}.g")
        if r == 0 and pt.get("h") in (None, [], [[]]):
            hv[label] = [[]]
        else:
            hv[label] = _rows(pt.get("h"), r, f"{where}.h")
    meta = doc.get("meta", {})
    return VPInstance(
        tuple(labels), SetValuedMap(p, fv), SetValuedMap(q, gv), SetValuedMap(r, hv),
        cone_y, cone_z, meta if isinstance(meta, dict) else {},
    )


def parse_instance(path) -> VPInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc)


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


def write_instance(instance: VPInstance, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(instance)) + "\n")


def digest(instance: VPInstance) -> str:
    """SHA-256 of the canonical JSON of the instance (metadata excluded)."""
    doc = instance_to_dict(instance)
    doc.pop("meta", None)
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def jsonable(obj: Any) -> Any:
    """Convert numpy values and containers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj
