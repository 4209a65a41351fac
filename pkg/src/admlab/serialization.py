"""JSON and CSV forms of geometries, reports and mass curves.

A geometry document is ``{"n": 3, "kind": <family>, "params": {...}}`` for
the built-in constructions (``rescale`` carries its input under ``"base"``)
or ``{"n": 3, "kind": "profile_samples" | "graph_samples", "samples":
[[x, y], ...]}`` for tabulated data.  Parametric documents rebuild the same
floating-point geometry, so a round trip is bit-exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping

import jsonschema
import numpy as np

from .errors import ParseError
from .families import FAMILIES, FamilySpec, GeneratedManifold, build
from .geometry import MassCurve, Profile, RadialGraph
from .numerics import Sampled1D

SAMPLE_KINDS = ("profile_samples", "graph_samples")

GEOMETRY_SCHEMA: dict = {
    "$id": "admlab:geometry",
    "type": "object",
    "required": ["kind"],
    "properties": {
        "n": {"type": "integer", "minimum": 3},
        "kind": {"enum": [*FAMILIES, *SAMPLE_KINDS]},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
        "base": {"$ref": "#"},
        "samples": {
            "type": "array",
            "minItems": 4,
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
    },
    "additionalProperties": False,
}


def spec_to_dict(spec: FamilySpec) -> dict:
    doc: dict[str, Any] = {"n": spec.n, "kind": spec.family, "params": dict(spec.params)}
    if spec.base is not None:
        doc["base"] = spec_to_dict(spec.base)
    return doc


def spec_from_dict(doc: Mapping, where: str = "$") -> FamilySpec:
    kind = doc["kind"]
    if kind in SAMPLE_KINDS:
        raise ParseError(f"{where}: tabulated geometry is not a family spec", field=where)
    base = spec_from_dict(doc["base"], where + ".base") if "base" in doc else None
    try:
        return FamilySpec(kind, dict(doc.get("params", {})), int(doc.get("n", 3)), base)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}", field=where) from exc


def geometry_to_dict(obj, samples: Iterable[float] | None = None) -> dict:
    """Document for a manifold, or tabulated samples of a bare profile or graph."""
    if isinstance(obj, FamilySpec):
        return spec_to_dict(obj)
    if isinstance(obj, GeneratedManifold) and obj.spec is not None:
        return spec_to_dict(obj.spec)
    if isinstance(obj, GeneratedManifold):
        obj = obj.geometry
    if samples is None:
        raise ValueError("tabulating a geometry needs sample abscissae")
    x = np.asarray(list(samples), dtype=float)
    if isinstance(obj, RadialGraph):
        y = np.asarray(obj.height(x), dtype=float) - obj.K
        kind = "graph_samples"
    elif isinstance(obj, Profile):
        y = np.asarray(obj.h(x), dtype=float)
        kind = "profile_samples"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return {"n": obj.n, "kind": kind, "samples": [[float(a), float(b)] for a, b in zip(x, y)]}


def _tabulated(doc: Mapping, where: str):
    pts = np.asarray(doc["samples"], dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    if np.any(np.diff(x) <= 0):
        raise ParseError(f"{where}.samples: abscissae must be strictly increasing", field=where + ".samples")
    n = int(doc.get("n", 3))
    interp = Sampled1D(x, y)
    d1 = lambda t: interp.derivative(t)  # noqa: E731
    d2 = lambda t: interp.derivative(t, 2)  # noqa: E731
    if doc["kind"] == "graph_samples":
        return RadialGraph(n, float(x[0]), f=lambda r: interp(r) - y[0], df=d1, d2f=d2, K=float(y[0]),
                           r_max=float(x[-1]), label="tabulated graph")
    if x[0] != 0.0:
        raise ParseError(f"{where}.samples: a profile table must start at s = 0", field=where + ".samples")
    kind = "pole" if y[0] == 0.0 else "minimal"
    return Profile(n, interp, d1, d2, s_max=float(x[-1]), kind=kind, scale=max(1.0, float(y[0])),
                   label="tabulated profile")


def geometry_from_dict(doc: Mapping, where: str = "$"):
    """A :class:`GeneratedManifold` for family documents, a Profile/RadialGraph for tables."""
    try:
        jsonschema.validate(doc, GEOMETRY_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = where + "".join(f"[{p!r}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise ParseError(f"{path}: {exc.message}", field=path) from exc
    if doc["kind"] in SAMPLE_KINDS:
        if "samples" not in doc:
            raise ParseError(f"{where}: tabulated geometry needs samples", field=where + ".samples")
        return _tabulated(doc, where)
    return build(spec_from_dict(doc, where))


def loads_json(text: str, source: str = "<string>") -> Any:
    """json.loads with the offending line reported in :class:`ParseError`."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}: {exc.msg}", line=exc.lineno) from exc


def load_geometry(path: str):
    with open(path, encoding="utf-8") as fh:
        return geometry_from_dict(loads_json(fh.read(), path))


def json_safe(x):
    """JSON-safe value: infinities as strings, numpy scalars as Python ones."""
    if isinstance(x, dict):
        return {str(k): json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [json_safe(v) for v in x]
    if isinstance(x, np.ndarray):
        return [json_safe(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    if hasattr(obj, "as_dict"):
        obj = obj.as_dict()
    return json.dumps(json_safe(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def mass_curves_csv(curves: Iterable[tuple[int, MassCurve]]) -> str:
    """Rows (index, abscissa, hawking_mass) for several indexed curves."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "abscissa", "hawking_mass"])
    for idx, curve in curves:
        for x, m in zip(curve.abscissae, curve.masses):
            w.writerow([idx, repr(float(x)), repr(float(m))])
    return buf.getvalue()


def rows_csv(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


__all__ = [
    "GEOMETRY_SCHEMA",
    "dumps",
    "json_safe",
    "geometry_from_dict",
    "geometry_to_dict",
    "load_geometry",
    "loads_json",
    "mass_curves_csv",
    "rows_csv",
    "spec_from_dict",
    "spec_to_dict",
]
