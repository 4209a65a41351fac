"""Scenario files: a geometry or a sequence, a list of probes, and where to write results.

Scenarios are JSON with ``"schema": 1``; unknown fields are rejected.  A
sequence is either an explicit ``members`` list of geometry documents or a
``template`` plus ``vary``, a map from parameter name to per-member values::

    {"schema": 1, "name": "demo",
     "sequence": {"template": {"kind": "flatten_in", "params": {"m": 1}},
                  "vary": {"height": [5, 10, 20]}, "window": [3, 10]},
     "limit": {"kind": "flat"},
     "probes": [{"id": "lsc", "op": "lsc_check", "expect": {"inequality_holds": true}}]}

Outputs are deterministic: no timestamps, fixed float formatting, and sorted
JSON keys, so reruns produce byte-identical files.
"""

from __future__ import annotations

import copy
import math
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Mapping

import jsonschema
import numpy as np
from scipy.optimize import brentq

from . import chart
from .convergence import (
    SequenceScenario,
    derivative_convergence,
    detect_blowup,
    flat_norm_upper,
    lsc_check,
    region_with_area,
    uniform_limit,
)
from .errors import AdmlabError, NotMonotone, ParseError, ProbeFailed
from .families import GeneratedManifold, check_consistency
from .geometry import (
    Profile,
    RadialGraph,
    adm_mass_limit,
    minimal_sphere_scan,
    validate_rotsym,
)
from .numerics import Tolerances, limit_extrapolate
from .serialization import json_safe, dumps, geometry_from_dict, loads_json, mass_curves_csv, rows_csv, spec_from_dict

OPS = (
    "validate",
    "adm_mass",
    "mass_curve",
    "consistency",
    "flat_norm",
    "detect_blowup",
    "uniform_limit",
    "derivative_convergence",
    "region_with_area",
    "lsc_check",
)

SCENARIO_SCHEMA: dict = {
    "type": "object",
    "required": ["schema", "name"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": 1},
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "geometry": {"type": "object"},
        "sequence": {
            "type": "object",
            "required": ["window"],
            "additionalProperties": False,
            "properties": {
                "members": {"type": "array", "items": {"type": "object"}},
                "template": {"type": "object"},
                "vary": {
                    "type": "object",
                    "additionalProperties": {"type": "array", "items": {"type": "number"}},
                },
                "window": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "resolution": {"type": "integer", "minimum": 2},
            },
        },
        "limit": {"type": "object"},
        "probes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "op"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "op": {"enum": list(OPS)},
                    "params": {"type": "object"},
                    "expect": {"type": "object"},
                },
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"csv": {"type": "string"}, "json": {"type": "string"}},
        },
    },
}

#: absolute tolerance for numeric ``expect`` entries unless the entry gives ``tol``
EXPECT_TOL = 1e-6


@dataclass
class Scenario:
    name: str
    geometry: Any = None
    sequence: SequenceScenario | None = None
    limit: Any = None
    probes: list = field(default_factory=list)
    output: dict = field(default_factory=dict)
    description: str = ""


@dataclass
class RunResult:
    name: str
    outputs: list
    wall_time: float
    tolerances: dict
    failures: list
    csv_text: str = ""

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        """Everything except the wall time, which would break byte-identical reruns."""
        return {"scenario": self.name, "ok": self.ok, "tolerances": self.tolerances,
                "probes": self.outputs, "failures": self.failures}


# ---------------------------------------------------------------------------
# parsing


def _schema_error(exc: jsonschema.ValidationError) -> ParseError:
    path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
    return ParseError(f"{path}: {exc.message}", field=path)


def parse_scenario(doc: Mapping) -> Scenario:
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise _schema_error(exc) from exc
    if ("geometry" in doc) == ("sequence" in doc):
        raise ParseError("give exactly one of geometry or sequence", field="$")
    ids = [p["id"] for p in doc.get("probes", [])]
    if len(set(ids)) != len(ids):
        raise ParseError("probe ids must be unique", field="$.probes")
    sc = Scenario(doc["name"], probes=list(doc.get("probes", [])), output=dict(doc.get("output", {})),
                  description=doc.get("description", ""))
    try:
        if "geometry" in doc:
            sc.geometry = geometry_from_dict(doc["geometry"], "$.geometry")
        else:
            sc.sequence = _parse_sequence(doc["sequence"])
        if "limit" in doc:
            sc.limit = geometry_from_dict(doc["limit"], "$.limit")
    except AdmlabError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"geometry could not be built: {exc}", field="$") from exc
    return sc


def _parse_sequence(doc: Mapping) -> SequenceScenario:
    where = "$.sequence"
    if ("members" in doc) == ("template" in doc):
        raise ParseError("give exactly one of members or template", field=where)
    if "members" in doc:
        if "vary" in doc:
            raise ParseError("vary needs a template", field=where + ".vary")
        members = [_member(m, f"{where}.members[{i}]") for i, m in enumerate(doc["members"])]
    else:
        vary = doc.get("vary", {})
        lengths = {len(v) for v in vary.values()}
        if len(lengths) != 1:
            raise ParseError("vary lists must be nonempty and of equal length", field=where + ".vary")
        count = lengths.pop()
        members = []
        for i in range(count):
            m = copy.deepcopy(dict(doc["template"]))
            for k, vals in vary.items():
                _set_param(m, k, vals[i])
            members.append(_member(m, f"{where}.template (member {i})"))
    if len(members) < 3:
        raise ParseError("a sequence needs at least three members", field=where)
    w = doc["window"]
    try:
        return SequenceScenario(tuple(members), (w[0], w[1]), doc.get("resolution", 200))
    except ValueError as exc:
        raise ParseError(str(exc), field=where) from exc


def _set_param(doc: dict, key: str, value: float) -> None:
    """Set a template parameter; rescale passes everything but c on to its base."""
    while doc.get("kind") == "rescale" and key != "c" and "base" in doc:
        doc = doc["base"]
    doc.setdefault("params", {})[key] = value


def _member(doc: Mapping, where: str):
    if doc.get("kind") in ("profile_samples", "graph_samples"):
        return geometry_from_dict(doc, where)
    from .serialization import GEOMETRY_SCHEMA

    try:
        jsonschema.validate(doc, GEOMETRY_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseError(f"{where}: {exc.message}", field=where) from exc
    return spec_from_dict(doc, where)


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(loads_json(fh.read(), path))


# ---------------------------------------------------------------------------
# mass curves by area radius


def profile_of(obj) -> Profile:
    if isinstance(obj, GeneratedManifold):
        return obj.profile
    if isinstance(obj, RadialGraph):
        from .geometry import to_profile

        return to_profile(obj)
    return obj


def graph_of(obj) -> RadialGraph | None:
    if isinstance(obj, GeneratedManifold):
        return obj.graph
    return obj if isinstance(obj, RadialGraph) else None


def hawking_at_radius(obj, radii) -> np.ndarray:
    """Hawking mass of the outermost symmetric sphere of each area radius."""
    r = np.asarray(radii, dtype=float)
    g = graph_of(obj)
    if g is not None:
        return np.asarray(g.mass(r), dtype=float)
    p = profile_of(obj)
    start = max(minimal_sphere_scan(p), default=0.0)
    if start == 0.0 and p.kind != "truncated":
        s = np.asarray(p.s_of_r(r), dtype=float)
    else:
        s = np.array([brentq(lambda t: float(p.h(t)) - x, start, p.s_max, xtol=1e-13) for x in r.ravel()])
    return np.asarray(p.hawking_mass(s.reshape(r.shape)), dtype=float)


def emit_mass_curve(gm, r_range: tuple[float, float], count: int) -> list[tuple[float, float, float]]:
    """Rows (abscissa, hawking, running_extrapolation) at geometrically spaced area radii.

    The running column is the limit extrapolated from the rows so far; it is
    NaN where the masses decrease, since there is no monotone limit to fit.
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    a, b = float(r_range[0]), float(r_range[1])
    if not 0 < a < b:
        raise ValueError("range must satisfy 0 < a < b")
    r = np.geomspace(a, b, count)
    m = hawking_at_radius(gm, r)
    rows = []
    for k in range(count):
        if k == 0:
            run = float(m[0])
        else:
            try:
                run = limit_extrapolate(r[:k + 1], m[:k + 1]).value
            except NotMonotone:
                run = math.nan
        rows.append((float(r[k]), float(m[k]), run))
    return rows


def mass_curve_csv(rows) -> str:
    return rows_csv(["abscissa", "hawking", "running_extrapolation"], rows)


# ---------------------------------------------------------------------------
# probes


def validation_summary(obj, tol: float) -> dict:
    rep = validate_rotsym(profile_of(obj), curvature_tol=tol)
    return {
        "in_rotsym": rep.in_rotsym,
        "violations": [{"condition": v.condition, "location": v.location, "value": v.value}
                       for v in rep.violations],
        "min_scalar_curvature": rep.min_scalar_curvature,
        "min_curvature_at": rep.min_curvature_at,
        "minimal_sphere_locations": list(rep.minimal_sphere_locations),
    }


def adm_summary(obj, method: str, tols: Tolerances) -> dict:
    out: dict[str, Any] = {}
    geom = obj.geometry if isinstance(obj, GeneratedManifold) else obj
    if method in ("limit", "both"):
        res = adm_mass_limit(geom, rel_tol=tols.limit_rel_tol)
        out["limit"] = {"value": res.value, "error": res.error}
    if method in ("chart", "both"):
        g = graph_of(obj)
        if g is None:
            raise ProbeFailed("adm_mass", "the chart method needs a graph picture")
        radii = [1e2 * g.scale, 1e3 * g.scale, 1e4 * g.scale]
        vals = chart.adm_mass_chart(g, radii)
        out["chart"] = {"radii": [r for r, _ in vals], "values": [v for _, v in vals], "value": vals[-1][1]}
    return out


def _expect(probe_id: str, result: Any, expect: Mapping) -> list[str]:
    problems = []
    tol = float(expect.get("tol", EXPECT_TOL))
    for key, want in expect.items():
        if key == "tol":
            continue
        if not isinstance(result, Mapping) or key not in result:
            problems.append(f"{probe_id}: result has no field {key!r}")
            continue
        got = result[key]
        if isinstance(want, bool) or not isinstance(want, (int, float)):
            if got != want:
                problems.append(f"{probe_id}: {key} = {got!r}, expected {want!r}")
        elif not isinstance(got, (int, float)) or not abs(got - want) <= tol:
            problems.append(f"{probe_id}: {key} = {got!r}, expected {want!r} +- {tol:g}")
    return problems


class _Runner:
    def __init__(self, sc: Scenario, tols: Tolerances, parallel: bool):
        self.sc, self.tols, self.parallel = sc, tols, parallel
        self.curves: list[tuple[int, Any]] = []

    def targets(self) -> list:
        if self.sc.sequence is not None:
            return self.sc.sequence.resolved(self.parallel)
        return [self.sc.geometry]

    def per_target(self, fn: Callable) -> Any:
        vals = [fn(t) for t in self.targets()]
        return vals[0] if self.sc.sequence is None else {"members": vals}

    def need_sequence(self, op):
        if self.sc.sequence is None:
            raise ProbeFailed(op, "this probe needs a sequence")
        return self.sc.sequence

    def run(self, op: str, params: Mapping) -> Any:
        tols = self.tols
        if op == "validate":
            tol = float(params.get("curvature_tol", 1e-8))
            return self.per_target(lambda t: validation_summary(t, tol))
        if op == "adm_mass":
            method = params.get("method", "limit")
            if method not in ("limit", "chart", "both"):
                raise ProbeFailed(op, f"unknown method {method!r}")
            return self.per_target(lambda t: adm_summary(t, method, tols))
        if op == "mass_curve":
            a, b = params.get("range", [None, None])
            count = int(params.get("count", 20))
            out = []
            for i, t in enumerate(self.targets()):
                lo = a if a is not None else 1.05 * _inner(t)
                hi = b if b is not None else 1e3 * max(1.0, lo)
                rows = emit_mass_curve(t, (lo, hi), count)
                r = np.array([x[0] for x in rows])
                m = np.array([x[1] for x in rows])
                self.curves.append((i, mass_curve_rows(r, m)))
                out.append({"first": rows[0][1], "last": rows[-1][1], "extrapolated": rows[-1][2]})
            return out[0] if self.sc.sequence is None else {"members": out}
        if op == "consistency":
            problems = []
            for t in self.targets():
                if not isinstance(t, GeneratedManifold):
                    raise ProbeFailed(op, "consistency needs a built-in family")
                problems.extend(check_consistency(t))
            return {"consistent": not problems, "problems": problems}
        if op == "flat_norm":
            other = self.sc.limit
            if graph_of(other) is None:
                raise ProbeFailed(op, "flat_norm needs a limit with a graph picture")
            window = params.get("window") or (list(self.sc.sequence.window) if self.sc.sequence else None)
            if window is None:
                raise ProbeFailed(op, "flat_norm needs a window")

            def one(t):
                g = graph_of(t)
                if g is None:
                    raise ProbeFailed(op, "member has no graph picture")
                return flat_norm_upper(g, graph_of(other), window[0], window[1], tol=tols.quad_abs_tol).as_dict()
            res = self.per_target(one)
            if self.sc.sequence is not None:
                bounds = [m["upper_bound"] for m in res["members"]]
                res["upper_bounds"] = bounds
                res["nonincreasing"] = all(y <= x for x, y in zip(bounds, bounds[1:]))
            return res
        if op == "detect_blowup":
            b = detect_blowup(self.need_sequence(op))
            return {"r_star": b.r_star, "mass_bound": b.mass_bound, "blows_up": b.r_star is not None}
        if op == "uniform_limit":
            ul = uniform_limit(self.need_sequence(op))
            return {"diverges": ul.diverges, "sup_error": ul.sup_error, "tail_differences": list(ul.tail_differences)}
        if op == "derivative_convergence":
            seq = self.need_sequence(op)
            r0 = float(params["r0"])
            lim = graph_of(self.sc.limit) if self.sc.limit is not None else None
            if lim is None:
                ul = uniform_limit(seq)
                if ul.diverges:
                    raise ProbeFailed(op, "the sequence has no uniform limit")
                lim = ul.graph
            rep = derivative_convergence(seq, lim, r0)
            return {"converges": rep.converges, "gap": rep.gap, "limit_slope": rep.limit_slope,
                    "member_slopes": list(rep.member_slopes)}
        if op == "region_with_area":
            A = float(params["A"]) if "A" in params else 4 * math.pi * float(params["radius"]) ** 2
            res = self.per_target(lambda t: region_with_area(t, A).as_dict())
            if self.sc.limit is not None:
                if not isinstance(res, dict) or "members" not in res:
                    res = {"geometry": res}
                res["limit"] = region_with_area(self.sc.limit, A).as_dict()
            return res
        if op == "lsc_check":
            tol = float(params.get("tol", 1e-5))
            return lsc_check(self.need_sequence(op), self.sc.limit, tol=tol, parallel=self.parallel).as_dict()
        raise ProbeFailed(op, "unknown op")  # the schema already restricts ops


def _inner(t) -> float:
    g = graph_of(t)
    if g is not None:
        return max(g.a, 1e-3 * g.scale)
    p = profile_of(t)
    return max(float(p.h(0.0)), 1e-3 * p.scale)


def mass_curve_rows(r, m):
    from .geometry import MassCurve

    return MassCurve(np.asarray(r), np.asarray(m), "area-radius")


def run_scenario(source, *, parallel: bool = False, tolerances: Tolerances | None = None,
                 check: bool = True, write: bool = True) -> RunResult:
    """Run every probe in order and write the configured outputs once at the end.

    ``source`` is a path, a parsed document or a :class:`Scenario`.  Probe
    errors and failed ``expect`` entries are collected; with ``check`` they
    raise :class:`ProbeFailed` (after outputs are written) carrying the run
    result as ``.result``.
    """
    if isinstance(source, Scenario):
        sc = source
    elif isinstance(source, Mapping):
        sc = parse_scenario(source)
    else:
        sc = load_scenario(os.fspath(source))
    tols = tolerances if tolerances is not None else Tolerances.from_env()
    runner = _Runner(sc, tols, parallel)
    start = time.perf_counter()
    outputs, failures = [], []
    for probe in sc.probes:
        pid, op = probe["id"], probe["op"]
        try:
            result = runner.run(op, probe.get("params", {}))
        except (AdmlabError, ValueError, KeyError) as exc:
            diag = exc.diagnostic if isinstance(exc, ProbeFailed) else f"{type(exc).__name__}: {exc}"
            failures.append({"id": pid, "diagnostic": diag})
            outputs.append({"id": pid, "op": op, "ok": False, "error": diag})
            continue
        result = json_safe(result)
        problems = _expect(pid, result, probe.get("expect", {}))
        for p in problems:
            failures.append({"id": pid, "diagnostic": p})
        outputs.append({"id": pid, "op": op, "ok": not problems, "result": result})
    res = RunResult(sc.name, outputs, time.perf_counter() - start, tols.as_dict(), failures,
                    mass_curves_csv(runner.curves) if runner.curves else "")
    if write:
        write_outputs(res, sc.output)
    if check and failures:
        err = ProbeFailed(failures[0]["id"], failures[0]["diagnostic"])
        err.result = res
        raise err
    return res


def write_outputs(res: RunResult, output: Mapping) -> None:
    if output.get("json"):
        with open(output["json"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(res))
    if output.get("csv"):
        with open(output["csv"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(res.csv_text or "index,abscissa,hawking_mass\n")


# ---------------------------------------------------------------------------
# built-in scenarios


def builtin_names() -> list[str]:
    files = resources.files("admlab") / "scenarios"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def builtin_document(name: str) -> dict:
    path = resources.files("admlab") / "scenarios" / f"{name}.json"
    if not path.is_file():
        raise ParseError(f"no built-in scenario named {name!r}", field="name")
    return loads_json(path.read_text(encoding="utf-8"), f"builtin:{name}")


def run_builtin(name: str, **kw) -> RunResult:
    kw.setdefault("write", False)
    return run_scenario(builtin_document(name), **kw)


__all__ = [
    "OPS",
    "RunResult",
    "SCENARIO_SCHEMA",
    "Scenario",
    "builtin_document",
    "builtin_names",
    "adm_summary",
    "emit_mass_curve",
    "graph_of",
    "profile_of",
    "validation_summary",
    "hawking_at_radius",
    "load_scenario",
    "mass_curve_csv",
    "parse_scenario",
    "run_builtin",
    "run_scenario",
    "write_outputs",
]
