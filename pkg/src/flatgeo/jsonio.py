"""JSON serialization for surfaces, traces and verdicts.

Numbers are written with 17 significant digits so that emitting and
re-reading a surface is bit-exact and catalog files are byte-identical
across runs.  The writers build the JSON text directly: the stdlib
encoder would use shortest-repr floats.
"""
from __future__ import annotations

import json
import math

from .surface import EdgeRef, FlatSurface, Gluing, Triangle, build_surface
from .tracer import (
    LEFT_DOMAIN,
    LENGTH_REACHED,
    VERTEX_HIT,
    GeodesicTrace,
    SurfacePoint,
    TangentDirection,
    Termination,
    TraceSegment,
)


def _num(x: float) -> str:
    if x != x or math.isinf(x):  # NaN/inf have no JSON literal
        raise ValueError(f"cannot serialize {x!r}")
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero; json reads -0 as int
    return f"{x:.17g}"


def surface_to_json(surface: FlatSurface) -> str:
    parts = ['{"triangles": [']
    tris = []
    for t in surface.triangles:
        cs = ", ".join(f"[{_num(x)}, {_num(y)}]" for x, y in t.corners)
        tris.append(f'{{"id": {t.id}, "corners": [{cs}]}}')
    parts.append(", ".join(tris))
    parts.append('], "gluings": [')
    gls = []
    for g in surface.gluings:
        rev = "true" if g.reversed else "false"
        gls.append(
            f'{{"a": [{g.a.tri}, {g.a.edge}], "b": [{g.b.tri}, {g.b.edge}], "reversed": {rev}}}'
        )
    parts.append(", ".join(gls))
    parts.append("]}")
    return "".join(parts) + "\n"


def surface_from_json(text: str, tol: float | None = None) -> FlatSurface:
    data = json.loads(text)
    triangles = [
        Triangle(int(t["id"]), tuple((float(x), float(y)) for x, y in t["corners"]))
        for t in data["triangles"]
    ]
    gluings = [
        Gluing(
            EdgeRef(int(g["a"][0]), int(g["a"][1])),
            EdgeRef(int(g["b"][0]), int(g["b"][1])),
            bool(g.get("reversed", False)),
        )
        for g in data["gluings"]
    ]
    return build_surface(triangles, gluings, tol)


def _termination_str(term: Termination) -> str:
    if term.kind == LENGTH_REACHED:
        return "length_reached"
    if term.kind == VERTEX_HIT:
        return f"vertex_hit:{term.vertex}:{_num(term.parameter)}"
    return f"left_domain:{term.message or ''}"


def _termination_parse(s: str) -> Termination:
    if s == "length_reached":
        return Termination(LENGTH_REACHED)
    if s.startswith("vertex_hit:"):
        _, vc, par = s.split(":", 2)
        return Termination(VERTEX_HIT, vertex=int(vc), parameter=float(par))
    if s.startswith("left_domain:"):
        return Termination(LEFT_DOMAIN, message=s.split(":", 1)[1])
    raise ValueError(f"unknown termination {s!r}")


def trace_to_json(trace_: GeodesicTrace, extra: dict | None = None) -> str:
    segs = []
    for s in trace_.segments:
        segs.append(
            f'{{"tri": {s.tri}, "in": [{_num(s.entry[0])}, {_num(s.entry[1])}], '
            f'"out": [{_num(s.exit[0])}, {_num(s.exit[1])}]}}'
        )
    body = (
        '{"segments": ['
        + ", ".join(segs)
        + f'], "length": {_num(trace_.length)}, "termination": "{_termination_str(trace_.termination)}"'
    )
    if extra:
        for k, v in extra.items():
            if v is None:
                body += f', "{k}": null'
            elif isinstance(v, bool):
                body += f', "{k}": {"true" if v else "false"}'
            elif isinstance(v, (int,)):
                body += f', "{k}": {v}'
            elif isinstance(v, float):
                body += f', "{k}": {_num(v)}'
            else:
                body += f', "{k}": {json.dumps(v)}'
    return body + "}\n"


def trace_from_json(text: str) -> GeodesicTrace:
    """Rebuild a trace from its JSON form.

    Directions and arc parameters are recomputed from the segment
    endpoints; zero-length segments reuse the previous direction.
    """
    data = json.loads(text)
    segs: list[TraceSegment] = []
    t0 = 0.0
    prev_dir = (1.0, 0.0)
    for s in data["segments"]:
        entry = (float(s["in"][0]), float(s["in"][1]))
        exit_ = (float(s["out"][0]), float(s["out"][1]))
        dx, dy = exit_[0] - entry[0], exit_[1] - entry[1]
        ln = math.hypot(dx, dy)
        d = (dx / ln, dy / ln) if ln > 0 else prev_dir
        prev_dir = d
        segs.append(TraceSegment(int(s["tri"]), entry, exit_, d, t0, ln, None))
        t0 += ln
    term = _termination_parse(data["termination"])
    length = float(data["length"])
    if not segs:
        raise ValueError("trace JSON has no segments")
    start = TangentDirection(SurfacePoint(segs[0].tri, segs[0].entry), segs[0].direction)
    return GeodesicTrace(start, tuple(segs), length, term)


def manifest_entry(surface: FlatSurface, name: str, filename: str, parallel: bool) -> dict:
    return {
        "name": name,
        "file": filename,
        "euler_characteristic": surface.euler_characteristic,
        "orientable": surface.orientable,
        "curvatures": [f"{v.curvature:.17g}" for v in sorted(surface.vertex_classes, key=lambda v: v.curvature)],
        "parallel": parallel,
    }


def manifest_to_json(entries: list[dict]) -> str:
    return json.dumps({"surfaces": entries}, indent=2, sort_keys=False) + "\n"
