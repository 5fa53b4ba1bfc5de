"""Self-intersection detection, density estimation, and angle audits.

Intersections are found per chart: chords of the trace living in the
same triangle are tested pairwise, with a uniform spatial hash over the
chart once a chart holds enough segments.  All pair tests are vectorized
with numpy; this module is the package's performance core.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentMidpoints, NotConvex
from .geometry import PlaneIsometry, Vec, fold_to_half_turn, unsigned_angle
from .surface import FlatSurface
from .tracer import (
    GeodesicTrace,
    SurfacePoint,
    TangentDirection,
    VERTEX_HIT,
    tangent_representatives,
    trace,
)

# Direction-equality threshold separating periodic retracing from genuine
# crossings; crossings are proper when the chord lines differ by more
# than this (angles are compared projectively, so both 0 and pi count as
# retracing).
PROPER_ANGLE_TOL = 1e-6

# Two parameter pairs closer than this are the same event seen from both
# sides of a chart edge.
EVENT_MERGE_TOL = 1e-7

_HASH_THRESHOLD = 192  # chart segment count above which the spatial hash kicks in


@dataclass(frozen=True)
class SegmentPair:
    """Two equal-length segments given by midpoints and angles.

    ``alpha1``/``alpha2`` are measured from the m1->m2 direction to each
    segment's direction; ``half_length`` is half the common length.
    """

    m1: Vec
    m2: Vec
    alpha1: float
    alpha2: float
    half_length: float


def lap_criterion(pair: SegmentPair) -> bool:
    """Midpoint intersection criterion for two equal segments.

    With d the midpoint distance and delta = alpha2 - alpha1, the
    segments (assumed to start on the same side of the midpoint line)
    intersect if and only if
    ``d * max(|sin a1|, |sin a2|) <= half_length * |sin delta|``.
    """
    d = math.hypot(pair.m2[0] - pair.m1[0], pair.m2[1] - pair.m1[1])
    if d == 0.0:
        raise CoincidentMidpoints("criterion requires distinct midpoints")
    delta = pair.alpha2 - pair.alpha1
    lhs = d * max(abs(math.sin(pair.alpha1)), abs(math.sin(pair.alpha2)))
    rhs = pair.half_length * abs(math.sin(delta))
    return lhs <= rhs


def segment_pair_endpoints(pair: SegmentPair) -> tuple[Vec, Vec, Vec, Vec]:
    """Realize a SegmentPair as explicit planar segments (a1,b1,a2,b2)."""
    base = math.atan2(pair.m2[1] - pair.m1[1], pair.m2[0] - pair.m1[0])
    out = []
    for m, alpha in ((pair.m1, pair.alpha1), (pair.m2, pair.alpha2)):
        ux, uy = math.cos(base + alpha), math.sin(base + alpha)
        ln = pair.half_length
        out.append((m[0] - ln * ux, m[1] - ln * uy))
        out.append((m[0] + ln * ux, m[1] + ln * uy))
    return out[0], out[1], out[2], out[3]


@dataclass(frozen=True)
class IntersectionEvent:
    t1: float
    t2: float
    point: SurfacePoint
    angle: float  # between the two passes, folded to (0, pi)


@dataclass(frozen=True)
class DensityReport:
    epsilon: float
    sample_count: int
    covered_fraction: float


def _chart_arrays(trace_: GeodesicTrace):
    """Group trace chords by chart: tri -> (P, D, L, T0, index)."""
    by_tri: dict[int, list[int]] = {}
    for i, seg in enumerate(trace_.segments):
        by_tri.setdefault(seg.tri, []).append(i)
    out = {}
    segs = trace_.segments
    for tri, idxs in by_tri.items():
        P = np.array([segs[i].entry for i in idxs], dtype=float)
        D = np.array([segs[i].direction for i in idxs], dtype=float)
        L = np.array([segs[i].length for i in idxs], dtype=float)
        T0 = np.array([segs[i].t0 for i in idxs], dtype=float)
        out[tri] = (P, D, L, T0, np.array(idxs))
    return out


def _candidate_pairs(P: np.ndarray, D: np.ndarray, L: np.ndarray, cell: float):
    """Index pairs of segments whose bounding boxes share a hash cell."""
    n = len(P)
    Q = P + D * L[:, None]
    lo = np.minimum(P, Q)
    hi = np.maximum(P, Q)
    cells: dict[tuple[int, int], list[int]] = {}
    for i in range(n):
        x0, y0 = int(math.floor(lo[i, 0] / cell)), int(math.floor(lo[i, 1] / cell))
        x1, y1 = int(math.floor(hi[i, 0] / cell)), int(math.floor(hi[i, 1] / cell))
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                cells.setdefault((cx, cy), []).append(i)
    pairs: set[tuple[int, int]] = set()
    for members in cells.values():
        m = len(members)
        if m < 2:
            continue
        for a in range(m):
            ia = members[a]
            for b in range(a + 1, m):
                ib = members[b]
                pairs.add((ia, ib) if ia < ib else (ib, ia))
    if not pairs:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    arr = np.array(sorted(pairs), dtype=int)
    return arr[:, 0], arr[:, 1]


def _all_pairs(n: int):
    ii, jj = np.triu_indices(n, k=1)
    return ii, jj


def self_intersections(
    surface: FlatSurface,
    trace_: GeodesicTrace,
    angle_tol: float = PROPER_ANGLE_TOL,
) -> list[IntersectionEvent]:
    """All proper self-intersections of a trace.

    Pairs meeting at the same point with the same line direction (within
    ``angle_tol``, projectively) are periodic retracing and are excluded.
    Events seen in two charts (crossings on a gluing edge) are merged.
    """
    diam = surface._trace_tables().scale
    events: list[tuple[float, float, int, float, float]] = []
    for tri, (P, D, L, T0, _idx) in _chart_arrays(trace_).items():
        n = len(P)
        if n < 2:
            continue
        if n <= _HASH_THRESHOLD:
            ii, jj = _all_pairs(n)
        else:
            med = float(np.median(L))
            cell = min(max(med, diam / 200.0), diam / 10.0)
            ii, jj = _candidate_pairs(P, D, L, cell)
            if len(ii) == 0:
                continue
        Pi, Pj = P[ii], P[jj]
        Di, Dj = D[ii], D[jj]
        Li, Lj = L[ii], L[jj]
        denom = Di[:, 0] * Dj[:, 1] - Di[:, 1] * Dj[:, 0]
        W = Pj - Pi
        ok = np.abs(denom) > 1e-12
        denom_safe = np.where(ok, denom, 1.0)
        u = (W[:, 0] * Dj[:, 1] - W[:, 1] * Dj[:, 0]) / denom_safe
        v = (W[:, 0] * Di[:, 1] - W[:, 1] * Di[:, 0]) / denom_safe
        slack = 1e-12
        ok &= (u >= -slack) & (u <= Li + slack) & (v >= -slack) & (v <= Lj + slack)
        if not np.any(ok):
            continue
        dotd = np.clip(np.sum(Di * Dj, axis=1), -1.0, 1.0)
        ang = np.arccos(dotd)
        ok &= (ang > angle_tol) & (ang < math.pi - angle_tol)
        for k in np.nonzero(ok)[0]:
            ta = float(T0[ii[k]] + u[k])
            tb = float(T0[jj[k]] + v[k])
            t1, t2 = (ta, tb) if ta <= tb else (tb, ta)
            if t2 - t1 <= EVENT_MERGE_TOL:
                continue
            px = float(Pi[k, 0] + u[k] * Di[k, 0])
            py = float(Pi[k, 1] + u[k] * Di[k, 1])
            events.append((t1, t2, tri, px, py, float(ang[k])))

    events.sort(key=lambda e: (e[0], e[1]))
    merged: list[IntersectionEvent] = []
    for t1, t2, tri, px, py, ang in events:
        if merged and abs(merged[-1].t1 - t1) <= EVENT_MERGE_TOL and abs(
            merged[-1].t2 - t2
        ) <= EVENT_MERGE_TOL:
            continue
        merged.append(IntersectionEvent(t1, t2, SurfacePoint(tri, (px, py)), ang))
    return merged


def _sample_points(surface: FlatSurface, samples: int, seed: int):
    """Area-uniform points: tri id -> (k, 2) array, deterministic in seed."""
    rng = np.random.default_rng(seed)
    tris = surface.triangles
    areas = np.array([t.signed_area() for t in tris])
    probs = areas / areas.sum()
    choice = rng.choice(len(tris), size=samples, p=probs)
    r1 = np.sqrt(rng.uniform(size=samples))
    r2 = rng.uniform(size=samples)
    out: dict[int, np.ndarray] = {}
    for ti in range(len(tris)):
        mask = choice == ti
        if not np.any(mask):
            continue
        a, b, c = (np.array(p) for p in tris[ti].corners)
        u = r1[mask][:, None]
        v = r2[mask][:, None]
        pts = a * (1 - u) + b * (u * (1 - v)) + c * (u * v)
        out[tris[ti].id] = pts
    return out


def _min_dist_to_chords(points: np.ndarray, P: np.ndarray, D: np.ndarray, L: np.ndarray):
    """Min distance from each point to a set of chords (vectorized)."""
    W = points[:, None, :] - P[None, :, :]
    proj = W[:, :, 0] * D[None, :, 0] + W[:, :, 1] * D[None, :, 1]
    proj = np.clip(proj, 0.0, L[None, :])
    dx = W[:, :, 0] - proj * D[None, :, 0]
    dy = W[:, :, 1] - proj * D[None, :, 1]
    return np.sqrt(np.min(dx * dx + dy * dy, axis=1))


def density_estimate(
    surface: FlatSurface,
    trace_: GeodesicTrace,
    epsilon: float,
    samples: int,
    seed: int,
) -> DensityReport:
    """Fraction of area-uniform sample points within epsilon of the trace.

    Distances are measured in the sample's own chart and, through each of
    its gluings, one transition deep; points near the trace only across
    two or more transitions are undercounted, so the estimate is
    conservative.
    """
    if epsilon <= 0 or samples <= 0:
        raise ValueError("epsilon and samples must be positive")
    charts = _chart_arrays(trace_)
    pts = _sample_points(surface, samples, seed)
    covered = 0
    for tri_id, P in pts.items():
        hit = np.zeros(len(P), dtype=bool)
        if tri_id in charts:
            cP, cD, cL, _t, _i = charts[tri_id]
            hit |= _min_dist_to_chords(P, cP, cD, cL) < epsilon
        for e in range(3):
            if np.all(hit):
                break
            ref, iso = surface.edge_transition(tri_id, e)
            if ref.tri not in charts:
                continue
            m = iso.matrix()
            Q = np.empty_like(P)
            Q[:, 0] = m[0] * P[:, 0] + m[1] * P[:, 1] + m[4]
            Q[:, 1] = m[2] * P[:, 0] + m[3] * P[:, 1] + m[5]
            cP, cD, cL, _t, _i = charts[ref.tri]
            todo = ~hit
            hit[todo] = _min_dist_to_chords(Q[todo], cP, cD, cL) < epsilon
        covered += int(np.count_nonzero(hit))
    return DensityReport(epsilon, samples, covered / samples)


def closed_geodesic_detect(
    surface: FlatSurface, trace_: GeodesicTrace, tol: float = 1e-6
) -> float | None:
    """Smallest positive t at which the trace revisits its start tangent.

    Both the point distance and the direction angle are compared against
    ``tol``.  Returns None when no recurrence occurs within the trace.
    """
    reps = tangent_representatives(surface, trace_.start.at, trace_.start.unit, tol=max(tol, 1e-9))
    by_tri: dict[int, list[tuple[Vec, Vec]]] = {}
    for tri, xy, v in reps:
        by_tri.setdefault(tri, []).append((xy, v))
    best: float | None = None
    for seg in trace_.segments:
        if best is not None and seg.t0 > best:
            break
        for xy, v in by_tri.get(seg.tri, ()):
            if unsigned_angle(seg.direction, v) > tol:
                continue
            wx, wy = xy[0] - seg.entry[0], xy[1] - seg.entry[1]
            r = wx * seg.direction[0] + wy * seg.direction[1]
            if r < -tol or r > seg.length + tol:
                continue
            perp = math.hypot(wx - r * seg.direction[0], wy - r * seg.direction[1])
            if perp > tol:
                continue
            t = seg.t0 + r
            if t > tol and (best is None or t < best):
                best = t
    return best


@dataclass(frozen=True)
class SpectrumReport:
    angles: tuple[float, ...]  # observed co-face angles, folded to [0, pi]
    allowed: tuple[float, ...]  # subset sums of curvatures, folded
    unmatched: tuple[float, ...]

    @property
    def all_matched(self) -> bool:
        return not self.unmatched


def coface_angle_spectrum(
    surface: FlatSurface,
    trace_: GeodesicTrace,
    face_partition: list[list[int]],
    tol: float = 1e-6,
) -> SpectrumReport:
    """Pairwise angles between trace chords crossing the same face.

    Each face group is developed into one plane before comparing chord
    directions; angles are folded to [0, pi] and checked against subset
    sums of the vertex curvatures (folded the same way).  Requires a
    sphere with strictly positive curvatures.
    """
    if surface.euler_characteristic != 2:
        raise NotConvex("angle spectrum needs a topological sphere")
    cones = surface.cone_points()
    if any(v.curvature <= 0 for v in cones):
        raise NotConvex("angle spectrum needs strictly positive curvatures")

    charts = _chart_arrays(trace_)
    observed: list[float] = []
    for group in face_partition:
        group_set = set(group)
        placement: dict[int, PlaneIsometry] = {group[0]: PlaneIsometry.identity()}
        queue = [group[0]]
        while queue:
            cur = queue.pop(0)
            for e in range(3):
                ref, iso = surface.edge_transition(cur, e)
                if ref.tri in group_set and ref.tri not in placement:
                    placement[ref.tri] = placement[cur].compose(iso.inverse())
                    queue.append(ref.tri)
        dirs: list[tuple[float, float]] = []
        for tri_id in group:
            if tri_id not in charts:
                continue
            _P, D, _L, _T0, _i = charts[tri_id]
            m = placement[tri_id].matrix()
            for d in D:
                dirs.append((m[0] * d[0] + m[1] * d[1], m[2] * d[0] + m[3] * d[1]))
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                observed.append(unsigned_angle(dirs[i], dirs[j]))

    sums = {0.0}
    for v in cones:
        sums |= {s + v.curvature for s in sums}
    allowed = sorted({fold_to_half_turn(s) for s in sums})
    unmatched = tuple(
        a for a in observed if min(abs(a - f) for f in allowed) > tol
    )
    return SpectrumReport(tuple(sorted(observed)), tuple(allowed), unmatched)



@dataclass(frozen=True)
class DirectionVerdict:
    index: int
    angle: float
    kind: str  # "vertex_hit" | "self_intersecting" | "simple" | "left_domain"
    hit_parameter: float | None = None
    first_event: IntersectionEvent | None = None
    density: DensityReport | None = None


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[DirectionVerdict, ...]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            out[r.kind] = out.get(r.kind, 0) + 1
        return out

    def to_csv(self) -> str:
        lines = ["index,angle,verdict,first_event_t1,first_event_t2,covered_fraction"]
        for r in self.rows:
            t1 = f"{r.first_event.t1:.17g}" if r.first_event else ""
            t2 = f"{r.first_event.t2:.17g}" if r.first_event else ""
            cf = f"{r.density.covered_fraction:.17g}" if r.density else ""
            lines.append(f"{r.index},{r.angle:.17g},{r.kind},{t1},{t2},{cf}")
        return "\n".join(lines) + "\n"

    def to_json_rows(self) -> list[dict]:
        out = []
        for r in self.rows:
            out.append(
                {
                    "index": r.index,
                    "angle": r.angle,
                    "verdict": r.kind,
                    "first_event_t1": r.first_event.t1 if r.first_event else None,
                    "first_event_t2": r.first_event.t2 if r.first_event else None,
                    "covered_fraction": r.density.covered_fraction if r.density else None,
                }
            )
        return out


def direction_scan(
    surface: FlatSurface,
    p: SurfacePoint,
    n: int,
    length: float,
    epsilon: float,
    seed: int,
    vertex_clearance: float = 1e-7,
    density_samples: int = 2000,
) -> ScanResult:
    """Trace ``n`` seeded random directions from one point and classify each.

    Every direction is traced to ``length``; the verdict is VertexHit,
    SelfIntersecting (with the earliest event) or Simple (with a density
    report at ``epsilon``).  Deterministic given the seed.
    """
    if n < 1:
        raise ValueError("need at least one direction")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, n)
    rows: list[DirectionVerdict] = []
    for i, ang in enumerate(angles):
        d = (math.cos(ang), math.sin(ang))
        tr = trace(surface, TangentDirection(p, d), length, vertex_clearance)
        if tr.termination.kind == VERTEX_HIT:
            rows.append(
                DirectionVerdict(i, float(ang), "vertex_hit", hit_parameter=tr.termination.parameter)
            )
            continue
        if tr.termination.kind != "LengthReached":
            rows.append(DirectionVerdict(i, float(ang), "left_domain"))
            continue
        events = self_intersections(surface, tr)
        if events:
            first = min(events, key=lambda e: (e.t2, e.t1))
            rows.append(DirectionVerdict(i, float(ang), "self_intersecting", first_event=first))
        else:
            rep = density_estimate(surface, tr, epsilon, density_samples, seed + 1)
            rows.append(DirectionVerdict(i, float(ang), "simple", density=rep))
    return ScanResult(tuple(rows))
