"""Constructors for every surface family used by the experiments.

All builders are deterministic: identical inputs give bit-identical
surfaces, so catalog files and fixtures reproduce byte-for-byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CutThroughVertex,
    DegenerateLattice,
    NonSimplePolygon,
    NotAcute,
    PerimeterMismatch,
    UncoveredBoundary,
    ArcLengthMismatch,
    UnsupportedCut,
)
from .geometry import (
    Vec,
    cross,
    metric_tolerance,
    norm,
    normalize,
    point_segment_distance,
    polygon_area,
    segments_intersect,
)
from .surface import EdgeRef, FlatSurface, Gluing, Triangle, build_surface


@dataclass(frozen=True)
class PolygonSpec:
    """A simple counterclockwise polygon in the plane."""

    vertices: tuple[Vec, ...]

    def __init__(self, vertices):
        object.__setattr__(
            self, "vertices", tuple((float(x), float(y)) for x, y in vertices)
        )

    def validate(self) -> None:
        pts = self.vertices
        n = len(pts)
        if n < 3:
            raise NonSimplePolygon("polygon needs at least 3 vertices")
        if polygon_area(list(pts)) <= 0:
            raise NonSimplePolygon("polygon must be counterclockwise with positive area")
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            if norm(b[0] - a[0], b[1] - a[1]) == 0.0:
                raise NonSimplePolygon("zero-length polygon edge")
        for i in range(n):
            a1, b1 = pts[i], pts[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                a2, b2 = pts[j], pts[(j + 1) % n]
                if segments_intersect(a1, b1, a2, b2):
                    raise NonSimplePolygon(f"boundary edges {i} and {j} intersect")

    def perimeter(self) -> float:
        pts = self.vertices
        return sum(
            norm(pts[(i + 1) % len(pts)][0] - p[0], pts[(i + 1) % len(pts)][1] - p[1])
            for i, p in enumerate(pts)
        )


def _point_in_tri_closed(p: Vec, a: Vec, b: Vec, c: Vec, tol: float) -> bool:
    for u, v in ((a, b), (b, c), (c, a)):
        if cross(v[0] - u[0], v[1] - u[1], p[0] - u[0], p[1] - u[1]) < -tol:
            return False
    return True


def _ear_clip(pts: tuple[Vec, ...]) -> list[tuple[int, int, int]]:
    """Deterministic ear clipping: lowest remaining index first."""
    n = len(pts)
    scale = max(max(abs(x), abs(y)) for x, y in pts) or 1.0
    eps = 1e-12 * scale * scale
    idx = list(range(n))
    tris: list[tuple[int, int, int]] = []
    while len(idx) > 3:
        clipped = False
        m = len(idx)
        for pos in range(m):
            ip, i, inx = idx[pos - 1], idx[pos], idx[(pos + 1) % m]
            a, b, c = pts[ip], pts[i], pts[inx]
            if cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]) <= eps:
                continue
            ok = True
            for j in idx:
                if j in (ip, i, inx):
                    continue
                if _point_in_tri_closed(pts[j], a, b, c, eps):
                    ok = False
                    break
            if ok:
                tris.append((ip, i, inx))
                del idx[pos]
                clipped = True
                break
        if not clipped:
            raise NonSimplePolygon("ear clipping failed; polygon may be non-simple")
    tris.append((idx[0], idx[1], idx[2]))
    return tris


def _double_from_triangulation(
    pts: tuple[Vec, ...], tris: list[tuple[int, int, int]], tol: float | None = None
) -> FlatSurface:
    """Two mirror copies of a triangulated domain glued along the boundary.

    Edges appearing in exactly one triangle are boundary edges and get
    glued to their mirror image; edges shared by two triangles are glued
    within each copy.
    """
    T = len(tris)
    triangles: list[Triangle] = []
    top_edges: dict[tuple[int, int], tuple[int, int]] = {}
    bot_edges: dict[tuple[int, int], tuple[int, int]] = {}
    for t, (i, j, k) in enumerate(tris):
        triangles.append(Triangle(t, (pts[i], pts[j], pts[k])))
        mirror = tuple((pts[m][0], -pts[m][1]) for m in (i, k, j))
        triangles.append(Triangle(T + t, mirror))
        for e, pair in enumerate(((i, j), (j, k), (k, i))):
            top_edges[pair] = (t, e)
        for e, pair in enumerate(((i, k), (k, j), (j, i))):
            bot_edges[pair] = (T + t, e)

    gluings: list[Gluing] = []
    seen: set[frozenset[int]] = set()
    for (i, j), (t, e) in top_edges.items():
        key = frozenset((i, j))
        if key in seen:
            continue
        seen.add(key)
        if (j, i) in top_edges:
            t2, e2 = top_edges[(j, i)]
            gluings.append(Gluing(EdgeRef(t, e), EdgeRef(t2, e2)))
            bt, be = bot_edges[(i, j)]
            bt2, be2 = bot_edges[(j, i)]
            gluings.append(Gluing(EdgeRef(bt, be), EdgeRef(bt2, be2)))
        else:
            bt, be = bot_edges[(j, i)]
            gluings.append(Gluing(EdgeRef(t, e), EdgeRef(bt, be)))
    return build_surface(triangles, gluings, tol)


def double_of_polygon(spec: PolygonSpec, tol: float | None = None) -> FlatSurface:
    """Glue two mirror copies of a simple polygon along their boundary.

    A corner with interior angle beta becomes a vertex of curvature
    2*pi - 2*beta; the result is a topological sphere.
    """
    spec.validate()
    return _double_from_triangulation(spec.vertices, _ear_clip(spec.vertices), tol)


def flat_torus(u: Vec, v: Vec, tol: float | None = None) -> FlatSurface:
    """Fundamental parallelogram of the lattice (u, v), opposite sides glued."""
    u = (float(u[0]), float(u[1]))
    v = (float(v[0]), float(v[1]))
    area = cross(u[0], u[1], v[0], v[1])
    if abs(area) <= (metric_tolerance() if tol is None else tol):
        raise DegenerateLattice("spanning vectors are collinear")
    if area < 0:
        u, v = v, u
    o = (0.0, 0.0)
    uv = (u[0] + v[0], u[1] + v[1])
    t0 = Triangle(0, (o, u, uv))
    t1 = Triangle(1, (o, uv, v))
    gl = [
        Gluing(EdgeRef(0, 0), EdgeRef(1, 1)),  # bottom to top
        Gluing(EdgeRef(0, 1), EdgeRef(1, 2)),  # right to left
        Gluing(EdgeRef(0, 2), EdgeRef(1, 0)),  # shared diagonal
    ]
    return build_surface([t0, t1], gl, tol)


def isosceles_tetrahedron(sides: tuple[float, float, float], tol: float | None = None) -> FlatSurface:
    """Four congruent faces glued via the standard one-big-triangle net.

    ``sides`` are the face's edge lengths.  Raises NotAcute when they
    violate the strict triangle inequality (no face triangle exists).
    Non-acute faces still produce a valid surface with four curvature-pi
    vertices, though the 3-space realization is then degenerate.
    """
    a, b, c = (float(s) for s in sides)
    if min(a, b, c) <= 0 or a + b <= c or b + c <= a or c + a <= b:
        raise NotAcute(f"side lengths {sides} do not form a triangle")
    # Big triangle with doubled side lengths; the four faces are its medial
    # triangle plus the three corner triangles (net of the folded surface).
    p0 = (0.0, 0.0)
    p1 = (2.0 * a, 0.0)
    x = (4 * a * a + 4 * c * c - 4 * b * b) / (4.0 * a)
    y2 = 4 * c * c - x * x
    if y2 <= 0:
        raise NotAcute(f"side lengths {sides} give a degenerate big triangle")
    p2 = (x, math.sqrt(y2))
    m0 = ((p1[0] + p2[0]) / 2, (p1[1] + p2[1]) / 2)
    m1 = ((p2[0] + p0[0]) / 2, (p2[1] + p0[1]) / 2)
    m2 = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
    tris = [
        Triangle(0, (m0, m1, m2)),  # central face
        Triangle(1, (p0, m2, m1)),
        Triangle(2, (p1, m0, m2)),
        Triangle(3, (p2, m1, m0)),
    ]
    gl = [
        # central edges against the coincident corner-face edges
        Gluing(EdgeRef(0, 0), EdgeRef(3, 1)),  # m0->m1 vs m1->m0
        Gluing(EdgeRef(0, 1), EdgeRef(1, 1)),  # m1->m2 vs m2->m1
        Gluing(EdgeRef(0, 2), EdgeRef(2, 1)),  # m2->m0 vs m0->m2
        # folds along the big triangle's sides, rotation by pi about midpoints
        Gluing(EdgeRef(1, 0), EdgeRef(2, 2)),  # p0->m2 vs m2->p1
        Gluing(EdgeRef(2, 0), EdgeRef(3, 2)),  # p1->m0 vs m0->p2
        Gluing(EdgeRef(3, 0), EdgeRef(1, 2)),  # p2->m1 vs m1->p0
    ]
    return build_surface(tris, gl, tol)


def _face_chart(quad3d: list[tuple[float, float, float]]) -> list[Vec]:
    """Isometric 2D chart of a planar 3D polygon, counterclockwise from outside."""
    q = np.asarray(quad3d, dtype=float)
    u = q[1] - q[0]
    u = u / np.linalg.norm(u)
    n = np.cross(u, q[2] - q[0])
    n = n / np.linalg.norm(n)
    w = np.cross(n, u)
    return [(float((p - q[0]) @ u), float((p - q[0]) @ w)) for p in q]


def cube_surface(tol: float | None = None) -> FlatSurface:
    """Unit cube boundary, two triangles per face.

    Face k owns triangles (2k, 2k+1); all eight vertices have curvature
    pi/2, which makes the surface a convenient non-parallel sphere.
    """
    faces = [
        [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)],
        [(0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)],
        [(1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)],
        [(0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)],
        [(0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)],
        [(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)],
    ]
    tris: list[Triangle] = []
    owner: dict[tuple, tuple[int, int]] = {}
    gluings: list[Gluing] = []
    for f, quad in enumerate(faces):
        chart = _face_chart([tuple(map(float, p)) for p in quad])
        t0, t1 = 2 * f, 2 * f + 1
        tris.append(Triangle(t0, (chart[0], chart[1], chart[2])))
        tris.append(Triangle(t1, (chart[0], chart[2], chart[3])))
        gluings.append(Gluing(EdgeRef(t0, 2), EdgeRef(t1, 0)))  # shared diagonal
        boundary = [
            (quad[0], quad[1], t0, 0),
            (quad[1], quad[2], t0, 1),
            (quad[2], quad[3], t1, 1),
            (quad[3], quad[0], t1, 2),
        ]
        for a3, b3, t, e in boundary:
            owner[(a3, b3)] = (t, e)
    seen = set()
    for (a3, b3), (t, e) in owner.items():
        if frozenset((a3, b3)) in seen:
            continue
        seen.add(frozenset((a3, b3)))
        t2, e2 = owner[(b3, a3)]
        gluings.append(Gluing(EdgeRef(t, e), EdgeRef(t2, e2)))
    return build_surface(tris, gluings, tol)


def cube_face_partition() -> list[list[int]]:
    return [[2 * f, 2 * f + 1] for f in range(6)]


def ring_double(tol: float | None = None) -> FlatSurface:
    """Double of a square ring whose hole is a 45-degree-rotated square.

    All eight vertices have curvature +pi (outer corners) or -pi (hole
    corners), yet a loop through both copies around the hole crosses two
    reflections meeting at 45 degrees, so its holonomy is a quarter turn
    and the surface is not parallel.
    """
    pts = (
        (-2.0, -2.0),
        (2.0, -2.0),
        (2.0, 2.0),
        (-2.0, 2.0),
        (0.0, -1.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (-1.0, 0.0),
    )
    tris = [
        (0, 1, 4),
        (1, 5, 4),
        (1, 2, 5),
        (2, 6, 5),
        (2, 3, 6),
        (3, 7, 6),
        (3, 0, 7),
        (0, 4, 7),
    ]
    return _double_from_triangulation(pts, tris, tol)


def square_identification_surface(
    pairings: list[tuple[tuple[float, float], tuple[float, float], bool]],
    tol: float | None = None,
) -> FlatSurface:
    """Quotient of the unit square by identified boundary arcs.

    Arcs are (start, end) in perimeter coordinates s in [0, 4]: side 0 is
    the bottom (s in [0,1]), then right, top, left, counterclockwise.
    Each pairing is (arc_a, arc_b, aligned): ``aligned=True`` identifies
    the arcs with matching perimeter direction (an orientation-reversing
    gluing), ``aligned=False`` with opposite directions (the torus-style
    convention).  Arcs must not contain a corner in their interior and
    must partition the whole boundary.
    """
    tol = metric_tolerance() if tol is None else tol

    def boundary_point(s: float) -> Vec:
        s = s % 4.0
        side = int(s)
        f = s - side
        if side == 0:
            return (f, 0.0)
        if side == 1:
            return (1.0, f)
        if side == 2:
            return (1.0 - f, 1.0)
        return (0.0, 1.0 - f)

    arcs: list[tuple[float, float]] = []
    for a, b, _flag in pairings:
        for s0, s1 in (a, b):
            if not (0.0 <= s0 < s1 <= 4.0):
                raise UncoveredBoundary(f"bad arc ({s0}, {s1})")
            for corner in range(5):
                if s0 + tol < corner < s1 - tol:
                    raise UncoveredBoundary(
                        f"arc ({s0}, {s1}) contains corner s={corner} in its interior"
                    )
            arcs.append((s0, s1))
    for (a, b, _flag) in pairings:
        if abs((a[1] - a[0]) - (b[1] - b[0])) > tol:
            raise ArcLengthMismatch(f"arcs {a} and {b} differ in length")
    arcs.sort()
    cover = 0.0
    for i, (s0, s1) in enumerate(arcs):
        if abs(s0 - cover) > tol:
            raise UncoveredBoundary(f"gap or overlap near s={cover}")
        cover = s1
    if abs(cover - 4.0) > tol:
        raise UncoveredBoundary("arcs do not cover the boundary")

    # Fan triangulation from the center; boundary nodes are the corners
    # plus all arc endpoints, so each arc is exactly one fan edge.
    node_pos = sorted({0.0, 1.0, 2.0, 3.0} | {s for arc in arcs for s in arc if s < 4.0})
    center = (0.5, 0.5)
    n = len(node_pos)
    tris = []
    for i in range(n):
        a = boundary_point(node_pos[i])
        b = boundary_point(node_pos[(i + 1) % n])
        tris.append(Triangle(i, (center, a, b)))
    gluings = [Gluing(EdgeRef(i, 2), EdgeRef((i + 1) % n, 0)) for i in range(n)]

    def arc_edge(s0: float) -> int:
        for i, sp in enumerate(node_pos):
            if abs(sp - s0) <= tol:
                return i
        raise UncoveredBoundary(f"no boundary node at s={s0}")

    for a, b, aligned in pairings:
        ta = arc_edge(a[0])
        tb = arc_edge(b[0])
        gluings.append(Gluing(EdgeRef(ta, 1), EdgeRef(tb, 1), reversed=aligned))
    return build_surface(tris, gluings, tol)


def klein_bottle(tol: float | None = None) -> FlatSurface:
    """Unit square with one straight and one orientation-flipped side pair."""
    return square_identification_surface(
        [
            ((0.0, 1.0), (2.0, 3.0), False),
            ((1.0, 2.0), (3.0, 4.0), True),
        ],
        tol,
    )


def example2_candidates() -> list[tuple[str, list[tuple[tuple[float, float], tuple[float, float], bool]]]]:
    """Candidate three-pair square identifications for the genus-3 quotient.

    The bottom and top sides are halved; halves pair across, the left and
    right sides pair with each other.  All matchings and orientation
    flags are enumerated; the figure's exact layout is unrecoverable, so
    callers search these for the stated invariants (non-orientable,
    Euler characteristic -1, one vertex of curvature -2*pi).
    """
    b1, b2 = (0.0, 0.5), (0.5, 1.0)
    t1, t2 = (2.0, 2.5), (2.5, 3.0)
    r, l = (1.0, 2.0), (3.0, 4.0)
    out = []
    for swap in (False, True):
        pair_b1 = t2 if swap else t1
        pair_b2 = t1 if swap else t2
        for f1 in (False, True):
            for f2 in (False, True):
                for f3 in (False, True):
                    name = f"swap{int(swap)}-f{int(f1)}{int(f2)}{int(f3)}"
                    out.append(
                        (
                            name,
                            [
                                (b1, pair_b1, f1),
                                (b2, pair_b2, f2),
                                (r, l, f3),
                            ],
                        )
                    )
    return out


# ---------------------------------------------------------------------------
# Cut-and-glue surgery


def _fan(polygon: list[Vec], apex: int) -> list[tuple[Vec, Vec, Vec]]:
    """Fan triangulation of a convex polygon from one vertex.

    Consecutive collinear vertices are fine as long as the apex is off
    their line.
    """
    n = len(polygon)
    out = []
    for i in range(n):
        j = (i + 1) % n
        if i == apex or j == apex:
            continue
        out.append((polygon[apex], polygon[i], polygon[j]))
    return out


def _find_edge(
    tris: list[tuple[int, tuple[Vec, Vec, Vec]]], a: Vec, b: Vec, tol: float
) -> tuple[int, int]:
    """Locate the (triangle id, edge) whose oriented edge runs a -> b."""
    for tid, corners in tris:
        for e in range(3):
            u = corners[e]
            v = corners[(e + 1) % 3]
            if (
                abs(u[0] - a[0]) <= tol
                and abs(u[1] - a[1]) <= tol
                and abs(v[0] - b[0]) <= tol
                and abs(v[1] - b[1]) <= tol
            ):
                return (tid, e)
    raise UnsupportedCut(f"internal error: edge {a}->{b} not found after surgery")


def _split_triangle_chain(
    corners: tuple[Vec, Vec, Vec], edge: int, points: list[Vec], first_id: int
) -> tuple[list[tuple[int, tuple[Vec, Vec, Vec]]], list[Gluing]]:
    """Split one triangle at interior points of one edge, fanning from the
    opposite corner.  Returns the sub-triangles and their internal spokes."""
    u0 = corners[edge]
    u1 = corners[(edge + 1) % 3]
    opp = corners[(edge + 2) % 3]
    chain = [u0] + points + [u1]
    tris = []
    gl = []
    for i in range(len(chain) - 1):
        tid = first_id + i
        tris.append((tid, (chain[i], chain[i + 1], opp)))
        if i > 0:
            # spoke between consecutive pieces: (opp -> chain[i]) vs (chain[i] -> opp)
            gl.append(Gluing(EdgeRef(first_id + i - 1, 1), EdgeRef(tid, 2)))
    return tris, gl


def cut_and_glue(
    surface: FlatSurface,
    cut: tuple[int, Vec, Vec],
    patch: PolygonSpec,
    anchor: int = 0,
    tol: float | None = None,
) -> FlatSurface:
    """Slit the surface along a chart segment and sew a polygon into the slit.

    ``cut`` is (triangle id, start, end) with both endpoints strictly
    inside that triangle's chart; the slit boundary has length twice the
    cut, which must equal the patch perimeter.  ``anchor`` names the patch
    vertex identified with the cut start.  The cut endpoints become cone
    points.  Patch triangles receive the highest triangle ids, and the
    result records them in ``patch_triangle_ids``.

    Cuts spanning several triangles are not supported; pick a chart in
    which the cut is a single segment.
    """
    tol = surface.tolerance if tol is None else tol
    host_id, p, q = cut[0], (float(cut[1][0]), float(cut[1][1])), (float(cut[2][0]), float(cut[2][1]))
    if not surface.has_triangle(host_id):
        raise UnsupportedCut(f"no triangle with id {host_id}")
    host = surface.triangle(host_id)
    scale = max(host.edge_length(k) for k in range(3))
    margin = max(tol * (1 + scale), 1e-12)
    ell = norm(q[0] - p[0], q[1] - p[1])
    if ell <= margin:
        raise UnsupportedCut("cut endpoints coincide")
    for pt in (p, q):
        if not host.contains(pt, tol=0.0):
            raise UnsupportedCut(f"cut endpoint {pt} outside triangle {host_id}")
    for k in range(3):
        if point_segment_distance(host.corner(k), p, q) <= margin:
            raise CutThroughVertex(f"cut passes through corner {k} of triangle {host_id}")

    patch.validate()
    if abs(patch.perimeter() - 2.0 * ell) > max(tol, 1e-9) * (1.0 + 2.0 * ell):
        raise PerimeterMismatch(
            f"patch perimeter {patch.perimeter()!r} != twice cut length {2 * ell!r}"
        )
    if not 0 <= anchor < len(patch.vertices):
        raise UnsupportedCut(f"anchor {anchor} out of range")

    w = normalize((q[0] - p[0], q[1] - p[1]))

    # Supporting line through p, q extended to the triangle boundary.
    crossings = []  # (edge, t along line from p, point)
    for e in range(3):
        a = host.edge_start(e)
        v = host.edge_vector(e)
        elen = host.edge_length(e)
        ux, uy = v[0] / elen, v[1] / elen
        denom = ux * w[1] - uy * w[0]
        if abs(denom) < 1e-13:
            continue
        sx, sy = p[0] - a[0], p[1] - a[1]
        t = (sx * uy - sy * ux) / denom
        s = (sx * w[1] - sy * w[0]) / denom
        if -margin <= s <= elen + margin:
            if s <= margin or s >= elen - margin:
                raise CutThroughVertex("supporting line of the cut meets a corner")
            crossings.append((e, t, (p[0] + t * w[0], p[1] + t * w[1])))
    if len(crossings) != 2:
        raise UnsupportedCut("cut line does not cross the triangle boundary twice")
    crossings.sort(key=lambda c: c[1])
    (eP, tP, P0), (eQ, tQ, Q0) = crossings
    if eP == eQ:
        raise UnsupportedCut("cut line crosses one edge twice")
    if tP >= -margin or tQ <= ell + margin:
        raise UnsupportedCut("cut endpoints must be strictly inside the triangle")

    side_of = []
    for k in range(3):
        c = host.corner(k)
        s = cross(w[0], w[1], c[0] - p[0], c[1] - p[1])
        if abs(s) <= margin:
            raise CutThroughVertex("a corner lies on the supporting line of the cut")
        side_of.append(s > 0)

    # Patch boundary walk: counterclockwise from the anchor corresponds to
    # ascending positions on the right bank (p to q) then on the left bank
    # (q back to p); this is forced by orientation compatibility.
    pverts = patch.vertices
    np_ = len(pverts)
    positions = [0.0]
    for j in range(np_):
        a = pverts[(anchor + j) % np_]
        b = pverts[(anchor + j + 1) % np_]
        positions.append(positions[-1] + norm(b[0] - a[0], b[1] - a[1]))
    # positions[j] = arc position of patch vertex (anchor + j); last = perimeter
    snap = max(tol, 1e-12) * (1 + 2 * ell)
    positions = [ell if abs(s - ell) <= snap else s for s in positions]

    def bank_point(s: float) -> Vec:
        if s <= ell:
            return (p[0] + s * w[0], p[1] + s * w[1])
        r = s - ell
        return (q[0] - r * w[0], q[1] - r * w[1])

    right_breaks = sorted(s for s in positions[1:-1] if snap < s < ell - snap)
    left_breaks = sorted((s for s in positions[1:-1] if ell + snap < s < 2 * ell - snap))

    # Host replacement: walk the boundary stations counterclockwise.
    stations: list[tuple[str, int]] = []
    for e in range(3):
        stations.append(("corner", e))
        if e == eP:
            stations.append(("P", e))
        if e == eQ:
            stations.append(("Q", e))
    qi = stations.index(("Q", eQ))
    left_corners: list[int] = []
    right_corners: list[int] = []
    bucket = left_corners
    for off in range(1, len(stations)):
        kind, val = stations[(qi + off) % len(stations)]
        if kind == "corner":
            bucket.append(val)
        elif kind == "P":
            bucket = right_corners
    if not left_corners or not right_corners:
        raise UnsupportedCut("cut line fails to separate the triangle corners")
    for k in left_corners:
        if not side_of[k]:
            raise UnsupportedCut("internal error: corner side bookkeeping")

    left_nodes = [P0, p] + [bank_point(s) for s in sorted(left_breaks, reverse=True)] + [q, Q0]
    right_chord = [Q0, q] + [bank_point(s) for s in sorted(right_breaks, reverse=True)] + [p]

    left_poly = left_nodes + [host.corner(k) for k in left_corners]
    right_poly = [P0] + [host.corner(k) for k in right_corners] + right_chord

    max_id = max(t.id for t in surface.triangles)
    next_id = max_id + 1
    new_host: list[tuple[int, tuple[Vec, Vec, Vec]]] = []
    new_gluings: list[Gluing] = []

    def add_fan(poly: list[Vec], apex: int):
        nonlocal next_id
        tris = _fan(poly, apex)
        ids = []
        for c3 in tris:
            new_host.append((next_id, c3))
            ids.append(next_id)
            next_id += 1
        # consecutive fan triangles share a spoke: (apex, v_{i+1})
        for a, b in zip(ids, ids[1:]):
            new_gluings.append(Gluing(EdgeRef(a, 2), EdgeRef(b, 0)))
        return ids

    add_fan(left_poly, len(left_nodes))  # apex = first left corner
    add_fan(right_poly, 1)  # apex = first right corner

    find = lambda a, b: _find_edge(new_host, a, b, margin)

    # Chord pieces outside the slit are resealed left-to-right.
    new_gluings.append(Gluing(EdgeRef(*find(P0, p)), EdgeRef(*find(p, P0))))
    new_gluings.append(Gluing(EdgeRef(*find(q, Q0)), EdgeRef(*find(Q0, q))))

    # Pieces of the host's original edges, for regluing to the neighbors.
    piece_map: dict[tuple[int, int], list[tuple[tuple[int, int], Vec, Vec]]] = {}
    for e in range(3):
        chain = [host.edge_start(e)]
        if e == eP:
            chain.append(P0)
        if e == eQ:
            chain.append(Q0)
        chain.append(host.edge_end(e))
        pieces = []
        for aa, bb in zip(chain, chain[1:]):
            pieces.append((find(aa, bb), aa, bb))
        piece_map[(host_id, e)] = pieces

    # Split the neighbors across eP and eQ at the crossing images.
    neighbor_tris: list[tuple[int, tuple[Vec, Vec, Vec]]] = []
    split_ids = {host_id}
    for e_host, X in ((eP, P0), (eQ, Q0)):
        ref, iso = surface.edge_transition(host_id, e_host)
        if ref.tri == host_id or ref.tri in split_ids:
            raise UnsupportedCut(
                "cut line exits through edges glued to the host or to one neighbor twice"
            )
        split_ids.add(ref.tri)
        ntri = surface.triangle(ref.tri)
        img = iso.apply(X)
        subs, spokes = _split_triangle_chain(ntri.corners, ref.edge, [img], next_id)
        next_id += len(subs)
        neighbor_tris.extend(subs)
        new_gluings.extend(spokes)
        chain = [ntri.edge_start(ref.edge), img, ntri.edge_end(ref.edge)]
        pieces = []
        for aa, bb in zip(chain, chain[1:]):
            pieces.append((_find_edge(subs, aa, bb, margin), aa, bb))
        piece_map[(ref.tri, ref.edge)] = pieces
        for other_e in range(3):
            if other_e == ref.edge:
                continue
            aa, bb = ntri.edge_start(other_e), ntri.edge_end(other_e)
            piece_map[(ref.tri, other_e)] = [(_find_edge(subs, aa, bb, margin), aa, bb)]

    # Patch triangulation in its own chart, split where the walk passes q.
    patch_tris_idx = _ear_clip(pverts)
    patch_tris: list[tuple[int, tuple[Vec, Vec, Vec]]] = []
    patch_ids = []
    for (i, j, k) in patch_tris_idx:
        patch_tris.append((next_id, (pverts[i], pverts[j], pverts[k])))
        patch_ids.append(next_id)
        next_id += 1
    for i in range(len(patch_tris_idx)):
        for e in range(3):
            ii, jj = patch_tris_idx[i][e], patch_tris_idx[i][(e + 1) % 3]
            for i2 in range(i + 1, len(patch_tris_idx)):
                for e2 in range(3):
                    if (
                        patch_tris_idx[i2][e2] == jj
                        and patch_tris_idx[i2][(e2 + 1) % 3] == ii
                    ):
                        new_gluings.append(
                            Gluing(EdgeRef(patch_ids[i], e), EdgeRef(patch_ids[i2], e2))
                        )
    breakpoints = sorted({0.0, ell} | set(positions[:-1]))
    if not any(abs(s - ell) <= snap for s in positions):
        # The bank transition at q falls inside a patch edge: split that
        # patch triangle at the corresponding boundary point.
        j = max(jj for jj, s in enumerate(positions) if s < ell)
        a = pverts[(anchor + j) % np_]
        b = pverts[(anchor + j + 1) % np_]
        f = (ell - positions[j]) / (positions[j + 1] - positions[j])
        mid = (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
        owner, oedge = _find_edge(patch_tris, a, b, margin)
        corners = next(c for tid, c in patch_tris if tid == owner)
        patch_tris = [(tid, c) for tid, c in patch_tris if tid != owner]
        patch_ids.remove(owner)
        subs, spokes = _split_triangle_chain(corners, oedge, [mid], next_id)
        next_id += len(subs)
        patch_tris.extend(subs)
        patch_ids.extend(tid for tid, _c in subs)
        new_gluings.extend(spokes)
        # Internal patch gluings that referenced the split triangle's intact
        # edges move to the sub-triangle that now owns them.
        remap = {
            (owner, (oedge + 1) % 3): (subs[1][0], 1),
            (owner, (oedge + 2) % 3): (subs[0][0], 2),
        }
        new_gluings = [
            Gluing(
                EdgeRef(*remap.get((g.a.tri, g.a.edge), (g.a.tri, g.a.edge))),
                EdgeRef(*remap.get((g.b.tri, g.b.edge), (g.b.tri, g.b.edge))),
                g.reversed,
            )
            for g in new_gluings
        ]

    # Glue patch boundary arcs onto the slit banks.
    def patch_boundary_point(s: float) -> Vec:
        j = 0
        while j + 1 < len(positions) and positions[j + 1] < s - snap:
            j += 1
        a = pverts[(anchor + j) % np_]
        b = pverts[(anchor + j + 1) % np_]
        seg = positions[j + 1] - positions[j]
        f = 0.0 if seg == 0 else (s - positions[j]) / seg
        return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))

    arc_stops = sorted({0.0, ell, 2.0 * ell} | {s for s in positions if 0.0 <= s <= 2 * ell})
    arc_stops = _dedupe_sorted(arc_stops, snap)
    for s0, s1 in zip(arc_stops, arc_stops[1:]):
        pa = patch_boundary_point(s0)
        pb = patch_boundary_point(s1)
        patch_ref = _find_edge(patch_tris, pa, pb, margin)
        bank_ref = find(bank_point(s1), bank_point(s0))
        new_gluings.append(Gluing(EdgeRef(*patch_ref), EdgeRef(*bank_ref)))

    # Reattach the original gluings over the pieces.
    final_tris: list[Triangle] = [
        t for t in surface.triangles if t.id not in split_ids
    ]
    final_tris += [Triangle(tid, c) for tid, c in new_host + neighbor_tris + patch_tris]
    final_gluings: list[Gluing] = []
    for gi, g in enumerate(surface.gluings):
        ka, kb = (g.a.tri, g.a.edge), (g.b.tri, g.b.edge)
        if ka not in piece_map and kb not in piece_map:
            final_gluings.append(g)
            continue
        tri_a = surface.triangle(g.a.tri)
        tri_b = surface.triangle(g.b.tri)
        pieces_a = piece_map.get(
            ka, [((g.a.tri, g.a.edge), tri_a.edge_start(g.a.edge), tri_a.edge_end(g.a.edge))]
        )
        pieces_b = piece_map.get(
            kb, [((g.b.tri, g.b.edge), tri_b.edge_start(g.b.edge), tri_b.edge_end(g.b.edge))]
        )
        iso = surface.transitions[gi]
        for ref_a, ua, va in pieces_a:
            ia, ib = iso.apply(ua), iso.apply(va)
            matched = None
            for ref_b, ub, vb in pieces_b:
                if g.reversed:
                    hit = _close(ia, ub, margin) and _close(ib, vb, margin)
                else:
                    hit = _close(ia, vb, margin) and _close(ib, ub, margin)
                if hit:
                    matched = ref_b
                    break
            if matched is None:
                raise UnsupportedCut("internal error: piece matching failed")
            final_gluings.append(Gluing(EdgeRef(*ref_a), EdgeRef(*matched), g.reversed))

    final_gluings.extend(new_gluings)
    out = build_surface(final_tris, final_gluings, tol)
    out.patch_triangle_ids = tuple(sorted(patch_ids))
    return out


def _close(a: Vec, b: Vec, tol: float) -> bool:
    return abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol


def _dedupe_sorted(vals: list[float], tol: float) -> list[float]:
    out = [vals[0]]
    for v in vals[1:]:
        if v - out[-1] > tol:
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# Catalog


SQUARE = PolygonSpec([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
L_SHAPE = PolygonSpec([(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])

EXAMPLE1_PARAM = math.sqrt(2.0) / 2.0


def example1_surface(a: float = EXAMPLE1_PARAM):
    """Square double cut along {a} x [1/3, 2/3] with a side-1/6 square patch.

    Returns (surface, info) where info holds the patch triangle ids and a
    start tangent on the upper face at (a, 0) for the closed-geodesic
    experiments.  Requires a in (2/3, 1) so the cut stays inside one
    chart triangle.
    """
    base = double_of_polygon(SQUARE)
    host = None
    for t in base.triangles:
        if t.contains((a, 1.0 / 3.0), tol=-1e-9) and t.contains((a, 2.0 / 3.0), tol=-1e-9):
            host = t.id
            break
    if host is None:
        raise UnsupportedCut(f"cut {a} x [1/3, 2/3] spans several chart triangles")
    side = 1.0 / 6.0
    patch = PolygonSpec([(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)])
    surf = cut_and_glue(base, (host, (a, 1.0 / 3.0), (a, 2.0 / 3.0)), patch, anchor=0)
    start_tri = find_triangle_with_germ(surf, (a, 0.0), (0.1, 1.0))
    info = {
        "patch_ids": surf.patch_triangle_ids,
        "start_tri": start_tri,
        "start_xy": (a, 0.0),
        "cut_length": 1.0 / 3.0,
    }
    return surf, info


def find_triangle_with_germ(surface: FlatSurface, xy: Vec, direction: Vec) -> int:
    """Unique triangle whose chart contains xy plus a nudge along direction."""
    d = normalize(direction)
    hits = []
    for t in surface.triangles:
        tol = 1e-9 * (1 + max(t.edge_length(k) for k in range(3)))
        if not t.contains(xy, tol):
            continue
        nudge = (xy[0] + 1e-7 * d[0], xy[1] + 1e-7 * d[1])
        if t.contains(nudge, tol):
            hits.append(t.id)
    if len(hits) != 1:
        raise UnsupportedCut(f"germ at {xy} lies in {len(hits)} charts: {hits}")
    return hits[0]


def catalog() -> list[tuple[str, FlatSurface]]:
    """The fixed experiment catalog, ten surfaces, deterministic order."""
    ex1, _info = example1_surface()
    return [
        ("regular-tetrahedron", isosceles_tetrahedron((1.0, 1.0, 1.0))),
        ("isosceles-tetrahedron", isosceles_tetrahedron((1.0, 1.0, 1.2))),
        ("unit-torus", flat_torus((1.0, 0.0), (0.0, 1.0))),
        ("sheared-torus", flat_torus((1.0, 0.0), (0.5, 1.0))),
        ("square-double", double_of_polygon(SQUARE)),
        ("l-double", double_of_polygon(L_SHAPE)),
        ("cube", cube_surface()),
        ("example1", ex1),
        ("klein-bottle", klein_bottle()),
        ("ring-double", ring_double()),
    ]


CATALOG_PARALLEL = {
    "regular-tetrahedron": True,
    "isosceles-tetrahedron": True,
    "unit-torus": True,
    "sheared-torus": True,
    "square-double": True,
    "l-double": True,
    "cube": False,
    "example1": False,
    "klein-bottle": False,
    "ring-double": False,
}


# ---------------------------------------------------------------------------
# Random polygon families for the statistical audits


def random_star_polygon(rng: np.random.Generator, n_min: int = 4, n_max: int = 9) -> PolygonSpec:
    """Random simple polygon, star-shaped around the origin.

    Angular gaps are normalized increments, so every gap stays well below
    pi and the origin is strictly interior; that makes the polygon simple
    by construction.
    """
    n = int(rng.integers(n_min, n_max + 1))
    gaps = rng.uniform(0.2, 1.0, n)
    angles = np.cumsum(gaps) * (2.0 * math.pi / float(np.sum(gaps)))
    radii = rng.uniform(0.5, 2.0, n)
    pts = [(float(r * math.cos(t)), float(r * math.sin(t))) for r, t in zip(radii, angles)]
    return PolygonSpec(pts)


def random_rectilinear_polygon(rng: np.random.Generator, max_cols: int = 6) -> PolygonSpec:
    """Random axis-aligned histogram polygon; all corners are right angles."""
    k = int(rng.integers(2, max_cols + 1))
    heights = [int(rng.integers(1, 6))]
    while len(heights) < k:
        h = int(rng.integers(1, 6))
        if h != heights[-1]:
            heights.append(h)
    pts: list[Vec] = [(0.0, 0.0), (float(k), 0.0)]
    for i in range(k - 1, -1, -1):
        pts.append((float(i + 1), float(heights[i])))
        pts.append((float(i), float(heights[i])))
    # drop collinear duplicates along the skyline
    cleaned: list[Vec] = []
    for pt in pts:
        if len(cleaned) >= 2:
            a, b = cleaned[-2], cleaned[-1]
            if (
                cross(b[0] - a[0], b[1] - a[1], pt[0] - b[0], pt[1] - b[1]) == 0.0
            ):
                cleaned.pop()
        cleaned.append(pt)
    return PolygonSpec(cleaned)
