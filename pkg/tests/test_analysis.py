import math

import numpy as np
import pytest

from conftest import edge_midpoint_tangent, incenter_point

from flatgeo.analysis import (
    SegmentPair,
    closed_geodesic_detect,
    coface_angle_spectrum,
    density_estimate,
    direction_scan,
    lap_criterion,
    segment_pair_endpoints,
    self_intersections,
)
from flatgeo.builders import (
    L_SHAPE,
    cube_face_partition,
    cube_surface,
    double_of_polygon,
    flat_torus,
    isosceles_tetrahedron,
)
from flatgeo.errors import CoincidentMidpoints, NotConvex
from flatgeo.geometry import cross, segments_intersect
from flatgeo.tracer import SurfacePoint, TangentDirection, locate, tangent_representatives, trace, truncate

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


# --- the segment-pair criterion ------------------------------------------------


def test_lap_criterion_parallel_disjoint():
    # sin(delta) = 0 forces the right side to zero: disjoint verticals
    pair = SegmentPair((0.0, 0.0), (1.0, 0.0), math.pi / 2, math.pi / 2, 0.4)
    assert lap_criterion(pair) is False


def test_lap_criterion_boundary_touch():
    # segments meeting exactly at (1/2, 1/2): equality case is an intersection
    pair = SegmentPair((0.0, 0.0), (1.0, 0.0), math.pi / 4, 3 * math.pi / 4, math.sqrt(2) / 2)
    assert lap_criterion(pair) is True
    a1, b1, a2, b2 = segment_pair_endpoints(pair)
    assert segments_intersect(a1, b1, a2, b2, tol=1e-12)


def test_lap_criterion_coincident_midpoints():
    with pytest.raises(CoincidentMidpoints):
        lap_criterion(SegmentPair((0.3, 0.3), (0.3, 0.3), 0.1, 0.2, 1.0))


def conforming_pairs(rng, count):
    """Random SegmentPairs whose first endpoints share a half-plane."""
    out = []
    while len(out) < count:
        m1 = (float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        m2 = (float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        if math.dist(m1, m2) < 1e-3:
            continue
        a1 = float(rng.uniform(0, 2 * math.pi))
        a2 = float(rng.uniform(0, 2 * math.pi))
        half = float(rng.uniform(0.05, 3.0))
        pair = SegmentPair(m1, m2, a1, a2, half)
        e1, _b1, e2, _b2 = segment_pair_endpoints(pair)
        s1 = cross(m2[0] - m1[0], m2[1] - m1[1], e1[0] - m1[0], e1[1] - m1[1])
        s2 = cross(m2[0] - m1[0], m2[1] - m1[1], e2[0] - m1[0], e2[1] - m1[1])
        if s1 * s2 <= 0:
            continue
        out.append(pair)
    return out


def criterion_margin(pair):
    d = math.dist(pair.m1, pair.m2)
    lhs = d * max(abs(math.sin(pair.alpha1)), abs(math.sin(pair.alpha2)))
    rhs = pair.half_length * abs(math.sin(pair.alpha2 - pair.alpha1))
    return abs(lhs - rhs)


def test_lap_criterion_against_brute_force():
    rng = np.random.default_rng(12345)
    pairs = conforming_pairs(rng, 3000)
    checked = 0
    for pair in pairs:
        if criterion_margin(pair) <= 1e-6:
            continue
        a1, b1, a2, b2 = segment_pair_endpoints(pair)
        brute = segments_intersect(a1, b1, a2, b2)
        assert lap_criterion(pair) == brute
        checked += 1
    assert checked > 2500


def test_non_intersecting_bound():
    # disjoint conforming pairs obey |sin delta| < d / half_length
    rng = np.random.default_rng(777)
    seen = 0
    for pair in conforming_pairs(rng, 2000):
        if criterion_margin(pair) <= 1e-6:
            continue
        a1, b1, a2, b2 = segment_pair_endpoints(pair)
        if not segments_intersect(a1, b1, a2, b2):
            d = math.dist(pair.m1, pair.m2)
            assert abs(math.sin(pair.alpha2 - pair.alpha1)) < d / pair.half_length
            seen += 1
    assert seen > 400


# --- self-intersections ---------------------------------------------------------


def test_torus_traces_never_self_intersect():
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    rng = np.random.default_rng(31)
    for _ in range(5):
        ang = float(rng.uniform(0, 2 * math.pi))
        tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.25)), (math.cos(ang), math.sin(ang))), 60.0)
        if tr.termination.kind != "LengthReached":
            continue
        assert self_intersections(s, tr) == []


def test_tetrahedron_strict_traces_simple():
    s = isosceles_tetrahedron((1.0, 1.0, 1.0))
    mid, d = edge_midpoint_tangent(s, 0, 0, math.atan(1.0 / 7.0))
    tr = trace(s, TangentDirection(SurfacePoint(0, mid), d), 200.0)
    assert tr.termination.kind == "LengthReached"
    assert self_intersections(s, tr) == []


CUBE_FIRST_EVENT = (0.6832432841019034, 5.235759602457856, 1.5707963267948966)


def test_cube_trace_self_intersects_regression():
    s = cube_surface()
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.3)), (math.cos(0.3), math.sin(0.3))), 50.0)
    events = self_intersections(s, tr)
    assert len(events) == 101
    first = min(events, key=lambda e: (e.t2, e.t1))
    assert first.t1 == pytest.approx(CUBE_FIRST_EVENT[0], abs=1e-9)
    assert first.t2 == pytest.approx(CUBE_FIRST_EVENT[1], abs=1e-9)
    assert first.angle == pytest.approx(CUBE_FIRST_EVENT[2], abs=1e-9)


def test_events_locate_consistently():
    s = cube_surface()
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.3)), (math.cos(0.3), math.sin(0.3))), 50.0)
    for ev in self_intersections(s, tr):
        assert 1e-6 < ev.angle < math.pi - 1e-6
        p1 = locate(tr, ev.t1)
        p2 = locate(tr, ev.t2)
        for p in (p1, p2):
            reps = tangent_representatives(s, p, (1.0, 0.0), tol=1e-6)
            match = min(
                (math.dist(xy, ev.point.xy) for tri, xy, _v in reps if tri == ev.point.tri),
                default=math.inf,
            )
            assert match < 1e-7


def test_spatial_hash_agrees_with_all_pairs():
    import flatgeo.analysis as analysis

    s = cube_surface()
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.3)), (math.cos(0.3), math.sin(0.3))), 120.0)
    events_auto = analysis.self_intersections(s, tr)
    old = analysis._HASH_THRESHOLD
    try:
        analysis._HASH_THRESHOLD = 0  # force the hash path
        events_hash = analysis.self_intersections(s, tr)
    finally:
        analysis._HASH_THRESHOLD = old
    assert len(events_auto) == len(events_hash)
    for a, b in zip(events_auto, events_hash):
        assert a.t1 == pytest.approx(b.t1, abs=1e-12)
        assert a.t2 == pytest.approx(b.t2, abs=1e-12)


# --- density --------------------------------------------------------------------


def test_density_epsilon_larger_than_surface():
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.5)), (1.0, 0.0)), 1.5)
    rep = density_estimate(s, tr, epsilon=5.0, samples=500, seed=1)
    assert rep.covered_fraction == 1.0


def test_density_slope_zero_strip_oracle():
    # covered set is the strip |y - 0.5| < eps of exact area 2*eps
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.5)), (1.0, 0.0)), 500.0)
    rep = density_estimate(s, tr, epsilon=0.05, samples=2000, seed=42)
    assert rep.covered_fraction == pytest.approx(0.1, abs=0.03)
    assert rep.covered_fraction <= 0.25


def test_density_golden_slope_dense():
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    d = (1.0 / math.hypot(1, GOLDEN), GOLDEN / math.hypot(1, GOLDEN))
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.25)), d), 500.0)
    rep = density_estimate(s, tr, epsilon=0.05, samples=2000, seed=42)
    assert rep.covered_fraction >= 0.99


def test_density_monotone_in_length():
    s = isosceles_tetrahedron((1.0, 1.0, 1.0))
    mid, d = edge_midpoint_tangent(s, 0, 0, 0.61)
    tr = trace(s, TangentDirection(SurfacePoint(0, mid), d), 120.0)
    fracs = [
        density_estimate(s, truncate(tr, L), 0.05, 1500, 9).covered_fraction
        for L in (5.0, 15.0, 40.0, 120.0)
    ]
    assert fracs == sorted(fracs)


# --- closed geodesics -----------------------------------------------------------


def surface_point_matches(surface, a: SurfacePoint, b: SurfacePoint, tol=1e-7):
    reps = tangent_representatives(surface, a, (1.0, 0.0), tol=tol)
    return any(tri == b.tri and math.dist(xy, b.xy) <= tol for tri, xy, _v in reps)


def test_closed_geodesic_periods_on_torus():
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.5)), (1.0, 0.0)), 3.5)
    assert closed_geodesic_detect(s, tr, 1e-6) == pytest.approx(1.0, abs=1e-9)
    d = (2.0 / math.sqrt(5), 1.0 / math.sqrt(5))
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.5)), d), 5.0)
    assert closed_geodesic_detect(s, tr, 1e-6) == pytest.approx(math.sqrt(5), abs=1e-9)


def test_closed_geodesic_none_for_irrational_slope():
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    d = (1.0 / math.hypot(1, GOLDEN), GOLDEN / math.hypot(1, GOLDEN))
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.25)), d), 40.0)
    assert closed_geodesic_detect(s, tr, 1e-6) is None


def test_period_divides_later_recurrences():
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    d = (2.0 / math.sqrt(5), 1.0 / math.sqrt(5))
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.5)), d), 3.2 * math.sqrt(5))
    period = closed_geodesic_detect(s, tr, 1e-6)
    start = tr.start.at
    for k in (1, 2, 3):
        assert surface_point_matches(s, locate(tr, k * period), start)


# --- co-face angle spectrum -----------------------------------------------------


def test_spectrum_tetrahedron_parallel_arcs():
    s = isosceles_tetrahedron((1.0, 1.0, 1.0))
    mid, d = edge_midpoint_tangent(s, 0, 0, math.atan(1.0 / 7.0))
    tr = trace(s, TangentDirection(SurfacePoint(0, mid), d), 100.0)
    rep = coface_angle_spectrum(s, tr, [[0], [1], [2], [3]])
    assert rep.all_matched
    for a in rep.angles:
        assert min(abs(a), abs(a - math.pi)) < 1e-6


def test_spectrum_cube_quarter_turn_sums():
    s = cube_surface()
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.3)), (math.cos(0.3), math.sin(0.3))), 100.0)
    rep = coface_angle_spectrum(s, tr, cube_face_partition())
    assert rep.all_matched
    assert rep.allowed == pytest.approx((0.0, math.pi / 2, math.pi))
    for a in rep.angles:
        assert min(abs(a), abs(a - math.pi / 2), abs(a - math.pi)) < 1e-6


def test_spectrum_vacuous_on_short_trace():
    s = cube_surface()
    tr = trace(s, TangentDirection(SurfacePoint(0, (0.5, 0.3)), (1.0, 0.0)), 0.2)
    rep = coface_angle_spectrum(s, tr, cube_face_partition())
    assert rep.angles == ()
    assert rep.all_matched


def test_spectrum_rejects_non_convex():
    torus = flat_torus((1.0, 0.0), (0.0, 1.0))
    tr = trace(torus, TangentDirection(SurfacePoint(0, (0.5, 0.5)), (1.0, 0.0)), 1.0)
    with pytest.raises(NotConvex):
        coface_angle_spectrum(torus, tr, [[0, 1]])
    l_double = double_of_polygon(L_SHAPE)
    p = incenter_point(l_double)
    tr = trace(l_double, TangentDirection(p, (1.0, 0.0)), 1.0)
    with pytest.raises(NotConvex):
        coface_angle_spectrum(l_double, tr, [[t.id for t in l_double.triangles]])


# --- direction scan -------------------------------------------------------------


def test_scan_deterministic():
    s = isosceles_tetrahedron((1.0, 1.0, 1.0))
    p = incenter_point(s)
    r1 = direction_scan(s, p, 12, 30.0, 0.05, seed=5)
    r2 = direction_scan(s, p, 12, 30.0, 0.05, seed=5)
    assert r1 == r2
    assert r1.to_csv() == r2.to_csv()


def test_scan_cube_majority_self_intersecting():
    s = cube_surface()
    res = direction_scan(s, SurfacePoint(0, (0.4, 0.25)), 250, 100.0, 0.05, seed=2024)
    counts = res.counts()
    assert counts.get("self_intersecting", 0) == 247  # frozen census, seed 2024
    assert counts.get("self_intersecting", 0) > 125


def test_scan_tetrahedron_all_simple():
    s = isosceles_tetrahedron((1.0, 1.0, 1.0))
    p = incenter_point(s)
    res = direction_scan(s, p, 40, 60.0, 0.05, seed=8)
    counts = res.counts()
    assert counts.get("self_intersecting", 0) == 0
    assert counts.get("simple", 0) + counts.get("vertex_hit", 0) == 40


def test_scan_ring_double_mostly_self_intersecting():
    # non-parallel despite half-turn curvatures: generic rays cross themselves
    from flatgeo.builders import ring_double

    s = ring_double()
    res = direction_scan(s, incenter_point(s), 100, 80.0, 0.05, seed=77)
    counts = res.counts()
    assert counts.get("self_intersecting", 0) == 96  # frozen census, seed 77
    assert counts.get("self_intersecting", 0) > 50
