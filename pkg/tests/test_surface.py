import math

import pytest

from flatgeo.builders import (
    L_SHAPE,
    SQUARE,
    cube_surface,
    double_of_polygon,
    flat_torus,
    isosceles_tetrahedron,
    klein_bottle,
)
from flatgeo.errors import (
    DegenerateTriangle,
    Disconnected,
    LengthMismatch,
    UnmatchedEdge,
)
from flatgeo.jsonio import surface_from_json, surface_to_json
from flatgeo.surface import (
    EdgeRef,
    Gluing,
    Triangle,
    build_surface,
    curvature,
    gauss_bonnet_check,
    orientability,
)

TORUS_TRIS = [
    Triangle(0, ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0))),
    Triangle(1, ((0.0, 0.0), (1.0, 1.0), (0.0, 1.0))),
]
TORUS_GL = [
    Gluing(EdgeRef(0, 0), EdgeRef(1, 1)),
    Gluing(EdgeRef(0, 1), EdgeRef(1, 2)),
    Gluing(EdgeRef(0, 2), EdgeRef(1, 0)),
]


def test_flat_torus_by_hand():
    s = build_surface(TORUS_TRIS, TORUS_GL)
    assert s.euler_characteristic == 0
    assert s.orientable
    assert len(s.vertex_classes) == 1
    v = s.vertex_classes[0]
    assert v.cone_angle == pytest.approx(2 * math.pi)
    assert curvature(s, v) == pytest.approx(0.0)
    assert not v.is_cone()


def test_regular_tetrahedron_curvatures():
    s = isosceles_tetrahedron((1.0, 1.0, 1.0))
    assert len(s.vertex_classes) == 4
    for v in s.vertex_classes:
        assert v.cone_angle == pytest.approx(math.pi, abs=1e-12)
        assert curvature(s, v) == pytest.approx(math.pi, abs=1e-12)
    assert s.euler_characteristic == 2


def test_cube_vertex_curvature():
    s = cube_surface()
    # three quarter-turn corners per vertex: 2*pi - 3*pi/2
    for v in s.vertex_classes:
        assert v.curvature == pytest.approx(math.pi / 2, abs=1e-12)


def test_length_mismatch_raises():
    tris = [
        Triangle(0, ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0))),
        Triangle(1, ((0.0, 0.0), (0.9, 0.0), (0.0, 0.9))),
    ]
    gl = [
        Gluing(EdgeRef(0, 0), EdgeRef(1, 0)),
        Gluing(EdgeRef(0, 1), EdgeRef(1, 1)),
        Gluing(EdgeRef(0, 2), EdgeRef(1, 2)),
    ]
    with pytest.raises(LengthMismatch):
        build_surface(tris, gl)


def test_unmatched_edge_raises():
    with pytest.raises(UnmatchedEdge):
        build_surface(TORUS_TRIS, TORUS_GL[:2])
    dup = TORUS_GL + [Gluing(EdgeRef(0, 0), EdgeRef(1, 1))]
    with pytest.raises(UnmatchedEdge):
        build_surface(TORUS_TRIS, dup)


def test_degenerate_triangle_raises():
    tris = [Triangle(0, ((0.0, 0.0), (1.0, 0.0), (2.0, 0.0)))] + TORUS_TRIS[1:]
    with pytest.raises(DegenerateTriangle):
        build_surface(tris, TORUS_GL)
    clockwise = [Triangle(0, ((0.0, 0.0), (1.0, 1.0), (1.0, 0.0)))] + TORUS_TRIS[1:]
    with pytest.raises(DegenerateTriangle):
        build_surface(clockwise, TORUS_GL)


def test_disconnected_raises():
    tris = TORUS_TRIS + [
        Triangle(2, ((5.0, 0.0), (6.0, 0.0), (6.0, 1.0))),
        Triangle(3, ((5.0, 0.0), (6.0, 1.0), (5.0, 1.0))),
    ]
    gl = TORUS_GL + [
        Gluing(EdgeRef(2, 0), EdgeRef(3, 1)),
        Gluing(EdgeRef(2, 1), EdgeRef(3, 2)),
        Gluing(EdgeRef(2, 2), EdgeRef(3, 0)),
    ]
    with pytest.raises(Disconnected):
        build_surface(tris, gl)


def test_orientability_witness_on_klein_bottle():
    s = klein_bottle()
    ok, witness = orientability(s)
    assert not ok
    assert witness
    # the witness walk must compose to an orientation-reversing map
    reflections = sum(1 for gi in witness if s.transitions[gi].reflect)
    assert reflections % 2 == 1


def test_doubles_are_spheres_and_orientable():
    for spec in (SQUARE, L_SHAPE):
        s = double_of_polygon(spec)
        assert s.euler_characteristic == 2
        assert orientability(s)[0]


def test_gauss_bonnet_examples(catalog_surfaces):
    tet = catalog_surfaces["regular-tetrahedron"]
    assert gauss_bonnet_check(tet) < 1e-12
    torus = catalog_surfaces["unit-torus"]
    assert gauss_bonnet_check(torus) < 1e-12
    l_double = catalog_surfaces["l-double"]
    # five corners of curvature pi, one of -pi, against 2*pi*chi = 4*pi
    assert sum(v.curvature for v in l_double.vertex_classes) == pytest.approx(4 * math.pi)
    assert gauss_bonnet_check(l_double) < 1e-12


def test_corner_cycles_partition_and_angle_sum(catalog_surfaces):
    for s in catalog_surfaces.values():
        n_corners = sum(len(v.corners) for v in s.vertex_classes)
        assert n_corners == 3 * len(s.triangles)
        total_cone = sum(v.cone_angle for v in s.vertex_classes)
        total_angles = sum(t.angle_at(k) for t in s.triangles for k in range(3))
        assert total_cone == pytest.approx(total_angles, abs=1e-9)


def test_every_edge_glued_once(catalog_surfaces):
    for s in catalog_surfaces.values():
        keys = set(s.edge_gluing)
        assert len(keys) == 3 * len(s.triangles)
        assert len(s.gluings) * 2 == len(keys)


def test_transition_endpoint_audit(catalog_surfaces):
    for s in catalog_surfaces.values():
        for gi, g in enumerate(s.gluings):
            ta, tb = s.triangle(g.a.tri), s.triangle(g.b.tri)
            a0, a1 = ta.edge_start(g.a.edge), ta.edge_end(g.a.edge)
            if g.reversed:
                want = (tb.edge_start(g.b.edge), tb.edge_end(g.b.edge))
            else:
                want = (tb.edge_end(g.b.edge), tb.edge_start(g.b.edge))
            for src, dst in zip((a0, a1), want):
                assert math.dist(s.transitions[gi].apply(src), dst) < 1e-9


def test_build_is_deterministic():
    a = build_surface(TORUS_TRIS, TORUS_GL)
    b = build_surface(TORUS_TRIS, TORUS_GL)
    assert surface_to_json(a) == surface_to_json(b)
    assert [v.corners for v in a.vertex_classes] == [v.corners for v in b.vertex_classes]


def test_json_round_trip_bit_exact(catalog_surfaces):
    for s in catalog_surfaces.values():
        text = surface_to_json(s)
        back = surface_from_json(text)
        assert surface_to_json(back) == text
        assert back.euler_characteristic == s.euler_characteristic
        assert back.orientable == s.orientable


def test_curvature_requires_membership():
    a = build_surface(TORUS_TRIS, TORUS_GL)
    b = isosceles_tetrahedron((1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        curvature(a, b.vertex_classes[0])


def test_marked_points_excluded_from_cone_set():
    s = flat_torus((1.0, 0.0), (0.0, 1.0))
    assert len(s.vertex_classes) == 1
    assert s.cone_points() == []
