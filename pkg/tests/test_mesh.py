import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spiralcut.errors import (DegenerateInput, EmptySlice, HorizontalDegenerate, NotARotation,
                              VertexInside)
from spiralcut.generators import hemiball, make_solid, random_sphere_hull
from spiralcut.mesh import (Polyhedron, axis_angle_rotation, band_between, convex_hull,
                            gaussian_curvature, orient, random_rotation, rotation_to_vertical,
                            slice_at, surface_angle_split, vertex_levels, vertex_point)

CUBE01 = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float)


def upright(p, direction):
    return orient(p, rotation_to_vertical(direction))


def mirrored(p):
    """Reflection x -> -x with triangles reversed to stay outward."""
    V = p.vertices * np.array([-1.0, 1.0, 1.0])
    return Polyhedron(V, p.triangles[:, ::-1].copy(), p.face_ids.copy(), p.convex, p.name + "_m")


# convex hull -----------------------------------------------------------------

def test_hull_tetrahedron():
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float)
    p = convex_hull(pts)
    assert p.n_vertices == 4 and len(p.triangles) == 4
    assert p.euler_characteristic() == 2
    p.validate()


def test_hull_absorbs_interior_point():
    p = convex_hull(np.vstack([CUBE01, [[0.5, 0.4, 0.6]]]))
    assert p.n_vertices == 8
    assert len(p.face_tris) == 6


def test_hull_random_sphere_points_all_on_hull():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((100, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    p = convex_hull(x)
    assert p.n_vertices == 100
    assert np.allclose(np.linalg.norm(p.vertices, axis=1), 1.0, atol=1e-12)
    # oracle: every input point against every face plane
    tv = p.vertices[p.triangles]
    n = np.cross(tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    off = np.einsum("ij,ij->i", n, tv[:, 0])
    assert (x @ n.T - off).max() <= 1e-9 * p.diameter


def test_hull_coplanar_rejected():
    with pytest.raises(DegenerateInput):
        convex_hull(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], float))


# orientation -------------------------------------------------------------------

def test_orient_identity():
    p = make_solid("cube")
    assert np.array_equal(orient(p, np.eye(3)).vertices, p.vertices)


def test_orient_x_vertical_on_hemiball():
    h = hemiball(16)
    q = orient(h, rotation_to_vertical([1.0, 0.0, 0.0]))
    i = int(np.argmin(np.linalg.norm(h.vertices - [1, 0, 0], axis=1)))
    assert np.allclose(q.vertices[i], [0, 0, 1], atol=1e-12)
    assert np.array_equal(q.triangles, h.triangles)


def test_orient_half_turn_twice():
    p = make_solid("dodecahedron")
    R = axis_angle_rotation([0, 0, 1], math.pi)
    assert np.allclose(orient(orient(p, R), R).vertices, p.vertices, atol=1e-12)


def test_orient_rejects_reflection():
    with pytest.raises(NotARotation):
        orient(make_solid("cube"), np.diag([1.0, 1.0, -1.0]))


# slices and bands --------------------------------------------------------------

def test_slice_cube_midheight():
    p = convex_hull(CUBE01)
    s = slice_at(p, 0.5)
    rigid = [c for c in s.corners if not (c.kind == "edge" and p.flat_edges[c.index])]
    assert len(rigid) == 4
    assert all(c.kind == "edge" for c in rigid)
    xy = np.array(sorted(map(tuple, np.round([c.position[:2] for c in rigid], 12))))
    assert np.allclose(xy, [[0, 0], [0, 1], [1, 0], [1, 1]])


def test_slice_octahedron_equator():
    s = slice_at(make_solid("octahedron"), 0.0)
    assert len(s) == 4 and all(c.is_vertex for c in s.corners)
    xy = s.xy()
    d = np.roll(xy, -1, 0) - xy
    e = np.roll(d, -1, 0)
    cross = d[:, 0] * e[:, 1] - d[:, 1] * e[:, 0]
    assert (cross > 0).all()  # ccw about +z


def test_slice_hemiball_rim():
    m = 16
    s = slice_at(hemiball(2 * m), 0.5)
    rim = [c.position for c in s.corners if abs(c.position[1]) < 1e-12 and c.position[0] > 0]
    assert len(rim) == 1
    # oracle: the semicircle chord b(th_k) b(th_k+1) straddling z = 0.5
    th = math.pi * np.arange(m) / (m - 1)
    k = int(np.searchsorted(np.sin(th[: m // 2]), 0.5)) - 1
    z0, z1 = math.sin(th[k]), math.sin(th[k + 1])
    t = (0.5 - z0) / (z1 - z0)
    x = (1 - t) * math.cos(th[k]) + t * math.cos(th[k + 1])
    assert rim[0][0] == pytest.approx(x, abs=1e-12)
    # and the chord stays within one sagitta of the exact curve point
    sagitta = 1 - math.cos(math.pi / (m - 1) / 2)
    assert 1 - math.hypot(rim[0][0], 0.5) <= sagitta
    assert rim[0][0] < math.cos(math.asin(0.5))


def test_slice_outside_span():
    with pytest.raises(EmptySlice):
        slice_at(make_solid("cube"), 10.0)


def test_band_cube_and_octahedron():
    p = convex_hull(CUBE01)
    b = band_between(p, 0.0, 1.0)
    assert len(b.rigid(p)[0]) == 4
    o = make_solid("octahedron")
    E, _ = band_between(o, 0.0, 1.0).rigid(o)
    top = int(np.argmax(o.vertices[:, 2]))
    assert len(E) == 4 and all(top in o.edges[e] for e in E)


def test_band_icosahedron_antiprism():
    p = upright(make_solid("icosahedron"), make_solid("icosahedron").vertices[0])
    levels = vertex_levels(p)
    assert [len(g) for g in levels] == [1, 5, 5, 1]
    z = p.vertices[:, 2]
    zlo, zhi = z[levels[1]].max(), z[levels[2]].min()
    b = band_between(p, zlo, zhi)
    oracle = sum(1 for a, c in p.edges.tolist()
                 if min(z[a], z[c]) <= zlo + 1e-9 and max(z[a], z[c]) >= zhi - 1e-9)
    assert len(b.edges) == oracle == 10


def test_band_vertex_inside():
    with pytest.raises(VertexInside):
        band_between(make_solid("octahedron"), -1.0, 1.0)


# vertex levels ------------------------------------------------------------------

def test_levels_tilted_cube_singletons():
    p = orient(make_solid("cube"), axis_angle_rotation([1, 1, 0.3], 0.5))
    assert [len(g) for g in vertex_levels(p)] == [1] * 8


def test_levels_upright_cube_and_dodecahedron():
    assert [len(g) for g in vertex_levels(make_solid("cube"))] == [4, 4]
    d = make_solid("dodecahedron")
    n = d.normals[d.face_tris[0][0]]
    assert [len(g) for g in vertex_levels(upright(d, -n))] == [5, 5, 5, 5]


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 2 * math.pi), st.integers(0, 10_000))
def test_levels_invariant_under_z_rotation(theta, seed):
    p = orient(make_solid("icosidodecahedron"), random_rotation(np.random.default_rng(seed)))
    q = orient(p, axis_angle_rotation([0, 0, 1], theta))
    a = [sorted(g) for g in vertex_levels(p)]
    b = [sorted(g) for g in vertex_levels(q)]
    assert a == b


# surface angles -------------------------------------------------------------------

def test_split_face_interior_thirty_degrees():
    p = convex_hull(CUBE01)
    t = next(t for t in range(len(p.triangles)) if np.allclose(p.normals[t], [1, 0, 0]))
    a, b, c = p.triangles[t]
    e = p.edge_id(a, b)
    # a point inside the face x = 1 via an interior edge point (flat diagonal)
    sp = p.point("edge", e, 0.5) if p.flat_edges[e] else None
    if sp is None:
        e = next(p.edge_id(u, v) for u, v in ((b, c), (c, a)) if p.flat_edges[p.edge_id(u, v)])
        sp = p.point("edge", e, 0.5)
    d = np.array([0.0, math.cos(math.pi / 6), math.sin(math.pi / 6)]) * 0.1
    r = surface_angle_split(p, sp, sp.position + d)
    assert r.rho_h + r.lambda_h == pytest.approx(math.pi, abs=1e-12)
    assert r.rho_h == pytest.approx(math.pi / 6, abs=1e-12)  # +y is to the right seen from +x


def test_split_cube_vertex_vertical_edge():
    p = convex_hull(CUBE01)
    v = int(np.flatnonzero((p.vertices == [0, 0, 0]).all(axis=1))[0])
    r = surface_angle_split(p, vertex_point(p, v), [0, 0, 1])
    # oracle: the faces above the plane through the bottom corner are two quarter turns
    assert r.rho_h + r.lambda_h == pytest.approx(math.pi, abs=1e-12)
    assert r.rho_h == pytest.approx(math.pi / 2, abs=1e-12)


def test_split_symmetric_equator_vertex():
    o = make_solid("octahedron")
    v = int(np.argmax(o.vertices[:, 0]))
    r = surface_angle_split(o, vertex_point(o, v), [0, 0, 1])
    assert r.rho_h == pytest.approx(r.lambda_h, abs=1e-12)


def test_split_apex_has_no_horizontal():
    o = make_solid("octahedron")
    top = int(np.argmax(o.vertices[:, 2]))
    with pytest.raises(HorizontalDegenerate):
        surface_angle_split(o, vertex_point(o, top), [1, 0, 0], side="above")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(8, 30))
def test_split_mirror_swaps_sides(seed, n):
    p = random_sphere_hull(n, seed)
    m = mirrored(p)
    z = p.vertices[:, 2]
    v = int(np.argsort(z)[len(z) // 2])
    ups = [w for w in p.neighbors[v] if z[w] > z[v]]
    w = ups[0]
    a = surface_angle_split(p, vertex_point(p, v), p.vertices[w])
    b = surface_angle_split(m, vertex_point(m, v), m.vertices[w])
    assert a.rho_h == pytest.approx(b.lambda_h, abs=1e-12)
    assert a.lambda_h == pytest.approx(b.rho_h, abs=1e-12)


# curvature -------------------------------------------------------------------------

def test_curvature_values():
    assert gaussian_curvature(make_solid("cube"), 0) == pytest.approx(math.pi / 2, abs=1e-12)
    assert gaussian_curvature(make_solid("tetrahedron"), 0) == pytest.approx(math.pi, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(4, 60))
def test_gauss_bonnet_and_euler_random(seed, n):
    p = random_sphere_hull(n, seed)
    assert p.euler_characteristic() == 2
    assert p.signed_volume() > 0
    assert p.curvatures().sum() == pytest.approx(4 * math.pi, abs=1e-9)
    assert p.is_convex()
