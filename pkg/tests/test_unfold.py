import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spiralcut.generators import hemiball, make_solid, random_sphere_hull
from spiralcut.mesh import axis_angle_rotation, gaussian_curvature, orient, random_rotation
from spiralcut.overlap import check_simple
from spiralcut.spiral import build_spiral
from spiralcut.unfold import (angle_closure_error, boundary_paths, cut_surface, develop,
                              endpoint_exterior_angle, glue_check, isometry_error,
                              side_length_error, unfold)

TOL = 1e-9


def tilted(name, seed, w=0):
    p = orient(make_solid(name), random_rotation(np.random.default_rng(seed)))
    return p, build_spiral(p, w)


def shoelace(xy):
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def tri_areas_3d(p):
    v = p.vertices[p.triangles]
    return 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)


CASES = [("cube", 0, 0), ("octahedron", 2, 0), ("dodecahedron", 1, 0), ("icosahedron", 3, 1),
         ("truncated_octahedron", 4, 0), ("snub_cube", 5, 0), ("cuboctahedron", 6, 2)]


@pytest.mark.parametrize("name,seed,w", CASES)
def test_cut_disk_topology_and_area(name, seed, w):
    p, s = tilted(name, seed, w)
    d = cut_surface(p, s)
    assert d.euler_characteristic() == 1
    # oracle: 3D triangle areas of the uncut mesh
    assert d.area() == pytest.approx(tri_areas_3d(p).sum(), rel=1e-12)
    assert d.boundary_length() == pytest.approx(2 * s.length(), rel=1e-12)
    assert [d.path_corner[i] for i in range(len(d.path)) if d.path_corner[i] >= 0] == list(range(len(s)))


@pytest.mark.parametrize("name,seed,w", CASES)
def test_layout_is_isometric(name, seed, w):
    p, s = tilted(name, seed, w)
    lay = unfold(p, s)
    assert isometry_error(lay) <= TOL
    assert side_length_error(lay) <= TOL
    assert angle_closure_error(lay) <= TOL
    assert glue_check(lay)
    # planar triangles keep their orientation, and their areas match 3D
    t = lay.tri_xy
    a = 0.5 * ((t[:, 1, 0] - t[:, 0, 0]) * (t[:, 2, 1] - t[:, 0, 1])
               - (t[:, 1, 1] - t[:, 0, 1]) * (t[:, 2, 0] - t[:, 0, 0]))
    assert (a > 0).all()
    assert a.sum() == pytest.approx(p.surface_area(), rel=1e-9)
    assert np.allclose(lay.rho[0], lay.lam[0]) and np.allclose(lay.rho[-1], lay.lam[-1])


@pytest.mark.parametrize("name,seed,w", CASES)
def test_endpoint_angles_are_curvatures(name, seed, w):
    # the exterior angle at an end of the cut is 2 pi minus the full surface
    # angle there, which is the vertex curvature
    p, s = tilted(name, seed, w)
    lay = unfold(p, s)
    v0, v1 = s.corners[0].index, s.corners[-1].index
    assert endpoint_exterior_angle(lay, "bottom") == pytest.approx(gaussian_curvature(p, v0), abs=TOL)
    assert endpoint_exterior_angle(lay, "top") == pytest.approx(gaussian_curvature(p, v1), abs=TOL)
    with pytest.raises(ValueError):
        endpoint_exterior_angle(lay, "middle")


def test_simple_layout_area_matches_boundary():
    p = orient(make_solid("cube"), axis_angle_rotation([1, 1, 0.3], 0.5))
    lay = unfold(p, build_spiral(p))
    assert check_simple(lay).simple
    # rho forward then lambda back keeps the surface on the right: clockwise
    assert -shoelace(lay.boundary()) == pytest.approx(p.surface_area(), rel=1e-9)


def test_boundary_paths_metadata():
    p, s = tilted("cube", 0)
    lay = unfold(p, s)
    rho, lam = boundary_paths(lay)
    assert len(rho) == len(lam) == len(lay.disk.path)
    assert sum(iv for _, iv, _ in rho) == p.n_vertices
    assert rho[0][2] == 0 and rho[-1][2] == len(s) - 1


def test_glue_check_detects_swapped_sides():
    p, s = tilted("icosahedron", 2)
    d = cut_surface(p, s)
    d.left, d.right = d.right, d.left
    assert not glue_check(develop(d))


def test_hemiball_layout():
    h = orient(hemiball(16), axis_angle_rotation([0.3, 1, 0.2], 1.1))
    lay = unfold(h, build_spiral(h))
    assert isometry_error(lay) <= TOL and angle_closure_error(lay) <= TOL


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(5, 40))
def test_random_hull_unfold_invariants(seed, n):
    p = random_sphere_hull(n, seed)
    s = build_spiral(p)
    lay = unfold(p, s)
    assert lay.disk.euler_characteristic() == 1
    assert isometry_error(lay) <= TOL
    assert side_length_error(lay) <= TOL
    assert angle_closure_error(lay) <= TOL
    assert glue_check(lay)
    total = endpoint_exterior_angle(lay, "bottom") + endpoint_exterior_angle(lay, "top")
    v0, v1 = s.corners[0].index, s.corners[-1].index
    assert total == pytest.approx(gaussian_curvature(p, v0) + gaussian_curvature(p, v1), abs=TOL)
    assert 0 < lay.diameter() <= lay.disk.edge_lengths().sum()  # connected union of triangles


def test_layout_seed_placement():
    p, s = tilted("octahedron", 2)
    lay = unfold(p, s)
    assert np.allclose(lay.rho[0], 0, atol=1e-15)
    d = lay.rho[1] - lay.rho[0]
    assert d[0] > 0 and abs(d[1]) <= 1e-15
    assert d[0] == pytest.approx(np.linalg.norm(s.corners[1].position - s.corners[0].position))


def test_float_layout_rounds_the_precise_one():
    p, s = tilted("snub_cube", 5)
    lay = unfold(p, s)
    tri, rho, lam = lay.precise
    bound = lay.diameter() * 2.0 ** -52
    for lo, hi in ((lay.tri_xy, tri), (lay.rho, rho), (lay.lam, lam)):
        assert lo.dtype == np.float64
        assert float(np.abs(lo - hi).max()) <= bound
