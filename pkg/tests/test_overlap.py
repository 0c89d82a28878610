import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spiralcut.cli import _level_of
from spiralcut.errors import DomainError, FitDegenerate
from spiralcut.generators import ProfileCurve, default_profile, make_solid, revolution
from spiralcut.mesh import orient, random_rotation
from spiralcut.overlap import (annulus_fit, boundary_polygon, brute_force_crossings, check_simple,
                               circle_fit, cone_apex_angle, min_clearance)
from spiralcut.spiral import build_spiral
from spiralcut.unfold import unfold

SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
BOWTIE = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], float)


def rigid(xy, theta, scale, shift):
    c, s = math.cos(theta), math.sin(theta)
    return scale * xy @ np.array([[c, s], [-s, c]]) + shift


# simple polygons ------------------------------------------------------------------

def test_square_is_simple():
    r = check_simple(SQUARE)
    assert r.simple and r.crossings == [] and r.n_segments == 4
    assert r.min_clearance == pytest.approx(1.0)


def test_bowtie_crosses():
    r = check_simple(BOWTIE)
    assert not r.simple
    assert r.pairs() == {(0, 2)} == brute_force_crossings(BOWTIE)
    (_, _, pt, touch), = r.crossings
    assert np.allclose(pt, [0.5, 0.5]) and not touch


def test_touching_vertex_is_a_crossing():
    # the fifth point lands exactly on the first edge
    xy = np.array([[0, 0], [2, 0], [2, 2], [1, 2], [1, 0.0], [0, 1]], float)
    r = check_simple(xy)
    assert not r.simple and all(t for *_, t in r.crossings)
    assert r.pairs() == brute_force_crossings(xy)


def test_fold_back_is_a_crossing():
    xy = np.array([[0, 0], [2, 0], [1, 0], [1, 1]], float)
    assert not check_simple(xy).simple
    assert brute_force_crossings(xy)


def test_boundary_polygon_merges_duplicates():
    xy = np.vstack([SQUARE[:2], SQUARE[1:2], SQUARE[2:], SQUARE[:1]])
    assert np.array_equal(boundary_polygon(xy), SQUARE)


def test_min_clearance_notch():
    xy = np.array([[0, 0], [4, 0], [4, 1], [2.5, 1], [2, 0.1], [1.5, 1], [0, 1]], float)
    assert min_clearance(xy) == pytest.approx(0.1)


polygon = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=4, max_size=14)


@settings(max_examples=300, deadline=None)
@given(polygon)
def test_sweep_matches_brute_force_on_grid_polygons(pts):
    xy = np.array(pts, float)
    B = boundary_polygon(xy)
    if len(B) < 4:
        return
    assert check_simple(xy).pairs() == brute_force_crossings(xy)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(4, 60))
def test_sweep_matches_brute_force_on_random_walks(seed, n):
    rng = np.random.default_rng(seed)
    xy = np.cumsum(rng.standard_normal((n, 2)), axis=0)
    assert check_simple(xy).pairs() == brute_force_crossings(xy)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(5, 40), st.floats(0, 2 * math.pi),
       st.floats(0.01, 100), st.floats(-50, 50))
def test_invariant_under_similarity(seed, n, theta, scale, shift):
    rng = np.random.default_rng(seed)
    ang = (np.arange(n) + 0.9 * rng.uniform(0, 1, n)) * 2 * math.pi / n  # gaps below pi
    rad = rng.uniform(0.5, 1.5, n)
    star = np.c_[rad * np.cos(ang), rad * np.sin(ang)]  # star-shaped about 0
    walk = np.cumsum(rng.standard_normal((n, 2)), axis=0)
    for xy in (star, walk):
        a = check_simple(xy)
        b = check_simple(rigid(xy, theta, scale, shift))
        assert a.simple == b.simple
        assert a.pairs() == b.pairs()
    assert check_simple(star).simple


@pytest.mark.parametrize("name,seed", [("cube", 0), ("dodecahedron", 3), ("snub_cube", 1),
                                       ("truncated_icosahedron", 2)])
def test_sweep_matches_brute_force_on_layouts(name, seed):
    p = orient(make_solid(name), random_rotation(np.random.default_rng(seed)))
    lay = unfold(p, build_spiral(p))
    assert check_simple(lay).pairs() == brute_force_crossings(lay)


# cones ---------------------------------------------------------------------------

def test_cone_apex_angle_samples():
    betas = np.linspace(0, math.pi / 2, 1000)
    a = np.array([cone_apex_angle(b) for b in betas])
    assert np.abs(a / (2 * math.pi) - np.sin(betas)).max() <= 1e-15
    assert (np.diff(a) > 0).all()
    assert a[0] == 0 and a[-1] == pytest.approx(2 * math.pi, abs=1e-15)


@pytest.mark.parametrize("beta", [-1e-9, math.pi / 2 + 1e-9, 3.0, float("nan")])
def test_cone_apex_angle_domain(beta):
    with pytest.raises(DomainError):
        cone_apex_angle(beta)


@pytest.mark.parametrize("beta", [0.2, 0.7, 1.3])
def test_cone_apex_angle_matches_fine_pyramid(beta):
    # oracle: apex angle of a regular pyramid with unit lateral edges
    n = 2000
    p = revolution(ProfileCurve(((math.sin(beta), 0.0), (0.0, math.cos(beta)))), n)
    apex = int(np.argmax(p.vertices[:, 2]))
    total = 2 * math.pi - p.curvatures()[apex]
    assert total == pytest.approx(2 * n * math.asin(math.sin(beta) * math.sin(math.pi / n)), abs=1e-9)
    assert total == pytest.approx(cone_apex_angle(beta), rel=1e-5)


# circles and annuli -----------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.1, 100), st.integers(3, 40),
       st.floats(0.05, 2 * math.pi))
def test_circle_fit_exact_points(cx, cy, r, n, span):
    t = np.linspace(0, span, n)
    xy = np.c_[cx + r * np.cos(t), cy + r * np.sin(t)]
    c, rr, res = circle_fit(xy)
    assert np.allclose(c, [cx, cy], atol=1e-6 * r)
    assert rr == pytest.approx(r, rel=1e-6)
    assert res <= 1e-6 * r


def test_circle_fit_needs_three_points():
    with pytest.raises(FitDegenerate):
        circle_fit([[0, 0], [1, 1]])


def slant_radii(profile, b):
    """Distances from the cone apex to the two rings of band b (true cone)."""
    (r0, z0), (r1, z1) = profile.points[b], profile.points[b + 1]
    sin_beta = (r0 - r1) / math.hypot(r0 - r1, z1 - z0)
    return r0 / sin_beta, r1 / sin_beta


@pytest.mark.parametrize("n_spin", [6, 12, 24])
def test_annulus_radii_match_slant_distances(n_spin):
    C = default_profile()
    p = revolution(C, n_spin)
    s = build_spiral(p)
    lay = unfold(p, s)
    fit = annulus_fit(lay, _level_of(lay, s))
    assert fit.nested and fit.max_collinearity <= 1e-6
    assert [b.band for b in fit.bands] == list(range(len(C.points) - 2))
    for band in fit.bands:
        outer, inner = slant_radii(C, band.band)
        assert band.outer_radius == pytest.approx(outer, rel=1e-9)
        assert band.inner_radius == pytest.approx(inner, rel=1e-9)
        assert band.fit_residual <= 1e-9 * outer
        assert band.concentricity <= 1e-6


def test_annulus_needs_a_band():
    p = make_solid("octahedron")
    s = build_spiral(p)
    lay = unfold(p, s)
    with pytest.raises(FitDegenerate):
        annulus_fit(lay, _level_of(lay, s))
