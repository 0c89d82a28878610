"""Simplicity of developed boundaries, and the cone/annulus structure of
unfolded polyhedra of revolution."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, FitDegenerate
from .predicates import intersection_point, orient2d, orient2d_many, segment_distance_many

TOUCH_REL = 1e-12


@dataclass
class OverlapReport:
    simple: bool
    crossings: list  # (i, j, point, touch), i < j, lexicographic
    min_clearance: float
    n_segments: int

    def to_json(self) -> dict:
        return {
            "simple": self.simple,
            "n_segments": self.n_segments,
            "min_clearance": self.min_clearance,
            "crossings": [{"segments": [i, j], "point": [float(pt[0]), float(pt[1])], "touch": t}
                          for i, j, pt, t in self.crossings],
        }

    def pairs(self) -> set:
        return {(i, j) for i, j, _, _ in self.crossings}


def boundary_polygon(layout_or_xy, tol: Optional[float] = None) -> np.ndarray:
    """Closed boundary (first point not repeated) with near-duplicate
    consecutive points merged."""
    xy = layout_or_xy.boundary() if hasattr(layout_or_xy, "boundary") else np.asarray(layout_or_xy, float)
    if tol is None:
        tol = TOUCH_REL * _diameter(xy)
    keep = [xy[0]]
    for q in xy[1:]:
        if np.linalg.norm(q - keep[-1]) > tol:
            keep.append(q)
    while len(keep) > 1 and np.linalg.norm(keep[-1] - keep[0]) <= tol:
        keep.pop()
    return np.array(keep)


def _diameter(xy) -> float:
    return float(np.linalg.norm(xy.max(axis=0) - xy.min(axis=0))) if len(xy) else 0.0


def _segments(B):
    return B, np.roll(B, -1, axis=0)


def _candidate_pairs(A, C, gap: float):
    """Index pairs (i < j) of segments whose bounding boxes are within ``gap``."""
    n = len(A)
    lo = np.minimum(A, C)
    hi = np.maximum(A, C)
    order = np.argsort(lo[:, 0], kind="stable")
    xs = lo[order, 0]
    out_i, out_j = [], []
    for k in range(n):
        i = order[k]
        stop = np.searchsorted(xs, hi[i, 0] + gap, side="right")
        js = order[k + 1:stop]
        if not len(js):
            continue
        ok = (lo[js, 1] <= hi[i, 1] + gap) & (hi[js, 1] >= lo[i, 1] - gap)
        js = js[ok]
        out_i.append(np.full(len(js), i))
        out_j.append(js)
    if not out_i:
        return np.empty(0, int), np.empty(0, int)
    I = np.concatenate(out_i)
    J = np.concatenate(out_j)
    I, J = np.minimum(I, J), np.maximum(I, J)
    return I, J


def _nonadjacent(I, J, n):
    d = J - I
    return (d != 1) & (d != n - 1)


def _on_box(a, b, c):
    return ((np.minimum(a[:, 0], b[:, 0]) <= c[:, 0]) & (c[:, 0] <= np.maximum(a[:, 0], b[:, 0]))
            & (np.minimum(a[:, 1], b[:, 1]) <= c[:, 1]) & (c[:, 1] <= np.maximum(a[:, 1], b[:, 1])))


def _fold_backs(B) -> list:
    """Vertices where the boundary doubles back on itself."""
    n = len(B)
    out = []
    for i in range(n):
        a, v, c = B[i - 1], B[i], B[(i + 1) % n]
        if orient2d(a, v, c) == 0 and float(np.dot(a - v, c - v)) > 0:
            out.append(((i - 1) % n, i))
    return out


def check_simple(layout_or_xy) -> OverlapReport:
    """Exact-sign test of the closed boundary for self-intersection.

    Nonadjacent segments closer than ``1e-12 * diameter`` count as crossing
    (flagged ``touch``); adjacent segments may only share their endpoint.
    """
    B = boundary_polygon(layout_or_xy)
    n = len(B)
    tol = TOUCH_REL * _diameter(B)
    A, C = _segments(B)
    I, J = _candidate_pairs(A, C, tol)
    keep = _nonadjacent(I, J, n)
    I, J = I[keep], J[keep]
    a, b, c, d = A[I], C[I], A[J], C[J]
    o1 = orient2d_many(a, b, c)
    o2 = orient2d_many(a, b, d)
    o3 = orient2d_many(c, d, a)
    o4 = orient2d_many(c, d, b)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    touch = (((o1 == 0) & _on_box(a, b, c)) | ((o2 == 0) & _on_box(a, b, d))
             | ((o3 == 0) & _on_box(c, d, a)) | ((o4 == 0) & _on_box(c, d, b)))
    rest = ~(proper | touch)
    near = np.zeros(len(I), dtype=bool)
    if rest.any():
        near[rest] = segment_distance_many(a[rest], b[rest], c[rest], d[rest]) < tol
    hits = []
    for k in np.flatnonzero(proper | touch | near):
        pt = intersection_point(a[k], b[k], c[k], d[k])
        hits.append((int(I[k]), int(J[k]), pt, not bool(proper[k])))
    for i, j in _fold_backs(B):
        i, j = min(i, j), max(i, j)
        hits.append((i, j, B[j if j - i == 1 else i].copy(), True))
    hits.sort(key=lambda h: (h[0], h[1]))
    simple = not hits
    return OverlapReport(simple, hits, min_clearance(B) if simple else 0.0, n)


def min_clearance(B) -> float:
    """Smallest distance between nonadjacent boundary segments."""
    B = np.asarray(B, float)
    n = len(B)
    if n < 4:
        return math.inf
    A, C = _segments(B)
    k = min(n, 8)
    dist, idx = cKDTree(B).query(B, k=k)
    ub = _diameter(B)
    for col in range(1, k):
        j = idx[:, col]
        dd = np.abs(j - np.arange(n))
        cyc = np.minimum(dd, n - dd)
        ok = cyc >= 3
        if ok.any():
            ub = min(ub, float(dist[ok, col].min()))
    I, J = _candidate_pairs(A, C, ub)
    keep = _nonadjacent(I, J, n)
    I, J = I[keep], J[keep]
    if not len(I):
        return ub
    return float(segment_distance_many(A[I], C[I], A[J], C[J]).min())


# ---------------------------------------------------------------------------
# reference implementation: every pair, rational arithmetic where floats are unsure

def _orient_rational(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (a[0], a[1], b[0], b[1], c[0], c[1]))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def _orient_block(a, b, c):
    t1 = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
    t2 = (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
    det = t1 - t2
    unsure = np.abs(det) <= 1e-14 * (np.abs(t1) + np.abs(t2))
    sign = np.sign(det).astype(np.int8)
    for idx in zip(*np.nonzero(unsure)):
        sign[idx] = _orient_rational(a[idx], b[idx], c[idx])
    return sign


def brute_force_crossings(layout_or_xy) -> set:
    """All crossing pairs of nonadjacent boundary segments, without pruning."""
    B = boundary_polygon(layout_or_xy)
    n = len(B)
    tol = TOUCH_REL * _diameter(B)
    A, C = _segments(B)
    out = set()
    for i in range(n):
        J = np.arange(i + 2, n)
        if i == 0:
            J = J[J != n - 1]
        if not len(J):
            continue
        a = np.broadcast_to(A[i], (len(J), 2))
        b = np.broadcast_to(C[i], (len(J), 2))
        c, d = A[J], C[J]
        o1, o2 = _orient_block(a, b, c), _orient_block(a, b, d)
        o3, o4 = _orient_block(c, d, a), _orient_block(c, d, b)
        hit = (o1 * o2 < 0) & (o3 * o4 < 0)
        hit |= (o1 == 0) & _on_box(a, b, c)
        hit |= (o2 == 0) & _on_box(a, b, d)
        hit |= (o3 == 0) & _on_box(c, d, a)
        hit |= (o4 == 0) & _on_box(c, d, b)
        rest = ~hit
        if rest.any():
            hit[rest] = segment_distance_many(a[rest], b[rest], c[rest], d[rest]) < tol
        out.update((i, int(j)) for j in J[hit])
    for i in range(n):
        p, v, q = B[i - 1], B[i], B[(i + 1) % n]
        if _orient_rational(p, v, q) == 0 and float(np.dot(p - v, q - v)) > 0:
            out.add((min((i - 1) % n, i), max((i - 1) % n, i)))
    return out


# ---------------------------------------------------------------------------
# cones and annuli

def cone_apex_angle(beta: float) -> float:
    """Angle of the unrolled sector of a cone whose generator makes angle
    ``beta`` with the axis."""
    if not 0.0 <= beta <= math.pi / 2:
        raise DomainError(f"beta={beta} outside [0, pi/2]")
    return 2.0 * math.pi * math.sin(beta)


def circle_fit(xy) -> tuple:
    """Least-squares (algebraic) circle: ``(center, radius, max residual)``."""
    xy = np.asarray(xy, float)
    if len(xy) < 3:
        raise FitDegenerate("need at least three points")
    M = np.column_stack([xy, np.ones(len(xy))])
    rhs = -(xy ** 2).sum(axis=1)
    (D, E, F), *_ = np.linalg.lstsq(M, rhs, rcond=None)
    c = np.array([-D / 2, -E / 2])
    r2 = float(c @ c - F)
    if r2 <= 0:
        raise FitDegenerate("points do not determine a circle")
    r = math.sqrt(r2)
    res = float(np.abs(np.linalg.norm(xy - c, axis=1) - r).max())
    return c, r, res


@dataclass
class BandAnnulus:
    band: int
    outer_center: np.ndarray
    outer_radius: float
    inner_center: np.ndarray
    inner_radius: float
    fit_residual: float

    @property
    def concentricity(self) -> float:
        return float(np.linalg.norm(self.outer_center - self.inner_center)) / self.outer_radius


@dataclass
class AnnulusFit:
    bands: list
    seams: list = field(default_factory=list)  # per adjacent pair: dict

    @property
    def nested(self) -> bool:
        return all(s["r1"] > s["r2"] for s in self.seams)

    @property
    def max_collinearity(self) -> float:
        return max((s["collinearity"] for s in self.seams), default=0.0)

    def to_json(self) -> dict:
        return {
            "bands": [{"band": b.band, "outer_center": b.outer_center.tolist(),
                       "outer_radius": b.outer_radius, "inner_center": b.inner_center.tolist(),
                       "inner_radius": b.inner_radius, "fit_residual": b.fit_residual,
                       "concentricity": b.concentricity} for b in self.bands],
            "seams": [{k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in s.items()}
                      for s in self.seams],
            "nested": self.nested,
        }


def _uncut_ring_edge(layout, level_of, L):
    """Planar midpoint of the one ring edge at level ``L`` the path does not follow."""
    d = layout.disk
    ring = [n for n, lv in zip(d.path, level_of) if lv == L and d.hosts[n][0] == "vertex"]
    cut = d.cut_edges()
    ring_set = set(ring)
    for ti, tri in enumerate(d.triangles.tolist()):
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            if a in ring_set and b in ring_set and (min(a, b), max(a, b)) not in cut:
                return 0.5 * (layout.tri_xy[ti][k] + layout.tri_xy[ti][(k + 1) % 3])
    return None


def annulus_fit(layout, level_of) -> AnnulusFit:
    """Fit the annulus of every band of an unfolded polyhedron of revolution.

    ``level_of`` gives the level index of every path node (``None`` for nodes
    between levels). Band ``b`` is bounded below by the lambda image of level
    ``b`` and above by the rho image of level ``b + 1``.
    """
    level_of = list(level_of)
    levels = sorted({lv for lv in level_of if lv is not None})
    bands = []
    for b in levels[:-1]:
        lo = [layout.lam[i] for i, lv in enumerate(level_of) if lv == b]
        hi = [layout.rho[i] for i, lv in enumerate(level_of) if lv == b + 1]
        if min(len(lo), len(hi)) <= 1:
            continue  # a pole: the arc degenerates to a point
        if len(lo) < 3 or len(hi) < 3:
            raise FitDegenerate(f"band {b} has too few corners for a fit")
        co, ro, eo = circle_fit(lo)
        ci, ri, ei = circle_fit(hi)
        bands.append(BandAnnulus(b, co, ro, ci, ri, max(eo, ei)))
    if not bands:
        raise FitDegenerate("no band has two fittable arcs")
    seams = []
    for lower, upper in zip(bands, bands[1:]):
        if upper.band != lower.band + 1:
            continue
        t = _uncut_ring_edge(layout, level_of, upper.band)
        c1, c2 = lower.inner_center, upper.outer_center
        axis = c2 - c1
        if t is None or np.linalg.norm(axis) == 0:
            col = 0.0
        else:
            v = t - c1
            col = abs(float(axis[0] * v[1] - axis[1] * v[0])) / (np.linalg.norm(axis) * lower.inner_radius)
        seams.append({"ring": upper.band, "r1": lower.inner_radius, "r2": upper.outer_radius,
                      "tangency": t, "collinearity": col})
    return AnnulusFit(bands, seams)
