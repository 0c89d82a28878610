"""Planar orientation and segment predicates with exact fallback.

Floating-point determinants are accepted when they clear a forward error
bound; otherwise the determinant is re-evaluated exactly with rationals
built from the float inputs (every float is an exact dyadic rational).
"""
from fractions import Fraction

import numpy as np

_EPS = np.finfo(float).eps / 2
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


def _orient_exact(ax, ay, bx, by, cx, cy):
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orient2d(a, b, c):
    """Sign of the signed area of triangle abc: +1 ccw, -1 cw, 0 collinear."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    t1 = (bx - ax) * (cy - ay)
    t2 = (by - ay) * (cx - ax)
    det = t1 - t2
    bound = _CCW_ERRBOUND * (abs(t1) + abs(t2))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _orient_exact(ax, ay, bx, by, cx, cy)


def orient2d_many(a, b, c):
    """Vectorised orient2d over (n, 2) arrays; uncertain rows resolved exactly."""
    t1 = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
    t2 = (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    det = t1 - t2
    bound = _CCW_ERRBOUND * (np.abs(t1) + np.abs(t2))
    out = np.where(det > bound, 1, np.where(-det > bound, -1, 0)).astype(np.int8)
    for i in np.flatnonzero(np.abs(det) <= bound):
        out[i] = _orient_exact(a[i, 0], a[i, 1], b[i, 0], b[i, 1], c[i, 0], c[i, 1])
    return out


def _on_segment(a, b, c):
    # c collinear with ab; inside the closed bounding box
    return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))


def segments_intersect(a, b, c, d):
    """Closed-segment intersection test. Returns (intersects, touching).

    ``touching`` is True when the contact is not a proper crossing (an
    endpoint lies on the other segment, or the segments are collinear).
    """
    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True, False
    if o1 == 0 and _on_segment(a, b, c):
        return True, True
    if o2 == 0 and _on_segment(a, b, d):
        return True, True
    if o3 == 0 and _on_segment(c, d, a):
        return True, True
    if o4 == 0 and _on_segment(c, d, b):
        return True, True
    return False, False


def intersection_point(a, b, c, d):
    """Intersection of the supporting lines (midpoint of overlap if parallel)."""
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    r = b - a
    s = d - c
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-300:
        pts = sorted([tuple(a), tuple(b), tuple(c), tuple(d)])
        return (np.asarray(pts[1]) + np.asarray(pts[2])) / 2
    qp = c - a
    t = (qp[0] * s[1] - qp[1] * s[0]) / den
    return a + t * r


def segment_distance(p, q, r, s):
    """Euclidean distance between closed segments pq and rs in the plane."""
    hit, _ = segments_intersect(p, q, r, s)
    if hit:
        return 0.0
    return min(_point_seg(p, r, s), _point_seg(q, r, s),
               _point_seg(r, p, q), _point_seg(s, p, q))


def _point_seg(p, a, b):
    p, a, b = (np.asarray(x, dtype=float) for x in (p, a, b))
    ab = b - a
    den = float(ab @ ab)
    t = 0.0 if den == 0 else min(1.0, max(0.0, float((p - a) @ ab) / den))
    return float(np.linalg.norm(a + t * ab - p))


def segment_distance_many(p, q, r, s):
    """Vectorised segment-segment distance (no intersection detection)."""
    def pt_seg(x, a, b):
        ab = b - a
        den = np.einsum("ij,ij->i", ab, ab)
        den = np.where(den == 0, 1.0, den)
        t = np.clip(np.einsum("ij,ij->i", x - a, ab) / den, 0.0, 1.0)
        return np.linalg.norm(a + t[:, None] * ab - x, axis=1)

    return np.minimum.reduce([pt_seg(p, r, s), pt_seg(q, r, s),
                              pt_seg(r, p, q), pt_seg(s, p, q)])
