"""Polyhedron representation, hull, orientation, slicing, bands and surface angles."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (DegenerateInput, EmptySlice, HorizontalDegenerate,
                     NonSimpleSlice, NotARotation, NotManifold, VertexInside)

TWO_PI = 2.0 * math.pi
HEIGHT_TOL_REL = 1e-9


def _angle(u, v) -> float:
    u0, u1, u2 = float(u[0]), float(u[1]), float(u[2])
    v0, v1, v2 = float(v[0]), float(v[1]), float(v[2])
    cx, cy, cz = u1 * v2 - u2 * v1, u2 * v0 - u0 * v2, u0 * v1 - u1 * v0
    return math.atan2(math.sqrt(cx * cx + cy * cy + cz * cz), u0 * v0 + u1 * v1 + u2 * v2)


@dataclass(frozen=True)
class SurfacePoint:
    """A point on the surface hosted by a mesh vertex or by an edge interior.

    For edge hosts ``t`` runs from ``p.edges[index][0]`` to ``p.edges[index][1]``.
    """
    position: np.ndarray = field(compare=False)
    kind: str
    index: int
    t: float = 0.0

    @property
    def is_vertex(self) -> bool:
        return self.kind == "vertex"

    @property
    def z(self) -> float:
        return float(self.position[2])

    def to_json(self) -> dict:
        return {"xyz": [float(c) for c in self.position], "host_kind": self.kind,
                "host_id": int(self.index), "t": float(self.t), "is_vertex": self.is_vertex}


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """Closed triangulated surface.

    ``face_ids`` groups coplanar triangles of one polygonal face; edges
    between triangles of the same face are flat and are never creases.
    """
    vertices: np.ndarray
    triangles: np.ndarray
    face_ids: np.ndarray
    convex: bool = True
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "triangles", np.asarray(self.triangles, dtype=np.int64))
        object.__setattr__(self, "face_ids", np.asarray(self.face_ids, dtype=np.int64))

    # -- topology -------------------------------------------------------
    @cached_property
    def directed(self) -> dict:
        out = {}
        for ti, (a, b, c) in enumerate(self.triangles.tolist()):
            for u, v in ((a, b), (b, c), (c, a)):
                if (u, v) in out:
                    raise NotManifold(f"directed edge {(u, v)} used twice")
                out[(u, v)] = ti
        return out

    @cached_property
    def edges(self) -> np.ndarray:
        es = sorted({(min(u, v), max(u, v)) for (u, v) in self.directed})
        return np.array(es, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def edge_index(self) -> dict:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges.tolist())}

    def edge_id(self, a: int, b: int) -> int:
        return self.edge_index[(min(a, b), max(a, b))]

    @cached_property
    def edge_tris(self) -> np.ndarray:
        """Per edge (a<b): triangle holding a->b, triangle holding b->a."""
        d = self.directed
        out = np.empty((len(self.edges), 2), dtype=np.int64)
        for i, (a, b) in enumerate(self.edges.tolist()):
            try:
                out[i] = (d[(a, b)], d[(b, a)])
            except KeyError as exc:
                raise NotManifold(f"edge {(a, b)} is not shared by two triangles") from exc
        return out

    @cached_property
    def tri_edges(self) -> np.ndarray:
        out = np.empty((len(self.triangles), 3), dtype=np.int64)
        for ti, (a, b, c) in enumerate(self.triangles.tolist()):
            out[ti] = (self.edge_id(a, b), self.edge_id(b, c), self.edge_id(c, a))
        return out

    @cached_property
    def flat_edges(self) -> np.ndarray:
        t = self.edge_tris
        return self.face_ids[t[:, 0]] == self.face_ids[t[:, 1]]

    @cached_property
    def vertex_tris(self) -> list:
        out = [[] for _ in range(len(self.vertices))]
        for ti, tri in enumerate(self.triangles.tolist()):
            for v in tri:
                out[v].append(ti)
        return out

    @cached_property
    def face_tris(self) -> dict:
        out = defaultdict(list)
        for ti, f in enumerate(self.face_ids.tolist()):
            out[f].append(ti)
        return dict(out)

    @cached_property
    def face_vertices(self) -> dict:
        return {f: set(self.triangles[ts].ravel().tolist()) for f, ts in self.face_tris.items()}

    @cached_property
    def vertex_faces(self) -> list:
        return [sorted({int(self.face_ids[t]) for t in ts}) for ts in self.vertex_tris]

    @cached_property
    def neighbors(self) -> list:
        out = [set() for _ in range(len(self.vertices))]
        for a, b in self.edges.tolist():
            out[a].add(b)
            out[b].add(a)
        return [sorted(s) for s in out]

    @cached_property
    def diameter(self) -> float:
        lo, hi = self.vertices.min(axis=0), self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    @cached_property
    def normals(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        ln = np.linalg.norm(n, axis=1, keepdims=True)
        return n / np.where(ln == 0, 1.0, ln)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def default_height_tol(self) -> float:
        return HEIGHT_TOL_REL * self.diameter

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.triangles)

    def signed_volume(self) -> float:
        c = self.vertices.mean(axis=0)
        v = self.vertices[self.triangles] - c
        return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)

    def surface_area(self) -> float:
        v = self.vertices[self.triangles]
        return float(np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1).sum() / 2)

    def validate(self, check_volume: bool = True) -> None:
        """Raise NotManifold unless the mesh is a closed oriented sphere."""
        self.edge_tris  # every edge shared by two opposite triangles
        used = np.zeros(len(self.vertices), dtype=bool)
        used[self.triangles.ravel()] = True
        if not used.all():
            raise NotManifold(f"unused vertices {np.flatnonzero(~used).tolist()}")
        if self.euler_characteristic() != 2:
            raise NotManifold(f"Euler characteristic {self.euler_characteristic()} != 2")
        for v, ts in enumerate(self.vertex_tris):
            if len(star_wedges(self, vertex_point(self, v), per_triangle=True)) != len(ts):
                raise NotManifold(f"vertex {v} has a non-disk neighbourhood")
        if check_volume and self.signed_volume() <= 0:
            raise NotManifold("triangles are not outward oriented")

    def is_convex(self, rel_tol: float = 1e-9) -> bool:
        tol = rel_tol * self.diameter
        v0 = self.vertices[self.triangles[:, 0]]
        d = np.einsum("fk,fvk->fv", self.normals, self.vertices[None, :, :] - v0[:, None, :])
        return bool((d <= tol).all())

    # -- convenience ----------------------------------------------------
    def point(self, kind: str, index: int, t: float = 0.0) -> SurfacePoint:
        if kind == "vertex":
            return vertex_point(self, index)
        a, b = self.edges[index]
        pos = (1 - t) * self.vertices[a] + t * self.vertices[b]
        return SurfacePoint(pos, "edge", int(index), float(t))

    def host_triangles(self, sp: SurfacePoint) -> list:
        if sp.is_vertex:
            return list(self.vertex_tris[sp.index])
        return [int(x) for x in self.edge_tris[sp.index]]

    def host_vertices(self, sp: SurfacePoint) -> set:
        if sp.is_vertex:
            return {sp.index}
        return set(int(x) for x in self.edges[sp.index])

    def curvatures(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        out = np.full(len(self.vertices), TWO_PI)
        for k in range(3):
            a = v[:, k]
            b = v[:, (k + 1) % 3] - a
            c = v[:, (k + 2) % 3] - a
            ang = np.arctan2(np.linalg.norm(np.cross(b, c), axis=1), np.einsum("ij,ij->i", b, c))
            np.subtract.at(out, self.triangles[:, k], ang)
        return out


def vertex_point(p: Polyhedron, v: int) -> SurfacePoint:
    return SurfacePoint(p.vertices[v].copy(), "vertex", int(v))


# ---------------------------------------------------------------------------
# construction

def _coplanar_groups(vertices, tris, normals, rel_tol=1e-9):
    """Union adjacent triangles whose planes agree; returns face id per triangle."""
    parent = list(range(len(tris)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    diam = float(np.linalg.norm(vertices.max(0) - vertices.min(0))) or 1.0
    owner = {}
    for ti, (a, b, c) in enumerate(tris):
        for u, v in ((a, b), (b, c), (c, a)):
            key = (min(u, v), max(u, v))
            if key in owner:
                tj = owner[key]
                if float(normals[ti] @ normals[tj]) > 1 - 1e-12:
                    other = [w for w in tris[tj] if w not in key][0]
                    dist = abs(float(normals[ti] @ (vertices[other] - vertices[a])))
                    if dist <= rel_tol * diam:
                        parent[find(ti)] = find(tj)
            else:
                owner[key] = ti
    roots = [find(i) for i in range(len(tris))]
    remap = {}
    return np.array([remap.setdefault(r, len(remap)) for r in roots], dtype=np.int64)


def from_polygons(vertices, faces: Sequence[Sequence[int]], convex: bool = True,
                  name: str = "") -> Polyhedron:
    """Fan-triangulate polygonal faces (ccw from outside); one face id per polygon."""
    tris, fids = [], []
    for fi, face in enumerate(faces):
        face = list(face)
        for k in range(1, len(face) - 1):
            tris.append((face[0], face[k], face[k + 1]))
            fids.append(fi)
    return Polyhedron(np.asarray(vertices, float), np.array(tris), np.array(fids), convex, name)


def convex_hull(points, name: str = "hull") -> Polyhedron:
    """Triangulated convex hull with coplanar facets merged into polygonal faces."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 4:
        raise DegenerateInput("need at least 4 points in 3D")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateInput(f"points are coplanar or collinear ({exc.args[0].splitlines()[0]})") from None
    used = np.unique(hull.simplices)
    remap = -np.ones(len(pts), dtype=np.int64)
    remap[used] = np.arange(len(used))
    verts = pts[used]
    tris = remap[hull.simplices]
    centre = verts.mean(axis=0)
    tv = verts[tris]
    n = np.cross(tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0])
    flip = np.einsum("ij,ij->i", n, tv.mean(axis=1) - centre) < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    n[flip] *= -1
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    groups = _coplanar_groups(verts, tris.tolist(), n)
    faces = []
    for g in range(groups.max() + 1):
        members = np.flatnonzero(groups == g)
        vids = sorted(set(tris[members].ravel().tolist()))
        normal = n[members].mean(axis=0)
        normal /= np.linalg.norm(normal)
        faces.append(_ccw_polygon(verts, vids, normal))
    return from_polygons(verts, faces, convex=True, name=name)


def _ccw_polygon(verts, vids, normal):
    c = verts[vids].mean(axis=0)
    ref = np.array([1.0, 0, 0]) if abs(normal[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(normal, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    ang = [math.atan2(float((verts[v] - c) @ e2), float((verts[v] - c) @ e1)) for v in vids]
    order = [v for _, v in sorted(zip(ang, vids))]
    k = order.index(min(order))
    return order[k:] + order[:k]


# ---------------------------------------------------------------------------
# orientation

def check_rotation(rotation, tol: float = 1e-12) -> np.ndarray:
    r = np.asarray(rotation, dtype=float)
    if r.shape != (3, 3):
        raise NotARotation(f"rotation must be 3x3, got {r.shape}")
    if np.abs(r @ r.T - np.eye(3)).max() > tol or abs(np.linalg.det(r) - 1) > tol:
        raise NotARotation("matrix is not orthogonal with determinant +1")
    return r


def orient(p: Polyhedron, rotation) -> Polyhedron:
    r = check_rotation(rotation)
    return Polyhedron(p.vertices @ r.T, p.triangles.copy(), p.face_ids.copy(), p.convex, p.name)


def axis_angle_rotation(axis, angle: float) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    r = np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)
    # re-orthonormalise so check_rotation's 1e-12 bound always holds
    u, _, vt = np.linalg.svd(r)
    return u @ vt


def quaternion_rotation(q) -> np.ndarray:
    w, x, y, z = np.asarray(q, dtype=float) / np.linalg.norm(q)
    r = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])
    u, _, vt = np.linalg.svd(r)
    return u @ vt


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform over SO(3): normalised Gaussian quaternion."""
    return quaternion_rotation(rng.standard_normal(4))


def rotation_to_vertical(direction) -> np.ndarray:
    """Rotation taking ``direction`` to +z."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(d, z)
    s = np.linalg.norm(axis)
    if s < 1e-15:
        return np.eye(3) if d[2] > 0 else axis_angle_rotation([1.0, 0, 0], math.pi)
    return axis_angle_rotation(axis, math.atan2(s, float(d @ z)))


# ---------------------------------------------------------------------------
# heights, slices and bands

def vertex_levels(p: Polyhedron, height_tol: Optional[float] = None) -> list:
    """Vertex groups by ascending height; each group ordered ccw about +z."""
    tol = p.default_height_tol if height_tol is None else height_tol
    z = p.vertices[:, 2]
    order = np.lexsort((np.arange(len(z)), z))
    groups, cur = [], [int(order[0])]
    for v in order[1:]:
        if z[v] - z[cur[-1]] <= tol:
            cur.append(int(v))
        else:
            groups.append(cur)
            cur = [int(v)]
    groups.append(cur)
    return [_ccw_about_z(p.vertices, g) if len(g) > 1 else g for g in groups]


def _ccw_about_z(verts, ids):
    xy = verts[ids, :2]
    c = xy.mean(axis=0)
    d = xy - c
    if np.abs(d).max() == 0:
        return sorted(ids)
    ang = np.arctan2(d[:, 1], d[:, 0])
    pairs = sorted(zip(np.round(ang, 12), ids))
    out = [v for _, v in pairs]
    k = out.index(min(out))
    return out[k:] + out[:k]


def level_index(p: Polyhedron, levels: list) -> np.ndarray:
    out = np.empty(p.n_vertices, dtype=np.int64)
    for i, g in enumerate(levels):
        out[g] = i
    return out


@dataclass
class SlicePolygon:
    z: float
    corners: list  # SurfacePoints, ccw about +z

    def __len__(self):
        return len(self.corners)

    def xy(self) -> np.ndarray:
        return np.array([c.position[:2] for c in self.corners])


def slice_at(p: Polyhedron, z: float, height_tol: Optional[float] = None,
             include_flat: bool = True) -> SlicePolygon:
    """Intersection of the surface with the plane at height ``z``."""
    tol = p.default_height_tol if height_tol is None else height_tol
    zs = p.vertices[:, 2]
    if z < zs.min() - tol or z > zs.max() + tol:
        raise EmptySlice(f"z={z} outside [{zs.min()}, {zs.max()}]")
    on = np.flatnonzero(np.abs(zs - z) <= tol)
    corners = [vertex_point(p, int(v)) for v in on]
    for e, (a, b) in enumerate(p.edges.tolist()):
        if not include_flat and p.flat_edges[e]:
            continue
        za, zb = zs[a], zs[b]
        if min(za, zb) < z - tol and max(za, zb) > z + tol:
            corners.append(p.point("edge", e, (z - za) / (zb - za)))
    if len(corners) > 2:
        xy = np.array([c.position[:2] for c in corners])
        cen = xy.mean(axis=0)
        ang = np.arctan2(xy[:, 1] - cen[1], xy[:, 0] - cen[0])
        corners = [corners[i] for i in np.lexsort((np.arange(len(ang)), np.round(ang, 12)))]
        if p.convex and _turns_both_ways(xy[np.lexsort((np.arange(len(ang)), np.round(ang, 12)))]):
            raise NonSimpleSlice(f"slice at z={z} is not a single convex loop")
    return SlicePolygon(float(z), corners)


def _turns_both_ways(xy) -> bool:
    d = np.roll(xy, -1, axis=0) - xy
    cr = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    scale = np.abs(d).max() ** 2
    return bool((cr < -1e-9 * scale).any() and (cr > 1e-9 * scale).any())


@dataclass
class Band:
    """Vertex-free slab of the surface: the cyclic ccw strip of crossing edges.

    ``edges[j]`` and ``edges[j+1]`` bound triangle ``tris[j]``.
    """
    z_lo: float
    z_hi: float
    edges: list
    tris: list
    below: np.ndarray  # vertex mask: at or under the lower plane

    def rigid(self, p: Polyhedron):
        """Non-flat crossing edges in ccw order with the face between each
        consecutive pair: ``(E, F)`` where ``F[j]`` lies between ``E[j]`` and ``E[j+1]``."""
        flat = p.flat_edges
        idx = [j for j, e in enumerate(self.edges) if not flat[e]]
        E = [self.edges[j] for j in idx]
        F = [int(p.face_ids[self.tris[j]]) for j in idx]
        return E, F


def strip_cycles(p: Polyhedron, below: np.ndarray) -> list:
    """Cycles of (edges, tris) crossing between ``below`` and the other vertices."""
    tris = p.triangles
    nxt = {}
    first_edge = {}
    for ti, (a, b, c) in enumerate(tris.tolist()):
        flags = (below[a], below[b], below[c])
        if all(flags) or not any(flags):
            continue
        e_in = e_out = None
        for u, v in ((a, b), (b, c), (c, a)):
            if below[u] and not below[v]:
                e_out = p.edge_id(u, v)
            elif below[v] and not below[u]:
                e_in = p.edge_id(u, v)
        nxt[e_in] = (ti, e_out)
        first_edge[ti] = e_in
    cycles, seen = [], set()
    for start in sorted(nxt):
        if start in seen:
            continue
        es, ts = [], []
        e = start
        while e not in seen:
            seen.add(e)
            t, e2 = nxt[e]
            es.append(e)
            ts.append(t)
            e = e2
        cycles.append((es, ts))
    return cycles


def band_from_mask(p: Polyhedron, below: np.ndarray, z_lo: float, z_hi: float) -> Band:
    cycles = strip_cycles(p, below)
    if len(cycles) != 1:
        raise NonSimpleSlice(f"band ({z_lo}, {z_hi}) has {len(cycles)} loops")
    es, ts = cycles[0]
    return Band(float(z_lo), float(z_hi), es, ts, below)


def band_between(p: Polyhedron, z_lo: float, z_hi: float,
                 height_tol: Optional[float] = None) -> Band:
    tol = p.default_height_tol if height_tol is None else height_tol
    if not z_lo < z_hi:
        raise ValueError("z_lo must be below z_hi")
    z = p.vertices[:, 2]
    inside = np.flatnonzero((z > z_lo + tol) & (z < z_hi - tol))
    if len(inside):
        raise VertexInside(f"vertex {int(inside[0])} at z={z[inside[0]]} lies inside ({z_lo}, {z_hi})")
    return band_from_mask(p, z <= z_lo + tol, z_lo, z_hi)


# ---------------------------------------------------------------------------
# intrinsic angles around a surface point

def star_wedges(p: Polyhedron, sp: SurfacePoint, per_triangle: bool = False) -> list:
    """Wedges ``(tri, from_xyz, to_xyz, angle)`` around ``sp``, ccw seen from outside."""
    P = sp.position
    out = []
    if sp.is_vertex:
        v = sp.index
        ts = p.vertex_tris[v]
        start = min(ts)
        t = start
        for _ in range(len(ts) + 1):
            tri = p.triangles[t].tolist()
            k = tri.index(v)
            b, c = tri[(k + 1) % 3], tri[(k + 2) % 3]
            out.append((t, p.vertices[b], p.vertices[c], _angle(p.vertices[b] - P, p.vertices[c] - P)))
            t = p.directed.get((v, c))
            if t == start or t is None:
                break
        return out
    a, b = p.edges[sp.index].tolist()
    t1, t2 = p.edge_tris[sp.index].tolist()
    c1 = [w for w in p.triangles[t1].tolist() if w not in (a, b)][0]
    c2 = [w for w in p.triangles[t2].tolist() if w not in (a, b)][0]
    V = p.vertices
    for tri, seq in ((t1, (b, c1, a)), (t2, (a, c2, b))):
        if per_triangle:
            out.append((tri, V[seq[0]], V[seq[2]], math.pi))
            continue
        out.append((tri, V[seq[0]], V[seq[1]], _angle(V[seq[0]] - P, V[seq[1]] - P)))
        out.append((tri, V[seq[1]], V[seq[2]], _angle(V[seq[1]] - P, V[seq[2]] - P)))
    return out


def total_angle(p: Polyhedron, sp: SurfacePoint) -> float:
    return sum(w[3] for w in star_wedges(p, sp))


def polar_angle(p: Polyhedron, sp: SurfacePoint, target, tri: Optional[int] = None):
    """Intrinsic polar angle at ``sp`` of the direction toward ``target``.

    ``target`` must lie in a triangle incident to ``sp`` (``tri`` if given).
    Returns ``(angle, total)`` with angle in [0, total).
    """
    P = sp.position
    d = np.asarray(target, dtype=float) - P
    wedges = star_wedges(p, sp)
    total = sum(w[3] for w in wedges)
    best, best_err = None, math.inf
    start = 0.0
    for t, f, to, a in wedges:
        if tri is None or t == tri:
            t1 = _angle(f - P, d)
            t2 = _angle(d, to - P)
            err = abs(t1 + t2 - a)
            if err < best_err:
                best, best_err = start + t1, err
        start += a
    if best is None or best_err > 1e-7:
        raise HorizontalDegenerate(f"target not inside the star of the point (err={best_err})")
    return best % total, total


def horizontal_angles(p: Polyhedron, sp: SurfacePoint) -> tuple:
    """Polar angles of horizontal directions in the star of ``sp`` and the total angle."""
    P = sp.position
    out = []
    start = 0.0
    for _, f, to, a in star_wedges(p, sp):
        u, v = f - P, to - P
        zu, zv = float(u[2]), float(v[2])
        lu, lv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
        if abs(zu) <= 1e-12 * lu:
            out.append(start)
        elif abs(zv) > 1e-12 * lv and zu * zv < 0:
            s = zu / (zu - zv)
            out.append(start + _angle(u, (1 - s) * u + s * v))
        start += a
    total = start
    uniq = []
    for h in sorted(x % total for x in out):
        if not uniq or h - uniq[-1] > 1e-12:
            uniq.append(h)
    if len(uniq) > 1 and uniq[0] + total - uniq[-1] <= 1e-12:
        uniq.pop()
    return uniq, total


def is_apex(p: Polyhedron, v: int, which: str, height_tol: Optional[float] = None) -> bool:
    """True if every neighbour of ``v`` lies strictly above (``bottom``) or below (``top``)."""
    tol = p.default_height_tol if height_tol is None else height_tol
    dz = p.vertices[p.neighbors[v], 2] - p.vertices[v, 2]
    return bool((dz > tol).all()) if which == "bottom" else bool((dz < -tol).all())


@dataclass(frozen=True)
class SurfaceAngleSplit:
    rho_h: float
    lambda_h: float


def surface_angle_split(p: Polyhedron, at: SurfacePoint, toward, tri: Optional[int] = None,
                        side: str = "below") -> SurfaceAngleSplit:
    """Angles swept clockwise (right, ``rho_h``) and counterclockwise (left,
    ``lambda_h``) from the direction toward ``toward`` to the nearest
    horizontal direction at ``at``.

    ``side='below'`` expects an upward direction (the sweep goes down to the
    horizontal plane), ``side='above'`` a downward one.
    """
    if side not in ("below", "above"):
        raise ValueError("side must be 'below' or 'above'")
    dz = float(np.asarray(toward)[2] - at.position[2])
    if (side == "below" and dz < 0) or (side == "above" and dz > 0):
        raise ValueError(f"direction does not point {'up' if side == 'below' else 'down'}")
    phi, total = polar_angle(p, at, toward, tri)
    hs, _ = horizontal_angles(p, at)
    if not hs:
        raise HorizontalDegenerate("no horizontal direction at this point (apex)")
    cw = min((phi - h) % total for h in hs)
    ccw = min((h - phi) % total for h in hs)
    return SurfaceAngleSplit(cw, ccw)


def gaussian_curvature(p: Polyhedron, v: int) -> float:
    return float(p.curvatures()[v])
