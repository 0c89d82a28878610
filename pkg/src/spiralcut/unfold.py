"""Cutting the surface along a path and developing the disk into the plane."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericalDrift, PathNotSimpleOnSurface
from .mesh import Polyhedron, total_angle
from .spiral import SpiralPath

TWO_PI = 2.0 * math.pi
DRIFT_TOL = 1e-6


@dataclass
class CutDisk:
    """The surface cut open along a path, as a triangulated disk.

    Node ids ``0..n_vertices-1`` are the mesh vertices; further nodes are
    edge points and centroids of the pieces the path splits triangles into.
    """
    p: Polyhedron
    nodes: np.ndarray  # (N, 3)
    hosts: list  # ("vertex", v) | ("edge", e, t) | ("steiner", face)
    triangles: np.ndarray  # (T, 3) node ids, ccw from outside
    tri_face: np.ndarray
    path: list  # node ids along the path, pass-through nodes included
    path_corner: list  # source corner index per path node, -1 for pass-through
    left: list = field(default_factory=list)  # per path sub-edge: triangle on its left
    right: list = field(default_factory=list)

    @property
    def n_cut(self) -> int:
        return len(self.path) - 1

    def cut_edges(self) -> set:
        return {(min(a, b), max(a, b)) for a, b in zip(self.path, self.path[1:])}

    def edge_lengths(self) -> np.ndarray:
        v = self.nodes[self.triangles]
        return np.linalg.norm(v[:, [1, 2, 0]] - v, axis=2)

    def area(self) -> float:
        v = self.nodes[self.triangles]
        return float(0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1).sum())

    def euler_characteristic(self) -> int:
        """Of the cut surface: path nodes other than the two ends, and path
        sub-edges, are counted twice."""
        edges = set()
        for a, b, c in self.triangles.tolist():
            for u, v in ((a, b), (b, c), (c, a)):
                edges.add((min(u, v), max(u, v)))
        n_nodes = len(np.unique(self.triangles))
        return (n_nodes + len(self.path) - 2) - (len(edges) + self.n_cut) + len(self.triangles)

    def boundary_length(self) -> float:
        xyz = self.nodes[self.path]
        return 2.0 * float(np.linalg.norm(np.diff(xyz, axis=0), axis=1).sum())


class _Nodes:
    def __init__(self, p: Polyhedron):
        self.p = p
        self.pos = [v for v in p.vertices]
        self.hosts = [("vertex", i) for i in range(p.n_vertices)]
        self._edge = {}

    def vertex_or_edge(self, kind: str, index: int, t: float = 0.0) -> int:
        if kind == "vertex":
            return int(index)
        if t <= 1e-14:
            return int(self.p.edges[index][0])
        if t >= 1 - 1e-14:
            return int(self.p.edges[index][1])
        key = (int(index), round(float(t), 12))
        if key not in self._edge:
            a, b = self.p.edges[index]
            self._edge[key] = len(self.pos)
            self.pos.append((1 - t) * self.p.vertices[a] + t * self.p.vertices[b])
            self.hosts.append(("edge", int(index), float(t)))
        return self._edge[key]

    def steiner(self, xyz, face: int) -> int:
        self.pos.append(np.asarray(xyz, dtype=float))
        self.hosts.append(("steiner", int(face)))
        return len(self.pos) - 1


def _face_2d(p: Polyhedron, face: int):
    t = p.face_tris[face][0]
    n = p.normals[t]
    o = p.vertices[p.triangles[t, 0]]
    ex = p.vertices[p.triangles[t, 1]] - o
    ex = ex / np.linalg.norm(ex)
    ey = np.cross(n, ex)
    return lambda x: np.array([(x - o) @ ex, (x - o) @ ey])


def _pass_through(p: Polyhedron, nodes: _Nodes, a: int, b: int, face: int) -> list:
    """Nodes where the chord ``a b`` of ``face`` crosses its triangulation diagonals."""
    tris = p.face_tris[face]
    if len(tris) == 1:
        return []
    to2 = _face_2d(p, face)
    A, B = to2(nodes.pos[a]), to2(nodes.pos[b])
    d = B - A
    hits = []
    diag = {int(p.tri_edges[t][k]) for t in tris for k in range(3)}
    for e in sorted(diag):
        if not p.flat_edges[e]:
            continue
        u, v = p.edges[e]
        U, V = to2(p.vertices[u]), to2(p.vertices[v])
        w = V - U
        den = d[0] * w[1] - d[1] * w[0]
        if abs(den) < 1e-15 * (np.dot(d, d) + np.dot(w, w)):
            continue
        r = U - A
        s = (r[0] * w[1] - r[1] * w[0]) / den
        t = (r[0] * d[1] - r[1] * d[0]) / den
        if 1e-12 < s < 1 - 1e-12 and -1e-12 <= t <= 1 + 1e-12:
            hits.append((s, nodes.vertex_or_edge("edge", e, min(max(t, 0.0), 1.0))))
    hits.sort()
    out = []
    for _, n in hits:
        if n not in (a, b) and (not out or out[-1] != n):
            out.append(n)
    return out


def _on_tri_boundary(p: Polyhedron, nodes: _Nodes, n: int, t: int) -> bool:
    h = nodes.hosts[n]
    if h[0] == "vertex":
        return h[1] in p.triangles[t]
    if h[0] == "edge":
        return h[1] in p.tri_edges[t]
    return False


def _split_polygon(poly: list, chords: list) -> list:
    pieces = [poly]
    for a, b in chords:
        for k, pc in enumerate(pieces):
            if a in pc and b in pc:
                i, j = sorted((pc.index(a), pc.index(b)))
                if j - i in (1, len(pc) - 1):
                    break  # chord is a side of the piece
                pieces[k:k + 1] = [pc[i:j + 1], pc[j:] + pc[:i + 1]]
                break
        else:
            raise PathNotSimpleOnSurface(f"chord {a}-{b} does not split a single piece")
    return pieces


def cut_surface(p: Polyhedron, s: SpiralPath) -> CutDisk:
    nodes = _Nodes(p)
    ids = [nodes.vertex_or_edge(c.kind, c.index, c.t) for c in s.corners]
    path, path_corner = [ids[0]], [0]
    chords: dict = {}  # triangle -> list of chords
    for i, car in enumerate(s.carriers):
        a, b = ids[i], ids[i + 1]
        if a == b:
            raise PathNotSimpleOnSurface(f"zero-length segment {i}")
        mids = _pass_through(p, nodes, a, b, car[1]) if car[0] == "face" else []
        seq = [a] + mids + [b]
        for x, y in zip(seq, seq[1:]):
            if car[0] == "face":
                host = [t for t in p.face_tris[car[1]]
                        if _on_tri_boundary(p, nodes, x, t) and _on_tri_boundary(p, nodes, y, t)]
                along = [t for t in host if _same_side(p, nodes, x, y, t)]
                host = [t for t in host if t not in along]
                if along:
                    pass  # the sub-segment runs along a triangle side: no chord
                elif len(host) != 1:
                    raise PathNotSimpleOnSurface(f"segment {i} has no unique host triangle")
                else:
                    chords.setdefault(host[0], []).append((x, y))
        path.extend(mids + [b])
        path_corner.extend([-1] * len(mids) + [i + 1])
    if len(set(path)) != len(path):
        raise PathNotSimpleOnSurface("path visits a surface point twice")

    # nodes on each triangle side, in order
    on_edge: dict = {}
    for n, h in enumerate(nodes.hosts):
        if h[0] == "edge":
            on_edge.setdefault(h[1], []).append((h[2], n))
    tris, faces = [], []
    for t, (a, b, c) in enumerate(p.triangles.tolist()):
        poly = []
        for u, v in ((a, b), (b, c), (c, a)):
            poly.append(u)
            e = p.edge_id(u, v)
            pts = sorted(on_edge.get(e, []))
            if p.edges[e][0] != u:
                pts = pts[::-1]
            poly.extend(n for _, n in pts)
        f = int(p.face_ids[t])
        for pc in _split_polygon(poly, chords.get(t, [])):
            if len(pc) == 3:
                tris.append(pc)
                faces.append(f)
                continue
            cen = nodes.steiner(np.mean([nodes.pos[n] for n in pc], axis=0), f)
            for k in range(len(pc)):
                tris.append([cen, pc[k], pc[(k + 1) % len(pc)]])
                faces.append(f)
    disk = CutDisk(p, np.array(nodes.pos), nodes.hosts, np.array(tris, dtype=np.int64),
                   np.array(faces, dtype=np.int64), path, path_corner)
    directed = {}
    for ti, (a, b, c) in enumerate(disk.triangles.tolist()):
        for u, v in ((a, b), (b, c), (c, a)):
            directed[(u, v)] = ti
    for a, b in zip(path, path[1:]):
        if (a, b) not in directed or (b, a) not in directed:
            raise PathNotSimpleOnSurface(f"path sub-edge {a}-{b} is not a disk edge")
        disk.left.append(directed[(a, b)])
        disk.right.append(directed[(b, a)])
    return disk


def _same_side(p: Polyhedron, nodes: _Nodes, x: int, y: int, t: int) -> bool:
    """Do nodes ``x`` and ``y`` lie on one side of triangle ``t``?"""
    def sides(n):
        h = nodes.hosts[n]
        if h[0] == "edge":
            return {h[1]}
        return {int(e) for e in p.tri_edges[t] if h[1] in p.edges[e]}
    return bool(sides(x) & sides(y))


# ---------------------------------------------------------------------------
# development

@dataclass
class PlanarLayout:
    """Planar images of the disk triangles and of the two sides of the cut.

    The surface lies to the right of ``rho`` and to the left of ``lam``.
    """
    disk: CutDisk
    tri_xy: np.ndarray  # (T, 3, 2)
    rho: np.ndarray  # (P, 2)
    lam: np.ndarray  # (P, 2)
    # the same three arrays in extended precision, before rounding to float64;
    # the consistency checks below measure these
    precise: Optional[tuple] = field(default=None, repr=False, compare=False)

    @property
    def is_vertex(self) -> list:
        return [self.disk.hosts[n][0] == "vertex" for n in self.disk.path]

    @property
    def corner_index(self) -> list:
        return list(self.disk.path_corner)

    def boundary(self) -> np.ndarray:
        """Closed boundary polygon: rho forward, then lambda backward."""
        return np.vstack([self.rho, self.lam[-2:0:-1]])

    def diameter(self) -> float:
        xy = self.tri_xy.reshape(-1, 2)
        return float(np.linalg.norm(xy.max(axis=0) - xy.min(axis=0)))

    def to_json(self) -> dict:
        def poly(xy):
            return [{"xy": [float(x), float(y)], "is_vertex": iv, "corner": int(c)}
                    for (x, y), iv, c in zip(xy, self.is_vertex, self.corner_index)]
        return {
            "triangles": [[[float(x), float(y)] for x, y in t] for t in self.tri_xy],
            "rho": poly(self.rho),
            "lambda": poly(self.lam),
            "endpoint_angles": {"bottom": endpoint_exterior_angle(self, "bottom"),
                                "top": endpoint_exterior_angle(self, "top")},
        }


def _local_triangle(P):
    """2D congruent copy of a 3D triangle: first vertex at 0, second on +x.

    Placement runs in extended precision so that drift along long chains of
    triangles stays far below the float64 resolution of the result.
    """
    a, b, c = np.asarray(P, dtype=np.longdouble)
    ab, ac = b - a, c - a
    lab = np.sqrt(ab @ ab)
    ex = ab / lab
    x = ac @ ex
    r = ac - x * ex
    return np.array([[0, 0], [lab, 0], [x, np.sqrt(r @ r)]], dtype=np.longdouble)


def _fit(local, k, A, B):
    """Place a local triangle so that its vertices k, k+1 land on A, B."""
    i, j = k, (k + 1) % 3
    u = local[j] - local[i]
    v = B - A
    n = np.sqrt((u @ u) * (v @ v))
    c, s = (u @ v) / n, (u[0] * v[1] - u[1] * v[0]) / n
    R = np.array([[c, -s], [s, c]])
    return (local - local[i]) @ R.T + A


def develop(d: CutDisk) -> PlanarLayout:
    """Breadth-first rigid placement across uncut edges.

    The seed is the triangle right of the first path edge, with the start of
    the path at the origin and the first rho segment along +x, so the seed
    lies below the x axis.
    """
    T = len(d.triangles)
    local = np.array([_local_triangle(d.nodes[t]) for t in d.triangles])
    cut = d.cut_edges()
    directed = {}
    for ti, tri in enumerate(d.triangles.tolist()):
        for k in range(3):
            directed[(tri[k], tri[(k + 1) % 3])] = (ti, k)
    xy = np.full((T, 3, 2), np.nan, dtype=np.longdouble)
    p1, p2 = d.path[0], d.path[1]
    seed, k = directed[(p2, p1)]
    L = float(np.linalg.norm(d.nodes[p2] - d.nodes[p1]))
    xy[seed] = _fit(local[seed], k, np.array([L, 0], dtype=np.longdouble),
                    np.zeros(2, dtype=np.longdouble))
    done = np.zeros(T, dtype=bool)
    done[seed] = True
    queue = deque([seed])
    while queue:
        ti = queue.popleft()
        tri = d.triangles[ti].tolist()
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            if (min(a, b), max(a, b)) in cut:
                continue
            nb = directed.get((b, a))
            if nb is None or done[nb[0]]:
                continue
            tj, kj = nb
            xy[tj] = _fit(local[tj], kj, xy[ti][(k + 1) % 3], xy[ti][k])
            done[tj] = True
            queue.append(tj)
    if not done.all():
        raise NumericalDrift(f"{int((~done).sum())} triangles unreachable from the seed")
    rho, lam = _sides(d, xy)
    lay = PlanarLayout(d, xy.astype(float), rho.astype(float), lam.astype(float), (xy, rho, lam))
    err = isometry_error(lay)
    if err > DRIFT_TOL:
        raise NumericalDrift(f"placed edge lengths drift by {err:.3g} (relative)")
    return lay


def _vertex_xy(d: CutDisk, xy, ti: int, node: int):
    k = d.triangles[ti].tolist().index(node)
    return xy[ti][k]


def _sides(d: CutDisk, xy):
    P = len(d.path)
    rho = np.empty((P, 2), dtype=xy.dtype)
    lam = np.empty((P, 2), dtype=xy.dtype)
    for i in range(P - 1):
        a, b = d.path[i], d.path[i + 1]
        rho[i] = _vertex_xy(d, xy, d.right[i], a)
        lam[i] = _vertex_xy(d, xy, d.left[i], a)
    rho[-1] = _vertex_xy(d, xy, d.right[-1], d.path[-1])
    lam[-1] = _vertex_xy(d, xy, d.left[-1], d.path[-1])
    return rho, lam


def unfold(p: Polyhedron, s: SpiralPath) -> PlanarLayout:
    return develop(cut_surface(p, s))


def boundary_paths(lay: PlanarLayout) -> tuple:
    """``(rho, lambda)`` as lists of ``(xy, is_vertex, corner_index)``."""
    meta = list(zip(lay.is_vertex, lay.corner_index))
    rho = [(xy, iv, c) for xy, (iv, c) in zip(lay.rho, meta)]
    lam = [(xy, iv, c) for xy, (iv, c) in zip(lay.lam, meta)]
    return rho, lam


def _dir_angle(v) -> float:
    return math.atan2(v[1], v[0])


def _arrays(lay: PlanarLayout) -> tuple:
    return lay.precise if lay.precise is not None else (lay.tri_xy, lay.rho, lay.lam)


def endpoint_exterior_angle(lay: PlanarLayout, which: str = "bottom") -> float:
    """Exterior angle 2*pi minus the surface angle of the layout at the image
    of the first (``bottom``) or last (``top``) path point."""
    _, rho, lam = _arrays(lay)
    if which == "bottom":
        r, l = rho[1] - rho[0], lam[1] - lam[0]
        interior = (_dir_angle(r) - _dir_angle(l)) % TWO_PI
    elif which == "top":
        r, l = rho[-2] - rho[-1], lam[-2] - lam[-1]
        interior = (_dir_angle(l) - _dir_angle(r)) % TWO_PI
    else:
        raise ValueError("which must be 'bottom' or 'top'")
    return TWO_PI - interior


# ---------------------------------------------------------------------------
# consistency checks

def isometry_error(lay: PlanarLayout) -> float:
    """Largest relative edge-length difference between placed and 3D triangles."""
    xy = _arrays(lay)[0]
    flat = np.linalg.norm(xy[:, [1, 2, 0]] - xy, axis=2)
    full = lay.disk.edge_lengths()
    return float((np.abs(flat - full) / np.maximum(full, 1e-300)).max())


def side_length_error(lay: PlanarLayout) -> float:
    """Relative difference between the lengths of rho and lambda, and the
    worst relative mismatch of glued segment pairs."""
    _, rho, lam = _arrays(lay)
    r = np.sqrt((np.diff(rho, axis=0) ** 2).sum(axis=1))
    l = np.sqrt((np.diff(lam, axis=0) ** 2).sum(axis=1))
    total = abs(r.sum() - l.sum()) / max(r.sum(), 1e-300)
    pair = float((np.abs(r - l) / np.maximum(np.maximum(r, l), 1e-300)).max())
    return max(float(total), pair)


def _placed_angles(lay: PlanarLayout) -> np.ndarray:
    xy = _arrays(lay)[0]
    out = np.empty(xy.shape[:2])
    for k in range(3):
        u = xy[:, (k + 1) % 3] - xy[:, k]
        v = xy[:, (k + 2) % 3] - xy[:, k]
        out[:, k] = np.abs(np.arctan2(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0],
                                      (u * v).sum(axis=1)))
    return out


def angle_closure_error(lay: PlanarLayout) -> float:
    """Worst deviation of (a) placed angles summing to 2*pi at uncut interior
    nodes and (b) rho-side plus lambda-side angles matching the surface angle
    at interior path corners."""
    d = lay.disk
    ang = _placed_angles(lay)
    sums = np.zeros(len(d.nodes))
    np.add.at(sums, d.triangles, ang)
    on_path = set(d.path)
    interior = [n for n in np.unique(d.triangles) if n not in on_path]
    err = float(np.abs(sums[interior] - TWO_PI).max()) if interior else 0.0
    _, rho, lam = _arrays(lay)
    for i in range(1, len(d.path) - 1):
        f, g = rho[i + 1] - rho[i], rho[i - 1] - rho[i]
        right = (_dir_angle(f) - _dir_angle(g)) % TWO_PI
        f, g = lam[i + 1] - lam[i], lam[i - 1] - lam[i]
        left = (_dir_angle(g) - _dir_angle(f)) % TWO_PI
        err = max(err, abs(right + left - surface_angle_at(d, d.path[i])))
    return err


def surface_angle_at(d: CutDisk, node: int) -> float:
    h = d.hosts[node]
    if h[0] == "vertex":
        return total_angle(d.p, d.p.point("vertex", h[1]))
    return TWO_PI


def glue_check(lay: PlanarLayout) -> bool:
    """Gluing rho to lambda segment by segment recovers the surface adjacency:
    for each cut edge the left and right triangles share exactly its nodes."""
    d = lay.disk
    for i, (a, b) in enumerate(zip(d.path, d.path[1:])):
        L, R = d.triangles[d.left[i]].tolist(), d.triangles[d.right[i]].tolist()
        if not ({a, b} <= set(L) and {a, b} <= set(R)):
            return False
        k = L.index(a)
        if L[(k + 1) % 3] != b:
            return False
        k = R.index(b)
        if R[(k + 1) % 3] != a:
            return False
    return True
