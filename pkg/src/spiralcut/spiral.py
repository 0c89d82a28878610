"""Construction and validation of ccw-advancing Hamiltonian cut paths.

A path starts at a bottommost vertex, visits every vertex once, never goes
down and turns around the vertical axis in the positive sense on every
segment. Corners sit on vertices or on interiors of non-flat edges.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (AmbiguousBand, ExitNotAdjacent, HorizontalDegenerate, NoNonacuteTurn,
                     NonSimpleSlice, SpiralError)
from .mesh import (Polyhedron, SurfacePoint, band_from_mask, is_apex, level_index, polar_angle,
                   surface_angle_split, vertex_levels, vertex_point)

log = logging.getLogger(__name__)

Corner = SurfacePoint
ANGLE_EPS = 1e-9
NONACUTE_EPS = 1e-12
FIRST_BAND_STEPS = 256
FIRST_BAND_COMBOS = 8  # shortest departure/arrival pairs scanned in the first band
FIRST_CORNER_LOW = (1 / 64, 1 / 16, 1 / 4)


# ---------------------------------------------------------------------------
# carriers: ("edge", e) for a segment along a mesh edge, ("face", f) otherwise

def host_faces(p: Polyhedron, sp: SurfacePoint) -> set:
    if sp.is_vertex:
        return set(p.vertex_faces[sp.index])
    return {int(p.face_ids[t]) for t in p.edge_tris[sp.index]}


def common_carriers(p: Polyhedron, a: SurfacePoint, b: SurfacePoint) -> list:
    """Every edge or face that holds the straight segment ``ab``."""
    if a.is_vertex and b.is_vertex:
        e = p.edge_index.get((min(a.index, b.index), max(a.index, b.index)))
        if e is not None:
            return [("edge", e)]
    elif a.is_vertex != b.is_vertex:
        v, ep = (a, b) if a.is_vertex else (b, a)
        if v.index in p.edges[ep.index]:
            return [("edge", ep.index)]
    elif a.index == b.index:
        return [("edge", a.index)]
    return [("face", f) for f in sorted(host_faces(p, a) & host_faces(p, b))]


def _carrier_tris(p: Polyhedron, carrier) -> list:
    kind, i = carrier
    if kind == "edge":
        return [int(t) for t in p.edge_tris[i]]
    return list(p.face_tris[i])


def _edge_goes_down(p: Polyhedron, e: int, face: int) -> Optional[bool]:
    """Whether edge ``e`` is traversed downward by the ccw boundary of ``face``."""
    a, b = p.edges[e].tolist()
    for u, v in ((a, b), (b, a)):
        t = p.directed.get((u, v))
        if t is not None and p.face_ids[t] == face:
            return bool(p.vertices[v, 2] < p.vertices[u, 2])
    return None


def _cross_z(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def _horizontal_ccw(p: Polyhedron, a: SurfacePoint, b: SurfacePoint, carrier) -> bool:
    d = b.position - a.position
    mid = 0.5 * (a.position + b.position)
    # a ridge edge between two sloped faces counts as ccw either way
    votes = [_cross_z(p.normals[t][:2], d) > 0 for t in _carrier_tris(p, carrier)
             if np.hypot(*p.normals[t][:2]) > 1e-9]
    if votes:
        return any(votes)
    # horizontal face: orientation about the face centroid
    kind, i = carrier
    verts = p.face_vertices[i] if kind == "face" else p.edges[i].tolist()
    c = p.vertices[list(verts)].mean(axis=0)
    return _cross_z(mid - c, d) > 0


def _start_ok(p: Polyhedron, a: SurfacePoint, b: SurfacePoint, tol: float) -> bool:
    if a.is_vertex and is_apex(p, a.index, "bottom", tol):
        return True
    try:
        s = surface_angle_split(p, a, b.position, side="below")
    except HorizontalDegenerate:
        return True
    return s.rho_h < s.lambda_h - ANGLE_EPS


def _end_ok(p: Polyhedron, a: SurfacePoint, b: SurfacePoint, tol: float) -> bool:
    if b.is_vertex and is_apex(p, b.index, "top", tol):
        return True
    try:
        s = surface_angle_split(p, b, a.position, side="above")
    except HorizontalDegenerate:
        return True
    return s.lambda_h > s.rho_h + ANGLE_EPS


def is_ccw_advance(p: Polyhedron, a: SurfacePoint, b: SurfacePoint, carrier=None,
                   height_tol: Optional[float] = None) -> bool:
    """Does the segment ``a -> b`` turn counterclockwise about the vertical axis?"""
    tol = p.default_height_tol if height_tol is None else height_tol
    if carrier is None:
        cs = common_carriers(p, a, b)
        if not cs:
            raise SpiralError("segment endpoints share no face")
        return any(is_ccw_advance(p, a, b, c, tol) for c in cs)
    dz = b.z - a.z
    if dz < -tol:
        return False
    if abs(dz) <= tol:
        return _horizontal_ccw(p, a, b, carrier)
    if not a.is_vertex and not b.is_vertex and carrier[0] == "face":
        if a.index == b.index:
            return False
        return (_edge_goes_down(p, a.index, carrier[1]) is True
                and _edge_goes_down(p, b.index, carrier[1]) is False)
    return _start_ok(p, a, b, tol) and _end_ok(p, a, b, tol)


def turn_sides(p: Polyhedron, at: SurfacePoint, prev: SurfacePoint, nxt: SurfacePoint) -> tuple:
    """Surface angles on the two sides of the path at ``at``."""
    a1, total = polar_angle(p, at, prev.position)
    a2, _ = polar_angle(p, at, nxt.position)
    s = (a1 - a2) % total
    return s, total - s


def is_nonacute(p: Polyhedron, at, prev, nxt) -> bool:
    return min(turn_sides(p, at, prev, nxt)) >= math.pi / 2 - NONACUTE_EPS


# ---------------------------------------------------------------------------
# path container

@dataclass
class SpiralPath:
    corners: list
    carriers: list  # one per segment
    tags: list  # ("level", i) or ("band", i) per corner
    winding: int = 0
    levels: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __len__(self):
        return len(self.corners)

    @property
    def n_segments(self) -> int:
        return len(self.corners) - 1

    def positions(self) -> np.ndarray:
        return np.array([c.position for c in self.corners])

    def length(self) -> float:
        xyz = self.positions()
        return float(np.linalg.norm(np.diff(xyz, axis=0), axis=1).sum())

    def vertex_order(self) -> list:
        return [c.index for c in self.corners if c.is_vertex]

    def to_json(self) -> dict:
        return {
            "winding": self.winding,
            "corners": [dict(c.to_json(), tag=list(t)) for c, t in zip(self.corners, self.tags)],
            "carriers": [list(c) for c in self.carriers],
            "warnings": list(self.warnings),
        }


@dataclass
class _Piece:
    """Corners after the start vertex of one band crossing, ending at a vertex."""
    start: SurfacePoint
    corners: list
    carriers: list
    tags: list
    k: int
    along: int
    length: float
    ledges: int = 0
    combo: tuple = ()  # (departure, arrival) indices within band_pieces
    _ok: Optional[bool] = None

    def is_ok(self, p: Polyhedron, tol: float) -> bool:
        """All segments advance ccw (evaluated once, on demand)."""
        if self._ok is None:
            pts = [self.start] + self.corners
            self._ok = all(is_ccw_advance(p, a, c, car, tol)
                           for a, c, car in zip(pts, pts[1:], self.carriers))
        return self._ok

    @property
    def end(self) -> SurfacePoint:
        return self.corners[-1]

    def cost(self):
        return (self.ledges, self.k, self.along, self.length, _edge_key(self))


def _edge_key(piece: _Piece) -> tuple:
    return tuple(c.index for c in piece.corners if not c.is_vertex)


def _seg_len(points) -> float:
    xyz = np.array([c.position for c in points])
    return float(np.linalg.norm(np.diff(xyz, axis=0), axis=1).sum())


class _Builder:
    def __init__(self, p: Polyhedron, winding: int, height_tol: Optional[float]):
        self.p = p
        self.w = int(winding)
        self.tol = p.default_height_tol if height_tol is None else float(height_tol)
        self.levels = vertex_levels(p, self.tol)
        self.lev = level_index(p, self.levels)
        z = p.vertices[:, 2]
        self.zmin = [float(z[g].min()) for g in self.levels]
        self.zmax = [float(z[g].max()) for g in self.levels]
        self.zmean = [float(z[g].mean()) for g in self.levels]
        self.warnings: list = []
        self._rigid = {}
        self._best = {}

    def rigid(self, b: int):
        if b not in self._rigid:
            try:
                band = band_from_mask(self.p, self.lev <= b, self.zmax[b], self.zmin[b + 1])
            except NonSimpleSlice as exc:
                raise AmbiguousBand(str(exc)) from exc
            self._rigid[b] = band.rigid(self.p)
        return self._rigid[b]

    # -- one band ---------------------------------------------------------
    def _ledge(self, face: int, v: int, L: int):
        """Point one third of the way along the level edge that follows ``v``
        in the ccw boundary of ``face``.

        Leaving ``v`` that edge heads ccw about the axis; arriving, it is the
        top edge walked back toward ``v``.
        """
        p = self.p
        for t in p.face_tris[face]:
            tri = p.triangles[t].tolist()
            k = tri.index(v) if v in tri else -1
            if k < 0:
                continue
            x = tri[(k + 1) % 3]
            e = p.edge_id(v, x)
            if p.flat_edges[e] or self.lev[x] != L:
                continue
            a = p.edges[e][0]
            t_par = 1 / 3 if a == v else 2 / 3
            return p.point("edge", e, t_par), ("edge", e)
        return None

    def band_pieces(self, b: int, u: int, w: int, fractions=None, combos=None) -> list:
        """Candidate crossings of band ``b`` from vertex ``u``.

        Corner heights, as fractions of the band height, run linearly from
        ``f1`` for the first corner to ``phi`` for the last. ``fractions``
        lists ``phi`` values (with ``f1 = phi / k``) or ``(f1, phi)`` pairs;
        the default is ``phi = k / (k + 1)``. ``combos`` restricts the
        cornered pieces to the given (departure, arrival) index pairs.
        """
        p = self.p
        E, F = self.rigid(b)
        K = len(E)
        targets = self.levels[b + 1]
        up = vertex_point(p, u)
        zl, zh = self.zmax[b], self.zmin[b + 1]
        # departures: (prefix corners, prefix carriers, point, s, first carrier)
        deps = []
        for j in range(K):
            if u in p.edges[E[j]]:
                deps.append(([], [], up, j, ("edge", E[j])))
            elif u in p.face_vertices[F[j - 1]]:
                deps.append(([], [], up, j, ("face", F[j - 1])))
                led = self._ledge(F[j - 1], u, b)
                if led is not None:
                    deps.append(([led[0]], [led[1]], led[0], j, ("face", F[j - 1])))
        # arrivals: (suffix corners, suffix carriers, point, j, last carrier)
        arrs = []
        for j in range(K):
            for v in targets:
                vp = vertex_point(p, v)
                if v in p.edges[E[j]]:
                    arrs.append(([vp], [], vp, j, ("edge", E[j])))
                elif v in p.face_vertices[F[j]]:
                    arrs.append(([vp], [], vp, j, ("face", F[j])))
                    led = self._ledge(F[j], v, b + 1)
                    if led is not None:
                        arrs.append(([led[0], vp], [led[1]], led[0], j, ("face", F[j])))
        out = []

        def add(corners, carriers, k, tags, combo=()):
            if any(c1 == c2 and c1[0] == "edge" for c1, c2 in zip(carriers, carriers[1:])):
                return  # a corner inside a straight run along one edge
            along = sum(c[0] == "edge" for c in carriers)
            ledges = sum(1 for c, tg in zip(corners, tags) if tg[0] == "level" and not c.is_vertex)
            out.append(_Piece(up, corners, carriers, tags, k, along,
                              _seg_len([up] + corners), ledges, combo))

        if w == 0:
            seen = set()
            for pre, pre_c, P, _, _ in deps:
                for suf, suf_c, Q, _, _ in arrs:
                    key = (id(P), id(Q))
                    if key in seen:
                        continue
                    seen.add(key)
                    for car in common_carriers(p, P, Q):
                        corners = pre + suf
                        carriers = pre_c + [car] + suf_c
                        tags = self._tags(b, pre, [], suf)
                        add(corners, carriers, 0, tags)
        for di, (pre, pre_c, P, s, first) in enumerate(deps):
            for ai, (suf, suf_c, Q, t, last) in enumerate(arrs):
                if combos is not None and (di, ai) not in combos:
                    continue
                k = (t - s) % K + 1 + w * K
                for prof in ([k / (k + 1)] if fractions is None else fractions):
                    f1, phi = prof if isinstance(prof, tuple) else (prof / k, prof)
                    mid = []
                    carriers = pre_c + [first]
                    for i in range(1, k + 1):
                        e = E[(s + i - 1) % K]
                        frac = phi if k == 1 else f1 + (i - 1) / (k - 1) * (phi - f1)
                        h = zl + frac * (zh - zl)
                        a, c = p.edges[e].tolist()
                        za, zc = p.vertices[a, 2], p.vertices[c, 2]
                        mid.append(p.point("edge", e, (h - za) / (zc - za)))
                        if i < k:
                            carriers.append(("face", F[(s + i - 1) % K]))
                    carriers = carriers + [last] + suf_c
                    add(pre + mid + suf, carriers, k, self._tags(b, pre, mid, suf), (di, ai))
        if not out:
            raise ExitNotAdjacent(f"no way across band {b} from vertex {u}")
        return out

    @staticmethod
    def _tags(b, pre, mid, suf):
        return [("level", b)] * len(pre) + [("band", b)] * len(mid) + [("level", b + 1)] * len(suf)

    def best_piece(self, b: int, u: int) -> _Piece:
        key = (b, u)
        if key not in self._best:
            pieces = sorted(self.band_pieces(b, u, self.w), key=_Piece.cost)
            best = next((c for c in pieces if c.is_ok(self.p, self.tol)), None)
            if best is None:
                best = pieces[0]
                self._warn(f"band {b}: no fully ccw crossing from vertex {u}")
            self._best[key] = best
        return self._best[key]

    # -- one level ----------------------------------------------------------
    def level_cycle(self, L: int, entry: int) -> tuple:
        """Corners, carriers and tags of the ccw walk around level ``L`` from ``entry``."""
        p = self.p
        group = self.levels[L]
        if len(group) == 1:
            return [], [], []
        z = p.vertices[:, 2]
        zL = self.zmean[L]
        pts = [vertex_point(p, v) for v in group]
        for e, (a, c) in enumerate(p.edges.tolist()):
            if p.flat_edges[e]:
                continue
            la, lc = self.lev[a], self.lev[c]
            if min(la, lc) < L < max(la, lc):
                pts.append(p.point("edge", e, (zL - z[a]) / (z[c] - z[a])))
        xy = np.array([q.position[:2] for q in pts])
        cen = xy.mean(axis=0)
        ang = np.round(np.arctan2(xy[:, 1] - cen[1], xy[:, 0] - cen[0]), 12)
        order = [pts[i] for i in np.lexsort((np.arange(len(pts)), ang))]
        k = next(i for i, q in enumerate(order) if q.is_vertex and q.index == entry)
        order = order[k:] + order[:k]
        pending = set(group) - {entry}
        corners, carriers, tags = [], [], []
        prev = order[0]
        for q in order[1:]:
            if not pending:
                break
            cs = common_carriers(p, prev, q)
            if not cs:
                raise ExitNotAdjacent(f"level {L}: consecutive slice corners share no face")
            good = [c for c in cs if is_ccw_advance(p, prev, q, c, self.tol)]
            if not good:
                self._warn(f"level {L}: hop is not ccw")
            carriers.append((good or cs)[0])
            corners.append(q)
            tags.append(("level", L))
            if q.is_vertex:
                pending.discard(q.index)
            prev = q
        return corners, carriers, tags

    def _warn(self, msg: str):
        log.warning(msg)
        self.warnings.append(msg)

    # -- first band ------------------------------------------------------------
    def first_piece(self, u: int, strict: bool) -> _Piece:
        """First band: the shortest ccw chain from the bottom vertex whose
        turns toward the second vertex are all nonacute, scanning the heights
        of its corners."""
        p = self.p
        base = sorted(self.band_pieces(0, u, self.w), key=lambda c: (c.ledges, c.length))
        combos = []
        for c in base:
            if c.combo and c.combo not in combos:
                combos.append(c.combo)
        combos = set(combos[:FIRST_BAND_COMBOS])
        fractions = [i / FIRST_BAND_STEPS for i in range(1, FIRST_BAND_STEPS)]
        fractions += [(phi * lo, phi) for phi in fractions[::16] for lo in FIRST_CORNER_LOW]
        pieces = self.band_pieces(0, u, self.w, fractions, combos)
        pieces.sort(key=lambda c: (c.ledges, c.length, _edge_key(c)))
        for c in pieces:
            if c.is_ok(p, self.tol) and self._sharpest_turn(c) >= math.pi / 2 - NONACUTE_EPS:
                return c
        if strict:
            raise NoNonacuteTurn("no first chain turns nonacutely toward the second vertex")
        pool = [c for c in pieces if c.is_ok(p, self.tol)] or pieces
        best = max(pool, key=lambda c: (self._sharpest_turn(c), -c.length))
        self._warn(f"first band: sharpest turn toward vertex {best.end.index} is "
                   f"{self._sharpest_turn(best):.6g} rad (acute)")
        return best

    def _sharpest_turn(self, c: _Piece) -> float:
        pts = [c.start] + c.corners
        return min((min(turn_sides(self.p, pts[i], pts[i - 1], pts[i + 1]))
                    for i in range(1, len(pts) - 1)), default=math.pi)

    def build(self, strict: bool) -> SpiralPath:
        p = self.p
        v1 = min(self.levels[0])
        corners = [vertex_point(p, v1)]
        carriers, tags = [], [("level", 0)]
        cur = v1

        def extend(cs, cars, tg):
            nonlocal cur
            corners.extend(cs)
            carriers.extend(cars)
            tags.extend(tg)
            if cs:
                cur = cs[-1].index

        extend(*self.level_cycle(0, v1))
        for b in range(len(self.levels) - 1):
            if b == 0 and len(self.levels[0]) == 1:
                piece = self.first_piece(cur, strict)
            else:
                piece = self.best_piece(b, cur)
            extend(piece.corners, piece.carriers, piece.tags)
            extend(*self.level_cycle(b + 1, cur))
        return SpiralPath(corners, carriers, tags, self.w, self.levels, list(self.warnings))


def build_spiral(p: Polyhedron, winding: int = 0, height_tol: Optional[float] = None,
                 strict: bool = False) -> SpiralPath:
    """Cut path through every vertex of a convex polyhedron, bottom to top.

    ``winding`` adds that many extra full turns in every band.
    """
    if winding < 0:
        raise ValueError("winding must be non-negative")
    if p.n_vertices < 3:
        raise SpiralError("need at least three vertices")
    return _Builder(p, winding, height_tol).build(strict)


# ---------------------------------------------------------------------------
# validation

@dataclass
class SpiralReport:
    z_monotone: bool = True
    hamiltonian: bool = True
    simple: bool = True
    ccw: bool = True
    first_nonmonotone: Optional[int] = None
    first_noncrossing: Optional[int] = None  # first segment that crosses another
    first_non_ccw: Optional[int] = None
    missing: list = field(default_factory=list)
    repeated: list = field(default_factory=list)
    endpoint_problem: str = ""

    @property
    def ok(self) -> bool:
        return self.z_monotone and self.hamiltonian and self.simple and self.ccw

    def to_json(self) -> dict:
        return {
            "ok": self.ok, "z_monotone": self.z_monotone, "hamiltonian": self.hamiltonian,
            "simple": self.simple, "ccw": self.ccw,
            "first_nonmonotone": self.first_nonmonotone,
            "first_crossing": self.first_noncrossing,
            "first_non_ccw": self.first_non_ccw,
            "missing": list(self.missing), "repeated": list(self.repeated),
            "endpoint_problem": self.endpoint_problem,
        }


def _face_frame(p: Polyhedron, f: int):
    t = p.face_tris[f][0]
    n = p.normals[t]
    a = p.vertices[p.triangles[t, 0]]
    ex = p.vertices[p.triangles[t, 1]] - a
    ex = ex / np.linalg.norm(ex)
    ey = np.cross(n, ex)
    return a, ex, ey


def _segment_faces(p: Polyhedron, carrier) -> list:
    kind, i = carrier
    if kind == "face":
        return [i]
    return sorted({int(p.face_ids[t]) for t in p.edge_tris[i]})


def surface_crossings(p: Polyhedron, s: SpiralPath) -> list:
    """Pairs ``(i, j)`` of segments that meet on the surface other than at a
    shared corner of consecutive segments."""
    from .predicates import orient2d, segments_intersect

    by_face: dict = {}
    for i, car in enumerate(s.carriers):
        for f in _segment_faces(p, car):
            by_face.setdefault(f, []).append(i)
    xyz = s.positions()
    found = set()
    for f, segs in by_face.items():
        if len(segs) < 2:
            continue
        o, ex, ey = _face_frame(p, f)
        uv = np.stack([(xyz - o) @ ex, (xyz - o) @ ey], axis=1)
        for x in range(len(segs)):
            i = segs[x]
            for y in range(x + 1, len(segs)):
                j = segs[y]
                a, b, c, d = uv[i], uv[i + 1], uv[j], uv[j + 1]
                if abs(i - j) == 1:
                    # consecutive: only a fold-back along the shared corner counts
                    shared = b if j == i + 1 else a
                    other_i = a if j == i + 1 else b
                    other_j = d if j == i + 1 else c
                    if (orient2d(other_i, shared, other_j) == 0
                            and np.dot(other_i - shared, other_j - shared) > 0):
                        found.add((min(i, j), max(i, j)))
                    continue
                if segments_intersect(a, b, c, d)[0]:
                    found.add((i, j))
    return sorted(found)


def validate_spiral(p: Polyhedron, s: SpiralPath, height_tol: Optional[float] = None) -> SpiralReport:
    tol = p.default_height_tol if height_tol is None else height_tol
    rep = SpiralReport()
    z = [c.z for c in s.corners]
    for i in range(len(z) - 1):
        if z[i + 1] < z[i] - tol:
            rep.z_monotone = False
            rep.first_nonmonotone = i
            break
    seen: dict = {}
    for c in s.corners:
        if c.is_vertex:
            seen[c.index] = seen.get(c.index, 0) + 1
    rep.missing = [v for v in range(p.n_vertices) if v not in seen]
    rep.repeated = sorted(v for v, n in seen.items() if n > 1)
    zs = p.vertices[:, 2]
    first, last = s.corners[0], s.corners[-1]
    if not (first.is_vertex and zs[first.index] <= zs.min() + tol):
        rep.endpoint_problem = "path does not start at a bottommost vertex"
    elif not (last.is_vertex and zs[last.index] >= zs.max() - tol):
        rep.endpoint_problem = "path does not end at a topmost vertex"
    rep.hamiltonian = not (rep.missing or rep.repeated or rep.endpoint_problem)
    pos = s.positions()
    scale = max(p.diameter, 1.0) * 1e-12
    crossings = surface_crossings(p, s)
    for i in range(len(pos)):
        d = np.linalg.norm(pos[i + 2:] - pos[i], axis=1)
        hit = np.flatnonzero(d <= scale)
        if len(hit):
            crossings.append((max(i - 1, 0), i + 2 + int(hit[0]) - 1))
    if crossings:
        rep.simple = False
        rep.first_noncrossing = min(max(c) for c in crossings)
    for i, car in enumerate(s.carriers):
        if not is_ccw_advance(p, s.corners[i], s.corners[i + 1], car, tol):
            rep.ccw = False
            rep.first_non_ccw = i
            break
    return rep


def upside_down(p: Polyhedron) -> Polyhedron:
    """Half-turn about the y axis: negates z (and x, to stay a rigid motion).

    Vertex, edge and face indices are unchanged, so corner hosts carry over.
    """
    v = p.vertices * np.array([-1.0, 1.0, -1.0])
    return Polyhedron(v, p.triangles.copy(), p.face_ids.copy(), p.convex, p.name)


def reversed_path(q: Polyhedron, s: SpiralPath) -> SpiralPath:
    """The corners of ``s`` in reverse order, placed on ``q`` (same indexing)."""
    corners = [q.point(c.kind, c.index, c.t) for c in reversed(s.corners)]
    return SpiralPath(corners, list(reversed(s.carriers)), list(reversed(s.tags)), s.winding)
