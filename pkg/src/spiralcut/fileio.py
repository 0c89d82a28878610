"""OFF / OBJ mesh reading and writing, and round-trip-safe number formatting."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .mesh import Polyhedron, from_polygons


def fmt(x: float) -> str:
    """Shortest decimal that reads back to the same double."""
    x = float(x)
    if x == 0.0:
        return "0"
    return repr(x)


def _tokens(text: str):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line.split()


def parse_off(text: str):
    rows = list(_tokens(text))
    if not rows:
        raise ValueError("empty OFF file")
    head = rows[0]
    if head[0].upper() == "OFF":
        head = head[1:] or rows[1]
        body = rows[1:] if rows[0][1:] else rows[2:]
    else:
        body = rows[1:]
    nv, nf = int(head[0]), int(head[1])
    V = np.array([[float(t) for t in r[:3]] for r in body[:nv]])
    faces = []
    for r in body[nv:nv + nf]:
        k = int(r[0])
        faces.append([int(t) for t in r[1:1 + k]])
    if len(V) != nv or len(faces) != nf:
        raise ValueError("OFF file is truncated")
    return V, faces


def parse_obj(text: str):
    V, faces = [], []
    for r in _tokens(text):
        if r[0] == "v":
            V.append([float(t) for t in r[1:4]])
        elif r[0] == "f":
            idx = [int(t.split("/")[0]) for t in r[1:]]
            faces.append([i - 1 if i > 0 else len(V) + i for i in idx])
    return np.array(V, dtype=float), faces


def read_mesh(path, convex: bool = True) -> Polyhedron:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".obj":
        V, faces = parse_obj(text)
    else:
        V, faces = parse_off(text)
    return from_polygons(V, faces, convex=convex, name=path.stem)


def face_loop(p: Polyhedron, f: int) -> list:
    """Vertices of face ``f`` in ccw order seen from outside."""
    directed = set()
    for t in p.face_tris[f]:
        a, b, c = p.triangles[t].tolist()
        directed.update([(a, b), (b, c), (c, a)])
    nxt = {a: b for a, b in directed if (b, a) not in directed}
    start = min(nxt)
    loop = [start]
    while nxt[loop[-1]] != start:
        loop.append(nxt[loop[-1]])
    return loop


def _faces(p: Polyhedron) -> list:
    return [face_loop(p, f) for f in sorted(p.face_tris)]


def off_text(p: Polyhedron) -> str:
    """OFF with one polygon per planar face."""
    faces = _faces(p)
    out = ["OFF", f"{len(p.vertices)} {len(faces)} 0"]
    out += [" ".join(fmt(c) for c in v) for v in p.vertices]
    out += [" ".join(str(i) for i in [len(f)] + list(f)) for f in faces]
    return "\n".join(out) + "\n"


def obj_text(p: Polyhedron) -> str:
    faces = _faces(p)
    out = ["v " + " ".join(fmt(c) for c in v) for v in p.vertices]
    out += ["f " + " ".join(str(i + 1) for i in f) for f in faces]
    return "\n".join(out) + "\n"


def write_mesh(p: Polyhedron, path) -> None:
    path = Path(path)
    path.write_text(obj_text(p) if path.suffix.lower() == ".obj" else off_text(p))
