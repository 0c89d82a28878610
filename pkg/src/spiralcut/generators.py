"""Deterministic constructors for every test body: Platonic and Archimedean
solids, hemiballs, polyhedra of revolution, random hulls and geodesic domes."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import BadCount, NonConvexProfile, SelfIntersectingProfile
from .mesh import Polyhedron, convex_hull, from_polygons

PHI = (1 + math.sqrt(5)) / 2


class SolidKind(str, Enum):
    TETRAHEDRON = "tetrahedron"
    CUBE = "cube"
    OCTAHEDRON = "octahedron"
    DODECAHEDRON = "dodecahedron"
    ICOSAHEDRON = "icosahedron"
    TRUNCATED_TETRAHEDRON = "truncated_tetrahedron"
    CUBOCTAHEDRON = "cuboctahedron"
    TRUNCATED_CUBE = "truncated_cube"
    TRUNCATED_OCTAHEDRON = "truncated_octahedron"
    RHOMBICUBOCTAHEDRON = "rhombicuboctahedron"
    TRUNCATED_CUBOCTAHEDRON = "truncated_cuboctahedron"
    SNUB_CUBE = "snub_cube"
    ICOSIDODECAHEDRON = "icosidodecahedron"
    TRUNCATED_DODECAHEDRON = "truncated_dodecahedron"
    TRUNCATED_ICOSAHEDRON = "truncated_icosahedron"
    RHOMBICOSIDODECAHEDRON = "rhombicosidodecahedron"
    TRUNCATED_ICOSIDODECAHEDRON = "truncated_icosidodecahedron"
    SNUB_DODECAHEDRON = "snub_dodecahedron"


PLATONIC = list(SolidKind)[:5]
ARCHIMEDEAN = list(SolidKind)[5:]

ALIASES = {
    "great_rhombicosidodecahedron": SolidKind.TRUNCATED_ICOSIDODECAHEDRON,
    "great_rhombicuboctahedron": SolidKind.TRUNCATED_CUBOCTAHEDRON,
    "hexahedron": SolidKind.CUBE,
}


def solid_kind(name: Union[str, SolidKind]) -> SolidKind:
    if isinstance(name, SolidKind):
        return name
    key = name.strip().lower().replace("-", "_").replace(" ", "_")
    return ALIASES.get(key) or SolidKind(key)


def _signs(v, parity=None):
    """All sign flips of the nonzero entries; ``parity`` restricts the number
    of minus signs to 'even' or 'odd' (counted over all three slots)."""
    out = []
    for s in itertools.product((1, -1), repeat=3):
        if any(v[i] == 0 and s[i] < 0 for i in range(3)):
            continue
        if parity is not None and (sum(x < 0 for x in s) % 2 == 0) != (parity == "even"):
            continue
        out.append(tuple(v[i] * s[i] for i in range(3)))
    return out


def _even_perms(v):
    return [(v[0], v[1], v[2]), (v[1], v[2], v[0]), (v[2], v[0], v[1])]


def _odd_perms(v):
    return [(v[1], v[0], v[2]), (v[0], v[2], v[1]), (v[2], v[1], v[0])]


def _all_perms(v):
    return _even_perms(v) + _odd_perms(v)


def _expand(bases, perms, parity=None):
    pts = set()
    for b in bases:
        for q in perms(b):
            for s in _signs(q, parity):
                pts.add(tuple(round(x, 14) + 0.0 for x in s))
    return sorted(pts)


def _plus_parity(v, count_parity):
    # sign patterns by number of plus signs (entries are nonzero)
    out = []
    for s in itertools.product((1, -1), repeat=3):
        if (sum(x > 0 for x in s) % 2 == 0) == (count_parity == "even"):
            out.append(tuple(v[i] * s[i] for i in range(3)))
    return out


def _snub_cube_points():
    t = np.roots([1, -1, -1, -1])
    t = float(t[np.isreal(t)].real[0])
    base = (1.0, 1.0 / t, t)
    pts = []
    for q in _even_perms(base):
        pts += _plus_parity(q, "even")
    for q in _odd_perms(base):
        pts += _plus_parity(q, "odd")
    return pts


def _snub_dodecahedron_points():
    xi = np.roots([1, 0, -2, -PHI])
    xi = float(xi[np.isreal(xi)].real.max())
    a = xi - 1 / xi
    b = xi * PHI + PHI ** 2 + PHI / xi
    bases = [
        (2 * a, 2.0, 2 * b),
        (a + b / PHI + PHI, -a * PHI + b + 1 / PHI, a / PHI + b * PHI - 1),
        (a + b / PHI - PHI, a * PHI - b + 1 / PHI, a / PHI + b * PHI + 1),
        (-a / PHI + b * PHI + 1, -a + b / PHI - PHI, a * PHI + b - 1 / PHI),
        (-a / PHI + b * PHI - 1, a - b / PHI - PHI, a * PHI + b + 1 / PHI),
    ]
    pts = []
    for base in bases:
        for q in _even_perms(base):
            pts += _plus_parity(q, "even")
    return pts


def _solid_points(kind: SolidKind):
    p, r2 = PHI, math.sqrt(2)
    K = SolidKind
    if kind is K.TETRAHEDRON:
        return [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    if kind is K.CUBE:
        return _expand([(1, 1, 1)], _even_perms)
    if kind is K.OCTAHEDRON:
        return _expand([(1, 0, 0)], _all_perms)
    if kind is K.DODECAHEDRON:
        return _expand([(1, 1, 1), (0, 1 / p, p)], _even_perms)
    if kind is K.ICOSAHEDRON:
        return _expand([(0, 1, p)], _even_perms)
    if kind is K.TRUNCATED_TETRAHEDRON:
        return _expand([(3, 1, 1)], _all_perms, parity="even")
    if kind is K.CUBOCTAHEDRON:
        return _expand([(1, 1, 0)], _all_perms)
    if kind is K.TRUNCATED_CUBE:
        return _expand([(r2 - 1, 1, 1)], _all_perms)
    if kind is K.TRUNCATED_OCTAHEDRON:
        return _expand([(0, 1, 2)], _all_perms)
    if kind is K.RHOMBICUBOCTAHEDRON:
        return _expand([(1, 1, 1 + r2)], _all_perms)
    if kind is K.TRUNCATED_CUBOCTAHEDRON:
        return _expand([(1, 1 + r2, 1 + 2 * r2)], _all_perms)
    if kind is K.SNUB_CUBE:
        return _snub_cube_points()
    if kind is K.ICOSIDODECAHEDRON:
        return _expand([(0, 0, p)], _all_perms) + _expand([(0.5, p / 2, p * p / 2)], _even_perms)
    if kind is K.TRUNCATED_DODECAHEDRON:
        return _expand([(0, 1 / p, 2 + p), (1 / p, p, 2 * p), (p, 2, p * p)], _even_perms)
    if kind is K.TRUNCATED_ICOSAHEDRON:
        return _expand([(0, 1, 3 * p), (1, 2 + p, 2 * p), (p, 2, p ** 3)], _even_perms)
    if kind is K.RHOMBICOSIDODECAHEDRON:
        return _expand([(1, 1, p ** 3), (p * p, p, 2 * p), (2 + p, 0, p * p)], _even_perms)
    if kind is K.TRUNCATED_ICOSIDODECAHEDRON:
        return _expand([(1 / p, 1 / p, 3 + p), (2 / p, p, 1 + 2 * p), (1 / p, p * p, -1 + 3 * p),
                        (2 * p - 1, 2, 2 + p), (p, 3, 2 * p)], _even_perms)
    if kind is K.SNUB_DODECAHEDRON:
        return _snub_dodecahedron_points()
    raise ValueError(kind)


def make_solid(kind: Union[str, SolidKind], scale: float = 1.0) -> Polyhedron:
    """Platonic or Archimedean solid centred at the origin with circumradius ``scale``."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    kind = solid_kind(kind)
    pts = np.array(_solid_points(kind), dtype=float)
    pts *= scale / np.linalg.norm(pts, axis=1).max()
    return convex_hull(pts, name=kind.value)


# ---------------------------------------------------------------------------

def hemiball(n: int) -> Polyhedron:
    """Hull of ``n`` points on the unit base circle and ``n/2`` on the upright
    semicircle in the xz-plane (the two shared rim points counted once)."""
    if n < 6 or n % 2:
        raise BadCount(f"hemiball needs an even n >= 6, got {n}")
    th = 2 * np.pi * np.arange(n) / n
    base = np.c_[np.cos(th), np.sin(th), np.zeros(n)]
    m = n // 2
    ph = np.pi * np.arange(m) / (m - 1)
    arc = np.c_[np.cos(ph), np.zeros(m), np.abs(np.sin(ph))][1:-1]
    base[np.abs(base) < 1e-15] = 0.0
    return convex_hull(np.vstack([base, arc]), name=f"hemiball{n}")


def random_sphere_points(n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_sphere_hull(n: int, seed: int) -> Polyhedron:
    if n < 4:
        raise BadCount("need at least 4 points")
    rng = np.random.default_rng(seed)
    return convex_hull(random_sphere_points(n, rng), name=f"random{n}_s{seed}")


def icosphere_points(frequency: int) -> np.ndarray:
    ico = make_solid(SolidKind.ICOSAHEDRON)
    V = ico.vertices
    keys = {}
    pts = []
    for a, b, c in ico.triangles.tolist():
        for i in range(frequency + 1):
            for j in range(frequency + 1 - i):
                k = frequency - i - j
                q = (i * V[a] + j * V[b] + k * V[c]) / frequency
                q = q / np.linalg.norm(q)
                key = tuple(np.round(q, 9))
                if key not in keys:
                    keys[key] = len(pts)
                    pts.append(q)
    return np.array(pts)


def geodesic_dome(frequency: int, perturb: float = 0.0, seed: int = 0) -> Polyhedron:
    """Icosahedral geodesic sphere; vertices jittered by at most ``perturb``
    (uniform in a ball) and re-hulled."""
    if frequency < 1:
        raise BadCount("frequency must be >= 1")
    if not 0 <= perturb < 0.1:
        raise ValueError("perturb must lie in [0, 0.1)")
    pts = icosphere_points(frequency)
    if perturb > 0:
        rng = np.random.default_rng(seed)
        d = rng.standard_normal(pts.shape)
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        r = perturb * rng.random(len(pts)) ** (1 / 3)
        pts = pts + d * r[:, None]
    return convex_hull(pts, name=f"dome{frequency}_p{perturb}_s{seed}")


def distorted_dodecahedron(seed: int = 0, amount: float = 0.08) -> Polyhedron:
    """Dodecahedron with jittered vertices so that no two faces stay parallel."""
    rng = np.random.default_rng(seed)
    pts = make_solid(SolidKind.DODECAHEDRON).vertices
    pts = pts + amount * rng.uniform(-1, 1, pts.shape)
    return convex_hull(pts, name=f"distorted_dodecahedron_s{seed}")


def doubly_covered_polygon(n: int, radius: float = 1.0) -> Polyhedron:
    """Flat regular n-gon in the xy-plane, covered on both sides."""
    if n < 3:
        raise BadCount("polygon needs n >= 3")
    th = 2 * np.pi * np.arange(n) / n
    V = np.c_[radius * np.cos(th), radius * np.sin(th), np.zeros(n)]
    top = list(range(n))
    bottom = [1, 0] + list(range(n - 1, 1, -1))
    return from_polygons(V, [top, bottom], convex=True, name=f"flat{n}")


# ---------------------------------------------------------------------------
# polyhedra of revolution

@dataclass(frozen=True)
class ProfileCurve:
    """Profile points ``(r, z)`` with r >= 0, listed bottom to top."""
    points: tuple

    def __post_init__(self):
        pts = tuple((float(r), float(z)) for r, z in self.points)
        if len(pts) < 2:
            raise ValueError("profile needs at least two points")
        if any(r < 0 for r, _ in pts):
            raise ValueError("profile radii must be non-negative")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_text(cls, text: str) -> "ProfileCurve":
        pts = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                r, z = line.replace(",", " ").split()[:2]
                pts.append((float(r), float(z)))
        return cls(tuple(pts))

    @classmethod
    def load(cls, path) -> "ProfileCurve":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        return "".join(f"{r!r} {z!r}\n" for r, z in self.points)

    def is_convex(self, tol: float = 1e-12) -> bool:
        """Convex as a closed chain together with the axis segment."""
        pts = list(self.points)
        if pts[0][0] > 0:
            pts.insert(0, (0.0, pts[0][1]))
        if pts[-1][0] > 0:
            pts.append((0.0, pts[-1][1]))
        n = len(pts)
        sign = 0
        for i in range(n):
            (x0, y0), (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
            cr = (x1 - x0) * (y2 - y1) - (y1 - y0) * (x2 - x1)
            if abs(cr) <= tol:
                continue
            s = 1 if cr > 0 else -1
            if sign and s != sign:
                return False
            sign = s
        return True

    def is_z_monotone(self) -> bool:
        zs = [z for _, z in self.points]
        return all(b > a for a, b in zip(zs, zs[1:]))


def default_profile() -> ProfileCurve:
    """The shipped reconstruction ``C*`` of the revolution-figure profile."""
    return ProfileCurve.from_text(resources.files("spiralcut.data").joinpath("cstar.txt").read_text())


def peanut_profile() -> ProfileCurve:
    return ProfileCurve.from_text(resources.files("spiralcut.data").joinpath("peanut.txt").read_text())


def _revolution_mesh(curve: ProfileCurve, n_spin: int, convex: bool, name: str) -> Polyhedron:
    pts = curve.points
    if any(r == 0 for r, _ in pts[1:-1]):
        raise SelfIntersectingProfile("interior profile points may not lie on the axis")
    if not curve.is_z_monotone():
        raise SelfIntersectingProfile("profile must be strictly increasing in z")
    th = 2 * np.pi * np.arange(n_spin) / n_spin
    cs, sn = np.cos(th), np.sin(th)
    verts, rings = [], []
    for r, z in pts:
        if r == 0:
            rings.append([len(verts)])
            verts.append((0.0, 0.0, z))
        else:
            rings.append(list(range(len(verts), len(verts) + n_spin)))
            verts.extend((r * c, r * s, z) for c, s in zip(cs, sn))
    if n_spin == 2:
        right = [ring[0] for ring in rings]
        left = [ring[-1] for ring in rings if len(ring) > 1]
        loop = right + left[::-1]
        V = np.array(verts)
        # front face seen from -y is ccw when the loop is listed as built
        k = 1
        back = loop[k:] + loop[:k]
        front = back[::-1]
        return from_polygons(V, [front, back], convex=convex, name=name)
    faces = []
    first, last = rings[0], rings[-1]
    if len(first) > 1:
        faces.append(first[::-1])
    for lo, hi in zip(rings, rings[1:]):
        for j in range(n_spin):
            j1 = (j + 1) % n_spin
            if len(lo) == 1:
                faces.append([lo[0], hi[j1], hi[j]])
            elif len(hi) == 1:
                faces.append([lo[j], lo[j1], hi[0]])
            else:
                faces.append([lo[j], lo[j1], hi[j1], hi[j]])
    if len(last) > 1:
        faces.append(list(last))
    return from_polygons(np.array(verts), faces, convex=convex, name=name)


def revolution(curve: ProfileCurve, n_spin: int) -> Polyhedron:
    """Convex polyhedron of revolution: ``n_spin`` copies of a convex profile.

    Lateral trapezoids are split by the diagonal from ring k, copy j up to
    ring k+1, copy j+1 (the ccw-slanting one).
    """
    if n_spin < 2:
        raise BadCount("n_spin must be >= 2")
    if not curve.is_convex():
        raise NonConvexProfile("profile curve is not convex")
    return _revolution_mesh(curve, n_spin, True, f"revolution_n{n_spin}")


def revolution_surface_nonconvex(curve: ProfileCurve, n_spin: int) -> Polyhedron:
    """Surface of revolution built directly from the profile, no hull."""
    if n_spin < 3:
        raise BadCount("n_spin must be >= 3")
    p = _revolution_mesh(curve, n_spin, curve.is_convex(), f"revolution_surface_n{n_spin}")
    return p


def reflex_ring_edges(p: Polyhedron) -> list:
    """Edges whose dihedral angle is reflex (outward normals fold inward)."""
    out = []
    for e, (a, b) in enumerate(p.edges.tolist()):
        t1, t2 = p.edge_tris[e]
        c2 = [w for w in p.triangles[t2].tolist() if w not in (a, b)][0]
        if p.normals[t1] @ (p.vertices[c2] - p.vertices[a]) > 1e-12 * p.diameter:
            out.append(e)
    return out


GENERATORS = ("solid", "hemiball", "revolution", "peanut", "random", "dome",
              "distorted_dodecahedron", "flat")


def _profile(value) -> ProfileCurve:
    if value in (None, "", "cstar"):
        return default_profile()
    if value == "peanut":
        return peanut_profile()
    return ProfileCurve.load(value)


def from_spec(spec: str) -> Polyhedron:
    """Build a body from ``name[:key=value,...]``.

    ``name`` is a solid name or one of ``GENERATORS``; for example
    ``cube``, ``hemiball:n=16``, ``revolution:n_spin=6,profile=cstar``,
    ``random:n=20,seed=3``, ``dome:frequency=3,perturb=0.01,seed=0``.
    """
    name, _, rest = spec.partition(":")
    kw = {}
    for item in filter(None, rest.split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise ValueError(f"expected key=value in generator spec, got {item!r}")
        kw[k.strip()] = v.strip()
    name = name.strip().lower()

    def take(key, conv, default=None):
        if key in kw:
            return conv(kw.pop(key))
        if default is None:
            raise ValueError(f"generator {name!r} needs {key}=")
        return default

    if name == "solid":
        name = take("name", str)
    if name == "hemiball":
        p = hemiball(take("n", int))
    elif name == "revolution":
        p = revolution(_profile(kw.pop("profile", None)), take("n_spin", int))
    elif name == "peanut":
        p = revolution_surface_nonconvex(peanut_profile(), take("n_spin", int))
    elif name == "random":
        p = random_sphere_hull(take("n", int), take("seed", int, 0))
    elif name == "dome":
        p = geodesic_dome(take("frequency", int), take("perturb", float, 0.0), take("seed", int, 0))
    elif name == "distorted_dodecahedron":
        p = distorted_dodecahedron(take("seed", int, 0), take("amount", float, 0.08))
    elif name == "flat":
        p = doubly_covered_polygon(take("n", int))
    else:
        try:
            kind = solid_kind(name)
        except ValueError:
            raise ValueError(f"unknown generator {name!r}") from None
        p = make_solid(kind, take("scale", float, 1.0))
    if kw:
        raise ValueError(f"unknown generator parameters: {sorted(kw)}")
    return p
