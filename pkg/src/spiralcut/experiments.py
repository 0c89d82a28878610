"""Seeded experiment harness: overlap statistics over random hulls, hemiball
and dome orientation sweeps, the n_spin threshold of polyhedra of revolution,
and the orientation probe set used for the named solids.

Every run is a pure function of its parameters and seed. Trials may run in
worker processes; results are keyed by trial index and merged in order.
"""
from __future__ import annotations

import contextlib
import csv
import io
import json
import logging
import signal
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import generators as gen
from .errors import ExperimentError, MonotonicityViolation, SpiralCutError, TrialTimeout
from .mesh import Polyhedron, convex_hull, orient, random_rotation, rotation_to_vertical
from .overlap import boundary_polygon, check_simple
from .spiral import build_spiral
from .unfold import unfold

log = logging.getLogger(__name__)

TRIAL_TIME_CAP = 10.0  # seconds
N_PROBES = 20


@dataclass
class TrialRecord:
    generator: str
    params: dict
    seed: int
    rotation: list  # 3x3, row major
    winding: int = 0
    simple: Optional[bool] = None
    n_crossings: int = 0
    n_corners: int = 0
    label: str = ""
    error: Optional[str] = None
    runtime: float = 0.0  # not part of the JSON form; it varies between runs
    # kept on request for oracle cross-checks; not part of the JSON form either
    boundary: Optional[np.ndarray] = field(default=None, repr=False)
    pairs: Optional[set] = field(default=None, repr=False)

    @property
    def excluded(self) -> bool:
        return self.error is not None

    @property
    def overlaps(self) -> bool:
        return self.simple is False

    def to_json(self) -> dict:
        return {"generator": self.generator, "params": dict(self.params), "seed": self.seed,
                "label": self.label, "rotation": [list(map(float, r)) for r in self.rotation],
                "winding": self.winding, "simple": self.simple,
                "n_crossings": self.n_crossings, "n_corners": self.n_corners,
                "error": self.error}


@dataclass
class CurveRow:
    n: int
    trials: int
    overlap_fraction: float
    excluded: int = 0


@dataclass
class OverlapCurve:
    rows: list
    seed: int = 0
    records: list = field(default_factory=list)

    def __post_init__(self):
        for r in self.rows:
            if r.trials <= 0 or not 0.0 <= r.overlap_fraction <= 1.0:
                raise ExperimentError(f"bad curve row {r}")

    @property
    def ns(self) -> list:
        return [r.n for r in self.rows]

    @property
    def fractions(self) -> list:
        return [r.overlap_fraction for r in self.rows]

    def weakly_increasing(self) -> bool:
        f = self.fractions
        return all(b >= a for a, b in zip(f, f[1:]))

    def to_json(self) -> dict:
        return {"seed": self.seed,
                "rows": [{"n": r.n, "trials": r.trials, "overlap_fraction": r.overlap_fraction,
                          "excluded": r.excluded} for r in self.rows],
                "records": [t.to_json() for t in self.records]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "trials", "overlap_fraction", "excluded"])
        for r in self.rows:
            w.writerow([r.n, r.trials, repr(float(r.overlap_fraction)), r.excluded])
        return buf.getvalue()


@dataclass
class SweepResult:
    records: list

    @property
    def counted(self) -> list:
        return [r for r in self.records if not r.excluded]

    @property
    def excluded(self) -> int:
        return sum(r.excluded for r in self.records)

    @property
    def overlap_fraction(self) -> float:
        c = self.counted
        return sum(r.overlaps for r in c) / len(c) if c else float("nan")

    def to_json(self) -> dict:
        return {"overlap_fraction": self.overlap_fraction, "excluded": self.excluded,
                "records": [r.to_json() for r in self.records]}


@dataclass
class ThresholdReport:
    verdicts: dict  # n_spin -> simple
    n0: Optional[int]
    violations: list = field(default_factory=list)  # n_spin values overlapping above n0

    @property
    def persists(self) -> bool:
        return self.n0 is not None and not self.violations

    def to_json(self) -> dict:
        return {"verdicts": {str(k): v for k, v in self.verdicts.items()},
                "n0": self.n0, "violations": list(self.violations), "persists": self.persists}


# ---------------------------------------------------------------------------
# one trial

@contextlib.contextmanager
def _time_cap(seconds: Optional[float]):
    """Raise TrialTimeout after ``seconds`` (main thread only; elsewhere a no-op)."""
    if not seconds or threading.current_thread() is not threading.main_thread() \
            or not hasattr(signal, "setitimer"):
        yield
        return

    def handler(signum, frame):
        raise TrialTimeout(f"trial exceeded {seconds:g} s")

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def run_pipeline(p: Polyhedron, winding: int = 0):
    """Spiral, develop and check one oriented polyhedron."""
    s = build_spiral(p, winding)
    lay = unfold(p, s)
    return s, lay, check_simple(lay)


def run_trial(p0: Polyhedron, R: np.ndarray, record: TrialRecord,
              time_cap: Optional[float] = TRIAL_TIME_CAP, keep_boundary: bool = False) -> TrialRecord:
    t0 = time.perf_counter()
    try:
        with _time_cap(time_cap):
            s, lay, rep = run_pipeline(orient(p0, R), record.winding)
        if keep_boundary:
            record.boundary = boundary_polygon(lay)
            record.pairs = rep.pairs()
        record.simple = rep.simple
        record.n_crossings = len(rep.crossings)
        record.n_corners = len(s.corners)
    except SpiralCutError as exc:
        record.error = f"{type(exc).__name__}: {exc}"
        log.info("trial %s/%s excluded: %s", record.generator, record.seed, record.error)
    record.runtime = time.perf_counter() - t0
    return record


def _map(fn, specs, workers: int) -> list:
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, specs))
    return [fn(s) for s in specs]


# ---------------------------------------------------------------------------
# random hulls

def _random_trial(spec) -> TrialRecord:
    n, trial, seed, winding, cap, keep = spec
    rng = np.random.default_rng([seed, n, trial])
    p0 = convex_hull(gen.random_sphere_points(n, rng), name=f"random{n}")
    R = random_rotation(rng)
    rec = TrialRecord("random", {"n": n, "trial": trial}, seed, R.tolist(), winding)
    return run_trial(p0, R, rec, cap, keep)


def random_overlap_stats(ns, trials: int, seed: int, winding: int = 0, workers: int = 1,
                         time_cap: Optional[float] = TRIAL_TIME_CAP,
                         keep_boundary: bool = False) -> OverlapCurve:
    """Overlap fraction of spiral unfoldings of random hulls of ``n`` points on
    the sphere, each in a uniformly random orientation."""
    ns = [int(n) for n in ns]
    if any(n < 4 for n in ns):
        raise ExperimentError("every n must be >= 4")
    if trials < 1:
        raise ExperimentError("trials must be >= 1")
    specs = [(n, t, seed, winding, time_cap, keep_boundary) for n in ns for t in range(trials)]
    records = _map(_random_trial, specs, workers)
    rows = []
    for n in ns:
        rs = [r for r in records if r.params["n"] == n]
        counted = [r for r in rs if not r.excluded]
        frac = sum(r.overlaps for r in counted) / len(counted) if counted else 0.0
        rows.append(CurveRow(n, len(counted), frac, len(rs) - len(counted)))
    return OverlapCurve(rows, seed, records)


# ---------------------------------------------------------------------------
# orientation sweeps

def _sweep(p0: Polyhedron, generator: str, params: dict, rotations, seed: int,
           winding: int, time_cap, keep_boundary: bool = False) -> SweepResult:
    recs = []
    for label, R in rotations:
        rec = TrialRecord(generator, dict(params), seed, np.asarray(R).tolist(), winding, label=label)
        recs.append(run_trial(p0, R, rec, time_cap, keep_boundary))
    return SweepResult(recs)


def hemiball_orientation_sweep(n: int, orientations: int, seed: int, winding: int = 0,
                               time_cap: Optional[float] = TRIAL_TIME_CAP,
                               keep_boundary: bool = False) -> SweepResult:
    """H_n with its base horizontal, then with (1, 0, 0) vertical, then
    ``orientations`` uniformly random rotations."""
    p0 = gen.hemiball(n)
    rots = [("base_horizontal", np.eye(3)), ("x_vertical", rotation_to_vertical([1.0, 0.0, 0.0]))]
    rots += [(f"random{k}", random_rotation(np.random.default_rng([seed, k])))
             for k in range(orientations)]
    return _sweep(p0, "hemiball", {"n": n}, rots, seed, winding, time_cap, keep_boundary)


def dome_conjecture_run(frequency: int, perturb: float, orientations: int, seed: int,
                        winding: int = 0, time_cap: Optional[float] = TRIAL_TIME_CAP,
                        keep_boundary: bool = False) -> SweepResult:
    """Random orientations of one perturbed geodesic dome."""
    p0 = gen.geodesic_dome(frequency, perturb, seed)
    rots = [(f"random{k}", random_rotation(np.random.default_rng([seed, k])))
            for k in range(orientations)]
    return _sweep(p0, "dome", {"frequency": frequency, "perturb": perturb}, rots, seed,
                  winding, time_cap, keep_boundary)


def revolution_threshold_search(curve, n_spins, raise_on_violation: bool = False) -> ThresholdReport:
    """Verdicts for the upright polyhedra of revolution of ``curve``.

    ``n0`` is the smallest tested n_spin whose unfolding is simple; larger
    tested values that overlap are listed as violations.
    """
    if not curve.is_convex():
        raise gen.NonConvexProfile("profile curve is not convex")
    verdicts = {}
    for n in sorted(int(k) for k in n_spins):
        _, _, rep = run_pipeline(gen.revolution(curve, n))
        verdicts[n] = rep.simple
    n0 = next((n for n, ok in verdicts.items() if ok), None)
    bad = [n for n, ok in verdicts.items() if n0 is not None and n > n0 and not ok]
    if bad:
        msg = f"n_spin {bad} overlap although n_spin={n0} does not"
        if raise_on_violation:
            raise MonotonicityViolation(msg)
        log.warning(msg)
    return ThresholdReport(verdicts, n0, bad)


# ---------------------------------------------------------------------------
# probe orientations for the named solids

def probe_orientations(p: Polyhedron, seed: int = 0, count: int = N_PROBES) -> list:
    """The documented probe set: five canonical orientations, then seeded
    uniformly random ones up to ``count``.

    Canonical: identity; largest face down (lowest id among ties); face 0
    down; vertex 0 down; edge 0 down.
    """
    f0 = min(p.face_tris)
    big = min(p.face_tris, key=lambda f: (-len(p.face_vertices[f]), f))

    def down(v):
        return rotation_to_vertical(-np.asarray(v, float))

    out = [("identity", np.eye(3)),
           ("largest_face_down", down(p.normals[p.face_tris[big][0]])),
           ("face_down", down(p.normals[p.face_tris[f0][0]])),
           ("vertex_down", down(p.vertices[0] - p.vertices.mean(axis=0))),
           ("edge_down", down(p.vertices[p.edges[0]].mean(axis=0) - p.vertices.mean(axis=0)))]
    k = 0
    while len(out) < count:
        out.append((f"tilt{k}", random_rotation(np.random.default_rng([seed, k]))))
        k += 1
    return out[:count]


def first_simple_probe(p: Polyhedron, seed: int = 0, winding: int = 0) -> Optional[TrialRecord]:
    """Walk the probe set in order and return the first simple trial."""
    for label, R in probe_orientations(p, seed):
        rec = run_trial(p, R, TrialRecord(p.name, {}, seed, R.tolist(), winding, label=label), None)
        if rec.simple:
            return rec
    return None


def dumps(obj) -> str:
    """Stable JSON text for experiment results."""
    return json.dumps(obj.to_json() if hasattr(obj, "to_json") else obj, indent=1, sort_keys=True)
