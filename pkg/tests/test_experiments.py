import csv
import io
import json

import numpy as np
import pytest

from spiralcut.errors import ExperimentError, MonotonicityViolation, NonConvexProfile
from spiralcut.experiments import (CurveRow, OverlapCurve, TrialRecord, dome_conjecture_run, dumps,
                                   first_simple_probe, hemiball_orientation_sweep,
                                   probe_orientations, random_overlap_stats,
                                   revolution_threshold_search, run_trial)
from spiralcut.generators import default_profile, make_solid, peanut_profile


@pytest.fixture(scope="module")
def small_curve():
    return random_overlap_stats([4, 8, 14], trials=4, seed=7)


def test_curve_rows(small_curve):
    assert small_curve.ns == [4, 8, 14]
    assert all(0.0 <= f <= 1.0 for f in small_curve.fractions)
    assert all(r.trials + r.excluded == 4 for r in small_curve.rows)
    assert len(small_curve.records) == 12
    # oracle: fractions recomputed from the trial records
    for row in small_curve.rows:
        rs = [r for r in small_curve.records if r.params["n"] == row.n and not r.excluded]
        assert row.overlap_fraction == sum(r.simple is False for r in rs) / len(rs)


def test_curve_deterministic(small_curve):
    again = random_overlap_stats([4, 8, 14], trials=4, seed=7)
    assert dumps(again) == dumps(small_curve)
    assert again.to_csv() == small_curve.to_csv()


def test_curve_seed_matters(small_curve):
    other = random_overlap_stats([4, 8, 14], trials=4, seed=8)
    assert [r.rotation for r in other.records] != [r.rotation for r in small_curve.records]


def test_curve_csv_columns(small_curve):
    rows = list(csv.DictReader(io.StringIO(small_curve.to_csv())))
    assert list(rows[0]) == ["n", "trials", "overlap_fraction", "excluded"]
    assert [int(r["n"]) for r in rows] == [4, 8, 14]
    assert [float(r["overlap_fraction"]) for r in rows] == small_curve.fractions


def test_curve_json_has_no_runtime(small_curve):
    d = json.loads(dumps(small_curve))
    assert "runtime" not in d["records"][0]
    assert d["rows"][0] == {"n": 4, "trials": 4, "overlap_fraction": small_curve.fractions[0],
                            "excluded": 0}


def test_curve_argument_checks():
    with pytest.raises(ExperimentError):
        random_overlap_stats([3], trials=1, seed=0)
    with pytest.raises(ExperimentError):
        random_overlap_stats([8], trials=0, seed=0)
    with pytest.raises(ExperimentError):
        OverlapCurve([CurveRow(8, 2, 1.5)])


def test_weakly_increasing():
    rows = [CurveRow(4, 1, 0.0), CurveRow(8, 1, 0.5), CurveRow(12, 1, 0.5)]
    assert OverlapCurve(rows).weakly_increasing()
    rows.append(CurveRow(16, 1, 0.25))
    assert not OverlapCurve(rows).weakly_increasing()


def test_hemiball_sweep_labels_and_determinism():
    a = hemiball_orientation_sweep(8, 4, seed=3)
    b = hemiball_orientation_sweep(8, 4, seed=3)
    assert [r.label for r in a.records] == ["base_horizontal", "x_vertical", "random0", "random1",
                                            "random2", "random3"]
    assert dumps(a) == dumps(b)
    assert a.excluded == 0 and 0.0 <= a.overlap_fraction <= 1.0


def test_dome_run_counts():
    r = dome_conjecture_run(1, 0.01, 2, seed=0)
    assert len(r.records) == 2
    assert all(rec.generator == "dome" for rec in r.records)


def test_threshold_search_cstar():
    rep = revolution_threshold_search(default_profile(), [8, 4, 6])
    assert list(rep.verdicts) == [4, 6, 8]
    assert rep.verdicts == {4: False, 6: True, 8: True}
    assert rep.n0 == 6 and rep.persists


def test_threshold_search_flags_late_overlap():
    # with the reconstructed profile n_spin = 3 is simple and 4 is not
    rep = revolution_threshold_search(default_profile(), [3, 4])
    assert rep.n0 == 3 and rep.violations == [4] and not rep.persists
    with pytest.raises(MonotonicityViolation):
        revolution_threshold_search(default_profile(), [3, 4], raise_on_violation=True)


def test_threshold_search_rejects_nonconvex():
    with pytest.raises(NonConvexProfile):
        revolution_threshold_search(peanut_profile(), [6])


def test_probe_orientations():
    p = make_solid("dodecahedron")
    probes = probe_orientations(p, seed=0)
    assert len(probes) == 20
    assert [l for l, _ in probes[:5]] == ["identity", "largest_face_down", "face_down",
                                         "vertex_down", "edge_down"]
    for _, R in probes:
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-12) and np.linalg.det(R) == pytest.approx(1.0)
    # a canonical "down" rotation sends its feature straight below the centroid
    R = dict(probes)["vertex_down"]
    v = (p.vertices[0] - p.vertices.mean(axis=0)) @ R.T
    assert np.allclose(v[:2], 0, atol=1e-12) and v[2] < 0
    again = probe_orientations(p, seed=0)
    assert all(np.array_equal(a, b) for (_, a), (_, b) in zip(probes, again))


def test_first_simple_probe_cube():
    rec = first_simple_probe(make_solid("cube"))
    assert rec is not None and rec.simple and rec.label == "identity"


def test_run_trial_time_cap_excludes():
    p = make_solid("truncated_icosidodecahedron")
    rec = TrialRecord("x", {}, 0, np.eye(3).tolist(), 2)
    run_trial(p, np.eye(3), rec, time_cap=0.05)
    assert rec.excluded and rec.error.startswith("TrialTimeout")
    assert rec.simple is None
