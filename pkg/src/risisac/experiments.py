"""Monte-Carlo experiment runners: sum-rate vs power, sum-rate vs RIS size, beampatterns.

Every trial index owns its channel stream and its phase stream, and all
schemes of one trial see the same channel realization and the same random
phase draw.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import optimal_alpha, transmit_beampattern
from .optimizer import (
    baseline_com_only,
    baseline_no_ris,
    baseline_random_ris,
    bcd_solve,
    phase_rng,
)
from .scenario import SystemConfig, generate_channels, ideal_beampattern, trial_rng
from .wsolver import build_mse_quadratic, radar_only_covariance

RATE_SCHEMES = ("proposed", "no_ris", "random_ris", "com_only")
PATTERN_SCHEMES = ("proposed", "no_ris", "random_ris", "com_only", "radar_only")

POWER_COLUMNS = ["p_dbm", "scheme", "mean_rate", "stderr_rate", "trials"]
RIS_COLUMNS = ["n", "scheme", "mean_rate", "stderr_rate", "trials", "gap_vs_random"]


@dataclass
class ExperimentSpec:
    kind: str                       # power_sweep | ris_size_sweep | beampattern
    values: list = field(default_factory=list)
    trials: int = 10
    schemes: tuple = RATE_SCHEMES
    output: str | None = None
    base: SystemConfig = field(default_factory=SystemConfig)
    workers: int = 1

    def __post_init__(self):
        self.schemes = tuple(self.schemes)
        if self.kind not in ("power_sweep", "ris_size_sweep", "beampattern"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        allowed = PATTERN_SCHEMES if self.kind == "beampattern" else RATE_SCHEMES
        bad = [s for s in self.schemes if s not in allowed]
        if bad or not self.schemes:
            raise ValueError(f"unsupported schemes {bad} for {self.kind}; choose from {allowed}")
        if self.kind != "beampattern":
            if not self.values:
                raise ValueError("sweep values must be non-empty")
            if list(self.values) != sorted(self.values):
                raise ValueError("sweep values must be sorted")


def _run_trial(args):
    cfg, trial, schemes = args
    q = build_mse_quadratic(cfg)
    radar = radar_only_covariance(cfg, q)
    ch = generate_channels(cfg, trial_rng(cfg.seed, trial))
    common = dict(q=q, radar=radar)
    out = {}
    for name in schemes:
        if name == "proposed":
            _, _, rep = bcd_solve(cfg, ch, phase_rng(cfg.seed, trial), **common)
        elif name == "random_ris":
            _, _, rep = baseline_random_ris(cfg, ch, phase_rng(cfg.seed, trial), **common)
        elif name == "no_ris":
            _, rep = baseline_no_ris(cfg, ch, **common)
        elif name == "com_only":
            _, _, rep = baseline_com_only(cfg, ch, phase_rng(cfg.seed, trial), **common)
        out[name] = rep.rate
    return out


def _gather(jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_trial, jobs))
    return [_run_trial(j) for j in jobs]


def _stats(x):
    x = np.asarray(x, dtype=float)
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(np.mean(x)), se


def _write(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns)
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v) for k, v in row.items()})


def _sweep(spec, field_name, key):
    rows = []
    for value in spec.values:
        cfg = spec.base.replace(**{field_name: value})
        results = _gather([(cfg, t, spec.schemes) for t in range(spec.trials)], spec.workers)
        per = {s: [r[s] for r in results] for s in spec.schemes}
        gap = None
        if "proposed" in per and "random_ris" in per:
            gap = float(np.mean(np.subtract(per["proposed"], per["random_ris"])))
        for s in spec.schemes:
            mean, se = _stats(per[s])
            row = {key: value, "scheme": s, "mean_rate": mean, "stderr_rate": se, "trials": spec.trials}
            if key == "n":
                row["gap_vs_random"] = gap if gap is not None else ""
            rows.append(row)
    return rows


def run_power_sweep(spec: ExperimentSpec) -> list[dict]:
    """Mean sum-rate per (transmit power in dBm, scheme)."""
    rows = _sweep(spec, "P_dbm", "p_dbm")
    if spec.output:
        _write(spec.output, POWER_COLUMNS, rows)
    return rows


def run_ris_size_sweep(spec: ExperimentSpec) -> list[dict]:
    """Mean sum-rate per (RIS size, scheme), with the paired proposed-minus-random gap."""
    rows = _sweep(spec, "N", "n")
    if spec.output:
        _write(spec.output, RIS_COLUMNS, rows)
    return rows


def pattern_columns(schemes) -> list[str]:
    cols = ["angle_deg", "desired_watts", "desired_db"]
    for s in schemes:
        cols += [f"{s}_watts", f"{s}_db"]
    return cols


def _db_peak(p):
    p = np.asarray(p, dtype=float)
    return 10 * np.log10(np.maximum(p / np.max(p), 1e-30))


@dataclass
class BeampatternResult:
    rows: list
    patterns: dict                  # scheme -> designed pattern in watts
    mse: dict
    epsilon: float
    desired: np.ndarray


def run_beampattern(spec: ExperimentSpec, trial: int = 0) -> BeampatternResult:
    """Designed transmit beampatterns of one channel realization."""
    cfg = spec.base
    q = build_mse_quadratic(cfg)
    radar = radar_only_covariance(cfg, q)
    ch = generate_channels(cfg, trial_rng(cfg.seed, trial))
    common = dict(q=q, radar=radar)
    beams, mse = {}, {}
    eps = math.nan
    for s in spec.schemes:
        if s == "radar_only":
            W, m = radar.W, radar.mse
        else:
            if s == "proposed":
                W, _, rep = bcd_solve(cfg, ch, phase_rng(cfg.seed, trial), **common)
                eps = rep.epsilon
            elif s == "random_ris":
                W, _, rep = baseline_random_ris(cfg, ch, phase_rng(cfg.seed, trial), **common)
            elif s == "no_ris":
                W, rep = baseline_no_ris(cfg, ch, **common)
                eps = rep.epsilon if math.isnan(eps) else eps
            else:
                W, _, rep = baseline_com_only(cfg, ch, phase_rng(cfg.seed, trial), **common)
            m = rep.final_mse
        beams[s], mse[s] = W, m

    ref = beams["proposed"] if "proposed" in beams else next(iter(beams.values()))
    desired = optimal_alpha(ref, cfg) * ideal_beampattern(cfg)
    patterns = {s: transmit_beampattern(W, cfg) for s, W in beams.items()}
    cols = {"angle_deg": np.asarray(cfg.angle_grid), "desired_watts": desired, "desired_db": _db_peak(desired)}
    for s, p in patterns.items():
        cols[f"{s}_watts"] = p
        cols[f"{s}_db"] = _db_peak(p)
    names = pattern_columns(spec.schemes)
    rows = [{k: float(cols[k][i]) for k in names} for i in range(cfg.L)]
    if spec.output:
        _write(spec.output, names, rows)
    return BeampatternResult(rows=rows, patterns=patterns, mse=mse, epsilon=eps, desired=desired)
