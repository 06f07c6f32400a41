"""Alternating optimization of the beamformer and the RIS phases, plus baselines."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._linalg import hermitian
from .fp import fp_objective, optimal_auxiliaries
from .metrics import beampattern_mse, composite_channels, sum_rate
from .phasesolver import RcgOptions, build_phase_quadratic, rcg_minimize
from .scenario import ChannelSet, SystemConfig
from .wsolver import (
    InfeasibleSubproblem,
    MseQuadratic,
    RadarDesign,
    build_mse_quadratic,
    build_surrogate,
    certified_curvature,
    default_epsilon,
    radar_only_covariance,
    solve_w_subproblem,
)

LN2 = math.log(2.0)


@dataclass
class SolveReport:
    iterations: int = 0
    rate_trace: list = field(default_factory=list)   # bits/s/Hz, entry 0 is the starting point
    fp_trace: list = field(default_factory=list)     # nats
    mse_trace: list = field(default_factory=list)
    power_trace: list = field(default_factory=list)
    final_mse: float = math.nan
    final_power: float = math.nan
    termination: str = "max_iter"                    # converged | max_iter | infeasible
    wall_time: float = 0.0
    epsilon: float = math.inf
    mse_floor: float = math.nan
    max_ascent_violation: float = 0.0
    max_modulus_error: float = 0.0

    @property
    def rate(self) -> float:
        return self.rate_trace[-1] if self.rate_trace else math.nan

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "rate_bps_hz", "fp_nats", "mse", "power_w", "termination", "wall_time_s"])
            for i, row in enumerate(zip(self.rate_trace, self.fp_trace, self.mse_trace, self.power_trace)):
                w.writerow([i, *(f"{v:.12g}" for v in row), "", ""])
            w.writerow(["final", f"{self.rate:.12g}", f"{self.fp_trace[-1]:.12g}" if self.fp_trace else "",
                        f"{self.final_mse:.12g}", f"{self.final_power:.12g}", self.termination, f"{self.wall_time:.6g}"])


def random_phases(N: int, rng: np.random.Generator) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(N))


def phase_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Stream for phase draws, disjoint from the channel stream of the same trial."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial), 1]))


def spread_covariance(R: np.ndarray, H: np.ndarray) -> np.ndarray:
    """A beamformer ``W`` (M x (K+M)) with ``W W^H = R`` whose first K beams lean toward the users.

    ``W = R^{1/2} (X X^H)^{-1/2} X`` with ``X = [normalized R^{1/2} h_k, I]``; the
    rows of ``(X X^H)^{-1/2} X`` are orthonormal, so the Gram matrix is kept.
    """
    w, V = np.linalg.eigh(hermitian(R))
    F = (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T
    Z = F @ H.T
    norms = np.linalg.norm(Z, axis=0)
    Z = Z / np.where(norms > 0, norms, 1.0)
    X = np.concatenate([Z, np.eye(R.shape[0])], axis=1)
    s, U = np.linalg.eigh(hermitian(X @ X.conj().T))
    return F @ ((U / np.sqrt(s)) @ U.conj().T) @ X


def _setup(cfg, q, radar):
    q = build_mse_quadratic(cfg) if q is None else q
    radar = radar_only_covariance(cfg, q) if radar is None else radar
    return q, radar


def bcd_solve(
    cfg: SystemConfig,
    ch: ChannelSet,
    rng: np.random.Generator | None = None,
    *,
    phi0: np.ndarray | None = None,
    update_phi: bool = True,
    epsilon: float | None = None,
    majorizer: str = "local",
    inner_mm: int = 3,
    adaptive_curvature: bool = True,
    max_iter: int = 100,
    tol: float = 1e-4,
    q: MseQuadratic | None = None,
    radar: RadarDesign | None = None,
    rcg: RcgOptions | None = None,
) -> tuple[np.ndarray, np.ndarray, SolveReport]:
    """Joint design of ``W`` and ``phi`` by alternating FP / MM / RCG updates.

    ``epsilon`` overrides the configured similarity level; ``math.inf`` drops
    the beampattern constraint. Returns ``(W, phi, report)``.
    """
    t0 = time.perf_counter()
    q, radar = _setup(cfg, q, radar)
    eps = default_epsilon(cfg, radar.mse) if epsilon is None else float(epsilon)
    P, sigma2, K = cfg.P, cfg.sigma2, cfg.K
    if phi0 is None:
        phi0 = random_phases(ch.N, rng if rng is not None else phase_rng(cfg.seed))
    phi = np.asarray(phi0, dtype=complex).copy()
    report = SolveReport(epsilon=eps, mse_floor=radar.mse)

    H = composite_channels(ch, phi)
    W = spread_covariance(radar.R, H)
    if math.isinf(eps):
        W[:, K:] = 0.0

    def record(W, phi):
        H = composite_channels(ch, phi)
        rate = sum_rate(H, W, sigma2)
        report.rate_trace.append(rate)
        report.fp_trace.append(LN2 * rate)
        report.mse_trace.append(beampattern_mse(W, cfg))
        report.power_trace.append(float(np.linalg.norm(W) ** 2))
        report.max_modulus_error = max(report.max_modulus_error, float(np.max(np.abs(np.abs(phi) - 1))))
        return rate

    def w_step(H, aux, W, rho):
        if math.isinf(eps):
            return solve_w_subproblem(H, aux, None, P, eps, sigma2, n_cols=cfg.K + cfg.M).W, rho
        if majorizer != "local" or not adaptive_curvature:
            s = build_surrogate(q, W, P, majorizer)
            return solve_w_subproblem(H, aux, s, P, eps, sigma2).W, rho
        cap = certified_curvature(q, W, P)
        rho = min(cap, rho)
        while True:
            s = build_surrogate(q, W, P, "local", curvature=rho)
            new = solve_w_subproblem(H, aux, s, P, eps, sigma2).W
            if rho >= cap or q.value(new) <= eps:
                return new, rho
            rho = min(cap, 4 * rho)

    rho = q.lambda_max * P * 1e-3
    rate = record(W, phi)
    if report.mse_trace[0] > eps:
        report.termination = "infeasible"
    else:
        for it in range(1, max_iter + 1):
            H = composite_channels(ch, phi)
            aux = optimal_auxiliaries(H, W, sigma2)
            level = fp_objective(H, W, aux, sigma2)
            try:
                for _ in range(inner_mm):
                    W, rho = w_step(H, aux, W, rho)
                    rho /= 2
            except InfeasibleSubproblem:
                report.termination = "infeasible"
                break
            after_w = fp_objective(H, W, aux, sigma2)
            report.max_ascent_violation = max(report.max_ascent_violation, level - after_w)
            if update_phi:
                pq = build_phase_quadratic(ch, W, aux, sigma2)
                phi = rcg_minimize(pq, phi, rcg).phi
                after_phi = fp_objective(composite_channels(ch, phi), W, aux, sigma2)
                report.max_ascent_violation = max(report.max_ascent_violation, after_w - after_phi)
            prev, rate = rate, record(W, phi)
            report.max_ascent_violation = max(report.max_ascent_violation, report.fp_trace[-2] - report.fp_trace[-1])
            report.iterations = it
            if abs(rate - prev) <= tol * max(abs(prev), 1e-12):
                report.termination = "converged"
                break

    report.final_mse = report.mse_trace[-1]
    report.final_power = report.power_trace[-1]
    report.wall_time = time.perf_counter() - t0
    return W, phi, report


def baseline_no_ris(cfg: SystemConfig, ch: ChannelSet, **kw) -> tuple[np.ndarray, SolveReport]:
    W, _, report = bcd_solve(cfg, ch.without_ris(), phi0=np.ones(ch.N, dtype=complex), update_phi=False, **kw)
    return W, report


def baseline_random_ris(
    cfg: SystemConfig, ch: ChannelSet, rng: np.random.Generator | None = None, *, phi: np.ndarray | None = None, **kw
) -> tuple[np.ndarray, np.ndarray, SolveReport]:
    if phi is None:
        phi = random_phases(ch.N, rng if rng is not None else phase_rng(cfg.seed))
    return bcd_solve(cfg, ch, phi0=phi, update_phi=False, **kw)


def baseline_com_only(cfg: SystemConfig, ch: ChannelSet, rng: np.random.Generator | None = None, **kw):
    return bcd_solve(cfg, ch, rng, epsilon=math.inf, **kw)
