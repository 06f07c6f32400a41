"""SINR, sum-rate and transmit beampattern metrics.

Composite channels are stored as a (K, M) array whose row ``k`` is ``h_k``, so
the gain of beam ``j`` at user ``k`` is ``(H.conj() @ W)[k, j] = h_k^H w_j``.
The beamformer ``W`` is M x (K+M): communication beams first, radar beams last.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .scenario import ChannelSet, DomainError, SystemConfig, ideal_beampattern, steering_matrix


def composite_channels(ch: ChannelSet, phi: np.ndarray) -> np.ndarray:
    """Rows ``h_k`` with ``h_k^H = h_r,k^H diag(phi) G + h_d,k^H``."""
    phi = np.asarray(phi)
    if phi.shape != (ch.N,):
        raise ValueError(f"phase profile has shape {phi.shape}, expected ({ch.N},)")
    hH = (ch.h_r.conj() * phi) @ ch.G + ch.h_d.conj()
    return hH.conj()


def gains(H: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Power gains ``|h_k^H w_j|^2`` as a (K, K+M) array."""
    return np.abs(H.conj() @ W) ** 2


def sinrs(H: np.ndarray, W: np.ndarray, sigma2: float) -> np.ndarray:
    if sigma2 <= 0:
        raise DomainError("noise power must be positive")
    K = H.shape[0]
    g = gains(H, W)
    signal = g[np.arange(K), np.arange(K)]
    # interference runs over every other column, radar beams included
    return signal / (g.sum(axis=1) - signal + sigma2)


def sinr(k: int, H: np.ndarray, W: np.ndarray, sigma2: float) -> float:
    """SINR of user ``k`` (0-based)."""
    if not 0 <= k < H.shape[0]:
        raise IndexError(f"user index {k} out of range")
    return float(sinrs(H, W, sigma2)[k])


def sum_rate(H: np.ndarray, W: np.ndarray, sigma2: float) -> float:
    """Sum of log2(1 + SINR) in bits/s/Hz."""
    return float(np.sum(np.log2(1.0 + sinrs(H, W, sigma2))))


def transmit_beampattern(W: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """``a(theta_l)^H W W^H a(theta_l)`` over the angle grid."""
    A = steering_matrix(cfg.angle_grid, W.shape[0], cfg.spacing_ratio)
    return np.sum(np.abs(A.conj().T @ W) ** 2, axis=1)


def optimal_alpha(W: np.ndarray, cfg: SystemConfig) -> float:
    """Scaling of the ideal pattern that minimizes the beampattern MSE."""
    pd = ideal_beampattern(cfg)
    beta = float(pd @ pd)
    if beta <= 0:
        raise DomainError("ideal beampattern is identically zero")
    return float(pd @ transmit_beampattern(W, cfg) / beta)


def beampattern_mse(W: np.ndarray, cfg: SystemConfig, alpha: float | None = None) -> float:
    """Mean over the grid of ``|alpha P_d - P_b|^2``; ``alpha=None`` uses the optimum."""
    pd = ideal_beampattern(cfg)
    pb = transmit_beampattern(W, cfg)
    if alpha is None:
        alpha = float(pd @ pb / (pd @ pd))
    return float(np.mean((alpha * pd - pb) ** 2))


@dataclass
class BeampatternReport:
    angles: np.ndarray
    designed: np.ndarray
    ideal_scaled: np.ndarray
    mse: float
    alpha: float

    @classmethod
    def from_beamformer(cls, W: np.ndarray, cfg: SystemConfig) -> "BeampatternReport":
        alpha = optimal_alpha(W, cfg)
        return cls(
            angles=np.asarray(cfg.angle_grid, dtype=float),
            designed=transmit_beampattern(W, cfg),
            ideal_scaled=alpha * ideal_beampattern(cfg),
            mse=beampattern_mse(W, cfg, alpha),
            alpha=alpha,
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["angle_deg", "designed_watts", "ideal_scaled_watts"])
            for row in zip(self.angles, self.designed, self.ideal_scaled):
                writer.writerow([f"{v:.12g}" for v in row])
