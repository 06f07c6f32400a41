"""Fractional-programming reformulation of the sum-rate objective.

Everything here is in nats. The closed-form ``c`` update equals the SINR,
which is the stationary point of ``ln(1+c) - c + (1+c) S/T``; with log2 in
that expression it would not be, so the natural log is used throughout and
rates are converted with ``ln 2`` only when reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import sinrs


@dataclass
class FpAuxiliaries:
    c: np.ndarray  # real, length K
    g: np.ndarray  # complex, length K


def _effective(H, W):
    Y = H.conj() @ W  # Y[k, j] = h_k^H w_j
    K = H.shape[0]
    return Y, Y[np.arange(K), np.arange(K)], np.sum(np.abs(Y) ** 2, axis=1)


def update_c(H: np.ndarray, W: np.ndarray, sigma2: float) -> np.ndarray:
    return sinrs(H, W, sigma2)


def update_g(H: np.ndarray, W: np.ndarray, c: np.ndarray, sigma2: float) -> np.ndarray:
    _, direct, total = _effective(H, W)
    return np.sqrt(1.0 + c) * direct / (total + sigma2)


def optimal_auxiliaries(H: np.ndarray, W: np.ndarray, sigma2: float) -> FpAuxiliaries:
    c = update_c(H, W, sigma2)
    return FpAuxiliaries(c, update_g(H, W, c, sigma2))


def reduced_objective(H: np.ndarray, W: np.ndarray, aux: FpAuxiliaries) -> float:
    """FP objective without the terms that do not depend on (W, phi)."""
    _, direct, total = _effective(H, W)
    c, g = aux.c, aux.g
    return float(np.sum(2 * np.sqrt(1 + c) * np.real(g.conj() * direct) - np.abs(g) ** 2 * total))


def fp_objective(H: np.ndarray, W: np.ndarray, aux: FpAuxiliaries, sigma2: float) -> float:
    c, g = aux.c, aux.g
    const = np.sum(np.log1p(c) - c - np.abs(g) ** 2 * sigma2)
    return float(const) + reduced_objective(H, W, aux)
