"""Beamformer update with the RIS phases fixed.

The beampattern MSE with the scaling eliminated is the quartic
``E(W) = vec(WW^H)^H C vec(WW^H)``. It is majorized around the current
iterate ``W_t`` by a convex quadratic in ``W``

    S(W) = sum_j Re{w_j^H Bq w_j + 2 w_j^H uq_j} + cq,

and the sum-rate surrogate is maximized subject to ``S(W) <= epsilon`` and
``||W||_F^2 <= P`` through its Lagrange dual (two multipliers, nested
bisection, closed-form beams for fixed multipliers).

Two majorizers are available. ``bound="power"`` replaces the quartic term
``lam ||WW^H||_F^2`` by its worst case ``lam P^2``; it never touches ``E`` at
``W_t`` unless ``W_t`` is rank one with full power. ``bound="local"`` bounds
the same term by a quadratic that is exact at ``W_t``, so ``W_t`` is always
feasible for the subproblem whenever ``E(W_t) <= epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._linalg import hermitian, project_psd_trace, psd_sqrt, unvec, vec
from .fp import FpAuxiliaries
from .scenario import ConfigError, SystemConfig, ideal_beampattern, steering_matrix


class InfeasibleSubproblem(RuntimeError):
    """No beamformer satisfies the surrogate constraint within the power budget."""

    def __init__(self, min_surrogate: float, epsilon: float):
        super().__init__(
            f"surrogate beampattern constraint infeasible: min {min_surrogate:.6g} > epsilon {epsilon:.6g}"
        )
        self.min_surrogate = min_surrogate
        self.epsilon = epsilon


class SurrogateError(RuntimeError):
    """The surrogate quadratic is not convex."""


@dataclass
class MseQuadratic:
    C: np.ndarray          # M^2 x M^2
    b: np.ndarray          # L x M^2, row l is b_l
    beta: float
    lambda_max: float
    pd: np.ndarray         # ideal pattern on the grid
    vecA: np.ndarray       # M^2 x L, column l is vec(a_l a_l^H)
    M: int

    @property
    def L(self) -> int:
        return self.pd.size

    def value(self, W: np.ndarray) -> float:
        x = vec(W @ W.conj().T)
        return float(np.real(x.conj() @ self.C @ x))


@dataclass
class MmSurrogate:
    B1: np.ndarray
    B2: np.ndarray
    u: np.ndarray          # M x (K+M), column j is u_j = B2^H w_j^t
    c1: float
    c2: float
    b_t: np.ndarray
    lam: float
    P: float
    W_t: np.ndarray
    bound: str
    # convex model actually handed to the subproblem solver
    Bq: np.ndarray = field(repr=False, default=None)
    uq: np.ndarray = field(repr=False, default=None)
    cq: float = 0.0

    def value(self, W: np.ndarray) -> float:
        quad = np.real(np.einsum("ij,ij->", W.conj(), self.Bq @ W))
        lin = 2 * np.real(np.einsum("ij,ij->", W.conj(), self.uq))
        return float(quad + lin + self.cq)


def build_mse_quadratic(cfg: SystemConfig) -> MseQuadratic:
    M = cfg.M
    pd = ideal_beampattern(cfg)
    A = steering_matrix(cfg.angle_grid, M, cfg.spacing_ratio)
    vecA = np.einsum("il,jl->ijl", A, A.conj()).reshape(M * M, -1, order="F")
    beta = float(pd @ pd)
    v = vecA @ pd
    b = (np.outer(v, pd) / beta - vecA).T
    C = hermitian(b.T @ b.conj() / pd.size)
    lam = float(np.linalg.eigvalsh(C)[-1])
    if not lam > 0:
        raise ConfigError("degenerate beampattern quadratic (largest eigenvalue is zero)")
    return MseQuadratic(C=C, b=b, beta=beta, lambda_max=lam, pd=pd, vecA=vecA, M=M)


def certified_curvature(q: MseQuadratic, W_t: np.ndarray, P: float) -> float:
    """Curvature making the ``local`` bound valid on the whole power ball."""
    # ||R - R_t||_F <= (||W||_2 + ||W_t||_2) ||W - W_t||_F
    return q.lambda_max * (math.sqrt(P) + np.linalg.norm(W_t, 2)) ** 2


def build_surrogate(
    q: MseQuadratic, W_t: np.ndarray, P: float, bound: str = "power", curvature: float | None = None
) -> MmSurrogate:
    """Majorizer of the beampattern MSE around ``W_t``.

    For ``bound="local"`` a ``curvature`` below :func:`certified_curvature`
    gives a model that is still exact at ``W_t`` but only an upper bound near it.
    """
    if bound not in ("power", "local"):
        raise ValueError(f"unknown bound {bound!r}")
    M, L, lam = q.M, q.L, q.lambda_max
    R_t = W_t @ W_t.conj().T
    x_t = vec(R_t)
    Cx = q.C @ x_t
    b_t = 2 * (Cx - lam * x_t)
    c1 = float(np.real(x_t.conj() @ (lam * x_t - Cx)))

    pb = np.real(q.vecA.conj().T @ x_t)
    alpha = float(q.pd @ pb) / q.beta
    V = unvec(q.vecA @ q.pd, M)
    B1 = hermitian(2.0 / L * (alpha * V + unvec(q.vecA @ pb, M)))
    B2 = hermitian(-4.0 / L * alpha * V - 2 * lam * R_t)
    u = B2.conj().T @ W_t
    c2 = -float(np.real(np.einsum("ij,ij->", W_t.conj(), u))) + c1 + lam * P**2

    s = MmSurrogate(B1=B1, B2=B2, u=u, c1=c1, c2=c2, b_t=b_t, lam=lam, P=P, W_t=W_t.copy(), bound=bound)
    if bound == "power":
        s.Bq, s.uq, s.cq = B1, u, c2
    else:
        rho = certified_curvature(q, W_t, P) if curvature is None else curvature
        s.Bq = hermitian(B1 + 2 * lam * R_t + rho * np.eye(M))
        s.uq = u - rho * W_t
        s.cq = c2 - lam * P**2 + rho * np.linalg.norm(W_t) ** 2 - lam * np.linalg.norm(R_t) ** 2
    return s


@dataclass
class WSolution:
    W: np.ndarray
    mu1: float
    mu2: float
    objective: float
    surrogate: float
    power: float
    kkt: dict
    fallback: bool = False


class _Dual:
    """Closed-form beams ``(A + mu1 Bq + mu2 I)^-1 (T - mu1 uq)``."""

    def __init__(self, A, T, Bq, uq):
        self.A, self.T, self.Bq, self.uq = A, T, Bq, uq
        self._key = None

    def _factor(self, mu1):
        if self._key != mu1:
            D = self.A + mu1 * self.Bq if mu1 else self.A
            lam, V = np.linalg.eigh(hermitian(D))
            ridge = 1e-10 * max(float(np.sum(np.abs(lam))), 1e-300) / lam.size
            R = self.T - mu1 * self.uq if mu1 else self.T
            self._key, self._lam, self._V, self._Z = mu1, np.clip(lam, 0.0, None) + ridge, V, V.conj().T @ R
        return self._lam, self._V, self._Z

    def power(self, mu1, mu2):
        lam, _, Z = self._factor(mu1)
        return float(np.sum(np.abs(Z) ** 2 / (lam[:, None] + mu2) ** 2))

    def beams(self, mu1, mu2):
        lam, V, Z = self._factor(mu1)
        return V @ (Z / (lam[:, None] + mu2))

    def mu2_for(self, mu1, P):
        if self.power(mu1, 0.0) <= P:
            return 0.0
        _, _, Z = self._factor(mu1)
        hi = np.linalg.norm(Z) / math.sqrt(P)
        mu2 = brentq(lambda m: self.power(mu1, m) - P, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
        while self.power(mu1, mu2) > P:
            mu2 = mu2 * (1 + 1e-15) + 1e-300
        return mu2


def _objective(A, T, W):
    return float(2 * np.real(np.einsum("ij,ij->", T.conj(), W)) - np.real(np.einsum("ij,ij->", W.conj(), A @ W)))


def _subproblem_terms(H, aux, n_cols):
    K, M = H.shape
    A = hermitian((H.T * np.abs(aux.g) ** 2) @ H.conj())
    T = np.zeros((M, n_cols), dtype=complex)
    T[:, :K] = H.T * (np.sqrt(1 + aux.c) * aux.g)
    return A, T


def solve_w_subproblem(
    H: np.ndarray,
    aux: FpAuxiliaries,
    s: MmSurrogate | None,
    P: float,
    epsilon: float,
    sigma2: float | None = None,
    n_cols: int | None = None,
) -> WSolution:
    """Maximize the FP surrogate over W under the surrogate MSE and power constraints.

    ``epsilon = inf`` drops the beampattern constraint (``s`` may then be None).
    """
    unconstrained = math.isinf(epsilon)
    if n_cols is None:
        n_cols = s.u.shape[1] if s is not None else H.shape[0] + H.shape[1]
    A, T = _subproblem_terms(H, aux, n_cols)
    M = H.shape[1]
    if unconstrained:
        Bq = np.zeros((M, M), dtype=complex)
        uq = np.zeros((M, n_cols), dtype=complex)
        cq = 0.0
    else:
        Bq, uq, cq = s.Bq, s.uq, s.cq
        ev = np.linalg.eigvalsh(Bq)
        if ev[0] < -1e-8 * max(abs(ev[-1]), 1e-300):
            raise SurrogateError(f"surrogate quadratic not PSD (min eigenvalue {ev[0]:.3g})")

    def surrogate(W):
        return float(
            np.real(np.einsum("ij,ij->", W.conj(), Bq @ W)) + 2 * np.real(np.einsum("ij,ij->", W.conj(), uq)) + cq
        )

    dual = _Dual(A, T, Bq, uq)

    def at(mu1):
        mu2 = dual.mu2_for(mu1, P)
        return mu2, dual.beams(mu1, mu2)

    mu1 = 0.0
    mu2, W = at(0.0)
    if not unconstrained and surrogate(W) > epsilon:
        # feasibility: smallest surrogate value reachable inside the power ball
        floor_dual = _Dual(np.zeros_like(A), np.zeros_like(T), Bq, uq)
        nu = floor_dual.mu2_for(1.0, P)
        s_min = surrogate(floor_dual.beams(1.0, nu))
        if s_min > epsilon * (1 + 1e-12):
            raise InfeasibleSubproblem(s_min, epsilon)

        def excess(m):
            return surrogate(at(m)[1]) - epsilon

        scale = np.linalg.norm(A, 2) / max(np.linalg.norm(Bq, 2), 1e-300)
        lo, hi = 0.0, scale if scale > 0 else 1.0
        for _ in range(2000):
            if excess(hi) <= 0:
                break
            lo, hi = hi, hi * 2
        else:
            hi = math.inf
        if math.isfinite(hi):
            if lo == 0.0:
                lo = hi
                for _ in range(2000):
                    lo /= 2
                    if excess(lo) > 0:
                        break
            while hi / lo - 1 > 1e-14:
                mid = math.sqrt(lo * hi)
                if mid <= lo or mid >= hi:
                    break
                if excess(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            mu1 = hi
            mu2, W = at(mu1)
        else:
            mu1, mu2 = math.inf, nu
            W = floor_dual.beams(1.0, nu)

    obj = _objective(A, T, W)
    fallback = False
    if s is not None and not unconstrained:
        W_t = s.W_t
        obj_t = _objective(A, T, W_t)
        feasible_t = surrogate(W_t) <= epsilon and np.linalg.norm(W_t) ** 2 <= P
        if feasible_t and obj < obj_t - 1e-12 * max(1.0, abs(obj_t)):
            W, obj, fallback = W_t.copy(), obj_t, True

    S_val = surrogate(W) if not unconstrained else math.nan
    power = float(np.linalg.norm(W) ** 2)
    kkt = _kkt_residuals(A, T, Bq, uq, W, mu1, mu2, S_val, power, P, epsilon)
    return WSolution(W=W, mu1=mu1, mu2=mu2, objective=obj, surrogate=S_val, power=power, kkt=kkt, fallback=fallback)


def _kkt_residuals(A, T, Bq, uq, W, mu1, mu2, S_val, power, P, epsilon):
    unconstrained = math.isinf(epsilon)
    if math.isfinite(mu1):
        grad = (A + mu1 * Bq + mu2 * np.eye(A.shape[0])) @ W - (T - mu1 * uq)
        scale = max(np.linalg.norm(T), np.linalg.norm(mu1 * uq), 1e-300)
        stationarity = float(np.linalg.norm(grad) / scale)
    else:
        stationarity = math.nan
    return {
        "stationarity": stationarity,
        "primal_mse": 0.0 if unconstrained else max(0.0, (S_val - epsilon) / epsilon),
        "primal_power": max(0.0, (power - P) / P),
        "slack_mse": 0.0 if unconstrained or mu1 == 0 else abs(S_val - epsilon) / epsilon,
        "slack_power": 0.0 if mu2 == 0 else abs(power - P) / P,
    }


@dataclass
class RadarDesign:
    W: np.ndarray
    R: np.ndarray
    mse: float
    trace: list


def radar_only_covariance(
    cfg: SystemConfig, q: MseQuadratic | None = None, tol: float = 1e-6, max_iter: int = 20000
) -> RadarDesign:
    """Minimize the beampattern MSE over covariances with trace exactly P.

    Each step minimizes the tangent quadratic upper bound of ``E`` in Gram
    space (curvature ``lambda_max``) over the feasible covariances, i.e. a
    projected-gradient step with step ``1/(2 lambda_max)``.
    """
    q = build_mse_quadratic(cfg) if q is None else q
    M, P, lam = cfg.M, cfg.P, q.lambda_max
    R = np.eye(M, dtype=complex) * P / M
    mse = q.value(psd_sqrt(R))
    trace = [mse]
    for _ in range(max_iter):
        x = vec(R)
        R = project_psd_trace(unvec(x - q.C @ x / lam, M), P)
        new = float(np.real(vec(R).conj() @ q.C @ vec(R)))
        trace.append(new)
        if mse - new <= tol * new:
            mse = new
            break
        mse = new
    W_r = psd_sqrt(R)
    W = np.concatenate([np.zeros((M, cfg.K), dtype=complex), W_r], axis=1)
    return RadarDesign(W=W, R=R, mse=mse, trace=trace)


def radar_only_design(cfg: SystemConfig, q: MseQuadratic | None = None) -> tuple[np.ndarray, float]:
    d = radar_only_covariance(cfg, q)
    return d.W, d.mse


def default_epsilon(cfg: SystemConfig, floor: float) -> float:
    return cfg.epsilon if cfg.epsilon is not None else cfg.epsilon_ratio * floor
