"""RIS phase update with the beamformer fixed.

With ``W`` and the FP auxiliaries fixed, the negated surrogate is the quadratic
``f(phi) = phi^H Q phi - 2 Re{phi^H q} - c`` over unit-modulus vectors, which
is minimized by Riemannian conjugate gradient on the complex circle manifold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import hermitian, power_iteration
from .fp import FpAuxiliaries
from .scenario import ChannelSet, DomainError


@dataclass
class PhaseQuadratic:
    Q: np.ndarray
    q: np.ndarray
    c_const: float

    def value(self, phi: np.ndarray) -> float:
        return float(np.real(phi.conj() @ self.Q @ phi) - 2 * np.real(phi.conj() @ self.q) - self.c_const)


def build_phase_quadratic(ch: ChannelSet, W: np.ndarray, aux: FpAuxiliaries, sigma2: float | None = None) -> PhaseQuadratic:
    K = ch.K
    GW = ch.G @ W                                   # N x (K+M)
    # v[k, :, j] = diag(w_j^H G^H) h_r,k, so that h_r,k^H diag(phi) G w_j = v^H phi
    v = ch.h_r[:, :, None] * GW.conj()[None, :, :]  # K x N x (K+M)
    d = ch.h_d.conj() @ W                           # d[k, j] = h_d,k^H w_j
    g2 = np.abs(aux.g) ** 2
    sq = np.sqrt(1 + aux.c) * aux.g

    Q = hermitian(np.einsum("k,knj,kmj->nm", g2, v, v.conj()))
    own = v[np.arange(K), :, np.arange(K)]          # K x N, v_kk
    q = sq @ own - np.einsum("k,knj,kj->n", g2, v, d)
    c = float(np.real(np.sum(2 * sq.conj() * d[np.arange(K), np.arange(K)]) - np.sum(g2 * np.sum(np.abs(d) ** 2, axis=1))))
    return PhaseQuadratic(Q=Q, q=q, c_const=c)


def euclidean_gradient(pq: PhaseQuadratic, phi: np.ndarray) -> np.ndarray:
    return 2 * (pq.Q @ phi - pq.q)


def riemannian_gradient(pq: PhaseQuadratic, phi: np.ndarray) -> np.ndarray:
    return project_tangent(phi, euclidean_gradient(pq, phi))


def project_tangent(phi: np.ndarray, z: np.ndarray) -> np.ndarray:
    return z - np.real(z * phi.conj()) * phi


def retract(phi: np.ndarray) -> np.ndarray:
    return phi / np.abs(phi)


@dataclass
class RcgOptions:
    max_iter: int = 500
    grad_tol: float = 1e-6
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60
    restart_every: int | None = None  # defaults to N
    model_step: bool = True           # False starts every line search at 1/||Q||


@dataclass
class RcgResult:
    phi: np.ndarray
    objective: float
    iterations: int
    grad_norm: float
    trace: list = field(default_factory=list)
    max_modulus_error: float = 0.0
    max_tangency: float = 0.0


def rcg_minimize(pq: PhaseQuadratic, phi0: np.ndarray, opts: RcgOptions | None = None) -> RcgResult:
    """Polak-Ribiere RCG with Armijo backtracking and elementwise-normalization retraction."""
    opts = opts or RcgOptions()
    phi = np.asarray(phi0, dtype=complex).copy()
    if np.max(np.abs(np.abs(phi) - 1)) > 1e-10:
        raise DomainError("initial phase profile is not unit modulus")
    N = phi.size
    restart = opts.restart_every or N
    norm_Q = power_iteration(pq.Q, tol=1e-6, max_iter=200) if np.any(pq.Q) else 0.0
    step0 = 1.0 / norm_Q if norm_Q > 0 else 1.0 / max(np.max(np.abs(pq.q)), 1e-300)
    tol = opts.grad_tol * max(1.0, np.linalg.norm(pq.q))

    f = pq.value(phi)
    grad = riemannian_gradient(pq, phi)
    direction = -grad
    trace = [f]
    worst = float(np.max(np.abs(np.abs(phi) - 1)))
    tangency = float(np.max(np.abs(np.real(grad * phi.conj()))))
    it = 0
    while it < opts.max_iter and np.linalg.norm(grad) > tol:
        slope = float(np.real(np.vdot(grad, direction)))
        if slope >= 0:
            direction, slope = -grad, -float(np.real(np.vdot(grad, grad)))
        t = step0
        if opts.model_step:
            # minimizer of the second-order model along the direction, capped at about a radian per element
            radial = np.real(euclidean_gradient(pq, phi) * phi.conj())
            curv = 2 * float(np.real(np.vdot(direction, pq.Q @ direction))) - float(np.sum(radial * np.abs(direction) ** 2))
            if curv > 0:
                t = min(-slope / curv, 1.0 / max(np.max(np.abs(direction)), 1e-300))
        for _ in range(opts.max_backtracks):
            cand = retract(phi + t * direction)
            f_cand = pq.value(cand)
            if f_cand <= f + opts.armijo * t * slope:
                break
            t *= opts.shrink
        else:
            break  # no decrease representable at this precision
        it += 1
        new_grad = riemannian_gradient(pq, cand)
        # previous quantities moved to the new tangent space by projection
        old_grad = project_tangent(cand, grad)
        old_dir = project_tangent(cand, direction)
        denom = float(np.real(np.vdot(grad, grad)))
        beta = float(np.real(np.vdot(new_grad, new_grad - old_grad))) / denom if denom > 0 else 0.0
        if beta < 0 or it % restart == 0:
            beta = 0.0
        phi, f, grad = cand, f_cand, new_grad
        direction = -grad + beta * old_dir
        trace.append(f)
        worst = max(worst, float(np.max(np.abs(np.abs(phi) - 1))))
        tangency = max(tangency, float(np.max(np.abs(np.real(grad * phi.conj())))))
    return RcgResult(
        phi=phi,
        objective=f,
        iterations=it,
        grad_norm=float(np.linalg.norm(grad)),
        trace=trace,
        max_modulus_error=worst,
        max_tangency=tangency,
    )
