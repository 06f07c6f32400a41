import numpy as np
import pytest
from conftest import crandn
from oracles import grid_gap_bound, grid_min_phase

from risisac.fp import FpAuxiliaries, optimal_auxiliaries, reduced_objective
from risisac.metrics import composite_channels, sum_rate
from risisac.phasesolver import (
    PhaseQuadratic,
    build_phase_quadratic,
    project_tangent,
    rcg_minimize,
    retract,
    riemannian_gradient,
)
from risisac.scenario import ChannelSet, DomainError

SIGMA2 = 0.1


def _unit(rng, n):
    return np.exp(2j * np.pi * rng.random(n))


def _instance(rng, K=2, M=3, N=4):
    ch = ChannelSet(crandn(rng, N, M), crandn(rng, K, N), crandn(rng, K, M))
    W = crandn(rng, M, K + M)
    phi = _unit(rng, N)
    aux = optimal_auxiliaries(composite_channels(ch, phi), W, SIGMA2)
    return ch, W, phi, aux


def test_zero_beamformer_and_zero_g(rng):
    ch, W, phi, aux = _instance(rng)
    pq = build_phase_quadratic(ch, np.zeros_like(W), aux)
    assert not pq.Q.any() and not pq.q.any() and pq.c_const == 0
    pq = build_phase_quadratic(ch, W, FpAuxiliaries(aux.c, np.zeros_like(aux.g)))
    assert not pq.Q.any() and not pq.q.any()


def test_equivalence_with_reduced_objective(rng):
    ch, W, _, aux = _instance(rng, N=6)
    pq = build_phase_quadratic(ch, W, aux)
    assert np.allclose(pq.Q, pq.Q.conj().T)
    assert np.linalg.eigvalsh(pq.Q)[0] >= -1e-12 * np.linalg.norm(pq.Q)
    for _ in range(50):
        phi = _unit(rng, 6)
        ref = -reduced_objective(composite_channels(ch, phi), W, aux)
        assert pq.value(phi) == pytest.approx(ref, rel=1e-8)


def test_q_zero_closed_form(rng):
    q = crandn(rng, 5)
    pq = PhaseQuadratic(np.zeros((5, 5), complex), q, 0.0)
    res = rcg_minimize(pq, _unit(rng, 5))
    best = pq.value(q / np.abs(q))
    assert res.objective == pytest.approx(best, abs=1e-8 * max(1.0, abs(best)))


def test_constant_objective_returns_start(rng):
    phi0 = _unit(rng, 4)
    res = rcg_minimize(PhaseQuadratic(np.eye(4, dtype=complex), np.zeros(4, complex), 0.0), phi0)
    assert res.iterations == 0 and res.grad_norm == pytest.approx(0.0, abs=1e-14)
    assert np.array_equal(res.phi, phi0)


def test_non_unit_start_raises(rng):
    pq = PhaseQuadratic(np.eye(3, dtype=complex), np.ones(3, complex), 0.0)
    with pytest.raises(DomainError):
        rcg_minimize(pq, np.array([1.0, 1.0, 0.5]))


def test_riemannian_gradient_finite_differences(rng):
    ch, W, phi, aux = _instance(rng, N=8)
    pq = build_phase_quadratic(ch, W, aux)
    grad = riemannian_gradient(pq, phi)
    assert np.max(np.abs(np.real(grad * phi.conj()))) <= 1e-10
    for _ in range(10):
        d = project_tangent(phi, crandn(rng, 8))
        h = 1e-6
        fd = (pq.value(retract(phi + h * d)) - pq.value(retract(phi - h * d))) / (2 * h)
        exact = float(np.real(np.vdot(grad, d)))
        assert abs(fd - exact) <= 1e-5 * abs(exact)


def test_grid_search_oracle(rng):
    ch, W, phi, aux = _instance(rng, N=4)
    pq = build_phase_quadratic(ch, W, aux)
    phi_grid, f_grid = grid_min_phase(pq.Q, pq.q, pq.c_const)
    gap = grid_gap_bound(pq.Q, pq.q)
    refined = rcg_minimize(pq, phi_grid).objective
    assert f_grid - gap - 1e-6 <= refined <= f_grid + 1e-12
    # independent random starts reach the grid optimum
    best = min(rcg_minimize(pq, _unit(rng, 4)).objective for _ in range(8))
    assert f_grid - gap - 1e-6 <= best <= f_grid + 1e-6


def test_iterates_descend_and_stay_on_manifold(rng):
    for _ in range(5):
        ch, W, phi, aux = _instance(rng, N=16)
        res = rcg_minimize(build_phase_quadratic(ch, W, aux), phi)
        assert all(b <= a + 1e-12 for a, b in zip(res.trace, res.trace[1:]))
        assert res.max_modulus_error <= 1e-10
        assert res.max_tangency <= 1e-10


def test_phase_step_increases_rate(rng):
    for _ in range(5):
        ch, W, phi, _ = _instance(rng, N=10)
        before = sum_rate(composite_channels(ch, phi), W, SIGMA2)
        aux = optimal_auxiliaries(composite_channels(ch, phi), W, SIGMA2)
        new = rcg_minimize(build_phase_quadratic(ch, W, aux), phi).phi
        assert sum_rate(composite_channels(ch, new), W, SIGMA2) >= before - 1e-8
