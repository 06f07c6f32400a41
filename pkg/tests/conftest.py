import functools
import math

import numpy as np
import pytest

import risisac
from risisac import experiments, optimizer, phasesolver, wsolver
from risisac.scenario import SystemConfig

# Every solver call made anywhere in the session is audited for power and
# unit-modulus violations; the constraint-discipline acceptance test reads this.
AUDIT = {"w_calls": 0, "rcg_calls": 0, "bcd_calls": 0, "violations": []}
ACCEPTANCE_LINES = []

_MODULES = (risisac, experiments, optimizer, phasesolver, wsolver)


def _patch(original, wrapper):
    for mod in _MODULES:
        for name, obj in list(vars(mod).items()):
            if obj is original:
                setattr(mod, name, wrapper)


def _audit_w(fn):
    @functools.wraps(fn)
    def wrapped(H, aux, s, P, *args, **kw):
        sol = fn(H, aux, s, P, *args, **kw)
        AUDIT["w_calls"] += 1
        if sol.power > P * (1 + 1e-6):
            AUDIT["violations"].append(("w_subproblem power", sol.power / P))
        return sol

    return wrapped


def _audit_rcg(fn):
    @functools.wraps(fn)
    def wrapped(*args, **kw):
        res = fn(*args, **kw)
        AUDIT["rcg_calls"] += 1
        if res.max_modulus_error > 1e-10:
            AUDIT["violations"].append(("rcg modulus", res.max_modulus_error))
        return res

    return wrapped


def _audit_bcd(fn):
    @functools.wraps(fn)
    def wrapped(cfg, ch, *args, **kw):
        W, phi, rep = fn(cfg, ch, *args, **kw)
        AUDIT["bcd_calls"] += 1
        if np.linalg.norm(W) ** 2 > cfg.P * (1 + 1e-6):
            AUDIT["violations"].append(("bcd power", np.linalg.norm(W) ** 2 / cfg.P))
        if rep.max_modulus_error > 1e-10 or np.max(np.abs(np.abs(phi) - 1)) > 1e-10:
            AUDIT["violations"].append(("bcd modulus", rep.max_modulus_error))
        return W, phi, rep

    return wrapped


_patch(wsolver.solve_w_subproblem, _audit_w(wsolver.solve_w_subproblem))
_patch(phasesolver.rcg_minimize, _audit_rcg(phasesolver.rcg_minimize))
_patch(optimizer.bcd_solve, _audit_bcd(optimizer.bcd_solve))


def pytest_collection_modifyitems(config, items):
    # acceptance last, constraint discipline at the very end
    def key(item):
        name = item.nodeid
        if "test_acceptance" not in name:
            return 0
        return 2 if "criterion_9" in name else 1

    items.sort(key=key)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_cfg():
    return SystemConfig(M=4, K=2, N=8)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
