"""System configuration, array geometry and random channel realizations."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    """Raised for an inconsistent or unusable scenario configuration."""


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def db2lin(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def dbm2watt(x_dbm: float) -> float:
    return float(10.0 ** ((x_dbm - 30.0) / 10.0))


def _default_grid() -> list[float]:
    return [float(a) for a in range(-90, 91)]


@dataclass
class SystemConfig:
    """Scenario scalars. Distances in meters, angles in degrees, powers in dBm.

    ``epsilon=None`` means the beampattern similarity level is derived from the
    radar-only MSE floor as ``epsilon_ratio * floor``.
    """

    M: int = 8                 # BS antennas
    K: int = 4                 # users
    N: int = 36                # RIS elements
    P_dbm: float = 10.0
    sigma2_dbm: float = -80.0
    spacing_ratio: float = 0.5
    ris_spacing_ratio: float = 0.5
    d_BR: float = 50.0
    d_Ru: float = 4.0
    alpha_Bu: float = 3.5
    alpha_BR: float = 2.5
    alpha_Ru: float = 2.5
    ricean_BR_db: float = 3.0
    ricean_Ru_db: float = 3.0
    ricean_Bu_db: float = -math.inf  # beta_Bu = 0, pure Rayleigh
    C0_db: float = -30.0             # path gain at 1 m
    target_angles: list[float] = field(default_factory=lambda: [-35.0, 0.0, 35.0])
    beam_width_deg: float = 10.0
    angle_grid: list[float] = field(default_factory=_default_grid)
    epsilon: float | None = None
    epsilon_ratio: float = 1.25
    seed: int = 0

    def __post_init__(self):
        self.target_angles = [float(t) for t in self.target_angles]
        self.angle_grid = [float(t) for t in self.angle_grid]
        self.validate()

    @property
    def T(self) -> int:
        return len(self.target_angles)

    @property
    def L(self) -> int:
        return len(self.angle_grid)

    @property
    def P(self) -> float:
        """Transmit power budget in watts."""
        return dbm2watt(self.P_dbm)

    @property
    def sigma2(self) -> float:
        """Per-user noise power in watts."""
        return dbm2watt(self.sigma2_dbm)

    @property
    def C0(self) -> float:
        return float(db2lin(self.C0_db))

    def validate(self) -> None:
        for name in ("M", "K", "N"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        grid = np.asarray(self.angle_grid)
        if grid.size < 2:
            raise ConfigError("angle grid needs at least two points")
        if np.any(np.diff(grid) <= 0):
            raise ConfigError("angle grid must be strictly increasing")
        if grid[0] < -90 or grid[-1] > 90:
            raise ConfigError("angle grid must lie within [-90, 90] degrees")
        if self.beam_width_deg <= 0:
            raise ConfigError("beam width must be positive")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.epsilon_ratio <= 0:
            raise ConfigError("epsilon_ratio must be positive")
        if not (self.P > 0 and self.sigma2 > 0):
            raise ConfigError("powers must be positive")
        if self.d_BR <= 0 or self.d_Ru <= 0:
            raise DomainError("distances must be positive")

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if math.isinf(d["ricean_Bu_db"]):
            d["ricean_Bu_db"] = None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SystemConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        d = dict(d)
        for key in ("ricean_BR_db", "ricean_Ru_db", "ricean_Bu_db"):
            # null in the file means a pure Rayleigh link
            if key in d and d[key] is None:
                d[key] = -math.inf
        return cls(**d)

    @classmethod
    def load(cls, path) -> "SystemConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


@dataclass
class ChannelSet:
    """One channel realization.

    ``G`` is RIS<-BS (N x M), row ``k`` of ``h_r`` is the RIS-user channel
    (length N) and row ``k`` of ``h_d`` the BS-user channel (length M).
    """

    G: np.ndarray
    h_r: np.ndarray
    h_d: np.ndarray

    @property
    def K(self) -> int:
        return self.h_d.shape[0]

    @property
    def M(self) -> int:
        return self.G.shape[1]

    @property
    def N(self) -> int:
        return self.G.shape[0]

    def without_ris(self) -> "ChannelSet":
        return ChannelSet(np.zeros_like(self.G), np.zeros_like(self.h_r), self.h_d.copy())


def steering_vector(theta_deg: float, M: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """ULA response ``exp(j 2 pi m d sin(theta))`` for m = 0..M-1."""
    if not -90.0 <= theta_deg <= 90.0:
        raise DomainError(f"angle {theta_deg} outside [-90, 90] degrees")
    if M < 1:
        raise DomainError("M must be >= 1")
    s = math.sin(math.radians(theta_deg))
    return np.exp(2j * np.pi * spacing_ratio * s * np.arange(M))


def steering_matrix(angles_deg, M: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """Steering vectors stacked as columns, shape (M, len(angles))."""
    s = np.sin(np.deg2rad(np.asarray(angles_deg, dtype=float)))
    return np.exp(2j * np.pi * spacing_ratio * np.outer(np.arange(M), s))


def ideal_beampattern(cfg: SystemConfig) -> np.ndarray:
    grid = np.asarray(cfg.angle_grid)
    half = cfg.beam_width_deg / 2.0
    tol = 1e-9
    pd = np.zeros(grid.size)
    for t in cfg.target_angles:
        pd[(grid >= t - half - tol) & (grid <= t + half + tol)] = 1.0
    if not pd.any():
        raise ConfigError("ideal beampattern is zero on the whole angle grid")
    return pd


def path_gain(cfg: SystemConfig, d: float, alpha: float) -> float:
    """Linear power gain C0 * d^-alpha."""
    if d <= 0:
        raise DomainError("distance must be positive")
    return cfg.C0 * d ** (-alpha)


def _sin_along_axis(src, dst) -> float:
    # arrays are laid out along the y axis, broadside facing +x
    v = np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)
    return float(np.clip(v[1] / np.hypot(v[0], v[1]), -1.0, 1.0))


def _rician(rng, shape, beta, los, gain):
    nlos = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    if np.isinf(beta):
        return np.sqrt(gain) * los
    return np.sqrt(gain) * (np.sqrt(beta / (1 + beta)) * los + np.sqrt(1 / (1 + beta)) * nlos)


def user_positions(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Users uniform on a circle of radius d_Ru around the RIS at (d_BR, 0)."""
    psi = rng.uniform(0.0, 2 * np.pi, size=cfg.K)
    return np.column_stack([cfg.d_BR + cfg.d_Ru * np.cos(psi), cfg.d_Ru * np.sin(psi)])


def generate_channels(cfg: SystemConfig, rng: np.random.Generator) -> ChannelSet:
    M, N, K = cfg.M, cfg.N, cfg.K
    bs = np.zeros(2)
    ris = np.array([cfg.d_BR, 0.0])
    users = user_positions(cfg, rng)

    def a_bs(s):
        return np.exp(2j * np.pi * cfg.spacing_ratio * s * np.arange(M))

    def a_ris(s):
        return np.exp(2j * np.pi * cfg.ris_spacing_ratio * s * np.arange(N))

    b_br, b_ru, b_bu = (float(db2lin(x)) for x in (cfg.ricean_BR_db, cfg.ricean_Ru_db, cfg.ricean_Bu_db))

    los_G = np.outer(a_ris(_sin_along_axis(ris, bs)), a_bs(_sin_along_axis(bs, ris)).conj())
    G = _rician(rng, (N, M), b_br, los_G, path_gain(cfg, cfg.d_BR, cfg.alpha_BR))

    h_r = np.empty((K, N), dtype=complex)
    h_d = np.empty((K, M), dtype=complex)
    for k, u in enumerate(users):
        h_r[k] = _rician(rng, N, b_ru, a_ris(_sin_along_axis(ris, u)), path_gain(cfg, cfg.d_Ru, cfg.alpha_Ru))
        d_bu = float(np.linalg.norm(u - bs))
        h_d[k] = _rician(rng, M, b_bu, a_bs(_sin_along_axis(bs, u)), path_gain(cfg, d_bu, cfg.alpha_Bu))
    return ChannelSet(G, h_r, h_d)


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent stream for one Monte-Carlo trial."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))
