"""Quasi-free fermionic models and the XY-chain mapping.

Each momentum pair (k, -k) carries a kinetic term ``epsilon`` and a pairing
amplitude ``delta``. In the even-parity sector the pair Hamiltonian is
``epsilon * sz + delta * sy = Lambda * (cos(theta) sz + sin(theta) sy)``, with
quasiparticle energy ``Lambda = hypot(epsilon, delta)`` and Bogoliubov angle
``theta = atan2(delta, epsilon)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INFINITE = math.inf


class Grid(enum.Enum):
    """Momentum grid used when mapping the XY chain onto fermion pairs."""

    INTEGER = "integer"
    HALF_INTEGER = "half-integer"


@dataclass(frozen=True)
class MomentumMode:
    epsilon: float
    delta: float
    lambda_k: float
    theta_k: float

    @property
    def cos_theta(self) -> float:
        # Taken from (epsilon, delta) directly so antipodal pairs cancel exactly.
        return float(unit_vectors(self.epsilon, self.delta)[0])

    @property
    def sin_theta(self) -> float:
        return float(unit_vectors(self.epsilon, self.delta)[1])


def make_mode(epsilon: float, delta: float) -> MomentumMode:
    """Build a mode from its kinetic and pairing terms.

    Raises:
        ValueError: if either input is not finite.
    """
    epsilon = float(epsilon)
    delta = float(delta)
    if not (math.isfinite(epsilon) and math.isfinite(delta)):
        raise ValueError(f"mode parameters must be finite, got ({epsilon}, {delta})")
    lam = math.hypot(epsilon, delta)
    theta = math.atan2(delta, epsilon) if lam > 0.0 else 0.0
    # atan2 returns -pi for (negative, -0.0); keep theta in (-pi, pi].
    if theta == -math.pi:
        theta = math.pi
    return MomentumMode(epsilon, delta, lam, theta)


@dataclass(frozen=True)
class QuasiFreeModel:
    """An ordered collection of independent (k, -k) pairs.

    Stored as parallel arrays so the fidelity and echo kernels can vectorize
    over modes; ``modes`` gives the per-mode view.
    """

    epsilon: np.ndarray
    delta: np.ndarray
    _modes: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        eps = np.array(self.epsilon, dtype=float).reshape(-1)
        dlt = np.array(self.delta, dtype=float).reshape(-1)
        if eps.shape != dlt.shape:
            raise ValueError("epsilon and delta must have the same length")
        if eps.size == 0:
            raise ValueError("a model needs at least one mode")
        if not (np.all(np.isfinite(eps)) and np.all(np.isfinite(dlt))):
            raise ValueError("mode parameters must be finite")
        eps.flags.writeable = False
        dlt.flags.writeable = False
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta", dlt)
        object.__setattr__(self, "_modes", tuple(make_mode(e, d) for e, d in zip(eps, dlt)))

    @classmethod
    def from_modes(cls, modes: Iterable[MomentumMode]) -> QuasiFreeModel:
        modes = list(modes)
        return cls(np.array([m.epsilon for m in modes]), np.array([m.delta for m in modes]))

    @property
    def modes(self) -> tuple[MomentumMode, ...]:
        return self._modes

    def __len__(self) -> int:
        return self.epsilon.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiFreeModel):
            return NotImplemented
        return np.array_equal(self.epsilon, other.epsilon) and np.array_equal(self.delta, other.delta)

    def __hash__(self) -> int:
        return hash((self.epsilon.tobytes(), self.delta.tobytes()))

    @property
    def lambdas(self) -> np.ndarray:
        return np.hypot(self.epsilon, self.delta)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([m.theta_k for m in self._modes])

    def unit_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """(cos theta, sin theta) per mode, with (1, 0) for gapless modes."""
        return unit_vectors(self.epsilon, self.delta)


def unit_vectors(epsilon, delta) -> tuple[np.ndarray, np.ndarray]:
    eps = np.asarray(epsilon, dtype=float)
    dlt = np.asarray(delta, dtype=float)
    # Rescale first: for subnormal inputs hypot itself would lose digits.
    big = np.maximum(np.abs(eps), np.abs(dlt))
    gapless = big == 0.0
    safe = np.where(gapless, 1.0, big)
    e, d = eps / safe, dlt / safe
    norm = np.where(gapless, 1.0, np.hypot(e, d))
    return np.where(gapless, 1.0, e / norm), np.where(gapless, 0.0, d / norm)


def check_comparable(m0: QuasiFreeModel, m1: QuasiFreeModel) -> None:
    if len(m0) != len(m1):
        raise DimensionMismatchError(f"models have {len(m0)} and {len(m1)} modes")


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class XYParams:
    gamma: float
    lam: float
    n_sites: int
    grid: Grid = Grid.INTEGER

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2 or self.n_sites % 2:
            raise ValueError(f"n_sites must be an even integer >= 2, got {self.n_sites}")
        if not (math.isfinite(self.gamma) and math.isfinite(self.lam)):
            raise ValueError("gamma and lambda must be finite")
        object.__setattr__(self, "grid", Grid(self.grid))


def xy_phases(n_sites: int, grid: Grid = Grid.INTEGER) -> np.ndarray:
    """Phases 2*pi*j/N (integer grid) or 2*pi*(j - 1/2)/N, for j = 1..N/2."""
    j = np.arange(1, n_sites // 2 + 1, dtype=float)
    if Grid(grid) is Grid.HALF_INTEGER:
        j = j - 0.5
    return 2.0 * np.pi * j / n_sites


def xy_mode_arrays(gamma, lam, n_sites: int, grid: Grid = Grid.INTEGER):
    """Broadcasting version of the XY mapping.

    ``gamma`` and ``lam`` may be arrays; the mode axis is appended last.
    """
    phi = xy_phases(n_sites, grid)
    gamma = np.asarray(gamma, dtype=float)[..., None]
    lam = np.asarray(lam, dtype=float)[..., None]
    eps = np.cos(phi) - lam
    dlt = gamma * np.sin(phi)
    return np.broadcast_arrays(eps, dlt)


def xy_to_quasifree(p: XYParams) -> QuasiFreeModel:
    eps, dlt = xy_mode_arrays(p.gamma, p.lam, p.n_sites, p.grid)
    return QuasiFreeModel(eps, dlt)


def lambda_spectrum(m: QuasiFreeModel) -> list[float]:
    return [mode.lambda_k for mode in m.modes]


@dataclass(frozen=True)
class ThermalStateSpec:
    """Gibbs state of ``model`` at inverse temperature ``beta`` (``inf`` = ground state)."""

    model: QuasiFreeModel
    beta: float

    def __post_init__(self):
        beta = float(self.beta)
        if math.isnan(beta) or not beta > 0.0:
            raise ValueError(f"beta must be positive or infinite, got {self.beta}")
        object.__setattr__(self, "beta", beta)

    @property
    def is_ground_state(self) -> bool:
        return math.isinf(self.beta)


def model_from_pairs(pairs: Sequence[tuple[float, float]]) -> QuasiFreeModel:
    """Convenience constructor from ``[(epsilon, delta), ...]``."""
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return QuasiFreeModel(arr[:, 0], arr[:, 1])
