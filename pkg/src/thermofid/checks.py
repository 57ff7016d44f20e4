"""Seeded random-draw comparisons between the closed forms and the dense oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .fidelity import mode_fidelity
from .loschmidt import mode_echo
from .model import MomentumMode, make_mode

ORACLE_TOL = 1e-10
MULTIPLICATIVITY_TOL = 1e-12


@dataclass(frozen=True)
class SuiteReport:
    name: str
    draws: int
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: draws={self.draws} max_abs_dev={self.max_deviation:.3e} tol={self.tolerance:.0e} {status}"


def draw_mode(rng: np.random.Generator, lambda_max: float = 5.0) -> MomentumMode:
    """Mode with Lambda uniform in [0, lambda_max] and theta uniform in (-pi, pi]."""
    lam = rng.uniform(0.0, lambda_max)
    theta = math.pi - rng.uniform(0.0, 2.0 * math.pi)
    return make_mode(lam * math.cos(theta), lam * math.sin(theta))


def draw_beta(rng: np.random.Generator, lo: float = 0.01, hi: float = 50.0) -> float:
    return float(rng.uniform(lo, hi))


def fidelity_suite(seed: int, draws: int = 1000) -> SuiteReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        m0, m1 = draw_mode(rng), draw_mode(rng)
        b0, b1 = draw_beta(rng), draw_beta(rng)
        dev = abs(mode_fidelity(m0, m1, b0, b1) - oracle.dense_thermal_fidelity(m0, m1, b0, b1))
        worst = max(worst, dev)
    return SuiteReport("mode_fidelity vs dense", draws, worst, ORACLE_TOL)


def echo_suite(seed: int, draws: int = 500, t_max: float = 20.0) -> SuiteReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        m0, m1 = draw_mode(rng), draw_mode(rng)
        beta = draw_beta(rng)
        t = float(rng.uniform(0.0, t_max))
        worst = max(worst, abs(mode_echo(m0, m1, beta, t) - oracle.dense_echo(m0, m1, beta, t)))
    return SuiteReport("mode_echo vs dense", draws, worst, ORACLE_TOL)


def multiplicativity_suite(seed: int, draws: int = 100) -> SuiteReport:
    """16x16 fidelity of two-pair product states against the product of 4x4 fidelities."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        a0, a1, b0, b1 = (draw_mode(rng) for _ in range(4))
        beta0, beta1 = draw_beta(rng), draw_beta(rng)
        ra0, ra1 = oracle.mode_density_root(a0, beta0), oracle.mode_density_root(a1, beta1)
        rb0, rb1 = oracle.mode_density_root(b0, beta0), oracle.mode_density_root(b1, beta1)
        joint = oracle.fidelity_from_roots(np.kron(ra0, rb0), np.kron(ra1, rb1))
        product = oracle.fidelity_from_roots(ra0, ra1) * oracle.fidelity_from_roots(rb0, rb1)
        worst = max(worst, abs(joint - product))
    return SuiteReport("tensor-product multiplicativity", draws, worst, MULTIPLICATIVITY_TOL)


def run_oracle_checks(seed: int, draws: int = 1000) -> list[SuiteReport]:
    return [
        fidelity_suite(seed, draws),
        echo_suite(seed + 1, max(1, draws // 2)),
        multiplicativity_suite(seed + 2, max(1, draws // 10)),
    ]
