"""Finite-temperature Loschmidt echo for quasi-free models.

The input state is the Gibbs state of H0 at inverse temperature beta, which
commutes with U0(t); the echo is the fidelity between it and its image under
U1(t). Per pair, with a = beta Lambda^0 and

    s = sin^2(theta^0 - theta^1) sin^2(Lambda^1 t),

the factor is

    (1 + cosh a)^{-1} {1 + sqrt([(1 - s) cosh 2a + s + 1] / 2)}.

Dividing through by e^a gives

    [2 e^{-a} + sqrt((1 - s)(1 + e^{-4a}) + 2 (1 + s) e^{-2a})] / (1 + e^{-a})^2,

and 1 - s is formed as cos^2 dtheta + sin^2 dtheta cos^2(Lambda^1 t), a sum
of nonnegative terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fidelity import LOG2, FidelityBreakdown, _breakdown, _check_beta, log1pexp_neg
from .model import MomentumMode, QuasiFreeModel, check_comparable


@dataclass(frozen=True)
class EchoQuery:
    model0: QuasiFreeModel
    model1: QuasiFreeModel
    beta: float
    time: float = 0.0

    def __post_init__(self):
        check_comparable(self.model0, self.model1)
        if math.isnan(self.beta) or not self.beta > 0.0:
            raise ValueError(f"beta must be positive or infinite, got {self.beta}")
        _check_time(self.time)


def _check_time(t):
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"time must be finite and nonnegative, got {t}")


def angle_terms(c0, s0, c1, s1):
    """(cos^2, sin^2) of theta^0 - theta^1 from the unit vectors."""
    return (c0 * c1 + s0 * s1) ** 2, (c0 * s1 - s0 * c1) ** 2


def log_echo_kernel(a, cos2d, sin2d, phase):
    """Vectorized log echo factor; ``phase`` is Lambda^1 * t."""
    a = np.asarray(a, dtype=float)
    sin2t = np.sin(phase) ** 2
    s = sin2d * sin2t
    one_minus_s = cos2d + sin2d * np.cos(phase) ** 2
    with np.errstate(divide="ignore"):
        log_m = np.logaddexp(np.log(one_minus_s) + np.log1p(np.exp(-4.0 * a)), LOG2 + np.log1p(s) - 2.0 * a)
    log_num = np.logaddexp(LOG2 - a, 0.5 * log_m)
    log_den = 2.0 * log1pexp_neg(a)
    # No rotation of the block (s == 0): the factor is exactly one.
    return np.where(s == 0.0, 0.0, log_num - log_den)


def mode_echo(m0: MomentumMode, m1: MomentumMode, beta: float, t: float) -> float:
    """Echo factor of one (k, -k) pair."""
    _check_beta(beta)
    _check_time(t)
    cos2d, sin2d = angle_terms(m0.cos_theta, m0.sin_theta, m1.cos_theta, m1.sin_theta)
    out = log_echo_kernel(beta * m0.lambda_k, cos2d, sin2d, m1.lambda_k * t)
    return math.exp(min(float(out), 0.0))


def thermal_echo(q: EchoQuery) -> FidelityBreakdown:
    if math.isinf(q.beta):
        return ground_state_echo(q.model0, q.model1, q.time)
    c0, s0 = q.model0.unit_vectors()
    c1, s1 = q.model1.unit_vectors()
    cos2d, sin2d = angle_terms(c0, s0, c1, s1)
    return _breakdown(log_echo_kernel(q.beta * q.model0.lambdas, cos2d, sin2d, q.model1.lambdas * q.time))


def ground_state_echo(m0: QuasiFreeModel, m1: QuasiFreeModel, t: float) -> FidelityBreakdown:
    """Zero-temperature echo: prod_k sqrt(1 - sin^2(dtheta) sin^2(Lambda^1 t))."""
    check_comparable(m0, m1)
    _check_time(t)
    c0, s0 = m0.unit_vectors()
    c1, s1 = m1.unit_vectors()
    cos2d, sin2d = angle_terms(c0, s0, c1, s1)
    phase = m1.lambdas * t
    per_mode = np.minimum(np.sqrt(cos2d + sin2d * np.cos(phase) ** 2), 1.0)
    per_mode = np.where(sin2d * np.sin(phase) ** 2 == 0.0, 1.0, per_mode)
    with np.errstate(divide="ignore"):
        log_total = float(np.sum(np.log(per_mode)))
    return FidelityBreakdown(per_mode, log_total, math.exp(log_total))


def echo_time_series(model0: QuasiFreeModel, model1: QuasiFreeModel, beta: float, times: Sequence[float]) -> list[float]:
    """Total echo at each of ``times``; the time-independent terms are computed once."""
    check_comparable(model0, model1)
    times = np.asarray(times, dtype=float).reshape(-1)
    for t in times:
        _check_time(t)
    c0, s0 = model0.unit_vectors()
    c1, s1 = model1.unit_vectors()
    cos2d, sin2d = angle_terms(c0, s0, c1, s1)
    phase = times[:, None] * model1.lambdas[None, :]
    if math.isinf(beta):
        per_mode = np.sqrt(cos2d + sin2d * np.cos(phase) ** 2)
        per_mode = np.where(sin2d * np.sin(phase) ** 2 == 0.0, 1.0, np.minimum(per_mode, 1.0))
        return [float(v) for v in np.prod(per_mode, axis=1)]
    _check_beta(beta)
    a = beta * model0.lambdas
    log_f = np.minimum(log_echo_kernel(a[None, :], cos2d, sin2d, phase), 0.0)
    return [math.exp(v) for v in np.sum(log_f, axis=1)]
