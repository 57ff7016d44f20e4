"""Uhlmann fidelity between Gibbs states of quasi-free fermionic models.

Per (k, -k) pair the fidelity factor is

    f_k = (2 + sqrt(T_k + 2)) / sqrt(Z_k^0 Z_k^1),
    T_k = 2 [cosh a cosh b + sinh a sinh b cos(theta^0 - theta^1)],
    Z_k = 2 + 2 cosh(beta Lambda_k),

with a = beta_0 Lambda^0, b = beta_1 Lambda^1. The "2 +" is the odd-parity
sector, on which the pair Hamiltonian acts trivially.

Everything is evaluated in log space. Writing h = (theta^0 - theta^1) / 2,

    T = cos^2 h (e^{a+b} + e^{-a-b}) + sin^2 h (e^{a-b} + e^{b-a})

is a sum of nonnegative terms, and dividing numerator and denominator by
e^{(a+b)/2} removes every growing exponential, so nothing overflows for any
beta and the identical-state case cancels to a few ulps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .model import (
    MomentumMode,
    QuasiFreeModel,
    ThermalStateSpec,
    check_comparable,
)

LOG2 = math.log(2.0)
CLAMP_TOLERANCE = 1e-12


class ScaledValue(NamedTuple):
    """A positive number stored as ``mantissa * exp(log_scale)``."""

    mantissa: float
    log_scale: float

    @property
    def log(self) -> float:
        return math.log(self.mantissa) + self.log_scale

    @property
    def value(self) -> float:
        return self.mantissa * math.exp(self.log_scale)


@dataclass(frozen=True)
class FidelityBreakdown:
    """Per-mode factors and their product.

    ``clamped`` counts per-mode factors that rounded above 1 and were clamped;
    ``max_excursion`` is the largest such overshoot.
    """

    per_mode: np.ndarray
    log_total: float
    total: float
    clamped: int = 0
    max_excursion: float = 0.0


def log1pexp_neg(x):
    """log(1 + exp(-x)) for x >= 0."""
    return np.log1p(np.exp(-np.asarray(x, dtype=float)))


def log_mode_partition(lambda_k, beta):
    """log(2 + 2 cosh(beta * Lambda)) = x + 2 log(1 + e^{-x}), exact for x = beta*Lambda >= 0."""
    x = np.asarray(beta, dtype=float) * np.asarray(lambda_k, dtype=float)
    out = x + 2.0 * log1pexp_neg(x)
    return float(out) if out.ndim == 0 else out


def mode_partition(lambda_k: float, beta: float) -> float:
    """Single-pair partition function 2 + 2 cosh(beta * Lambda).

    Raises:
        OverflowError: when the linear value is not representable; use
            :func:`log_mode_partition` instead.
    """
    _check_beta(beta)
    if lambda_k < 0:
        raise ValueError("lambda_k must be nonnegative")
    x = beta * lambda_k
    if x > 709.0:
        raise OverflowError(f"2 + 2 cosh({x}) overflows; use log_mode_partition")
    return 2.0 + 2.0 * math.cosh(x)


def _check_beta(beta):
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")


def half_angle_weights(c0, s0, c1, s1):
    """cos^2 and sin^2 of half the angle between unit vectors (c0, s0), (c1, s1).

    Uses |n0 + n1|^2 / 4 and |n0 - n1|^2 / 4, so antipodal vectors give an
    exact zero instead of cos(pi/2) rounding noise.
    """
    cos2 = ((c0 + c1) ** 2 + (s0 + s1) ** 2) / 4.0
    sin2 = ((c0 - c1) ** 2 + (s0 - s1) ** 2) / 4.0
    return cos2, sin2


def _log_weight(w):
    with np.errstate(divide="ignore"):
        return np.log(w)


def trace_product_log(a, b, cos2h, sin2h):
    """(mantissa, log scale) of T = Tr[rho^0 rho^1] for the unnormalized even-sector blocks."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = a + b
    d = np.abs(a - b)
    lc = _log_weight(cos2h)
    ls = _log_weight(sin2h)
    scale = np.maximum(lc + s, ls + d)
    mant = np.exp(lc + s - scale) * (1.0 + np.exp(-2.0 * s)) + np.exp(ls + d - scale) * (1.0 + np.exp(-2.0 * d))
    return mant, scale


def log_fidelity_kernel(a, b, c0, s0, c1, s1):
    """Vectorized log of the per-pair fidelity factor (unclamped).

    ``a``/``b`` are beta * Lambda for the two states; ``(c, s)`` are the
    Bogoliubov unit vectors.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cos2h, sin2h = half_angle_weights(c0, s0, c1, s1)
    s = a + b
    mant, scale = trace_product_log(a, b, cos2h, sin2h)
    log_t = np.log(mant) + scale
    log_m = np.logaddexp(log_t - s, LOG2 - s)  # (T + 2) e^{-s}
    log_num = np.logaddexp(LOG2 - 0.5 * s, 0.5 * log_m)  # (2 + sqrt(T + 2)) e^{-s/2}
    log_den = log1pexp_neg(a) + log1pexp_neg(b)  # sqrt(Z0 Z1) e^{-s/2}
    out = log_num - log_den
    # Identical blocks: the factor is exactly one.
    return np.where((a == b) & (sin2h == 0.0), 0.0, out)


def clamp_log_factors(log_f):
    """Clamp log factors to <= 0; return (clamped logs, count, max overshoot)."""
    log_f = np.asarray(log_f, dtype=float)
    over = log_f > 0.0
    count = int(np.count_nonzero(over))
    excursion = float(np.max(np.expm1(log_f[over]))) if count else 0.0
    return np.minimum(log_f, 0.0), count, excursion


def _breakdown(log_f) -> FidelityBreakdown:
    log_f, count, excursion = clamp_log_factors(log_f)
    log_total = float(np.sum(log_f))
    return FidelityBreakdown(np.exp(log_f), log_total, math.exp(log_total), count, excursion)


def mode_trace_product(m0: MomentumMode, m1: MomentumMode, beta0: float, beta1: float) -> ScaledValue:
    """Tr[rho_k^0(beta0) rho_k^1(beta1)] of the unnormalized even-sector blocks."""
    _check_beta(beta0)
    _check_beta(beta1)
    cos2h, sin2h = half_angle_weights(m0.cos_theta, m0.sin_theta, m1.cos_theta, m1.sin_theta)
    mant, scale = trace_product_log(beta0 * m0.lambda_k, beta1 * m1.lambda_k, cos2h, sin2h)
    return ScaledValue(float(mant), float(scale))


def mode_log_fidelity(m0: MomentumMode, m1: MomentumMode, beta0: float, beta1: float) -> float:
    _check_beta(beta0)
    _check_beta(beta1)
    out = log_fidelity_kernel(
        beta0 * m0.lambda_k, beta1 * m1.lambda_k, m0.cos_theta, m0.sin_theta, m1.cos_theta, m1.sin_theta
    )
    return min(float(out), 0.0)


def mode_fidelity(m0: MomentumMode, m1: MomentumMode, beta0: float, beta1: float) -> float:
    """Fidelity factor of one (k, -k) pair between two Gibbs states."""
    return math.exp(mode_log_fidelity(m0, m1, beta0, beta1))


def thermal_fidelity(s0: ThermalStateSpec, s1: ThermalStateSpec) -> FidelityBreakdown:
    """Uhlmann fidelity of two Gibbs states, as a product over index-paired modes.

    Two ground states (infinite beta) dispatch to :func:`ground_state_fidelity`.

    Raises:
        DimensionMismatchError: if the models have different mode counts.
        ValueError: if exactly one of the states is at infinite beta.
    """
    check_comparable(s0.model, s1.model)
    if s0.is_ground_state and s1.is_ground_state:
        return ground_state_fidelity(s0.model, s1.model)
    if s0.is_ground_state or s1.is_ground_state:
        raise ValueError("both states must be thermal or both ground states")
    c0, sn0 = s0.model.unit_vectors()
    c1, sn1 = s1.model.unit_vectors()
    log_f = log_fidelity_kernel(s0.beta * s0.model.lambdas, s1.beta * s1.model.lambdas, c0, sn0, c1, sn1)
    return _breakdown(log_f)


def ground_state_fidelity(m0: QuasiFreeModel, m1: QuasiFreeModel) -> FidelityBreakdown:
    """Overlap of the two Bogoliubov vacua: prod_k |cos((theta^0 - theta^1) / 2)|."""
    check_comparable(m0, m1)
    c0, s0 = m0.unit_vectors()
    c1, s1 = m1.unit_vectors()
    per_mode = np.minimum(np.hypot(c0 + c1, s0 + s1) / 2.0, 1.0)
    with np.errstate(divide="ignore"):
        log_total = float(np.sum(np.log(per_mode)))
    return FidelityBreakdown(per_mode, log_total, math.exp(log_total))


def fidelity_commuting(spectrum0: Sequence[float], spectrum1: Sequence[float], beta0: float, beta1: float) -> float:
    """Fidelity of Gibbs states of two commuting Hamiltonians.

    ``spectrum0[n]`` and ``spectrum1[n]`` are the energies of the same shared
    eigenvector.
    """
    e0 = np.asarray(spectrum0, dtype=float)
    e1 = np.asarray(spectrum1, dtype=float)
    if e0.shape != e1.shape:
        raise ValueError(f"spectra have lengths {e0.size} and {e1.size}")
    _check_beta(beta0)
    _check_beta(beta1)
    log_f = logsumexp(-(beta0 * e0 + beta1 * e1) / 2.0) - 0.5 * (logsumexp(-beta0 * e0) + logsumexp(-beta1 * e1))
    return math.exp(min(float(log_f), 0.0))


def fidelity_diagonal_fermions(eps0: Sequence[float], eps1: Sequence[float], beta0: float, beta1: float) -> float:
    """Fidelity for H = sum_k eps_k n_k (independent fermion modes).

    Both betas infinite gives the ground-state limit: zero as soon as one
    level changes sign between the two Hamiltonians.
    """
    e0 = np.asarray(eps0, dtype=float)
    e1 = np.asarray(eps1, dtype=float)
    if e0.shape != e1.shape:
        raise ValueError(f"level lists have lengths {e0.size} and {e1.size}")
    if math.isinf(beta0) and math.isinf(beta1):
        p0 = np.where(e0 < 0, 1.0, np.where(e0 > 0, 0.0, 0.5))
        p1 = np.where(e1 < 0, 1.0, np.where(e1 > 0, 0.0, 0.5))
        return float(np.prod(np.sqrt((1 - p0) * (1 - p1)) + np.sqrt(p0 * p1)))
    _check_beta(beta0)
    _check_beta(beta1)
    x0 = beta0 * e0
    x1 = beta1 * e1
    log_f = np.logaddexp(0.0, -(x0 + x1) / 2.0) - 0.5 * (np.logaddexp(0.0, -x0) + np.logaddexp(0.0, -x1))
    return math.exp(min(float(np.sum(np.minimum(log_f, 0.0))), 0.0))


def bures_distance(f: float) -> float:
    """sqrt(2 (1 - F)); F may exceed 1 by rounding up to 1e-12."""
    if not (0.0 <= f <= 1.0 + CLAMP_TOLERANCE):
        raise ValueError(f"fidelity {f} outside [0, 1]")
    return math.sqrt(2.0 * (1.0 - min(f, 1.0)))
