"""Dense-matrix reference implementation.

Nothing here uses the closed-form products. Each (k, -k) pair is built as an
explicit 4x4 operator from fermionic ladder operators, exponentiated through
its own eigendecomposition, and compared with the Uhlmann fidelity computed
from matrix square roots. The eigensolver is a cyclic complex Jacobi method.

Basis order for a pair is ``|11>, |00>, |01>, |10>`` (occupations of k, -k):
the first two span the even-parity sector, where the Hamiltonian reads
``epsilon sz + delta sy`` up to a constant.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .model import MomentumMode

MAX_DIM = 64
MAX_SWEEPS = 50
HERMITIAN_TOL = 1e-13
PSD_TOL = 1e-12
TRACE_TOL = 1e-10


class JacobiConvergenceError(ArithmeticError):
    def __init__(self, sweeps: int, off_norm: float, norm: float):
        super().__init__(f"Jacobi did not converge in {sweeps} sweeps: off-diagonal norm {off_norm:.3e} (matrix norm {norm:.3e})")
        self.sweeps = sweeps
        self.off_norm = off_norm
        self.norm = norm


class NotPSDError(ValueError):
    pass


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


def as_hermitian(a) -> np.ndarray:
    """Validate and symmetrize a dense Hermitian matrix (complex copy)."""
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not 0 < a.shape[0] <= MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    asym = np.max(np.abs(a - a.conj().T))
    if asym > HERMITIAN_TOL * max(1.0, np.max(np.abs(a))):
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    return (a + a.conj().T) / 2


def _off_norm(a):
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _jacobi_rotation(app, aqq, apq):
    """Unitary 2x2 G with (G^+ [[app, apq], [apq*, aqq]] G) diagonal."""
    r = abs(apq)
    phase = apq / r
    diff = aqq - app
    if abs(diff) > 1e150 * r:
        t = r / diff
    else:
        theta = diff / (2.0 * r)
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    return np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])


def eig_hermitian(a, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition by cyclic Jacobi rotations.

    Each rotation first removes the phase of ``a[p, q]`` and then applies the
    real symmetric Jacobi rotation. Off-diagonal elements that no longer
    change the diagonal in floating point are dropped after a few sweeps.

    Returns:
        Eigenvalues in ascending order and the unitary matrix of eigenvectors
        (as columns).

    Raises:
        JacobiConvergenceError: if the off-diagonal norm is still above
            1e-13 times the matrix norm after ``max_sweeps`` sweeps.
    """
    a = as_hermitian(a)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = float(np.linalg.norm(a))
    for sweep in range(max_sweeps):
        if _off_norm(a) == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                if sweep > 3 and abs(app) + 100.0 * r == abs(app) and abs(aqq) + 100.0 * r == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                g = _jacobi_rotation(app, aqq, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        off = _off_norm(a)
        if off > 1e-13 * norm:
            raise JacobiConvergenceError(max_sweeps, off, norm)
    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], v[:, order])


def sqrt_psd(a) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in [-1e-12, 0) are treated as zero.

    Raises:
        NotPSDError: for an eigenvalue below -1e-12.
    """
    w, v = eig_hermitian(a)
    if w[0] < -PSD_TOL:
        raise NotPSDError(f"smallest eigenvalue {w[0]:.3e} is negative")
    root = np.sqrt(np.clip(w, 0.0, None))
    out = (v * root) @ v.conj().T
    return (out + out.conj().T) / 2


def _check_state(r, name):
    tr = np.trace(r).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} has trace {tr}, expected 1")


def singular_values(x, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Singular values by one-sided (Hestenes) Jacobi, descending.

    Columns are rotated pairwise until mutually orthogonal; the singular
    values are then the column norms. Small singular values keep an absolute
    error of order eps * ||x||, which the route through eigenvalues of
    x^+ x would inflate to sqrt(eps).
    """
    u = np.array(x, dtype=complex)
    n = u.shape[1]
    # Columns below this squared norm hold only rounding noise; their singular
    # values are negligible and they can never be made orthogonal.
    floor = (1e-15 * float(np.linalg.norm(u))) ** 2
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = float(np.vdot(u[:, i], u[:, i]).real)
                beta = float(np.vdot(u[:, j], u[:, j]).real)
                if min(alpha, beta) <= floor:
                    continue
                gamma = complex(np.vdot(u[:, i], u[:, j]))
                if abs(gamma) <= 1e-15 * math.sqrt(alpha) * math.sqrt(beta):
                    continue
                rotated = True
                idx = [i, j]
                u[:, idx] = u[:, idx] @ _jacobi_rotation(alpha, beta, gamma)
        if not rotated:
            break
    else:
        raise JacobiConvergenceError(max_sweeps, float("nan"), float(np.linalg.norm(x)))
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def fidelity_from_roots(root0, root1) -> float:
    """Uhlmann fidelity given the square roots of the two states.

    tr sqrt(sqrt(r1) r0 sqrt(r1)) is the sum of singular values of
    sqrt(r0) sqrt(r1).
    """
    return float(np.sum(singular_values(np.asarray(root0) @ np.asarray(root1))))


def uhlmann_fidelity(r0, r1) -> float:
    """tr sqrt(sqrt(r1) r0 sqrt(r1)) for two density matrices."""
    r0 = as_hermitian(r0)
    r1 = as_hermitian(r1)
    if r0.shape != r1.shape:
        raise ValueError(f"shape mismatch {r0.shape} vs {r1.shape}")
    _check_state(r0, "r0")
    _check_state(r1, "r1")
    return fidelity_from_roots(sqrt_psd(r0), sqrt_psd(r1))


# Pair Hilbert space, standard order |n_k n_-k> with index 2 n_k + n_-k.
_A = np.array([[0.0, 1.0], [0.0, 0.0]])  # annihilates |1> -> |0>
_Z = np.diag([1.0, -1.0])
_I2 = np.eye(2)
C_K = np.kron(_A, _I2)
C_MK = np.kron(_Z, _A)  # Jordan-Wigner string on the first mode
_PERM = [3, 0, 1, 2]  # -> |11>, |00>, |01>, |10>


def pair_hamiltonian_dense(mode: MomentumMode) -> np.ndarray:
    """eps (n_k + n_-k) + delta (-i c_k^+ c_-k^+ + h.c.) as a 4x4 matrix."""
    n_tot = C_K.T @ C_K + C_MK.T @ C_MK
    pair = -1j * (C_K.T @ C_MK.T)
    h = mode.epsilon * n_tot + mode.delta * (pair + pair.conj().T)
    return h[np.ix_(_PERM, _PERM)]


def gibbs_state(h, beta: float, power: float = 1.0) -> np.ndarray:
    """(exp(-beta h) / tr exp(-beta h)) ** power via eigendecomposition.

    Energies are shifted by the ground level so nothing overflows.
    ``power=0.5`` gives the square root without going through the
    (possibly nearly singular) state itself.
    """
    w, v = eig_hermitian(h)
    weights = np.exp(-beta * (w - w[0]))
    weights = (weights / weights.sum()) ** power
    rho = (v * weights) @ v.conj().T
    return (rho + rho.conj().T) / 2


def evolution(h, t: float) -> np.ndarray:
    """exp(-i h t)."""
    w, v = eig_hermitian(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def mode_density_dense(mode: MomentumMode, beta: float) -> np.ndarray:
    """4x4 Gibbs state of one (k, -k) pair."""
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    return gibbs_state(pair_hamiltonian_dense(mode), beta)


def mode_density_root(mode: MomentumMode, beta: float) -> np.ndarray:
    """Square root of :func:`mode_density_dense`, built from the Hamiltonian."""
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    return gibbs_state(pair_hamiltonian_dense(mode), beta, power=0.5)


def dense_thermal_fidelity(m0: MomentumMode, m1: MomentumMode, beta0: float, beta1: float) -> float:
    """Uhlmann fidelity of the two 4x4 pair Gibbs states."""
    return fidelity_from_roots(mode_density_root(m0, beta0), mode_density_root(m1, beta1))


def dense_echo(m0: MomentumMode, m1: MomentumMode, beta: float, t: float) -> float:
    """F(rho, W rho W^+) with W = U1(t)^+ U0(t) and rho the Gibbs state of H0.

    The full pair Hamiltonians are used, odd-sector phases included.
    """
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    h0 = pair_hamiltonian_dense(m0)
    h1 = pair_hamiltonian_dense(m1)
    root = gibbs_state(h0, beta, power=0.5)
    w = evolution(h1, t).conj().T @ evolution(h0, t)
    # sqrt(W rho W^+) = W sqrt(rho) W^+
    return fidelity_from_roots(root, w @ root @ w.conj().T)


PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def bloch_components(block) -> np.ndarray:
    """(x, y, z) coefficients of a 2x2 Hermitian block in the Pauli basis."""
    block = np.asarray(block)
    return np.array([np.trace(block @ PAULI[k]).real / 2 for k in "xyz"])


def random_density_matrix(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
