"""Density-matrix functionals: fidelity, trace distance, entropies.

All entropic quantities use base-2 logarithms, including the relative
entropy, so every number in this module is in bits.  Matrix functions are
evaluated by Hermitian eigendecomposition with small negative eigenvalues
clamped to zero; nothing here is iterative.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .dynamics import ModelParams, excitation_probabilities
from .states import Partition, TwoQubitState

#: Eigenvalues below this are treated as exact zeros inside entropies.
ENTROPY_EIG_FLOOR = 1e-15


class FidelityIndex(Enum):
    """The six partitions with a closed-form overlap against their t=0 state."""

    F1 = Partition.ATOM_ATOM
    F2 = Partition.CAVITY_CAVITY
    F3 = Partition.RESERVOIR_RESERVOIR
    F4 = Partition.ATOM_CAVITY_INTRA
    F5 = Partition.ATOM_RESERVOIR_INTRA
    F6 = Partition.CAVITY_RESERVOIR_INTRA


def _as_matrix(state: TwoQubitState | np.ndarray) -> np.ndarray:
    if isinstance(state, TwoQubitState):
        return state.matrix
    return np.asarray(state, dtype=complex)


def _clamped_eigh(
    rho: np.ndarray, psd_tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with negatives clamped; rejects genuinely non-PSD input."""
    vals, vecs = np.linalg.eigh(rho)
    if vals[0] < -psd_tol:
        raise ValueError(
            f"matrix is not positive semidefinite: min eigenvalue {vals[0]:.3e}"
        )
    return np.clip(vals, 0.0, None), vecs


def fidelity(
    rho1: TwoQubitState | np.ndarray,
    rho2: TwoQubitState | np.ndarray,
    psd_tol: float = 1e-10,
) -> float:
    """Overlap fidelity (tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 in [0, 1].

    Symmetric in its arguments to ~1e-10.  Raises ValueError when either
    input has an eigenvalue below -psd_tol.
    """
    m1 = _as_matrix(rho1)
    m2 = _as_matrix(rho2)
    vals1, vecs1 = _clamped_eigh(m1, psd_tol)
    _clamped_eigh(m2, psd_tol)
    sqrt1 = (vecs1 * np.sqrt(vals1)) @ vecs1.conj().T
    inner = sqrt1 @ m2 @ sqrt1
    inner = 0.5 * (inner + inner.conj().T)
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return min(1.0, float(np.sum(np.sqrt(vals)) ** 2))


def trace_distance(
    rho1: TwoQubitState | np.ndarray, rho2: TwoQubitState | np.ndarray
) -> float:
    """Half the trace norm of the difference."""
    diff = _as_matrix(rho1) - _as_matrix(rho2)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def von_neumann_entropy(rho: TwoQubitState | np.ndarray) -> float:
    """Entropy -sum(lam * log2 lam) in bits; eigenvalues below 1e-15 count as zero."""
    vals = np.linalg.eigvalsh(_as_matrix(rho))
    vals = vals[vals > ENTROPY_EIG_FLOOR]
    return max(0.0, float(-np.sum(vals * np.log2(vals))))


def binary_entropy(x: float) -> float:
    """H(x) = -x log2 x - (1-x) log2(1-x), with H(0) = H(1) = 0."""
    if x < -1e-12 or x > 1.0 + 1e-12:
        raise ValueError(f"binary_entropy argument out of range: {x}")
    x = min(1.0, max(0.0, x))
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def relative_entropy(
    rho: TwoQubitState | np.ndarray,
    sigma: TwoQubitState | np.ndarray,
    support_tol: float = 1e-12,
) -> float:
    """Relative entropy of rho with respect to sigma, in bits.

    Finite only when the support of rho lies inside the support of sigma
    (sigma eigenvalues above `support_tol`); otherwise returns math.inf.
    """
    m_rho = _as_matrix(rho)
    vals_s, vecs_s = np.linalg.eigh(_as_matrix(sigma))
    # mass of rho carried by each eigenvector of sigma
    mass = np.real(np.einsum("ji,jk,ki->i", vecs_s.conj(), m_rho, vecs_s))
    on_support = vals_s > support_tol
    kernel_mass = float(np.sum(mass[~on_support]))
    if kernel_mass > support_tol:
        return math.inf

    vals_r = np.linalg.eigvalsh(m_rho)
    vals_r = vals_r[vals_r > ENTROPY_EIG_FLOOR]
    cross = float(np.sum(mass[on_support] * np.log2(vals_s[on_support])))
    return max(0.0, float(np.sum(vals_r * np.log2(vals_r))) - cross)


def fidelity_closed_form(
    index: FidelityIndex, params: ModelParams, t: float
) -> float:
    """Closed-form overlap between a partition's state at time 0 and at time t.

    Each expression is an explicit function of (p, q, gamma_d) and the
    initial weights, so it doubles as an analytic check on the generic
    eigendecomposition route.
    """
    probs = excitation_probabilities(params, t)
    p, q, g = probs.p, probs.q, probs.gamma_d
    a2 = abs(params.amp_a) ** 2
    b2 = abs(params.amp_b) ** 2
    if index is FidelityIndex.F1:
        value = 1.0 - p
    elif index is FidelityIndex.F2:
        value = 1.0 - q
    elif index is FidelityIndex.F3:
        value = 1.0 - g
    elif index is FidelityIndex.F4:
        value = (
            math.sqrt(a2 * a2 * (1.0 - p)) + math.sqrt(b2 * b2 + a2 * b2 * g)
        ) ** 2
    elif index is FidelityIndex.F5:
        value = (
            math.sqrt(a2 * a2 * (1.0 - p)) + math.sqrt(b2 * b2 + a2 * b2 * q)
        ) ** 2
    elif index is FidelityIndex.F6:
        value = b2 + a2 * (1.0 - p)
    else:
        raise ValueError(f"unknown fidelity index: {index!r}")
    return min(1.0, max(0.0, value))
