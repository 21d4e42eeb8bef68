"""Reduced two-qubit density matrices of the composite system.

Two identical emitter-cavity-reservoir subsystems share one excitation with
weights amp_a (subsystem 1) and amp_b (subsystem 2).  Tracing out all but two
of the six qubits leaves a 4x4 matrix in the basis |00>, |01>, |10>, |11>
whose only off-diagonal entry is the |01><10| coherence and whose |11>
population vanishes.  Seven partitions are supported; the remaining
cross-subsystem pairings add nothing qualitatively new and are excluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import ModelParams, excitation_probabilities


class Partition(Enum):
    """Which pair of qubits is kept after the partial trace."""

    ATOM_ATOM = "atom-atom"
    CAVITY_CAVITY = "cavity-cavity"
    RESERVOIR_RESERVOIR = "reservoir-reservoir"
    ATOM_CAVITY_INTRA = "atom-cavity-intra"
    ATOM_RESERVOIR_INTRA = "atom-reservoir-intra"
    CAVITY_RESERVOIR_INTRA = "cavity-reservoir-intra"
    ATOM_RESERVOIR_CROSS = "atom-reservoir-cross"


#: The three partitions whose matrices share the Bell-like template and
#: differ only in which residence probability scales the excited block.
EQUIVALENT_FAMILIES = (
    Partition.ATOM_ATOM,
    Partition.CAVITY_CAVITY,
    Partition.RESERVOIR_RESERVOIR,
)


@dataclass(frozen=True)
class TwoQubitState:
    """A 4x4 density matrix with a single |01><10| coherence and empty |11>."""

    matrix: np.ndarray
    partition: Partition | None = None

    @property
    def u11(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def u22(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def u33(self) -> float:
        return float(self.matrix[2, 2].real)

    @property
    def u44(self) -> float:
        return float(self.matrix[3, 3].real)

    @property
    def u23(self) -> complex:
        return complex(self.matrix[1, 2])


def x_state(
    u11: float,
    u22: float,
    u33: float,
    u23: complex = 0.0,
    partition: Partition | None = None,
) -> TwoQubitState:
    """Assemble a single-coherence state from its four independent entries."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = u11
    m[1, 1] = u22
    m[2, 2] = u33
    m[1, 2] = u23
    m[2, 1] = np.conj(u23)
    return TwoQubitState(matrix=m, partition=partition)


def reduced_state(
    partition: Partition, params: ModelParams, t: float
) -> TwoQubitState:
    """Reduced density matrix of `partition` at time t.

    The three equivalent partitions put weight x on the shared Bell-like
    excited block (x = 1-p, q, gamma_d respectively).  The intra-subsystem
    and cross-subsystem partitions carry the explicit entries listed below;
    the square roots act on clamped non-negative probabilities.
    """
    probs = excitation_probabilities(params, t)
    p, q, g = probs.p, probs.q, probs.gamma_d
    a2 = abs(params.amp_a) ** 2
    b2 = abs(params.amp_b) ** 2
    ab = np.conj(params.amp_a) * params.amp_b

    if partition in EQUIVALENT_FAMILIES:
        x = {
            Partition.ATOM_ATOM: 1.0 - p,
            Partition.CAVITY_CAVITY: q,
            Partition.RESERVOIR_RESERVOIR: g,
        }[partition]
        return x_state(1.0 - x, b2 * x, a2 * x, ab * x, partition)

    if partition is Partition.ATOM_CAVITY_INTRA:
        return x_state(
            a2 * g + b2,
            a2 * q,
            a2 * (1.0 - p),
            a2 * math.sqrt(q * (1.0 - p)),
            partition,
        )
    if partition is Partition.ATOM_RESERVOIR_INTRA:
        return x_state(
            a2 * q + b2,
            a2 * g,
            a2 * (1.0 - p),
            a2 * math.sqrt(g * (1.0 - p)),
            partition,
        )
    if partition is Partition.CAVITY_RESERVOIR_INTRA:
        return x_state(
            a2 * (1.0 - p) + b2,
            a2 * g,
            a2 * q,
            a2 * math.sqrt(q * g),
            partition,
        )
    if partition is Partition.ATOM_RESERVOIR_CROSS:
        return x_state(
            a2 * (q + g) + b2 * (1.0 - g),
            b2 * g,
            a2 * (1.0 - p),
            ab * math.sqrt(g * (1.0 - p)),
            partition,
        )
    raise ValueError(f"unknown partition: {partition!r}")


def validate_state(
    state: TwoQubitState,
    hermitian_tol: float = 1e-12,
    trace_tol: float = 1e-12,
    psd_tol: float = 1e-10,
    x_form_tol: float = 1e-12,
) -> list[str]:
    """Check Hermiticity, unit trace, positivity, and the single-coherence shape.

    Returns one message per violated invariant; an empty list means the state
    passes all four checks at the given tolerances.
    """
    m = state.matrix
    violations: list[str] = []

    herm_err = float(np.max(np.abs(m - m.conj().T)))
    if herm_err > hermitian_tol:
        violations.append(f"hermiticity violated: max|M - M^dag| = {herm_err:.3e}")

    trace_err = abs(complex(np.trace(m)) - 1.0)
    if trace_err > trace_tol:
        violations.append(f"trace violated: |tr - 1| = {trace_err:.3e}")

    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
    if min_eig < -psd_tol:
        violations.append(f"positivity violated: min eigenvalue = {min_eig:.3e}")

    off_mask = np.ones((4, 4), dtype=bool)
    off_mask[np.diag_indices(4)] = False
    off_mask[1, 2] = off_mask[2, 1] = False
    stray = float(np.max(np.abs(m[off_mask])))
    if stray > x_form_tol or abs(m[3, 3]) > x_form_tol:
        violations.append(
            "x-form violated: stray off-diagonal "
            f"{stray:.3e}, |11> population {abs(m[3, 3]):.3e}"
        )
    return violations
