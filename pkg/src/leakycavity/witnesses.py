"""Memory-effect witnesses, CHSH values, and correlation measures.

The three difference witnesses compare a lagged state pair against the pair
anchored at t = 0; a negative value certifies that the evolution is not a
completely positive memoryless semigroup.  Cells whose reference denominator
underflows return None rather than NaN so that grid classification can
distinguish "no memory effect" from "not evaluable"; an infinite relative
entropy propagates as math.inf.

CHSH comes in two flavours: the two-branch expression evaluated directly on
the state's entries, and an independent correlation-matrix criterion used as
an oracle.  The transverse branch of the two-branch form is intentionally
kept as given (2*sqrt(2)*|u23|) even though it differs by a factor of two
from the criterion's transverse term and can therefore never win the max;
the discrepancy is surfaced, not resolved.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import ModelParams, excitation_probabilities
from .measures import binary_entropy, fidelity, relative_entropy, trace_distance, von_neumann_entropy
from .states import EQUIVALENT_FAMILIES, Partition, TwoQubitState, reduced_state

#: Reference denominators below this yield the undefined marker (None).
DENOMINATOR_FLOOR = 1e-12

_PAULIS = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


class WitnessKind(Enum):
    """Scalar fields the scan front end knows how to evaluate."""

    FIDELITY_DIFF = "fidelity-diff"
    TRACE_DIST_DIFF = "trace-dist-diff"
    REL_ENTROPY_DIFF = "rel-entropy-diff"
    CHSH = "chsh"
    CLASSICAL_CORR = "classical-corr"
    QUANTUM_DISCORD = "quantum-discord"
    MUTUAL_INFO = "mutual-info"


@dataclass(frozen=True)
class ChshResult:
    """Maximal two-branch CHSH value and the branch that attained it."""

    value: float
    branch: str  # "B1" or "B2"


def _check_lags(t: float, tau: float) -> None:
    if t < 0.0 or tau < 0.0:
        raise ValueError(f"t and tau must be non-negative, got t={t}, tau={tau}")


def fidelity_difference(
    partition: Partition, params: ModelParams, t: float, tau: float
) -> float | None:
    """Relative fidelity gain of the lagged pair (t, t+tau) over the (0, tau) pair.

    Negative values witness memory effects.  Returns None when the reference
    fidelity F[rho(0), rho(tau)] falls below 1e-12.
    """
    _check_lags(t, tau)
    ref = fidelity(
        reduced_state(partition, params, 0.0), reduced_state(partition, params, tau)
    )
    if ref < DENOMINATOR_FLOOR:
        return None
    lagged = fidelity(
        reduced_state(partition, params, t),
        reduced_state(partition, params, t + tau),
    )
    return (lagged - ref) / ref


def trace_distance_difference(
    partition: Partition, params: ModelParams, t: float, tau: float
) -> float | None:
    """Relative contraction of the lagged trace distance; negative = memory effect.

    At tau = 0 both distances vanish identically and the witness is defined
    to be zero.  Returns None when the reference distance underflows.
    """
    _check_lags(t, tau)
    if tau == 0.0:
        return 0.0
    ref = trace_distance(
        reduced_state(partition, params, 0.0), reduced_state(partition, params, tau)
    )
    if ref < DENOMINATOR_FLOOR:
        return None
    lagged = trace_distance(
        reduced_state(partition, params, t),
        reduced_state(partition, params, t + tau),
    )
    return (ref - lagged) / ref


def _smoothed(matrix: np.ndarray, eps: float) -> np.ndarray:
    if eps <= 0.0:
        return matrix
    return (1.0 - eps) * matrix + eps * np.eye(4, dtype=complex) / 4.0


def relative_entropy_difference(
    partition: Partition,
    params: ModelParams,
    t: float,
    tau: float,
    regularizer_eps: float = 0.0,
    support_tol: float = 1e-12,
) -> float | None:
    """Relative contraction of the lagged relative entropy; negative = memory effect.

    With regularizer_eps > 0 every second argument sigma is replaced by
    (1-eps)*sigma + eps*I/4 before evaluation, which keeps the supports full.
    At t = 0 the two entropies coincide by construction and the witness is
    zero.  An infinite entropy propagates as math.inf; a reference below
    1e-12 yields None.
    """
    _check_lags(t, tau)
    if regularizer_eps < 0.0:
        raise ValueError(f"regularizer_eps must be non-negative, got {regularizer_eps}")
    if t == 0.0:
        return 0.0
    ref = relative_entropy(
        reduced_state(partition, params, 0.0).matrix,
        _smoothed(reduced_state(partition, params, tau).matrix, regularizer_eps),
        support_tol=support_tol,
    )
    lagged = relative_entropy(
        reduced_state(partition, params, t).matrix,
        _smoothed(reduced_state(partition, params, t + tau).matrix, regularizer_eps),
        support_tol=support_tol,
    )
    if math.isinf(ref) or math.isinf(lagged):
        return math.inf
    if ref < DENOMINATOR_FLOOR:
        return None
    return (ref - lagged) / ref


def _require_x_form(state: TwoQubitState) -> None:
    m = state.matrix
    off = np.ones((4, 4), dtype=bool)
    off[np.diag_indices(4)] = False
    off[1, 2] = off[2, 1] = False
    if float(np.max(np.abs(m[off]))) > 1e-10 or abs(m[3, 3]) > 1e-10:
        raise ValueError("state is not in single-coherence x-form")


def chsh(state: TwoQubitState) -> ChshResult:
    """Two-branch CHSH value of a single-coherence state.

    B1 = 2 sqrt(4|u23|^2 + (u11 - u22 - u33)^2), B2 = 2 sqrt(2) |u23|;
    the result is the larger branch, with ties resolved to B1.  Values above
    2 certify Bell nonlocality; 2*sqrt(2) is never exceeded.
    """
    _require_x_form(state)
    coh_sq = abs(state.u23) ** 2
    diag = state.u11 - state.u22 - state.u33
    b1 = 2.0 * math.sqrt(4.0 * coh_sq + diag * diag)
    b2 = 2.0 * math.sqrt(2.0 * coh_sq)
    if b2 > b1:
        return ChshResult(value=b2, branch="B2")
    return ChshResult(value=b1, branch="B1")


def chsh_horodecki(state: TwoQubitState | np.ndarray) -> float:
    """Criterion value 2 sqrt(m1 + m2) from the state's 3x3 correlation matrix.

    m1, m2 are the two largest eigenvalues of T^T T where
    T_ij = tr[rho (sigma_i x sigma_j)].  Valid for any two-qubit state and
    used as the independent oracle for `chsh`.
    """
    m = state.matrix if isinstance(state, TwoQubitState) else np.asarray(state, dtype=complex)
    corr = np.empty((3, 3))
    for i, si in enumerate(_PAULIS):
        for j, sj in enumerate(_PAULIS):
            corr[i, j] = float(np.trace(m @ np.kron(si, sj)).real)
    sing_sq = np.linalg.eigvalsh(corr.T @ corr)
    return 2.0 * math.sqrt(float(sing_sq[-1] + sing_sq[-2]))


def _family_weight(family: Partition, params: ModelParams, t: float) -> float:
    if family not in EQUIVALENT_FAMILIES:
        raise ValueError(
            f"closed-form correlations exist only for {[f.value for f in EQUIVALENT_FAMILIES]},"
            f" got {family.value}"
        )
    probs = excitation_probabilities(params, t)
    return {
        Partition.ATOM_ATOM: 1.0 - probs.p,
        Partition.CAVITY_CAVITY: probs.q,
        Partition.RESERVOIR_RESERVOIR: probs.gamma_d,
    }[family]


def _measured_branch_entropy(a2: float, x: float) -> float:
    """Entropy of the post-measurement branch states for the Bell-like family."""
    disc = max(0.0, 1.0 - 4.0 * a2 * x * (1.0 - x))
    return binary_entropy(0.5 * (1.0 + math.sqrt(disc)))


def classical_correlation_closed(
    family: Partition, params: ModelParams, t: float
) -> float:
    """Closed-form classical correlation of a Bell-like family state.

    C = H(|a|^2 x) - H((1 + sqrt(1 - 4|a|^2 x (1-x)))/2) with x the family's
    excited-block weight (1-p, q, or gamma_d).
    """
    x = _family_weight(family, params, t)
    a2 = abs(params.amp_a) ** 2
    return binary_entropy(a2 * x) - _measured_branch_entropy(a2, x)


def quantum_discord_closed(
    family: Partition, params: ModelParams, t: float
) -> float:
    """Closed-form quantum discord of a Bell-like family state.

    D = H(|b|^2 x) - H(x) + H((1 + sqrt(1 - 4|a|^2 x (1-x)))/2), the unique
    form consistent with D = I - C for this family; the measured-branch
    entropy enters with a plus sign.
    """
    x = _family_weight(family, params, t)
    a2 = abs(params.amp_a) ** 2
    b2 = abs(params.amp_b) ** 2
    return (
        binary_entropy(b2 * x)
        - binary_entropy(x)
        + _measured_branch_entropy(a2, x)
    )


def _partial_traces(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = matrix.reshape(2, 2, 2, 2)
    return np.trace(r, axis1=1, axis2=3), np.trace(r, axis1=0, axis2=2)


def mutual_information(state: TwoQubitState | np.ndarray) -> float:
    """Total correlations S(A) + S(B) - S(AB), in bits."""
    m = state.matrix if isinstance(state, TwoQubitState) else np.asarray(state, dtype=complex)
    rho_a, rho_b = _partial_traces(m)
    return (
        von_neumann_entropy(rho_a)
        + von_neumann_entropy(rho_b)
        - von_neumann_entropy(m)
    )


def _entropy_2x2(mat: np.ndarray) -> float:
    a = float(mat[0, 0].real)
    d = float(mat[1, 1].real)
    radius = math.sqrt(((a - d) / 2.0) ** 2 + abs(mat[0, 1]) ** 2)
    lam1 = (a + d) / 2.0 + radius
    lam2 = (a + d) / 2.0 - radius
    total = 0.0
    for lam in (lam1, lam2):
        if lam > 1e-15:
            total -= lam * math.log2(lam)
    return total


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo: float, hi: float, iters: int = 40) -> tuple[float, float]:
    """Deterministic golden-section maximization on [lo, hi]."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def discord_numeric(state: TwoQubitState, angular_resolution: int = 64) -> float:
    """Brute-force discord: I(rho) minus the best measured mutual information.

    Scans rank-1 projective measurements on the first qubit over a
    (theta, phi) grid of size angular_resolution x 2*angular_resolution,
    then polishes the best cell by coordinate-wise golden-section search.
    Deterministic for fixed inputs.
    """
    if angular_resolution < 2:
        raise ValueError(f"angular_resolution must be >= 2, got {angular_resolution}")
    _require_x_form(state)
    r = state.matrix.reshape(2, 2, 2, 2)
    _, rho_b = _partial_traces(state.matrix)
    s_b = von_neumann_entropy(rho_b)

    def measured_info(theta: float, phi: float) -> float:
        phase = cmath.exp(1j * phi)
        kets = (
            np.array([math.cos(theta / 2.0), phase * math.sin(theta / 2.0)]),
            np.array([-math.sin(theta / 2.0), phase * math.cos(theta / 2.0)]),
        )
        avg = 0.0
        for ket in kets:
            branch = np.einsum("a,aibj,b->ij", ket.conj(), r, ket)
            weight = float(np.trace(branch).real)
            if weight > 1e-14:
                avg += weight * _entropy_2x2(branch / weight)
        return s_b - avg

    thetas = np.linspace(0.0, math.pi, angular_resolution)
    phis = np.linspace(0.0, 2.0 * math.pi, 2 * angular_resolution, endpoint=False)
    best = -math.inf
    best_theta = best_phi = 0.0
    for theta in thetas:
        for phi in phis:
            value = measured_info(theta, phi)
            if value > best:
                best, best_theta, best_phi = value, theta, phi

    dt = thetas[1] - thetas[0]
    dp = phis[1] - phis[0]
    theta, phi = best_theta, best_phi
    for _ in range(3):
        theta, _ = _golden_max(lambda th: measured_info(th, phi), theta - dt, theta + dt)
        phi, best = _golden_max(lambda ph: measured_info(theta, ph), phi - dp, phi + dp)
    best = max(best, measured_info(best_theta, best_phi))
    return mutual_information(state) - best
