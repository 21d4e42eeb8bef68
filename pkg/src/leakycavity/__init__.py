"""Numerical laboratory for a pair of emitters in leaky cavities.

Two two-level emitters share one excitation; each sits in a lossy cavity
that drains into its own reservoir sink.  The package provides the
closed-form excitation dynamics with an ODE oracle, all treated two-qubit
partition states, fidelity / trace-distance / relative-entropy lag witnesses
of memory effects, CHSH values with an independent criterion oracle,
classical and quantum correlation measures with a brute-force measurement
oracle, a quantum-jump Monte Carlo cross-check, and a grid-scan CLI.
"""

from .dynamics import (
    Amplitudes,
    ExcitationProbabilities,
    ModelParams,
    Regime,
    amplitudes_ode,
    classify_regime,
    excitation_probabilities,
    rabi_frequency,
)
from .measures import (
    FidelityIndex,
    binary_entropy,
    fidelity,
    fidelity_closed_form,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)
from .scan import (
    AxisSpec,
    GridData,
    GridSummary,
    ScanSpec,
    ScanSpecError,
    TrajectoryCheckReport,
    WitnessGrid,
    read_grid,
    run_scan,
    run_trajectory_check,
    summarize,
    write_grid,
)
from .states import (
    EQUIVALENT_FAMILIES,
    Partition,
    TwoQubitState,
    reduced_state,
    validate_state,
    x_state,
)
from .trajectory import TrajectoryConfig, TrajectoryEstimate, simulate
from .witnesses import (
    ChshResult,
    WitnessKind,
    chsh,
    chsh_horodecki,
    classical_correlation_closed,
    discord_numeric,
    fidelity_difference,
    mutual_information,
    quantum_discord_closed,
    relative_entropy_difference,
    trace_distance_difference,
)

__all__ = [
    "Amplitudes",
    "AxisSpec",
    "ChshResult",
    "EQUIVALENT_FAMILIES",
    "ExcitationProbabilities",
    "FidelityIndex",
    "GridData",
    "GridSummary",
    "ModelParams",
    "Partition",
    "Regime",
    "ScanSpec",
    "ScanSpecError",
    "TrajectoryCheckReport",
    "TrajectoryConfig",
    "TrajectoryEstimate",
    "TwoQubitState",
    "WitnessGrid",
    "WitnessKind",
    "amplitudes_ode",
    "binary_entropy",
    "chsh",
    "chsh_horodecki",
    "classical_correlation_closed",
    "classify_regime",
    "discord_numeric",
    "excitation_probabilities",
    "fidelity",
    "fidelity_closed_form",
    "fidelity_difference",
    "mutual_information",
    "quantum_discord_closed",
    "rabi_frequency",
    "read_grid",
    "reduced_state",
    "relative_entropy",
    "relative_entropy_difference",
    "run_scan",
    "run_trajectory_check",
    "simulate",
    "summarize",
    "trace_distance",
    "trace_distance_difference",
    "validate_state",
    "von_neumann_entropy",
    "write_grid",
    "x_state",
]

__version__ = "0.1.0"
