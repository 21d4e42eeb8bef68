"""Quantum-jump Monte Carlo cross-check of the closed-form dynamics.

The model conserves excitation number and has a single decay channel whose
post-jump state is an absorbing sink, so every stochastic trajectory reduces
to "survived vs jumped" on top of one shared deterministic amplitude flow:
the squared norm of the unnormalized (atom, cavity) amplitudes decays from 1,
and a trajectory with uniform draw u jumps the moment the norm first falls
below u.  Ensemble averages of the resulting population triples reproduce
(1-p, q, gamma_d) without any discretization of the jump process itself.

Each trajectory owns a counter-based random stream keyed by (seed, index),
so results are bit-identical for a fixed seed no matter how the work is
scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams, _integrate_amplitudes


@dataclass(frozen=True)
class TrajectoryConfig:
    """Inputs of one Monte Carlo run."""

    params: ModelParams
    checkpoints: tuple[float, ...]
    n_traj: int
    seed: int
    dt: float = 1e-3

    def __post_init__(self) -> None:
        if self.n_traj < 1:
            raise ValueError(f"n_traj must be >= 1, got {self.n_traj}")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.checkpoints:
            raise ValueError("checkpoints must be non-empty")
        if self.checkpoints[0] < 0.0:
            raise ValueError("checkpoints must be non-negative")
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ValueError(f"checkpoints must be strictly increasing: {self.checkpoints}")


@dataclass(frozen=True)
class TrajectoryEstimate:
    """Ensemble estimates of (1-p, q, gamma_d) with standard errors."""

    times: tuple[float, ...]
    est_atom: tuple[float, ...]
    est_cavity: tuple[float, ...]
    est_reservoir: tuple[float, ...]
    se_atom: tuple[float, ...]
    se_cavity: tuple[float, ...]
    se_reservoir: tuple[float, ...]


def _flow_at_checkpoints(
    params: ModelParams, checkpoints: tuple[float, ...], dt: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Norm and normalized populations of the no-jump flow at each checkpoint."""
    norms = np.empty(len(checkpoints))
    pop_atom = np.empty(len(checkpoints))
    pop_cavity = np.empty(len(checkpoints))
    atom, cavity = 1.0 + 0.0j, 0.0j
    prev_t = 0.0
    for k, t in enumerate(checkpoints):
        span = t - prev_t
        if span > 0.0:
            steps = max(1, math.ceil(span / dt))
            atom, cavity = _integrate_amplitudes(params, atom, cavity, span, steps)
        prev_t = t
        norm = abs(atom) ** 2 + abs(cavity) ** 2
        norms[k] = norm
        if norm > 1e-300:
            pop_atom[k] = abs(atom) ** 2 / norm
            pop_cavity[k] = abs(cavity) ** 2 / norm
        else:
            pop_atom[k] = 0.0
            pop_cavity[k] = 0.0
    return norms, pop_atom, pop_cavity


def _jump_thresholds(seed: int, n_traj: int) -> np.ndarray:
    """Uniform draws in (0, 1], one per trajectory, from per-index counter streams."""
    draws = np.empty(n_traj)
    for idx in range(n_traj):
        gen = np.random.Generator(np.random.Philox(key=seed, counter=idx))
        draws[idx] = 1.0 - gen.random()
    return draws


def _estimates(
    norms: np.ndarray,
    pop_atom: np.ndarray,
    pop_cavity: np.ndarray,
    thresholds: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = thresholds.size
    survived = (thresholds[None, :] <= norms[:, None]).sum(axis=1)
    frac = survived / n
    se_frac = np.sqrt(frac * (1.0 - frac) / n)
    est_atom = frac * pop_atom
    est_cavity = frac * pop_cavity
    est_reservoir = 1.0 - frac
    return (
        np.stack([est_atom, est_cavity, est_reservoir]),
        pop_atom * se_frac,
        pop_cavity * se_frac,
        se_frac,
    )


def simulate(config: TrajectoryConfig) -> TrajectoryEstimate:
    """Run the Monte Carlo and estimate the population triple at each checkpoint.

    Identical configs (including the seed) give bit-identical results.
    Raises RuntimeError if halving the integration step moves any estimate
    by more than one standard error, which flags an inadequate `dt`.
    """
    checkpoints = config.checkpoints
    thresholds = _jump_thresholds(config.seed, config.n_traj)

    norms, pop_atom, pop_cavity = _flow_at_checkpoints(
        config.params, checkpoints, config.dt
    )
    est, se_atom, se_cavity, se_res = _estimates(
        norms, pop_atom, pop_cavity, thresholds
    )

    fine = _flow_at_checkpoints(config.params, checkpoints, config.dt / 2.0)
    est_fine, _, _, _ = _estimates(*fine, thresholds)
    ses = np.stack([se_atom, se_cavity, se_res])
    if np.any(np.abs(est - est_fine) > ses + 1e-9):
        worst = float(np.max(np.abs(est - est_fine)))
        raise RuntimeError(
            f"dt={config.dt} fails the step-halving self-check "
            f"(max estimate shift {worst:.3e} exceeds one standard error)"
        )

    return TrajectoryEstimate(
        times=checkpoints,
        est_atom=tuple(est[0]),
        est_cavity=tuple(est[1]),
        est_reservoir=tuple(est[2]),
        se_atom=tuple(se_atom),
        se_cavity=tuple(se_cavity),
        se_reservoir=tuple(se_res),
    )
