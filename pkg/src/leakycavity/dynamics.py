"""Excitation dynamics of one emitter coupled to a lossy cavity.

A single excitation starts on the emitter, exchanges with the cavity mode at
coupling rate V, and leaks irreversibly from the cavity into a reservoir sink
at rate lambda_c.  Everything downstream (two-qubit states, witnesses, Bell
values) is driven by the three probabilities returned here:

    p        probability the excitation has left the emitter,
    q        probability it currently occupies the cavity,
    gamma_d  probability it has been absorbed by the reservoir (p - q).

Closed forms are evaluated through a single complex-frequency code path that
covers the underdamped, critically damped, and overdamped regimes; a
fixed-step Runge-Kutta integrator of the amplitude equations serves as an
independent oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

# Relative half-width of the window around the critical damping point inside
# which the oscillator factors are evaluated by series instead of by
# sin/cos of a nearly-zero frequency.
EP_REL_WINDOW = 1e-10

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class Regime(Enum):
    """Damping regime of the emitter-cavity exchange."""

    COHERENT = "coherent"
    EXCEPTIONAL_POINT = "exceptional-point"
    INCOHERENT = "incoherent"


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of the model.

    coupling      emitter-cavity exchange rate V (> 0, sets the time unit)
    cavity_decay  cavity leak rate lambda_c (>= 0, in units of V)
    amp_a, amp_b  complex weights of the shared initial excitation on
                  subsystem 1 and 2; |amp_a|^2 + |amp_b|^2 must be 1
    """

    coupling: float = 1.0
    cavity_decay: float = 0.0
    amp_a: complex = complex(_INV_SQRT2, 0.0)
    amp_b: complex = complex(_INV_SQRT2, 0.0)

    def __post_init__(self) -> None:
        if not self.coupling > 0.0:
            raise ValueError(f"coupling must be positive, got {self.coupling}")
        if self.cavity_decay < 0.0:
            raise ValueError(
                f"cavity_decay must be non-negative, got {self.cavity_decay}"
            )
        norm = abs(self.amp_a) ** 2 + abs(self.amp_b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(
                f"|amp_a|^2 + |amp_b|^2 must equal 1 within 1e-12, got {norm!r}"
            )


@dataclass(frozen=True)
class ExcitationProbabilities:
    """Residence probabilities of the excitation at one instant."""

    p: float
    q: float
    gamma_d: float = field(default=0.0)


@dataclass(frozen=True)
class Amplitudes:
    """Complex emitter/cavity amplitudes plus the leaked probability.

    `leaked` is 1 - |atom|^2 - |cavity|^2, clamped at zero; it equals the
    reservoir occupation probability gamma_d.
    """

    atom: complex
    cavity: complex
    leaked: float


def rabi_frequency(params: ModelParams) -> complex:
    """Exchange frequency Omega with 2*Omega = sqrt(4V^2 - (lambda_c/2)^2).

    Real in the coherent regime, zero at critical damping, and purely
    imaginary (positive imaginary part) in the incoherent regime.
    """
    disc = 4.0 * params.coupling**2 - (params.cavity_decay / 2.0) ** 2
    return cmath.sqrt(complex(disc)) / 2.0


def classify_regime(params: ModelParams) -> Regime:
    """Classify (V, lambda_c) into coherent / critical / incoherent exchange."""
    four_v_sq = 4.0 * params.coupling**2
    disc = four_v_sq - (params.cavity_decay / 2.0) ** 2
    if abs(disc) <= EP_REL_WINDOW * four_v_sq:
        return Regime.EXCEPTIONAL_POINT
    return Regime.COHERENT if disc > 0.0 else Regime.INCOHERENT


def _oscillator_factors(params: ModelParams, t: float) -> tuple[float, float]:
    """Return (cos(Omega*t), sin(Omega*t)/Omega) for Omega^2 = V^2 - (lambda_c/4)^2.

    A single complex evaluation reproduces the hyperbolic overdamped branch
    automatically; inside the critical window the factors come from a
    second-order series in Omega^2 to avoid the 0/0 at Omega = 0.
    """
    v = params.coupling
    omega_sq = v * v - (params.cavity_decay / 4.0) ** 2
    if abs(omega_sq) <= EP_REL_WINDOW * v * v:
        z = omega_sq
        t2 = t * t
        cos_f = 1.0 - z * t2 / 2.0 + z * z * t2 * t2 / 24.0
        sin_f = t * (1.0 - z * t2 / 6.0 + z * z * t2 * t2 / 120.0)
        return cos_f, sin_f
    omega = cmath.sqrt(complex(omega_sq))
    arg = omega * t
    return (cmath.cos(arg)).real, (cmath.sin(arg) / omega).real


def _populations(params: ModelParams, t: float) -> tuple[float, float]:
    """Unclamped (1 - p, q) at time t."""
    lam = params.cavity_decay
    v = params.coupling
    omega_sq = v * v - (lam / 4.0) ** 2
    if omega_sq < 0.0:
        w = math.sqrt(-omega_sq)
        if w * t > 300.0:
            # cosh/sinh would overflow; fold the envelope into the slow mode
            decay = math.exp((w - lam / 4.0) * t)
            damp = math.exp(-2.0 * w * t)
            atom_amp = decay * (0.5 * (1.0 + damp) + lam * (1.0 - damp) / (8.0 * w))
            cav_amp = decay * v * (1.0 - damp) / (2.0 * w)
            return atom_amp**2, cav_amp**2
    cos_f, sin_f = _oscillator_factors(params, t)
    env = math.exp(-lam * t / 2.0)
    one_minus_p = env * (cos_f + lam * sin_f / 4.0) ** 2
    q = env * (v * sin_f) ** 2
    return one_minus_p, q


def excitation_probabilities(
    params: ModelParams, t: float
) -> ExcitationProbabilities:
    """Closed-form (p, q, gamma_d) at time t >= 0, clamped into [0, 1]."""
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    one_minus_p, q = _populations(params, t)
    p = min(1.0, max(0.0, 1.0 - one_minus_p))
    q = min(1.0, max(0.0, q))
    # round-off can push q infinitesimally above p; gamma_d must stay >= 0
    q = min(q, p)
    return ExcitationProbabilities(p=p, q=q, gamma_d=p - q)


def _integrate_amplitudes(
    params: ModelParams,
    atom: complex,
    cavity: complex,
    duration: float,
    steps: int,
) -> tuple[complex, complex]:
    """Classic fixed-step RK4 for the linear amplitude equations.

    d(atom)/dt = -i V cavity,  d(cavity)/dt = -i V atom - (lambda_c/2) cavity.
    Shared by the ODE oracle and the trajectory module so both track the same
    deterministic flow.
    """
    v = params.coupling
    half_lam = params.cavity_decay / 2.0
    h = duration / steps
    iv = -1j * v
    for _ in range(steps):
        k1a = iv * cavity
        k1c = iv * atom - half_lam * cavity
        a2 = atom + 0.5 * h * k1a
        c2 = cavity + 0.5 * h * k1c
        k2a = iv * c2
        k2c = iv * a2 - half_lam * c2
        a3 = atom + 0.5 * h * k2a
        c3 = cavity + 0.5 * h * k2c
        k3a = iv * c3
        k3c = iv * a3 - half_lam * c3
        a4 = atom + h * k3a
        c4 = cavity + h * k3c
        k4a = iv * c4
        k4c = iv * a4 - half_lam * c4
        atom = atom + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        cavity = cavity + (h / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
    return atom, cavity


def amplitudes_ode(params: ModelParams, t: float, tol: float = 1e-8) -> Amplitudes:
    """Numerically integrated amplitudes at time t; independent of the closed forms.

    Integrates from (atom, cavity) = (1, 0) with step halving until two
    successive refinements agree within `tol` componentwise.  Serves as the
    oracle for `excitation_probabilities`: |atom|^2 must match 1 - p and
    |cavity|^2 must match q within 10*tol.

    Raises RuntimeError if step control cannot reach `tol`.
    """
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    if not 0.0 < tol <= 1e-3:
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol}")
    if t == 0.0:
        return Amplitudes(atom=1.0 + 0.0j, cavity=0.0j, leaked=0.0)

    rate = max(params.coupling, params.cavity_decay / 2.0)
    steps = max(8, math.ceil(4.0 * rate * t))
    prev = _integrate_amplitudes(params, 1.0 + 0.0j, 0.0j, t, steps)
    for _ in range(24):
        steps *= 2
        cur = _integrate_amplitudes(params, 1.0 + 0.0j, 0.0j, t, steps)
        if max(abs(cur[0] - prev[0]), abs(cur[1] - prev[1])) <= tol:
            atom, cavity = cur
            leaked = max(0.0, 1.0 - abs(atom) ** 2 - abs(cavity) ** 2)
            return Amplitudes(atom=atom, cavity=cavity, leaked=leaked)
        prev = cur
    raise RuntimeError(
        f"amplitude integration did not converge to tol={tol} at t={t}"
    )
