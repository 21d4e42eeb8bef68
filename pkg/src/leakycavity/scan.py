"""Parameter-grid scans over the witnesses, with CSV/JSON emission.

A scan picks one scalar field (a fidelity surface or one of the witness
kinds), two grid axes out of {t, tau, lambda_c}, and fixed values for
everything else.  Every cell carries both a value and a classification flag
so that undefined cells (underflowing denominators, infinite relative
entropies) stay distinguishable from merely non-negative ones.  Values are
serialized with 17 significant digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dynamics import ModelParams, excitation_probabilities
from .measures import FidelityIndex, fidelity_closed_form
from .states import EQUIVALENT_FAMILIES, Partition, reduced_state
from .trajectory import TrajectoryConfig, simulate
from .witnesses import (
    WitnessKind,
    chsh,
    classical_correlation_closed,
    fidelity_difference,
    mutual_information,
    quantum_discord_closed,
    relative_entropy_difference,
    trace_distance_difference,
)

#: Selector for the plain fidelity surface (not a difference witness).
FIDELITY_SURFACE = "fidelity"

AXIS_NAMES = ("t", "tau", "lambda_c")

#: Grid defaults mirroring the published data surfaces.
DEFAULT_TIME_STEP = 0.02
DEFAULT_DECAY_STEP = 0.05
DEFAULT_TIME_MAX = 4.0
DEFAULT_DECAY_MAX = 4.0

#: Cavity-decay panel values for the lag maps; the atom-reservoir partition
#: keeps a visible signal up to lambda_c ~ 5, so its panel set extends there.
FIGURE_PANEL_DECAYS = {
    Partition.ATOM_RESERVOIR_INTRA: (0.0, 1.0, 2.0, 3.0, 4.0, 5.0),
    Partition.CAVITY_CAVITY: (0.0, 1.0, 2.0, 3.0, 4.0),
}

_LAG_KINDS = frozenset(
    {WitnessKind.FIDELITY_DIFF, WitnessKind.TRACE_DIST_DIFF, WitnessKind.REL_ENTROPY_DIFF}
)
_FAMILY_KINDS = frozenset({WitnessKind.CLASSICAL_CORR, WitnessKind.QUANTUM_DISCORD})


class ScanSpecError(ValueError):
    """Raised when a scan specification is inconsistent."""


@dataclass(frozen=True)
class AxisSpec:
    """One grid axis: inclusive [start, stop] swept with positive step."""

    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ScanSpecError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.step <= 0.0:
            raise ScanSpecError(f"axis {self.name}: step must be positive, got {self.step}")
        if self.stop < self.start:
            raise ScanSpecError(
                f"axis {self.name}: empty range [{self.start}, {self.stop}]"
            )

    def values(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


@dataclass(frozen=True)
class ScanSpec:
    """Everything needed to evaluate and serialize one grid."""

    witness: str
    axes: tuple[AxisSpec, AxisSpec]
    partition: Partition | None = None
    index: FidelityIndex | None = None
    coupling: float = 1.0
    lambda_c: float | None = None
    t: float | None = None
    tau: float | None = None
    amp_a: complex = complex(1.0 / math.sqrt(2.0), 0.0)
    amp_b: complex = complex(1.0 / math.sqrt(2.0), 0.0)
    regularizer_eps: float = 0.0
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self) -> None:
        norm = math.sqrt(abs(self.amp_a) ** 2 + abs(self.amp_b) ** 2)
        if norm < 1e-12:
            raise ScanSpecError("initial amplitudes are both zero")
        if abs(norm - 1.0) > 1e-12:
            object.__setattr__(self, "amp_a", self.amp_a / norm)
            object.__setattr__(self, "amp_b", self.amp_b / norm)
        self._kind()  # validates witness / partition / index / axes
        if self.fmt not in ("csv", "json"):
            raise ScanSpecError(f"format must be 'csv' or 'json', got {self.fmt!r}")
        if self.coupling <= 0.0:
            raise ScanSpecError(f"coupling must be positive, got {self.coupling}")
        if self.regularizer_eps < 0.0:
            raise ScanSpecError("regularizer_eps must be non-negative")

    def _kind(self) -> WitnessKind | None:
        names = [ax.name for ax in self.axes]
        if len(set(names)) != 2:
            raise ScanSpecError(f"axes must use two distinct variables, got {names}")

        if self.witness == FIDELITY_SURFACE:
            kind = None
            if self.index is None:
                raise ScanSpecError("fidelity surface requires an index (F1..F6)")
        else:
            try:
                kind = WitnessKind(self.witness)
            except ValueError:
                valid = [FIDELITY_SURFACE] + [k.value for k in WitnessKind]
                raise ScanSpecError(
                    f"unknown witness {self.witness!r}; expected one of {valid}"
                ) from None
            if self.partition is None:
                raise ScanSpecError(f"witness {self.witness!r} requires a partition")
            if kind in _FAMILY_KINDS and self.partition not in EQUIVALENT_FAMILIES:
                raise ScanSpecError(
                    f"witness {self.witness!r} is defined only for "
                    f"{[f.value for f in EQUIVALENT_FAMILIES]}"
                )

        needed = {"t", "lambda_c"}
        if kind in _LAG_KINDS:
            needed.add("tau")
        elif "tau" in names:
            raise ScanSpecError(f"witness {self.witness!r} has no tau dependence")
        fixed = {"t": self.t, "tau": self.tau, "lambda_c": self.lambda_c}
        for var in needed:
            if var not in names and fixed[var] is None:
                raise ScanSpecError(f"variable {var!r} is neither an axis nor fixed")
        return kind

    def to_dict(self) -> dict:
        return {
            "witness": self.witness,
            "partition": self.partition.value if self.partition else None,
            "index": self.index.name if self.index else None,
            "axes": [
                {"name": ax.name, "start": ax.start, "stop": ax.stop, "step": ax.step}
                for ax in self.axes
            ],
            "coupling": self.coupling,
            "lambda_c": self.lambda_c,
            "t": self.t,
            "tau": self.tau,
            "amp_a": [self.amp_a.real, self.amp_a.imag],
            "amp_b": [self.amp_b.real, self.amp_b.imag],
            "regularizer_eps": self.regularizer_eps,
            "out": self.out,
            "format": self.fmt,
        }

    @staticmethod
    def from_dict(data: dict) -> "ScanSpec":
        axes = tuple(
            AxisSpec(ax["name"], ax["start"], ax["stop"], ax["step"])
            for ax in data["axes"]
        )
        if len(axes) != 2:
            raise ScanSpecError(f"expected exactly 2 axes, got {len(axes)}")
        part = data.get("partition")
        idx = data.get("index")
        amp_a = data.get("amp_a", [1.0 / math.sqrt(2.0), 0.0])
        amp_b = data.get("amp_b", [1.0 / math.sqrt(2.0), 0.0])
        return ScanSpec(
            witness=data["witness"],
            axes=axes,  # type: ignore[arg-type]
            partition=Partition(part) if part else None,
            index=FidelityIndex[idx] if idx else None,
            coupling=data.get("coupling", 1.0),
            lambda_c=data.get("lambda_c"),
            t=data.get("t"),
            tau=data.get("tau"),
            amp_a=complex(amp_a[0], amp_a[1]),
            amp_b=complex(amp_b[0], amp_b[1]),
            regularizer_eps=data.get("regularizer_eps", 0.0),
            out=data.get("out"),
            fmt=data.get("format", "csv"),
        )


@dataclass(frozen=True)
class WitnessGrid:
    """Evaluated grid: values and classification flags, both row-major."""

    spec: ScanSpec
    values: np.ndarray  # shape (len(axis0), len(axis1)), NaN marks undefined
    flags: np.ndarray  # same shape, strings

    def axis_values(self) -> tuple[np.ndarray, np.ndarray]:
        return self.spec.axes[0].values(), self.spec.axes[1].values()


@dataclass(frozen=True)
class GridSummary:
    n_cells: int
    counts: dict
    fractions: dict
    min_value: float | None
    min_cell: tuple[float, float] | None
    max_value: float | None
    max_cell: tuple[float, float] | None


def classify(witness: str, value: float | None) -> str:
    """Flag for one cell; a pure function of the witness kind and the value."""
    if value is None or math.isnan(value) or math.isinf(value):
        return "undefined"
    if witness == WitnessKind.CHSH.value:
        return "violating" if value > 2.0 else "non-negative"
    return "negative" if value < 0.0 else "non-negative"


def _evaluate_cell(
    spec: ScanSpec, t: float, tau: float | None, lam: float
) -> float | None:
    params = ModelParams(
        coupling=spec.coupling,
        cavity_decay=lam,
        amp_a=spec.amp_a,
        amp_b=spec.amp_b,
    )
    if spec.witness == FIDELITY_SURFACE:
        return fidelity_closed_form(spec.index, params, t)
    kind = WitnessKind(spec.witness)
    if kind is WitnessKind.FIDELITY_DIFF:
        return fidelity_difference(spec.partition, params, t, tau)
    if kind is WitnessKind.TRACE_DIST_DIFF:
        return trace_distance_difference(spec.partition, params, t, tau)
    if kind is WitnessKind.REL_ENTROPY_DIFF:
        return relative_entropy_difference(
            spec.partition, params, t, tau, regularizer_eps=spec.regularizer_eps
        )
    if kind is WitnessKind.CHSH:
        return chsh(reduced_state(spec.partition, params, t)).value
    if kind is WitnessKind.CLASSICAL_CORR:
        return classical_correlation_closed(spec.partition, params, t)
    if kind is WitnessKind.QUANTUM_DISCORD:
        return quantum_discord_closed(spec.partition, params, t)
    if kind is WitnessKind.MUTUAL_INFO:
        return mutual_information(reduced_state(spec.partition, params, t))
    raise ScanSpecError(f"unhandled witness {spec.witness!r}")


def run_scan(spec: ScanSpec) -> WitnessGrid:
    """Evaluate every grid cell and, when an output path is set, write the file.

    Deterministic: identical specs produce identical grids and files.  Cells
    whose witness is undefined are recorded, never raised.
    """
    vals0 = spec.axes[0].values()
    vals1 = spec.axes[1].values()
    names = (spec.axes[0].name, spec.axes[1].name)
    fixed = {"t": spec.t, "tau": spec.tau, "lambda_c": spec.lambda_c}

    values = np.empty((vals0.size, vals1.size))
    flags = np.empty((vals0.size, vals1.size), dtype=object)
    for i, v0 in enumerate(vals0):
        for j, v1 in enumerate(vals1):
            env = dict(fixed)
            env[names[0]] = float(v0)
            env[names[1]] = float(v1)
            cell = _evaluate_cell(spec, env["t"], env.get("tau"), env["lambda_c"])
            values[i, j] = math.nan if cell is None else cell
            flags[i, j] = classify(spec.witness, cell)

    grid = WitnessGrid(spec=spec, values=values, flags=flags)
    if spec.out is not None:
        write_grid(grid, spec.out, spec.fmt)
    return grid


def summarize(grid: WitnessGrid) -> GridSummary:
    """Counts and area fractions per flag plus the extreme defined cells."""
    flat_flags = grid.flags.ravel()
    n = flat_flags.size
    counts: dict = {}
    for flag in flat_flags:
        counts[flag] = counts.get(flag, 0) + 1
    fractions = {k: v / n for k, v in counts.items()}

    defined = np.isfinite(grid.values)
    min_value = max_value = None
    min_cell = max_cell = None
    if np.any(defined):
        vals0, vals1 = grid.axis_values()
        masked = np.where(defined, grid.values, math.nan)
        imin = np.unravel_index(np.nanargmin(masked), masked.shape)
        imax = np.unravel_index(np.nanargmax(masked), masked.shape)
        min_value = float(grid.values[imin])
        max_value = float(grid.values[imax])
        min_cell = (float(vals0[imin[0]]), float(vals1[imin[1]]))
        max_cell = (float(vals0[imax[0]]), float(vals1[imax[1]]))
    return GridSummary(
        n_cells=n,
        counts=counts,
        fractions=fractions,
        min_value=min_value,
        min_cell=min_cell,
        max_value=max_value,
        max_cell=max_cell,
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_grid(grid: WitnessGrid, path: str | Path, fmt: str | None = None) -> None:
    """Serialize a grid to CSV or JSON (by `fmt`, else the spec's format)."""
    path = Path(path)
    fmt = fmt or grid.spec.fmt
    vals0, vals1 = grid.axis_values()
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([grid.spec.axes[0].name, grid.spec.axes[1].name, "value", "flag"])
            for i, v0 in enumerate(vals0):
                for j, v1 in enumerate(vals1):
                    writer.writerow(
                        [_fmt(v0), _fmt(v1), _fmt(grid.values[i, j]), grid.flags[i, j]]
                    )
    elif fmt == "json":
        doc = {
            "spec": grid.spec.to_dict(),
            "axes": [
                {
                    "name": ax.name,
                    "start": ax.start,
                    "stop": ax.stop,
                    "step": ax.step,
                    "values": vals.tolist(),
                }
                for ax, vals in zip(grid.spec.axes, (vals0, vals1))
            ],
            "values": grid.values.ravel().tolist(),
            "flags": grid.flags.ravel().tolist(),
        }
        path.write_text(json.dumps(doc, indent=1))
    else:
        raise ScanSpecError(f"format must be 'csv' or 'json', got {fmt!r}")


@dataclass(frozen=True)
class GridData:
    """A grid re-read from disk: axis names/values, cell values, and flags."""

    axis_names: tuple[str, str]
    axis_values: tuple[np.ndarray, np.ndarray]
    values: np.ndarray
    flags: np.ndarray
    spec: dict | None = None


def read_grid(path: str | Path) -> GridData:
    """Re-read a grid written by `write_grid`; values round-trip bit-for-bit."""
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        names = tuple(ax["name"] for ax in doc["axes"])
        axis_values = tuple(np.array(ax["values"]) for ax in doc["axes"])
        shape = (axis_values[0].size, axis_values[1].size)
        values = np.array(doc["values"]).reshape(shape)
        flags = np.array(doc["flags"], dtype=object).reshape(shape)
        return GridData(names, axis_values, values, flags, spec=doc["spec"])

    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = (header[0], header[1])
        rows = list(reader)
    ax0 = np.array(sorted({float(r[0]) for r in rows}))
    ax1 = np.array(sorted({float(r[1]) for r in rows}))
    values = np.full((ax0.size, ax1.size), math.nan)
    flags = np.empty((ax0.size, ax1.size), dtype=object)
    idx0 = {v: i for i, v in enumerate(ax0)}
    idx1 = {v: i for i, v in enumerate(ax1)}
    for r in rows:
        i, j = idx0[float(r[0])], idx1[float(r[1])]
        values[i, j] = float(r[2])
        flags[i, j] = r[3]
    return GridData(names, (ax0, ax1), values, flags)


@dataclass(frozen=True)
class CheckRow:
    time: float
    quantity: str
    analytic: float
    estimate: float
    se: float
    z: float


@dataclass(frozen=True)
class TrajectoryCheckReport:
    rows: tuple[CheckRow, ...]
    n_beyond_3se: int
    n_beyond_5se: int
    passed: bool

    def table(self) -> str:
        lines = [
            f"{'t':>8} {'quantity':>10} {'analytic':>12} {'estimate':>12} {'SE':>10} {'z':>8}"
        ]
        for r in self.rows:
            lines.append(
                f"{r.time:8.3f} {r.quantity:>10} {r.analytic:12.6f} "
                f"{r.estimate:12.6f} {r.se:10.2e} {r.z:8.2f}"
            )
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(
            f"{verdict}: {self.n_beyond_3se} cells beyond 3 SE, "
            f"{self.n_beyond_5se} beyond 5 SE"
        )
        return "\n".join(lines)


def _z_score(estimate: float, analytic: float, se: float) -> float:
    if se > 0.0:
        return (estimate - analytic) / se
    return 0.0 if abs(estimate - analytic) <= 1e-6 else math.inf


def run_trajectory_check(
    config: TrajectoryConfig, reference: ModelParams | None = None
) -> TrajectoryCheckReport:
    """Compare Monte Carlo estimates against the closed forms checkpoint by checkpoint.

    `reference` overrides the parameters used for the analytic side (useful
    as a negative control); it defaults to the simulated parameters.  The
    report passes when at most 2 cells sit beyond 3 standard errors and none
    beyond 5.
    """
    est = simulate(config)
    ref = reference if reference is not None else config.params
    rows: list[CheckRow] = []
    for k, t in enumerate(est.times):
        probs = excitation_probabilities(ref, t)
        analytic = {
            "atom": 1.0 - probs.p,
            "cavity": probs.q,
            "reservoir": probs.gamma_d,
        }
        measured = {
            "atom": (est.est_atom[k], est.se_atom[k]),
            "cavity": (est.est_cavity[k], est.se_cavity[k]),
            "reservoir": (est.est_reservoir[k], est.se_reservoir[k]),
        }
        for quantity, (value, se) in measured.items():
            rows.append(
                CheckRow(
                    time=t,
                    quantity=quantity,
                    analytic=analytic[quantity],
                    estimate=value,
                    se=se,
                    z=_z_score(value, analytic[quantity], se),
                )
            )
    n3 = sum(1 for r in rows if abs(r.z) > 3.0)
    n5 = sum(1 for r in rows if abs(r.z) > 5.0)
    return TrajectoryCheckReport(
        rows=tuple(rows), n_beyond_3se=n3, n_beyond_5se=n5, passed=n3 <= 2 and n5 == 0
    )
