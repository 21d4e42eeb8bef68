"""Command-line front end: grid scans, amplitude series, and the jump check.

Every subcommand accepts --config FILE (JSON or TOML) whose keys are the
long option names with underscores; explicit flags override config values,
which override built-in defaults.  Exit codes: 0 success, 1 bad
specification, 2 trajectory check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from .dynamics import ModelParams, excitation_probabilities
from .measures import FidelityIndex
from .scan import (
    DEFAULT_DECAY_MAX,
    DEFAULT_DECAY_STEP,
    DEFAULT_TIME_MAX,
    DEFAULT_TIME_STEP,
    FIDELITY_SURFACE,
    AxisSpec,
    ScanSpec,
    ScanSpecError,
    run_scan,
    run_trajectory_check,
    summarize,
)
from .states import Partition
from .trajectory import TrajectoryConfig
from .witnesses import WitnessKind

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_CORR_KINDS = {
    "classical": WitnessKind.CLASSICAL_CORR,
    "discord": WitnessKind.QUANTUM_DISCORD,
    "mutual-info": WitnessKind.MUTUAL_INFO,
}


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors, reserving 2 for check failures."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ScanSpecError(f"config file not found: {path}")
    if p.suffix.lower() == ".toml":
        try:
            import tomllib as toml_parser  # type: ignore[import-not-found]
        except ModuleNotFoundError:
            import tomli as toml_parser
        with p.open("rb") as fh:
            return toml_parser.load(fh)
    return json.loads(p.read_text())


def _opt(args: argparse.Namespace, config: dict, key: str, default):
    """Resolve one option: explicit flag > config file > default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _partition_from(args: argparse.Namespace, config: dict) -> Partition:
    name = _opt(args, config, "partition", None)
    if name is None:
        raise ScanSpecError("a --partition is required")
    try:
        return Partition(name)
    except ValueError:
        valid = sorted(p.value for p in Partition)
        raise ScanSpecError(f"unknown partition {name!r}; expected one of {valid}") from None


def _amplitudes_from(args: argparse.Namespace, config: dict) -> tuple[complex, complex]:
    a = complex(_opt(args, config, "a_re", _INV_SQRT2), _opt(args, config, "a_im", 0.0))
    b_re = _opt(args, config, "b_re", None)
    b_im = _opt(args, config, "b_im", None)
    if b_re is None and b_im is None:
        mag = abs(a)
        if mag > 1.0 + 1e-12:
            raise ScanSpecError(f"|amp_a| = {mag} exceeds 1 and no amp_b was given")
        b = complex(math.sqrt(max(0.0, 1.0 - mag * mag)), 0.0)
    else:
        b = complex(b_re or 0.0, b_im or 0.0)
    return a, b


def _write_series(path: str | None, fmt: str, header: list[str], rows: list[list[float]]) -> None:
    if fmt == "json":
        doc = {name: [row[k] for row in rows] for k, name in enumerate(header)}
        text = json.dumps(doc, indent=1)
        if path is None:
            print(text)
        else:
            Path(path).write_text(text)
        return
    out = sys.stdout if path is None else open(path, "w", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17g}" for v in row])
    finally:
        if path is not None:
            out.close()


def _print_summary(grid_spec: ScanSpec, summary) -> None:
    print(f"witness={grid_spec.witness} cells={summary.n_cells}")
    parts = [
        f"{flag}: {summary.counts[flag]} ({100.0 * summary.fractions[flag]:.2f}%)"
        for flag in sorted(summary.counts)
    ]
    print("flags: " + ", ".join(parts))
    if summary.min_value is not None:
        ax0, ax1 = grid_spec.axes[0].name, grid_spec.axes[1].name
        print(
            f"min {summary.min_value:.6g} at ({ax0}={summary.min_cell[0]:g}, "
            f"{ax1}={summary.min_cell[1]:g}); "
            f"max {summary.max_value:.6g} at ({ax0}={summary.max_cell[0]:g}, "
            f"{ax1}={summary.max_cell[1]:g})"
        )


def _run_grid_command(spec: ScanSpec) -> int:
    grid = run_scan(spec)
    _print_summary(spec, summarize(grid))
    if spec.out is not None:
        print(f"wrote {spec.fmt} grid to {spec.out}")
    return 0


def _cmd_amplitudes(args: argparse.Namespace) -> int:
    config = _load_config(args.config) if args.config else {}
    params = ModelParams(
        coupling=_opt(args, config, "coupling", 1.0),
        cavity_decay=_opt(args, config, "lambda_c", 0.0),
    )
    t_max = _opt(args, config, "t_max", DEFAULT_TIME_MAX)
    step = _opt(args, config, "step", DEFAULT_TIME_STEP)
    axis = AxisSpec("t", _opt(args, config, "t_min", 0.0), t_max, step)
    rows = []
    for t in axis.values():
        probs = excitation_probabilities(params, float(t))
        rows.append([float(t), probs.p, probs.q, probs.gamma_d])
    out = _opt(args, config, "out", None)
    fmt = _opt(args, config, "format", "csv")
    _write_series(out, fmt, ["t", "p", "q", "gamma_d"], rows)
    if out is not None:
        print(f"wrote {fmt} series to {out}")
    return 0


def _time_decay_axes(args: argparse.Namespace, config: dict) -> tuple[AxisSpec, AxisSpec]:
    return (
        AxisSpec(
            "t",
            _opt(args, config, "t_min", 0.0),
            _opt(args, config, "t_max", DEFAULT_TIME_MAX),
            _opt(args, config, "step", DEFAULT_TIME_STEP),
        ),
        AxisSpec(
            "lambda_c",
            _opt(args, config, "lambda_min", 0.0),
            _opt(args, config, "lambda_max", DEFAULT_DECAY_MAX),
            _opt(args, config, "lambda_step", DEFAULT_DECAY_STEP),
        ),
    )


def _cmd_fidelity_surface(args: argparse.Namespace) -> int:
    config = _load_config(args.config) if args.config else {}
    index_name = _opt(args, config, "index", "F1")
    try:
        index = FidelityIndex[index_name]
    except KeyError:
        raise ScanSpecError(f"unknown fidelity index {index_name!r}; use F1..F6") from None
    amp_a, amp_b = _amplitudes_from(args, config)
    spec = ScanSpec(
        witness=FIDELITY_SURFACE,
        axes=_time_decay_axes(args, config),
        index=index,
        coupling=_opt(args, config, "coupling", 1.0),
        amp_a=amp_a,
        amp_b=amp_b,
        out=_opt(args, config, "out", None),
        fmt=_opt(args, config, "format", "csv"),
    )
    return _run_grid_command(spec)


def _cmd_nm_map(args: argparse.Namespace) -> int:
    config = _load_config(args.config) if args.config else {}
    witness = _opt(args, config, "witness", WitnessKind.FIDELITY_DIFF.value)
    amp_a, amp_b = _amplitudes_from(args, config)
    axes = (
        AxisSpec(
            "t",
            _opt(args, config, "t_min", 0.0),
            _opt(args, config, "t_max", DEFAULT_TIME_MAX),
            _opt(args, config, "step", DEFAULT_TIME_STEP),
        ),
        AxisSpec(
            "tau",
            _opt(args, config, "tau_min", 0.0),
            _opt(args, config, "tau_max", DEFAULT_TIME_MAX),
            _opt(args, config, "tau_step", _opt(args, config, "step", DEFAULT_TIME_STEP)),
        ),
    )
    spec = ScanSpec(
        witness=witness,
        axes=axes,
        partition=_partition_from(args, config),
        coupling=_opt(args, config, "coupling", 1.0),
        lambda_c=_opt(args, config, "lambda_c", 0.0),
        amp_a=amp_a,
        amp_b=amp_b,
        regularizer_eps=_opt(args, config, "eps", 0.0),
        out=_opt(args, config, "out", None),
        fmt=_opt(args, config, "format", "csv"),
    )
    return _run_grid_command(spec)


def _cmd_chsh_map(args: argparse.Namespace) -> int:
    config = _load_config(args.config) if args.config else {}
    amp_a, amp_b = _amplitudes_from(args, config)
    spec = ScanSpec(
        witness=WitnessKind.CHSH.value,
        axes=_time_decay_axes(args, config),
        partition=_partition_from(args, config),
        coupling=_opt(args, config, "coupling", 1.0),
        amp_a=amp_a,
        amp_b=amp_b,
        out=_opt(args, config, "out", None),
        fmt=_opt(args, config, "format", "csv"),
    )
    return _run_grid_command(spec)


def _cmd_corr_map(args: argparse.Namespace) -> int:
    config = _load_config(args.config) if args.config else {}
    kind_name = _opt(args, config, "kind", "classical")
    if kind_name not in _CORR_KINDS:
        raise ScanSpecError(
            f"unknown correlation kind {kind_name!r}; use one of {sorted(_CORR_KINDS)}"
        )
    amp_a, amp_b = _amplitudes_from(args, config)
    spec = ScanSpec(
        witness=_CORR_KINDS[kind_name].value,
        axes=_time_decay_axes(args, config),
        partition=_partition_from(args, config),
        coupling=_opt(args, config, "coupling", 1.0),
        amp_a=amp_a,
        amp_b=amp_b,
        out=_opt(args, config, "out", None),
        fmt=_opt(args, config, "format", "csv"),
    )
    return _run_grid_command(spec)


def _cmd_trajectory_check(args: argparse.Namespace) -> int:
    config = _load_config(args.config) if args.config else {}
    raw = _opt(args, config, "checkpoints", "0.5,1,2,4")
    if isinstance(raw, str):
        checkpoints = tuple(float(x) for x in raw.split(",") if x.strip())
    else:
        checkpoints = tuple(float(x) for x in raw)
    traj_config = TrajectoryConfig(
        params=ModelParams(
            coupling=_opt(args, config, "coupling", 1.0),
            cavity_decay=_opt(args, config, "lambda_c", 1.0),
        ),
        checkpoints=checkpoints,
        n_traj=int(_opt(args, config, "n_traj", 100000)),
        seed=int(_opt(args, config, "seed", 2024)),
        dt=_opt(args, config, "dt", 1e-3),
    )
    reference = None
    ref_lambda = _opt(args, config, "reference_lambda_c", None)
    if ref_lambda is not None:
        reference = ModelParams(
            coupling=traj_config.params.coupling, cavity_decay=ref_lambda
        )
    report = run_trajectory_check(traj_config, reference=reference)
    print(report.table())
    out = _opt(args, config, "out", None)
    if out is not None:
        doc = {
            "passed": report.passed,
            "n_beyond_3se": report.n_beyond_3se,
            "n_beyond_5se": report.n_beyond_5se,
            "rows": [asdict(r) for r in report.rows],
        }
        Path(out).write_text(json.dumps(doc, indent=1))
        print(f"wrote report to {out}")
    return 0 if report.passed else 2


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON or TOML config file")
    sub.add_argument("--coupling", type=float, help="exchange rate V (default 1)")
    sub.add_argument("--out", help="output file path")
    sub.add_argument("--format", choices=["csv", "json"], help="output format")


def _add_amp_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--a-re", dest="a_re", type=float, help="Re(amp_a)")
    sub.add_argument("--a-im", dest="a_im", type=float, help="Im(amp_a)")
    sub.add_argument("--b-re", dest="b_re", type=float, help="Re(amp_b)")
    sub.add_argument("--b-im", dest="b_im", type=float, help="Im(amp_b)")


def _add_time_decay_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--t-min", dest="t_min", type=float)
    sub.add_argument("--t-max", dest="t_max", type=float)
    sub.add_argument("--step", type=float, help="t-axis step")
    sub.add_argument("--lambda-min", dest="lambda_min", type=float)
    sub.add_argument("--lambda-max", dest="lambda_max", type=float)
    sub.add_argument("--lambda-step", dest="lambda_step", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="leakycavity",
        description="Grid scans and checks for the leaky-cavity pair model",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    amp = subs.add_parser("amplitudes", parents=[], help="p/q/gamma_d time series")
    _add_common(amp)
    amp.add_argument("--lambda-c", dest="lambda_c", type=float)
    amp.add_argument("--t-min", dest="t_min", type=float)
    amp.add_argument("--t-max", dest="t_max", type=float)
    amp.add_argument("--step", type=float)
    amp.set_defaults(func=_cmd_amplitudes)

    fid = subs.add_parser("fidelity-surface", help="closed-form fidelity over (t, lambda_c)")
    _add_common(fid)
    _add_amp_flags(fid)
    _add_time_decay_flags(fid)
    fid.add_argument("--index", help="fidelity index F1..F6")
    fid.set_defaults(func=_cmd_fidelity_surface)

    nm = subs.add_parser("nm-map", help="memory-effect witness over (t, tau)")
    _add_common(nm)
    _add_amp_flags(nm)
    nm.add_argument(
        "--witness",
        choices=[
            WitnessKind.FIDELITY_DIFF.value,
            WitnessKind.TRACE_DIST_DIFF.value,
            WitnessKind.REL_ENTROPY_DIFF.value,
        ],
    )
    nm.add_argument("--partition", help="two-qubit partition name")
    nm.add_argument("--lambda-c", dest="lambda_c", type=float)
    nm.add_argument("--t-min", dest="t_min", type=float)
    nm.add_argument("--t-max", dest="t_max", type=float)
    nm.add_argument("--step", type=float)
    nm.add_argument("--tau-min", dest="tau_min", type=float)
    nm.add_argument("--tau-max", dest="tau_max", type=float)
    nm.add_argument("--tau-step", dest="tau_step", type=float)
    nm.add_argument("--eps", type=float, help="relative-entropy regularizer")
    nm.set_defaults(func=_cmd_nm_map)

    bell = subs.add_parser("chsh-map", help="CHSH value over (t, lambda_c)")
    _add_common(bell)
    _add_amp_flags(bell)
    _add_time_decay_flags(bell)
    bell.add_argument("--partition", help="two-qubit partition name")
    bell.set_defaults(func=_cmd_chsh_map)

    corr = subs.add_parser("corr-map", help="correlation measure over (t, lambda_c)")
    _add_common(corr)
    _add_amp_flags(corr)
    _add_time_decay_flags(corr)
    corr.add_argument("--kind", choices=sorted(_CORR_KINDS))
    corr.add_argument("--partition", help="two-qubit partition name")
    corr.set_defaults(func=_cmd_corr_map)

    traj = subs.add_parser("trajectory-check", help="Monte Carlo vs closed forms")
    _add_common(traj)
    traj.add_argument("--lambda-c", dest="lambda_c", type=float)
    traj.add_argument("--n-traj", dest="n_traj", type=int)
    traj.add_argument("--seed", type=int)
    traj.add_argument("--dt", type=float)
    traj.add_argument("--checkpoints", help="comma-separated times, e.g. 0.5,1,2,4")
    traj.add_argument(
        "--reference-lambda-c",
        dest="reference_lambda_c",
        type=float,
        help="compare against closed forms at a different decay rate (negative control)",
    )
    traj.set_defaults(func=_cmd_trajectory_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ScanSpecError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
