import json
import math

import numpy as np
import pytest

from leakycavity import (
    AxisSpec,
    FidelityIndex,
    ModelParams,
    Partition,
    ScanSpec,
    ScanSpecError,
    TrajectoryConfig,
    fidelity_closed_form,
    read_grid,
    run_scan,
    run_trajectory_check,
    summarize,
    write_grid,
)
from leakycavity.scan import classify

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def small_axes(step=0.5, stop=2.0):
    return (AxisSpec("t", 0.0, stop, step), AxisSpec("lambda_c", 0.0, 4.0, 1.0))


class TestAxisSpec:
    def test_values_include_endpoint(self):
        ax = AxisSpec("t", 0.0, 4.0, 0.02)
        values = ax.values()
        assert values.size == 201
        assert values[0] == 0.0
        assert values[-1] == pytest.approx(4.0, abs=1e-12)

    def test_rejects_bad_name(self):
        with pytest.raises(ScanSpecError):
            AxisSpec("energy", 0.0, 1.0, 0.1)

    def test_rejects_nonpositive_step(self):
        with pytest.raises(ScanSpecError):
            AxisSpec("t", 0.0, 1.0, 0.0)

    def test_rejects_empty_range(self):
        with pytest.raises(ScanSpecError):
            AxisSpec("t", 1.0, 0.0, 0.1)


class TestScanSpecValidation:
    def test_unknown_witness(self):
        with pytest.raises(ScanSpecError):
            ScanSpec(witness="negativity", axes=small_axes())

    def test_fidelity_surface_needs_index(self):
        with pytest.raises(ScanSpecError):
            ScanSpec(witness="fidelity", axes=small_axes())

    def test_witness_needs_partition(self):
        with pytest.raises(ScanSpecError):
            ScanSpec(witness="chsh", axes=small_axes())

    def test_chsh_has_no_tau_axis(self):
        axes = (AxisSpec("t", 0.0, 1.0, 0.5), AxisSpec("tau", 0.0, 1.0, 0.5))
        with pytest.raises(ScanSpecError):
            ScanSpec(witness="chsh", axes=axes, partition=Partition.ATOM_ATOM)

    def test_lag_witness_needs_all_three_variables(self):
        # t and tau are axes but lambda_c is neither an axis nor fixed
        axes = (AxisSpec("t", 0.0, 1.0, 0.5), AxisSpec("tau", 0.0, 1.0, 0.5))
        with pytest.raises(ScanSpecError):
            ScanSpec(witness="fidelity-diff", axes=axes, partition=Partition.ATOM_ATOM)

    def test_duplicate_axes_rejected(self):
        axes = (AxisSpec("t", 0.0, 1.0, 0.5), AxisSpec("t", 0.0, 1.0, 0.5))
        with pytest.raises(ScanSpecError):
            ScanSpec(witness="fidelity", axes=axes, index=FidelityIndex.F1)

    def test_family_witness_rejects_other_partitions(self):
        with pytest.raises(ScanSpecError):
            ScanSpec(
                witness="quantum-discord",
                axes=small_axes(),
                partition=Partition.ATOM_CAVITY_INTRA,
            )

    def test_amplitudes_normalized_on_load(self):
        spec = ScanSpec(
            witness="fidelity",
            axes=small_axes(),
            index=FidelityIndex.F1,
            amp_a=3.0,
            amp_b=4.0,
        )
        assert abs(spec.amp_a) == pytest.approx(0.6, abs=1e-12)
        assert abs(spec.amp_b) == pytest.approx(0.8, abs=1e-12)

    def test_zero_amplitudes_rejected(self):
        with pytest.raises(ScanSpecError):
            ScanSpec(
                witness="fidelity",
                axes=small_axes(),
                index=FidelityIndex.F1,
                amp_a=0.0,
                amp_b=0.0,
            )

    def test_round_trips_through_dict(self):
        spec = ScanSpec(
            witness="fidelity-diff",
            axes=(AxisSpec("t", 0.0, 1.0, 0.5), AxisSpec("tau", 0.0, 1.0, 0.5)),
            partition=Partition.CAVITY_CAVITY,
            lambda_c=4.0,
            regularizer_eps=1e-9,
        )
        assert ScanSpec.from_dict(spec.to_dict()) == spec


class TestRunScan:
    def test_fidelity_surface_matches_closed_form(self):
        spec = ScanSpec(
            witness="fidelity", axes=small_axes(), index=FidelityIndex.F2
        )
        grid = run_scan(spec)
        t_vals, lam_vals = grid.axis_values()
        assert np.all((grid.values >= 0.0) & (grid.values <= 1.0))
        for i in (0, 2, 4):
            for j in (0, 3):
                params = ModelParams(cavity_decay=float(lam_vals[j]))
                expected = fidelity_closed_form(
                    FidelityIndex.F2, params, float(t_vals[i])
                )
                assert grid.values[i, j] == pytest.approx(expected, abs=1e-12)

    def test_chsh_map_flags_violations(self):
        spec = ScanSpec(
            witness="chsh",
            axes=(AxisSpec("t", 0.0, 2.0, 1.0), AxisSpec("lambda_c", 0.0, 2.0, 1.0)),
            partition=Partition.ATOM_ATOM,
        )
        grid = run_scan(spec)
        # t = 0 column is the maximally entangled state
        assert np.all(np.abs(grid.values[0, :] - 2.0 * math.sqrt(2.0)) <= 1e-9)
        assert all(flag == "violating" for flag in grid.flags[0, :])

    def test_flags_rederivable_from_values(self):
        spec = ScanSpec(
            witness="trace-dist-diff",
            axes=(AxisSpec("t", 0.0, 2.0, 0.25), AxisSpec("tau", 0.0, 2.0, 0.25)),
            partition=Partition.CAVITY_CAVITY,
            lambda_c=4.0,
        )
        grid = run_scan(spec)
        for value, flag in zip(grid.values.ravel(), grid.flags.ravel()):
            assert classify(spec.witness, None if math.isnan(value) else value) == flag

    def test_rel_entropy_map_marks_infinite_cells_undefined(self):
        spec = ScanSpec(
            witness="rel-entropy-diff",
            axes=(AxisSpec("t", 0.0, 1.0, 0.5), AxisSpec("tau", 0.0, 1.0, 0.5)),
            partition=Partition.ATOM_CAVITY_INTRA,
            lambda_c=1.0,
            regularizer_eps=0.0,
        )
        grid = run_scan(spec)
        assert "undefined" in set(grid.flags.ravel())

    def test_determinism(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for out in (out1, out2):
            run_scan(
                ScanSpec(
                    witness="fidelity-diff",
                    axes=(AxisSpec("t", 0.0, 1.0, 0.25), AxisSpec("tau", 0.0, 1.0, 0.25)),
                    partition=Partition.ATOM_RESERVOIR_INTRA,
                    lambda_c=0.0,
                    out=str(out),
                )
            )
        assert out1.read_bytes() == out2.read_bytes()


class TestSerialization:
    @pytest.fixture()
    def sample_grid(self):
        return run_scan(
            ScanSpec(
                witness="rel-entropy-diff",
                axes=(AxisSpec("t", 0.0, 1.5, 0.5), AxisSpec("tau", 0.0, 1.5, 0.5)),
                partition=Partition.ATOM_ATOM,
                lambda_c=1.3,
                regularizer_eps=1e-9,
            )
        )

    def test_csv_round_trip_bit_for_bit(self, sample_grid, tmp_path):
        path = tmp_path / "grid.csv"
        write_grid(sample_grid, path, "csv")
        data = read_grid(path)
        assert data.axis_names == ("t", "tau")
        np.testing.assert_array_equal(data.axis_values[0], sample_grid.axis_values()[0])
        np.testing.assert_array_equal(data.values, sample_grid.values)
        assert (data.flags == sample_grid.flags).all()

    def test_json_round_trip_bit_for_bit(self, sample_grid, tmp_path):
        path = tmp_path / "grid.json"
        write_grid(sample_grid, path, "json")
        data = read_grid(path)
        np.testing.assert_array_equal(data.values, sample_grid.values)
        assert (data.flags == sample_grid.flags).all()
        assert data.spec == sample_grid.spec.to_dict()

    def test_json_handles_non_finite_cells(self, tmp_path):
        grid = run_scan(
            ScanSpec(
                witness="rel-entropy-diff",
                axes=(AxisSpec("t", 0.0, 1.0, 0.5), AxisSpec("tau", 0.0, 1.0, 0.5)),
                partition=Partition.ATOM_CAVITY_INTRA,
                lambda_c=1.0,
            )
        )
        path = tmp_path / "grid.json"
        write_grid(grid, path, "json")
        data = read_grid(path)
        np.testing.assert_array_equal(data.values, grid.values)


class TestSummarize:
    def test_all_non_negative_grid(self):
        grid = run_scan(
            ScanSpec(witness="fidelity", axes=small_axes(), index=FidelityIndex.F3)
        )
        summary = summarize(grid)
        assert summary.counts.get("negative", 0) == 0
        assert summary.fractions.get("non-negative", 0.0) == 1.0
        assert summary.n_cells == grid.values.size

    def test_memory_map_fraction_strictly_between_zero_and_one(self):
        grid = run_scan(
            ScanSpec(
                witness="fidelity-diff",
                axes=(AxisSpec("t", 0.0, 4.0, 0.2), AxisSpec("tau", 0.0, 4.0, 0.2)),
                partition=Partition.ATOM_RESERVOIR_INTRA,
                lambda_c=0.0,
            )
        )
        fraction = summarize(grid).fractions.get("negative", 0.0)
        assert 0.0 < fraction < 1.0

    def test_chsh_max_location(self):
        grid = run_scan(
            ScanSpec(
                witness="chsh",
                axes=(AxisSpec("t", 0.0, 2.0, 0.5), AxisSpec("lambda_c", 1.0, 1.0, 1.0)),
                partition=Partition.ATOM_ATOM,
            )
        )
        summary = summarize(grid)
        assert summary.max_value == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-9)
        assert summary.max_cell[0] == 0.0


class TestTrajectoryCheck:
    def test_lossless_all_z_scores_zero(self):
        report = run_trajectory_check(
            TrajectoryConfig(
                params=ModelParams(cavity_decay=0.0),
                checkpoints=(0.5, 1.0),
                n_traj=2000,
                seed=11,
            )
        )
        assert report.passed
        assert all(row.z == 0.0 for row in report.rows)

    def test_moderate_decay_passes(self):
        report = run_trajectory_check(
            TrajectoryConfig(
                params=ModelParams(cavity_decay=4.0),
                checkpoints=(0.5, 1.0, 2.0),
                n_traj=20000,
                seed=17,
            )
        )
        assert report.passed
        assert report.n_beyond_5se == 0

    def test_wrong_reference_fails(self):
        report = run_trajectory_check(
            TrajectoryConfig(
                params=ModelParams(cavity_decay=4.0),
                checkpoints=(0.5, 1.0, 2.0),
                n_traj=20000,
                seed=17,
            ),
            reference=ModelParams(cavity_decay=1.0),
        )
        assert not report.passed

    def test_table_renders(self):
        report = run_trajectory_check(
            TrajectoryConfig(
                params=ModelParams(cavity_decay=1.0),
                checkpoints=(1.0,),
                n_traj=1000,
                seed=2,
            )
        )
        text = report.table()
        assert "quantity" in text and ("PASS" in text or "FAIL" in text)
