import math

import numpy as np
import pytest

from leakycavity import (
    ModelParams,
    Partition,
    TwoQubitState,
    chsh,
    chsh_horodecki,
    classical_correlation_closed,
    discord_numeric,
    excitation_probabilities,
    fidelity_difference,
    mutual_information,
    quantum_discord_closed,
    reduced_state,
    relative_entropy_difference,
    trace_distance_difference,
    x_state,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)
TSIRELSON = 2.0 * math.sqrt(2.0)
FAMILIES = (
    Partition.ATOM_ATOM,
    Partition.CAVITY_CAVITY,
    Partition.RESERVOIR_RESERVOIR,
)


def params(lam, a=INV_SQRT2):
    return ModelParams(cavity_decay=lam, amp_a=a, amp_b=math.sqrt(1.0 - a * a))


def sign_map(witness, partition, lam, grid):
    values = []
    for t in grid:
        for tau in grid:
            values.append(witness(partition, params(lam), float(t), float(tau)))
    return values


class TestDefinitionalZeros:
    @pytest.mark.parametrize("partition", list(Partition))
    def test_all_witnesses_vanish_on_the_axes(self, partition):
        p = params(2.0)
        for other in (0.4, 1.9):
            g0 = fidelity_difference(partition, p, 0.0, other)
            gt = fidelity_difference(partition, p, other, 0.0)
            d0 = trace_distance_difference(partition, p, 0.0, other)
            dt = trace_distance_difference(partition, p, other, 0.0)
            s0 = relative_entropy_difference(partition, p, 0.0, other, regularizer_eps=1e-9)
            for value in (g0, gt, d0, dt, s0):
                assert value is not None
                assert abs(value) <= 1e-12

    def test_rejects_negative_lags(self):
        with pytest.raises(ValueError):
            fidelity_difference(Partition.ATOM_ATOM, params(1.0), -0.1, 0.5)
        with pytest.raises(ValueError):
            trace_distance_difference(Partition.ATOM_ATOM, params(1.0), 0.5, -0.1)


class TestFidelityDifference:
    def test_lossless_atom_reservoir_map_has_both_signs(self):
        values = sign_map(
            fidelity_difference,
            Partition.ATOM_RESERVOIR_INTRA,
            0.0,
            np.linspace(0.1, 4.0, 14),
        )
        defined = [v for v in values if v is not None]
        assert any(v < 0.0 for v in defined)
        assert any(v > 0.0 for v in defined)

    def test_memory_fraction_drops_with_stronger_decay(self):
        grid = np.linspace(0.1, 4.0, 14)
        fractions = {}
        for lam in (0.0, 3.0):
            values = [
                v
                for v in sign_map(
                    fidelity_difference, Partition.ATOM_RESERVOIR_INTRA, lam, grid
                )
                if v is not None
            ]
            fractions[lam] = sum(1 for v in values if v < 0.0) / len(values)
        assert 0.0 < fractions[0.0] < 1.0
        assert fractions[3.0] < fractions[0.0]

    def test_cavity_pair_keeps_memory_at_critical_damping(self):
        values = sign_map(
            fidelity_difference,
            Partition.CAVITY_CAVITY,
            4.0,
            np.linspace(0.2, 4.0, 12),
        )
        assert any(v is not None and v < 0.0 for v in values)

    def test_atom_cavity_pair_shows_no_memory(self):
        values = sign_map(
            fidelity_difference,
            Partition.ATOM_CAVITY_INTRA,
            1.0,
            np.linspace(0.2, 4.0, 10),
        )
        assert all(v is None or v >= -1e-9 for v in values)


class TestTraceDistanceDifference:
    def test_cavity_pair_detects_memory_at_small_lags(self):
        p = params(4.0)
        small = [
            trace_distance_difference(Partition.CAVITY_CAVITY, p, float(t), float(tau))
            for t in np.linspace(0.1, 1.2, 8)
            for tau in np.linspace(0.1, 1.2, 8)
        ]
        assert any(v is not None and v < 0.0 for v in small)

    def test_deep_overdamped_atom_pair(self):
        # Computed truth: even at strong decay the atom-pair map is not a
        # semigroup (the transfer probability rises quadratically near t=0),
        # so small-lag cells go negative; the signal fades as the lag grows
        # and the fidelity witness sees none of it on the same grid.
        p = params(8.0)
        grid = np.linspace(0.0, 4.0, 21)

        def min_for(tau_floor):
            values = [
                trace_distance_difference(Partition.ATOM_ATOM, p, float(t), float(tau))
                for t in grid
                for tau in grid
                if tau >= tau_floor
            ]
            return min(v for v in values if v is not None)

        assert min_for(0.1) < -1e-3
        assert min_for(0.1) < min_for(1.0) < min_for(2.5)
        assert min_for(2.5) > -0.1

        fid_values = sign_map(
            fidelity_difference, Partition.ATOM_ATOM, 8.0, np.linspace(0.2, 4.0, 10)
        )
        assert all(v is None or v >= -1e-10 for v in fid_values)


class TestRelativeEntropyDifference:
    def test_disjoint_support_propagates_infinity(self):
        # the intra-partition coherence direction rotates, so supports differ
        value = relative_entropy_difference(
            Partition.ATOM_CAVITY_INTRA, params(1.0), 1.0, 1.0, regularizer_eps=0.0
        )
        assert value is not None and math.isinf(value)

    def test_regularizer_restores_finiteness(self):
        value = relative_entropy_difference(
            Partition.ATOM_CAVITY_INTRA, params(1.0), 1.0, 1.0, regularizer_eps=1e-9
        )
        assert value is not None and math.isfinite(value)

    def test_regression_value(self):
        # frozen from this implementation; not an external claim
        value = relative_entropy_difference(
            Partition.ATOM_ATOM, params(1.0), 1.0, 1.0, regularizer_eps=1e-9
        )
        assert value == pytest.approx(-0.3004474295691005, abs=1e-9)

    def test_zero_lag_with_plain_entropy_is_undefined(self):
        value = relative_entropy_difference(
            Partition.ATOM_ATOM, params(1.0), 1.0, 0.0, regularizer_eps=0.0
        )
        assert value is None

    def test_rejects_negative_regularizer(self):
        with pytest.raises(ValueError):
            relative_entropy_difference(
                Partition.ATOM_ATOM, params(1.0), 1.0, 1.0, regularizer_eps=-1e-3
            )


class TestChsh:
    def test_bell_like_initial_state_maximal(self):
        result = chsh(reduced_state(Partition.ATOM_ATOM, params(1.0), 0.0))
        assert result.value == pytest.approx(TSIRELSON, abs=1e-9)
        assert result.branch == "B1"

    def test_ground_state(self):
        result = chsh(x_state(1.0, 0.0, 0.0, 0.0))
        assert result.value == pytest.approx(2.0, abs=1e-12)
        assert result.branch == "B1"

    def test_reservoir_pair_approaches_maximal_violation(self):
        result = chsh(reduced_state(Partition.RESERVOIR_RESERVOIR, params(1.0), 50.0))
        assert result.value == pytest.approx(TSIRELSON, abs=1e-3)

    def test_bounded_by_tsirelson_and_criterion_on_model_states(self):
        for partition in Partition:
            for lam in (0.0, 1.0, 2.5, 4.0):
                for t in np.linspace(0.0, 4.0, 17):
                    state = reduced_state(partition, params(lam), float(t))
                    value = chsh(state).value
                    assert value <= TSIRELSON + 1e-9
                    assert value <= chsh_horodecki(state) + 1e-9

    def test_zero_coherence_respects_classical_bound(self):
        for u11, u22, u33 in ((0.2, 0.5, 0.3), (0.7, 0.3, 0.0), (1.0, 0.0, 0.0)):
            assert chsh(x_state(u11, u22, u33, 0.0)).value <= 2.0 + 1e-9

    def test_rejects_non_x_form(self):
        m = np.eye(4, dtype=complex) / 4.0
        m[0, 1] = m[1, 0] = 0.2
        with pytest.raises(ValueError):
            chsh(TwoQubitState(matrix=m))


class TestChshHorodecki:
    def test_bell_like_pure_state(self):
        st = reduced_state(Partition.ATOM_ATOM, params(1.0), 0.0)
        assert chsh_horodecki(st) == pytest.approx(TSIRELSON, abs=1e-9)

    def test_product_state(self):
        assert chsh_horodecki(x_state(1.0, 0.0, 0.0, 0.0)) == pytest.approx(2.0, abs=1e-12)

    def test_matches_brute_force_angle_search(self):
        st = reduced_state(Partition.ATOM_ATOM, params(1.0, a=1.0 / math.sqrt(5.0)), 0.5)
        assert chsh_horodecki(st) == pytest.approx(_brute_force_chsh(st), abs=1e-6)


def _brute_force_chsh(state: TwoQubitState) -> float:
    """Grid + coordinate golden-section maximum of the CHSH combination.

    For fixed detector directions on the second qubit the optimal first-qubit
    settings align with T(b - b') and T(b + b'), so the search space reduces
    to the two remaining unit vectors (four spherical angles).
    """
    paulis = (
        np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
        np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
        np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    )
    corr = np.array(
        [
            [float(np.trace(state.matrix @ np.kron(si, sj)).real) for sj in paulis]
            for si in paulis
        ]
    )

    def unit(theta, phi):
        return np.array(
            [
                math.sin(theta) * math.cos(phi),
                math.sin(theta) * math.sin(phi),
                math.cos(theta),
            ]
        )

    def objective(angles):
        b = unit(angles[0], angles[1])
        b_prime = unit(angles[2], angles[3])
        return float(
            np.linalg.norm(corr @ (b - b_prime)) + np.linalg.norm(corr @ (b + b_prime))
        )

    thetas = np.linspace(0.0, math.pi, 13)
    phis = np.linspace(0.0, 2.0 * math.pi, 25, endpoint=False)
    best, best_angles = -1.0, None
    for t1 in thetas:
        for p1 in phis:
            for t2 in thetas:
                for p2 in phis:
                    value = objective((t1, p1, t2, p2))
                    if value > best:
                        best, best_angles = value, [t1, p1, t2, p2]

    golden = (math.sqrt(5.0) - 1.0) / 2.0

    def golden_max(f, lo, hi, iters=60):
        x1 = hi - golden * (hi - lo)
        x2 = lo + golden * (hi - lo)
        f1, f2 = f(x1), f(x2)
        for _ in range(iters):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + golden * (hi - lo)
                f2 = f(x2)
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - golden * (hi - lo)
                f1 = f(x1)
        return (x1, f1) if f1 >= f2 else (x2, f2)

    angles = list(best_angles)
    spans = (
        thetas[1] - thetas[0],
        phis[1] - phis[0],
        thetas[1] - thetas[0],
        phis[1] - phis[0],
    )
    value = best
    for _ in range(8):
        for k in range(4):

            def line(x, k=k):
                trial = list(angles)
                trial[k] = x
                return objective(trial)

            angles[k], value = golden_max(line, angles[k] - spans[k], angles[k] + spans[k])
    return value


class TestCorrelations:
    def test_atom_pair_initial_unit_correlations(self):
        p = params(2.0)
        assert classical_correlation_closed(Partition.ATOM_ATOM, p, 0.0) == pytest.approx(
            1.0, abs=1e-9
        )
        assert quantum_discord_closed(Partition.ATOM_ATOM, p, 0.0) == pytest.approx(
            1.0, abs=1e-9
        )

    def test_cavity_and_reservoir_start_uncorrelated(self):
        p = params(2.0)
        for family in (Partition.CAVITY_CAVITY, Partition.RESERVOIR_RESERVOIR):
            assert classical_correlation_closed(family, p, 0.0) == pytest.approx(
                0.0, abs=1e-12
            )
            assert quantum_discord_closed(family, p, 0.0) == pytest.approx(
                0.0, abs=1e-12
            )

    def test_closed_forms_split_mutual_information(self):
        for a in (INV_SQRT2, 1.0 / math.sqrt(5.0)):
            for lam in (0.0, 1.0, 3.0, 4.0, 5.0):
                p = params(lam, a=a)
                for t in np.linspace(0.0, 4.0, 9):
                    for family in FAMILIES:
                        total = mutual_information(reduced_state(family, p, float(t)))
                        split = classical_correlation_closed(
                            family, p, float(t)
                        ) + quantum_discord_closed(family, p, float(t))
                        assert total == pytest.approx(split, abs=1e-9)

    def test_non_negative_over_grid(self):
        for lam in (0.0, 2.0, 4.0):
            p = params(lam)
            for t in np.linspace(0.0, 4.0, 17):
                for family in FAMILIES:
                    assert classical_correlation_closed(family, p, float(t)) >= -1e-9
                    assert quantum_discord_closed(family, p, float(t)) >= -1e-9

    def test_plugin_value_is_bounded_by_mutual_information(self):
        p = params(4.0)
        c = classical_correlation_closed(Partition.ATOM_ATOM, p, 1.0)
        total = mutual_information(reduced_state(Partition.ATOM_ATOM, p, 1.0))
        assert 0.0 <= c <= total

    def test_closed_forms_reject_other_partitions(self):
        with pytest.raises(ValueError):
            classical_correlation_closed(Partition.ATOM_CAVITY_INTRA, params(1.0), 1.0)


class TestMutualInformation:
    def test_bell_like_pure_state(self):
        st = reduced_state(Partition.ATOM_ATOM, params(1.0), 0.0)
        assert mutual_information(st) == pytest.approx(2.0, abs=1e-10)

    def test_product_pure_state(self):
        assert mutual_information(x_state(1.0, 0.0, 0.0, 0.0)) == pytest.approx(
            0.0, abs=1e-12
        )


class TestDiscordNumeric:
    def test_bell_like_pure_state(self):
        st = reduced_state(Partition.ATOM_ATOM, params(1.0), 0.0)
        assert discord_numeric(st, angular_resolution=64) == pytest.approx(1.0, abs=1e-4)

    def test_classical_diagonal_state(self):
        st = x_state(0.3, 0.7, 0.0, 0.0)
        assert discord_numeric(st, angular_resolution=32) == pytest.approx(0.0, abs=1e-6)

    def test_matches_closed_form_near_critical_damping(self):
        p = params(3.9)
        st = reduced_state(Partition.RESERVOIR_RESERVOIR, p, 3.0)
        closed = quantum_discord_closed(Partition.RESERVOIR_RESERVOIR, p, 3.0)
        assert discord_numeric(st, angular_resolution=64) == pytest.approx(
            closed, abs=1e-3
        )

    def test_matches_closed_form_midway(self):
        p = params(1.0)
        st = reduced_state(Partition.ATOM_ATOM, p, 0.8)
        closed = quantum_discord_closed(Partition.ATOM_ATOM, p, 0.8)
        assert discord_numeric(st, angular_resolution=96) == pytest.approx(
            closed, abs=1e-3
        )

    def test_rejects_tiny_resolution(self):
        st = reduced_state(Partition.ATOM_ATOM, params(1.0), 0.0)
        with pytest.raises(ValueError):
            discord_numeric(st, angular_resolution=1)
