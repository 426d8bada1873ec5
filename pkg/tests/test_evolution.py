"""Tests for exact block evolution and the fourth-order operator expansion.

The expansion coefficients are cross-checked against an independent oracle:
the Taylor series of exp(-i theta H) applied to |m, 0, ...>, computed from
dense powers of the full Hamiltonian. Both sides are degree-4 polynomials in
theta, so agreement of every polynomial coefficient is an exact validation.
"""

import math

import numpy as np
import pytest

from pdc_lab.errors import MixedPumpUnsupported, UnsupportedOrder
from pdc_lab.evolution import (
    BlockAmplitudes,
    JointState,
    Term,
    brute_force_evolve,
    coefficient_table,
    evolve_block,
    evolve_pump,
    joint_state_vector,
    series_block_amplitudes,
    series_state_amplitudes,
)
from pdc_lab.fock_core import PumpSpec, composite_index, falling_factorial
from pdc_lab.pdc_models import (
    MULTI_MODE,
    SINGLE_MODE,
    PdcModel,
    build_block_hamiltonian,
    build_full_hamiltonian,
    reachable_cutoffs,
)


def _taylor_coefficients(model, m, max_power=4):
    """Coefficient of theta^p in <block j| exp(-i theta H) |m,0,...>.

    Returns an array c[j, p] computed from dense matrix powers, which is
    independent of the shipped coefficient tables.
    """
    modes = list(reachable_cutoffs(model, m))
    cutoffs = tuple(mode.cutoff for mode in modes)
    h = build_full_hamiltonian(model, cutoffs)
    if model.process == MULTI_MODE:
        occs = [(m - k,) + (k,) * model.n for k in range(m + 1)]
    else:
        occs = [(m - k, model.n * k) for k in range(m + 1)]
    idx = [composite_index(modes, occ) for occ in occs]

    coeffs = np.zeros((m + 1, max_power + 1), dtype=complex)
    vec = np.zeros(h.shape[0], dtype=complex)
    vec[idx[0]] = 1.0
    fact = 1.0
    for p in range(max_power + 1):
        if p:
            vec = h @ vec
            fact *= p
        coeffs[:, p] = (-1j) ** p / fact * vec[idx]
    return coeffs


def _table_coefficients(table, m, max_power=4):
    """Same polynomial coefficients, but from the shipped term tables."""
    coeffs = np.zeros((m + 1, max_power + 1), dtype=complex)
    for j, group in enumerate(table.terms):
        if j > m:
            break
        for term in group:
            weight = math.sqrt(
                falling_factorial(m, term.annihilation)
                * falling_factorial(m - j, term.creation)
            )
            coeffs[j, term.theta_power] += term.coeff * weight
    return coeffs


class TestCoefficientTablesAgainstTaylorOracle:
    @pytest.mark.parametrize("process", [MULTI_MODE, SINGLE_MODE])
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_polynomial_coefficients_match(self, process, n, m):
        model = PdcModel(process, n, 0.1)
        table = coefficient_table(process, n)
        expected = _taylor_coefficients(model, m)
        got = _table_coefficients(table, m)
        np.testing.assert_allclose(got, expected, atol=1e-10)

    @pytest.mark.parametrize("process", [MULTI_MODE, SINGLE_MODE])
    def test_series_block_amplitudes_evaluate_the_polynomial(self, process):
        model = PdcModel(process, 2, 0.1)
        table = coefficient_table(process, 2)
        m = 3
        coeffs = _taylor_coefficients(model, m)
        for theta in (0.15, 0.6):
            powers = theta ** np.arange(5)
            expected = coeffs @ powers
            got = series_block_amplitudes(table, m, theta)
            np.testing.assert_allclose(got, expected, atol=1e-12)


# fourth-order tables for n=2, fixed by hand from the closed-form expansion
PAIR_TERMS_N2 = (
    (
        Term(0, 0, 0, 1.0),
        Term(2, 1, 1, -0.5),
        Term(4, 1, 1, 1 / 24),
        Term(4, 2, 2, 5 / 24),
    ),
    (
        Term(1, 0, 1, -1j),
        Term(3, 0, 1, 1j / 6),
        Term(3, 1, 2, 5j / 6),
    ),
    (
        Term(2, 0, 2, -1.0),
        Term(4, 0, 2, 0.5),
        Term(4, 1, 3, 7 / 6),
    ),
    (Term(3, 0, 3, 1j),),
    (Term(4, 0, 4, 1.0),),
)

SINGLE_TERMS_N2 = (
    (
        Term(0, 0, 0, 1.0),
        Term(2, 1, 1, -1.0),
        Term(4, 1, 1, 1 / 6),
        Term(4, 2, 2, 7 / 6),
    ),
    (
        Term(1, 0, 1, -1j * math.sqrt(2)),
        Term(3, 0, 1, 1j * math.sqrt(2) / 3),
        Term(3, 1, 2, 7j * math.sqrt(2) / 3),
    ),
    (
        Term(2, 0, 2, -math.sqrt(6)),
        Term(4, 0, 2, 4 * math.sqrt(6) / 3),
        Term(4, 1, 3, 11 * math.sqrt(6) / 3),
    ),
    (Term(3, 0, 3, 1j * math.sqrt(20)),),
    (Term(4, 0, 4, math.sqrt(70)),),
)


def _assert_term_groups_equal(got, expected):
    assert len(got) == len(expected)
    for got_group, exp_group in zip(got, expected):
        got_sorted = sorted(got_group, key=lambda t: t[:3])
        exp_sorted = sorted(exp_group, key=lambda t: t[:3])
        assert len(got_sorted) == len(exp_sorted)
        for g, e in zip(got_sorted, exp_sorted):
            assert g[:3] == e[:3]
            assert g.coeff == pytest.approx(e.coeff, rel=1e-14, abs=1e-16)


class TestLiteralTables:
    def test_pair_process_n2(self):
        table = coefficient_table(MULTI_MODE, 2)
        _assert_term_groups_equal(table.terms, PAIR_TERMS_N2)

    def test_single_mode_n2(self):
        table = coefficient_table(SINGLE_MODE, 2)
        _assert_term_groups_equal(table.terms, SINGLE_TERMS_N2)

    def test_triplet_double_excitation_coefficient(self):
        # for n=3 the j=0 group carries theta^4 (1+2^3)/24 adag^2 a^2
        table = coefficient_table(MULTI_MODE, 3)
        match = [
            t
            for t in table.terms[0]
            if (t.theta_power, t.creation, t.annihilation) == (4, 2, 2)
        ]
        assert len(match) == 1
        assert match[0].coeff == pytest.approx(9 / 24, rel=1e-15)

    def test_order_filtering(self):
        table = coefficient_table(MULTI_MODE, 2, order=2)
        assert all(t.theta_power <= 2 for grp in table.terms for t in grp)
        assert table.terms[3] == ()
        assert table.terms[4] == ()
        assert table.order == 2

    def test_unsupported_order(self):
        with pytest.raises(UnsupportedOrder):
            coefficient_table(MULTI_MODE, 2, order=5)
        with pytest.raises(ValueError):
            coefficient_table(MULTI_MODE, 2, order=-1)
        with pytest.raises(ValueError):
            coefficient_table("sideways", 2)


class TestEvolveBlock:
    def test_pair_single_pump_photon_is_rabi(self):
        blk = build_block_hamiltonian(PdcModel.multi_mode(2, 0.3), 1)
        amps = evolve_block(blk, 0.3)
        np.testing.assert_allclose(
            amps.u, [math.cos(0.3), -1j * math.sin(0.3)], atol=1e-14
        )

    def test_single_mode_rate_is_sqrt_factorial(self):
        blk = build_block_hamiltonian(PdcModel.single_mode(2, 0.2), 1)
        amps = evolve_block(blk, 0.2)
        phase = math.sqrt(2) * 0.2
        np.testing.assert_allclose(
            amps.u, [math.cos(phase), -1j * math.sin(phase)], atol=1e-14
        )

    def test_zero_angle_is_identity(self):
        blk = build_block_hamiltonian(PdcModel.multi_mode(3, 0.0), 4)
        amps = evolve_block(blk, 0.0)
        expected = np.zeros(5, dtype=complex)
        expected[0] = 1.0
        np.testing.assert_array_equal(amps.u, expected)

    def test_unitary_for_random_blocks(self):
        for m, theta in ((2, 0.7), (5, 1.3), (9, 2.9)):
            blk = build_block_hamiltonian(PdcModel.multi_mode(2, theta), m)
            amps = evolve_block(blk, theta)
            assert np.linalg.norm(amps.u) == pytest.approx(1.0, abs=1e-12)

    def test_block_amplitudes_probabilities(self):
        blk = build_block_hamiltonian(PdcModel.multi_mode(2, 0.4), 2)
        amps = evolve_block(blk, 0.4)
        probs = amps.probabilities()
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(probs >= 0)

    def test_norm_validation(self):
        with pytest.raises(ValueError):
            BlockAmplitudes(1, np.array([1.0, 1.0], dtype=complex), 0.1)


class TestEvolvePump:
    def test_block_count_and_theta(self):
        pump = PumpSpec.coherent(1.0, cutoff=5)
        state = evolve_pump(PdcModel.multi_mode(2, 0.3), pump)
        assert len(state.blocks) == 6
        assert state.theta == 0.3
        assert [b.m for b in state.blocks] == list(range(6))

    def test_theta_override(self):
        pump = PumpSpec.fock(1)
        state = evolve_pump(PdcModel.multi_mode(2, 0.3), pump, theta=0.5)
        assert state.theta == 0.5

    def test_pump_coeffs_requires_pure(self):
        state = evolve_pump(PdcModel.multi_mode(2, 0.3), PumpSpec.thermal(0.5))
        with pytest.raises(MixedPumpUnsupported):
            state.pump_coeffs

    def test_joint_state_vector_layout(self):
        pump = PumpSpec.fock(1)
        state = evolve_pump(PdcModel.multi_mode(2, 0.3), pump)
        psi = joint_state_vector(state)
        assert psi.probability((1, 0, 0)) == pytest.approx(
            math.cos(0.3) ** 2, abs=1e-14
        )
        assert psi.probability((0, 1, 1)) == pytest.approx(
            math.sin(0.3) ** 2, abs=1e-14
        )


class TestBruteForceAgreement:
    @pytest.mark.parametrize(
        "model",
        [PdcModel.multi_mode(2, 0.4), PdcModel.single_mode(2, 0.4)],
        ids=["multi", "single"],
    )
    def test_matches_block_solution(self, model):
        pump = PumpSpec.fock(2)
        fast = joint_state_vector(evolve_pump(model, pump))
        slow = brute_force_evolve(model, pump)
        np.testing.assert_allclose(
            np.abs(fast.amplitudes), np.abs(slow.amplitudes), atol=1e-10
        )
        # amplitudes themselves agree up to nothing: both use the same
        # global phase convention, so compare them directly too
        np.testing.assert_allclose(fast.amplitudes, slow.amplitudes, atol=1e-10)

    def test_coherent_pump_agreement(self):
        model = PdcModel.multi_mode(2, 0.25)
        pump = PumpSpec.coherent(0.8, cutoff=4)
        fast = joint_state_vector(evolve_pump(model, pump))
        slow = brute_force_evolve(model, pump)
        np.testing.assert_allclose(fast.amplitudes, slow.amplitudes, atol=1e-10)

    def test_zero_angle_returns_initial_state(self):
        model = PdcModel.multi_mode(2, 0.0)
        pump = PumpSpec.fock(2)
        psi = brute_force_evolve(model, pump)
        assert psi.probability((2, 0, 0)) == pytest.approx(1.0, abs=1e-14)

    def test_conserved_pump_plus_signal(self):
        # n_p + n_1 commutes with H, so its expectation is theta independent
        model = PdcModel.multi_mode(2, 0.9)
        pump = PumpSpec.coherent(1.1, cutoff=5)
        psi = brute_force_evolve(model, pump)
        modes = psi.modes
        dims = [mode.dim for mode in modes]
        probs = np.abs(psi.amplitudes) ** 2
        total = 0.0
        for flat, p in enumerate(probs):
            occ = np.unravel_index(flat, dims)
            total += p * (occ[0] + occ[1])
        assert total == pytest.approx(pump.mean_photon, abs=1e-10)

    def test_mixed_pump_rejected(self):
        with pytest.raises(MixedPumpUnsupported):
            brute_force_evolve(PdcModel.multi_mode(2, 0.1), PumpSpec.thermal(1.0))

    def test_cutoffs_must_hold_pump(self):
        with pytest.raises(ValueError):
            brute_force_evolve(
                PdcModel.multi_mode(2, 0.1), PumpSpec.fock(3), cutoffs=(2, 2, 2)
            )


class TestSeriesStateAmplitudes:
    def test_zero_angle_is_vacuum_of_conversions(self):
        table = coefficient_table(MULTI_MODE, 2)
        series = series_state_amplitudes(table, PumpSpec.coherent(1.0), 0.0)
        assert series.norm == pytest.approx(1.0, abs=1e-15)
        assert series.expectations[0] == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(series.expectations[1:], 0.0, atol=1e-15)

    def test_single_photon_pump_tracks_rabi(self):
        # for |1> pumping a pair process the conversion probability is
        # sin^2(theta); the fourth-order series reproduces it to O(theta^6)
        table = coefficient_table(MULTI_MODE, 2)
        diffs = []
        for theta in (0.05, 0.1):
            series = series_state_amplitudes(table, PumpSpec.fock(1), theta)
            prob = series.expectations[1] / series.norm
            diffs.append(abs(prob - math.sin(theta) ** 2))
        assert diffs[0] < 1e-9
        # the residual scales like theta^6: doubling theta costs ~64x
        assert 40 < diffs[1] / diffs[0] < 90

    def test_two_photon_pump_matches_exact_block(self):
        theta = 0.05
        model = PdcModel.multi_mode(2, theta)
        exact = evolve_block(build_block_hamiltonian(model, 2), theta)
        table = coefficient_table(MULTI_MODE, 2)
        series = series_state_amplitudes(table, PumpSpec.fock(2), theta)
        assert series.expectations[2] == pytest.approx(
            abs(exact.u[2]) ** 2, abs=1e-10
        )

    @pytest.mark.parametrize(
        "process,n", [(MULTI_MODE, 2), (SINGLE_MODE, 3)], ids=["multi2", "single3"]
    )
    def test_number_pump_expectations_are_squared_amplitudes(self, process, n):
        # for a number-state pump the factorial moments are deterministic, so
        # the quadratic expectations must collapse to |amplitude|^2 exactly
        table = coefficient_table(process, n)
        m, theta = 3, 0.2
        series = series_state_amplitudes(table, PumpSpec.fock(m), theta)
        amps = series_block_amplitudes(table, m, theta)
        np.testing.assert_allclose(
            series.expectations[: m + 1], np.abs(amps) ** 2, atol=1e-13
        )

    def test_norm_is_one_to_sixth_order(self):
        table = coefficient_table(MULTI_MODE, 2)
        norms = []
        for theta in (0.05, 0.1):
            series = series_state_amplitudes(table, PumpSpec.coherent(1.0), theta)
            norms.append(abs(series.norm - 1.0))
        assert norms[0] < 5e-8
        assert 40 < norms[1] / norms[0] < 90

    def test_expectations_stay_nonnegative(self):
        # quadratic forms of the kept operators cannot go negative even far
        # outside the series' validity range
        table = coefficient_table(MULTI_MODE, 2)
        series = series_state_amplitudes(table, PumpSpec.thermal(1.5), 3.0)
        assert np.all(series.expectations >= 0)
        assert series.norm > 0
