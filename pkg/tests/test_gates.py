import math

import numpy as np
import pytest

from trpsim.gates import (
    GATE_NAMES,
    DimensionMismatch,
    UnknownGate,
    fidelity,
    gate_target,
    phase_optimized_trace_p,
    score,
    target_matrix,
    trace_p,
)
from trpsim.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, unitarity_defect


def random_unitary(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestTargets:
    def test_not_matrix(self):
        assert np.array_equal(target_matrix("not"), np.array([[0, 1], [1, 0]], complex))

    def test_hadamard_squares_to_identity(self):
        h = target_matrix("hadamard")
        assert np.allclose(h @ h, np.eye(2), atol=1e-15)

    def test_mod_cphase_diagonal(self):
        assert np.allclose(target_matrix("mod_cphase"), np.diag([1, 1, -1, 1]), atol=0)

    def test_pauli_expansions_exact(self):
        assert np.array_equal(
            target_matrix("hadamard"), (SIGMA_Z + SIGMA_X) / math.sqrt(2.0)
        )
        assert np.array_equal(
            target_matrix("mod_pi8"),
            math.cos(math.pi / 8) * SIGMA_X - math.sin(math.pi / 8) * SIGMA_Y,
        )
        assert np.array_equal(
            target_matrix("mod_phase"), (SIGMA_X - SIGMA_Y) / math.sqrt(2.0)
        )

    @pytest.mark.parametrize("name", GATE_NAMES)
    def test_all_targets_unitary(self, name):
        assert unitarity_defect(target_matrix(name)) < 1e-14

    def test_unknown_gate(self):
        with pytest.raises(UnknownGate):
            target_matrix("cnot")

    def test_gate_target_arity(self):
        assert gate_target("not").qubits == 1
        assert gate_target("MOD_CPHASE").qubits == 2


class TestTraceP:
    def test_equal_unitaries_zero(self):
        u = target_matrix("hadamard")
        assert trace_p(u, u) == pytest.approx(0.0, abs=1e-14)
        assert trace_p(target_matrix("not"), target_matrix("not")) == 0.0

    def test_opposite_sign_one_qubit(self):
        u = target_matrix("not")
        assert trace_p(-u, u) == pytest.approx(8.0)

    def test_symmetry_and_nonnegativity(self):
        rng = np.random.default_rng(23)
        for n in (2, 4):
            for _ in range(50):
                u, v = random_unitary(rng, n), random_unitary(rng, n)
                assert trace_p(u, v) == pytest.approx(trace_p(v, u), abs=1e-12)
                assert trace_p(u, v) >= 0.0

    def test_global_phase_sensitivity(self):
        # trace_p(e^{i theta} U, U) = 4 * 2^n * sin^2(theta/2): not phase invariant.
        rng = np.random.default_rng(29)
        for n_qubits, d in ((1, 2), (2, 4)):
            u = random_unitary(rng, d)
            for theta in (0.1, 0.7, 2.0, np.pi):
                expected = 4.0 * d * math.sin(theta / 2.0) ** 2
                assert trace_p(np.exp(1j * theta) * u, u) == pytest.approx(expected, rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            trace_p(np.eye(2), np.eye(4))


class TestFidelity:
    def test_perfect_gate(self):
        u = target_matrix("not")
        assert fidelity(u, u, 1) == pytest.approx(1.0)

    def test_identity_with_trace_p(self):
        rng = np.random.default_rng(31)
        for n_qubits, d in ((1, 2), (2, 4)):
            for _ in range(200):
                u, v = random_unitary(rng, d), random_unitary(rng, d)
                f = fidelity(u, v, n_qubits)
                tp = trace_p(u, v)
                assert abs(f - (1.0 - tp / 2 ** (n_qubits + 1))) < 1e-12

    def test_reference_values(self):
        # published fidelity roundings for one- and two-qubit error levels
        assert 1.0 - 1.12e-4 / 4.0 == pytest.approx(0.99997, abs=5e-6)
        assert 1.0 - 8.87e-5 / 8.0 == pytest.approx(0.99999, abs=5e-6)

    def test_wrong_qubit_count(self):
        with pytest.raises(DimensionMismatch):
            fidelity(np.eye(2), np.eye(2), 2)


class TestPhaseOptimized:
    def test_phase_rotation_is_ignored(self):
        rng = np.random.default_rng(37)
        u = random_unitary(rng, 2)
        assert phase_optimized_trace_p(np.exp(0.3j) * u, u) == pytest.approx(0.0, abs=1e-12)

    def test_lower_bound_on_trace_p(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            u, v = random_unitary(rng, 4), random_unitary(rng, 4)
            assert phase_optimized_trace_p(u, v) <= trace_p(u, v) + 1e-12


class TestScore:
    def test_score_consistency(self):
        rng = np.random.default_rng(43)
        u, v = random_unitary(rng, 4), random_unitary(rng, 4)
        s = score(u, v)
        assert s.n_qubits == 2
        assert s.error_bound == s.trace_p
        assert s.fidelity == 1.0 - s.trace_p / 8.0
        assert 0.0 <= s.trace_p <= 16.0
