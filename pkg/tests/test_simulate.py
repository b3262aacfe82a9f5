import numpy as np
import pytest

from trpsim.gates import gate_target, trace_p
from trpsim.linalg import unitarity_defect
from trpsim.model import OneQubitSweep, TwoQubitSweep
from trpsim.presets import SECTION4_SWEEP, TABLE1_SWEEPS
from trpsim.propagator import IntegratorConfig, propagate
from trpsim.simulate import (
    align_endpoint_phases,
    evolution_generator,
    frame_unitary,
    hamiltonian_of,
    propagate_sweep,
    qubits_of,
    replace_params,
    score_sweep,
)

SHORT_1Q = OneQubitSweep(lam=2.0, eta4=0.01, tau0=4.0)
SHORT_2Q = TwoQubitSweep(lam=2.0, eta4=0.01, tau0=3.0, c4=1.1, d1=4.0, d2=0.3, d3=-0.41, d4=0.8)


class TestPropagateSweep:
    def test_window_spans_twice_tau0(self):
        # sweep propagation covers [-tau0, +tau0]
        cfg = IntegratorConfig(rel_tolerance=1e-9, abs_tolerance=1e-11)
        res = propagate_sweep(SHORT_1Q, cfg)
        ref = propagate(evolution_generator(SHORT_1Q), 2.0 * SHORT_1Q.tau0, cfg)
        assert np.abs(res.u_applied - ref.u_applied).max() < 1e-8

    def test_fast_and_generic_paths_agree_1q(self):
        cfg = IntegratorConfig(rel_tolerance=1e-10, abs_tolerance=1e-12)
        fast = propagate_sweep(SHORT_1Q, cfg)
        generic = propagate(evolution_generator(SHORT_1Q), 2.0 * SHORT_1Q.tau0, cfg)
        assert np.abs(fast.u_applied - generic.u_applied).max() < 1e-9

    def test_fast_and_generic_paths_agree_2q(self):
        cfg = IntegratorConfig(rel_tolerance=1e-8, abs_tolerance=1e-10)
        fast = propagate_sweep(SHORT_2Q, cfg)
        generic = propagate(evolution_generator(SHORT_2Q), 2.0 * SHORT_2Q.tau0, cfg)
        assert np.abs(fast.u_applied - generic.u_applied).max() < 1e-7

    def test_determinism(self):
        a = propagate_sweep(SHORT_1Q)
        b = propagate_sweep(SHORT_1Q)
        assert np.array_equal(a.u_applied, b.u_applied)
        assert a.steps_taken == b.steps_taken

    def test_defect_reported(self):
        res = propagate_sweep(SHORT_1Q)
        assert res.max_unitarity_defect < 1e-9
        assert res.tolerance_used == 1e-10


class TestGeneratorConventions:
    def test_one_qubit_generator_is_minus_hamiltonian(self):
        g = evolution_generator(SHORT_1Q)
        h = hamiltonian_of(SHORT_1Q)
        for tau in (-2.0, 0.5, 3.0):
            assert np.array_equal(g(tau), -h(tau))

    def test_two_qubit_generator_is_plus_hamiltonian(self):
        g = evolution_generator(SHORT_2Q)
        h = hamiltonian_of(SHORT_2Q)
        for tau in (-1.0, 0.0, 2.0):
            assert np.array_equal(g(tau), h(tau))

    def test_qubits_of(self):
        assert qubits_of(SHORT_1Q) == 1
        assert qubits_of(SHORT_2Q) == 2

    def test_replace_params(self):
        s = replace_params(SHORT_1Q, lam=3.0)
        assert s.lam == 3.0 and s.eta4 == SHORT_1Q.eta4


class TestFrameUnitary:
    def test_stays_unitary(self):
        res = propagate_sweep(SHORT_1Q)
        framed = frame_unitary(res.u_applied, SHORT_1Q)
        assert unitarity_defect(framed) < 1e-9

    def test_deterministic(self):
        res = propagate_sweep(SHORT_1Q)
        a = frame_unitary(res.u_applied, SHORT_1Q)
        b = frame_unitary(res.u_applied.copy(), SHORT_1Q)
        assert np.array_equal(a, b)


class TestAlignment:
    def rz_pair(self, rng, d):
        if d == 2:
            phases = rng.uniform(-np.pi, np.pi, size=2)
            return np.diag(np.exp(1j * phases))
        a, b = rng.uniform(-np.pi, np.pi, size=2)
        signs1 = np.array([1, 1, -1, -1])
        signs2 = np.array([1, -1, 1, -1])
        return np.diag(np.exp(1j * (a * signs1 + b * signs2)))

    @pytest.mark.parametrize("gate_name,d", [("not", 2), ("hadamard", 2), ("mod_cphase", 4)])
    def test_recovers_dressed_target(self, gate_name, d):
        # a target hidden behind arbitrary endpoint z-phases aligns back to it
        rng = np.random.default_rng(83)
        v = gate_target(gate_name).matrix
        for _ in range(5):
            hidden = self.rz_pair(rng, d) @ v @ self.rz_pair(rng, d)
            aligned = align_endpoint_phases(hidden, v)
            assert trace_p(aligned, v) < 1e-9

    def test_alignment_beats_raw(self):
        rng = np.random.default_rng(89)
        v = gate_target("hadamard").matrix
        u = self.rz_pair(rng, 2) @ v @ self.rz_pair(rng, 2)
        aligned = align_endpoint_phases(u, v)
        assert trace_p(aligned, v) <= trace_p(u, v) + 1e-12

    def test_preserves_entry_magnitudes(self):
        rng = np.random.default_rng(97)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        q, _ = np.linalg.qr(a)
        aligned = align_endpoint_phases(q, gate_target("not").matrix)
        assert np.allclose(np.abs(aligned), np.abs(q), atol=1e-12)

    def test_deterministic(self):
        res = propagate_sweep(SHORT_1Q)
        framed = frame_unitary(res.u_applied, SHORT_1Q)
        tgt = gate_target("not").matrix
        assert np.array_equal(
            align_endpoint_phases(framed, tgt), align_endpoint_phases(framed, tgt)
        )


class TestScoreSweep:
    def test_reference_point_regression(self):
        # frozen values of this implementation at the bundled operating points
        expected = {
            "not": 3.666e-6,
            "hadamard": 6.7145e-5,
            "mod_pi8": 7.5417e-5,
            "mod_phase": 5.2043e-5,
        }
        for name, want in expected.items():
            _, sc, _ = score_sweep(TABLE1_SWEEPS[name], gate_target(name))
            assert sc.trace_p == pytest.approx(want, rel=1e-3)

    def test_score_consistency(self):
        res, sc, diag = score_sweep(SHORT_1Q, gate_target("not"))
        assert sc.error_bound == sc.trace_p
        assert sc.fidelity == 1.0 - sc.trace_p / 4.0
        assert 0.0 <= diag <= sc.trace_p + 1e-12

    def test_two_qubit_score_finite(self):
        cfg = IntegratorConfig(rel_tolerance=1e-6, abs_tolerance=1e-8)
        res, sc, _ = score_sweep(SHORT_2Q, gate_target("mod_cphase"), cfg)
        assert np.isfinite(sc.trace_p)
        assert 0.0 <= sc.trace_p <= 16.0
