import numpy as np
import pytest

from trpsim.linalg import (
    IDENTITY2,
    IDENTITY4,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    NotHermitian,
    dagger,
    eigh,
    kron,
    unitarity_defect,
)


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng, n):
    a = random_complex(rng, n)
    return (a + a.conj().T) / 2.0


class TestKron:
    def test_identity_case(self):
        assert np.array_equal(kron(IDENTITY2, IDENTITY2), IDENTITY4)

    def test_sigma_z_embedding(self):
        assert np.array_equal(kron(SIGMA_Z, IDENTITY2), np.diag([1, 1, -1, -1]).astype(complex))

    def test_sigma_x_squared_is_identity(self):
        xx = kron(SIGMA_X, SIGMA_X)
        assert np.array_equal(xx @ xx, IDENTITY4)

    def test_associativity_on_integer_matrices(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.integers(-3, 4, size=(2, 2)).astype(complex)
            b = rng.integers(-3, 4, size=(2, 2)).astype(complex)
            c = rng.integers(-3, 4, size=(2, 2)).astype(complex)
            assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            kron(np.ones((2, 3)), IDENTITY2)


class TestEigh:
    def test_pauli_z_spectrum(self):
        es = eigh(SIGMA_Z)
        assert np.allclose(es.eigenvalues, [-1.0, 1.0])

    def test_pauli_x_spectrum_and_vectors(self):
        es = eigh(SIGMA_X)
        assert np.allclose(es.eigenvalues, [-1.0, 1.0])
        s = 1.0 / np.sqrt(2.0)
        # phase convention: largest-magnitude component real positive
        assert np.allclose(np.abs(es.eigenvectors), s)
        for k in range(2):
            v = es.eigenvectors[:, k]
            assert np.allclose(SIGMA_X @ v, es.eigenvalues[k] * v, atol=1e-14)

    def test_diagonal_input_sorted(self):
        es = eigh(np.diag([3.0, 1.0, 2.0, 0.0]).astype(complex))
        assert np.allclose(es.eigenvalues, [0.0, 1.0, 2.0, 3.0])

    def test_rejects_non_hermitian(self):
        m = np.array([[0.0, 1.0], [0.0, 0.0]], complex)
        with pytest.raises(NotHermitian):
            eigh(m)

    def test_reconstruction_random_hermitian(self):
        rng = np.random.default_rng(11)
        for n in (2, 4):
            for _ in range(25):
                h = random_hermitian(rng, n)
                es = eigh(h)
                v, w = es.eigenvectors, es.eigenvalues
                assert np.abs(v @ np.diag(w) @ v.conj().T - h).max() < 1e-11
                assert np.abs(v.conj().T @ v - np.eye(n)).max() < 1e-12
                assert np.all(np.diff(w) >= -1e-14)

    def test_eigen_residual_random_hermitian(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            h = random_hermitian(rng, 4)
            es = eigh(h)
            scale = np.abs(h).max()
            for k in range(4):
                res = h @ es.eigenvectors[:, k] - es.eigenvalues[k] * es.eigenvectors[:, k]
                assert np.abs(res).max() < 1e-12 * max(scale, 1.0)

    def test_deterministic_phase_fix(self):
        rng = np.random.default_rng(17)
        h = random_hermitian(rng, 4)
        a = eigh(h)
        b = eigh(h.copy())
        assert np.array_equal(a.eigenvectors, b.eigenvectors)
        for k in range(4):
            v = a.eigenvectors[:, k]
            pivot = v[np.argmax(np.abs(v))]
            assert pivot.imag == pytest.approx(0.0, abs=1e-15)
            assert pivot.real > 0.0


class TestUnitarityDefect:
    def test_identity_is_zero(self):
        assert unitarity_defect(IDENTITY2) == 0.0

    def test_scaled_identity(self):
        assert unitarity_defect(2.0 * IDENTITY2) == pytest.approx(3.0)

    def test_hadamard_is_unitary(self):
        h = (SIGMA_Z + SIGMA_X) / np.sqrt(2.0)
        assert unitarity_defect(h) < 1e-15


def test_dagger_involution():
    rng = np.random.default_rng(3)
    a = random_complex(rng, 4)
    assert np.array_equal(dagger(dagger(a)), a)


def test_trace_cyclic_property():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = random_complex(rng, 4)
        b = random_complex(rng, 4)
        ta, tb = np.trace(a @ b), np.trace(b @ a)
        assert abs(ta - tb) <= 1e-12 * max(abs(ta), 1.0)
