"""Minimal dense complex linear algebra for 2x2 and 4x4 matrices.

Everything here operates on plain ``numpy.ndarray`` objects with
``complex128`` entries.  The module only needs to cover the two system
sizes that occur in one- and two-qubit sweeps, so no attempt is made to
be clever about larger problems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "IDENTITY2",
    "IDENTITY4",
    "EigenSystem",
    "NotHermitian",
    "dagger",
    "kron",
    "eigh",
    "unitarity_defect",
]


class NotHermitian(ValueError):
    """Raised when a matrix handed to ``eigh`` fails the Hermiticity check."""


def _readonly(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


SIGMA_X = _readonly(np.array([[0, 1], [1, 0]], dtype=np.complex128))
SIGMA_Y = _readonly(np.array([[0, -1j], [1j, 0]], dtype=np.complex128))
SIGMA_Z = _readonly(np.array([[1, 0], [0, -1]], dtype=np.complex128))
IDENTITY2 = _readonly(np.eye(2, dtype=np.complex128))
IDENTITY4 = _readonly(np.eye(4, dtype=np.complex128))

# Absolute elementwise tolerance for the Hermiticity precondition of eigh.
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; column k of ``eigenvectors``
    is the unit eigenvector belonging to ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"kron expects square matrices, got shape {a.shape}")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"kron expects square matrices, got shape {b.shape}")
    return np.kron(a, b)


def _fix_phases(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive.

    Ties on the magnitude pick the lowest row index, which keeps the
    output deterministic for a fixed input.
    """
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0.0, np.conj(pivots) / np.where(mags > 0.0, mags, 1.0), 1.0)
    return v * phases[np.newaxis, :]


def eigh(h: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    The input must be Hermitian to within ``HERMITICITY_TOL`` elementwise,
    otherwise ``NotHermitian`` is raised.  Eigenvector phases are fixed by
    making the largest-magnitude component of each column real positive, so
    repeated calls on identical input return identical output.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"eigh expects a square matrix, got shape {h.shape}")
    defect = np.abs(h - h.conj().T).max()
    if defect > HERMITICITY_TOL:
        raise NotHermitian(f"matrix deviates from Hermiticity by {defect:.3e}")
    w, v = np.linalg.eigh(h)
    return EigenSystem(eigenvalues=w, eigenvectors=_fix_phases(v))


def unitarity_defect(u: np.ndarray) -> float:
    """Max elementwise deviation of U†U from the identity."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"unitarity_defect expects a square matrix, got shape {u.shape}")
    d = u.shape[0]
    return float(np.abs(u.conj().T @ u - np.eye(d)).max())
