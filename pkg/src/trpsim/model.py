"""Sweep parameters and time-dependent control Hamiltonians.

A twisted-rapid-passage (TRP) sweep inverts the longitudinal control
field linearly in dimensionless time tau while the transverse component
twists through a quartic azimuthal phase

    phi4(tau) = (eta4 / (2 lam)) * tau**4 .

In these units a one-qubit sweep is fully described by (lam, eta4, tau0)
and evolves under

    H1(tau) = (1/lam) * ( -tau * sz - cos(phi4) * sx - sin(phi4) * sy ) ,

with the sweep running over tau in [-tau0/2, +tau0/2].  The two-qubit
variant adds Zeeman offsets d1, d2, a transverse-amplitude ratio d3, an
Ising coupling d4, and a level-splitting term c4 |E4><E4| built from the
instantaneous top eigenstate of the remaining five terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import eigh

__all__ = [
    "NonPositiveParameter",
    "OneQubitSweep",
    "PhysicalSweep",
    "TwoQubitSweep",
    "PARAM_FIELDS",
    "to_dimensionless",
    "twist_phase",
    "resonance_times",
    "hamiltonian_1q",
    "hamiltonian_2q",
]


class NonPositiveParameter(ValueError):
    """Raised when a sweep parameter that must be positive is not."""


def _require_positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise NonPositiveParameter(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class OneQubitSweep:
    """Dimensionless one-qubit sweep: lam = hbar*a/b^2, eta4 = hbar*B*b^2/a^3,
    tau0 = (a/b)*T0.  All three must be strictly positive."""

    lam: float
    eta4: float
    tau0: float

    def __post_init__(self) -> None:
        _require_positive("lam", self.lam)
        _require_positive("eta4", self.eta4)
        _require_positive("tau0", self.tau0)


@dataclass(frozen=True)
class PhysicalSweep:
    """Sweep in physical units: inversion rate a (energy/time), transverse
    amplitude b (energy), twist strength B (1/time^4 for quartic twist) and
    inversion time T0."""

    a: float
    b: float
    B: float
    T0: float
    hbar: float = 1.0

    def __post_init__(self) -> None:
        _require_positive("a", self.a)
        _require_positive("b", self.b)
        _require_positive("B", self.B)
        _require_positive("T0", self.T0)
        _require_positive("hbar", self.hbar)


@dataclass(frozen=True)
class TwoQubitSweep:
    """Dimensionless two-qubit sweep.

    lam, eta4, tau0 are defined as for one qubit with the second qubit's
    transverse amplitude b2 in place of b.  The couplings are
    d1 = (w1 - w2) b2 / a, d2 = (Delta / a) b2, d3 = b1 / b2 and
    d4 = (J / a) b2; they and the level-splitting weight c4 may take either
    sign.
    """

    lam: float
    eta4: float
    tau0: float
    c4: float
    d1: float
    d2: float
    d3: float
    d4: float

    def __post_init__(self) -> None:
        _require_positive("lam", self.lam)
        _require_positive("eta4", self.eta4)
        _require_positive("tau0", self.tau0)


# External name -> dataclass field, for CLI flags and sensitivity scans.
PARAM_FIELDS = {
    "lambda": "lam",
    "eta4": "eta4",
    "tau0": "tau0",
    "c4": "c4",
    "d1": "d1",
    "d2": "d2",
    "d3": "d3",
    "d4": "d4",
}


def to_dimensionless(p: PhysicalSweep) -> OneQubitSweep:
    """Convert a physical sweep to its dimensionless description."""
    return OneQubitSweep(
        lam=p.hbar * p.a / p.b**2,
        eta4=p.hbar * p.B * p.b**2 / p.a**3,
        tau0=(p.a / p.b) * p.T0,
    )


def twist_phase(tau: float, s: OneQubitSweep | TwoQubitSweep) -> float:
    """Quartic twist phase (eta4 / (2 lam)) * tau^4, in radians."""
    return (s.eta4 / (2.0 * s.lam)) * tau**4


def resonance_times(s: OneQubitSweep) -> tuple[float, ...]:
    """Dimensionless times at which the sweep crosses resonance.

    For quartic twist the resonance condition reduces to tau = eta4 * tau^3,
    giving the three crossings {-eta4^(-1/2), 0, +eta4^(-1/2)}.  Exact
    duplicates are merged; no tolerance-based deduplication is applied.
    """
    r = 1.0 / math.sqrt(s.eta4)
    times = (-r, 0.0, r)
    out: list[float] = []
    for t in times:
        if not out or t != out[-1]:
            out.append(t)
    return tuple(out)


def hamiltonian_1q(tau: float, s: OneQubitSweep) -> np.ndarray:
    """One-qubit sweep Hamiltonian at dimensionless time tau (2x2 Hermitian).

    Equals (1/lam) * ( -tau*sz - cos(phi4)*sx - sin(phi4)*sy ) with
    phi4 = twist_phase(tau, s).
    """
    phi = twist_phase(tau, s)
    inv = 1.0 / s.lam
    z = -tau * inv
    # -cos*sx - sin*sy has off-diagonal entries -exp(-i phi), -exp(+i phi).
    off = -inv * complex(math.cos(phi), -math.sin(phi))
    h = np.empty((2, 2), dtype=np.complex128)
    h[0, 0] = z
    h[0, 1] = off
    h[1, 0] = off.conjugate()
    h[1, 1] = -z
    return h


def _two_qubit_bare(tau: float, s: TwoQubitSweep) -> np.ndarray:
    """The five explicit Pauli terms of the two-qubit Hamiltonian (no c4)."""
    phi = twist_phase(tau, s)
    inv = 1.0 / s.lam
    az1 = -(s.d1 + s.d2) / 2.0 + tau * inv
    az2 = -s.d2 / 2.0 + tau * inv
    g = -(math.pi * s.d4) / 2.0
    # Transverse terms -c*sx - s*sy produce off-diagonals -exp(-+i phi).
    w1 = -s.d3 * inv * complex(math.cos(phi), -math.sin(phi))
    w2 = -inv * complex(math.cos(phi), -math.sin(phi))
    h = np.zeros((4, 4), dtype=np.complex128)
    # Basis |q1 q2>: |00>, |01>, |10>, |11>.
    h[0, 0] = az1 + az2 + g
    h[1, 1] = az1 - az2 - g
    h[2, 2] = -az1 + az2 - g
    h[3, 3] = -az1 - az2 + g
    h[0, 1] = w2
    h[1, 0] = w2.conjugate()
    h[2, 3] = w2
    h[3, 2] = w2.conjugate()
    h[0, 2] = w1
    h[2, 0] = w1.conjugate()
    h[1, 3] = w1
    h[3, 1] = w1.conjugate()
    return h


def hamiltonian_2q(tau: float, s: TwoQubitSweep) -> np.ndarray:
    """Two-qubit sweep Hamiltonian at dimensionless time tau (4x4 Hermitian).

    The c4-free part is the sum of the two Zeeman-plus-twist terms and the
    Ising coupling; when c4 is nonzero the projector onto that part's
    highest-eigenvalue instantaneous eigenstate is added with weight c4.
    With c4 == 0 the eigendecomposition is skipped entirely.
    """
    h = _two_qubit_bare(tau, s)
    if s.c4 == 0.0:
        return h
    es = eigh(h)
    e4 = es.eigenvectors[:, -1]
    return h + s.c4 * np.outer(e4, e4.conj())
