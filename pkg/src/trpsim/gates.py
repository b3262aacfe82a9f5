"""Target gates and the trace-based gate-quality metrics.

The universal set consists of NOT, Hadamard, a modified pi/8 gate, a
modified phase gate (all one-qubit) and a modified controlled-phase gate
(two-qubit).  Gate error is scored through the positive operator
P = (U_a - U_t)† (U_a - U_t): Tr P upper-bounds the worst-case error
probability and fixes the fidelity through F_n = 1 - Tr P / 2^(n+1).

Tr P is deliberately sensitive to the global phase of the applied
unitary; a phase-minimized variant is available as a diagnostic only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z, kron

__all__ = [
    "GATE_NAMES",
    "GateTarget",
    "GateScore",
    "UnknownGate",
    "DimensionMismatch",
    "target_matrix",
    "gate_target",
    "trace_p",
    "fidelity",
    "phase_optimized_trace_p",
    "score",
]


class UnknownGate(ValueError):
    """Raised for gate names outside the universal set."""


class DimensionMismatch(ValueError):
    """Raised when two unitaries (or a unitary and a qubit count) disagree."""


def _build_not() -> np.ndarray:
    return SIGMA_X.copy()


def _build_hadamard() -> np.ndarray:
    return (SIGMA_Z + SIGMA_X) / math.sqrt(2.0)


def _build_mod_pi8() -> np.ndarray:
    return math.cos(math.pi / 8) * SIGMA_X - math.sin(math.pi / 8) * SIGMA_Y


def _build_mod_phase() -> np.ndarray:
    return (SIGMA_X - SIGMA_Y) / math.sqrt(2.0)


def _build_mod_cphase() -> np.ndarray:
    p0 = (IDENTITY2 + SIGMA_Z) / 2.0
    p1 = (IDENTITY2 - SIGMA_Z) / 2.0
    return kron(p0, IDENTITY2) - kron(p1, SIGMA_Z)


_REGISTRY = {
    "not": (1, _build_not),
    "hadamard": (1, _build_hadamard),
    "mod_pi8": (1, _build_mod_pi8),
    "mod_phase": (1, _build_mod_phase),
    "mod_cphase": (2, _build_mod_cphase),
}

GATE_NAMES = tuple(_REGISTRY)


@dataclass(frozen=True)
class GateTarget:
    name: str
    qubits: int
    matrix: np.ndarray


@dataclass(frozen=True)
class GateScore:
    """Score of an applied unitary against a target.

    ``error_bound`` duplicates ``trace_p`` (it is the error-probability
    bound); ``fidelity`` is derived from ``trace_p`` so the pair satisfies
    fidelity == 1 - trace_p / 2^(n_qubits+1) exactly as stored.
    """

    trace_p: float
    fidelity: float
    error_bound: float
    n_qubits: int


def target_matrix(name: str) -> np.ndarray:
    """Target unitary for a gate name (case-insensitive); a fresh array."""
    key = name.lower()
    if key not in _REGISTRY:
        raise UnknownGate(f"unknown gate {name!r}; expected one of {GATE_NAMES}")
    _, build = _REGISTRY[key]
    return build()


def gate_target(name: str) -> GateTarget:
    """Full gate record (canonical name, arity and matrix)."""
    key = name.lower()
    if key not in _REGISTRY:
        raise UnknownGate(f"unknown gate {name!r}; expected one of {GATE_NAMES}")
    qubits, build = _REGISTRY[key]
    return GateTarget(name=key, qubits=qubits, matrix=build())


def _check_dims(u_applied: np.ndarray, u_target: np.ndarray) -> int:
    if u_applied.shape != u_target.shape:
        raise DimensionMismatch(
            f"shape mismatch: {u_applied.shape} vs {u_target.shape}"
        )
    if u_applied.ndim != 2 or u_applied.shape[0] != u_applied.shape[1]:
        raise DimensionMismatch(f"expected square matrices, got {u_applied.shape}")
    return u_applied.shape[0]


def trace_p(u_applied: np.ndarray, u_target: np.ndarray) -> float:
    """Tr[(U_a - U_t)†(U_a - U_t)] = 2d - 2 Re Tr(U_a† U_t) for unitaries.

    Clamped at zero against negative round-off; sensitive to the global
    phase of ``u_applied`` by construction.
    """
    u_applied = np.asarray(u_applied)
    u_target = np.asarray(u_target)
    d = _check_dims(u_applied, u_target)
    overlap = np.vdot(u_applied, u_target).real  # Re Tr(U_a† U_t)
    return max(2.0 * d - 2.0 * overlap, 0.0)


def fidelity(u_applied: np.ndarray, u_target: np.ndarray, n: int) -> float:
    """Gate fidelity (1/2^n) Re Tr(U_a† U_t) for an n-qubit gate."""
    u_applied = np.asarray(u_applied)
    u_target = np.asarray(u_target)
    d = _check_dims(u_applied, u_target)
    if 2**n != d:
        raise DimensionMismatch(f"{n}-qubit gate cannot have dimension {d}")
    return float(np.vdot(u_applied, u_target).real) / d


def phase_optimized_trace_p(u_applied: np.ndarray, u_target: np.ndarray) -> float:
    """min over theta of trace_p(e^{i theta} U_a, U_t) = 2d - 2|Tr(U_a† U_t)|.

    Diagnostic only: optimization and all reported scores use the
    phase-sensitive ``trace_p``.
    """
    u_applied = np.asarray(u_applied)
    u_target = np.asarray(u_target)
    d = _check_dims(u_applied, u_target)
    return max(2.0 * d - 2.0 * abs(np.vdot(u_applied, u_target)), 0.0)


def score(u_applied: np.ndarray, u_target: np.ndarray) -> GateScore:
    """Bundle trace_p and the fidelity it implies into a GateScore."""
    d = _check_dims(np.asarray(u_applied), np.asarray(u_target))
    n = d.bit_length() - 1  # d = 2^n
    tp = trace_p(u_applied, u_target)
    return GateScore(
        trace_p=tp,
        fidelity=1.0 - tp / 2 ** (n + 1),
        error_bound=tp,
        n_qubits=n,
    )
