"""Derivative-free search over sweep parameters.

One-qubit gates are minimized with the downhill simplex method, the
two-qubit gate with simulated annealing.  Both methods run on whatever
scalar cost they are given; ``optimize_gate`` wires them to the
robustness-weighted Tr P objective in mantissa-normalized coordinates
xi = x / x0, so that parameters separated by several orders of magnitude
share one displacement scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .gates import GateTarget
from .model import OneQubitSweep, TwoQubitSweep
from .propagator import IntegratorConfig
from .robustness import CostModel, NonFiniteCost, ZeroParameter, hessian, robust_cost
from .simulate import Sweep, replace_params, score_sweep

__all__ = [
    "ArityMismatch",
    "SimplexConfig",
    "AnnealConfig",
    "OptimizationRecord",
    "nelder_mead",
    "simulated_annealing",
    "optimize_gate",
    "record_to_json",
    "record_from_json",
]

RECORD_SCHEMA_VERSION = "1"


class ArityMismatch(ValueError):
    """Gate arity does not match the sweep type."""


@dataclass(frozen=True)
class SimplexConfig:
    """Downhill simplex settings.

    The initial simplex displaces each coordinate by ``initial_spread``
    relative to its starting value (absolute for exact zeros).  Convergence
    is the standard relative cost-spread criterion
    2|f_hi - f_lo| / (|f_hi| + |f_lo| + tiny) < ``convergence``.  Each
    restart rebuilds the simplex around the incumbent.
    """

    initial_spread: float = 1e-2
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    convergence: float = 1e-10
    max_evals: int = 50_000
    restarts: int = 3

    def __post_init__(self) -> None:
        for name in ("initial_spread", "reflection", "expansion", "contraction", "shrink"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_evals <= 0:
            raise ValueError("max_evals must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


@dataclass(frozen=True)
class AnnealConfig:
    """Simulated annealing settings.

    ``initial_temperature=None`` auto-sets to 10x the starting cost.  The
    temperature ladder is geometric with ratio ``cooling_factor`` and stops
    below ``min_temperature``, which bounds the total evaluation count.
    ``rng_seed`` always has a concrete value; runs are bit-reproducible for
    a fixed seed.
    """

    initial_temperature: float | None = None
    cooling_factor: float = 0.95
    steps_per_temperature: int = 50
    proposal_scale: float | Sequence[float] = 1e-2
    min_temperature: float = 1e-10
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling_factor must lie strictly inside (0, 1)")
        if self.steps_per_temperature <= 0:
            raise ValueError("steps_per_temperature must be positive")
        if self.min_temperature <= 0.0:
            raise ValueError("min_temperature must be positive")
        if self.initial_temperature is not None and self.initial_temperature <= 0.0:
            raise ValueError("initial_temperature must be positive when given")


@dataclass
class OptimizationRecord:
    """Outcome of a search.

    ``trace`` logs (evaluation index, incumbent cost) at every improvement,
    so its last entry equals ``best_cost``.  The gate-level fields
    (``best_trace_p``, ``best_fidelity``, ``hessian_l1``) are populated by
    ``optimize_gate`` and stay None for generic cost minimization.
    ``status`` is "converged", "completed" or "budget_exhausted"; budget
    exhaustion is reported through the record, not raised.
    """

    best_x: np.ndarray
    best_cost: float
    evaluations: int
    trace: list[tuple[int, float]]
    status: str
    best_trace_p: float | None = None
    best_fidelity: float | None = None
    hessian_l1: float | None = None
    gate: str | None = None
    method: str | None = None
    parameter_names: tuple[str, ...] = field(default_factory=tuple)


class _BudgetExhausted(Exception):
    pass


class _Tracker:
    """Counts evaluations and tracks the incumbent across restarts."""

    def __init__(self, f: Callable[[np.ndarray], float], max_evals: int) -> None:
        self._f = f
        self._max = max_evals
        self.evals = 0
        self.best_x: np.ndarray | None = None
        self.best_f = math.inf
        self.trace: list[tuple[int, float]] = []

    def __call__(self, x: np.ndarray) -> float:
        if self.evals >= self._max:
            raise _BudgetExhausted
        value = float(self._f(np.asarray(x, dtype=float)))
        if math.isnan(value):
            value = math.inf
        self.evals += 1
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=float)
            self.trace.append((self.evals, value))
        return value


def _simplex_round(
    ff: _Tracker, x0: np.ndarray, cfg: SimplexConfig
) -> np.ndarray:
    """One simplex run from x0 until the cost spread converges."""
    n = x0.size
    deltas = np.where(x0 != 0.0, cfg.initial_spread * x0, cfg.initial_spread)
    verts = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += deltas[i]
        verts.append(v)
    fvals = [ff(v) for v in verts]

    while True:
        order = np.argsort(fvals, kind="stable")
        verts = [verts[i] for i in order]
        fvals = [fvals[i] for i in order]
        f_lo, f_hi = fvals[0], fvals[-1]
        spread = 2.0 * abs(f_hi - f_lo) / (abs(f_hi) + abs(f_lo) + 1e-300)
        if spread < cfg.convergence:
            return verts[0]

        centroid = np.mean(verts[:-1], axis=0)
        x_ref = centroid + cfg.reflection * (centroid - verts[-1])
        f_ref = ff(x_ref)
        if f_ref < fvals[0]:
            x_exp = centroid + cfg.expansion * (x_ref - centroid)
            f_exp = ff(x_exp)
            if f_exp < f_ref:
                verts[-1], fvals[-1] = x_exp, f_exp
            else:
                verts[-1], fvals[-1] = x_ref, f_ref
        elif f_ref < fvals[-2]:
            verts[-1], fvals[-1] = x_ref, f_ref
        else:
            if f_ref < fvals[-1]:
                x_con = centroid + cfg.contraction * (x_ref - centroid)
            else:
                x_con = centroid + cfg.contraction * (verts[-1] - centroid)
            f_con = ff(x_con)
            if f_con < min(f_ref, fvals[-1]):
                verts[-1], fvals[-1] = x_con, f_con
            else:
                # Shrink every vertex toward the best one.
                for i in range(1, n + 1):
                    verts[i] = verts[0] + cfg.shrink * (verts[i] - verts[0])
                    fvals[i] = ff(verts[i])


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    cfg: SimplexConfig | None = None,
) -> OptimizationRecord:
    """Downhill simplex minimization with restarts around the incumbent."""
    cfg = cfg if cfg is not None else SimplexConfig()
    x0 = np.asarray(x0, dtype=float)
    ff = _Tracker(f, cfg.max_evals)
    status = "converged"
    anchor = x0
    prev_best = math.inf
    try:
        for _ in range(cfg.restarts + 1):
            anchor = _simplex_round(ff, anchor, cfg)
            if ff.best_f >= prev_best - cfg.convergence * (abs(prev_best) + 1e-300):
                break
            prev_best = ff.best_f
    except _BudgetExhausted:
        status = "budget_exhausted"
    best_x = ff.best_x if ff.best_x is not None else x0.copy()
    return OptimizationRecord(
        best_x=best_x,
        best_cost=ff.best_f,
        evaluations=ff.evals,
        trace=ff.trace,
        status=status,
        method="simplex",
    )


def simulated_annealing(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    cfg: AnnealConfig | None = None,
) -> OptimizationRecord:
    """Metropolis search with uniform box proposals and geometric cooling."""
    cfg = cfg if cfg is not None else AnnealConfig()
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    scale = np.broadcast_to(np.asarray(cfg.proposal_scale, dtype=float), (n,))
    rng = np.random.default_rng(cfg.rng_seed)

    ff = _Tracker(f, max_evals=2**63 - 1)
    x = x0.copy()
    fx = ff(x)
    temperature = (
        cfg.initial_temperature
        if cfg.initial_temperature is not None
        else 10.0 * abs(fx)
    )
    while temperature >= cfg.min_temperature:
        for _ in range(cfg.steps_per_temperature):
            candidate = x + scale * rng.uniform(-1.0, 1.0, size=n)
            fc = ff(candidate)
            if fc <= fx:
                x, fx = candidate, fc
            else:
                # exp underflows to 0 for hopeless moves; inf costs never pass.
                if rng.random() < math.exp(-(fc - fx) / temperature):
                    x, fx = candidate, fc
        temperature *= cfg.cooling_factor

    return OptimizationRecord(
        best_x=ff.best_x if ff.best_x is not None else x0.copy(),
        best_cost=ff.best_f,
        evaluations=ff.evals,
        trace=ff.trace,
        status="completed",
        method="anneal",
    )


def _free_parameters(gate: GateTarget, x0: Sweep) -> tuple[str, ...]:
    if gate.qubits == 1:
        if not isinstance(x0, OneQubitSweep):
            raise ArityMismatch(
                f"one-qubit gate {gate.name!r} needs a OneQubitSweep, got {type(x0).__name__}"
            )
        return ("lam", "eta4")
    if not isinstance(x0, TwoQubitSweep):
        raise ArityMismatch(
            f"two-qubit gate {gate.name!r} needs a TwoQubitSweep, got {type(x0).__name__}"
        )
    return ("c4", "d4")


# External names for the free parameters, for records and reports.
_EXTERNAL_NAME = {"lam": "lambda", "eta4": "eta4", "c4": "c4", "d4": "d4"}


def optimize_gate(
    gate: GateTarget,
    x0: Sweep,
    model: CostModel,
    method: str = "simplex",
    *,
    integrator: IntegratorConfig | None = None,
    simplex: SimplexConfig | None = None,
    anneal: AnnealConfig | None = None,
    record_hessian: bool = True,
) -> OptimizationRecord:
    """Minimize the robust cost over a gate's free sweep parameters.

    One-qubit gates vary (lambda, eta4) at fixed tau0; the two-qubit gate
    varies (c4, d4) with all other couplings pinned.  The search runs in
    xi = x / x0 coordinates.  Parameter vectors that violate sweep
    invariants cost +inf rather than raising, so the search can step past
    them.  After the search the best point is re-simulated from scratch;
    with ``record_hessian`` the Hessian l1-norm there is reported too.
    """
    free = _free_parameters(gate, x0)
    xbar0 = np.array([getattr(x0, name) for name in free], dtype=float)

    def base(xvec: np.ndarray) -> float:
        try:
            sweep = replace_params(x0, **dict(zip(free, (float(v) for v in xvec))))
        except ValueError:
            return math.inf
        _, gate_score, _ = score_sweep(sweep, gate, integrator)
        return gate_score.trace_p

    def cost(xvec: np.ndarray) -> float:
        center = base(np.asarray(xvec, dtype=float))
        if not math.isfinite(center):
            return math.inf
        if model.r_weight == 0.0:
            return center
        try:
            return robust_cost(xvec, base, model)
        except (NonFiniteCost, ZeroParameter):
            return math.inf

    def cost_xi(xi: np.ndarray) -> float:
        return cost(xbar0 * np.asarray(xi, dtype=float))

    ones = np.ones(len(free))
    if method == "simplex":
        rec = nelder_mead(cost_xi, ones, simplex)
    elif method == "anneal":
        rec = simulated_annealing(cost_xi, ones, anneal)
    else:
        raise ValueError(f"unknown method {method!r}; expected 'simplex' or 'anneal'")

    best_x = xbar0 * rec.best_x
    best_sweep = replace_params(x0, **dict(zip(free, (float(v) for v in best_x))))
    _, verify_score, _ = score_sweep(best_sweep, gate, integrator)
    best_tp = verify_score.trace_p
    best_f = verify_score.fidelity
    l1 = None
    if record_hessian:
        l1 = hessian(base, best_x, f0=best_tp, step_rule=model.step_rule).l1_norm

    return replace(
        rec,
        best_x=best_x,
        best_trace_p=best_tp,
        best_fidelity=best_f,
        hessian_l1=l1,
        gate=gate.name,
        parameter_names=tuple(_EXTERNAL_NAME[n] for n in free),
    )


def record_to_json(rec: OptimizationRecord, include_trace: bool = True) -> str:
    """Serialize a record deterministically (sorted keys, no timestamps)."""
    payload = {
        "schema_version": RECORD_SCHEMA_VERSION,
        "gate": rec.gate,
        "method": rec.method,
        "parameter_names": list(rec.parameter_names),
        "best_x": [float(v) for v in np.asarray(rec.best_x).ravel()],
        "best_cost": rec.best_cost,
        "best_trace_p": rec.best_trace_p,
        "best_fidelity": rec.best_fidelity,
        "hessian_l1": rec.hessian_l1,
        "evaluations": rec.evaluations,
        "status": rec.status,
        "trace": [[i, c] for i, c in rec.trace] if include_trace else [],
    }
    return json.dumps(payload, sort_keys=True, indent=2)


def record_from_json(text: str) -> OptimizationRecord:
    data = json.loads(text)
    if data.get("schema_version") != RECORD_SCHEMA_VERSION:
        raise ValueError(
            f"unsupported record schema_version {data.get('schema_version')!r}"
        )
    return OptimizationRecord(
        best_x=np.asarray(data["best_x"], dtype=float),
        best_cost=float(data["best_cost"]),
        evaluations=int(data["evaluations"]),
        trace=[(int(i), float(c)) for i, c in data.get("trace", [])],
        status=str(data["status"]),
        best_trace_p=data.get("best_trace_p"),
        best_fidelity=data.get("best_fidelity"),
        hessian_l1=data.get("hessian_l1"),
        gate=data.get("gate"),
        method=data.get("method"),
        parameter_names=tuple(data.get("parameter_names", ())),
    )
