"""Robustness machinery: scaled-coordinate Hessians, the l1 penalty and
fourth-significant-figure sensitivity scans.

Robustness of a sweep is judged by how fast the cost kappa = Tr P moves
when each parameter x_i is nudged by one unit in its fourth significant
figure, the resolution of commodity waveform hardware.  In the relative
coordinates xi_i = x_i / xbar_i that nudge is delta_xi = 0.001 / m_i with
m_i the mantissa of xbar_i, and the curvature is collected in the Hessian
H_ij = d^2 kappa / (d xi_i d xi_j).  A gate counts as robust while the
entrywise l1-norm sum_ij |H_ij| stays near 2500; the penalty grows
quadratically beyond that threshold.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

import numpy as np

from .gates import GateTarget
from .model import PARAM_FIELDS
from .propagator import IntegratorConfig
from .simulate import Sweep, replace_params, score_sweep

__all__ = [
    "DEFAULT_L1_THRESHOLD",
    "ZeroParameter",
    "NonFiniteCost",
    "CostModel",
    "HessianReport",
    "ScanRow",
    "relative_step",
    "fourth_figure_unit",
    "hessian",
    "penalty",
    "robust_cost",
    "sensitivity_scan",
    "write_scan_csv",
]

DEFAULT_L1_THRESHOLD = 2500.0


class ZeroParameter(ValueError):
    """A relative step cannot be formed around an exactly zero parameter."""


class NonFiniteCost(ArithmeticError):
    """The cost function returned a non-finite value at a stencil point."""


def _mantissa(x: float) -> float:
    return abs(x) / 10.0 ** math.floor(math.log10(abs(x)))


def relative_step(xbar_i: float) -> float:
    """Relative step 0.001/m for mantissa m of xbar_i, i.e. a variation of
    one unit in the fourth significant figure."""
    if xbar_i == 0.0:
        raise ZeroParameter("cannot take a relative step around 0")
    return 0.001 / _mantissa(xbar_i)


def fourth_figure_unit(x: float) -> float:
    """Absolute size of one unit in the fourth significant figure of x."""
    if x == 0.0:
        raise ZeroParameter("0 has no significant figures")
    return 10.0 ** (math.floor(math.log10(abs(x))) - 3)


@dataclass(frozen=True)
class CostModel:
    """Configuration of the robustness-weighted objective.

    ``r_weight`` scales the penalty; with ``r_weight == 0`` the objective
    is the bare Tr P.  ``step_rule`` maps a parameter value to the relative
    Hessian step; the default probes the fourth significant figure.
    """

    r_weight: float = 0.0
    l1_threshold: float = DEFAULT_L1_THRESHOLD
    step_rule: Callable[[float], float] = relative_step

    def __post_init__(self) -> None:
        if self.r_weight < 0.0:
            raise ValueError("r_weight must be >= 0")
        if self.l1_threshold <= 0.0:
            raise ValueError("l1_threshold must be > 0")


@dataclass(frozen=True)
class HessianReport:
    """Second-difference Hessian in relative coordinates.

    ``matrix`` holds H_ij at the expansion point ``at_point``;
    ``steps_used`` are the per-parameter relative steps.  ``l1_norm`` is
    the entrywise sum of absolute values (not the induced matrix 1-norm).
    ``quote_scale`` is the diagnostic combination
    5e-7 * sum_ij H_ij / (m_i m_j) over the parameter mantissas, the cost
    level at which fourth-figure variations become order-one.
    """

    matrix: np.ndarray
    l1_norm: float
    at_point: np.ndarray
    steps_used: np.ndarray
    quote_scale: float


@dataclass(frozen=True)
class ScanRow:
    parameter: str
    value: float
    trace_p: float
    fidelity: float


def hessian(
    f: Callable[[np.ndarray], float],
    xbar: Sequence[float],
    f0: float | None = None,
    step_rule: Callable[[float], float] = relative_step,
) -> HessianReport:
    """Central second differences of f in the coordinates xi = x/xbar.

    Diagonal entries use (f(+) - 2 f(0) + f(-)) / dxi^2, off-diagonals the
    four-point cross stencil; the result is symmetric by construction.
    ``f0`` may supply a precomputed center value to save one evaluation.
    """
    xbar = np.asarray(xbar, dtype=float)
    n = xbar.size
    if np.any(xbar == 0.0):
        raise ZeroParameter("hessian requires componentwise nonzero xbar")
    steps = np.array([step_rule(v) for v in xbar])

    def ev(shift: np.ndarray) -> float:
        val = float(f(xbar * (1.0 + shift)))
        if not math.isfinite(val):
            raise NonFiniteCost(f"cost is {val!r} at relative shift {shift}")
        return val

    center = ev(np.zeros(n)) if f0 is None else float(f0)
    if not math.isfinite(center):
        raise NonFiniteCost(f"cost is {center!r} at the expansion point")

    h = np.zeros((n, n))
    for i in range(n):
        shift = np.zeros(n)
        shift[i] = steps[i]
        fp = ev(shift)
        shift[i] = -steps[i]
        fm = ev(shift)
        h[i, i] = (fp - 2.0 * center + fm) / steps[i] ** 2
    for i in range(n):
        for j in range(i + 1, n):
            shift = np.zeros(n)
            shift[i], shift[j] = steps[i], steps[j]
            fpp = ev(shift)
            shift[j] = -steps[j]
            fpm = ev(shift)
            shift[i] = -steps[i]
            fmm = ev(shift)
            shift[j] = steps[j]
            fmp = ev(shift)
            h[i, j] = h[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j])

    mantissas = np.array([_mantissa(v) for v in xbar])
    quote = 5e-7 * float(np.sum(h / np.outer(mantissas, mantissas)))
    return HessianReport(
        matrix=h,
        l1_norm=float(np.abs(h).sum()),
        at_point=xbar.copy(),
        steps_used=steps,
        quote_scale=quote,
    )


def penalty(l1: float, threshold: float = DEFAULT_L1_THRESHOLD) -> float:
    """Quadratic excess over the robustness threshold: max(l1 - threshold, 0)^2."""
    excess = l1 - threshold
    return excess * excess if excess > 0.0 else 0.0


def robust_cost(
    x: Sequence[float],
    base: Callable[[np.ndarray], float],
    model: CostModel,
) -> float:
    """Composite cost base(x) + r * penalty(|H(x)|_l1).

    The Hessian of ``base`` is recomputed from scratch at every call (a
    9-point stencil for two parameters); with ``r_weight == 0`` it is
    skipped and the bare cost is returned.
    """
    x = np.asarray(x, dtype=float)
    center = float(base(x))
    if model.r_weight == 0.0:
        return center
    report = hessian(base, x, f0=center, step_rule=model.step_rule)
    return center + model.r_weight * penalty(report.l1_norm, model.l1_threshold)


def sensitivity_scan(
    s: Sweep,
    gate: GateTarget,
    which: str,
    delta: float | None = None,
    cfg: IntegratorConfig | None = None,
) -> list[ScanRow]:
    """Tr P at the sweep point and at +-delta in one parameter.

    ``which`` is an external parameter name (``lambda``, ``eta4``, ``c4``,
    ...); ``delta=None`` uses one unit in the parameter's fourth
    significant figure.  Rows come out in ascending parameter order, so the
    middle row is the unperturbed sweep.
    """
    if which not in PARAM_FIELDS:
        raise KeyError(f"unknown parameter {which!r}; expected one of {sorted(PARAM_FIELDS)}")
    fld = PARAM_FIELDS[which]
    if not hasattr(s, fld):
        raise KeyError(f"parameter {which!r} does not apply to {type(s).__name__}")
    center = getattr(s, fld)
    step = fourth_figure_unit(center) if delta is None else float(delta)
    rows = []
    for value in (center - step, center, center + step):
        _, gate_score, _ = score_sweep(replace_params(s, **{fld: value}), gate, cfg)
        rows.append(
            ScanRow(
                parameter=which,
                value=value,
                trace_p=gate_score.trace_p,
                fidelity=gate_score.fidelity,
            )
        )
    return rows


def write_scan_csv(rows: Sequence[ScanRow], stream: TextIO) -> None:
    """Write scan rows with the stable column set."""
    writer = csv.writer(stream)
    writer.writerow(["parameter", "value", "trace_p", "fidelity"])
    for row in rows:
        writer.writerow([row.parameter, repr(row.value), repr(row.trace_p), repr(row.fidelity)])
