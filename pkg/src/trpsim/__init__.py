"""Twisted-rapid-passage sweep simulation and gate optimization."""

from .gates import (
    GATE_NAMES,
    DimensionMismatch,
    GateScore,
    GateTarget,
    UnknownGate,
    fidelity,
    gate_target,
    phase_optimized_trace_p,
    score,
    target_matrix,
    trace_p,
)
from .linalg import (
    IDENTITY2,
    IDENTITY4,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    EigenSystem,
    NotHermitian,
    dagger,
    eigh,
    kron,
    unitarity_defect,
)
from .model import (
    NonPositiveParameter,
    OneQubitSweep,
    PhysicalSweep,
    TwoQubitSweep,
    hamiltonian_1q,
    hamiltonian_2q,
    resonance_times,
    to_dimensionless,
    twist_phase,
)
from .optimize import (
    AnnealConfig,
    ArityMismatch,
    OptimizationRecord,
    SimplexConfig,
    nelder_mead,
    optimize_gate,
    record_from_json,
    record_to_json,
    simulated_annealing,
)
from .presets import (
    PRESET_NAMES,
    SECTION4_SWEEP,
    TABLE1_REFERENCE,
    TABLE1_SWEEPS,
    preset_sweep,
)
from .propagator import (
    IntegratorConfig,
    PropagationResult,
    StepLimitExceeded,
    ToleranceUnreachable,
    propagate,
    propagate_state,
)
from .robustness import (
    CostModel,
    HessianReport,
    NonFiniteCost,
    ScanRow,
    ZeroParameter,
    fourth_figure_unit,
    hessian,
    penalty,
    relative_step,
    robust_cost,
    sensitivity_scan,
)
from .simulate import hamiltonian_of, score_sweep, simulate_sweep

__version__ = "0.1.0"
