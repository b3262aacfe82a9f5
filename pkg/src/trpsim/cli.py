"""Command-line front end: simulate, scan, optimize, report.

Exit codes: 0 on success, 2 on configuration errors, 3 on integrator
failures, 4 when an optimizer exhausts its budget without improving on
the starting point.  All outputs are deterministic for fixed inputs and
seeds; JSON outputs embed the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass, field

from .gates import GATE_NAMES, GateTarget, gate_target
from .model import (
    NonPositiveParameter,
    OneQubitSweep,
    PhysicalSweep,
    TwoQubitSweep,
    to_dimensionless,
)
from .optimize import (
    AnnealConfig,
    OptimizationRecord,
    SimplexConfig,
    optimize_gate,
    record_from_json,
    record_to_json,
)
from .presets import PRESET_NAMES, SECTION4_GATE, TABLE1_REFERENCE, preset_sweep
from .propagator import IntegratorConfig, StepLimitExceeded, ToleranceUnreachable
from .robustness import CostModel, sensitivity_scan, write_scan_csv
from .simulate import Sweep, score_sweep

__all__ = ["main", "build_parser", "ConfigError"]

SCHEMA_VERSION = "1"

_DIMENSIONLESS_KEYS = ("lambda", "eta4", "tau0", "c4", "d1", "d2", "d3", "d4")
_PHYSICAL_KEYS = ("a", "b", "B", "T0", "hbar")


class ConfigError(ValueError):
    """Invalid or contradictory run configuration."""


@dataclass
class RunConfig:
    command: str
    gate: GateTarget | None
    sweep: Sweep | None
    integrator: IntegratorConfig
    cost_model: CostModel
    method: str
    seed: int
    out: str | None
    fmt: str
    scan_param: str | None
    record_paths: list[str]
    include_trace: bool
    max_evals: int
    restarts: int
    resolved: dict = field(default_factory=dict)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trpsim",
        description="Simulate and optimize twisted-rapid-passage gate sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flags override it)")
    common.add_argument("--gate", choices=GATE_NAMES, help="target gate")
    common.add_argument("--preset", choices=PRESET_NAMES, help="named parameter preset")
    common.add_argument("--lambda", dest="lam", type=float, help="dimensionless sweep rate")
    common.add_argument("--eta4", type=float, help="dimensionless twist strength")
    common.add_argument("--tau0", type=float, help="dimensionless inversion time")
    common.add_argument("--c4", type=float, help="level-splitting weight (two-qubit)")
    common.add_argument("--d1", type=float, help="Zeeman offset coupling (two-qubit)")
    common.add_argument("--d2", type=float, help="detuning coupling (two-qubit)")
    common.add_argument("--d3", type=float, help="transverse amplitude ratio (two-qubit)")
    common.add_argument("--d4", type=float, help="Ising coupling (two-qubit)")
    common.add_argument("--tolerance", type=float, help="integrator relative tolerance")
    common.add_argument("--out", help="output file path (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), help="output format")
    common.add_argument("--seed", type=int, default=0, help="optimizer RNG seed")

    sub.add_parser("simulate", parents=[common], help="propagate one sweep and score it")

    scan = sub.add_parser("scan", parents=[common], help="fourth-figure sensitivity scan")
    scan.add_argument("--param", choices=("lambda", "eta4"), help="parameter to vary")

    opt = sub.add_parser("optimize", parents=[common], help="search sweep parameters")
    opt.add_argument("--method", choices=("simplex", "anneal"), help="search method")
    opt.add_argument("--r-weight", dest="r_weight", type=float, default=0.0,
                     help="robustness penalty weight r")
    opt.add_argument("--max-evals", dest="max_evals", type=int, default=50_000,
                     help="cost evaluation budget (simplex)")
    opt.add_argument("--restarts", type=int, default=3, help="simplex restarts")
    opt.add_argument("--no-trace", dest="no_trace", action="store_true",
                     help="omit the cost trace from the record file")

    rep = sub.add_parser("report", help="merge optimization records into one table")
    rep.add_argument("records", nargs="*", help="record JSON files")
    rep.add_argument("--out", help="output file path (default: stdout)")
    rep.add_argument("--format", dest="fmt", choices=("csv", "json"), help="output format")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def _merge_settings(args: argparse.Namespace) -> dict:
    """Config file values overridden by explicit CLI flags."""
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    flag_map = {
        "gate": "gate", "preset": "preset", "lam": "lambda", "eta4": "eta4",
        "tau0": "tau0", "c4": "c4", "d1": "d1", "d2": "d2", "d3": "d3",
        "d4": "d4", "tolerance": "tolerance", "out": "out", "fmt": "format",
        "method": "method", "r_weight": "r_weight",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = value
    for attr in ("seed", "max_evals", "restarts"):
        if hasattr(args, attr):
            merged[attr] = getattr(args, attr)
    if getattr(args, "no_trace", False):
        merged["no_trace"] = True
    if getattr(args, "param", None) is not None:
        merged["param"] = args.param
    return merged


def _resolve_sweep(settings: dict, gate: GateTarget | None) -> tuple[Sweep | None, str]:
    """Build the sweep from a preset, explicit values or physical values.

    Exactly one parameter source may be used per run.
    """
    has_preset = "preset" in settings
    has_dimless = any(k in settings for k in _DIMENSIONLESS_KEYS)
    has_physical = any(k in settings for k in _PHYSICAL_KEYS)
    if sum((has_preset, has_dimless, has_physical)) > 1:
        raise ConfigError(
            "sweep parameters must come from exactly one source: "
            "a preset, explicit dimensionless values, or physical values"
        )
    if has_preset:
        if gate is None:
            raise ConfigError("--preset requires --gate")
        try:
            return preset_sweep(settings["preset"], gate.name), "preset"
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        if has_physical:
            if gate is not None and gate.qubits != 1:
                raise ConfigError("physical-unit entry is one-qubit only")
            missing = [k for k in ("a", "b", "B", "T0") if k not in settings]
            if missing:
                raise ConfigError(f"physical sweep needs keys {missing}")
            phys = PhysicalSweep(
                a=float(settings["a"]),
                b=float(settings["b"]),
                B=float(settings["B"]),
                T0=float(settings["T0"]),
                hbar=float(settings.get("hbar", 1.0)),
            )
            return to_dimensionless(phys), "physical"
        if has_dimless:
            if gate is not None and gate.qubits == 2:
                missing = [
                    k
                    for k in ("lambda", "eta4", "tau0", "c4", "d1", "d2", "d3", "d4")
                    if k not in settings
                ]
                if missing:
                    raise ConfigError(f"two-qubit sweep needs keys {missing}")
                return (
                    TwoQubitSweep(
                        lam=float(settings["lambda"]),
                        eta4=float(settings["eta4"]),
                        tau0=float(settings["tau0"]),
                        c4=float(settings["c4"]),
                        d1=float(settings["d1"]),
                        d2=float(settings["d2"]),
                        d3=float(settings["d3"]),
                        d4=float(settings["d4"]),
                    ),
                    "explicit",
                )
            missing = [k for k in ("lambda", "eta4", "tau0") if k not in settings]
            if missing:
                raise ConfigError(f"one-qubit sweep needs keys {missing}")
            return (
                OneQubitSweep(
                    lam=float(settings["lambda"]),
                    eta4=float(settings["eta4"]),
                    tau0=float(settings["tau0"]),
                ),
                "explicit",
            )
    except NonPositiveParameter as exc:
        raise ConfigError(str(exc)) from exc
    return None, "none"


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = _merge_settings(args)
    command = args.command

    gate = None
    if settings.get("gate") is not None:
        gate = gate_target(settings["gate"])
    sweep, source = (None, "none")
    if command != "report":
        if gate is None:
            raise ConfigError(f"{command} requires --gate")
        sweep, source = _resolve_sweep(settings, gate)
        if sweep is None:
            raise ConfigError("no sweep parameters given (use --preset or explicit values)")
        expect = 2 if isinstance(sweep, TwoQubitSweep) else 1
        if gate.qubits != expect:
            raise ConfigError(
                f"gate {gate.name!r} acts on {gate.qubits} qubit(s) but the sweep is {expect}-qubit"
            )

    tol = settings.get("tolerance")
    if tol is not None:
        tol = float(tol)
        if tol <= 0:
            raise ConfigError("tolerance must be positive")
        integrator = IntegratorConfig(rel_tolerance=tol, abs_tolerance=tol * 1e-2)
    else:
        integrator = IntegratorConfig()

    r_weight = float(settings.get("r_weight", 0.0))
    if r_weight < 0:
        raise ConfigError("r_weight must be >= 0")
    cost_model = CostModel(r_weight=r_weight)

    method = settings.get("method")
    if method is None and gate is not None:
        method = "anneal" if gate.qubits == 2 else "simplex"
    if command == "optimize" and method not in ("simplex", "anneal"):
        raise ConfigError(f"unknown method {method!r}")

    scan_param = settings.get("param")
    if command == "scan":
        if gate is not None and gate.qubits != 1:
            raise ConfigError("scan supports one-qubit gates only")
        if scan_param not in ("lambda", "eta4"):
            raise ConfigError("scan requires --param lambda or --param eta4")

    resolved = {
        "command": command,
        "gate": gate.name if gate else None,
        "parameter_source": source,
        "sweep": asdict(sweep) if sweep is not None else None,
        "integrator": {
            "rel_tolerance": integrator.rel_tolerance,
            "abs_tolerance": integrator.abs_tolerance,
            "max_steps": integrator.max_steps,
        },
        "cost_model": {
            "r_weight": cost_model.r_weight,
            "l1_threshold": cost_model.l1_threshold,
        },
        "method": method,
        "seed": int(settings.get("seed", 0)),
        "scan_param": scan_param,
        "format": settings.get("format"),
        "max_evals": int(settings.get("max_evals", 50_000)),
        "restarts": int(settings.get("restarts", 3)),
    }
    return RunConfig(
        command=command,
        gate=gate,
        sweep=sweep,
        integrator=integrator,
        cost_model=cost_model,
        method=method or "simplex",
        seed=int(settings.get("seed", 0)),
        out=settings.get("out"),
        fmt=settings.get("format") or ("csv" if command in ("scan", "report") else "json"),
        scan_param=scan_param,
        record_paths=list(getattr(args, "records", []) or []),
        include_trace=not settings.get("no_trace", False),
        max_evals=int(settings.get("max_evals", 50_000)),
        restarts=int(settings.get("restarts", 3)),
        resolved=resolved,
    )


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _sweep_summary(sweep: Sweep) -> str:
    if isinstance(sweep, TwoQubitSweep):
        return (
            f"lambda={sweep.lam!r} eta4={sweep.eta4!r} tau0={sweep.tau0!r} "
            f"c4={sweep.c4!r} d1={sweep.d1!r} d2={sweep.d2!r} "
            f"d3={sweep.d3!r} d4={sweep.d4!r}"
        )
    return f"lambda={sweep.lam!r} eta4={sweep.eta4!r} tau0={sweep.tau0!r}"


def cmd_simulate(cfg: RunConfig) -> int:
    result, gate_score, phase_opt = score_sweep(cfg.sweep, cfg.gate, cfg.integrator)
    print(f"gate={cfg.gate.name} {_sweep_summary(cfg.sweep)}")
    print(
        f"trace_p={gate_score.trace_p:.3g} fidelity={gate_score.fidelity:.6f} "
        f"unitarity_defect={result.max_unitarity_defect:.3g} "
        f"steps={result.steps_taken} trace_p_phase_opt={phase_opt:.3g}"
    )
    if cfg.out is not None:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": cfg.resolved,
            "result": {
                "gate": cfg.gate.name,
                "trace_p": gate_score.trace_p,
                "fidelity": gate_score.fidelity,
                "error_bound": gate_score.error_bound,
                "trace_p_phase_opt": phase_opt,
                "unitarity_defect": result.max_unitarity_defect,
                "steps_taken": result.steps_taken,
                "tolerance_used": result.tolerance_used,
            },
        }
        if cfg.fmt == "json":
            _emit(json.dumps(payload, sort_keys=True, indent=2), cfg.out)
        else:
            buf = io.StringIO()
            buf.write(f"# config: {json.dumps(cfg.resolved, sort_keys=True)}\n")
            buf.write("gate,trace_p,fidelity,unitarity_defect,steps_taken\n")
            buf.write(
                f"{cfg.gate.name},{gate_score.trace_p!r},{gate_score.fidelity!r},"
                f"{result.max_unitarity_defect!r},{result.steps_taken}\n"
            )
            _emit(buf.getvalue(), cfg.out)
    return 0


def cmd_scan(cfg: RunConfig) -> int:
    rows = sensitivity_scan(cfg.sweep, cfg.gate, cfg.scan_param, cfg=cfg.integrator)
    if cfg.fmt == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": cfg.resolved,
            "rows": [
                {
                    "parameter": r.parameter,
                    "value": r.value,
                    "trace_p": r.trace_p,
                    "fidelity": r.fidelity,
                }
                for r in rows
            ],
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2), cfg.out)
    else:
        buf = io.StringIO()
        buf.write(f"# config: {json.dumps(cfg.resolved, sort_keys=True)}\n")
        write_scan_csv(rows, buf)
        _emit(buf.getvalue(), cfg.out)
    return 0


def cmd_optimize(cfg: RunConfig) -> int:
    if cfg.method == "simplex":
        simplex = SimplexConfig(max_evals=cfg.max_evals, restarts=cfg.restarts)
        rec = optimize_gate(
            cfg.gate, cfg.sweep, cfg.cost_model, "simplex",
            integrator=cfg.integrator, simplex=simplex,
        )
    else:
        anneal = AnnealConfig(rng_seed=cfg.seed)
        rec = optimize_gate(
            cfg.gate, cfg.sweep, cfg.cost_model, "anneal",
            integrator=cfg.integrator, anneal=anneal,
        )

    if cfg.cost_model.r_weight == 0.0:
        penalty_note = "penalty disabled (r=0)"
    else:
        active = rec.hessian_l1 is not None and rec.hessian_l1 > cfg.cost_model.l1_threshold
        penalty_note = f"penalty {'active' if active else 'inactive'} (r={cfg.cost_model.r_weight:g})"
    best = " ".join(
        f"{name}={value!r}" for name, value in zip(rec.parameter_names, rec.best_x)
    )
    print(f"gate={rec.gate} method={rec.method} status={rec.status} evaluations={rec.evaluations}")
    print(f"best: {best}")
    l1_text = "n/a" if rec.hessian_l1 is None else f"{rec.hessian_l1:.6g}"
    print(
        f"trace_p={rec.best_trace_p:.3g} fidelity={rec.best_fidelity:.6f} "
        f"hessian_l1={l1_text} {penalty_note}"
    )

    body = json.loads(record_to_json(rec, include_trace=cfg.include_trace))
    body["config"] = cfg.resolved
    _emit(json.dumps(body, sort_keys=True, indent=2), cfg.out)

    first_cost = rec.trace[0][1] if rec.trace else None
    if rec.status == "budget_exhausted" and (
        first_cost is None or not rec.best_cost < first_cost
    ):
        return 4
    return 0


def _load_record(path: str) -> OptimizationRecord:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return record_from_json(fh.read())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"malformed record {path}: {exc}") from exc


_REPORT_COLUMNS = (
    "gate", "trace_p", "reference_trace_p", "trace_p_ratio",
    "fidelity", "reference_fidelity", "status", "note",
)


def cmd_report(cfg: RunConfig) -> int:
    if not cfg.record_paths:
        raise ConfigError("report needs at least one record file")
    rows = []
    for path in cfg.record_paths:
        rec = _load_record(path)
        ref = TABLE1_REFERENCE.get(rec.gate or "")
        if ref is None:
            rows.append({
                "gate": rec.gate, "trace_p": rec.best_trace_p,
                "reference_trace_p": None, "trace_p_ratio": None,
                "fidelity": rec.best_fidelity, "reference_fidelity": None,
                "status": "no_reference",
                "note": "no table1 reference (group symmetrization out of scope)",
            })
            continue
        ratio = (rec.best_trace_p / ref.trace_p) if rec.best_trace_p else 0.0
        in_band = (
            rec.best_trace_p is not None
            and ref.trace_p / 3.0 <= rec.best_trace_p <= ref.trace_p * 3.0
            and rec.best_fidelity is not None
            and abs(rec.best_fidelity - ref.fidelity) <= 5e-4
        )
        rows.append({
            "gate": rec.gate, "trace_p": rec.best_trace_p,
            "reference_trace_p": ref.trace_p, "trace_p_ratio": ratio,
            "fidelity": rec.best_fidelity, "reference_fidelity": ref.fidelity,
            "status": "ok" if in_band else "out_of_band",
            "note": "",
        })

    if cfg.fmt == "json":
        payload = {"schema_version": SCHEMA_VERSION, "config": cfg.resolved, "rows": rows}
        _emit(json.dumps(payload, sort_keys=True, indent=2), cfg.out)
    else:
        buf = io.StringIO()
        buf.write(",".join(_REPORT_COLUMNS) + "\n")
        for row in rows:
            cells = []
            for col in _REPORT_COLUMNS:
                v = row[col]
                if v is None:
                    cells.append("")
                elif isinstance(v, float):
                    cells.append(repr(v))
                else:
                    cells.append(f'"{v}"' if "," in str(v) else str(v))
            buf.write(",".join(cells) + "\n")
        _emit(buf.getvalue(), cfg.out)
    for row in rows:
        print(
            f"{row['gate']}: trace_p={row['trace_p']!r} status={row['status']}"
            + (f" ({row['note']})" if row["note"] else "")
        )
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "scan": cmd_scan,
    "optimize": cmd_optimize,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StepLimitExceeded, ToleranceUnreachable) as exc:
        print(f"integrator failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
