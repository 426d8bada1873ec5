"""Command-line front end: eta, simulate, sweep and verify subcommands.

Configuration comes from an optional key=value file plus flag overrides
(flags win).  Results are emitted as CSV or JSON with a stable field order,
optionally next to a rendered PNG figure.  Exit codes: 0 success, 2
configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .analytics import compare
from .errors import ConfigError, PdcLabError
from .evolution import evolve_pump
from .fock_core import PumpSpec
from .kvconfig import load_kv
from .pdc_models import (
    MULTI_MODE,
    PHYSICAL_KEYS,
    SINGLE_MODE,
    CouplingParams,
    PdcModel,
    interaction_strength,
)
from .photon_stats import reduce_pump, reduce_signal, reduce_single_mode

PROCESS_VOCAB = {"multimode": MULTI_MODE, "singlemode": SINGLE_MODE}
PUMP_KINDS = ("coherent", "thermal", "fock")
SWEEP_AXES = ("theta", "n_p", "n")

# Stable sweep-table contract; column order never changes within a release line.
SWEEP_HEADER = (
    "axis_value,exact_g2,series_g2,weak_g2,series_gap,weak_gap,"
    "theta,n_p,strength,series_trusted"
)


@dataclass(frozen=True)
class RunConfig:
    """Typed view of one experiment configuration."""

    process: str = "multimode"
    n: int = 2
    pump: str = "coherent"
    alpha: complex | None = None
    nbar: float | None = None
    m: int | None = None
    pump_cutoff: int | None = None
    theta: float | None = None
    order: int = 4
    format: str = "json"
    out: str | None = None
    seed: int | None = None
    plot: str | None = None
    sweep_axis: str | None = None
    sweep_min: float | None = None
    sweep_max: float | None = None
    sweep_count: int | None = None
    sweep_scale: str | None = None
    physical: tuple[tuple[str, float], ...] | None = None


RUN_KEYS = tuple(f.name for f in fields(RunConfig) if f.name != "physical")


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from exc


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from exc


def _parse_complex(key: str, raw: str) -> complex:
    try:
        return complex(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be a real or complex number, got {raw!r}") from exc


def _format_float(value: float) -> str:
    return repr(float(value))


def _format_complex(value: complex) -> str:
    if value.imag == 0.0:
        return _format_float(value.real)
    return repr(complex(value))


def config_from_kv(entries: dict[str, str], source: str = "<config>") -> RunConfig:
    """Type and validate a key=value mapping into a RunConfig."""
    unknown = sorted(set(entries) - set(RUN_KEYS) - set(PHYSICAL_KEYS))
    if unknown:
        raise ConfigError(f"{source}: unknown keys {', '.join(unknown)}")
    kw: dict = {}
    e = entries
    if "process" in e:
        if e["process"] not in PROCESS_VOCAB:
            raise ConfigError(
                f"process must be one of {sorted(PROCESS_VOCAB)}, got {e['process']!r}"
            )
        kw["process"] = e["process"]
    if "n" in e:
        kw["n"] = _parse_int("n", e["n"])
        if kw["n"] < 2:
            raise ConfigError(f"n must be >= 2, got {kw['n']}")
    if "pump" in e:
        if e["pump"] not in PUMP_KINDS:
            raise ConfigError(f"pump must be one of {PUMP_KINDS}, got {e['pump']!r}")
        kw["pump"] = e["pump"]
    if "alpha" in e:
        kw["alpha"] = _parse_complex("alpha", e["alpha"])
    if "nbar" in e:
        kw["nbar"] = _parse_float("nbar", e["nbar"])
        if kw["nbar"] < 0:
            raise ConfigError(f"nbar must be >= 0, got {kw['nbar']}")
    if "m" in e:
        kw["m"] = _parse_int("m", e["m"])
        if kw["m"] < 0:
            raise ConfigError(f"m must be >= 0, got {kw['m']}")
    if "pump_cutoff" in e:
        kw["pump_cutoff"] = _parse_int("pump_cutoff", e["pump_cutoff"])
        if kw["pump_cutoff"] < 0:
            raise ConfigError(f"pump_cutoff must be >= 0, got {kw['pump_cutoff']}")
    if "theta" in e:
        kw["theta"] = _parse_float("theta", e["theta"])
        if kw["theta"] < 0:
            raise ConfigError(f"theta must be >= 0, got {kw['theta']}")
    if "order" in e:
        kw["order"] = _parse_int("order", e["order"])
        if not 0 <= kw["order"] <= 4:
            raise ConfigError(f"order must be within 0..4, got {kw['order']}")
    if "format" in e:
        if e["format"] not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {e['format']!r}")
        kw["format"] = e["format"]
    for key in ("out", "plot"):
        if key in e:
            kw[key] = e[key]
    if "seed" in e:
        kw["seed"] = _parse_int("seed", e["seed"])
    if "sweep_axis" in e:
        if e["sweep_axis"] not in SWEEP_AXES:
            raise ConfigError(
                f"sweep_axis must be one of {SWEEP_AXES}, got {e['sweep_axis']!r}"
            )
        kw["sweep_axis"] = e["sweep_axis"]
    for key in ("sweep_min", "sweep_max"):
        if key in e:
            kw[key] = _parse_float(key, e[key])
    if "sweep_count" in e:
        kw["sweep_count"] = _parse_int("sweep_count", e["sweep_count"])
        if kw["sweep_count"] < 2:
            raise ConfigError(f"sweep_count must be >= 2, got {kw['sweep_count']}")
    if "sweep_scale" in e:
        if e["sweep_scale"] not in ("log", "linear"):
            raise ConfigError(
                f"sweep_scale must be log or linear, got {e['sweep_scale']!r}"
            )
        kw["sweep_scale"] = e["sweep_scale"]
    present = [k for k in PHYSICAL_KEYS if k in e]
    if present:
        params = CouplingParams.from_mapping(e, source=source)
        kw["physical"] = tuple((k, getattr(params, k)) for k in PHYSICAL_KEYS)
    return RunConfig(**kw)


def config_to_kv(config: RunConfig) -> dict[str, str]:
    """Canonical key=value form; config_from_kv round-trips it unchanged."""
    out: dict[str, str] = {
        "process": config.process,
        "n": str(config.n),
        "pump": config.pump,
    }
    if config.alpha is not None:
        out["alpha"] = _format_complex(config.alpha)
    if config.nbar is not None:
        out["nbar"] = _format_float(config.nbar)
    if config.m is not None:
        out["m"] = str(config.m)
    if config.pump_cutoff is not None:
        out["pump_cutoff"] = str(config.pump_cutoff)
    if config.theta is not None:
        out["theta"] = _format_float(config.theta)
    out["order"] = str(config.order)
    out["format"] = config.format
    if config.out is not None:
        out["out"] = config.out
    if config.seed is not None:
        out["seed"] = str(config.seed)
    if config.plot is not None:
        out["plot"] = config.plot
    if config.sweep_axis is not None:
        out["sweep_axis"] = config.sweep_axis
    if config.sweep_min is not None:
        out["sweep_min"] = _format_float(config.sweep_min)
    if config.sweep_max is not None:
        out["sweep_max"] = _format_float(config.sweep_max)
    if config.sweep_count is not None:
        out["sweep_count"] = str(config.sweep_count)
    if config.sweep_scale is not None:
        out["sweep_scale"] = config.sweep_scale
    if config.physical is not None:
        for key, value in config.physical:
            out[key] = _format_float(value)
    return out


_FLAG_KEYS = (
    "process", "n", "pump", "alpha", "nbar", "m", "pump_cutoff", "theta",
    "order", "format", "out", "seed", "plot",
    "sweep_axis", "sweep_min", "sweep_max", "sweep_count", "sweep_scale",
)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file (if any) with flag overrides; flags win."""
    entries = load_kv(args.config) if args.config else {}
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            entries[key] = value
    source = args.config or "<flags>"
    return config_from_kv(entries, source=source)


def build_pump(config: RunConfig) -> PumpSpec:
    if config.pump == "coherent":
        if config.alpha is None:
            raise ConfigError("coherent pump needs alpha")
        return PumpSpec.coherent(config.alpha, cutoff=config.pump_cutoff)
    if config.pump == "thermal":
        if config.nbar is None:
            raise ConfigError("thermal pump needs nbar")
        return PumpSpec.thermal(config.nbar, cutoff=config.pump_cutoff)
    if config.m is None:
        raise ConfigError("fock pump needs m")
    return PumpSpec.fock(config.m, cutoff=config.pump_cutoff)


def resolve_theta(config: RunConfig, sweeping_theta: bool = False) -> float | None:
    """Enforce the theta-or-physical-block contract and return theta."""
    has_physical = config.physical is not None
    if sweeping_theta:
        if config.theta is not None or has_physical:
            raise ConfigError(
                "a theta sweep supplies theta from the axis; remove theta "
                "and physical parameters from the configuration"
            )
        return None
    if config.theta is not None and has_physical:
        raise ConfigError("supply exactly one of theta or the physical parameters")
    if config.theta is not None:
        return config.theta
    if has_physical:
        params = CouplingParams(**dict(config.physical))
        return interaction_strength(params).theta
    raise ConfigError("supply theta or the full physical parameter block")


def _check_finite(record: dict) -> None:
    for key, value in record.items():
        if isinstance(value, bool) or value is None or isinstance(value, str):
            continue
        if isinstance(value, (int, float)) and not math.isfinite(value):
            raise PdcLabError(f"non-finite value for {key}: {value!r}")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _format_float(value)
    return str(value)


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _record_text(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, sort_keys=True, indent=2) + "\n"
    lines = ["key,value"]
    lines.extend(f"{key},{_csv_cell(value)}" for key, value in record.items())
    return "\n".join(lines) + "\n"


def cmd_eta(args: argparse.Namespace) -> int:
    if args.config:
        params = CouplingParams.from_mapping(load_kv(args.config), source=args.config)
    else:
        params = CouplingParams.default()
    s = interaction_strength(params)
    record = {
        "eta": s.eta, "n_p": s.n_p, "t": s.t,
        "theta": s.theta, "strength": s.strength,
    }
    _check_finite(record)
    for key, value in record.items():
        print(f"{key} = {_format_float(value)}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    theta = resolve_theta(config)
    process = PROCESS_VOCAB[config.process]
    model = PdcModel(process, config.n, theta)
    pump = build_pump(config)
    report = compare(model, pump, order=config.order)
    state_dists = _distributions(model, pump)

    record: dict = {
        "process": config.process,
        "n": config.n,
        "theta": theta,
        "order": config.order,
        "pump_kind": config.pump,
    }
    if config.pump == "coherent":
        record["alpha"] = _format_complex(config.alpha)
    elif config.pump == "thermal":
        record["nbar"] = config.nbar
    else:
        record["m"] = config.m
    record.update(
        pump_cutoff=pump.cutoff,
        n_p=report.regime.n_p,
        strength=report.regime.strength,
        exact_g2=report.exact,
        series_g2=report.series,
        weak_g2=report.weak_limit,
        series_gap=report.relative_gaps.series,
        weak_gap=report.relative_gaps.weak,
        series_trusted=report.series_trusted,
        degenerate=report.degenerate,
    )
    for dist in state_dists:
        for k, p in enumerate(dist.probabilities):
            record[f"{dist.mode_label}_p{k}"] = float(p)
    _check_finite(record)
    if config.plot:
        from .plots import save_distribution_plot

        title = f"{config.process} n={config.n} theta={theta:g}"
        save_distribution_plot(state_dists, config.plot, title=title)
    _emit(_record_text(record, config.format), config.out)
    return 0


def _distributions(model: PdcModel, pump: PumpSpec):
    state = evolve_pump(model, pump)
    if model.process == MULTI_MODE:
        return [reduce_signal(state), reduce_pump(state)]
    return [reduce_single_mode(state), reduce_pump(state)]


def _sweep_grid(config: RunConfig) -> np.ndarray:
    if config.sweep_axis is None:
        raise ConfigError("sweep needs sweep_axis (theta, n_p or n)")
    if config.sweep_min is None or config.sweep_max is None:
        raise ConfigError("sweep needs sweep_min and sweep_max")
    if config.sweep_count is None:
        raise ConfigError("sweep needs sweep_count >= 2")
    lo, hi = config.sweep_min, config.sweep_max
    if not lo < hi:
        raise ConfigError(f"sweep range must increase, got [{lo}, {hi}]")
    scale = config.sweep_scale
    if scale is None:
        scale = "log" if config.sweep_axis in ("theta", "n_p") and lo > 0 else "linear"
    if scale == "log":
        if lo <= 0:
            raise ConfigError("log-scale sweep needs a positive sweep_min")
        values = np.geomspace(lo, hi, config.sweep_count)
    else:
        values = np.linspace(lo, hi, config.sweep_count)
    if config.sweep_axis == "theta" and lo <= 0:
        raise ConfigError("theta sweep needs a positive sweep_min")
    if config.sweep_axis == "n_p":
        if lo <= 0:
            raise ConfigError("n_p sweep needs a positive sweep_min")
    if config.sweep_axis == "n":
        rounded = np.rint(values)
        if np.max(np.abs(values - rounded)) > 1e-9 or rounded.min() < 2:
            raise ConfigError(
                "an n sweep must hit integers >= 2; pick a matching "
                "range/count (for example 2..4 with 3 points)"
            )
        values = rounded
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    axis = config.sweep_axis
    values = _sweep_grid(config)
    theta = resolve_theta(config, sweeping_theta=axis == "theta")
    process = PROCESS_VOCAB[config.process]
    if axis == "n_p" and config.pump not in ("coherent", "thermal"):
        raise ConfigError("an n_p sweep varies the pump; use a coherent "
                          "or thermal pump")

    rows = []
    for value in values:
        v = float(value)
        if axis == "theta":
            model = PdcModel(process, config.n, v)
            pump = build_pump(config)
        elif axis == "n_p":
            model = PdcModel(process, config.n, theta)
            if config.pump == "coherent":
                pump = PumpSpec.coherent(math.sqrt(v), cutoff=config.pump_cutoff)
            else:
                pump = PumpSpec.thermal(v, cutoff=config.pump_cutoff)
        else:
            model = PdcModel(process, int(v), theta)
            pump = build_pump(config)
        report = compare(model, pump, order=config.order)
        row = {
            "axis_value": v,
            "exact_g2": report.exact,
            "series_g2": report.series,
            "weak_g2": report.weak_limit,
            "series_gap": report.relative_gaps.series,
            "weak_gap": report.relative_gaps.weak,
            "theta": report.regime.theta,
            "n_p": report.regime.n_p,
            "strength": report.regime.strength,
            "series_trusted": report.series_trusted,
        }
        _check_finite(row)
        rows.append(row)

    rows.sort(key=lambda r: r["axis_value"])
    if config.format == "json":
        text = json.dumps({"axis": axis, "rows": rows}, sort_keys=True, indent=2) + "\n"
    else:
        lines = [SWEEP_HEADER]
        columns = SWEEP_HEADER.split(",")
        lines.extend(",".join(_csv_cell(r[c]) for c in columns) for r in rows)
        text = "\n".join(lines) + "\n"
    if config.plot:
        from .plots import save_sweep_plot

        curves = {
            "exact": [r["exact_g2"] for r in rows],
            "series": [r["series_g2"] for r in rows],
            "weak limit": [r["weak_g2"] for r in rows],
        }
        save_sweep_plot(axis, [r["axis_value"] for r in rows], curves, config.plot)
    _emit(text, config.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    from .acceptance import run_all

    results = run_all()
    for result in results:
        print(result.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdc-lab",
        description="Simulate parametric down-conversion with a quantized "
                    "pump and compare exact photon statistics against "
                    "closed-form predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    eta = sub.add_parser("eta", help="print the physical coupling regime")
    eta.add_argument("--config", help="key=value file with the physical parameters")
    eta.set_defaults(func=cmd_eta)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--process", choices=sorted(PROCESS_VOCAB))
        p.add_argument("--n", help="process order (integer >= 2)")
        p.add_argument("--pump", choices=PUMP_KINDS)
        p.add_argument("--alpha", help="coherent pump amplitude (real or complex)")
        p.add_argument("--nbar", help="thermal pump mean photon number")
        p.add_argument("--m", help="fock pump photon number")
        p.add_argument("--pump-cutoff", dest="pump_cutoff",
                       help="override the automatic pump truncation")
        p.add_argument("--theta", help="dimensionless interaction strength")
        p.add_argument("--order", help="series truncation order (<= 4)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--seed", help="reserved; the pipeline is deterministic")
        p.add_argument("--plot", help="also render a PNG figure to this path")

    simulate = sub.add_parser("simulate", help="run one configuration")
    add_common(simulate)
    simulate.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a parameter sweep")
    add_common(sweep)
    sweep.add_argument("--axis", dest="sweep_axis", choices=SWEEP_AXES)
    sweep.add_argument("--min", dest="sweep_min", help="sweep range start")
    sweep.add_argument("--max", dest="sweep_max", help="sweep range end")
    sweep.add_argument("--count", dest="sweep_count", help="grid points (>= 2)")
    sweep.add_argument("--scale", dest="sweep_scale", choices=("log", "linear"))
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", help="run the acceptance suite")
    verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PdcLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def entry_point() -> None:
    sys.exit(main())
