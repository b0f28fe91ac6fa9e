"""Command-line front end.

Subcommands::

    simulate  write a scenario's sensor series as CSV
    lags      per-pair cross-covariance and coefficient of determination
    estimate  directed information graph of a CSV (JSON result + DOT graph)
    bounds    detection-probability bounds of the thresholded test
    export    re-render a stored JSON result as DOT

Every flag can also come from an INI file given with ``--config``.  Keys in
the ``[trafficdig]`` section use the flag names without dashes
(``tau_max``, ``output_dir``, ``exclude = s7, s8`` ...); flags given on the
command line win.  An optional ``[ctm]`` section overrides the cell
transmission model used by ``simulate --scenario c1|c2``::

    [trafficdig]
    estimator = empirical
    levels = 2
    alpha = 0.4

    [ctm]
    time_step = 3
    v_min = 20
    v_max = 30
    q_max = 0.6
    demand_period = 20

Recognised ``[ctm]`` keys: time_step, cell_length, q_max, jam_density, v_min,
v_max, w_min, w_max, demand_high, demand_low, demand_period, demand_noise.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .bounds import detection_bounds
from .graph import ESTIMATORS, estimate_dig
from .io import dumps_result, export_dot, loads_result
from .lag import coefficient_of_determination, cross_covariance, default_tau_max, estimate_depth
from .series import STRATEGIES, IngestError, read_csv, write_csv
from .sim import SCENARIO_NAMES, simulate_scenario
from .sim import DEFAULT_LENGTH
from .sim.ctm import DemandProfile, run_scenario, scenario_network

COMMANDS = ("simulate", "lags", "estimate", "bounds", "export")
_CTM_LINK_KEYS = ("cell_length", "q_max", "jam_density")
_CTM_DEMAND_KEYS = {"demand_high": "high", "demand_low": "low", "demand_period": "period",
                    "demand_noise": "noise"}
_CTM_KEYS = ("time_step", "v_min", "v_max", "w_min", "w_max", *_CTM_LINK_KEYS, *_CTM_DEMAND_KEYS)


class CliError(Exception):
    """A user-facing failure; reported as one ``error:`` line."""


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output_dir: str = "."
    estimator: str = "ctw"
    levels: int = 2
    alpha: float = 0.4
    depth: int | None = None
    tau_max: int | None = None
    exclude: list = field(default_factory=list)
    seed: int = 0
    scenario: str | None = None
    strategy: str = "equal_frequency"
    n: int | None = None
    sensors: int = 2
    order: int = 1
    edges: int = 0
    threshold: float = 0.0
    ctm: dict = field(default_factory=dict)


def _split_ids(text) -> list:
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        text = ",".join(text)
    return [t.strip() for t in str(text).split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with defaults for any flag")
    common.add_argument("--input", help="input CSV (or JSON for export)")
    common.add_argument("--output-dir", dest="output_dir", help="directory for written files")
    common.add_argument("--estimator", choices=ESTIMATORS)
    common.add_argument("--levels", type=int, help="quantization levels r")
    common.add_argument("--alpha", type=float, help="threshold on normalized ratios, in (0, 1]")
    common.add_argument("--depth", type=int, help="memory depth (default: from lag scan)")
    common.add_argument("--tau-max", dest="tau_max", type=int, help="largest lag scanned")
    common.add_argument("--exclude", action="append", help="sensor ids to drop, comma separated")
    common.add_argument("--seed", type=int)
    common.add_argument("--scenario", choices=SCENARIO_NAMES)
    common.add_argument("--strategy", choices=STRATEGIES)
    common.add_argument("--n", type=int, help="number of samples to simulate")
    common.add_argument("--sensors", type=int, help="bounds: number of sensors M")
    common.add_argument("--order", type=int, help="bounds: Markov order k")
    common.add_argument("--edges", type=int, help="bounds: hypothesized edge count W1")
    common.add_argument("--threshold", type=float, help="bounds: information threshold I_th")

    parser = argparse.ArgumentParser(prog="trafficdig",
                                     description="Directed information graphs of traffic flows.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"simulate": "write scenario series as CSV",
             "lags": "cross-covariance and CoD per sensor pair",
             "estimate": "estimate the directed information graph",
             "bounds": "detection bounds of the thresholded test",
             "export": "render a JSON result as DOT"}
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _read_ini(path) -> tuple[dict, dict]:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise CliError(f"bad config {path}: {exc.message.splitlines()[0]}") from None
    main = dict(parser["trafficdig"]) if parser.has_section("trafficdig") else {}
    ctm = dict(parser["ctm"]) if parser.has_section("ctm") else {}
    unknown = sorted(set(ctm) - set(_CTM_KEYS))
    if unknown:
        raise CliError(f"unknown [ctm] key(s): {', '.join(unknown)}")
    return main, ctm


def _coerce(name: str, value, kind):
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise CliError(f"invalid value for {name}: {value!r}") from None


def make_config(args: argparse.Namespace) -> RunConfig:
    """Merge INI defaults and command-line flags into a :class:`RunConfig`."""
    file_values, ctm = _read_ini(args.config) if args.config else ({}, {})
    known = {f.name for f in fields(RunConfig)} - {"command", "ctm"}
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise CliError(f"unknown config key(s): {', '.join(unknown)}")
    cfg = RunConfig(command=args.command)
    kinds = {"levels": int, "depth": int, "tau_max": int, "seed": int, "n": int, "sensors": int,
             "order": int, "edges": int, "alpha": float, "threshold": float}
    for name in sorted(known):
        value = getattr(args, name, None)
        if value is None and name in file_values:
            value = file_values[name]
        if value is None:
            continue
        if name == "exclude":
            value = _split_ids(value)
        elif name in kinds:
            value = _coerce(name, value, kinds[name])
        setattr(cfg, name, value)
    if cfg.estimator not in ESTIMATORS:
        raise CliError(f"estimator must be one of {', '.join(ESTIMATORS)}")
    if cfg.strategy not in STRATEGIES:
        raise CliError(f"strategy must be one of {', '.join(STRATEGIES)}")
    cfg.ctm = {k: _coerce(k, v, float) for k, v in ctm.items()}
    return cfg


def _output_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _load_series(cfg: RunConfig):
    if not cfg.input:
        raise CliError("--input is required")
    try:
        return read_csv(cfg.input)
    except OSError as exc:
        raise CliError(f"cannot read {cfg.input}: {exc.strerror}") from None


def _ctm_series(cfg: RunConfig, n: int):
    kind = "C-I" if cfg.scenario == "c1" else "C-II"
    over = dict(cfg.ctm)
    overrides = {k: over.pop(k) for k in _CTM_LINK_KEYS if k in over}
    if "time_step" in over:
        overrides["time_step"] = over.pop("time_step")
    base = DemandProfile()
    demand = DemandProfile(**{field_: over.pop(key, getattr(base, field_))
                              for key, field_ in _CTM_DEMAND_KEYS.items()})
    demand = DemandProfile(demand.high, demand.low, int(demand.period), demand.noise)
    defaults = scenario_network(kind)
    if "v_min" in over or "v_max" in over:
        overrides["v_range"] = (over.pop("v_min", defaults.v_range[0]),
                                over.pop("v_max", defaults.v_range[1]))
    if "w_min" in over or "w_max" in over:
        overrides["w_range"] = (over.pop("w_min", defaults.w_range[0]),
                                over.pop("w_max", defaults.w_range[1]))
    return run_scenario(kind, n, seed=cfg.seed, demand=demand, **overrides)


def cmd_simulate(cfg: RunConfig, out) -> int:
    if cfg.scenario is None:
        raise CliError("--scenario is required for simulate")
    if cfg.scenario in ("c1", "c2") and cfg.ctm:
        series = _ctm_series(cfg, cfg.n or DEFAULT_LENGTH[cfg.scenario])
    else:
        series = simulate_scenario(cfg.scenario, seed=cfg.seed, n=cfg.n)
    path = _output_dir(cfg) / f"{cfg.scenario}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_csv(series, fh)
    print(f"wrote {path} ({len(series)} sensors, {len(series[0])} samples)", file=out)
    return 0


def cmd_lags(cfg: RunConfig, out) -> int:
    series = _load_series(cfg)
    if len(series) < 2:
        raise CliError("lags needs at least two sensors")
    tau_max = default_tau_max(len(series[0])) if cfg.tau_max is None else cfg.tau_max
    depth = estimate_depth(series, tau_max)
    path = _output_dir(cfg) / "lags.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["from", "to", "tau", "covariance", "cod", "peak"])
        for a in series:
            for b in series:
                if a is b:
                    continue
                prof = cross_covariance(a, b, tau_max)
                for tau, cov in enumerate(prof.values):
                    try:
                        cod = f"{coefficient_of_determination(a, b, tau):.6g}"
                    except ValueError:
                        cod = ""
                    writer.writerow([a.node_id, b.node_id, tau, f"{cov:.6g}", cod,
                                     int(tau == prof.peak_lag)])
    print(f"depth {depth}", file=out)
    print(f"wrote {path}", file=out)
    return 0


def cmd_estimate(cfg: RunConfig, out) -> int:
    series = _load_series(cfg)
    result = estimate_dig(series, levels=cfg.levels, alpha=cfg.alpha, estimator=cfg.estimator,
                          depth=cfg.depth, tau_max=cfg.tau_max, exclude=cfg.exclude,
                          strategy=cfg.strategy)
    outdir = _output_dir(cfg)
    (outdir / "result.json").write_text(dumps_result(result), encoding="utf-8")
    (outdir / "dig.dot").write_text(export_dot(result), encoding="utf-8")
    print(f"depth {result.depth}, {len(result.edges())} edge(s)", file=out)
    for a, b, w in sorted(result.edges()):
        print(f"{a} -> {b} {w:.2f}", file=out)
    for note in result.diagnostics:
        print(f"note: {note}", file=out)
    return 0


def cmd_bounds(cfg: RunConfig, out) -> int:
    b = detection_bounds(cfg.sensors, cfg.order, cfg.levels, cfg.edges, cfg.threshold)
    print(f"M={b.M} k={b.k} alphabet={b.alphabet} W1={b.W1} W0={b.W0} I_th={b.I_th:g}", file=out)
    print(f"R={b.R}", file=out)
    print(f"PF_upper={b.PF_upper:.6f}", file=out)
    print(f"PD_lower={b.PD_lower:.6f}", file=out)
    return 0


def cmd_export(cfg: RunConfig, out) -> int:
    if not cfg.input:
        raise CliError("--input is required")
    try:
        text = Path(cfg.input).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {cfg.input}: {exc.strerror}") from None
    dot = export_dot(loads_result(text))
    path = _output_dir(cfg) / "dig.dot"
    path.write_text(dot, encoding="utf-8")
    print(f"wrote {path}", file=out)
    return 0


_HANDLERS = {"simulate": cmd_simulate, "lags": cmd_lags, "estimate": cmd_estimate,
             "bounds": cmd_bounds, "export": cmd_export}


def run(cfg: RunConfig, out=None) -> int:
    return _HANDLERS[cfg.command](cfg, out or sys.stdout)


def main(argv=None, out=None, err=None) -> int:
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return run(make_config(args), out)
    except (CliError, IngestError, ValueError, ArithmeticError) as exc:
        message = " ".join(str(exc).split()) or type(exc).__name__
        print(f"error: {message}", file=err)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
