"""Command-line front end.

Subcommands:
  run        execute a configured tomography run; writes results.json,
             results.csv, fidelity_vs_scale.png, and run_meta.txt
  validate   check a config file without executing
  compare    run both tomography schemes and write comparison.json

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config
from .pipeline import compare_methods, run_eapt
from .report import FIGURE_FILENAME, write_comparison, write_results

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eapt",
        description="Entanglement-assisted process tomography on a noisy density-matrix simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "execute the configured tomography run"),
        ("validate", "validate a config file without executing"),
        ("compare", "compare the entanglement-assisted and probe-state methods"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument("--out", help="output directory (overrides config output_dir)")
        p.add_argument("--seed", type=int, help="seed override")
        p.add_argument("--exact", action="store_true", help="force exact probabilities")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def _load(args) -> tuple[ExperimentConfig, dict]:
    cfg = load_config(args.config)
    doc = dict(cfg.raw)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
        doc["seed"] = args.seed
    elif "seed" not in doc:
        doc["seed"] = cfg.seed
    if args.exact:
        cfg = replace(cfg, shots=None)
        doc["shots"] = "exact"
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    return cfg, doc


def _say(quiet: bool, message: str) -> None:
    if not quiet:
        print(message)


def _cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for note in cfg.diagnostics:
        print(f"note: {note}")
    shots = "exact" if cfg.shots is None else cfg.shots
    print(
        f"valid: target={cfg.target.name} system_qubits={cfg.system_qubits} "
        f"shots={shots} scaling={list(cfg.scaling_factors)} seed={cfg.seed}"
    )
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        cfg, doc = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for note in cfg.diagnostics:
        _say(args.quiet, f"note: {note}")
    started = time.perf_counter()
    try:
        result = run_eapt(
            cfg.target,
            noise=cfg.noise,
            shots=cfg.shots,
            scaling=cfg.scaling_factors,
            seed=cfg.seed,
            bootstrap_resamples=cfg.bootstrap_resamples,
            extrapolation_order=cfg.extrapolation_order,
        )
    except (FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    elapsed = time.perf_counter() - started

    out_dir = Path(cfg.output_dir)
    paths = write_results(out_dir, doc, result)
    from .plots import render_fidelity_figure

    paths.append(render_fidelity_figure(result, out_dir / FIGURE_FILENAME))
    # wall-clock timing lives outside the deterministic results record
    meta = out_dir / "run_meta.txt"
    meta.write_text(f"elapsed_seconds: {elapsed:.3f}\n")
    paths.append(meta)

    _say(args.quiet, f"state fidelities: {[round(f, 6) for f in result.state_fidelities]}")
    if result.avg_gate_fidelities is not None:
        _say(args.quiet, f"avg gate fidelities: {[round(f, 6) for f in result.avg_gate_fidelities]}")
    if result.mitigated_avg_gate_fidelity is not None:
        _say(args.quiet, f"mitigated avg gate fidelity: {result.mitigated_avg_gate_fidelity:.6f}")
    if result.tp_warning:
        _say(args.quiet, f"warning: reconstruction deviates from trace preservation by {result.tp_deviation:.3e}")
    for p in paths:
        _say(args.quiet, f"wrote {p}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    try:
        cfg, doc = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.system_qubits > 2:
        print(
            f"config error: system_qubits={cfg.system_qubits} out of range for the "
            "probe-state method (compare supports 1..2)",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    try:
        report = compare_methods(
            cfg.target,
            noise=cfg.noise,
            shots=cfg.shots,
            seed=cfg.seed,
            scaling=cfg.scaling_factors,
        )
    except (FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    paths = write_comparison(Path(cfg.output_dir), doc, report)
    _say(args.quiet, f"Choi Frobenius distance: {report.choi_distance:.6e}")
    if report.eapt_avg_gate_fidelity is not None:
        _say(args.quiet, f"entanglement-assisted F_avg: {report.eapt_avg_gate_fidelity:.6f}")
    if report.qpt_avg_gate_fidelity is not None:
        _say(args.quiet, f"probe-state F_avg: {report.qpt_avg_gate_fidelity:.6f}")
    _say(
        args.quiet,
        f"circuit executions: {report.eapt_executions} (entanglement-assisted) "
        f"vs {report.qpt_executions} (probe-state)",
    )
    for p in paths:
        _say(args.quiet, f"wrote {p}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "validate": _cmd_validate, "compare": _cmd_compare}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
