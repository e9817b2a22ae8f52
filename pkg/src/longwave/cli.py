"""Command line entry points.

    longwave simulate   --config cfg.json
    longwave simulate   --scenario step --epsilon 0.2 [--overtime] --out DIR
    longwave convergence --config cfg.json | --epsilon 0.1 [--levels 3] [--out DIR]
    longwave growth     --scenario step|sinusoid --epsilon 0.2 --out DIR

Exit codes: 0 success, 2 configuration error, 3 numerical instability,
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError, SolverError
from .scenarios import (
    ScenarioConfig,
    convergence_study,
    run_growth,
    run_scenario,
    write_convergence_outputs,
    write_growth_outputs,
    write_outputs,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSTABLE = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="longwave",
        description="Cross-compare coupled and uncoupled long-wave models over uneven bottoms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a comparison scenario and write CSV outputs")
    sim.add_argument("--config", help="JSON scenario configuration")
    sim.add_argument("--scenario", choices=["validate", "step", "sinusoid"],
                     help="scenario name (alternative to --config)")
    sim.add_argument("--epsilon", type=float, help="long-wave parameter")
    sim.add_argument("--overtime", action="store_true",
                     help="extend the run to T = epsilon^(-3/2) (demonstration mode)")
    sim.add_argument("--out", help="output directory (overrides config.output_dir)")

    conv = sub.add_parser("convergence", help="observed-order study under dx = dt halvings")
    conv.add_argument("--config", help="JSON scenario configuration")
    conv.add_argument("--epsilon", type=float, help="long-wave parameter (default 0.1)")
    conv.add_argument("--levels", type=int, help="number of refinement levels (default 3)")
    conv.add_argument("--out", help="output directory for convergence.json")

    gro = sub.add_parser("growth", help="corrector-norm growth diagnostic")
    gro.add_argument("--scenario", choices=["step", "sinusoid"], required=True,
                     help="bottom family for the growth run")
    gro.add_argument("--epsilon", type=float, required=True)
    gro.add_argument("--out", required=True, help="output directory")
    return parser


def _config_from_args(args, scenario_key: str | None = None) -> ScenarioConfig:
    if getattr(args, "config", None):
        config = ScenarioConfig.from_json(args.config)
        if getattr(args, "out", None):
            config.output_dir = args.out
        if getattr(args, "overtime", False):
            raise ConfigurationError("--overtime cannot override a config file; set it there")
        return config
    if scenario_key is None:
        raise ConfigurationError("either --config or --scenario/--epsilon is required")
    if args.epsilon is None:
        raise ConfigurationError("--epsilon is required without --config")
    return ScenarioConfig(
        scenario=scenario_key,
        epsilon=args.epsilon,
        overtime=getattr(args, "overtime", False),
        output_dir=getattr(args, "out", None),
        growth_kind=getattr(args, "growth_kind", None),
    )


def _cmd_simulate(args) -> int:
    config = _config_from_args(args, args.scenario)
    if config.scenario not in ("validate", "step", "sinusoid"):
        raise ConfigurationError(
            f"simulate handles validate/step/sinusoid scenarios, got {config.scenario!r}"
        )
    report = run_scenario(config)
    if config.output_dir:
        paths = write_outputs(report, config)
        print(f"wrote {len(paths)} files to {config.output_dir}")
    print(f"scenario={config.scenario} epsilon={config.epsilon} "
          f"T={report.realized_final_time:g}")
    print(f"  final err(K vs B)      = {report.err_kdv[-1]:.6e}")
    print(f"  final err(K_topo vs B) = {report.err_kdv_topo[-1]:.6e}")
    if report.validation_error is not None:
        print(f"  err vs analytic wave   = {report.validation_error:.6e}")
    print(f"  L2 drift max           = {report.l2_drift.max():.3e}")
    print(f"  H1_eps drift max       = {report.h1eps_drift.max():.3e}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    if args.config:
        config = ScenarioConfig.from_json(args.config)
    else:
        config = ScenarioConfig(
            scenario="convergence",
            epsilon=args.epsilon if args.epsilon is not None else 0.1,
            refinement_levels=args.levels if args.levels is not None else 3,
            output_dir=args.out,
        )
    if args.out:
        config.output_dir = args.out
    if args.levels:
        config.refinement_levels = args.levels
    report = convergence_study(config)
    print(f"deltas: {['%g' % d for d in report.deltas]}")
    print(f"scalar-stepper errors: {['%.3e' % e for e in report.kdv_errors]}")
    print(f"scalar-stepper orders: {['%.2f' % o for o in report.kdv_orders]}")
    print(f"coupled-stepper diffs: {['%.3e' % e for e in report.boussinesq_diffs]}")
    print(f"coupled-stepper orders: {['%.2f' % o for o in report.boussinesq_orders]}")
    if not report.monotone:
        print("warning: errors are not monotone under refinement")
    if config.output_dir:
        write_convergence_outputs(report, config)
        print(f"wrote convergence.json to {config.output_dir}")
    return EXIT_OK


def _cmd_growth(args) -> int:
    config = ScenarioConfig(
        scenario="growth",
        epsilon=args.epsilon,
        growth_kind=args.scenario,
        output_dir=args.out,
    )
    report = run_growth(config)
    write_growth_outputs(report, config)
    diag = report.diagnostic
    print(f"growth[{args.scenario}] epsilon={args.epsilon}: "
          f"slope={diag.slope:.4f} intercept={diag.intercept:.4f} "
          f"R^2={diag.r_squared:.4f}")
    print(f"max corrector norm: {diag.u1_norms.max():.4f}")
    print(f"wrote growth.csv to {config.output_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "convergence":
            return _cmd_convergence(args)
        if args.command == "growth":
            return _cmd_growth(args)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
