"""Command line interface.

Subcommands: run a scenario file, run a year's catalog, calibrate the
balance thresholds, replay an exported historian CSV, export a run as
CSV.  Exit status is 0 only when every checked verdict matched its
expectation (and, for calibrate, when the nominal run raised no alarm).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .attacks import ScenarioError, load_scenario
from .config import ConfigError, load_config
from .harness import (calibrate, export_run, invariant_profile_for_year, replay,
                      run_catalog, run_nominal, run_scenario)
from .invariants import PROFILES


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plantwatch",
        description="Six-stage water treatment simulator with invariant-based "
                    "attack detection in two placements.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", metavar="PATH", help="plant config INI")
    parser.add_argument("--seed", type=int, help="override the noise seed")
    parser.add_argument("--invariant-profile", choices=PROFILES,
                        help="invariant set (default: per scenario year)")
    parser.add_argument("--settle-margin", type=int, metavar="TICKS",
                        help="post-attack ticks still credited to the attack")
    parser.add_argument("--report", metavar="PATH",
                        help="write the report here, with figures alongside")
    parser.add_argument("--format", choices=("text", "csv"), default="text")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one scenario file")
    p.add_argument("scenario", metavar="SCENARIO_TOML")
    p = sub.add_parser("catalog", help="run a full attack catalog")
    p.add_argument("year", type=int, choices=(2016, 2017))
    sub.add_parser("calibrate", help="measure nominal balance residuals")
    p = sub.add_parser("replay", help="re-check an exported historian CSV")
    p.add_argument("csv", metavar="CSV_PATH")
    p = sub.add_parser("export", help="run and export the historian as CSV")
    p.add_argument("out", metavar="CSV_PATH")
    p.add_argument("--scenario", metavar="SCENARIO_TOML",
                   help="export an attack run instead of a nominal one")
    p.add_argument("--ticks", type=int, default=2000,
                   help="nominal run length (default 2000)")
    return parser


def _emit(args, content: str, figures=None) -> None:
    if args.report:
        path = Path(args.report)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content)
        for figure in figures or ():
            figure(path)
        print(f"report written to {path}")
    else:
        sys.stdout.write(content)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    # report rendering imports matplotlib; keep it off the fast path
    from . import report as rpt

    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.settle_margin is not None:
            config.settle_margin = args.settle_margin

        if args.command == "run":
            scenario = load_scenario(args.scenario)
            outcome = run_scenario(scenario, config, args.invariant_profile)
            render = rpt.scenario_text if args.format == "text" else rpt.scenario_csv
            _emit(args, render(outcome),
                  [lambda p: rpt.trace_figures(outcome.result, p)])
            return 0 if not outcome.deviations else 1

        if args.command == "catalog":
            catalog = run_catalog(args.year, config, args.invariant_profile)
            render = rpt.catalog_text if args.format == "text" else rpt.catalog_csv
            _emit(args, render(catalog), [lambda p: rpt.catalog_figure(catalog, p)])
            return 0 if not catalog.deviations else 1

        if args.command == "calibrate":
            cal = calibrate(config, args.invariant_profile or "v2017")
            render = rpt.calibration_text if args.format == "text" else rpt.calibration_csv
            _emit(args, render(cal), [lambda p: rpt.calibration_figure(cal, p)])
            return 0 if not any(cal.false_alarms.values()) else 1

        if args.command == "replay":
            alarms = replay(args.csv, config, args.invariant_profile or "v2017")
            lines = [f"{a.tick},{a.name},plc{a.plc},{a.family},{a.detail}"
                     for a in alarms]
            header = ("tick,invariant,plc,family,detail\n" if args.format == "csv"
                      else f"{len(alarms)} alarms over the recorded run\n")
            body = "\n".join(lines) + ("\n" if lines else "")
            _emit(args, header + body)
            return 0

        if args.command == "export":
            if args.scenario:
                scenario = load_scenario(args.scenario)
                profile = (args.invariant_profile
                           or invariant_profile_for_year(scenario.year))
                result = run_scenario(scenario, config, profile).result
            else:
                result = run_nominal(config, args.invariant_profile or "v2017",
                                     args.ticks)
            export_run(result, args.out)
            print(f"historian CSV written to {args.out}")
            if args.report:
                rpt.trace_figures(result, args.report)
            return 0
    except (ConfigError, ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
