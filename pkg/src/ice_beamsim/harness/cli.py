"""Command line entry point: `ice-beamsim run` and `ice-beamsim cdf`."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from rich.logging import RichHandler

from ice_beamsim.core.config import ScenarioConfig
from ice_beamsim.core.exceptions import BeamSimError, ConfigurationError, ParsingError
from ice_beamsim.core.types import SummaryRow
from ice_beamsim.formatting import console
from ice_beamsim.formatting.exporter import TableExporter
from ice_beamsim.harness.io import (
    CDF_COLUMNS,
    CDF_METRICS,
    SUMMARY_COLUMNS,
    cdf_table,
    load_config,
    read_trials,
    resolve_trials,
    write_results,
)
from ice_beamsim.harness.runner import run_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _service_list(value: str) -> List[str]:
    names = [part.strip() for part in value.split(",") if part.strip()]
    if not names:
        raise argparse.ArgumentTypeError("service list cannot be empty")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ice-beamsim",
        description="Location-assisted mmWave beam alignment simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a Monte Carlo scenario")
    run.add_argument("--config", type=Path, help="Scenario YAML (defaults if omitted)")
    run.add_argument("--out", type=Path, required=True, help="Output directory")
    run.add_argument(
        "--seed",
        type=lambda value: int(value, 0),
        help="Master seed, unsigned 64-bit (decimal or 0x-prefixed hex)",
    )
    run.add_argument("--trials", type=int, help="Number of trials")
    run.add_argument("--services", type=_service_list, help="Comma-separated service names")
    run.add_argument("--workers", type=int, help="Worker processes")
    run.add_argument(
        "--trials-json", action="store_true", help="Also write trials.json (JSON array)"
    )
    run.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    cdf = sub.add_parser("cdf", help="Tabulate an empirical CDF from a results directory")
    cdf.add_argument(
        "--results",
        type=Path,
        required=True,
        help="Results directory, or a trials file (.csv or .json)",
    )
    cdf.add_argument(
        "--metric", choices=sorted(CDF_METRICS), default="tx_beams", help="Metric to tabulate"
    )
    cdf.add_argument("--out", type=Path, help="Output file (default: cdf_<metric>.csv next to the trials)")
    cdf.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    return parser


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(show_path=False)],
        force=True,
    )


# ======================================================================
# COMMANDS
# ======================================================================

def _warn_on_fallbacks(summary: Sequence[SummaryRow]) -> None:
    hit = [row for row in summary if row.fallback_rate > 0.0]
    if not hit:
        return
    worst = max(hit, key=lambda row: row.fallback_rate)
    console.warn(
        f"window-center fallback used in {len(hit)} of {len(summary)} groups "
        f"(worst: {worst.service} at {worst.snr_db:g} dB, rate {worst.fallback_rate:.2f})"
    )


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    cfg = cfg.with_overrides(
        seed=args.seed,
        trials=args.trials,
        services=args.services,
        workers=args.workers,
    )

    result = run_scenario(cfg)
    paths = write_results(result, cfg, args.out, trials_json=args.trials_json)

    console.summary_table(
        [row.to_row() for row in result.summary],
        SUMMARY_COLUMNS,
        title="Summary",
    )
    _warn_on_fallbacks(result.summary)
    console.info(f"Results written to {paths['trials'].parent}")
    return EXIT_OK


def _cmd_cdf(args: argparse.Namespace) -> int:
    trials_path = resolve_trials(args.results)
    records = read_trials(trials_path)
    rows = cdf_table(records, args.metric)
    out = args.out or trials_path.parent / f"cdf_{args.metric}.csv"
    TableExporter(rows, fieldnames=CDF_COLUMNS).export(out)
    console.info(f"CDF of {args.metric} written to {out}")
    return EXIT_OK


# ======================================================================
# MAIN
# ======================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_cdf(args)
    except (ConfigurationError, ParsingError) as exc:
        console.error(f"error: {exc}")
        return EXIT_USAGE
    except BeamSimError as exc:
        console.error(f"error: {exc}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
