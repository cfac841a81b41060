from __future__ import annotations

"""
Scenario inputs and outputs.

Scope:
- Loading YAML scenario configs
- Writing trials.csv, summary.csv and manifest.yaml (plus an optional trials.json)
- Reading trials back and tabulating CDFs

⚠️ IMPORTANT:
- CSV column order is fixed; floats are rendered with 12 significant digits.
"""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

import yaml

from ice_beamsim import __version__
from ice_beamsim.core.config import ScenarioConfig
from ice_beamsim.core.exceptions import ParsingError, StorageError
from ice_beamsim.core.types import TRIAL_COLUMNS, TrialRecord
from ice_beamsim.formatting.exporter import TableExporter
from ice_beamsim.harness.runner import ScenarioResult
from ice_beamsim.metrics.stats import empirical_cdf
from ice_beamsim.parsing.reader import ResultsFormat, ResultsReader

logger = logging.getLogger(__name__)

TRIALS_FILE = "trials.csv"
TRIALS_JSON_FILE = "trials.json"
SUMMARY_FILE = "summary.csv"
MANIFEST_FILE = "manifest.yaml"

SUMMARY_COLUMNS = (
    "service",
    "method",
    "snr_db",
    "trials",
    "mean_spectral_eff_bps_hz",
    "mean_tx_beams",
    "tx_beams_p50",
    "tx_beams_p95",
    "tx_beams_p100",
    # sensing + refinement probes, as in trials.csv
    "mean_total_switchings",
    "fallback_rate",
)

CDF_METRICS: Dict[str, Callable[[TrialRecord], float]] = {
    "tx_beams": lambda r: float(r.tx_beams_used),
    "total_switchings": lambda r: float(r.total_switchings),
    "spectral_eff": lambda r: r.spectral_efficiency,
}

CDF_COLUMNS = ("service", "method", "snr_db", "value", "probability")


# ======================================================================
# INPUT
# ======================================================================

def load_config(path: Path) -> ScenarioConfig:
    """
    Scenario from YAML. An empty file gives the defaults.
    """
    cfg = ScenarioConfig.from_yaml(Path(path))
    logger.info("Config loaded", extra={"path": str(path), "trials": cfg.trials})
    return cfg


# ======================================================================
# OUTPUT
# ======================================================================

def write_results(
    result: ScenarioResult,
    cfg: ScenarioConfig,
    out_dir: Path,
    *,
    trials_json: bool = False,
) -> Dict[str, Path]:
    """
    Write the result files into `out_dir` and return their paths.

    `trials_json` adds trials.json, the same rows as a JSON array.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise StorageError(f"Cannot create output directory {out_dir}: {exc}") from exc

    trials_rows = [r.to_row() for r in result.records]
    paths = {
        "trials": TableExporter(trials_rows, fieldnames=TRIAL_COLUMNS).export(
            out_dir / TRIALS_FILE
        ),
        "summary": TableExporter(
            [s.to_row() for s in result.summary], fieldnames=SUMMARY_COLUMNS
        ).export(out_dir / SUMMARY_FILE),
    }
    files = [TRIALS_FILE, SUMMARY_FILE]
    if trials_json:
        paths["trials_json"] = TableExporter(trials_rows, fieldnames=TRIAL_COLUMNS).export(
            out_dir / TRIALS_JSON_FILE
        )
        files.append(TRIALS_JSON_FILE)

    manifest: Dict[str, Any] = {
        "config": cfg.to_dict(),
        "run": {
            "version": __version__,
            "records": len(result.records),
            "summary_rows": len(result.summary),
            "files": files,
        },
    }
    manifest_path = out_dir / MANIFEST_FILE
    try:
        with manifest_path.open("w", encoding="utf-8") as f:
            yaml.safe_dump(manifest, f, indent=2, sort_keys=False)
    except OSError as exc:
        raise StorageError(f"Cannot write {manifest_path}: {exc}") from exc
    paths["manifest"] = manifest_path

    logger.info("Results written", extra={"out_dir": str(out_dir)})
    return paths


# ======================================================================
# READ BACK
# ======================================================================

def resolve_trials(path: Path) -> Path:
    """A results directory means its trials.csv; a file is taken as is."""
    path = Path(path)
    return path / TRIALS_FILE if path.is_dir() else path


def read_trials(path: Path) -> List[TrialRecord]:
    """
    Parse trial records written by `write_results` (CSV) or exported as a
    JSON array of the same rows.
    """
    reader = ResultsReader(path, required_columns=TRIAL_COLUMNS)
    by_line = reader.format == ResultsFormat.CSV
    records: List[TrialRecord] = []
    for position, row in reader.read():
        try:
            records.append(TrialRecord.from_row(row))
        except (KeyError, TypeError, ValueError) as exc:
            where = "" if by_line else f" (item {position})"
            raise ParsingError(
                f"Malformed trial row{where}: {exc}",
                line=",".join(str(v) for v in row.values()),
                line_number=position if by_line else None,
                source=str(path),
            ) from exc

    logger.debug("Trials read", extra={"path": str(path), **reader.get_stats()})
    return records


def cdf_table(records: List[TrialRecord], metric: str) -> List[Dict[str, Any]]:
    """
    Empirical CDF of `metric` per (service, method, snr_db) group.
    """
    if metric not in CDF_METRICS:
        raise ParsingError(
            f"Unknown metric {metric!r} (expected one of {', '.join(CDF_METRICS)})"
        )
    value_of = CDF_METRICS[metric]

    groups: Dict[Tuple[str, str, float], List[float]] = defaultdict(list)
    for record in records:
        groups[(record.service, record.method, record.snr_db)].append(value_of(record))

    rows: List[Dict[str, Any]] = []
    for (service, method, snr_db) in sorted(groups):
        for value, probability in empirical_cdf(groups[(service, method, snr_db)]):
            rows.append({
                "service": service,
                "method": method,
                "snr_db": format(snr_db, ".12g"),
                "value": format(value, ".12g"),
                "probability": format(probability, ".12g"),
            })
    return rows
