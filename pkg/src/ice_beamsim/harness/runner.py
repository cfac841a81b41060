from __future__ import annotations

"""
Monte Carlo scenario runner.

Pipeline (one trial):
channel realization → exhaustive baseline → per service: measurement plan
→ per SNR: sweep + OMP + final beams → TrialRecord

⚠️ IMPORTANT:
- Every random stream is derived from (seed, trial, ...) through
  SeedSequence spawn keys, so a trial's records do not depend on which
  worker ran it or on the other trials.
- Records come out ordered by trial, then method, then service, then SNR.
  Exhaustive search ignores localization and is reported with service "none".
"""

import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import List

import numpy as np

from ice_beamsim.channel.model import realize
from ice_beamsim.core.config import METHOD_EXHAUSTIVE, METHOD_LOCATION_CS, ScenarioConfig
from ice_beamsim.core.types import SummaryRow, TrialRecord
from ice_beamsim.locbf.pipeline import (
    AlignmentSystem,
    align_with_plan,
    exhaustive_search,
    plan_measurements,
)
from ice_beamsim.metrics.efficiency import spectral_efficiency
from ice_beamsim.metrics.stats import aggregate

logger = logging.getLogger(__name__)

NO_SERVICE = "none"

# spawn-key tags
_CHANNEL = 0
_LOCALIZATION = 1
_NOISE = 2


@dataclass(frozen=True)
class ScenarioResult:
    records: List[TrialRecord]
    summary: List[SummaryRow]


# ======================================================================
# RANDOM STREAMS
# ======================================================================

def service_key(name: str) -> int:
    """Stable integer key of a service name (independent of PYTHONHASHSEED)."""
    return zlib.crc32(name.encode("utf-8"))


def trial_rng(seed: int, trial: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, *keys)))


# ======================================================================
# ONE TRIAL
# ======================================================================

def _run_trial(cfg: ScenarioConfig, trial: int) -> List[TrialRecord]:
    """
    All records of one trial. Module-level so worker processes can import it.
    """
    system = AlignmentSystem.from_scenario(cfg)
    realization, H = realize(
        cfg.geometry,
        cfg.n_paths,
        system.ap_cfg,
        system.ue_cfg,
        trial_rng(cfg.seed, trial, _CHANNEL),
    )

    records: List[TrialRecord] = []
    for method in cfg.methods:
        if method == METHOD_EXHAUSTIVE:
            selection = exhaustive_search(H, system.tx_codebook, system.rx_codebook)
            w_tx = system.tx_codebook.beam(selection.b_tx_star)
            w_rx = system.rx_codebook.beam(selection.b_rx_star)
            for snr_db in cfg.snr_db_sweep:
                records.append(TrialRecord(
                    trial=trial,
                    service=NO_SERVICE,
                    method=method,
                    snr_db=snr_db,
                    spectral_efficiency=spectral_efficiency(
                        H, w_tx, w_rx, cfg.tx_power(snr_db), cfg.noise_power
                    ),
                    tx_beams_used=selection.tx_beams_used,
                    total_switchings=selection.probed_switchings,
                ))
            continue

        if method != METHOD_LOCATION_CS:
            continue

        for service in cfg.service_list:
            key = service_key(service.name)
            plan = plan_measurements(
                realization,
                service,
                service,
                system,
                trial_rng(cfg.seed, trial, _LOCALIZATION, key),
            )
            for snr_idx, snr_db in enumerate(cfg.snr_db_sweep):
                at_snr = system.at_snr(snr_db)
                selection = align_with_plan(
                    H, plan, at_snr, trial_rng(cfg.seed, trial, _NOISE, key, snr_idx)
                )
                records.append(TrialRecord(
                    trial=trial,
                    service=service.name,
                    method=method,
                    snr_db=snr_db,
                    spectral_efficiency=spectral_efficiency(
                        H,
                        system.tx_codebook.beam(selection.b_tx_star),
                        system.rx_codebook.beam(selection.b_rx_star),
                        at_snr.tx_power,
                        cfg.noise_power,
                    ),
                    tx_beams_used=selection.tx_beams_used,
                    total_switchings=selection.probed_switchings,
                    fallback_used=selection.fallback_used,
                ))

    logger.debug("Trial done", extra={"trial": trial, "records": len(records)})
    return records


# ======================================================================
# SCENARIO
# ======================================================================

def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """
    Run `cfg.trials` trials (in worker processes when `cfg.workers > 1`).
    """
    logger.info(
        "Scenario started",
        extra={
            "trials": cfg.trials,
            "services": list(cfg.services),
            "methods": cfg.methods,
            "workers": cfg.workers,
        },
    )

    run_one = partial(_run_trial, cfg)
    trials = range(cfg.trials)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            per_trial = list(executor.map(run_one, trials))
    else:
        per_trial = [run_one(t) for t in trials]

    records = [record for batch in per_trial for record in batch]
    summary = aggregate(records)

    logger.info("Scenario finished", extra={"records": len(records)})
    return ScenarioResult(records=records, summary=summary)
