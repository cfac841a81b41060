from __future__ import annotations

"""
Statistics over trial records.

Scope:
- Empirical CDFs
- Per (service, method, SNR) summaries

⚠️ IMPORTANT:
- Percentiles are observed values (numpy method="higher"), never interpolated.
"""

import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ice_beamsim.core.exceptions import InvalidParameterError
from ice_beamsim.core.types import SummaryRow, TrialRecord

logger = logging.getLogger(__name__)

GroupKey = Tuple[str, str, float]


def empirical_cdf(samples: Iterable[float]) -> List[Tuple[float, float]]:
    """
    (value, P[X <= value]) for every distinct sample value, ascending.
    """
    values = np.asarray(list(samples), dtype=float)
    if values.size == 0:
        raise InvalidParameterError("empirical_cdf needs at least one sample")
    if np.isnan(values).any():
        raise InvalidParameterError("empirical_cdf got NaN samples")

    distinct, counts = np.unique(values, return_counts=True)
    probabilities = np.cumsum(counts) / values.size
    return [(float(v), float(p)) for v, p in zip(distinct, probabilities)]


def _percentile(values: np.ndarray, q: float) -> float:
    return float(np.percentile(values, q, method="higher"))


def _summarize(key: GroupKey, group: Sequence[TrialRecord]) -> SummaryRow:
    beams = np.array([r.tx_beams_used for r in group], dtype=float)
    return SummaryRow(
        service=key[0],
        method=key[1],
        snr_db=key[2],
        trials=len(group),
        mean_spectral_efficiency=float(np.mean([r.spectral_efficiency for r in group])),
        mean_tx_beams=float(beams.mean()),
        tx_beams_p50=_percentile(beams, 50),
        tx_beams_p95=_percentile(beams, 95),
        tx_beams_p100=_percentile(beams, 100),
        mean_total_switchings=float(np.mean([r.total_switchings for r in group])),
        fallback_rate=float(np.mean([r.fallback_used for r in group])),
    )


def aggregate(records: Iterable[TrialRecord]) -> List[SummaryRow]:
    """
    One summary row per (service, method, snr_db), sorted by that key.
    """
    groups: Dict[GroupKey, List[TrialRecord]] = defaultdict(list)
    for record in records:
        groups[(record.service, record.method, record.snr_db)].append(record)

    if not groups:
        raise InvalidParameterError("aggregate needs at least one record")

    logger.debug("Aggregating records", extra={"groups": len(groups)})
    return [_summarize(key, groups[key]) for key in sorted(groups)]
