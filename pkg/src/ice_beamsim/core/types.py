from __future__ import annotations

"""
Core record types for ICE BeamSim.

Scope:
- Channel realizations (paths, positions, path loss)
- Localization services and angular windows
- OMP solutions and beam selections
- Per-trial result records

⚠️ IMPORTANT:
- Records only. No sampling, no linear algebra here.
- Array-valued fields are numpy arrays; records compare by identity.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ice_beamsim.core.exceptions import InvalidParameterError

Point = Tuple[float, float]


# ======================================================================
# CHANNEL
# ======================================================================

@dataclass(frozen=True)
class Path:
    """
    One propagation path: complex gain, azimuth AoD at the AP, azimuth AoA at the UE.
    """
    gain: complex
    aod: float
    aoa: float


@dataclass(frozen=True)
class ChannelRealization:
    """
    Geometric channel draw. Path 0 is the LOS path.
    """
    paths: Tuple[Path, ...]
    path_loss: float
    ap_position: Point
    ue_position: Point

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    @property
    def los(self) -> Path:
        return self.paths[0]

    @property
    def distance(self) -> float:
        return math.hypot(
            self.ue_position[0] - self.ap_position[0],
            self.ue_position[1] - self.ap_position[1],
        )


# ======================================================================
# LOCALIZATION
# ======================================================================

@dataclass(frozen=True)
class LocalizationService:
    """
    A positioning system reduced to its error scale σ (meters).
    """
    name: str
    sigma_m: float

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidParameterError("localization service needs a name")
        if not self.sigma_m >= 0.0:
            raise InvalidParameterError(
                f"sigma_m must be >= 0 for service {self.name!r}, got {self.sigma_m!r}"
            )


class WindowSide(str, Enum):
    AOD = "aod"
    AOA = "aoa"


@dataclass(frozen=True)
class WindowSpan:
    """
    Contiguous range of grid indices [lo, hi] on the circular angle grid.

    `lo > hi` means the span wraps through index 0. `half_width` is the
    continuous angular half-width (π for the full circle).
    """
    lo: int
    hi: int
    n_grid: int
    center: float
    half_width: float
    full: bool = False

    @property
    def n_points(self) -> int:
        return (self.hi - self.lo) % self.n_grid + 1

    @property
    def width_deg(self) -> float:
        return 360.0 if self.full else math.degrees(2.0 * self.half_width)

    def indices(self) -> np.ndarray:
        return (self.lo + np.arange(self.n_points)) % self.n_grid

    def contains_angle(self, angle: float) -> bool:
        """True if `angle` lies between the grid angles of lo and hi (circularly)."""
        if self.full:
            return True
        step = 2.0 * math.pi / self.n_grid
        offset = (angle - self.lo * step) % (2.0 * math.pi)
        return offset <= (self.n_points - 1) * step + 1e-12


@dataclass(frozen=True)
class AngularWindow:
    """
    AoD window [q1, q2] and AoA window [g1, g2].
    """
    aod: WindowSpan
    aoa: WindowSpan

    @property
    def q1(self) -> int:
        return self.aod.lo

    @property
    def q2(self) -> int:
        return self.aod.hi

    @property
    def g1(self) -> int:
        return self.aoa.lo

    @property
    def g2(self) -> int:
        return self.aoa.hi


# ======================================================================
# RECOVERY / SELECTION
# ======================================================================

@dataclass(frozen=True, eq=False)
class SparseSolution:
    """
    OMP output: support of (AoD index u, AoA index v) pairs and their gains.
    """
    support: Tuple[Tuple[int, int], ...]
    gains: np.ndarray
    residual_norm: float
    residual_history: Tuple[float, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.support

    def strongest(self) -> Tuple[int, int]:
        """Support entry with the largest |gain| (first one on ties)."""
        return self.support[int(np.argmax(np.abs(self.gains)))]


@dataclass(frozen=True, eq=False)
class BeamSelection:
    """
    Result of a beam-alignment procedure.

    `total_switchings` = tx_beams_used × rx_beams_used, the sensing sweep
    size. Refinement probes are in `refinement_switchings`; their sum is
    `probed_switchings`.
    """
    b_tx_star: int
    b_rx_star: int
    tx_beams_used: int
    rx_beams_used: int
    total_switchings: int
    estimated_paths: Optional[SparseSolution] = None
    fallback_used: bool = False
    refinement_switchings: int = 0
    window: Optional[AngularWindow] = None
    estimated_aod: Optional[float] = None
    estimated_aoa: Optional[float] = None

    @property
    def probed_switchings(self) -> int:
        return self.total_switchings + self.refinement_switchings


# ======================================================================
# RESULTS
# ======================================================================

@dataclass(frozen=True)
class TrialRecord:
    """
    One (trial, service, method, SNR) cell of a scenario run.

    `total_switchings` counts every beam pair probed in the cell: the sensing
    sweep plus refinement (`BeamSelection.probed_switchings`), or B² for
    exhaustive search.
    """
    trial: int
    service: str
    method: str
    snr_db: float
    spectral_efficiency: float
    tx_beams_used: int
    total_switchings: int
    fallback_used: bool = False

    def to_row(self) -> Dict[str, Any]:
        return {
            "trial": self.trial,
            "service": self.service,
            "method": self.method,
            "snr_db": _fmt(self.snr_db),
            "spectral_eff_bps_hz": _fmt(self.spectral_efficiency),
            "tx_beams": self.tx_beams_used,
            "total_switchings": self.total_switchings,
            "fallback": int(self.fallback_used),
        }

    @classmethod
    def from_row(cls, row: Dict[str, Any]) -> TrialRecord:
        return cls(
            trial=int(row["trial"]),
            service=str(row["service"]),
            method=str(row["method"]),
            snr_db=float(row["snr_db"]),
            spectral_efficiency=float(row["spectral_eff_bps_hz"]),
            tx_beams_used=int(row["tx_beams"]),
            total_switchings=int(row["total_switchings"]),
            fallback_used=str(row["fallback"]).strip() in ("1", "true", "True"),
        )


TRIAL_COLUMNS = (
    "trial",
    "service",
    "method",
    "snr_db",
    "spectral_eff_bps_hz",
    "tx_beams",
    "total_switchings",
    "fallback",
)


def _fmt(value: float) -> str:
    """Fixed float rendering for CSV (stable across runs)."""
    return format(float(value), ".12g")


@dataclass(frozen=True)
class SummaryRow:
    """
    Aggregated statistics for one (service, method, SNR) group.
    """
    service: str
    method: str
    snr_db: float
    trials: int
    mean_spectral_efficiency: float
    mean_tx_beams: float
    tx_beams_p50: float
    tx_beams_p95: float
    tx_beams_p100: float
    mean_total_switchings: float
    fallback_rate: float

    def to_row(self) -> Dict[str, Any]:
        return {
            "service": self.service,
            "method": self.method,
            "snr_db": _fmt(self.snr_db),
            "trials": self.trials,
            "mean_spectral_eff_bps_hz": _fmt(self.mean_spectral_efficiency),
            "mean_tx_beams": _fmt(self.mean_tx_beams),
            "tx_beams_p50": _fmt(self.tx_beams_p50),
            "tx_beams_p95": _fmt(self.tx_beams_p95),
            "tx_beams_p100": _fmt(self.tx_beams_p100),
            "mean_total_switchings": _fmt(self.mean_total_switchings),
            "fallback_rate": _fmt(self.fallback_rate),
        }
