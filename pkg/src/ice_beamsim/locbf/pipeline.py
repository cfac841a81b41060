from __future__ import annotations

"""
Location-assisted beam alignment and the exhaustive-search baseline.

Pipeline:
perturb positions → angular windows → measurement beams → sweep + OMP
→ strongest path → final codebook beams (optionally refined)

⚠️ IMPORTANT:
- Steps up to the measurement beams depend only on geometry, so a
  `MeasurementPlan` is built once and swept at every SNR point.
- Final beams always come from the system's quantized codebooks, the same
  ones exhaustive search scans.
- Empty OMP support or a zero sensing matrix falls back to the beams at the
  window centers and sets `fallback_used`.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ice_beamsim.arrays.codebook import (
    Codebook,
    best_beams_over,
    quantized_codebook,
    steer_codebook,
)
from ice_beamsim.arrays.steering import ArrayConfig
from ice_beamsim.core.config import OmpConfig, ScenarioConfig
from ice_beamsim.core.exceptions import DegenerateInputError, InvalidParameterError
from ice_beamsim.core.types import (
    AngularWindow,
    BeamSelection,
    ChannelRealization,
    LocalizationService,
    Point,
    SparseSolution,
)
from ice_beamsim.locbf.beams import design_measurement_beams, measurement_beam_count
from ice_beamsim.locbf.localization import perturb_position
from ice_beamsim.locbf.windows import location_window
from ice_beamsim.recovery import omp
from ice_beamsim.sensing.grid import AngleGrid
from ice_beamsim.sensing.problem import (
    SensingProblem,
    build_sensing_factors,
    sweep_measurements,
)

logger = logging.getLogger(__name__)


# ======================================================================
# SYSTEM
# ======================================================================

@dataclass(frozen=True, eq=False)
class AlignmentSystem:
    """
    Everything the alignment procedures need besides the channel.

    noise_power = 0 gives noiseless sweeps.
    """
    grid: AngleGrid
    ap_cfg: ArrayConfig
    ue_cfg: ArrayConfig
    tx_codebook: Codebook
    rx_codebook: Codebook
    beamwidth_deg: float
    tx_power: float
    noise_power: float
    omp: OmpConfig
    refine: bool = True
    refine_oversample: int = 32

    def __post_init__(self) -> None:
        if self.tx_codebook.n_elements != self.ap_cfg.n_elements:
            raise InvalidParameterError("TX codebook does not match the AP array")
        if self.rx_codebook.n_elements != self.ue_cfg.n_elements:
            raise InvalidParameterError("RX codebook does not match the UE array")
        if not self.tx_power >= 0.0 or not self.noise_power >= 0.0:
            raise InvalidParameterError("tx_power and noise_power must be >= 0")
        if self.refine_oversample < 1:
            raise InvalidParameterError(
                f"refine_oversample must be >= 1, got {self.refine_oversample}"
            )

    @classmethod
    def from_scenario(cls, cfg: ScenarioConfig, snr_db: Optional[float] = None) -> AlignmentSystem:
        """
        System for a scenario; `snr_db` defaults to the last sweep point.
        """
        n_beams = cfg.n_codebook_beams
        ap_cfg = ArrayConfig(cfg.n_ap, cfg.spacing_wavelengths)
        ue_cfg = ArrayConfig(cfg.n_ue, cfg.spacing_wavelengths)
        snr = cfg.snr_db_sweep[-1] if snr_db is None else snr_db
        return cls(
            grid=AngleGrid(cfg.grid_n),
            ap_cfg=ap_cfg,
            ue_cfg=ue_cfg,
            tx_codebook=quantized_codebook(cfg.n_ap, n_beams, cfg.beamwidth_deg),
            rx_codebook=quantized_codebook(cfg.n_ue, n_beams, cfg.beamwidth_deg),
            beamwidth_deg=cfg.beamwidth_deg,
            tx_power=cfg.tx_power(snr),
            noise_power=cfg.noise_power,
            omp=cfg.omp,
            refine=cfg.refine,
            refine_oversample=cfg.refine_oversample,
        )

    @property
    def noise_stddev(self) -> float:
        return math.sqrt(self.noise_power)

    def at_snr(self, snr_db: float) -> AlignmentSystem:
        """Same system with P set so that P / ρ² hits `snr_db`."""
        return replace(self, tx_power=self.noise_power * 10.0 ** (snr_db / 10.0))


# ======================================================================
# MEASUREMENT PLAN
# ======================================================================

@dataclass(frozen=True, eq=False)
class MeasurementPlan:
    """
    Geometry-dependent part of one location-based alignment.
    """
    est_ap: Point
    est_ue: Point
    window: AngularWindow
    tx_measure: Codebook
    rx_measure: Codebook
    problem: SensingProblem

    @property
    def sensing_switchings(self) -> int:
        return self.tx_measure.n_beams * self.rx_measure.n_beams


def plan_measurements(
    realization: ChannelRealization,
    service_ap: LocalizationService,
    service_ue: LocalizationService,
    system: AlignmentSystem,
    rng: np.random.Generator,
) -> MeasurementPlan:
    """
    Perturb both positions, derive the windows and design the measurement beams.
    """
    est_ap = perturb_position(realization.ap_position, service_ap.sigma_m, rng)
    est_ue = perturb_position(realization.ue_position, service_ue.sigma_m, rng)
    window = location_window(est_ap, est_ue, service_ap, service_ue, system.grid)

    tx_measure = design_measurement_beams(
        window.aod,
        measurement_beam_count(window.aod, system.beamwidth_deg),
        system.grid,
        system.ap_cfg,
        system.beamwidth_deg,
    )
    rx_measure = design_measurement_beams(
        window.aoa,
        measurement_beam_count(window.aoa, system.beamwidth_deg),
        system.grid,
        system.ue_cfg,
        system.beamwidth_deg,
    )
    problem = build_sensing_factors(
        tx_measure, rx_measure, system.grid, system.ap_cfg, system.ue_cfg, system.tx_power
    )
    return MeasurementPlan(
        est_ap=est_ap,
        est_ue=est_ue,
        window=window,
        tx_measure=tx_measure,
        rx_measure=rx_measure,
        problem=problem,
    )


# ======================================================================
# REFINEMENT
# ======================================================================

def candidate_beams(
    codebook: Codebook,
    angle: float,
    grid: AngleGrid,
    cfg: ArrayConfig,
    oversample: int,
) -> List[int]:
    """
    Codebook beams that win somewhere within one grid step of `angle`.
    """
    offsets = np.linspace(-grid.step, grid.step, 2 * oversample + 1)
    return best_beams_over(codebook, angle + offsets, cfg)


def refine_beams(
    H: np.ndarray,
    candidates_tx: Sequence[int],
    candidates_rx: Sequence[int],
    system: AlignmentSystem,
    rng: np.random.Generator,
) -> Tuple[int, int, int]:
    """
    Measure every candidate pair once and keep the strongest.

    Returns (b_tx, b_rx, switchings); ties go to the smallest (b_tx, b_rx)
    position in the candidate lists.
    """
    if not candidates_tx or not candidates_rx:
        raise InvalidParameterError("refinement needs at least one candidate per side")

    Y = sweep_measurements(
        H,
        system.tx_codebook.subset(candidates_tx),
        system.rx_codebook.subset(candidates_rx),
        system.tx_power,
        system.noise_stddev,
        rng,
    )
    power = np.abs(Y.T) ** 2  # [tx, rx]
    t, r = divmod(int(np.argmax(power)), len(candidates_rx))
    return int(candidates_tx[t]), int(candidates_rx[r]), len(candidates_tx) * len(candidates_rx)


# ======================================================================
# LOCATION-BASED ALIGNMENT
# ======================================================================

def align_with_plan(
    H: np.ndarray,
    plan: MeasurementPlan,
    system: AlignmentSystem,
    rng: np.random.Generator,
) -> BeamSelection:
    """
    Sweep the planned beams, recover the paths and pick the final beams.
    """
    Y = sweep_measurements(
        H, plan.tx_measure, plan.rx_measure, system.tx_power, system.noise_stddev, rng
    )
    problem = plan.problem.with_tx_power(system.tx_power).with_measurements(Y)

    solution: Optional[SparseSolution]
    try:
        solution = omp.solve(problem, system.omp)
    except DegenerateInputError:
        logger.debug("Degenerate sensing matrix, falling back to window centers")
        solution = None

    fallback = solution is None or solution.is_empty
    if fallback:
        est_aod, est_aoa = plan.window.aod.center, plan.window.aoa.center
    else:
        assert solution is not None
        u, v = solution.strongest()
        est_aod, est_aoa = system.grid.angle(u), system.grid.angle(v)

    refinement = 0
    if system.refine and not fallback:
        candidates_tx = candidate_beams(
            system.tx_codebook, est_aod, system.grid, system.ap_cfg, system.refine_oversample
        )
        candidates_rx = candidate_beams(
            system.rx_codebook, est_aoa, system.grid, system.ue_cfg, system.refine_oversample
        )
        b_tx, b_rx, refinement = refine_beams(H, candidates_tx, candidates_rx, system, rng)
    else:
        b_tx = steer_codebook(system.tx_codebook, est_aod, system.ap_cfg)
        b_rx = steer_codebook(system.rx_codebook, est_aoa, system.ue_cfg)

    return BeamSelection(
        b_tx_star=b_tx,
        b_rx_star=b_rx,
        tx_beams_used=plan.tx_measure.n_beams,
        rx_beams_used=plan.rx_measure.n_beams,
        total_switchings=plan.sensing_switchings,
        estimated_paths=solution,
        fallback_used=fallback,
        refinement_switchings=refinement,
        window=plan.window,
        estimated_aod=est_aod,
        estimated_aoa=est_aoa,
    )


def align_location_based(
    H: np.ndarray,
    realization: ChannelRealization,
    service_ap: LocalizationService,
    service_ue: LocalizationService,
    system: AlignmentSystem,
    rng: np.random.Generator,
) -> BeamSelection:
    """Plan and sweep in one call."""
    plan = plan_measurements(realization, service_ap, service_ue, system, rng)
    return align_with_plan(H, plan, system, rng)


# ======================================================================
# EXHAUSTIVE SEARCH
# ======================================================================

def exhaustive_search(H: np.ndarray, W_tx: Codebook, W_rx: Codebook) -> BeamSelection:
    """
    Noiseless argmax of |w_rxᴴ H w_t|² over every codebook pair.

    Ties go to the smallest (b_tx, b_rx).
    """
    H = np.asarray(H, dtype=complex)
    if H.shape != (W_rx.n_elements, W_tx.n_elements):
        raise InvalidParameterError(
            f"H has shape {H.shape}, codebooks need ({W_rx.n_elements}, {W_tx.n_elements})"
        )
    gains = np.abs(W_tx.weights.T @ H.T @ W_rx.weights.conj()) ** 2  # [tx, rx]
    b_tx, b_rx = divmod(int(np.argmax(gains)), W_rx.n_beams)

    return BeamSelection(
        b_tx_star=b_tx,
        b_rx_star=b_rx,
        tx_beams_used=W_tx.n_beams,
        rx_beams_used=W_rx.n_beams,
        total_switchings=W_tx.n_beams * W_rx.n_beams,
    )
