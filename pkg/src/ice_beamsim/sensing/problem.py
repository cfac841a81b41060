from __future__ import annotations

"""
Beam-swept measurements and the factored sparse problem.

Scope:
- Measurement sweep Y = √P W_rxᴴ H W_tx + W_rxᴴ n (one noise draw per slot)
- Column-major vectorization
- Factored sensing matrix Φ = √P (W_txᵀ ⊗ W_rxᴴ) T_D over the angle grid

⚠️ IMPORTANT:
- T_D (N_AP·N_UE × N²) is never built. Column (u, v) of Φ is
  √P · kron(phi_tx[:, u], phi_rx[:, v]).
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ice_beamsim.arrays.codebook import Codebook
from ice_beamsim.arrays.steering import ArrayConfig, array_responses
from ice_beamsim.core.exceptions import InvalidParameterError
from ice_beamsim.sensing.grid import AngleGrid

logger = logging.getLogger(__name__)


# ======================================================================
# SENSING PROBLEM
# ======================================================================

@dataclass(frozen=True, eq=False)
class SensingProblem:
    """
    Vectorized measurements plus the two factors of Φ.

    phi_tx_factor is M_tx × N, phi_rx_factor is M_rx × N, and y_v has
    M_tx · M_rx entries ordered column-major over Y (M_rx × M_tx).
    """
    y_v: np.ndarray
    phi_tx_factor: np.ndarray
    phi_rx_factor: np.ndarray
    tx_power: float
    grid: AngleGrid

    def __post_init__(self) -> None:
        if self.y_v.shape != (self.m_tx * self.m_rx,):
            raise InvalidParameterError(
                f"y_v has shape {self.y_v.shape}, expected ({self.m_tx * self.m_rx},)"
            )
        for name in ("phi_tx_factor", "phi_rx_factor"):
            if getattr(self, name).shape[1] != self.grid.n_points:
                raise InvalidParameterError(
                    f"{name} must have {self.grid.n_points} columns"
                )
        if not self.tx_power >= 0.0:
            raise InvalidParameterError(f"tx_power must be >= 0, got {self.tx_power}")

    @property
    def m_tx(self) -> int:
        return int(self.phi_tx_factor.shape[0])

    @property
    def m_rx(self) -> int:
        return int(self.phi_rx_factor.shape[0])

    @property
    def scale(self) -> float:
        return math.sqrt(self.tx_power)

    def with_measurements(self, Y: np.ndarray) -> SensingProblem:
        """Same factors, new measurements (Y matrix or already vectorized)."""
        Y = np.asarray(Y, dtype=complex)
        y_v = vectorize(Y) if Y.ndim == 2 else Y
        return replace(self, y_v=y_v)

    def with_tx_power(self, tx_power: float) -> SensingProblem:
        return replace(self, tx_power=float(tx_power))


# ======================================================================
# MEASUREMENTS
# ======================================================================

def sweep_measurements(
    H: np.ndarray,
    W_tx: Codebook,
    W_rx: Codebook,
    tx_power: float,
    noise_stddev: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    M_rx × M_tx matrix of received samples, entry (r, t) measured with RX
    beam r and TX beam t.
    """
    H = np.asarray(H, dtype=complex)
    if H.shape != (W_rx.n_elements, W_tx.n_elements):
        raise InvalidParameterError(
            f"H has shape {H.shape}, codebooks need ({W_rx.n_elements}, {W_tx.n_elements})"
        )
    if not tx_power >= 0.0:
        raise InvalidParameterError(f"tx_power must be >= 0, got {tx_power}")
    if not noise_stddev >= 0.0:
        raise InvalidParameterError(f"noise_stddev must be >= 0, got {noise_stddev}")

    Y = math.sqrt(tx_power) * (W_rx.weights.conj().T @ H @ W_tx.weights)

    if noise_stddev > 0.0:
        # w_rᴴ n with n ~ CN(0, σ² I) is CN(0, σ² ‖w_r‖²), fresh per slot
        rx_norms = np.linalg.norm(W_rx.weights, axis=0)[:, None]
        shape = Y.shape
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
        Y = Y + noise_stddev * rx_norms * noise

    return Y


def vectorize(Y: np.ndarray) -> np.ndarray:
    """Column-major stacking vec(Y)."""
    return np.asarray(Y).reshape(-1, order="F")


# ======================================================================
# FACTORED SENSING MATRIX
# ======================================================================

def build_sensing_factors(
    W_tx: Codebook,
    W_rx: Codebook,
    grid: AngleGrid,
    ap_cfg: ArrayConfig,
    ue_cfg: ArrayConfig,
    tx_power: float,
    y_v: Optional[np.ndarray] = None,
) -> SensingProblem:
    """
    Build phi_tx = W_txᵀ conj(P_AP) and phi_rx = W_rxᴴ P_UE on the grid.

    Without `y_v` the problem carries zero measurements; attach real ones
    with `SensingProblem.with_measurements`.
    """
    if grid.n_points < 2:
        raise InvalidParameterError(f"sensing grid needs >= 2 points, got {grid.n_points}")
    if W_tx.n_elements != ap_cfg.n_elements or W_rx.n_elements != ue_cfg.n_elements:
        raise InvalidParameterError("codebook sizes do not match the array configs")

    angles = grid.angles
    phi_tx = W_tx.weights.T @ array_responses(angles, ap_cfg).conj()
    phi_rx = W_rx.weights.conj().T @ array_responses(angles, ue_cfg)

    if y_v is None:
        y_v = np.zeros(W_tx.n_beams * W_rx.n_beams, dtype=complex)

    logger.debug(
        "Sensing factors built",
        extra={"m_tx": W_tx.n_beams, "m_rx": W_rx.n_beams, "grid": grid.n_points},
    )
    return SensingProblem(
        y_v=np.asarray(y_v, dtype=complex).reshape(-1),
        phi_tx_factor=phi_tx,
        phi_rx_factor=phi_rx,
        tx_power=float(tx_power),
        grid=grid,
    )


def implied_phi_column(problem: SensingProblem, u: int, v: int) -> np.ndarray:
    """
    Column (u, v) of Φ, i.e. √P · kron(phi_tx[:, u], phi_rx[:, v]).
    """
    problem.grid.check_index(u, "AoD index")
    problem.grid.check_index(v, "AoA index")
    return problem.scale * np.kron(problem.phi_tx_factor[:, u], problem.phi_rx_factor[:, v])
