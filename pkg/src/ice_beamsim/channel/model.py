from __future__ import annotations

"""
Geometric narrowband mmWave channel.

Scope:
- AP / UE placement in a 2-D cell annulus
- L-path realizations (LOS path first) with Rayleigh gains and path loss
- Channel matrix H = (1/γ) Σ μ_ℓ p_UE(φ_ℓ) p_AP(ψ_ℓ)ᴴ and its SNR normalization

⚠️ NOT here:
- Wideband taps, blockage, 3-D geometry
"""

import logging
import math
from typing import Tuple

import numpy as np

from ice_beamsim.arrays.steering import TWO_PI, ArrayConfig, array_responses, wrap_angle
from ice_beamsim.core.config import GeometryConfig
from ice_beamsim.core.exceptions import DegenerateInputError, InvalidParameterError
from ice_beamsim.core.types import ChannelRealization, Path, Point

logger = logging.getLogger(__name__)


# ======================================================================
# GEOMETRY
# ======================================================================

def bearing(src: Point, dst: Point) -> float:
    """Azimuth of the direction src → dst, in [0, 2π)."""
    return wrap_angle(math.atan2(dst[1] - src[1], dst[0] - src[0]))


def _complex_gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


# ======================================================================
# SAMPLING
# ======================================================================

def sample_channel(
    geometry: GeometryConfig,
    n_paths: int,
    rng: np.random.Generator,
) -> ChannelRealization:
    """
    Draw one realization: UE uniform over the annulus, path 0 along the
    AP-UE line of sight, remaining paths with uniform angles.
    """
    if n_paths < 1:
        raise InvalidParameterError(f"n_paths must be >= 1, got {n_paths}")

    r_min, r_max = geometry.cell_min_radius_m, geometry.cell_max_radius_m
    radius = math.sqrt(rng.uniform(r_min**2, r_max**2))
    theta = rng.uniform(0.0, TWO_PI)

    ap: Point = (0.0, 0.0)
    ue: Point = (radius * math.cos(theta), radius * math.sin(theta))

    gains = _complex_gaussian(rng, n_paths)
    aods = rng.uniform(0.0, TWO_PI, n_paths)
    aoas = rng.uniform(0.0, TWO_PI, n_paths)
    aods[0] = bearing(ap, ue)
    aoas[0] = bearing(ue, ap)

    paths = tuple(
        Path(gain=complex(g), aod=float(d), aoa=float(a))
        for g, d, a in zip(gains, aods, aoas)
    )
    realization = ChannelRealization(
        paths=paths,
        path_loss=radius**geometry.pathloss_exponent,
        ap_position=ap,
        ue_position=ue,
    )

    logger.debug(
        "Channel sampled",
        extra={"distance_m": radius, "n_paths": n_paths, "los_aod": aods[0]},
    )
    return realization


# ======================================================================
# CHANNEL MATRIX
# ======================================================================

def channel_matrix(
    realization: ChannelRealization,
    ap_cfg: ArrayConfig,
    ue_cfg: ArrayConfig,
) -> np.ndarray:
    """
    N_UE × N_AP channel matrix of a realization.
    """
    aods = np.array([p.aod for p in realization.paths])
    aoas = np.array([p.aoa for p in realization.paths])
    gains = np.array([p.gain for p in realization.paths], dtype=complex)

    p_ap = array_responses(aods, ap_cfg)  # N_AP × L
    p_ue = array_responses(aoas, ue_cfg)  # N_UE × L
    return (p_ue * gains[None, :]) @ p_ap.conj().T / realization.path_loss


def normalize_channel(H: np.ndarray) -> np.ndarray:
    """
    Scale H so that ‖H‖_F² = N_AP · N_UE.
    """
    H = np.asarray(H, dtype=complex)
    norm = np.linalg.norm(H)
    if norm == 0.0:
        raise DegenerateInputError("cannot normalize an all-zero channel matrix")
    return H * (math.sqrt(H.size) / norm)


def realize(
    geometry: GeometryConfig,
    n_paths: int,
    ap_cfg: ArrayConfig,
    ue_cfg: ArrayConfig,
    rng: np.random.Generator,
) -> Tuple[ChannelRealization, np.ndarray]:
    """
    Sample a realization and return it with its normalized channel matrix.
    """
    realization = sample_channel(geometry, n_paths, rng)
    return realization, normalize_channel(channel_matrix(realization, ap_cfg, ue_cfg))
