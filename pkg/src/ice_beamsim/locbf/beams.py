from __future__ import annotations

"""
Window-constrained measurement beams.

Scope:
- Number of measurement beams for a window
- Tiling of the window into contiguous sub-ranges
- Least-squares synthesis of one flat beam per sub-range

⚠️ IMPORTANT:
- Beam m targets wᴴp(ψ̄_u) = C = √N on its sub-range and 0 on the rest of the
  window. Window points whose steering vector coincides with an in-range one
  (sin ψ equal, the ULA front/back ambiguity) carry no zero constraint.
- Designed beams are unit-norm and never phase-quantized.
"""

import logging
import math
from typing import List

import numpy as np
import scipy.linalg

from ice_beamsim.arrays.codebook import Codebook, CodebookKind
from ice_beamsim.arrays.steering import ArrayConfig, array_responses
from ice_beamsim.core.exceptions import InvalidParameterError
from ice_beamsim.core.types import WindowSpan
from ice_beamsim.sensing.grid import AngleGrid

logger = logging.getLogger(__name__)

_PINV_RTOL = 1e-3
_SIN_TOL = 1e-9


# ======================================================================
# BEAM COUNT / TILING
# ======================================================================

def measurement_beam_count(span: WindowSpan, beamwidth_deg: float) -> int:
    """
    ceil(window width / beamwidth), between 1 and the number of window points.
    """
    if not beamwidth_deg > 0.0:
        raise InvalidParameterError(f"beamwidth_deg must be > 0, got {beamwidth_deg!r}")
    count = math.ceil(span.width_deg / beamwidth_deg - 1e-9)
    return max(1, min(count, span.n_points))


def split_window(indices: np.ndarray, m_beams: int) -> List[np.ndarray]:
    """
    Split window indices into `m_beams` contiguous, near-equal, disjoint parts.

    More beams than points collapses to one point per beam.
    """
    indices = np.asarray(indices)
    if m_beams < 1:
        raise InvalidParameterError(f"m_beams must be >= 1, got {m_beams}")
    if indices.size == 0:
        raise InvalidParameterError("cannot split an empty window")
    return np.array_split(indices, min(m_beams, indices.size))


# ======================================================================
# DESIGN
# ======================================================================

def _design_beam(
    responses: np.ndarray,
    sines: np.ndarray,
    in_range: np.ndarray,
    gain: float,
) -> np.ndarray:
    inside = np.zeros(sines.size, dtype=bool)
    inside[in_range] = True

    # outside points aliasing an in-range steering vector stay unconstrained
    distance = np.abs(sines[:, None] - sines[in_range][None, :]).min(axis=1)
    zeroed = ~inside & (distance > _SIN_TOL)

    rows = np.concatenate([np.flatnonzero(inside), np.flatnonzero(zeroed)])
    target = np.concatenate([
        np.full(int(inside.sum()), gain, dtype=complex),
        np.zeros(int(zeroed.sum()), dtype=complex),
    ])

    # pᴴw = C is the conjugate of wᴴp = C for real C
    A = responses[:, rows].conj().T
    w = scipy.linalg.pinv(A, rtol=_PINV_RTOL) @ target
    return w / np.linalg.norm(w)


def design_measurement_beams(
    span: WindowSpan,
    m_beams: int,
    grid: AngleGrid,
    cfg: ArrayConfig,
    beamwidth_deg: float,
) -> Codebook:
    """
    One unit-norm flat beam per sub-range of the window.
    """
    if span.n_grid != grid.n_points:
        raise InvalidParameterError(
            f"window built on a {span.n_grid}-point grid, got {grid.n_points}"
        )
    indices = span.indices()
    parts = split_window(np.arange(indices.size), m_beams)

    angles = grid.angles[indices]
    responses = array_responses(angles, cfg)
    sines = np.sin(angles)
    gain = math.sqrt(cfg.n_elements)

    weights = np.column_stack([_design_beam(responses, sines, part, gain) for part in parts])

    logger.debug(
        "Measurement beams designed",
        extra={"window": (span.lo, span.hi), "beams": len(parts), "points": indices.size},
    )
    return Codebook(weights=weights, beamwidth_deg=beamwidth_deg, kind=CodebookKind.DESIGNED)
