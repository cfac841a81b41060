from __future__ import annotations

"""
Beamforming codebooks.

Scope:
- Codebook container (one unit-norm beam per column)
- 2-bit phase-quantized steering codebook (IEEE 802.15.3c style)
- Beam lookup toward a given direction

⚠️ NOT here:
- Window-constrained measurement beams (see ice_beamsim.locbf.beams)
"""

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from ice_beamsim.arrays.steering import ArrayConfig, beam_gains
from ice_beamsim.core.exceptions import InvalidParameterError

# j^e for e = 0..3, exact values
_QUARTER_TURNS = np.array([1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j])

_NORM_TOL = 1e-9


class CodebookKind(str, Enum):
    QUANTIZED = "quantized"
    DESIGNED = "designed"


# ======================================================================
# CODEBOOK
# ======================================================================

@dataclass(frozen=True, eq=False)
class Codebook:
    """
    N × B weight matrix, one steering beam per column.

    All columns carry the same Euclidean norm, so transmit power lives in P
    and never in the weights.
    """
    weights: np.ndarray
    beamwidth_deg: float
    kind: CodebookKind

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=complex)
        if w.ndim != 2 or w.shape[1] == 0:
            raise InvalidParameterError(f"codebook weights must be N × B, got {w.shape}")

        norms = np.linalg.norm(w, axis=0)
        if np.max(np.abs(norms - norms[0])) > _NORM_TOL:
            raise InvalidParameterError("codebook columns must share one Euclidean norm")

        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_elements(self) -> int:
        return int(self.weights.shape[0])

    @property
    def n_beams(self) -> int:
        return int(self.weights.shape[1])

    def beam(self, b: int) -> np.ndarray:
        if not 0 <= b < self.n_beams:
            raise InvalidParameterError(f"beam index {b} outside [0, {self.n_beams})")
        return self.weights[:, b]

    def subset(self, indices: Sequence[int]) -> Codebook:
        """Codebook made of the selected columns, in the given order."""
        return Codebook(
            weights=self.weights[:, list(indices)],
            beamwidth_deg=self.beamwidth_deg,
            kind=self.kind,
        )


# ======================================================================
# QUANTIZED CODEBOOK
# ======================================================================

def quantized_phases(n_elements: int, n_beams: int) -> np.ndarray:
    """
    Quarter-turn exponents e(n, b) with W(n, b) = j^e before normalization.

    e = floor(n · mod(b + B/2, B) / (B/4)), evaluated as floor(4·n·m / B)
    so no floating point is involved, then reduced mod 4.
    """
    if n_elements < 1:
        raise InvalidParameterError(f"n_elements must be >= 1, got {n_elements}")
    if n_beams < 1 or n_beams % 2:
        raise InvalidParameterError(f"n_beams must be a positive even integer, got {n_beams}")

    n = np.arange(n_elements)[:, None]
    m = (np.arange(n_beams)[None, :] + n_beams // 2) % n_beams
    return ((4 * n * m) // n_beams) % 4


def quantized_codebook(
    n_elements: int,
    n_beams: int,
    beamwidth_deg: float | None = None,
) -> Codebook:
    """
    Phase-quantized steering codebook with unit-norm columns.

    Entries are {1, j, -1, -j} / √N. Beam b points at sin θ = 2b/B − 1.
    """
    phases = quantized_phases(n_elements, n_beams)
    weights = _QUARTER_TURNS[phases] / np.sqrt(n_elements)
    return Codebook(
        weights=weights,
        beamwidth_deg=360.0 / n_beams if beamwidth_deg is None else float(beamwidth_deg),
        kind=CodebookKind.QUANTIZED,
    )


# ======================================================================
# LOOKUP
# ======================================================================

def steer_codebook(codebook: Codebook, angle: float, cfg: ArrayConfig) -> int:
    """
    Index of the beam with the largest |wᴴ p(angle)|; ties go to the smallest index.
    """
    gains = np.abs(beam_gains(codebook.weights, np.array([angle]), cfg)[:, 0])
    return int(np.argmax(gains))


def best_beams_over(
    codebook: Codebook,
    angles: np.ndarray,
    cfg: ArrayConfig,
) -> list[int]:
    """
    Sorted, de-duplicated set of beams that win `steer_codebook` for at least
    one of `angles`.
    """
    gains = np.abs(beam_gains(codebook.weights, angles, cfg))
    winners = np.argmax(gains, axis=0)
    return sorted({int(b) for b in winners})
