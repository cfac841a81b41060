from __future__ import annotations

import logging

import numpy as np

from ice_beamsim.core.exceptions import InvalidParameterError
from ice_beamsim.core.types import Point

logger = logging.getLogger(__name__)


def perturb_position(true_pos: Point, sigma_m: float, rng: np.random.Generator) -> Point:
    """
    Position estimate reported by a localization service of error scale σ.

    Each coordinate is offset by a magnitude drawn from U[0, 2σ] with an
    independent random sign, so |δ| averages σ and never exceeds 2σ.
    """
    if not sigma_m >= 0.0:
        raise InvalidParameterError(f"sigma_m must be >= 0, got {sigma_m!r}")

    # always draw, so streams stay aligned across services
    magnitudes = rng.uniform(0.0, 2.0 * sigma_m, size=2)
    signs = np.where(rng.integers(0, 2, size=2) == 0, -1.0, 1.0)
    dx, dy = magnitudes * signs

    return (float(true_pos[0] + dx), float(true_pos[1] + dy))
