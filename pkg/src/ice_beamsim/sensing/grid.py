from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ice_beamsim.arrays.steering import TWO_PI, wrap_angle
from ice_beamsim.core.exceptions import InvalidParameterError


@dataclass(frozen=True)
class AngleGrid:
    """
    Uniform quantization of [0, 2π) into N points 2πk/N.
    """
    n_points: int

    def __post_init__(self) -> None:
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise InvalidParameterError(f"grid needs n_points >= 1, got {self.n_points!r}")

    @property
    def step(self) -> float:
        return TWO_PI / self.n_points

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_points) / self.n_points

    def angle(self, k: int) -> float:
        return TWO_PI * self.wrap(k) / self.n_points

    def wrap(self, k: int) -> int:
        return int(k) % self.n_points

    def nearest(self, angle: float) -> int:
        return self.wrap(int(round(wrap_angle(angle) / self.step)))

    def check_index(self, k: int, name: str = "index") -> None:
        if not 0 <= k < self.n_points:
            raise InvalidParameterError(f"{name} {k} outside grid [0, {self.n_points})")

    def snap(self, position: float, tol: float = 1e-9) -> float:
        """Round a fractional grid position when it sits on a grid point."""
        nearest = round(position)
        return float(nearest) if math.isclose(position, nearest, abs_tol=tol) else position
