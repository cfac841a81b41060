from __future__ import annotations

"""
ULA steering vectors and beam projections.

Scope:
- Array geometry (element count, spacing)
- Array response p(θ) of a uniform linear array
- Projection of beam weights onto steering vectors

⚠️ IMPORTANT:
- Azimuth only. Elevation is never modeled.
- Projection convention is wᴴ p(θ) everywhere in the package.
"""

import math
from dataclasses import dataclass

import numpy as np

from ice_beamsim.core.exceptions import InvalidParameterError

TWO_PI = 2.0 * math.pi


# ======================================================================
# ARRAY CONFIG
# ======================================================================

@dataclass(frozen=True)
class ArrayConfig:
    """
    Uniform linear array description.

    spacing_wavelengths is d/λ; half-wavelength spacing is the default.
    """
    n_elements: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        if int(self.n_elements) != self.n_elements or self.n_elements < 1:
            raise InvalidParameterError(
                f"n_elements must be a positive integer, got {self.n_elements!r}"
            )
        if not 0.0 < self.spacing_wavelengths <= 1.0:
            raise InvalidParameterError(
                f"spacing_wavelengths must lie in (0, 1], got {self.spacing_wavelengths!r}"
            )


# ======================================================================
# ARRAY RESPONSE
# ======================================================================

def wrap_angle(angle: float) -> float:
    """Map an angle into [0, 2π)."""
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # -1e-18 + 2π rounds to 2π
    return 0.0 if wrapped >= TWO_PI else wrapped


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    wrapped = np.mod(np.asarray(angles, dtype=float), TWO_PI)
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


def array_response(angle: float, cfg: ArrayConfig) -> np.ndarray:
    """
    Steering vector of the array toward `angle`.

    Entry k is exp(j·k·2π·(d/λ)·sin(angle)); entry 0 is exactly 1.
    """
    theta = wrap_angle(float(angle))
    k = np.arange(cfg.n_elements)
    return np.exp(1j * k * TWO_PI * cfg.spacing_wavelengths * math.sin(theta))


def array_responses(angles: np.ndarray, cfg: ArrayConfig) -> np.ndarray:
    """
    Steering vectors for several angles, one per column (N × K).
    """
    theta = wrap_angles(np.asarray(angles, dtype=float).reshape(-1))
    k = np.arange(cfg.n_elements)[:, None]
    return np.exp(1j * k * TWO_PI * cfg.spacing_wavelengths * np.sin(theta)[None, :])


# ======================================================================
# PROJECTIONS
# ======================================================================

def beam_gain(weights: np.ndarray, angle: float, cfg: ArrayConfig) -> complex:
    """
    Projection wᴴ p(angle) of one beam onto the steering vector.
    """
    w = np.asarray(weights).reshape(-1)
    if w.size != cfg.n_elements:
        raise InvalidParameterError(
            f"weights length {w.size} does not match n_elements={cfg.n_elements}"
        )
    return complex(np.vdot(w, array_response(angle, cfg)))


def beam_gains(weights: np.ndarray, angles: np.ndarray, cfg: ArrayConfig) -> np.ndarray:
    """
    Projections of every column of `weights` (N × B) onto every angle (K),
    returned as a B × K matrix.
    """
    w = np.asarray(weights)
    if w.ndim == 1:
        w = w[:, None]
    if w.shape[0] != cfg.n_elements:
        raise InvalidParameterError(
            f"weights have {w.shape[0]} rows, expected n_elements={cfg.n_elements}"
        )
    return w.conj().T @ array_responses(angles, cfg)
