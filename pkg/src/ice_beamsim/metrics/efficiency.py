from __future__ import annotations

import math

import numpy as np

from ice_beamsim.core.exceptions import InvalidParameterError


def beamforming_gain(H: np.ndarray, w_tx: np.ndarray, w_rx: np.ndarray) -> float:
    """|w_rxᴴ H w_tx|²."""
    H = np.asarray(H, dtype=complex)
    w_tx = np.asarray(w_tx).reshape(-1)
    w_rx = np.asarray(w_rx).reshape(-1)
    if H.shape != (w_rx.size, w_tx.size):
        raise InvalidParameterError(
            f"H has shape {H.shape}, beams need ({w_rx.size}, {w_tx.size})"
        )
    return float(abs(np.vdot(w_rx, H @ w_tx)) ** 2)


def spectral_efficiency(
    H: np.ndarray,
    w_tx: np.ndarray,
    w_rx: np.ndarray,
    tx_power: float,
    noise_power: float,
) -> float:
    """
    log2(1 + P·|w_rxᴴ H w_tx|² / ρ²) in bit/s/Hz.
    """
    if not noise_power > 0.0:
        raise InvalidParameterError(f"noise_power must be > 0, got {noise_power!r}")
    if not tx_power >= 0.0:
        raise InvalidParameterError(f"tx_power must be >= 0, got {tx_power!r}")
    return math.log2(1.0 + tx_power * beamforming_gain(H, w_tx, w_rx) / noise_power)
