from __future__ import annotations

"""
Orthogonal matching pursuit on the factored sensing problem.

Pipeline (one iteration):
correlate residual with all N² atoms → pick the largest → refit by least
squares on the active set → update residual

⚠️ IMPORTANT:
- Atoms are never materialized as a matrix; correlations go through the
  two factor matrices.
- Ties are broken by the smallest (u, v), so solutions are deterministic.
"""

import logging
from typing import List, Tuple

import numpy as np
import scipy.linalg

from ice_beamsim.core.config import OmpConfig
from ice_beamsim.core.exceptions import DegenerateInputError, InvalidParameterError
from ice_beamsim.core.types import SparseSolution
from ice_beamsim.sensing.problem import SensingProblem, implied_phi_column

logger = logging.getLogger(__name__)

_RIDGE = 1e-12


# ======================================================================
# CORRELATION
# ======================================================================

def correlate_all(problem: SensingProblem, residual: np.ndarray) -> np.ndarray:
    """
    N × N matrix of |Φ_{uv}ᴴ r|, indexed [u, v].

    With R the residual reshaped to M_rx × M_tx (column-major),
    Φ_{uv}ᴴ r = √P · (phi_rxᴴ R conj(phi_tx))[v, u].
    """
    r = np.asarray(residual, dtype=complex).reshape(-1)
    if r.size != problem.y_v.size:
        raise InvalidParameterError(
            f"residual has {r.size} entries, expected {problem.y_v.size}"
        )
    R = r.reshape(problem.m_rx, problem.m_tx, order="F")
    corr = problem.phi_rx_factor.conj().T @ R @ problem.phi_tx_factor.conj()
    return problem.scale * np.abs(corr).T


def atom_norms(problem: SensingProblem) -> np.ndarray:
    """N × N matrix of ‖Φ_{uv}‖ = √P ‖phi_tx[:, u]‖ ‖phi_rx[:, v]‖."""
    tx = np.linalg.norm(problem.phi_tx_factor, axis=0)
    rx = np.linalg.norm(problem.phi_rx_factor, axis=0)
    return problem.scale * np.outer(tx, rx)


# ======================================================================
# SOLVER
# ======================================================================

def _least_squares(atoms: np.ndarray, y: np.ndarray) -> np.ndarray:
    gram = atoms.conj().T @ atoms
    ridge = _RIDGE * float(np.real(np.trace(gram)))
    gram = gram + ridge * np.eye(gram.shape[0])
    return scipy.linalg.solve(gram, atoms.conj().T @ y, assume_a="her")


def solve(problem: SensingProblem, cfg: OmpConfig) -> SparseSolution:
    """
    Recover up to `cfg.max_atoms` (AoD, AoA) grid pairs and their gains.
    """
    n = problem.grid.n_points
    if cfg.max_atoms > n * n:
        raise InvalidParameterError(
            f"max_atoms={cfg.max_atoms} exceeds the {n * n} grid atoms"
        )

    y = problem.y_v
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        return SparseSolution(
            support=(),
            gains=np.zeros(0, dtype=complex),
            residual_norm=0.0,
            residual_history=(0.0,),
        )

    usable = atom_norms(problem) > 0.0
    if not usable.any():
        raise DegenerateInputError("sensing matrix has no nonzero column")

    support: List[Tuple[int, int]] = []
    atoms = np.zeros((y.size, 0), dtype=complex)
    gains = np.zeros(0, dtype=complex)
    residual = y.copy()
    history = [y_norm]

    while len(support) < cfg.max_atoms and history[-1] > cfg.residual_tol * y_norm:
        corr = correlate_all(problem, residual)
        corr[~usable] = -1.0
        for u, v in support:
            corr[u, v] = -1.0

        # row-major argmax: smallest u, then smallest v, among equal maxima
        flat = int(np.argmax(corr))
        if corr.flat[flat] < 0.0:
            break
        u, v = divmod(flat, n)

        support.append((u, v))
        atoms = np.column_stack([atoms, implied_phi_column(problem, u, v)])
        gains = _least_squares(atoms, y)
        residual = y - atoms @ gains
        history.append(float(np.linalg.norm(residual)))

        logger.debug(
            "OMP iteration",
            extra={"atom": (u, v), "residual": history[-1], "iteration": len(support)},
        )

    return SparseSolution(
        support=tuple(support),
        gains=gains,
        residual_norm=history[-1],
        residual_history=tuple(history),
    )
