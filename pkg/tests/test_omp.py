import numpy as np
import pytest

from ice_beamsim.arrays.codebook import Codebook, CodebookKind, quantized_codebook
from ice_beamsim.arrays.steering import ArrayConfig, array_response, array_responses
from ice_beamsim.core.config import OmpConfig
from ice_beamsim.core.exceptions import DegenerateInputError, InvalidParameterError
from ice_beamsim.recovery.omp import atom_norms, correlate_all, solve
from ice_beamsim.sensing.grid import AngleGrid
from ice_beamsim.sensing.problem import build_sensing_factors, implied_phi_column

N_GRID = 16
N_ANT = 64


def _identity_codebook(n: int) -> Codebook:
    return Codebook(np.eye(n, dtype=complex), 360.0 / n, CodebookKind.DESIGNED)


def _alias_classes(grid: AngleGrid, cfg: ArrayConfig) -> list[int]:
    """Smallest grid index sharing each point's steering vector."""
    P = array_responses(grid.angles, cfg)
    classes = []
    for k in range(grid.n_points):
        same = [j for j in range(k + 1) if np.allclose(P[:, j], P[:, k])]
        classes.append(same[0])
    return classes


def _on_grid_problem(pairs, gains):
    grid = AngleGrid(N_GRID)
    cfg = ArrayConfig(N_ANT)
    W = _identity_codebook(N_ANT)
    H = sum(
        g * np.outer(array_response(grid.angle(v), cfg), array_response(grid.angle(u), cfg).conj())
        for (u, v), g in zip(pairs, gains)
    )
    problem = build_sensing_factors(W, W, grid, cfg, cfg, 1.0)
    return problem.with_measurements(H), grid, cfg


def test_correlation_matches_explicit_columns(rng):
    grid = AngleGrid(8)
    cfg = ArrayConfig(6)
    W_tx, W_rx = quantized_codebook(6, 4), quantized_codebook(6, 6)
    problem = build_sensing_factors(W_tx, W_rx, grid, cfg, cfg, 3.0)
    r = rng.standard_normal(24) + 1j * rng.standard_normal(24)

    corr = correlate_all(problem, r)
    for u in range(8):
        for v in range(8):
            assert np.isclose(corr[u, v], abs(np.vdot(implied_phi_column(problem, u, v), r)))

    norms = atom_norms(problem)
    assert np.isclose(norms[2, 5], np.linalg.norm(implied_phi_column(problem, 2, 5)))

    with pytest.raises(InvalidParameterError):
        correlate_all(problem, r[:-1])


def test_on_grid_noiseless_recovery_rate():
    rng = np.random.default_rng(2024)
    grid, cfg = AngleGrid(N_GRID), ArrayConfig(N_ANT)
    classes = _alias_classes(grid, cfg)

    successes, cases = 0, 0
    for n_paths in (1, 2):
        for _ in range(100):
            pairs = []
            while len(pairs) < n_paths:
                u, v = (int(x) for x in rng.integers(0, N_GRID, 2))
                key = (classes[u], classes[v])
                if key not in {(classes[a], classes[b]) for a, b in pairs}:
                    pairs.append((u, v))
            gains = rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)

            problem, _, _ = _on_grid_problem(pairs, gains)
            sol = solve(problem, OmpConfig(max_atoms=n_paths, residual_tol=1e-9))

            found = {(classes[u], classes[v]) for u, v in sol.support}
            truth = {(classes[u], classes[v]) for u, v in pairs}
            successes += found == truth
            cases += 1

    assert successes / cases >= 0.95


def test_residual_is_monotone_and_orthogonal(rng):
    grid = AngleGrid(12)
    cfg = ArrayConfig(8)
    W = quantized_codebook(8, 8)
    problem = build_sensing_factors(W, W, grid, cfg, cfg, 1.0)
    y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    problem = problem.with_measurements(y)

    sol = solve(problem, OmpConfig(max_atoms=6, residual_tol=0.0))
    history = np.array(sol.residual_history)
    assert np.all(np.diff(history) <= 1e-9 * history[0])
    assert len(set(sol.support)) == len(sol.support)

    atoms = np.column_stack([implied_phi_column(problem, u, v) for u, v in sol.support])
    residual = y - atoms @ sol.gains
    assert np.isclose(np.linalg.norm(residual), sol.residual_norm)
    bound = 1e-6 * np.linalg.norm(y) * np.linalg.norm(atoms)
    assert np.max(np.abs(atoms.conj().T @ residual)) < bound


def test_solve_is_deterministic():
    problem, _, _ = _on_grid_problem([(3, 5), (9, 1)], [1.0, 0.5j])
    a = solve(problem, OmpConfig(max_atoms=2))
    b = solve(problem, OmpConfig(max_atoms=2))
    assert a.support == b.support
    assert np.array_equal(a.gains, b.gains)


def test_zero_measurements_give_empty_support():
    grid = AngleGrid(8)
    cfg = ArrayConfig(4)
    W = quantized_codebook(4, 4)
    sol = solve(build_sensing_factors(W, W, grid, cfg, cfg, 1.0), OmpConfig())
    assert sol.is_empty
    assert sol.residual_norm == 0.0


def test_zero_sensing_matrix_is_degenerate():
    grid = AngleGrid(8)
    cfg = ArrayConfig(4)
    W = quantized_codebook(4, 4)
    problem = build_sensing_factors(W, W, grid, cfg, cfg, 0.0).with_measurements(np.ones(16))
    with pytest.raises(DegenerateInputError):
        solve(problem, OmpConfig())


def test_too_many_atoms_rejected():
    grid = AngleGrid(2)
    cfg = ArrayConfig(4)
    W = quantized_codebook(4, 4)
    problem = build_sensing_factors(W, W, grid, cfg, cfg, 1.0).with_measurements(np.ones(16))
    with pytest.raises(InvalidParameterError):
        solve(problem, OmpConfig(max_atoms=5))
