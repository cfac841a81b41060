import math

import numpy as np
import pytest

from ice_beamsim.arrays.codebook import Codebook, CodebookKind, quantized_codebook
from ice_beamsim.arrays.steering import ArrayConfig, array_response
from ice_beamsim.channel.model import channel_matrix
from ice_beamsim.core.exceptions import InvalidParameterError
from ice_beamsim.core.types import ChannelRealization, Path
from ice_beamsim.sensing.grid import AngleGrid
from ice_beamsim.sensing.problem import (
    build_sensing_factors,
    implied_phi_column,
    sweep_measurements,
    vectorize,
)


def _random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_vec_kronecker_identity(rng):
    for _ in range(100):
        A, X, B = (_random_complex(rng, (4, 4)) for _ in range(3))
        lhs = vectorize(A @ X @ B)
        rhs = np.kron(B.T, A) @ vectorize(X)
        assert np.linalg.norm(lhs - rhs) < 1e-10

    A = _random_complex(rng, (3, 5))
    X = _random_complex(rng, (5, 4))
    B = _random_complex(rng, (4, 2))
    assert np.max(np.abs(vectorize(A @ X @ B) - np.kron(B.T, A) @ vectorize(X))) < 1e-10


def test_factored_phi_matches_dense_dictionary():
    grid = AngleGrid(4)
    cfg = ArrayConfig(4)
    W_tx, W_rx = quantized_codebook(4, 4), quantized_codebook(4, 4)
    P = 2.5
    problem = build_sensing_factors(W_tx, W_rx, grid, cfg, cfg, P)

    dense = math.sqrt(P) * np.kron(W_tx.weights.T, W_rx.weights.conj().T)
    for u in range(4):
        for v in range(4):
            t_d = vectorize(
                np.outer(array_response(grid.angle(v), cfg), array_response(grid.angle(u), cfg).conj())
            )
            assert np.max(np.abs(implied_phi_column(problem, u, v) - dense @ t_d)) < 1e-12


def test_on_grid_channel_is_a_scaled_atom(rng):
    grid = AngleGrid(16)
    ap, ue = ArrayConfig(8), ArrayConfig(6)
    W_tx, W_rx = quantized_codebook(8, 8), quantized_codebook(6, 4)
    u, v, gain = 3, 11, 0.7 - 0.2j
    H = gain * np.outer(array_response(grid.angle(v), ue), array_response(grid.angle(u), ap).conj())

    Y = sweep_measurements(H, W_tx, W_rx, 4.0, 0.0, rng)
    problem = build_sensing_factors(W_tx, W_rx, grid, ap, ue, 4.0).with_measurements(Y)
    assert Y.shape == (4, 8)
    assert np.allclose(problem.y_v, gain * implied_phi_column(problem, u, v))


def test_noise_per_slot_has_receive_beam_power(rng):
    W = quantized_codebook(4, 4)
    Y = np.stack([sweep_measurements(np.zeros((4, 4)), W, W, 0.0, 1.0, rng) for _ in range(4000)])
    assert abs(np.mean(np.abs(Y) ** 2) - 1.0) < 0.05
    # fresh draw per slot
    assert not np.allclose(Y[0, 0, 0], Y[0, 1, 1])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"tx_power": -1.0, "noise_stddev": 0.0},
        {"tx_power": 1.0, "noise_stddev": -0.1},
    ],
)
def test_sweep_rejects_negative_parameters(rng, kwargs):
    W = quantized_codebook(4, 4)
    with pytest.raises(InvalidParameterError):
        sweep_measurements(np.zeros((4, 4)), W, W, rng=rng, **kwargs)


def test_sweep_rejects_shape_mismatch(rng):
    W = quantized_codebook(4, 4)
    with pytest.raises(InvalidParameterError):
        sweep_measurements(np.zeros((4, 5)), W, W, 1.0, 0.0, rng)


def test_build_factors_validates_inputs():
    W = quantized_codebook(4, 4)
    cfg = ArrayConfig(4)
    with pytest.raises(InvalidParameterError):
        build_sensing_factors(W, W, AngleGrid(1), cfg, cfg, 1.0)
    with pytest.raises(InvalidParameterError):
        build_sensing_factors(W, W, AngleGrid(8), ArrayConfig(5), cfg, 1.0)


def test_implied_column_rejects_out_of_range_index():
    W = quantized_codebook(4, 4)
    cfg = ArrayConfig(4)
    problem = build_sensing_factors(W, W, AngleGrid(8), cfg, cfg, 1.0)
    with pytest.raises(InvalidParameterError):
        implied_phi_column(problem, 8, 0)


def test_grid_helpers():
    grid = AngleGrid(72)
    assert grid.nearest(math.pi / 2) == 18
    assert grid.nearest(2 * math.pi - 1e-6) == 0
    assert grid.wrap(-1) == 71
    assert grid.snap(17.9999999999) == 18.0
    assert grid.snap(17.5) == 17.5


def test_noiseless_sweep_is_linear_in_channel(rng):
    W_tx, W_rx = quantized_codebook(8, 8), quantized_codebook(6, 4)
    H1, H2 = _random_complex(rng, (6, 8)), _random_complex(rng, (6, 8))

    def sweep(H):
        return sweep_measurements(H, W_tx, W_rx, 2.0, 0.0, rng)

    assert np.max(np.abs(sweep(H1 + H2) - (sweep(H1) + sweep(H2)))) < 1e-10
    assert np.max(np.abs(sweep(-3.0j * H1) - (-3.0j) * sweep(H1))) < 1e-10


def test_matched_beams_measure_full_array_gain(rng):
    ap, ue = ArrayConfig(64), ArrayConfig(16)
    path_loss = 125.0
    realization = ChannelRealization(
        paths=(Path(gain=1.0 + 0.0j, aod=0.0, aoa=0.0),),
        path_loss=path_loss,
        ap_position=(0.0, 0.0),
        ue_position=(5.0, 0.0),
    )
    H = channel_matrix(realization, ap, ue)
    W_tx = Codebook(array_response(0.0, ap)[:, None] / 8.0, 360.0, CodebookKind.DESIGNED)
    W_rx = Codebook(array_response(0.0, ue)[:, None] / 4.0, 360.0, CodebookKind.DESIGNED)

    Y = sweep_measurements(H, W_tx, W_rx, 1.0, 0.0, rng)
    assert Y.shape == (1, 1)
    assert abs(Y[0, 0] - math.sqrt(64 * 16) / path_loss) < 1e-12


def test_factored_columns_match_dense_for_random_codebooks(rng):
    grid = AngleGrid(6)
    ap, ue = ArrayConfig(7), ArrayConfig(5)
    w_tx = _random_complex(rng, (7, 3))
    w_rx = _random_complex(rng, (5, 4))
    W_tx = Codebook(w_tx / np.linalg.norm(w_tx, axis=0), 120.0, CodebookKind.DESIGNED)
    W_rx = Codebook(w_rx / np.linalg.norm(w_rx, axis=0), 90.0, CodebookKind.DESIGNED)
    problem = build_sensing_factors(W_tx, W_rx, grid, ap, ue, 1.0)

    dense = np.kron(W_tx.weights.T, W_rx.weights.conj().T)
    for u in range(6):
        for v in range(6):
            t_d = vectorize(
                np.outer(array_response(grid.angle(v), ue), array_response(grid.angle(u), ap).conj())
            )
            assert np.max(np.abs(implied_phi_column(problem, u, v) - dense @ t_d)) < 1e-12
