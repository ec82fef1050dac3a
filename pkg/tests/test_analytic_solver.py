import math

import numpy as np
import pytest

from conftest import smooth_state
from raman3nls.analytic_solver import (PicardConfig, choose_truncation, existence_time,
                                       free_evolution, gaussian_data, gaussian_truncation,
                                       origin_fit, picard_solve, psi_map, radius_weights,
                                       shifted_cubic, symmetric_grid, triple_norm)
from raman3nls.errors import NoContractionError, TruncationMismatchError
from raman3nls.integrator import Trajectory
from raman3nls.nonlinear_terms import rhs_full
from raman3nls.spectral_core import (EquationParams, SpectralState, ar_norm, cubic_product,
                                     equation_weight)

PARAMS = EquationParams(1, 0.4, 1, 1, 1)


@pytest.mark.parametrize("r, a, c, expected", [
    (1.0, 0.0, 1 / 64, 1.0), (2.0, 1.0, 1 / 64, 1 / 64), (0.5, 3.0, 1 / 64, 1 / 1152),
])
def test_existence_time(r, a, c, expected):
    assert existence_time(r, a, c) == pytest.approx(expected, rel=1e-15)


def test_gaussian_data_examples():
    g = gaussian_data(0.5, 8)
    assert g.mode(0) == 0.5
    assert g.mode(2) == pytest.approx(0.5 * math.exp(-1), rel=1e-15)
    with pytest.raises(ValueError):
        gaussian_data(0.0, 8)


@pytest.mark.parametrize("kwargs", [dict(r=0), dict(r=1, c=0), dict(r=1, c=2),
                                    dict(r=1, grid_points=64), dict(r=1, max_iter=1)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        PicardConfig(**kwargs)


def test_truncation_rule():
    assert gaussian_truncation(0.5) == 13
    # the rule stops at the first N with e^{rN/2} |u(N)| <= 1e-16 * norm
    assert choose_truncation(lambda n: math.exp(-n), 1.0, 1.0) == math.ceil(16 * math.log(10) / 0.5)


# --- norms and the Duhamel map -----------------------------------------------------

def test_triple_norm_trivial_trajectories():
    times = symmetric_grid(0.1, 5)
    u0 = gaussian_data(0.5, 12)
    zero = Trajectory(np.zeros((times.size, 25)), -0.1, times[1] - times[0], PARAMS)
    assert triple_norm(zero, 0.5, 0.1) == 0
    const = Trajectory(np.tile(u0.coeffs, (times.size, 1)), -0.1, times[1] - times[0], PARAMS)
    assert triple_norm(const, 0.5, 0.1) == pytest.approx(ar_norm(u0, 0.5), rel=1e-15)


def test_free_evolution_norm_identity():
    u0 = gaussian_data(0.5, 16)
    times = symmetric_grid(0.01, 33)
    free = free_evolution(u0, PARAMS, times)
    assert abs(triple_norm(free, 0.5, 0.01) - ar_norm(u0, 0.5)) <= 1e-12 * ar_norm(u0, 0.5)


def test_triple_norm_rejects_long_trajectory():
    times = symmetric_grid(0.2, 3)
    traj = Trajectory(np.zeros((5, 3)), -0.2, 0.1, PARAMS)
    with pytest.raises(ValueError):
        triple_norm(traj, 0.5, 0.1)


def test_radius_weights_shape_and_endpoints():
    w = radius_weights(0.5, 1.0, np.array([-1.0, 0.0, 1.0]), 4)
    assert w.shape == (3, 9)
    assert w[1, -1] == pytest.approx(math.exp(2.0))
    assert w[0, -1] == pytest.approx(math.exp(1.0))


def test_psi_map_trivial_cases():
    T = 0.01
    times = symmetric_grid(T, 9)  # 9 points per side, 17 in total
    zero_traj = Trajectory(np.zeros((times.size, 17), dtype=complex), -T, times[1] - times[0], PARAMS)
    out = psi_map(SpectralState.zeros(8), zero_traj, PARAMS, 0.5, T)
    assert not np.any(out.coeffs)
    u0 = gaussian_data(0.5, 8)
    out = psi_map(u0, zero_traj, PARAMS, 0.5, T)
    assert np.max(np.abs(out.coeffs - free_evolution(u0, PARAMS, times).coeffs)) < 1e-15
    with pytest.raises(TruncationMismatchError):
        psi_map(SpectralState.zeros(4), zero_traj, PARAMS, 0.5, T)


def test_shifted_cubic_without_shift_is_plain_cubic():
    rows = np.stack([smooth_state(10, s).coeffs for s in range(3)])
    got = shifted_cubic(rows, PARAMS, np.zeros(3))
    w = equation_weight(PARAMS)
    for j in range(3):
        u = SpectralState(rows[j], 10)
        assert np.max(np.abs(got[j] - cubic_product(u, u, u, w).coeffs)) < 1e-12


def test_shifted_cubic_is_independent_of_shift():
    rows = gaussian_data(0.5, 16).coeffs[None, :]
    a = shifted_cubic(rows, PARAMS, np.array([0.0]))
    b = shifted_cubic(rows, PARAMS, np.array([0.4]))
    assert np.max(np.abs(a - b)) < 1e-14


# --- certified solve ---------------------------------------------------------------------

def test_zero_data():
    res = picard_solve(SpectralState.zeros(8), PARAMS, PicardConfig(0.5))
    assert res.T_certified == 1.0
    assert not np.any(res.trajectory.coeffs)


# frozen after the first verified run (lambda = 0.5, r = lambda, N = 64)
FROZEN_T = 0.0006687660961355371
FROZEN_HISTORY = [0.002805155978877471, 0.002732447900384259, 0.002585748001126752, 0.0025070800438951766]
FROZEN_BALL = 3.4181001566984506


@pytest.fixture(scope="module")
def gaussian_run():
    return picard_solve(gaussian_data(0.5, 64), PARAMS, PicardConfig(0.5))


def test_gaussian_regression(gaussian_run):
    res = gaussian_run
    assert res.T_certified == pytest.approx(FROZEN_T, rel=1e-14)
    assert res.iterations == 5 and res.c_used == 1 / 64
    assert res.ball_norm == pytest.approx(FROZEN_BALL, rel=1e-12)
    # the last ratio divides differences near rounding level, hence the looser tolerance
    assert res.contraction_history[:3] == pytest.approx(FROZEN_HISTORY[:3], rel=1e-6)
    assert res.contraction_history[3] == pytest.approx(FROZEN_HISTORY[3], rel=1e-2)


def test_ball_stability_and_contraction(gaussian_run):
    res = gaussian_run
    assert all(b <= 2 * res.data_norm for b in res.ball_history)
    assert all(q <= 0.5 for q in res.contraction_history)


def test_radius_decay_realised(gaussian_run):
    res = gaussian_run
    T = res.T_certified
    times = res.trajectory.times
    w = radius_weights(0.5, T, times, 64)
    per_time = np.sum(w * np.abs(res.trajectory.coeffs), axis=1)
    assert np.all(np.isfinite(per_time)) and np.all(per_time <= 2 * res.data_norm)
    end = np.exp(0.25 * np.abs(res.trajectory.k)) * np.abs(res.trajectory.coeffs[[0, -1]])
    assert np.all(np.isfinite(end))


def test_limit_satisfies_equation():
    # fourth-order centred differences of the fixed point against the vector field
    res = picard_solve(gaussian_data(0.5, 16), PARAMS, PicardConfig(0.5, grid_points=129, c=1.0))
    c, h = res.trajectory.coeffs, res.trajectory.dt
    scale = np.max(np.abs(rhs_full(res.trajectory.state(128), PARAMS).coeffs))
    worst = 0.0
    for j in range(2, len(c) - 2):
        dc = (-c[j + 2] + 8 * c[j + 1] - 8 * c[j - 1] + c[j - 2]) / (12 * h)
        worst = max(worst, np.max(np.abs(dc - rhs_full(res.trajectory.state(j), PARAMS).coeffs)))
    assert worst / scale < 1e-5


def test_quadrature_convergence_order():
    u0 = gaussian_data(0.5, 16)
    runs = {g: picard_solve(u0, PARAMS, PicardConfig(0.5, grid_points=g, c=1.0)) for g in (33, 65, 129)}
    T = runs[33].T_certified
    for a, b in ((33, 65), (65, 129)):
        coarse, fine = runs[a].trajectory, runs[b].trajectory
        diff = Trajectory(coarse.coeffs - fine.coeffs[::2], -T, coarse.dt, PARAMS)
        assert triple_norm(diff, 0.5, T) <= 200.0 * a ** -4


def test_no_contraction_error():
    with pytest.raises(NoContractionError):
        picard_solve(gaussian_data(0.5, 16), PARAMS, PicardConfig(0.5, max_iter=2, max_halvings=1))


def test_origin_fit():
    slope, r2 = origin_fit([1, 2, 3], [2, 4, 6])
    assert slope == pytest.approx(2.0) and r2 == pytest.approx(1.0)
    assert origin_fit([1, 2, 3], [0, 0, 0])[1] == 1.0
    # constant nonzero data: nothing to explain, but the line through the origin misses it
    assert origin_fit([1, 2, 3], [1, 1, 1])[1] == 0.0
