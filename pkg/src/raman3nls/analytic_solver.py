"""Fixed-point solver for the integral equation in the analytic class A(r).

The Duhamel map

    Psi[u0](u)(t) = U(t) u0 + int_0^t U(t - s) N(u(s)) ds,   U(t) = exp(-i omega t)

is iterated on the symmetric grid t_j = j T / m, |j| <= m, in the norm

    |||u|||_{r,T} = sum_k sup_{|t|<=T} exp(r (1 - |t|/(2T)) |k|) |u_hat(t, k)|

with the sup taken over grid times. The existence time starts at
T = c min(1, r) / ||u0||_{A(r)}^2 and c is halved whenever a step fails to
stay in the ball of radius 2 ||u0||_{A(r)} or to contract by 1/2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import NoContractionError, WeightOverflowError
from .integrator import Trajectory
from .spectral_core import (EquationParams, SpectralState, ar_norm, check_weight, dispersion,
                            equation_weight, fast_cubic_coeffs)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PicardConfig:
    r: float
    c: float = 1.0 / 64.0
    grid_points: int = 65
    tol: float = 1e-12
    max_iter: int = 100
    max_halvings: int = 8

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not 0 < self.c <= 1:
            raise ValueError("c must lie in (0, 1]")
        if self.grid_points < 3 or self.grid_points % 2 == 0:
            raise ValueError("grid_points must be odd and at least 3")
        if self.max_iter < 2:
            raise ValueError("max_iter must be at least 2")


@dataclass(frozen=True, eq=False)
class PicardResult:
    T_certified: float
    trajectory: Trajectory
    contraction_history: list[float]
    ball_norm: float
    data_norm: float
    c_used: float
    iterations: int
    fixed_point_residual: float
    ball_history: list[float] = field(default_factory=list)

    @property
    def final_ratio(self) -> float:
        return self.contraction_history[-1] if self.contraction_history else 0.0


def existence_time(r: float, a_norm: float, c: float) -> float:
    """c min(1, r) / a_norm^2, with T = 1 for zero data."""
    if a_norm < 0:
        raise ValueError("a_norm must be non-negative")
    if a_norm == 0:
        return 1.0
    return c * min(1.0, r) / a_norm ** 2


def symmetric_grid(T: float, grid_points: int) -> np.ndarray:
    m = grid_points - 1
    return T * np.arange(-m, m + 1) / m


def radius_weights(r: float, T: float, times: np.ndarray, N: int) -> np.ndarray:
    """exp(r (1 - |t|/(2T)) |k|) on the (time, mode) grid."""
    check_weight(r, N)
    k = np.abs(np.arange(-N, N + 1))
    return np.exp(r * (1.0 - np.abs(times)[:, None] / (2.0 * T)) * k[None, :])


def triple_norm(traj: Trajectory, r: float, T: float) -> float:
    """Sum over k of the sup over stored times of the shrinking-radius weighted modulus."""
    return _triple_norm_coeffs(traj.coeffs, traj.times, r, T)


def _triple_norm_coeffs(coeffs: np.ndarray, times: np.ndarray, r: float, T: float) -> float:
    if not np.all(np.abs(times) <= T * (1 + 1e-12)):
        raise ValueError("trajectory extends beyond [-T, T]")
    w = radius_weights(r, T, times, (coeffs.shape[1] - 1) // 2)
    return float(np.sum(np.max(w * np.abs(coeffs), axis=0)))


# ---------------------------------------------------------------------------
# the Duhamel map
# ---------------------------------------------------------------------------

def shifted_cubic(coeffs: np.ndarray, params: EquationParams, sigma: np.ndarray) -> np.ndarray:
    """Cubic nonlinearity of each row of ``coeffs``, evaluated on shifted contours.

    Modes k >= 0 come from the contour Im x = -sigma (coefficients scaled by
    e^{sigma k}), modes k < 0 from Im x = +sigma. The result is the same
    Galerkin sum as the unshifted product, but the FFT rounding error in mode
    k is damped by e^{-sigma |k|}, which keeps it below the A(r) weights.
    """
    N = (coeffs.shape[1] - 1) // 2
    k = np.arange(-N, N + 1)
    weight = equation_weight(params)
    out = np.empty_like(coeffs)
    for sign, sel in ((1.0, k >= 0), (-1.0, k < 0)):
        up = np.exp(sign * sigma[:, None] * k[None, :])
        down = np.exp(-sign * sigma[:, None] * k[None, :])
        scaled = up * coeffs
        res = fast_cubic_coeffs(scaled, down * coeffs, scaled, weight)
        out[:, sel] = (down * res)[:, sel]
    return out


def _cumulative_from_center(f: np.ndarray, h: float) -> np.ndarray:
    """int_0^{t_j} f on the symmetric grid, by cumulative Simpson outward from t = 0."""
    m = (f.shape[0] - 1) // 2
    out = np.zeros_like(f)
    out[m:] = _complex_cumulative(f[m:], h)
    out[:m + 1] = _complex_cumulative(f[m::-1], -h)[::-1]
    return out


def _complex_cumulative(f: np.ndarray, h: float) -> np.ndarray:
    # scipy's cumulative_simpson drops imaginary parts, so integrate them separately
    re = cumulative_simpson(f.real, dx=h, axis=0, initial=0.0)
    im = cumulative_simpson(f.imag, dx=h, axis=0, initial=0.0)
    return re + 1j * im


def _psi_coeffs(u0c, coeffs, params, r, T, times) -> np.ndarray:
    N = (coeffs.shape[1] - 1) // 2
    omega = dispersion(params, np.arange(-N, N + 1))
    sigma = r * (1.0 - np.abs(times) / (2.0 * T))
    nl = shifted_cubic(coeffs, params, sigma)
    forward = np.exp(1j * omega[None, :] * times[:, None])
    h = times[1] - times[0]
    integral = _cumulative_from_center(forward * nl, h)
    return np.conj(forward) * (u0c[None, :] + integral)


def psi_map(u0: SpectralState, traj: Trajectory, params: EquationParams, r: float,
            T: float) -> Trajectory:
    """One application of the Duhamel map on the trajectory's symmetric grid."""
    if traj.trunc != u0.trunc:
        from .errors import TruncationMismatchError
        raise TruncationMismatchError(f"truncations differ: {u0.trunc} vs {traj.trunc}")
    if len(traj) % 2 == 0 or not math.isclose(traj.t0, -T, rel_tol=1e-12, abs_tol=1e-300):
        raise ValueError("trajectory must sit on a symmetric grid over [-T, T]")
    check_weight(r, u0.trunc)
    times = traj.times
    return Trajectory(_psi_coeffs(u0.coeffs, traj.coeffs, params, r, T, times), -T, traj.dt, params)


def free_evolution(u0: SpectralState, params: EquationParams, times: np.ndarray,
                   t0: float | None = None) -> Trajectory:
    omega = dispersion(params, u0.k)
    coeffs = np.exp(-1j * omega[None, :] * times[:, None]) * u0.coeffs[None, :]
    dt = times[1] - times[0] if times.size > 1 else 0.0
    return Trajectory(coeffs, times[0] if t0 is None else t0, dt, params)


# ---------------------------------------------------------------------------
# iteration with certification
# ---------------------------------------------------------------------------

class _Rejected(Exception):
    pass


def _attempt(u0, params, cfg, c):
    A = ar_norm(u0, cfg.r)
    T = existence_time(cfg.r, A, c)
    times = symmetric_grid(T, cfg.grid_points)
    current = free_evolution(u0, params, times).coeffs
    radius = 2.0 * A
    history, balls = [], []
    prev = None
    for it in range(1, cfg.max_iter + 1):
        new = _psi_coeffs(u0.coeffs, current, params, cfg.r, T, times)
        if not np.all(np.isfinite(new)):
            raise _Rejected("non-finite iterate")
        ball = _triple_norm_coeffs(new, times, cfg.r, T)
        balls.append(ball)
        if ball > radius * (1 + 1e-12):
            raise _Rejected(f"iterate left the ball: {ball:.6g} > {radius:.6g}")
        diff = _triple_norm_coeffs(new - current, times, cfg.r, T)
        if prev is not None and prev > 0:
            ratio = diff / prev
            history.append(ratio)
            if ratio > 0.5:
                raise _Rejected(f"contraction ratio {ratio:.3g} exceeds 1/2 at iteration {it}")
        current = new
        if diff <= cfg.tol * max(1.0, ball):
            traj = Trajectory(current, -T, times[1] - times[0], params)
            return PicardResult(T, traj, history, ball, A, c, it, diff, balls)
        prev = diff
    raise _Rejected(f"no convergence within {cfg.max_iter} iterations")


def picard_solve(u0: SpectralState, params: EquationParams, cfg: PicardConfig) -> PicardResult:
    """Certified fixed point of the Duhamel map on [-T, T]."""
    check_weight(cfg.r, u0.trunc)
    if ar_norm(u0, cfg.r) == 0:
        times = symmetric_grid(1.0, cfg.grid_points)
        traj = Trajectory(np.zeros((times.size, u0.coeffs.size), dtype=np.complex128), -1.0,
                          times[1] - times[0], params)
        return PicardResult(1.0, traj, [], 0.0, 0.0, cfg.c, 0, 0.0, [])
    c = cfg.c
    reasons = []
    for attempt in range(cfg.max_halvings + 1):
        try:
            return _attempt(u0, params, cfg, c)
        except _Rejected as exc:
            reasons.append(f"c={c:g}: {exc}")
            log.info("picard attempt rejected (%s); halving c", exc)
            c /= 2.0
    raise NoContractionError("; ".join(reasons))


# ---------------------------------------------------------------------------
# Gaussian data and the existence-time scan
# ---------------------------------------------------------------------------

def gaussian_data(lam: float, N: int) -> SpectralState:
    """Coefficients lam * exp(-lam^2 k^2) of the rescaled periodic Gaussian."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    k = np.arange(-N, N + 1)
    return SpectralState(lam * np.exp(-(lam * k) ** 2), N)


def choose_truncation(coeff_abs, r: float, norm: float, n_max: int | None = None) -> int:
    """Smallest N with e^{(r/2) N} |u0_hat(N)| <= 1e-16 * norm, capped by the weight guard.

    ``coeff_abs`` maps a mode to the modulus of the data there (taken symmetric).
    """
    cap = int(300.0 // r) if n_max is None else min(n_max, int(300.0 // r))
    for N in range(2, cap + 1):
        if math.exp(0.5 * r * N) * coeff_abs(N) <= 1e-16 * norm:
            return N
    return cap


def gaussian_truncation(lam: float, r: float | None = None) -> int:
    r = lam if r is None else r
    norm = ar_norm(gaussian_data(lam, int(300.0 // r)), r) if r * int(300.0 // r) <= 300 else 1.0
    return choose_truncation(lambda n: lam * math.exp(-(lam * n) ** 2), r, norm)


@dataclass(frozen=True)
class ScanRow:
    lam: float
    N: int
    data_norm: float
    T_certified: float
    c_used: float
    iterations: int
    final_ratio: float
    dispersion_length: float


@dataclass(frozen=True)
class ScanTable:
    rows: list[ScanRow]
    slope: float
    r_squared: float

    @property
    def nondecreasing(self) -> bool:
        Ts = [row.T_certified for row in self.rows]
        return all(b >= a for a, b in zip(Ts, Ts[1:]))


def origin_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of y = s x and the centred coefficient of determination."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope = float(np.dot(x, y) / np.dot(x, x))
    ss_res = float(np.sum((y - slope * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res == 0 else 0.0
    return slope, r2


def tlambda_scan(lambdas, params: EquationParams, base: PicardConfig | None = None,
                 N: int | None = None) -> ScanTable:
    """Run the certified solver on Gaussian data with r = lambda for each lambda."""
    rows = []
    for lam in sorted(float(x) for x in lambdas):
        n = N or gaussian_truncation(lam)
        cfg = PicardConfig(r=lam) if base is None else PicardConfig(
            r=lam, c=base.c, grid_points=base.grid_points, tol=base.tol,
            max_iter=base.max_iter, max_halvings=base.max_halvings)
        res = picard_solve(gaussian_data(lam, n), params, cfg)
        a2 = abs(float(params.alpha2))
        rows.append(ScanRow(lam, n, res.data_norm, res.T_certified, res.c_used, res.iterations,
                            res.final_ratio, lam ** 2 / a2 if a2 else math.inf))
    slope, r2 = origin_fit([r.lam for r in rows], [r.T_certified for r in rows])
    return ScanTable(rows, slope, r2)
