"""Gauge transformation for the pure Schrodinger case alpha1 = 0.

U = exp(lambda * antiderivative(|u|^2)) * u with lambda = (2 g2 - i Gamma) / (2 i a2).
The exponential is formed on a physical grid of at least 8N points; U lives
on that grid and is only truncated to |k| <= N when returned as a state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import InvalidParametersError
from .integrator import Trajectory
from .spectral_core import (EquationParams, SpectralState, coeffs_to_grid, equation_weight,
                            grid_to_coeffs, grid_wavenumbers)


@dataclass(frozen=True)
class GaugeContext:
    params: EquationParams

    def __post_init__(self):
        if self.params.alpha1 != 0:
            raise InvalidParametersError("the gauge transformation needs alpha1 = 0")
        if self.params.alpha2 == 0:
            raise InvalidParametersError("the gauge transformation needs alpha2 != 0")

    @property
    def lam(self) -> complex:
        _, a2, _, g2, G = self.params.floats()
        return (2.0 * g2 - 1j * G) / (2j * a2)


def gauge_grid_size(N: int, grid: int | None = None) -> int:
    M = grid or sfft.next_fast_len(8 * N)
    if M < 8 * N:
        raise ValueError(f"gauge grid needs at least 8N = {8 * N} points, got {M}")
    return M


def _spectral_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    km = grid_wavenumbers(values.shape[-1])
    if values.shape[-1] % 2 == 0:
        km = km.copy()
        km[values.shape[-1] // 2] = 0.0
    return sfft.ifft((1j * km) ** order * sfft.fft(values))


def gauge_transform_grid(u: SpectralState, g: GaugeContext, M: int | None = None) -> np.ndarray:
    """Values of U on the uniform grid of M >= 8N points."""
    M = gauge_grid_size(u.trunc, M)
    f = u.to_grid(M)
    rho_hat = sfft.fft(np.abs(f) ** 2)
    km = grid_wavenumbers(M)
    inv = np.zeros(M, dtype=np.complex128)
    nz = km != 0
    inv[nz] = 1.0 / (1j * km[nz])
    if M % 2 == 0:
        inv[M // 2] = 0.0  # |u|^2 has no energy at the Nyquist mode since M >= 4N+1
    primitive = sfft.ifft(inv * rho_hat)
    return np.exp(g.lam * primitive) * f


def gauge_transform(u: SpectralState, g: GaugeContext, M: int | None = None) -> SpectralState:
    """U truncated to the modes |k| <= N of u."""
    return u.with_coeffs(grid_to_coeffs(gauge_transform_grid(u, g, M), u.trunc))


def gauge_tail(u: SpectralState, g: GaugeContext, M: int | None = None) -> float:
    """l2 norm of the coefficients of U outside |k| <= N."""
    vals = gauge_transform_grid(u, g, M)
    Mg = vals.shape[-1]
    full = sfft.fft(vals) * (np.sqrt(2.0 * np.pi) / Mg)
    km = np.abs(grid_wavenumbers(Mg))
    return float(np.sqrt(np.sum(np.abs(full[km > u.trunc]) ** 2)))


def gauge_rhs_grid(u: SpectralState, U: np.ndarray, g: GaugeContext) -> np.ndarray:
    """Right-hand side of the U-equation evaluated pointwise on U's grid."""
    _, a2, g1, g2, G = g.params.floats()
    lam = g.lam
    M = U.shape[-1]
    f = u.to_grid(M)
    fx = _spectral_derivative(f)
    rho = np.abs(f) ** 2
    mean_rho = np.mean(rho)
    rho_nz = rho - mean_rho
    rho2 = rho ** 2
    im_mean = np.mean(np.imag(np.conj(f) * fx))
    bracket = (1.5 * g2 * (rho2 - np.mean(rho2)) - 1j * a2 * lam * rho_nz ** 2
               - 2j * a2 * lam * mean_rho * rho_nz + 2.0 * a2 * im_mean)
    remainder = (1j * g1 * rho + lam * bracket) * U
    return (1j * a2 * _spectral_derivative(U, 2) + (2.0 * g2 - 1j * G) * mean_rho * _spectral_derivative(U)
            - g2 * f * U * np.conj(fx) + remainder)


@dataclass(frozen=True, eq=False)
class GaugeResidual:
    """Residual of the U-equation at interior trajectory times.

    ``absolute`` and ``relative`` are L2 norms over the torus of
    (centered difference of U) - (right-hand side), the latter divided by the
    L2 norm of the centered difference. ``galerkin_tail`` is the L2 norm of the
    part of the cubic nonlinearity discarded by the truncation, and
    ``gauge_tail`` the norm of U outside |k| <= N.
    """

    times: np.ndarray
    absolute: np.ndarray
    relative: np.ndarray
    galerkin_tail: np.ndarray
    gauge_tail: np.ndarray

    @property
    def max_absolute(self) -> float:
        return float(np.max(self.absolute))

    @property
    def max_relative(self) -> float:
        return float(np.max(self.relative))


def _l2_grid(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(values) ** 2) * 2.0 * np.pi))


def _galerkin_tail(u: SpectralState, params: EquationParams) -> float:
    """Norm of the cubic term's modes beyond N (they fall outside the truncated dynamics)."""
    N = u.trunc
    M = sfft.next_fast_len(6 * N + 2)
    f = u.to_grid(M)
    w = equation_weight(params)
    # full (untruncated) cubic term on a grid that resolves all 6N+1 modes
    rho = np.abs(f) ** 2
    full = (1j * 2 * np.pi * w.const * rho * f
            + 2 * np.pi * w.out * (-1j) * _spectral_derivative(rho * f)
            + 2 * np.pi * w.pair * (-1j) * _spectral_derivative(rho) * f)
    coeffs = sfft.fft(full) * (np.sqrt(2.0 * np.pi) / M)
    km = np.abs(grid_wavenumbers(M))
    return float(np.sqrt(np.sum(np.abs(coeffs[km > N]) ** 2)))


def gauge_residual(traj: Trajectory, g: GaugeContext, M: int | None = None) -> GaugeResidual:
    """Check the U-equation along a trajectory with centered differences in time."""
    if len(traj) < 3:
        raise ValueError("need at least three stored times")
    M = gauge_grid_size(traj.trunc, M)
    states = traj.states
    U = [gauge_transform_grid(s, g, M) for s in states]
    h = traj.dt
    times, absolute, relative, gtail, utail = [], [], [], [], []
    for j in range(1, len(states) - 1):
        dU = (U[j + 1] - U[j - 1]) / (2.0 * h)
        res = dU - gauge_rhs_grid(states[j], U[j], g)
        a = _l2_grid(res)
        scale = _l2_grid(dU)
        times.append(traj.times[j])
        absolute.append(a)
        relative.append(a / scale if scale > 0 else a)
        gtail.append(_galerkin_tail(states[j], g.params))
        utail.append(gauge_tail(states[j], g, M))
    return GaugeResidual(np.array(times), np.array(absolute), np.array(relative),
                         np.array(gtail), np.array(utail))
