"""Integrating-factor RK4 time stepping of the Galerkin-truncated system.

The stepper works on coefficient arrays; the linear flow e^{-i omega h} is
applied exactly between stages, so the scheme is the classical RK4 in the
interaction-picture variables v = e^{i omega t} u, written back in u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BlowUpError, ConfigError
from .spectral_core import (EquationParams, SpectralState, dispersion, equation_weight,
                            fast_cubic_coeffs, hs_norm, l2_norm, momentum)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on the uniform grid t0 + j*dt, stored as a (n_times, 2N+1) array."""

    coeffs: np.ndarray
    t0: float
    dt: float
    params: EquationParams
    trunc: int = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if c.ndim != 2 or c.shape[1] % 2 != 1:
            raise ValueError("trajectory coefficients must have shape (n_times, 2N+1)")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "trunc", (c.shape[1] - 1) // 2)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    @classmethod
    def from_states(cls, states: Sequence[SpectralState], dt: float,
                    params: EquationParams) -> "Trajectory":
        return cls(np.stack([s.coeffs for s in states]), states[0].time, dt, params)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.trunc, self.trunc + 1)

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def state(self, j: int) -> SpectralState:
        return SpectralState(self.coeffs[j], self.trunc, self.times[j])

    @property
    def states(self) -> list[SpectralState]:
        return [self.state(j) for j in range(len(self))]

    @property
    def initial(self) -> SpectralState:
        return self.state(0)

    @property
    def final(self) -> SpectralState:
        return self.state(len(self) - 1)


@dataclass(frozen=True, eq=False)
class DiagnosticsRecord:
    """Tracked scalars at every stored time."""

    times: np.ndarray
    l2: np.ndarray
    momentum: np.ndarray
    hs_norms: dict[float, np.ndarray]
    mode_abs: dict[int, np.ndarray]

    @property
    def l2_drift(self) -> np.ndarray:
        """|l2(t) - l2(0)| / l2(0); absolute drift when the data vanish."""
        ref = self.l2[0] if self.l2[0] > 0 else 1.0
        return np.abs(self.l2 - self.l2[0]) / ref

    @property
    def max_l2_drift(self) -> np.ndarray:
        """Running maximum of the relative L2 drift."""
        return np.maximum.accumulate(self.l2_drift)

    def sup_hs(self, s: float) -> float:
        return float(np.max(self.hs_norms[s]))


def diagnostics_of(traj: Trajectory, hs_list: Iterable[float] = (1.0,),
                   probes: Iterable[int] = ()) -> DiagnosticsRecord:
    states = traj.states
    hs_list = tuple(float(s) for s in hs_list)
    probes = tuple(int(p) for p in probes)
    N = traj.trunc
    for p in probes:
        if abs(p) > N:
            raise ConfigError(f"probe mode {p} outside truncation N={N}")
    return DiagnosticsRecord(
        times=traj.times,
        l2=np.array([l2_norm(s) for s in states]),
        momentum=np.array([momentum(s) for s in states]),
        hs_norms={s: np.array([hs_norm(st, s) for st in states]) for s in hs_list},
        mode_abs={p: np.abs(traj.coeffs[:, p + N]) for p in probes},
    )


class _Stepper:
    """Precomputed multipliers for a fixed (params, N, dt)."""

    def __init__(self, params: EquationParams, N: int, dt: float):
        self.weight = equation_weight(params)
        self.dt = dt
        omega = dispersion(params, np.arange(-N, N + 1))
        self.half = np.exp(-1j * omega * (dt / 2.0))
        self.full = self.half * self.half

    def rhs(self, c: np.ndarray) -> np.ndarray:
        return fast_cubic_coeffs(c, c, c, self.weight)

    def step(self, c: np.ndarray) -> np.ndarray:
        h, E2, E = self.dt, self.half, self.full
        r1 = self.rhs(c)
        r2 = self.rhs(E2 * (c + 0.5 * h * r1))
        Ec2 = E2 * c
        r3 = self.rhs(Ec2 + 0.5 * h * r2)
        r4 = self.rhs(E * c + h * E2 * r3)
        out = E * c + (h / 6.0) * (E * r1 + 2.0 * E2 * (r2 + r3) + r4)
        if not np.all(np.isfinite(out)):
            raise BlowUpError("non-finite coefficient after time step")
        return out


def ifrk4_step(state: SpectralState, params: EquationParams, dt: float) -> SpectralState:
    """One integrating-factor RK4 step of size dt (negative dt steps backward)."""
    if dt == 0:
        raise ValueError("dt must be nonzero")
    out = _Stepper(params, state.trunc, dt).step(state.coeffs)
    return SpectralState(out, state.trunc, state.time + dt)


def default_dt(u0: SpectralState) -> float:
    return min(1e-3, 0.5 / (1.0 + hs_norm(u0, 1.0) ** 2))


def resolve_steps(T: float, dt: float | None, u0: SpectralState) -> tuple[int, float]:
    """Number of steps and signed step size covering [0, T]."""
    if T == 0:
        raise ConfigError("T must be nonzero")
    span = abs(T)
    if dt is None:
        n = max(1, math.ceil(span / default_dt(u0) - 1e-9))
        return n, math.copysign(span / n, T)
    dt = abs(float(dt))
    if dt <= 0:
        raise ConfigError("dt must be positive")
    n = round(span / dt)
    if n < 1 or abs(n * dt - span) > 1e-9 * max(span, 1.0):
        raise ConfigError(f"dt={dt:g} does not divide T={T:g}")
    return n, math.copysign(span / n, T)


def evolve(u0: SpectralState, params: EquationParams, T: float, dt: float | None = None,
           probes: Iterable[int] = (), hs_list: Iterable[float] = (1.0,),
           store_every: int = 1) -> tuple[Trajectory, DiagnosticsRecord]:
    """Integrate from u0 over [t0, t0 + T]; negative T runs backward in time.

    States (and diagnostics) are kept every ``store_every`` steps; the final
    step is always stored, so ``store_every`` must divide the step count.
    """
    n, h = resolve_steps(T, dt, u0)
    if store_every < 1 or n % store_every:
        raise ConfigError(f"store_every={store_every} must divide the step count {n}")
    stepper = _Stepper(params, u0.trunc, h)
    c = u0.coeffs.copy()
    stored = [c]
    for j in range(1, n + 1):
        c = stepper.step(c)
        if j % store_every == 0:
            stored.append(c)
    traj = Trajectory(np.stack(stored), u0.time, h * store_every, params)
    return traj, diagnostics_of(traj, hs_list, probes)


def l2_inner_rhs(state: SpectralState, params: EquationParams) -> float:
    """Re <N(u), u>; vanishes identically for the Galerkin-projected cubic field."""
    nl = fast_cubic_coeffs(state.coeffs, state.coeffs, state.coeffs, equation_weight(params))
    return float(np.real(np.vdot(state.coeffs, nl)))
