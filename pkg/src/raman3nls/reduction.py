"""Interaction-picture variables, the reduced operator family and Duhamel identities.

Variables (all mode-wise unimodular multipliers of u_hat):

    v_hat(t, k) = exp(i omega(k) t) u_hat(t, k),       omega(k) = a1 k^3 + a2 k^2
    w_hat(t, k) = exp(-i (g1 + g2 k) L t / pi) v_hat(t, k),   L = ||u0||^2

In w the Galerkin system reads

    dw/dt = a k w + F1 + F2 + F31 + F32,        a = Gamma L / (2 pi)

where F2 and F3 = F31 + F32 are sums over the nonresonant triples D(k)
carrying the oscillation exp(i t Phi), split by the regions D1 / D2.
Integrating F32 by parts in time gives F32 = dG/dt + H.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import InvalidParametersError, ZeroDataError
from .integrator import Trajectory
from .nonlinear_terms import phase_table, region_masks, rhs_full
from .spectral_core import EquationParams, SpectralState, dispersion, hs_norm, l2_norm, momentum, triple_index

PHI_GUARD = 1e-12
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ReducedContext:
    """Equation parameters together with the conserved mass of the initial data."""

    params: EquationParams
    l2_initial: float

    def __post_init__(self):
        if not np.isfinite(self.l2_initial) or self.l2_initial < 0:
            raise ValueError("l2_initial must be a finite non-negative number")

    @classmethod
    def from_initial(cls, u0: SpectralState, params: EquationParams) -> "ReducedContext":
        return cls(params, l2_norm(u0))

    @property
    def mass(self) -> float:
        return float(self.l2_initial) ** 2

    @property
    def drift_a(self) -> float:
        return float(self.params.Gamma) * self.mass / TWO_PI


# ---------------------------------------------------------------------------
# changes of variables
# ---------------------------------------------------------------------------

def _v_multiplier(params: EquationParams, k: np.ndarray, t: float) -> np.ndarray:
    return np.exp(1j * dispersion(params, k) * t)


def _w_frequency(ctx: ReducedContext, k: np.ndarray) -> np.ndarray:
    _, _, g1, g2, _ = ctx.params.floats()
    return (g1 + g2 * k) * ctx.mass / np.pi


def _w_multiplier(ctx: ReducedContext, k: np.ndarray, t: float) -> np.ndarray:
    return np.exp(-1j * _w_frequency(ctx, k) * t)


def to_v(state: SpectralState, params: EquationParams, t: float) -> SpectralState:
    return state.with_coeffs(_v_multiplier(params, state.k, t) * state.coeffs)


def from_v(v: SpectralState, params: EquationParams, t: float) -> SpectralState:
    return v.with_coeffs(_v_multiplier(params, v.k, -t) * v.coeffs)


def to_w(v: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    return v.with_coeffs(_w_multiplier(ctx, v.k, t) * v.coeffs)


def from_w(w: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    return w.with_coeffs(_w_multiplier(ctx, w.k, -t) * w.coeffs)


def u_to_w(u: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    return to_w(to_v(u, ctx.params, t), ctx, t)


def w_to_u(w: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    return from_v(from_w(w, ctx, t), ctx.params, t)


def w_time_derivative(u: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    """d/dt of the w-transform along the Galerkin flow through u at time t (chain rule)."""
    k = u.k
    mult = _v_multiplier(ctx.params, k, t) * _w_multiplier(ctx, k, t)
    freq = dispersion(ctx.params, k) - _w_frequency(ctx, k)
    return u.with_coeffs(mult * (rhs_full(u, ctx.params).coeffs + 1j * freq * u.coeffs))


# ---------------------------------------------------------------------------
# region-restricted sums with the exp(i t Phi) oscillation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RegionSums:
    """Triples of one region with their phases, in canonical summation order."""

    N: int
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k: np.ndarray
    phi: np.ndarray

    def product(self, c1, c2, c3) -> np.ndarray:
        N = self.N
        return c1[self.k1 + N] * np.conj(c2[N - self.k2]) * c3[self.k3 + N]

    def oscillation(self, t: float) -> np.ndarray:
        return np.exp(1j * t * self.phi)

    def reduce(self, values: np.ndarray) -> np.ndarray:
        n = 2 * self.N + 1
        slots = self.k + self.N
        return (np.bincount(slots, weights=values.real, minlength=n)
                + 1j * np.bincount(slots, weights=values.imag, minlength=n))

    def subset(self, mask: np.ndarray) -> "RegionSums":
        return RegionSums(self.N, self.k1[mask], self.k2[mask], self.k3[mask], self.k[mask],
                          self.phi[mask])


@functools.lru_cache(maxsize=64)
def region_sums(N: int, params: EquationParams, region: str) -> RegionSums:
    idx = triple_index(N)
    mask = region_masks(N)[region]
    return RegionSums(N, idx.k1[mask], idx.k2[mask], idx.k3[mask], idx.k[mask],
                      phase_table(N, params)[mask])


def _d2(N: int, params: EquationParams) -> RegionSums:
    reg = region_sums(N, params, "D2")
    if reg.phi.size and np.min(np.abs(reg.phi)) < PHI_GUARD:
        raise InvalidParametersError(
            "the phase vanishes on a D2 triple; 2*alpha2/(3*alpha1) must not be an integer")
    return reg


def _f3_weight(params: EquationParams, reg: RegionSums) -> np.ndarray:
    _, _, _, g2, G = params.floats()
    return (1j * g2 * reg.k + G * (reg.k1 + reg.k2)) / TWO_PI


def _full_weight(params: EquationParams, reg: RegionSums) -> np.ndarray:
    return 1j * float(params.gamma1) / TWO_PI + _f3_weight(params, reg)


# ---------------------------------------------------------------------------
# reduced right-hand side
# ---------------------------------------------------------------------------

def rhs_w(w: SpectralState, ctx: ReducedContext, t: float) -> tuple[SpectralState, dict[str, SpectralState]]:
    """Right-hand side of the w-equation and its parts drift, F1, F2, F3_1, F3_2."""
    params = ctx.params
    _, _, g1, g2, G = params.floats()
    N, c, k = w.trunc, w.coeffs, w.k
    drift = ctx.drift_a * k * c
    f1 = -(G / TWO_PI) * momentum(w) * c - (1j * (g1 + g2 * k) / TWO_PI) * np.abs(c) ** 2 * c
    d = region_sums(N, params, "D")
    f2 = d.reduce((1j * g1 / TWO_PI) * d.oscillation(t) * d.product(c, c, c))
    parts = {"drift": drift, "F1": f1, "F2": f2}
    for name, region in (("F3_1", "D1"), ("F3_2", "D2")):
        reg = region_sums(N, params, region)
        parts[name] = reg.reduce(_f3_weight(params, reg) * reg.oscillation(t) * reg.product(c, c, c))
    total = parts["drift"] + parts["F1"] + parts["F2"] + parts["F3_1"] + parts["F3_2"]
    return w.with_coeffs(total), {name: w.with_coeffs(v) for name, v in parts.items()}


def rhs_w_refined(w: SpectralState, ctx: ReducedContext, t: float) -> dict[str, SpectralState]:
    """Momentum-corrected split: dw/dt = mu w + Ftilde + (sum over D2 with full weight)."""
    params = ctx.params
    _, _, g1, g2, G = params.floats()
    c, k = w.coeffs, w.k
    mu = (G / TWO_PI) * (ctx.mass * k - momentum(w))
    d2 = region_sums(w.trunc, params, "D2")
    tail = d2.reduce(_full_weight(params, d2) * d2.oscillation(t) * d2.product(c, c, c))
    return {"drift": w.with_coeffs(mu * c), "Ftilde": compute_Ftilde(w, ctx, t),
            "D2": w.with_coeffs(tail)}


def compute_Ftilde(w: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    """Sum over D1 with the full weight minus the self-interaction term."""
    params = ctx.params
    _, _, g1, g2, _ = params.floats()
    c = w.coeffs
    d1 = region_sums(w.trunc, params, "D1")
    near = d1.reduce(_full_weight(params, d1) * d1.oscillation(t) * d1.product(c, c, c))
    self_term = (1j * (g1 + g2 * w.k) / TWO_PI) * np.abs(c) ** 2 * c
    return w.with_coeffs(near - self_term)


# ---------------------------------------------------------------------------
# integration by parts on D2
# ---------------------------------------------------------------------------

def _g_weights(params: EquationParams, reg: RegionSums, tilde: bool) -> np.ndarray:
    num = _full_weight(params, reg) if tilde else _f3_weight(params, reg)
    return num / (1j * reg.phi)


def _compute_g(w: SpectralState, ctx: ReducedContext, t: float, tilde: bool) -> SpectralState:
    reg = _d2(w.trunc, ctx.params)
    c = w.coeffs
    return w.with_coeffs(reg.reduce(_g_weights(ctx.params, reg, tilde) * reg.oscillation(t)
                                    * reg.product(c, c, c)))


def compute_G(w: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    """Sum over D2 of (i g2 k + Gamma (k1+k2)) / (2 pi i Phi) e^{i t Phi} w w* w."""
    return _compute_g(w, ctx, t, tilde=False)


def compute_Gtilde(w: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    """As ``compute_G`` with i g1 added to the numerator."""
    return _compute_g(w, ctx, t, tilde=True)


def _derivative_terms(reg: RegionSums, c: np.ndarray, cdot: np.ndarray) -> tuple[np.ndarray, ...]:
    return reg.product(cdot, c, c), reg.product(c, cdot, c), reg.product(c, c, cdot)


def _compute_h(w, wdot, ctx, t, tilde: bool) -> SpectralState:
    reg = _d2(w.trunc, ctx.params)
    d1, d2, d3 = _derivative_terms(reg, w.coeffs, wdot.coeffs)
    vals = -_g_weights(ctx.params, reg, tilde) * reg.oscillation(t) * (d1 + d2 + d3)
    return w.with_coeffs(reg.reduce(vals))


def compute_H(w: SpectralState, wdot: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    """Remainder after moving the time derivative off the D2 oscillation; wdot is supplied."""
    return _compute_h(w, wdot, ctx, t, tilde=False)


def compute_Htilde(w: SpectralState, wdot: SpectralState, ctx: ReducedContext, t: float) -> SpectralState:
    return _compute_h(w, wdot, ctx, t, tilde=True)


def compute_H1_H2(w: SpectralState, wdot: SpectralState, ctx: ReducedContext,
                  t: float) -> tuple[SpectralState, SpectralState]:
    """Split of Htilde: H1 keeps the derivative on the dominant factor on D2_j; H2 is the rest."""
    params, N = ctx.params, w.trunc
    _d2(N, params)
    htilde = compute_Htilde(w, wdot, ctx, t)
    h1 = np.zeros(2 * N + 1, dtype=np.complex128)
    for j, region in enumerate(("D2_1", "D2_2", "D2_3")):
        reg = region_sums(N, params, region)
        dterm = _derivative_terms(reg, w.coeffs, wdot.coeffs)[j]
        h1 += reg.reduce(-_g_weights(params, reg, True) * reg.oscillation(t) * dterm)
    return w.with_coeffs(h1), w.with_coeffs(htilde.coeffs - h1)


# ---------------------------------------------------------------------------
# Duhamel identities
# ---------------------------------------------------------------------------

DUHAMEL_VERSIONS = ("section2", "section3")


@dataclass(frozen=True, eq=False)
class DuhamelResult:
    """|u0_hat(k) - RHS(k)| for every retained k, plus the mode condition for the refined form."""

    k: np.ndarray
    residual: np.ndarray
    version: str
    condition_ok: np.ndarray | None = None
    condition_lhs: float | None = None

    def max_over(self, kmin: int, kmax: int) -> float:
        sel = (self.k >= kmin) & (self.k <= kmax)
        return float(np.max(self.residual[sel]))


def _d2_integrand_pieces(w, wdot, params, t, tilde):
    """(G, H) at one time from a single pass over D2."""
    reg = _d2(w.trunc, params)
    osc = reg.oscillation(t)
    gw = _g_weights(params, reg, tilde) * osc
    c, cd = w.coeffs, wdot.coeffs
    g = reg.reduce(gw * reg.product(c, c, c))
    h = reg.reduce(-gw * sum(_derivative_terms(reg, c, cd)))
    return g, h


def _near_sum(w, params, t, tilde):
    """F2 + F3_1 (section2) or the D1 sum of Ftilde (section3) without the self term."""
    _, _, g1, _, _ = params.floats()
    c = w.coeffs
    d1 = region_sums(w.trunc, params, "D1")
    out = d1.reduce(_full_weight(params, d1) * d1.oscillation(t) * d1.product(c, c, c))
    if not tilde:
        d2 = region_sums(w.trunc, params, "D2")
        out = out + d2.reduce((1j * g1 / TWO_PI) * d2.oscillation(t) * d2.product(c, c, c))
    return out


def duhamel_residual(traj: Trajectory, ctx: ReducedContext, version: str = "section2",
                     allow_zero: bool = False) -> DuhamelResult:
    """Evaluate the integrated identity for u0_hat(k) along a stored trajectory.

    The trajectory must start at t = 0 with u0. Time integrals use composite
    Simpson on the stored grid; the section3 kernel needs the integral of the
    momentum, taken by cumulative Simpson on the same grid. ``wdot`` is obtained
    from the Galerkin vector field by the chain rule.
    """
    if version not in DUHAMEL_VERSIONS:
        raise ValueError(f"unknown version {version!r}; expected one of {DUHAMEL_VERSIONS}")
    if traj.t0 != 0.0:
        raise ValueError("trajectory must start at t = 0")
    if len(traj) < 3:
        raise ValueError("need at least three stored times for Simpson quadrature")
    u0 = traj.initial
    k = u0.k
    if l2_norm(u0) == 0.0 and not allow_zero:
        raise ZeroDataError("the identity is stated for nonzero data (a > 0)")
    params = ctx.params
    _, _, g1, g2, G = params.floats()
    tilde = version == "section3"
    times = traj.times

    w_all, g_all, integrand_core, mom = [], [], [], []
    for j, t in enumerate(times):
        u = traj.state(j)
        w = u_to_w(u, ctx, t)
        wdot = w_time_derivative(u, ctx, t)
        g, h = _d2_integrand_pieces(w, wdot, params, t, tilde)
        near = _near_sum(w, params, t, tilde)
        c = w.coeffs
        self_term = (1j * (g1 + g2 * k) / TWO_PI) * np.abs(c) ** 2 * c
        p = momentum(w)
        core = near - self_term + h
        if not tilde:
            core = core - (G / TWO_PI) * p * c
        w_all.append(c)
        g_all.append(g)
        integrand_core.append(core)
        mom.append(p)
    w_all, g_all = np.array(w_all), np.array(g_all)
    integrand_core, mom = np.array(integrand_core), np.array(mom)

    condition_ok = condition_lhs = None
    if tilde:
        # mu(t) = (Gamma/2pi)(L k - P(t)); kernel exp(-int_0^t mu)
        mom_int = cumulative_simpson(mom, x=times, initial=0.0)
        mu = (G / TWO_PI) * (ctx.mass * k[None, :] - mom[:, None])
        kernel = np.exp(-(G / TWO_PI) * (ctx.mass * k[None, :] * times[:, None] - mom_int[:, None]))
        condition_lhs = 2.0 * max(hs_norm(s, 0.5) ** 2 for s in traj.states)
        condition_ok = condition_lhs <= ctx.mass * k
    else:
        mu = ctx.drift_a * k[None, :] * np.ones_like(times)[:, None]
        kernel = np.exp(-ctx.drift_a * k[None, :] * times[:, None])
    integrand = kernel * (mu * g_all + integrand_core)
    integral = simpson(integrand, x=times, axis=0)
    rhs = kernel[-1] * w_all[-1] - (kernel[-1] * g_all[-1] - g_all[0]) - integral
    residual = np.abs(u0.coeffs - rhs)
    return DuhamelResult(k, residual, version, condition_ok, condition_lhs)


def predicted_growth_rate(u0: SpectralState, ctx: ReducedContext, k) -> float | np.ndarray:
    """(Gamma / 2 pi) (||u0||^2 k - P[u0]): the drift exponent of mode k at t = 0."""
    rate = float(ctx.params.Gamma) / TWO_PI * (ctx.mass * np.asarray(k, dtype=float) - momentum(u0))
    return float(rate) if np.ndim(rate) == 0 else rate


from .gauge import GaugeContext, gauge_residual, gauge_transform  # noqa: E402  re-export
