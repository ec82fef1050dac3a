"""Early-time growth of probe modes in the w-variables against the drift prediction."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, WindowSelectionError
from ..integrator import evolve
from ..reduction import ReducedContext, predicted_growth_rate, rhs_w, u_to_w
from ..spectral_core import SpectralState
from .config import ExperimentConfig
from .data import inflation_psi, lacunary_data, perturbation_phi, random_smooth

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowFit:
    slope: float
    window: float
    residual: float
    points: int
    ok: bool
    message: str = ""


@dataclass(frozen=True)
class GrowthRow:
    k: int
    fitted_rate: float
    predicted_rate: float
    rel_gap: float
    window: float
    window_ok: bool
    fit_residual: float
    reference_rate: float
    forcing_ratio: float


@dataclass(frozen=True)
class GrowthReport:
    rows: list[GrowthRow]
    mass: float
    momentum: float
    drift_a: float
    amplitude_heuristic: float

    def row(self, k: int) -> GrowthRow:
        for r in self.rows:
            if r.k == k:
                return r
        raise KeyError(k)

    def as_dicts(self) -> list[dict]:
        return [r.__dict__.copy() for r in self.rows]


ROW_COLUMNS = ["k", "fitted_rate", "predicted_rate", "rel_gap", "window", "window_ok",
               "fit_residual", "reference_rate", "forcing_ratio"]


def initial_data(cfg: ExperimentConfig) -> SpectralState:
    """Data of the configured family (scaled by delta where the family has no own scale)."""
    d, N = cfg.data, cfg.N
    if d.family == "lacunary":
        return lacunary_data(d.s0, N) * d.delta
    if d.family == "psi":
        return inflation_psi(d.s, d.eps, d.k0, N)
    if d.family == "phi":
        return perturbation_phi(d.s, d.eps, d.k0, N)
    if d.family == "gaussian":
        from ..analytic_solver import gaussian_data
        return gaussian_data(d.lam, N)
    if d.family == "random":
        return random_smooth(N, cfg.seed, d.decay, d.delta)
    if d.family == "zero":
        return SpectralState.zeros(N)
    raise ConfigError(f"unknown data family {d.family!r}")


def seed_probes(u0: SpectralState, cfg: ExperimentConfig) -> SpectralState:
    """Populate empty probe modes so their modulus has a logarithm to fit."""
    modes = {}
    for k in cfg.probes:
        if u0.mode(k) == 0:
            amp = cfg.growth.probe_amplitude or cfg.data.delta * (1.0 + abs(k)) ** (-cfg.data.s0)
            modes[k] = amp
    if not modes:
        return u0
    return u0 + SpectralState.from_modes(modes, u0.trunc)


def fit_window(times: np.ndarray, values: np.ndarray, bound: float, min_points: int,
               min_fraction: float = 0.0) -> WindowFit:
    """Least-squares line through (t, log|w|) on the longest window [t0, t*] meeting the bound.

    The bound is on RMS(residual) / |slope * (t* - t0)|, i.e. the misfit relative
    to the change the fitted line itself explains. Windows shorter than
    ``min_fraction`` of the run are not considered: over a short enough span a
    bounded oscillation also passes as a line.
    """
    if times.size < min_points:
        raise WindowSelectionError("not enough stored times for a fit")
    min_span = min_fraction * (times[-1] - times[0])
    best = None
    for j in range(min_points - 1, times.size):
        x, y = times[:j + 1], values[:j + 1]
        if x[-1] - x[0] < min_span * (1 - 1e-12):
            continue
        slope, icpt = np.polyfit(x, y, 1)
        rms = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
        span = abs(slope * (x[-1] - x[0]))
        metric = rms / span if span > 0 else np.inf
        if metric < bound:
            best = WindowFit(float(slope), float(x[-1] - x[0]), float(metric), j + 1, True)
    if best is not None:
        return best
    slope, icpt = np.polyfit(times, values, 1)
    rms = float(np.sqrt(np.mean((values - (slope * times + icpt)) ** 2)))
    span = abs(slope * (times[-1] - times[0]))
    return WindowFit(float(slope), float(times[-1] - times[0]), float(rms / span) if span > 0 else np.inf,
                     times.size, False, "no window met the residual bound; full-run fit reported")


def growth_experiment(cfg: ExperimentConfig, u0: SpectralState | None = None) -> GrowthReport:
    """Evolve, move to w-variables, fit log|w(t, k)| per probe and compare with the drift rate."""
    params = cfg.params
    if u0 is None:
        u0 = seed_probes(initial_data(cfg), cfg)
    ctx = ReducedContext.from_initial(u0, params)
    traj, diag = evolve(u0, params, cfg.T, cfg.dt, probes=cfg.probes, store_every=cfg.store_every)
    times = traj.times
    w_modes = np.array([u_to_w(traj.state(j), ctx, t).coeffs for j, t in enumerate(times)])
    ref_ctx = ReducedContext(params.replace(Gamma=cfg.growth.reference_Gamma), ctx.l2_initial)
    _, parts0 = rhs_w(u0, ctx, 0.0)

    predicted_all = predicted_growth_rate(u0, ctx, np.array(cfg.probes))
    pmin = np.min(np.abs(predicted_all)) if len(cfg.probes) else 0.0
    heuristic = cfg.data.delta ** 2 * cfg.N / pmin if pmin > 0 else np.inf
    if heuristic >= 1:
        log.warning("amplitude heuristic delta^2 N / rate = %.3g is not small", heuristic)

    rows = []
    for k in cfg.probes:
        series = np.abs(w_modes[:, k + u0.trunc])
        if np.any(series == 0):
            raise ConfigError(f"probe mode {k} vanishes; cannot fit its logarithm")
        fit = fit_window(times - times[0], np.log(series), cfg.growth.fit_residual,
                         cfg.growth.min_window_points, cfg.growth.min_window_fraction)
        if not fit.ok:
            log.warning("probe %d: %s", k, fit.message)
        pred = float(predicted_growth_rate(u0, ctx, k))
        gap = abs(fit.slope - pred) / abs(pred) if pred != 0 else np.inf
        # instantaneous nonresonant forcing relative to the drift term it competes with
        nonres = parts0["F2"].mode(k) + parts0["F3_1"].mode(k) + parts0["F3_2"].mode(k)
        denom = abs(pred * u0.mode(k))
        forcing = abs(nonres) / denom if denom > 0 else np.inf
        rows.append(GrowthRow(k, fit.slope, pred, gap, fit.window, fit.ok, fit.residual,
                              float(predicted_growth_rate(u0, ref_ctx, k)), float(forcing)))
    return GrowthReport(rows, ctx.mass, float(diag.momentum[0]), ctx.drift_a, float(heuristic))
