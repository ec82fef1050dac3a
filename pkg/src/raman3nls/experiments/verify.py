"""Identity and property checks bundled into a machine-readable report.

Every check records its name, tolerance, observed value and verdict. Random
inputs derive from the configured seed, so two runs produce identical reports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from ..analytic_solver import free_evolution, gaussian_data, symmetric_grid, triple_norm
from ..integrator import l2_inner_rhs
from ..nonlinear_terms import (i2_closed_form, phase_phi, phase_phi_expanded, raman_full,
                               raman_resonant_split, rhs_nonlinear)
from ..reduction import (ReducedContext, compute_G, compute_H, compute_H1_H2, compute_Htilde,
                         rhs_w, u_to_w, w_time_derivative)
from ..spectral_core import (CubicWeight, EquationParams, SpectralState, antiderivative, ar_norm,
                             cubic_product, derivative, hs_norm, project)
from .config import ExperimentConfig
from .data import inflation_psi, lacunary_data, perturbation_phi, sigma_of_s

PhaseFn = Callable[[EquationParams, int, int, int], object]

EXACT_PARAM_SETS = ((Fraction(1), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(2), Fraction(1, 3)))


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    observed: float
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "tolerance": self.tolerance, "observed": self.observed,
                "passed": self.passed}


def _check(name, observed, tol) -> Check:
    observed = float(observed)
    return Check(name, float(tol), observed, bool(observed <= tol))


def check_phase_identity(phase_fn: PhaseFn = phase_phi, K: int = 20) -> Check:
    """Largest |factored - expanded| over |kj| <= K for the exact parameter sets (exact arithmetic)."""
    worst = Fraction(0)
    rng = range(-K, K + 1)
    for a1, a2 in EXACT_PARAM_SETS:
        p = EquationParams(alpha1=a1, alpha2=a2)
        for k1, k2, k3 in itertools.product(rng, rng, rng):
            d = abs(Fraction(phase_fn(p, k1, k2, k3)) - phase_phi_expanded(p, k1, k2, k3))
            if d > worst:
                worst = d
    return _check("phase_factored_equals_expanded", worst, 0.0)


def check_phase_zero_set(phase_fn: PhaseFn = phase_phi, K: int = 20) -> Check:
    """Count of triples where (Phi = 0) disagrees with ((k1+k2)(k2+k3) = 0)."""
    bad = 0
    rng = range(-K, K + 1)
    for a1, a2 in EXACT_PARAM_SETS:
        p = EquationParams(alpha1=a1, alpha2=a2)
        if p.ratio_is_integer():
            continue
        for k1, k2, k3 in itertools.product(rng, rng, rng):
            if (phase_fn(p, k1, k2, k3) == 0) != ((k1 + k2) * (k2 + k3) == 0):
                bad += 1
    return _check("phase_zero_set", bad, 0)


def _random_states(rng, N, count, decay=0.3):
    return [SpectralState.random(N, rng, decay=decay) for _ in range(count)]


def verify_suite(cfg: ExperimentConfig | None = None, phase_fn: PhaseFn = phase_phi,
                 phase_range: int = 20) -> dict:
    """Run the checks; returns {"checks": [...], "passed": bool, "failures": int, ...}."""
    cfg = cfg or ExperimentConfig()
    N = cfg.verify_N
    rng = np.random.default_rng(cfg.seed)
    params = EquationParams(1, 0.4, 1.0, 1.0, 1.0)
    checks: list[Check] = [check_phase_identity(phase_fn, phase_range),
                           check_phase_zero_set(phase_fn, phase_range)]

    u1, u2, u3 = _random_states(rng, N, 3)
    worst = 0.0
    for w in (CubicWeight(const=1.0), CubicWeight(out=1.0), CubicWeight(pair=1.0),
              CubicWeight(0.5j, -1.0, 2.0)):
        fast = cubic_product(u1, u2, u3, w, method="fast").coeffs
        direct = cubic_product(u1, u2, u3, w, method="direct").coeffs
        worst = max(worst, np.max(np.abs(fast - direct)))
    checks.append(_check("cubic_fast_equals_direct", worst, 1e-12))

    (u,) = _random_states(rng, N, 1)
    i1, i2 = raman_resonant_split(u)
    checks.append(_check("i2_closed_form", np.max(np.abs(i2.coeffs - i2_closed_form(u).coeffs)), 1e-12))
    checks.append(_check("raman_split_reconstruction",
                         np.max(np.abs((i1 + i2).coeffs - raman_full(u).coeffs)), 1e-12))
    hand = SpectralState.from_modes({1: 1.0, 2: 1j}, 4)
    h2 = raman_resonant_split(hand)[1]
    hand_err = max(abs(h2.mode(1) - 1 / (2 * np.pi)), abs(h2.mode(2) + 1j / (2 * np.pi)))
    checks.append(_check("i2_hand_example", hand_err, 1e-15))

    checks.append(_check("l2_inner_product_vanishes", abs(l2_inner_rhs(u, params)), 1e-12))
    theta = 0.7
    rot = rhs_nonlinear(u * np.exp(1j * theta), params).coeffs
    checks.append(_check("phase_equivariance",
                         np.max(np.abs(rot - np.exp(1j * theta) * rhs_nonlinear(u, params).coeffs)), 1e-12))

    ctx = ReducedContext.from_initial(u, params)
    t = 0.3
    w = u_to_w(u, ctx, t)
    total, parts = rhs_w(w, ctx, t)
    chain = w_time_derivative(u, ctx, t)
    scale = max(np.max(np.abs(chain.coeffs)), 1e-300)
    checks.append(_check("rhs_w_chain_rule", np.max(np.abs(total.coeffs - chain.coeffs)) / scale, 1e-12))

    # F3_2 = dG/dt + H along the straight path w + s wdot; smoother data keep the
    # O(h^2 Phi^2) difference error well inside the tolerance
    h = 1e-5
    smooth = SpectralState.random(N, rng, decay=1.0)
    w = u_to_w(smooth, ctx, t)
    parts = rhs_w(w, ctx, t)[1]
    wd = SpectralState.random(N, rng, decay=1.0)
    dG = (compute_G(w + h * wd, ctx, t + h) - compute_G(w - h * wd, ctx, t - h)).coeffs / (2 * h)
    H = compute_H(w, wd, ctx, t).coeffs
    ibp = np.max(np.abs(parts["F3_2"].coeffs - (dG + H))) / max(np.max(np.abs(parts["F3_2"].coeffs)), 1e-300)
    checks.append(_check("integration_by_parts", ibp, 1e-6))

    h1, h2 = compute_H1_H2(w, wd, ctx, t)
    ht = compute_Htilde(w, wd, ctx, t).coeffs
    checks.append(_check("h1_plus_h2", np.max(np.abs(h1.coeffs + h2.coeffs - ht)) / max(np.max(np.abs(ht)), 1e-300), 1e-14))

    checks.append(_check("antiderivative_identity",
                         np.max(np.abs(derivative(antiderivative(u)).coeffs - project(u, "P!=0").coeffs)), 1e-15))

    g = gaussian_data(0.5, 16)
    times = symmetric_grid(0.01, 9)
    free = free_evolution(g, params, times)
    checks.append(_check("free_evolution_norm",
                         abs(triple_norm(free, 0.5, 0.01) - ar_norm(g, 0.5)) / ar_norm(g, 0.5), 1e-12))

    gen_err = max(abs(float(sigma_of_s(Fraction(1))) - 1 / 6), abs(float(sigma_of_s(Fraction(2))) - 1 / 3),
                  abs(lacunary_data(2.0, 8).mode(2) - 1 / 9),
                  abs(hs_norm(perturbation_phi(2.0, 0.3, 5, 8), 2.0) - 0.3))
    checks.append(_check("data_generators", gen_err, 1e-15))
    psi = inflation_psi(1.0, 0.1, 4, 8)
    checks.append(_check("inflation_psi_support", np.count_nonzero(psi.coeffs) - 2, 0))

    report = {
        "seed": cfg.seed,
        "N": N,
        "checks": [c.as_dict() for c in sorted(checks, key=lambda c: c.name)],
    }
    report["failures"] = sum(not c["passed"] for c in report["checks"])
    report["passed"] = report["failures"] == 0
    return report

