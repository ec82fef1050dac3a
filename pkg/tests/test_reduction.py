import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import smooth_state
from raman3nls.errors import InvalidParametersError, ZeroDataError
from raman3nls.integrator import Trajectory, evolve
from raman3nls.nonlinear_terms import RegionTag, classify, rhs_nonlinear
from raman3nls.reduction import (ReducedContext, compute_G, compute_Gtilde, compute_H,
                                 compute_H1_H2, compute_Htilde, duhamel_residual, from_v, from_w,
                                 predicted_growth_rate, rhs_w, to_v, to_w, u_to_w, w_to_u)
from raman3nls.spectral_core import EquationParams, SpectralState, hs_norm, l2_norm

TWO_PI = 2 * math.pi
PARAMS = EquationParams(1.0, 0.4, 0.8, -1.1, 1.3)


def _omega(p, k):
    a1, a2 = float(p.alpha1), float(p.alpha2)
    return a1 * k ** 3 + a2 * k ** 2


def _phi(p, k1, k2, k3):
    return _omega(p, k1 + k2 + k3) - _omega(p, k1) + _omega(p, -k2) - _omega(p, k3)


def _region_sum(w, p, t, region, weight):
    """Brute-force sum over triples whose tag satisfies ``region``."""
    N = w.trunc
    out = np.zeros(2 * N + 1, dtype=complex)
    for k1, k2, k3 in itertools.product(range(-N, N + 1), repeat=3):
        k = k1 + k2 + k3
        if abs(k) > N:
            continue
        tag = classify(k1, k2, k3)
        if not region(tag):
            continue
        phi = _phi(p, k1, k2, k3)
        out[k + N] += (weight(k, k1, k2, k3, phi) * np.exp(1j * t * phi)
                       * w.mode(k1) * np.conj(w.mode(-k2)) * w.mode(k3))
    return out


# --- changes of variables -------------------------------------------------------

def test_transforms_identity_at_zero_time():
    u = smooth_state(5, 1)
    ctx = ReducedContext.from_initial(u, PARAMS)
    assert np.array_equal(to_v(u, PARAMS, 0.0).coeffs, u.coeffs)
    assert np.array_equal(to_w(u, ctx, 0.0).coeffs, u.coeffs)


def test_to_v_example():
    u = SpectralState.from_modes({1: 1.0}, 3)
    assert to_v(u, EquationParams(alpha1=1.0), math.pi).mode(1) == pytest.approx(-1.0, abs=1e-15)


def test_to_w_identity_without_kerr_terms():
    u = smooth_state(5, 2)
    ctx = ReducedContext.from_initial(u, EquationParams(1.0, 0.4, 0.0, 0.0, 3.0))
    assert np.array_equal(to_w(u, ctx, 1.7).coeffs, u.coeffs)


@given(seed=st.integers(0, 10 ** 6), t=st.floats(-5, 5))
def test_transform_roundtrip_and_modulus(seed, t):
    u = smooth_state(8, seed)
    ctx = ReducedContext.from_initial(u, PARAMS)
    w = u_to_w(u, ctx, t)
    assert np.max(np.abs(from_v(to_v(u, PARAMS, t), PARAMS, t).coeffs - u.coeffs)) < 1e-14
    assert np.max(np.abs(from_w(to_w(u, ctx, t), ctx, t).coeffs - u.coeffs)) < 1e-14
    assert np.max(np.abs(w_to_u(w, ctx, t).coeffs - u.coeffs)) < 1e-14
    assert np.allclose(np.abs(w.coeffs), np.abs(u.coeffs), rtol=1e-14, atol=0)


def test_context_drift():
    ctx = ReducedContext(EquationParams(Gamma=2 * math.pi), 2.0)
    assert ctx.drift_a == pytest.approx(4.0)
    assert ReducedContext(PARAMS, 0.0).drift_a == 0
    with pytest.raises(ValueError):
        ReducedContext(PARAMS, float("nan"))


# --- reduced right-hand side ---------------------------------------------------------

def test_rhs_w_zero_state():
    z = SpectralState.zeros(4)
    total, parts = rhs_w(z, ReducedContext(PARAMS, 0.0), 0.3)
    assert l2_norm(total) == 0 and all(l2_norm(v) == 0 for v in parts.values())


def test_rhs_w_parts_against_region_brute_force():
    p = PARAMS
    _, _, g1, g2, G = p.floats()
    w = smooth_state(8, 5)
    ctx = ReducedContext(p, 0.9)
    t = 0.3
    parts = rhs_w(w, ctx, t)[1]
    f3 = lambda k, k1, k2, k3, phi: (1j * g2 * k + G * (k1 + k2)) / TWO_PI  # noqa: E731
    oracles = {
        "F2": _region_sum(w, p, t, lambda tag: tag is not RegionTag.RESONANT,
                          lambda *a: 1j * g1 / TWO_PI),
        "F3_1": _region_sum(w, p, t, lambda tag: tag is RegionTag.D1, f3),
        "F3_2": _region_sum(w, p, t, lambda tag: tag.in_d2, f3),
    }
    for name, expect in oracles.items():
        assert np.max(np.abs(parts[name].coeffs - expect)) < 1e-12, name
    k = w.k
    mom = np.sum(k * np.abs(w.coeffs) ** 2)
    f1 = -(G / TWO_PI) * mom * w.coeffs - 1j * (g1 + g2 * k) / TWO_PI * np.abs(w.coeffs) ** 2 * w.coeffs
    assert np.max(np.abs(parts["F1"].coeffs - f1)) < 1e-14
    assert np.max(np.abs(parts["drift"].coeffs - G * 0.81 / TWO_PI * k * w.coeffs)) < 1e-14


def test_decomposition_reconstructs_nonlinearity():
    # at t = 0 and with the conserved mass equal to the state's own mass,
    # the parts minus the linear frequency terms give back the cubic term
    u = smooth_state(10, 6)
    ctx = ReducedContext.from_initial(u, PARAMS)
    total = rhs_w(u, ctx, 0.0)[0].coeffs
    _, _, g1, g2, _ = PARAMS.floats()
    freq = (g1 + g2 * u.k) * ctx.mass / math.pi
    assert np.max(np.abs(total + 1j * freq * u.coeffs - rhs_nonlinear(u, PARAMS).coeffs)) < 1e-12


# --- integration by parts operators ----------------------------------------------------

def test_G_trivial_cases():
    ctx = ReducedContext(PARAMS, 1.0)
    assert l2_norm(compute_G(SpectralState.zeros(5), ctx, 0.2)) == 0
    single = SpectralState.from_modes({3: 1.0 + 1j}, 5)
    assert l2_norm(compute_G(single, ctx, 0.2)) == 0
    assert l2_norm(compute_Gtilde(single, ctx, 0.2)) == 0


def test_G_against_brute_force():
    p = PARAMS
    _, _, g1, g2, G = p.floats()
    w = smooth_state(8, 7)
    ctx = ReducedContext(p, 1.0)
    t = 0.45
    num = lambda k, k1, k2, k3, phi: (1j * g2 * k + G * (k1 + k2)) / (TWO_PI * 1j * phi)  # noqa: E731
    numt = lambda k, k1, k2, k3, phi: (1j * g1 + 1j * g2 * k + G * (k1 + k2)) / (TWO_PI * 1j * phi)  # noqa: E731
    d2 = lambda tag: tag.in_d2  # noqa: E731
    assert np.max(np.abs(compute_G(w, ctx, t).coeffs - _region_sum(w, p, t, d2, num))) < 1e-12
    assert np.max(np.abs(compute_Gtilde(w, ctx, t).coeffs - _region_sum(w, p, t, d2, numt))) < 1e-12


def test_G_guard_on_integer_ratio():
    p = EquationParams(1.0, 1.5, 1.0, 1.0, 1.0)
    with pytest.raises(InvalidParametersError):
        compute_G(smooth_state(6, 0), ReducedContext(p, 1.0), 0.0)


def test_H_vanishes_for_static_or_zero_data():
    ctx = ReducedContext(PARAMS, 1.0)
    w = smooth_state(6, 8)
    assert l2_norm(compute_H(w, SpectralState.zeros(6), ctx, 0.1)) == 0
    z = SpectralState.zeros(6)
    assert l2_norm(compute_H(z, z, ctx, 0.1)) == 0


def test_H_product_rule_against_finite_difference():
    # with the oscillation frozen, H = -d/ds G(w + s wdot) at s = 0
    ctx = ReducedContext(PARAMS, 1.0)
    w = smooth_state(6, 9, decay=0.8)
    wd = smooth_state(6, 10, decay=0.8)
    t, h = 0.2, 1e-5
    fd = (compute_G(w + h * wd, ctx, t).coeffs - compute_G(w - h * wd, ctx, t).coeffs) / (2 * h)
    H = compute_H(w, wd, ctx, t).coeffs
    assert np.max(np.abs(H + fd)) / np.max(np.abs(H)) < 1e-6


def test_F32_is_time_derivative_of_G_plus_H():
    ctx = ReducedContext(PARAMS, 1.0)
    w = smooth_state(6, 11, decay=1.0)
    wd = smooth_state(6, 12, decay=1.0)
    t, h = 0.3, 1e-5
    dG = (compute_G(w + h * wd, ctx, t + h).coeffs - compute_G(w - h * wd, ctx, t - h).coeffs) / (2 * h)
    f32 = rhs_w(w, ctx, t)[1]["F3_2"].coeffs
    assert np.max(np.abs(f32 - dG - compute_H(w, wd, ctx, t).coeffs)) / np.max(np.abs(f32)) < 1e-6


@given(seed=st.integers(0, 10 ** 6))
def test_H1_H2_split(seed):
    ctx = ReducedContext(PARAMS, 1.0)
    w, wd = smooth_state(6, seed), smooth_state(6, seed + 1)
    h1, h2 = compute_H1_H2(w, wd, ctx, 0.4)
    ht = compute_Htilde(w, wd, ctx, 0.4).coeffs
    assert np.max(np.abs(h1.coeffs + h2.coeffs - ht)) <= 1e-14 * max(1.0, np.max(np.abs(ht)))


# --- Duhamel identity --------------------------------------------------------------------

def test_duhamel_zero_trajectory():
    traj = Trajectory(np.zeros((5, 9), dtype=complex), 0.0, 0.01, PARAMS)
    ctx = ReducedContext(PARAMS, 0.0)
    with pytest.raises(ZeroDataError):
        duhamel_residual(traj, ctx)
    for version in ("section2", "section3"):
        res = duhamel_residual(traj, ctx, version, allow_zero=True)
        assert np.all(res.residual == 0)


def test_duhamel_argument_checks():
    u0 = smooth_state(4, 0, scale=0.05)
    traj, _ = evolve(u0, PARAMS, 0.01, 0.005)
    ctx = ReducedContext.from_initial(u0, PARAMS)
    with pytest.raises(ValueError):
        duhamel_residual(traj, ctx, "section4")
    with pytest.raises(ValueError):
        duhamel_residual(Trajectory(traj.coeffs[:2], 0.0, traj.dt, PARAMS), ctx)
    with pytest.raises(ValueError):
        duhamel_residual(Trajectory(traj.coeffs, 0.5, traj.dt, PARAMS), ctx)


@pytest.fixture(scope="module")
def short_run():
    u0 = smooth_state(8, 13, decay=0.6)
    u0 = u0 * (0.1 / hs_norm(u0, 1.0))
    traj, _ = evolve(u0, PARAMS, 0.05, 5e-4)
    return traj, ReducedContext.from_initial(u0, PARAMS)


def test_duhamel_versions_agree(short_run):
    traj, ctx = short_run
    r2 = duhamel_residual(traj, ctx, "section2")
    r3 = duhamel_residual(traj, ctx, "section3")
    assert r2.max_over(1, 8) < 1e-9
    assert r3.max_over(1, 8) < 1e-9
    assert r3.condition_ok is not None and r3.condition_ok.shape == r3.k.shape


# --- growth predictor ------------------------------------------------------------------------

@pytest.mark.parametrize("modes, Gamma, k, expected", [
    ({0: 1.0}, 2 * math.pi, 5, 5.0),
    ({3: 1.0}, 2 * math.pi, 3, 0.0),
    ({3: 1.0}, 2 * math.pi, 7, 4.0),
    ({1: 1.0, -1: 1.0}, math.pi, 4, 4.0),
])
def test_predicted_growth_rate(modes, Gamma, k, expected):
    u = SpectralState.from_modes(modes, 8)
    ctx = ReducedContext.from_initial(u, EquationParams(Gamma=Gamma))
    assert predicted_growth_rate(u, ctx, k) == pytest.approx(expected, abs=1e-14)
