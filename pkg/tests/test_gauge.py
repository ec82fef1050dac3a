import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import smooth_state
from raman3nls.errors import InvalidParametersError
from raman3nls.integrator import evolve
from raman3nls.reduction import GaugeContext, gauge_residual, gauge_transform
from raman3nls.gauge import gauge_grid_size, gauge_tail, gauge_transform_grid
from raman3nls.spectral_core import EquationParams, SpectralState, l2_norm

SQ = math.sqrt(2 * math.pi)
GAUGE = EquationParams(alpha1=0.0, alpha2=1.0, gamma1=0.5, gamma2=1.0, Gamma=2.0)


def test_lambda_example():
    assert GaugeContext(GAUGE).lam == pytest.approx(-1 - 1j, abs=1e-15)


@given(g2=st.floats(-5, 5), G=st.floats(0.01, 5), a2=st.floats(0.1, 5) | st.floats(-5, -0.1))
def test_lambda_not_purely_imaginary(g2, G, a2):
    lam = GaugeContext(EquationParams(0.0, a2, 0.0, g2, G)).lam
    assert lam.real != 0


@pytest.mark.parametrize("params", [EquationParams(1.0, 1.0), EquationParams(0.0, 0.0)])
def test_invalid_parameters(params):
    with pytest.raises(InvalidParametersError):
        GaugeContext(params)


def test_zero_and_constant_data():
    g = GaugeContext(GAUGE)
    assert l2_norm(gauge_transform(SpectralState.zeros(4), g)) == 0
    c = SpectralState.from_modes({0: 0.7 - 0.3j}, 4)
    assert np.max(np.abs(gauge_transform(c, g).coeffs - c.coeffs)) < 1e-15


def test_grid_size_rule():
    assert gauge_grid_size(8) >= 64
    with pytest.raises(ValueError):
        gauge_grid_size(8, 63)


def test_gauge_factor_solves_its_defining_equation():
    # G = U / u satisfies dG/dx = lam (|u|^2 - mean |u|^2) G
    u = smooth_state(6, 2, decay=0.6)
    g = GaugeContext(GAUGE)
    M = 128
    f = u.to_grid(M)
    U = gauge_transform_grid(u, g, M)
    factor = U / f
    km = np.fft.fftfreq(M, 1 / M)
    dfac = np.fft.ifft(1j * km * np.fft.fft(factor))
    rho = np.abs(f) ** 2
    assert np.max(np.abs(dfac - g.lam * (rho - rho.mean()) * factor)) < 1e-9


def test_gauge_tail_reported():
    u = smooth_state(6, 3, decay=0.3)
    assert gauge_tail(u, GaugeContext(GAUGE)) > 0


def test_gauge_residual_converges_second_order():
    # N = 32 keeps the Galerkin tail (about 3e-6) below the time-differencing error
    u0 = smooth_state(32, 4, decay=0.5, scale=0.3)
    g = GaugeContext(GAUGE)
    res = [gauge_residual(evolve(u0, GAUGE, 0.01, dt)[0], g).max_absolute for dt in (2e-3, 1e-3)]
    assert 3.5 < res[0] / res[1] < 4.5
