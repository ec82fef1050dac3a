"""Initial-data families: lacunary data, the inflation profile and its perturbation."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..spectral_core import SQRT_2PI, SpectralState


def lacunary_data(s0: float, N: int) -> SpectralState:
    """<k>^{-s0} on k = +-1, +-2, +-4, ... up to N; zero elsewhere."""
    if not s0 > 0.5:
        raise ValueError("s0 must exceed 1/2 for square-summable data")
    if N < 2:
        raise ValueError("N must be at least 2")
    modes = {}
    m = 1
    while m <= N:
        amp = (1.0 + m) ** (-float(s0))
        modes[m] = amp
        modes[-m] = amp
        m *= 2
    return SpectralState.from_modes(modes, N)


def lacunary_mass(s0: float, N: int) -> float:
    """Closed-form squared L2 norm of ``lacunary_data``."""
    total, m = 0.0, 1
    while m <= N:
        total += 2.0 * (1.0 + m) ** (-2.0 * float(s0))
        m *= 2
    return total


def sigma_of_s(s):
    """2s/3 - 1/2 on [1, 5/4] and 1/3 above; exact for ``Fraction`` input."""
    if s < 1:
        raise ValueError("s must be at least 1")
    if isinstance(s, (Fraction, int)):
        s = Fraction(s)
        return Fraction(2, 3) * s - Fraction(1, 2) if s <= Fraction(5, 4) else Fraction(1, 3)
    return 2.0 * s / 3.0 - 0.5 if s <= 1.25 else 1.0 / 3.0


def _check_mode(k0: int, N: int) -> None:
    if not 0 < k0 <= N:
        raise ValueError(f"k0 must satisfy 0 < k0 <= N, got k0={k0}, N={N}")


def _psi_modes(s: float, eps: float, k0: int) -> dict[int, float]:
    sig = float(sigma_of_s(s))
    bracket = 1.0 + k0
    return {0: SQRT_2PI * bracket ** (-sig), k0: (eps / math.sqrt(2.0)) * bracket ** (-float(s))}


def inflation_psi(s: float, eps: float, k0: int, N: int) -> SpectralState:
    """Constant <k0>^{-sigma(s)} plus (eps / sqrt(4 pi)) <k0>^{-s} e^{i k0 x}."""
    _check_mode(k0, N)
    return SpectralState.from_modes(_psi_modes(s, eps, k0), N)


def perturbation_phi(s: float, eps: float, k0: int, N: int) -> SpectralState:
    """(eps / sqrt(4 pi)) (1 + <k0>^{-s} e^{i k0 x}); its H^s norm is exactly eps."""
    _check_mode(k0, N)
    c = eps / math.sqrt(2.0)
    return SpectralState.from_modes({0: c, k0: c * (1.0 + k0) ** (-float(s))}, N)


def inflation_threshold(s: float, eps: float, k_max: int = 10 ** 18) -> int:
    """Smallest k0 with ||inflation_psi(s, eps, k0)||_{H^s} <= eps, by direct evaluation.

    The norm decreases in k0, so a doubling search followed by bisection applies.
    """
    def ok(k0: int) -> bool:
        # the H^s sum over the two nonzero modes; k0 can be far too large for a full state
        total = math.fsum((1.0 + abs(k)) ** (2.0 * s) * c ** 2 for k, c in _psi_modes(s, eps, k0).items())
        return math.sqrt(total) <= eps

    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > k_max:
            raise ValueError(f"no k0 <= {k_max} meets the norm constraint")
    lo = hi // 2
    if lo >= 1 and ok(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def random_smooth(N: int, seed: int, decay: float = 0.5, scale: float = 1.0) -> SpectralState:
    return SpectralState.random(N, np.random.default_rng(seed), decay=decay, scale=scale)
