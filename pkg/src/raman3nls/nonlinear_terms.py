"""Right-hand side in Fourier variables, the resonance phase and interaction regions.

Mode triples (k1, k2, k3) always carry the sign convention of the conjugated
middle factor: the summand is u_hat(k1) * conj(u_hat(-k2)) * u_hat(k3) and the
output mode is k = k1 + k2 + k3.
"""

from __future__ import annotations

import enum
import functools

import numpy as np

from .spectral_core import (CubicWeight, EquationParams, SpectralState, _as_exact, cubic_product,
                            dispersion, equation_weight, l2_norm, momentum, triple_index)


# ---------------------------------------------------------------------------
# phase
# ---------------------------------------------------------------------------

def _is_int_scalar(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def phase_phi(params: EquationParams, k1, k2, k3):
    """Resonance phase of the triple (k1, k2, k3).

    Factored form 3 a1 (k1+k2)(k2+k3)(k3+k1 + 2 a2/(3 a1)); for a1 = 0 it is
    2 a2 (k1+k2)(k2+k3). Integer scalars with rational parameters give an exact
    ``Fraction``; arrays give float64.
    """
    a1, a2 = params.alpha1, params.alpha2
    s12, s23, s31 = k1 + k2, k2 + k3, k3 + k1
    if all(_is_int_scalar(k) for k in (k1, k2, k3)):
        e1, e2 = _as_exact(a1), _as_exact(a2)
        if e1 is not None and e2 is not None:
            s12, s23, s31 = int(s12), int(s23), int(s31)
            if e1 == 0:
                return 2 * e2 * s12 * s23
            return 3 * e1 * s12 * s23 * (s31 + 2 * e2 / (3 * e1))
    a1, a2 = float(a1), float(a2)
    s12, s23, s31 = (np.asarray(s, dtype=np.float64) for s in (s12, s23, s31))
    # bracket distributed: no division by a1, so tiny a1 cannot overflow
    return s12 * s23 * (3.0 * a1 * s31 + 2.0 * a2)


def phase_phi_expanded(params: EquationParams, k1, k2, k3):
    """Difference of dispersion symbols: omega(k) - omega(k1) + omega(-k2) - omega(k3)."""
    k = k1 + k2 + k3
    if all(_is_int_scalar(x) for x in (k1, k2, k3)):
        e1, e2 = _as_exact(params.alpha1), _as_exact(params.alpha2)
        if e1 is not None and e2 is not None:
            k1, k2, k3, k = int(k1), int(k2), int(k3), int(k)
            return (e1 * (k ** 3 - k1 ** 3 - k2 ** 3 - k3 ** 3)
                    + e2 * (k ** 2 - k1 ** 2 + k2 ** 2 - k3 ** 2))
    k1, k2, k3, k = (np.asarray(x, dtype=np.float64) for x in (k1, k2, k3, k))
    return (dispersion(params, k) - dispersion(params, k1)
            + dispersion(params, -k2) - dispersion(params, k3))


def phase_phi_rational(params: EquationParams, k1, k2, k3, expanded: bool = False):
    """Exact vectorised phase as (integer numerators, common denominator).

    Requires rational alpha1, alpha2. Numerators are int64 arrays; magnitudes
    stay far from overflow for |kj| up to a few thousand.
    """
    e1, e2 = _as_exact(params.alpha1), _as_exact(params.alpha2)
    if e1 is None or e2 is None:
        raise TypeError("exact phase needs rational alpha1 and alpha2")
    p1, q1 = e1.numerator, e1.denominator
    p2, q2 = e2.numerator, e2.denominator
    k1, k2, k3 = (np.asarray(x, dtype=np.int64) for x in (k1, k2, k3))
    k = k1 + k2 + k3
    if expanded:
        cubic = k ** 3 - k1 ** 3 - k2 ** 3 - k3 ** 3
        quad = k ** 2 - k1 ** 2 + k2 ** 2 - k3 ** 2
        num = p1 * q2 * cubic + p2 * q1 * quad
    else:
        s12, s23, s31 = k1 + k2, k2 + k3, k3 + k1
        # 3 a1 s12 s23 (s31 + 2 a2/(3 a1)) with the bracket distributed
        num = 3 * p1 * q2 * s12 * s23 * s31 + 2 * p2 * q1 * s12 * s23
    return num, q1 * q2


@functools.lru_cache(maxsize=32)
def phase_table(N: int, params: EquationParams) -> np.ndarray:
    """Float phase on every triple of ``triple_index(N)``."""
    idx = triple_index(N)
    phi = np.asarray(phase_phi(params, idx.k1, idx.k2, idx.k3), dtype=np.float64)
    phi.flags.writeable = False
    return phi


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

class RegionTag(enum.Enum):
    RESONANT = "resonant"
    D1 = "D1"
    D2_PLAIN = "D2_plain"
    D2_1 = "D2_1"
    D2_2 = "D2_2"
    D2_3 = "D2_3"
    D1PRIME = "D1prime"
    D2PRIME = "D2prime"

    @property
    def in_d2(self) -> bool:
        return self in (RegionTag.D2_PLAIN, RegionTag.D2_1, RegionTag.D2_2, RegionTag.D2_3)


VARIANTS = ("cubic", "schrodinger")


def _region_arrays(k1, k2, k3):
    a1, a2, a3 = np.abs(k1), np.abs(k2), np.abs(k3)
    in_d = (k1 + k2) * (k2 + k3) != 0
    d1 = in_d & (a2 <= 4 * a1) & (a1 <= 4 * a2) & (a2 <= 4 * a3) & (a3 <= 4 * a2)
    d2 = in_d & ~d1
    d21 = d2 & (a1 > 4 * np.maximum(a2, a3))
    d22 = d2 & (a2 > 4 * np.maximum(a1, a3))
    d23 = d2 & (a3 > 4 * np.maximum(a1, a2))
    d2_plain = d2 & ~(d21 | d22 | d23)
    d1p = in_d & ((a2 <= 4 * a1) | (a2 <= 4 * a3))
    d2p = in_d & ~d1p
    return {"D": in_d, "D1": d1, "D2": d2, "D2_1": d21, "D2_2": d22, "D2_3": d23,
            "D2_plain": d2_plain, "D1prime": d1p, "D2prime": d2p}


def classify(k1: int, k2: int, k3: int, variant: str = "cubic") -> RegionTag:
    """Region containing the triple; ``RegionTag.RESONANT`` when (k1+k2)(k2+k3) = 0."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    m = {key: bool(v) for key, v in _region_arrays(np.int64(k1), np.int64(k2), np.int64(k3)).items()}
    if not m["D"]:
        return RegionTag.RESONANT
    if variant == "schrodinger":
        return RegionTag.D1PRIME if m["D1prime"] else RegionTag.D2PRIME
    if m["D1"]:
        return RegionTag.D1
    for key in ("D2_1", "D2_2", "D2_3"):
        if m[key]:
            return RegionTag(key)
    return RegionTag.D2_PLAIN


@functools.lru_cache(maxsize=8)
def region_masks(N: int) -> dict[str, np.ndarray]:
    """Boolean masks over ``triple_index(N)`` for D, D1, D2, D2_j, D2_plain, D1prime, D2prime.

    Also provides "R2", the triples with k1+k2 != 0 and k2+k3 = 0.
    """
    idx = triple_index(N)
    masks = _region_arrays(idx.k1, idx.k2, idx.k3)
    masks["R2"] = ((idx.k1 + idx.k2) != 0) & ((idx.k2 + idx.k3) == 0)
    for m in masks.values():
        m.flags.writeable = False
    return masks


# ---------------------------------------------------------------------------
# right-hand side and the Raman split
# ---------------------------------------------------------------------------

def rhs_nonlinear(state: SpectralState, params: EquationParams, method: str = "fast") -> SpectralState:
    """Cubic part: sum of (i g1 + i g2 k + Gamma (k1+k2))/(2 pi) u(k1) conj(u(-k2)) u(k3)."""
    return cubic_product(state, state, state, equation_weight(params), method=method)


def rhs_full(state: SpectralState, params: EquationParams, method: str = "fast") -> SpectralState:
    """Time derivative of every retained coefficient under the Galerkin system."""
    lin = -1j * dispersion(params, state.k) * state.coeffs
    return state.with_coeffs(lin + rhs_nonlinear(state, params, method).coeffs)


def _masked_sum(state: SpectralState, values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    idx = triple_index(state.trunc)
    c = state.coeffs
    return idx.reduce(values[mask] * idx.product(c, c, c, select=mask), select=mask)


def raman_resonant_split(state: SpectralState) -> tuple[SpectralState, SpectralState]:
    """Nonresonant and resonant parts of the transform of i u (|u|^2)_x."""
    N = state.trunc
    idx = triple_index(N)
    masks = region_masks(N)
    weight = -(idx.k1 + idx.k2) / (2.0 * np.pi)
    i1 = _masked_sum(state, weight, masks["D"])
    i2 = _masked_sum(state, weight, masks["R2"])
    return state.with_coeffs(i1), state.with_coeffs(i2)


def i2_closed_form(state: SpectralState) -> SpectralState:
    """Resonant Raman part as a mode-wise multiplier ((P - k ||u||^2) / (2 pi))."""
    mult = (momentum(state) - state.k * l2_norm(state) ** 2) / (2.0 * np.pi)
    return state.with_coeffs(mult * state.coeffs)


def raman_full(state: SpectralState, method: str = "fast") -> SpectralState:
    """Transform of i u (|u|^2)_x with no constraint on the triples."""
    return cubic_product(state, state, state, CubicWeight(pair=-1.0 / (2.0 * np.pi)), method=method)
