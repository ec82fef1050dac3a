"""Fourier-side representation of periodic functions on the torus [0, 2*pi).

Coefficients follow the unitary convention

    f_hat(k) = (2*pi)**-0.5 * integral_T exp(-i k x) f(x) dx,
    f(x)     = (2*pi)**-0.5 * sum_k f_hat(k) exp(i k x),

so that ||f||_{L^2} = ||f_hat||_{l^2} and the product rule reads
(fg)^(k) = (2*pi)**-0.5 * sum_l f_hat(k - l) g_hat(l).

A truncated state stores the 2N+1 modes k = -N..N at array slots k + N.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Callable, Union

import numpy as np
import scipy.fft as sfft

from .errors import TruncationMismatchError, WeightOverflowError

Number = Union[float, int, Fraction]

SQRT_2PI = np.sqrt(2.0 * np.pi)
WEIGHT_GUARD = 300.0
INTEGER_TOL = 1e-12


def _as_exact(x):
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return Fraction(x)
    return None


@dataclass(frozen=True)
class EquationParams:
    """Real coefficients of

        u_t = alpha1 u_xxx + i alpha2 u_xx + i gamma1 |u|^2 u
              + gamma2 (|u|^2 u)_x - i Gamma u (|u|^2)_x.

    Values may be floats or ``Fraction``; fractions keep the phase
    function in exact arithmetic. Construction never rejects values.
    """

    alpha1: Number = 0.0
    alpha2: Number = 0.0
    gamma1: Number = 0.0
    gamma2: Number = 0.0
    Gamma: Number = 0.0

    def floats(self) -> tuple[float, float, float, float, float]:
        return (float(self.alpha1), float(self.alpha2), float(self.gamma1),
                float(self.gamma2), float(self.Gamma))

    @property
    def is_exact(self) -> bool:
        return all(_as_exact(v) is not None for v in
                   (self.alpha1, self.alpha2, self.gamma1, self.gamma2, self.Gamma))

    def resonance_ratio(self):
        """2*alpha2 / (3*alpha1); exact when both are rational. None if alpha1 == 0."""
        if self.alpha1 == 0:
            return None
        a1, a2 = _as_exact(self.alpha1), _as_exact(self.alpha2)
        if a1 is not None and a2 is not None:
            return 2 * a2 / (3 * a1)
        return 2.0 * float(self.alpha2) / (3.0 * float(self.alpha1))

    def ratio_is_integer(self) -> bool:
        q = self.resonance_ratio()
        if q is None:
            return False
        if isinstance(q, Fraction):
            return q.denominator == 1
        return abs(q - round(q)) <= INTEGER_TOL

    @property
    def satisfies_assumptions(self) -> bool:
        """Gamma > 0, alpha1 != 0 and 2 alpha2/(3 alpha1) not an integer."""
        return self.Gamma > 0 and self.alpha1 != 0 and not self.ratio_is_integer()

    def replace(self, **changes) -> "EquationParams":
        values = dict(alpha1=self.alpha1, alpha2=self.alpha2, gamma1=self.gamma1,
                      gamma2=self.gamma2, Gamma=self.Gamma)
        values.update(changes)
        return EquationParams(**values)


@dataclass(frozen=True, eq=False)
class SpectralState:
    """Truncated Fourier coefficients u_hat(k), |k| <= trunc, at one time."""

    coeffs: np.ndarray
    trunc: int
    time: float = 0.0

    def __post_init__(self):
        if int(self.trunc) != self.trunc or self.trunc < 0:
            raise ValueError(f"trunc must be a non-negative integer, got {self.trunc!r}")
        c = np.array(self.coeffs, dtype=np.complex128, copy=True).reshape(-1)
        if c.size != 2 * self.trunc + 1:
            raise ValueError(f"expected {2 * self.trunc + 1} coefficients for N={self.trunc}, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise FloatingPointError("non-finite Fourier coefficient")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "trunc", int(self.trunc))
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def zeros(cls, N: int, time: float = 0.0) -> "SpectralState":
        return cls(np.zeros(2 * N + 1, dtype=np.complex128), N, time)

    @classmethod
    def from_modes(cls, modes: dict[int, complex], N: int, time: float = 0.0) -> "SpectralState":
        c = np.zeros(2 * N + 1, dtype=np.complex128)
        for k, v in modes.items():
            if abs(k) > N:
                raise ValueError(f"mode {k} outside truncation N={N}")
            c[k + N] += v
        return cls(c, N, time)

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], N: int,
                      grid: int | None = None, time: float = 0.0) -> "SpectralState":
        """Coefficients of a smooth periodic function sampled on a uniform grid."""
        M = grid or sfft.next_fast_len(8 * N + 2)
        x = 2.0 * np.pi * np.arange(M) / M
        return cls(grid_to_coeffs(np.asarray(f(x), dtype=np.complex128), N), N, time)

    @classmethod
    def random(cls, N: int, rng: np.random.Generator, decay: float = 0.0,
               scale: float = 1.0, time: float = 0.0) -> "SpectralState":
        """Gaussian random coefficients with envelope exp(-decay |k|)."""
        k = np.arange(-N, N + 1)
        c = (rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)) / np.sqrt(2.0)
        return cls(scale * c * np.exp(-decay * np.abs(k)), N, time)

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.trunc, self.trunc + 1)

    def mode(self, k: int) -> complex:
        if abs(k) > self.trunc:
            return 0j
        return complex(self.coeffs[k + self.trunc])

    def with_coeffs(self, coeffs, time: float | None = None) -> "SpectralState":
        return SpectralState(coeffs, self.trunc, self.time if time is None else time)

    def at_time(self, time: float) -> "SpectralState":
        return SpectralState(self.coeffs, self.trunc, time)

    def scaled(self, factor: complex) -> "SpectralState":
        return self.with_coeffs(factor * self.coeffs)

    def conj_hat(self) -> "SpectralState":
        """Coefficients of the complex conjugate function: conj(u_hat(-k))."""
        return self.with_coeffs(np.conj(self.coeffs[::-1]))

    def to_grid(self, M: int) -> np.ndarray:
        return coeffs_to_grid(self.coeffs, M)

    def __add__(self, other: "SpectralState") -> "SpectralState":
        check_same_trunc(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralState") -> "SpectralState":
        check_same_trunc(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, factor) -> "SpectralState":
        return self.scaled(factor)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralState":
        return self.scaled(-1.0)

    def __repr__(self) -> str:
        return f"SpectralState(N={self.trunc}, time={self.time:g}, l2={l2_norm(self):.6g})"


def check_same_trunc(*states: SpectralState) -> int:
    N = states[0].trunc
    for s in states[1:]:
        if s.trunc != N:
            raise TruncationMismatchError(f"truncations differ: {N} vs {s.trunc}")
    return N


# ---------------------------------------------------------------------------
# grid transforms (transient physical-space representation)
# ---------------------------------------------------------------------------

def coeffs_to_grid(coeffs: np.ndarray, M: int) -> np.ndarray:
    """Values (2pi)^-1/2 sum_k c_k e^{ikx_j} at x_j = 2 pi j / M, along the last axis."""
    coeffs = np.asarray(coeffs)
    N = (coeffs.shape[-1] - 1) // 2
    if M < 2 * N + 1:
        raise ValueError(f"grid of {M} points cannot hold {2 * N + 1} modes")
    padded = np.zeros(coeffs.shape[:-1] + (M,), dtype=np.complex128)
    padded[..., :N + 1] = coeffs[..., N:]
    if N:
        padded[..., M - N:] = coeffs[..., :N]
    return sfft.ifft(padded, axis=-1) * (M / SQRT_2PI)


def grid_to_coeffs(values: np.ndarray, N: int) -> np.ndarray:
    """Coefficients |k| <= N of grid values; exact for band limits below M - N."""
    values = np.asarray(values)
    M = values.shape[-1]
    spec = sfft.fft(values, axis=-1) * (SQRT_2PI / M)
    out = np.empty(values.shape[:-1] + (2 * N + 1,), dtype=np.complex128)
    out[..., N:] = spec[..., :N + 1]
    if N:
        out[..., :N] = spec[..., M - N:]
    return out


def fast_grid_size(N: int) -> int:
    """Smallest FFT-friendly grid with no aliasing of cubic products onto |k| <= N."""
    return sfft.next_fast_len(4 * N + 2)


def grid_wavenumbers(M: int) -> np.ndarray:
    return sfft.fftfreq(M, 1.0 / M)


# ---------------------------------------------------------------------------
# norms and scalar functionals
# ---------------------------------------------------------------------------

def l2_norm(state: SpectralState) -> float:
    return float(np.sqrt(np.sum(np.abs(state.coeffs) ** 2)))


def bracket(k) -> np.ndarray:
    """<k> = 1 + |k|."""
    return 1.0 + np.abs(k)


def hs_norm(state: SpectralState, s: float) -> float:
    w = bracket(state.k) ** float(s)
    return float(np.sqrt(np.sum((w * np.abs(state.coeffs)) ** 2)))


def check_weight(r: float, N: int) -> None:
    if r * N > WEIGHT_GUARD:
        raise WeightOverflowError(f"r*N = {r * N:g} exceeds the guard {WEIGHT_GUARD:g}")


def ar_norm(state: SpectralState, r: float) -> float:
    """||f||_{A(r)} = sum_k e^{r|k|} |f_hat(k)|."""
    check_weight(r, state.trunc)
    return float(np.sum(np.exp(r * np.abs(state.k)) * np.abs(state.coeffs)))


def momentum(state: SpectralState) -> float:
    """P[u] = sum_k k |u_hat(k)|^2 = Im integral conj(u) u_x dx."""
    return float(np.sum(state.k * np.abs(state.coeffs) ** 2))


# ---------------------------------------------------------------------------
# linear operators
# ---------------------------------------------------------------------------

def derivative(state: SpectralState, order: int = 1) -> SpectralState:
    return state.with_coeffs((1j * state.k) ** order * state.coeffs)


def antiderivative_symbol(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k)
    out = np.zeros(k.shape, dtype=np.complex128)
    nz = k != 0
    out[nz] = 1.0 / (1j * k[nz])
    return out


def antiderivative(state: SpectralState) -> SpectralState:
    """Mean-free primitive: multiplies by 1/(ik) for k != 0 and drops mode 0."""
    return state.with_coeffs(antiderivative_symbol(state.k) * state.coeffs)


PROJECTIONS = ("P+", "P-", "P0", "P!=0")


def project(state: SpectralState, which: str) -> SpectralState:
    k = state.k
    masks = {"P+": k > 0, "P-": k < 0, "P0": k == 0, "P!=0": k != 0}
    if which not in masks:
        raise ValueError(f"unknown projection {which!r}; expected one of {PROJECTIONS}")
    return state.with_coeffs(np.where(masks[which], state.coeffs, 0))


def dispersion(params: EquationParams, k) -> np.ndarray:
    """omega(k) = alpha1 k^3 + alpha2 k^2, so that the linear flow is e^{-i omega t}."""
    a1, a2 = float(params.alpha1), float(params.alpha2)
    k = np.asarray(k, dtype=np.float64)
    return a1 * k ** 3 + a2 * k ** 2


def linear_propagator(state: SpectralState, params: EquationParams, dt: float) -> SpectralState:
    phase = np.exp(-1j * dispersion(params, state.k) * dt)
    return SpectralState(phase * state.coeffs, state.trunc, state.time + dt)


# ---------------------------------------------------------------------------
# cubic convolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CubicWeight:
    """Weight const + out*k + pair*(k1 + k2) on mode triples with k = k1 + k2 + k3.

    These are the only weights the FFT path evaluates; every other callable
    weight goes through direct summation.
    """

    const: complex = 0.0
    out: complex = 0.0
    pair: complex = 0.0

    def __call__(self, k1, k2, k3):
        k1, k2, k3 = (np.asarray(x) for x in (k1, k2, k3))
        return self.const + self.out * (k1 + k2 + k3) + self.pair * (k1 + k2)

    @property
    def is_zero(self) -> bool:
        return self.const == 0 and self.out == 0 and self.pair == 0


def supports_fast(weight) -> bool:
    return isinstance(weight, CubicWeight)


def equation_weight(params: EquationParams) -> CubicWeight:
    """(i gamma1 + i gamma2 k + Gamma (k1 + k2)) / (2 pi)."""
    _, _, g1, g2, G = params.floats()
    return CubicWeight(const=1j * g1 / (2 * np.pi), out=1j * g2 / (2 * np.pi), pair=G / (2 * np.pi))


@dataclass(frozen=True, eq=False)
class TripleIndex:
    """All (k1, k2, k3) with |kj| <= N and |k1 + k2 + k3| <= N.

    Triples are sorted by output mode, then k1, then k2, so every per-mode
    reduction runs in ascending order.
    """

    N: int
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.k.size

    def reduce(self, values: np.ndarray, select: np.ndarray | None = None) -> np.ndarray:
        """Sum per-triple values into output modes (fixed, sequential order)."""
        slots = self.k + self.N
        if select is not None:
            slots = slots[select]
        n = 2 * self.N + 1
        values = np.asarray(values)
        if np.iscomplexobj(values):
            return (np.bincount(slots, weights=values.real, minlength=n)
                    + 1j * np.bincount(slots, weights=values.imag, minlength=n))
        return np.bincount(slots, weights=values, minlength=n).astype(np.complex128)

    def product(self, c1: np.ndarray, c2: np.ndarray, c3: np.ndarray,
                select: np.ndarray | None = None) -> np.ndarray:
        """u1_hat(k1) * conj(u2_hat(-k2)) * u3_hat(k3) for each triple."""
        N = self.N
        k1, k2, k3 = self.k1, self.k2, self.k3
        if select is not None:
            k1, k2, k3 = k1[select], k2[select], k3[select]
        return c1[k1 + N] * np.conj(c2[N - k2]) * c3[k3 + N]


@functools.lru_cache(maxsize=8)
def triple_index(N: int) -> TripleIndex:
    ks = np.arange(-N, N + 1)
    k1, k2, k3 = (a.reshape(-1) for a in np.meshgrid(ks, ks, ks, indexing="ij"))
    k = k1 + k2 + k3
    keep = np.abs(k) <= N
    k1, k2, k3, k = k1[keep], k2[keep], k3[keep], k[keep]
    order = np.lexsort((k3, k2, k1, k))
    arrays = [a[order].astype(np.int64) for a in (k1, k2, k3, k)]
    for a in arrays:
        a.flags.writeable = False
    return TripleIndex(N, *arrays)


def _direct_cubic(c1, c2, c3, N, weight) -> np.ndarray:
    idx = triple_index(N)
    w = np.broadcast_to(np.asarray(weight(idx.k1, idx.k2, idx.k3)), idx.k.shape)
    return idx.reduce(w * idx.product(c1, c2, c3))


def fast_cubic_coeffs(c1: np.ndarray, c2: np.ndarray, c3: np.ndarray,
                      weight: CubicWeight) -> np.ndarray:
    """Zero-padded FFT evaluation of the weighted triple sum along the last axis.

    Works on batches: leading axes of the coefficient arrays are carried through.
    """
    N = (np.shape(c1)[-1] - 1) // 2
    out_shape = np.broadcast_shapes(np.shape(c1), np.shape(c2), np.shape(c3))
    if weight.is_zero:
        return np.zeros(out_shape, dtype=np.complex128)
    M = fast_grid_size(N)
    f1 = coeffs_to_grid(c1, M)
    f2c = np.conj(coeffs_to_grid(c2, M))
    f3 = coeffs_to_grid(c3, M)
    # triple sum = 2 pi * (product)^(k); grid_to_coeffs carries the (2 pi)^{1/2}/M factor
    total = np.zeros(out_shape, dtype=np.complex128)
    pair12 = f1 * f2c
    if weight.const != 0 or weight.out != 0:
        s0 = 2.0 * np.pi * grid_to_coeffs(pair12 * f3, N)
        k = np.arange(-N, N + 1)
        total = total + (weight.const + weight.out * k) * s0
    if weight.pair != 0:
        km = grid_wavenumbers(M)
        dpair = sfft.ifft(1j * km * sfft.fft(pair12, axis=-1), axis=-1)
        total = total + weight.pair * (-2j * np.pi) * grid_to_coeffs(dpair * f3, N)
    return total


def cubic_product(u1: SpectralState, u2: SpectralState, u3: SpectralState,
                  weight, method: str = "auto") -> SpectralState:
    """sum_{k1+k2+k3=k} weight(k1,k2,k3) u1_hat(k1) conj(u2_hat(-k2)) u3_hat(k3), |k| <= N.

    ``weight`` is a ``CubicWeight``, a scalar, or any vectorised callable of
    (k1, k2, k3). ``method`` is "fast", "direct" or "auto"; the fast path only
    accepts ``CubicWeight``.
    """
    N = check_same_trunc(u1, u2, u3)
    if isinstance(weight, (Real, complex, np.number)):
        weight = CubicWeight(const=complex(weight))
    if method == "auto":
        method = "fast" if supports_fast(weight) else "direct"
    if method == "fast":
        if not supports_fast(weight):
            raise ValueError("fast path only supports CubicWeight (const, out*k, pair*(k1+k2))")
        coeffs = fast_cubic_coeffs(u1.coeffs, u2.coeffs, u3.coeffs, weight)
    elif method == "direct":
        coeffs = _direct_cubic(u1.coeffs, u2.coeffs, u3.coeffs, N, weight)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SpectralState(coeffs, N, u1.time)


def physical_quadrature(f: Callable[[np.ndarray], np.ndarray], M: int) -> complex:
    """Trapezoidal rule for a periodic integrand on M points."""
    x = 2.0 * np.pi * np.arange(M) / M
    return complex(np.sum(f(x)) * (2.0 * np.pi / M))
