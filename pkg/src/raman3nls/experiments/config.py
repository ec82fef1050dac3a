"""Experiment configuration: a YAML document mapped onto frozen dataclasses.

Equation coefficients accept exact rationals written as "p/q" strings (or
integers); these become ``Fraction`` and are written back in the same form,
so ``loads(dumps(cfg)) == cfg`` holds for every valid configuration.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from ..errors import ConfigError
from ..spectral_core import EquationParams

DATA_FAMILIES = ("lacunary", "psi", "phi", "gaussian", "random", "zero")


def parse_number(value, name: str):
    """int / "p/q" -> Fraction, float / decimal string -> float."""
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            if any(c in text for c in ".eE"):
                return float(text)
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{name}: cannot parse {value!r}") from exc
    raise ConfigError(f"{name}: expected a number, got {type(value).__name__}")


def format_number(value):
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return float(value)


@dataclass(frozen=True)
class DataSpec:
    family: str = "lacunary"
    s0: float = 1.0
    s: float = 2.0
    eps: float = 0.1
    k0: int = 8
    lam: float = 0.5
    delta: float = 0.05
    decay: float = 0.5


@dataclass(frozen=True)
class PicardSpec:
    r: float = 0.5
    c: float = 1.0 / 64.0
    grid_points: int = 65
    tol: float = 1e-12
    max_iter: int = 100
    max_halvings: int = 8
    lambdas: tuple[float, ...] = (0.1, 0.2, 0.4, 0.8)


@dataclass(frozen=True)
class GrowthSpec:
    fit_residual: float = 0.05
    min_window_points: int = 8
    min_window_fraction: float = 0.25
    probe_amplitude: float = 0.0
    reference_Gamma: float = 20.0


@dataclass(frozen=True)
class ExperimentConfig:
    alpha1: Any = Fraction(1)
    alpha2: Any = Fraction(2, 5)
    gamma1: Any = Fraction(1)
    gamma2: Any = Fraction(1)
    Gamma: Any = Fraction(20)
    N: int = 64
    dt: float | None = 1e-4
    T: float = 1.0
    store_every: int = 50
    data: DataSpec = field(default_factory=DataSpec)
    probes: tuple[int, ...] = (8,)
    hs_list: tuple[float, ...] = (1.0,)
    output_dir: str = "out"
    seed: int = 0
    picard: PicardSpec = field(default_factory=PicardSpec)
    growth: GrowthSpec = field(default_factory=GrowthSpec)
    verify_N: int = 8

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "gamma1", "gamma2", "Gamma"):
            object.__setattr__(self, name, parse_number(getattr(self, name), name))
        if self.N < 2:
            raise ConfigError("N must be at least 2")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.T == 0:
            raise ConfigError("T must be nonzero")
        if self.store_every < 1:
            raise ConfigError("store_every must be positive")
        if self.data.family not in DATA_FAMILIES:
            raise ConfigError(f"unknown data family {self.data.family!r}; expected one of {DATA_FAMILIES}")
        for p in self.probes:
            if abs(p) > self.N:
                raise ConfigError(f"probe mode {p} outside truncation N={self.N}")

    @property
    def params(self) -> EquationParams:
        return EquationParams(self.alpha1, self.alpha2, self.gamma1, self.gamma2, self.Gamma)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name in ("alpha1", "alpha2", "gamma1", "gamma2", "Gamma"):
                out[f.name] = format_number(v)
            elif dataclasses.is_dataclass(v):
                out[f.name] = {k: (list(x) if isinstance(x, tuple) else x)
                               for k, x in dataclasses.asdict(v).items()}
            elif isinstance(v, tuple):
                out[f.name] = list(v)
            else:
                out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a mapping")
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(raw) - set(known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        kwargs = {}
        sections = {"data": DataSpec, "picard": PicardSpec, "growth": GrowthSpec}
        for key, value in raw.items():
            if key in sections:
                kwargs[key] = _section(sections[key], value, key)
            elif key in ("probes",):
                kwargs[key] = tuple(int(x) for x in _as_list(value, key))
            elif key == "hs_list":
                kwargs[key] = tuple(float(x) for x in _as_list(value, key))
            else:
                kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _as_list(value, key):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{key} must be a list")
    return value


def _section(kind, value, key):
    if value is None:
        return kind()
    if not isinstance(value, dict):
        raise ConfigError(f"section {key!r} must be a mapping")
    names = {f.name: f for f in dataclasses.fields(kind)}
    unknown = set(value) - set(names)
    if unknown:
        raise ConfigError(f"unknown keys in {key!r}: {sorted(unknown)}")
    fixed = {}
    for k, v in value.items():
        default = getattr(kind(), k)
        if isinstance(default, tuple):
            fixed[k] = tuple(float(x) for x in _as_list(v, f"{key}.{k}"))
        elif isinstance(default, bool) or isinstance(default, str):
            fixed[k] = v
        elif isinstance(default, int):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{key}.{k} must be an integer")
            fixed[k] = v
        elif isinstance(default, float):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{key}.{k} must be a number")
            fixed[k] = float(v)
        else:
            fixed[k] = v
    return kind(**fixed)


def loads(text: str) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


def dumps(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=False)


def load(path: str | os.PathLike) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return loads(text)


def ensure_writable(directory: str | os.PathLike) -> Path:
    """Create the output directory if needed and check that files can be written there."""
    path = Path(directory)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")
    return path
