"""Initial-data generators, experiments, verification suite, configuration and I/O."""

from .config import ExperimentConfig, dumps, load, loads
from .data import (inflation_psi, inflation_threshold, lacunary_data, lacunary_mass,
                   perturbation_phi, sigma_of_s)
from .growth import GrowthReport, growth_experiment

__all__ = ["ExperimentConfig", "GrowthReport", "dumps", "growth_experiment", "inflation_psi",
           "inflation_threshold", "lacunary_data", "lacunary_mass", "load", "loads",
           "perturbation_phi", "sigma_of_s"]
