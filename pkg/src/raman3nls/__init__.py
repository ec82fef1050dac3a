"""Pseudospectral laboratory for a third-order NLS equation with Raman scattering on the torus."""

from .errors import (BlowUpError, ConfigError, InvalidParametersError, NoContractionError,
                     Raman3NLSError, TruncationMismatchError, WeightOverflowError,
                     WindowSelectionError, ZeroDataError)
from .spectral_core import (CubicWeight, EquationParams, SpectralState, ar_norm, cubic_product,
                            hs_norm, l2_norm, momentum)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "ConfigError", "CubicWeight", "EquationParams", "InvalidParametersError",
    "NoContractionError", "Raman3NLSError", "SpectralState", "TruncationMismatchError",
    "WeightOverflowError", "WindowSelectionError", "ZeroDataError", "ar_norm", "cubic_product",
    "hs_norm", "l2_norm", "momentum",
]
