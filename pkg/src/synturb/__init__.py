"""Synthetic turbulence with power-law spectrum and OU time correlation.

Pair dispersion, passive-scalar transport and white-noise (Kraichnan) limit
oracles.  The hot loops run in a compiled extension when it is built; see
:mod:`synturb.kernels`.
"""
__version__ = "0.1.0"

from .params import (  # noqa: E402
    ParameterError,
    RegimeReport,
    ScalingExponents,
    SpectrumParams,
    c_alpha,
    classify_regime,
    energy_spectrum,
    exponents,
    lanczos_gamma,
    make_params,
    reynolds_ratio,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "ParameterError",
    "RegimeReport",
    "ScalingExponents",
    "SpectrumParams",
    "c_alpha",
    "classify_regime",
    "energy_spectrum",
    "exponents",
    "lanczos_gamma",
    "make_params",
    "reynolds_ratio",
]
