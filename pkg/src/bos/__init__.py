"""Fourier discretisation and spectral analysis of a degenerate periodic operator."""

from .params import (
    AliasingError,
    FourierVector,
    GridError,
    GridFunction,
    OperatorParams,
    ParamsError,
    validate_params,
)

__all__ = [
    "AliasingError",
    "FourierVector",
    "GridError",
    "GridFunction",
    "OperatorParams",
    "ParamsError",
    "validate_params",
]
__version__ = "0.1.0"
