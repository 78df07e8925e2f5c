"""Spectral analysis of the generalized Kratzer potential V(x) = g1/x + g2/x^2."""

from .errors import KratzerError
from .model import CouplingParams, ExtensionParam, classify, extension
from .spectral import (DiscreteLevel, SpectrumReport, assemble_spectrum, continuum_density,
                       discrete_spectrum, threshold_param)
from .greens import green

__all__ = [
    "KratzerError", "CouplingParams", "ExtensionParam", "classify", "extension",
    "DiscreteLevel", "SpectrumReport", "assemble_spectrum", "continuum_density",
    "discrete_spectrum", "threshold_param", "green",
]
