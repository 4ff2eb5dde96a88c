"""Semiclassical Schrodinger / Chern-Simons model of the classical and integer quantum Hall effect."""
from .params import PhysicalParams, ParameterError, UnitSystem, magnetic_length
from .transport import ConductivityTensor, classify_regime, conductivity_classical

__version__ = "0.1.0"

__all__ = ["PhysicalParams", "ParameterError", "UnitSystem", "magnetic_length",
           "ConductivityTensor", "classify_regime", "conductivity_classical"]
