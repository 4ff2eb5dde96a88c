"""Lattice Schrodinger / Chern-Simons dynamics."""
from .action import ActionAccumulator, ActionError, chern_simons_action
from .fields import FREE, WITH_GAUGE_TERM, CurrentField, continuity_residual, current_density
from .lattice import LatticeError, LatticeState, curl, divergence, ring_index
from .runs import (DIAGNOSTIC_FIELDS, GaugeSpec, InsulatorError, PsiSpec, RegimeWarning,
                   RunReport, SimConfig, classical_gauge_run, hall_residual,
                   ohm_residual_classical, quantum_run, run)
from .stepping import GaugeError, StabilityError, hamiltonian, step_gauge, step_psi

__all__ = [
    "ActionAccumulator", "ActionError", "chern_simons_action", "FREE", "WITH_GAUGE_TERM",
    "CurrentField", "continuity_residual", "current_density", "LatticeError", "LatticeState",
    "curl", "divergence", "ring_index", "DIAGNOSTIC_FIELDS", "GaugeSpec", "InsulatorError",
    "PsiSpec", "RegimeWarning", "RunReport", "SimConfig", "classical_gauge_run",
    "hall_residual", "ohm_residual_classical", "quantum_run", "run", "GaugeError",
    "StabilityError", "hamiltonian", "step_gauge", "step_psi",
]
