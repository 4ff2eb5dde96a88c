"""Physical parameters, unit conventions and derived scalars.

Natural units set e = hbar = mass = 1. In that mode every conductance is
read as a multiple of e^2/h, following the convention that the quantized
gauge potentials absorb the coupling constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy import constants as _sc

NATURAL = "natural"
SI = "si"


class ParameterError(ValueError):
    """Raised when a parameter set violates its physical invariants."""


@dataclass(frozen=True)
class PhysicalParams:
    """The symbol set {e, hbar, mu, tau, n, B}.

    ``mu`` is the carrier mass and ``B`` the applied perpendicular field,
    oriented so that ``B = d2 A1 - d1 A2`` for the lattice gauge fields.
    """

    e: float = 1.0
    hbar: float = 1.0
    mu: float = 1.0
    tau: float = 1.0
    n: float = 1.0
    B: float = 1.0
    units: str = NATURAL

    def __post_init__(self):
        for name in ("e", "hbar", "mu", "tau"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise ParameterError(f"{name} must be positive, got {v}")
        for name in ("n", "B"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ParameterError(f"{name} must be non-negative, got {v}")
        if self.units not in (NATURAL, SI):
            raise ParameterError(f"unknown unit system {self.units!r}")
        if self.units == NATURAL and (self.e, self.hbar, self.mu) != (1.0, 1.0, 1.0):
            raise ParameterError("natural units require e = hbar = mu = 1")

    def with_(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class UnitSystem:
    """Reference scales linking natural and SI values.

    ``charge``, ``action`` and ``mass`` are the SI values that map to 1 in
    natural units; ``length`` fixes the remaining free scale.
    """

    mode: str = NATURAL
    charge: float = 1.0
    action: float = 1.0
    mass: float = 1.0
    length: float = 1.0

    @classmethod
    def si(cls, length: float = 1e-9, charge: float = _sc.e,
           action: float = _sc.hbar, mass: float = _sc.m_e) -> "UnitSystem":
        return cls(SI, charge, action, mass, length)

    @classmethod
    def for_params(cls, p: PhysicalParams, length: float = 1e-9) -> "UnitSystem":
        """Scales taken from an SI parameter set, so its image is exactly natural."""
        if p.units != SI:
            raise ParameterError("for_params expects SI parameters")
        return cls(SI, p.e, p.hbar, p.mu, length)

    @property
    def time(self) -> float:
        return self.mass * self.length**2 / self.action

    @property
    def field(self) -> float:
        return self.action / (self.charge * self.length**2)

    @property
    def density(self) -> float:
        return 1.0 / self.length**2

    @property
    def conductance(self) -> float:
        return self.charge**2 / self.action

    def to_natural(self, p: PhysicalParams) -> PhysicalParams:
        if p.units == NATURAL:
            return p
        e = p.e / self.charge
        hbar = p.hbar / self.action
        mu = p.mu / self.mass
        # snap exact identities lost to round-off in the division
        e, hbar, mu = (1.0 if abs(x - 1.0) < 1e-12 else x for x in (e, hbar, mu))
        if (e, hbar, mu) != (1.0, 1.0, 1.0):
            raise ParameterError("unit scales do not match the parameter constants")
        return PhysicalParams(e, hbar, mu, p.tau / self.time, p.n / self.density,
                              p.B / self.field)

    def to_si(self, p: PhysicalParams) -> PhysicalParams:
        if p.units == SI:
            return p
        return PhysicalParams(p.e * self.charge, p.hbar * self.action, p.mu * self.mass,
                              p.tau * self.time, p.n * self.density, p.B * self.field,
                              units=SI)


def si_electron(tau: float = 1e-12, n: float = 1e15, B: float = 10.0) -> PhysicalParams:
    """SI parameters for a free-electron 2D gas (CODATA constants)."""
    return PhysicalParams(_sc.e, _sc.hbar, _sc.m_e, tau, n, B, units=SI)


def cyclotron_frequency(p: PhysicalParams) -> float:
    return p.e * p.B / p.mu


def hall_parameter(p: PhysicalParams) -> float:
    """omega_c * tau; >> 1 marks the quantum regime, << 1 the classical one."""
    return cyclotron_frequency(p) * p.tau


def magnetic_length(p: PhysicalParams) -> float:
    if p.B == 0:
        raise ParameterError("magnetic length undefined at zero field")
    return math.sqrt(p.hbar / (p.e * p.B))


def conductance_quantum(p: PhysicalParams) -> float:
    """e^2/h in the units of ``p`` (taken as 1 in natural units)."""
    if p.units == NATURAL:
        return 1.0
    return p.e**2 / (2 * math.pi * p.hbar)
