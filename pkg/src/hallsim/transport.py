"""Drude/Hall conductivities, regime classification and the plateau staircase."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .params import (PhysicalParams, ParameterError, conductance_quantum,
                     hall_parameter)
from .quantization import snap_sigma_H

CLASSICAL = "classical"
QUANTUM = "quantum"
CROSSOVER = "crossover"


@dataclass(frozen=True)
class ConductivityTensor:
    sigma_L: float
    sigma_H: float

    def matrix(self) -> np.ndarray:
        """2x2 tensor with j_m = sigma_L E_m + sigma_H eps_{nm} E_n, eps_12 = 1."""
        return np.array([[self.sigma_L, -self.sigma_H],
                         [self.sigma_H, self.sigma_L]])

    def apply(self, E1, E2):
        return (self.sigma_L * E1 - self.sigma_H * E2,
                self.sigma_L * E2 + self.sigma_H * E1)


@dataclass(frozen=True)
class Thresholds:
    classical: float = 0.1
    quantum: float = 10.0

    def __post_init__(self):
        if not self.classical < self.quantum:
            raise ParameterError("classical threshold must lie below the quantum one")


@dataclass(frozen=True)
class Regime:
    kind: str
    hall_parameter: float
    action_ratio: float


def drude_sigma0(p: PhysicalParams) -> float:
    return p.e**2 * p.n * p.tau / p.mu


def drude_closed_form(sigma0, wct):
    """(sigma_L, sigma_H) for arrays or scalars of sigma_0 and omega_c tau."""
    denom = 1.0 + wct * wct
    return sigma0 / denom, sigma0 * wct / denom


def conductivity_classical(p: PhysicalParams) -> ConductivityTensor:
    sL, sH = drude_closed_form(drude_sigma0(p), hall_parameter(p))
    return ConductivityTensor(sL, sH)


def conductivity_quantum_limit(p: PhysicalParams) -> ConductivityTensor:
    if p.B == 0:
        raise ParameterError("quantum limit undefined at zero field")
    return ConductivityTensor(0.0, p.n * p.e / p.B)


def classify_regime(p: PhysicalParams, s_cs: float = 1.0,
                    thresholds: Thresholds = Thresholds()) -> Regime:
    wct = hall_parameter(p)
    if wct >= thresholds.quantum:
        kind = QUANTUM
    elif wct <= thresholds.classical:
        kind = CLASSICAL
    else:
        kind = CROSSOVER
    sigma_H = conductivity_classical(p).sigma_H
    return Regime(kind, wct, sigma_H * s_cs / p.hbar)


def filling(p: PhysicalParams) -> float:
    """n e / B expressed in units of e^2/h."""
    return p.n * p.e / p.B / conductance_quantum(p)


def plateau_staircase(p_base: PhysicalParams, sweep: Sequence[float]):
    """[(B, sigma_H continuous, sigma_H quantized)] for each field in ``sweep``."""
    sweep = list(sweep)
    if not sweep:
        raise ParameterError("empty sweep")
    if any(not (b > 0) for b in sweep):
        raise ParameterError("staircase fields must be positive")
    rows = []
    for b in sweep:
        cont = filling(p_base.with_(B=float(b)))
        rows.append((float(b), cont, snap_sigma_H(cont)))
    return rows


@dataclass(frozen=True)
class SweepRow:
    B: float
    omega_c_tau: float
    sigma_L: float
    sigma_H: float
    sigma_H_quantized: int
    regime: str

    FIELDS = ("B", "omega_c_tau", "sigma_L", "sigma_H", "sigma_H_quantized", "regime")


def sweep_point(p: PhysicalParams, s_cs: float = 1.0,
                thresholds: Thresholds = Thresholds()) -> SweepRow:
    sigma = conductivity_classical(p)
    reg = classify_regime(p, s_cs, thresholds)
    snapped = snap_sigma_H(filling(p)) if p.B > 0 else 0
    g = conductance_quantum(p)
    return SweepRow(p.B, reg.hall_parameter, sigma.sigma_L / g, sigma.sigma_H / g,
                    snapped, reg.kind)


def sweep(p_base: PhysicalParams, values: Sequence[float], variable: str = "B",
          s_cs: float = 1.0, thresholds: Thresholds = Thresholds(),
          executor=None) -> list[SweepRow]:
    """Evaluate the Drude tensor over a field (``B``) or relaxation-time (``tau``) grid.

    Sweeping B keeps sigma_0 fixed; sweeping tau keeps (n, B) fixed so that
    sigma_H approaches n e/B while sigma_L falls off as 1/(omega_c tau).
    """
    values = [float(v) for v in values]
    if not values:
        raise ParameterError("empty sweep")
    if variable not in ("B", "tau"):
        raise ParameterError(f"cannot sweep {variable!r}")
    points = [p_base.with_(**{variable: v}) for v in values]
    fn = lambda q: sweep_point(q, s_cs, thresholds)  # noqa: E731
    if executor is None:
        return [fn(q) for q in points]
    return list(executor.map(fn, points))


def parse_grid(spec: str) -> list[float]:
    """``log:lo:hi:n``, ``lin:lo:hi:n`` or a comma-separated list."""
    spec = spec.strip()
    if not spec:
        return []
    kind, _, rest = spec.partition(":")
    if kind in ("log", "lin") and rest:
        parts = rest.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {spec!r} needs lo:hi:n")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            return []
        if kind == "log":
            if lo <= 0 or hi <= 0:
                raise ValueError("log grid bounds must be positive")
            return list(np.logspace(math.log10(lo), math.log10(hi), n))
        return list(np.linspace(lo, hi, n))
    return [float(x) for x in spec.split(",") if x.strip()]
