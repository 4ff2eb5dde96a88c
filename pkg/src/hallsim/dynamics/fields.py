"""Charge current densities and the continuity diagnostic."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import PhysicalParams
from .lattice import LatticeState, d1, d2, divergence

WITH_GAUGE_TERM = "a"
FREE = "b"


@dataclass
class CurrentField:
    j1: np.ndarray
    j2: np.ndarray
    definition_tag: str

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.j1, self.j2)

    def __add__(self, other: "CurrentField") -> "CurrentField":
        return CurrentField(self.j1 + other.j1, self.j2 + other.j2, self.definition_tag)

    def scaled(self, c: float) -> "CurrentField":
        return CurrentField(c * self.j1, c * self.j2, self.definition_tag)


def current_density(s: LatticeState, p: PhysicalParams, tag: str = WITH_GAUGE_TERM,
                    psi: np.ndarray | None = None, A1=None, A2=None) -> CurrentField:
    """Node currents from central differences.

    ``a`` adds the diamagnetic term -(e^2/mu) A |psi|^2 to the free current
    (e hbar/mu) Im(psi* d psi); ``b`` is the free current alone.
    """
    if tag not in (WITH_GAUGE_TERM, FREE):
        raise ValueError(f"unknown current definition {tag!r}")
    psi = s.psi if psi is None else psi
    coef = p.e * p.hbar / p.mu
    j1 = coef * np.imag(np.conj(psi) * d1(psi, s.a))
    j2 = coef * np.imag(np.conj(psi) * d2(psi, s.a))
    if tag == WITH_GAUGE_TERM:
        rho = np.abs(psi) ** 2
        A1 = s.A1 if A1 is None else A1
        A2 = s.A2 if A2 is None else A2
        k = p.e**2 / p.mu
        j1 = j1 - k * A1 * rho
        j2 = j2 - k * A2 * rho  # rho vanishes on the Dirichlet ring
    return CurrentField(j1, j2, tag)


def continuity_residual(psi_old: np.ndarray, psi_new: np.ndarray, j_old: CurrentField,
                        j_new: CurrentField, p: PhysicalParams, a: float, dt: float,
                        margin: int = 2) -> tuple[float, float]:
    """(||d_t rho + div j||_inf, ||d_t rho||_inf) over nodes ``margin`` deep.

    The time derivative is the two-slice difference and the divergence uses
    the time-centred current, so the residual is O(a^2) + O(dt^2).
    """
    rho_t = p.e * (np.abs(psi_new) ** 2 - np.abs(psi_old) ** 2) / dt
    jm = (j_old + j_new).scaled(0.5)
    div = divergence(jm.j1, jm.j2, a)
    sl = (slice(margin, -margin), slice(margin, -margin))
    r = rho_t[sl] + div[sl]
    return float(np.max(np.abs(r))), float(np.max(np.abs(rho_t[sl])))
