"""Time steppers for the carrier field and the gauge fields.

One macro step splits the coupled system: psi advances with A frozen
(``step_psi``), then A advances with psi frozen (``step_gauge``).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..params import PhysicalParams
from .fields import CurrentField, current_density
from .lattice import InteriorOperators, LatticeState

DEFAULT_STABILITY_FACTOR = 0.5
PSI_STEPPERS = ("cn", "rk4")
GAUGE_STEPPERS = ("euler", "heun")


class StabilityError(ValueError):
    pass


class GaugeError(ValueError):
    pass


@lru_cache(maxsize=8)
def operators(nx: int, ny: int, a: float) -> InteriorOperators:
    return InteriorOperators(nx, ny, a)


def stability_limit(p: PhysicalParams, a: float,
                    factor: float = DEFAULT_STABILITY_FACTOR) -> float:
    return factor * p.mu * a**2 / p.hbar


def check_stability(dt: float, p: PhysicalParams, a: float,
                    factor: float = DEFAULT_STABILITY_FACTOR) -> None:
    limit = stability_limit(p, a, factor)
    if dt > limit:
        raise StabilityError(f"dt = {dt:g} exceeds stability bound {limit:g}")


def hamiltonian(s: LatticeState, p: PhysicalParams, A1=None, A2=None) -> sp.csr_matrix:
    """(1/2mu)(-i hbar d - e A)^2 on interior nodes, expanded with central differences.

    (-i hbar d - eA)^2 = -hbar^2 lap + i hbar e (d A + A d) + e^2 A^2; the
    middle term is i times a real antisymmetric matrix, so H is Hermitian.
    """
    ops = operators(s.nx, s.ny, s.a)
    A1 = ops.gather(s.A1 if A1 is None else A1)
    A2 = ops.gather(s.A2 if A2 is None else A2)
    H = -p.hbar**2 * ops.lap
    if p.e != 0 and (A1.any() or A2.any()):
        M1, M2 = sp.diags(A1), sp.diags(A2)
        cross = ops.D1 @ M1 + M1 @ ops.D1 + ops.D2 @ M2 + M2 @ ops.D2
        H = H + 1j * p.hbar * p.e * cross + p.e**2 * sp.diags(A1**2 + A2**2)
    return (H / (2 * p.mu)).tocsc()


def step_psi(s: LatticeState, p: PhysicalParams, dt: float | None = None,
             method: str = "cn", stability_factor: float = DEFAULT_STABILITY_FACTOR,
             H: sp.spmatrix | None = None) -> np.ndarray:
    """Advance psi by one step under the current (frozen) gauge field.

    ``cn`` is the Crank-Nicolson (implicit midpoint) propagator, unitary up
    to the linear solve; ``rk4`` is the classic explicit scheme.
    """
    dt = s.dt if dt is None else dt
    check_stability(dt, p, s.a, stability_factor)
    if method not in PSI_STEPPERS:
        raise ValueError(f"unknown psi stepper {method!r}")
    ops = operators(s.nx, s.ny, s.a)
    H = hamiltonian(s, p) if H is None else H
    v = ops.gather(s.psi)
    c = dt / p.hbar
    if method == "cn":
        I = sp.identity(ops.size, dtype=complex, format="csc")
        lu = splu((I + 0.5j * c * H).tocsc())
        v = lu.solve(v - 0.5j * c * (H @ v))
    else:
        f = lambda u: -1j * c * (H @ u)  # noqa: E731
        k1 = f(v)
        k2 = f(v + 0.5 * k1)
        k3 = f(v + 0.5 * k2)
        k4 = f(v + k3)
        v = v + (k1 + 2 * k2 + 2 * k3 + k4) / 6
    s.psi = ops.scatter(v)
    return s.psi


def gauge_slope(j: CurrentField, A1: np.ndarray, A2: np.ndarray, k: float,
                sigma_H: float, sign: int = 1):
    """Solve j_m - k A_m = sigma_H eps^{nm} dA_n/dt for dA/dt.

    With ``sign = +1``: dA1 = -(j2 - k A2)/sigma_H, dA2 = (j1 - k A1)/sigma_H.
    This orientation keeps sigma_H B - e|psi|^2 constant in time.
    """
    if sigma_H == 0:
        raise GaugeError("Chern-Simons kinetic term degenerate")
    dA1 = -sign * (j.j2 - k * A2) / sigma_H
    dA2 = sign * (j.j1 - k * A1) / sigma_H
    return dA1, dA2


def step_gauge(s: LatticeState, j: CurrentField, p: PhysicalParams, sigma_H: float,
               dt: float | None = None, density: float | None = None, sign: int = 1,
               method: str = "euler"):
    """Advance (A1, A2) one explicit step of the gauge equation of motion.

    ``density`` sets the coefficient e^2 n/mu of the gauge term; it defaults
    to the global mean density of ``s``. ``heun`` re-evaluates the current
    at the predicted A when ``j`` carries the diamagnetic term. Records
    E = -(A_new - A_old)/dt and returns the effective slope.
    """
    if sigma_H == 0:
        raise GaugeError("Chern-Simons kinetic term degenerate")
    if method not in GAUGE_STEPPERS:
        raise ValueError(f"unknown gauge stepper {method!r}")
    dt = s.dt if dt is None else dt
    n = s.mean_density() if density is None else density
    k = p.e**2 * n / p.mu
    s1, s2 = gauge_slope(j, s.A1, s.A2, k, sigma_H, sign)
    if method == "heun":
        A1p, A2p = s.A1 + dt * s1, s.A2 + dt * s2
        jp = j
        if j.definition_tag == "a":
            jp = current_density(s, p, "a", A1=A1p, A2=A2p)
        t1, t2 = gauge_slope(jp, A1p, A2p, k, sigma_H, sign)
        s1, s2 = 0.5 * (s1 + t1), 0.5 * (s2 + t2)
    s.A1 = s.A1 + dt * s1
    s.A2 = s.A2 + dt * s2
    s.E1, s.E2 = -s1, -s2
    return s1, s2
