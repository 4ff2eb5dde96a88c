"""Simulation configuration and the classical / quantum transport runs."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from ..params import PhysicalParams, ParameterError, conductance_quantum, magnetic_length
from ..quantization import snap_sigma_H
from ..transport import (CLASSICAL, QUANTUM, ConductivityTensor, Thresholds,
                         classify_regime, conductivity_classical, filling)
from .action import ActionAccumulator
from .fields import FREE, WITH_GAUGE_TERM, CurrentField, current_density
from .lattice import LatticeState, interior_mask
from .stepping import (DEFAULT_STABILITY_FACTOR, GAUGE_STEPPERS, PSI_STEPPERS, hamiltonian,
                       check_stability, step_gauge, step_psi)

DIAGNOSTIC_FIELDS = ("t", "norm", "S_cs", "action_ratio", "ohm_residual", "hall_fraction")


class RegimeWarning(UserWarning):
    pass


class InsulatorError(ValueError):
    pass


@dataclass(frozen=True)
class PsiSpec:
    """Initial carrier field: ``plane_wave``, ``gaussian`` or ``box_mode``."""

    kind: str = "box_mode"
    kx: float = 0.0
    ky: float = 0.0
    x0: float = 0.5
    y0: float = 0.5
    width: float = 0.1
    mx: int = 1
    my: int = 1

    KINDS = ("plane_wave", "gaussian", "box_mode")


@dataclass(frozen=True)
class GaugeSpec:
    """Initial gauge field: ``zero``, ``uniform_e`` (A = E tau_gauge) or ``pure_gauge``."""

    kind: str = "zero"
    E1: float = 0.0
    E2: float = 0.0
    tau_gauge: float | None = None  # defaults to the relaxation time
    lam: str = "linear"  # linear | saddle | random
    amplitude: float = 1.0

    KINDS = ("zero", "uniform_e", "pure_gauge")
    LAMBDAS = ("linear", "saddle", "random")


@dataclass(frozen=True)
class SimConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    nx: int = 64
    ny: int = 64
    a: float | None = None  # defaults to a unit square sample
    dt: float | None = None  # defaults to 0.1 mu a^2 / hbar
    steps: int = 100
    regime_override: str | None = None
    initial_psi: PsiSpec = field(default_factory=PsiSpec)
    initial_A: GaugeSpec = field(default_factory=GaugeSpec)
    sigma_H_mode: str = "quantized"
    psi_stepper: str = "cn"
    gauge_stepper: str = "euler"
    stability_factor: float = DEFAULT_STABILITY_FACTOR
    sign: int = 1
    seed: int = 0
    s_cs: float = 1.0
    thresholds: Thresholds = field(default_factory=Thresholds)
    gauge_band: float | None = None  # edge band of pure-gauge potentials; None -> l_B, 0 -> off

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ParameterError("grid must be at least 8x8")
        if self.a is None:
            object.__setattr__(self, "a", 1.0 / (max(self.nx, self.ny) - 1))
        if self.dt is None:
            object.__setattr__(self, "dt", 0.1 * self.params.mu * self.a**2 / self.params.hbar)
        if self.a <= 0 or self.dt <= 0:
            raise ParameterError("lattice spacing and time step must be positive")
        if self.steps < 0:
            raise ParameterError("steps must be non-negative")
        if self.sign not in (1, -1):
            raise ParameterError("sign must be +1 or -1")
        if self.sigma_H_mode not in ("quantized", "continuous"):
            raise ParameterError(f"unknown sigma_H mode {self.sigma_H_mode!r}")
        if self.regime_override not in (None, CLASSICAL, QUANTUM, "crossover"):
            raise ParameterError(f"unknown regime {self.regime_override!r}")
        if self.psi_stepper not in PSI_STEPPERS or self.gauge_stepper not in GAUGE_STEPPERS:
            raise ParameterError("unknown stepper")
        if self.initial_psi.kind not in PsiSpec.KINDS:
            raise ParameterError(f"unknown initial psi {self.initial_psi.kind!r}")
        if self.initial_A.kind not in GaugeSpec.KINDS:
            raise ParameterError(f"unknown initial A {self.initial_A.kind!r}")
        if self.initial_A.lam not in GaugeSpec.LAMBDAS:
            raise ParameterError(f"unknown gauge function {self.initial_A.lam!r}")
        check_stability(self.dt, self.params, self.a, self.stability_factor)

    def regime(self) -> str:
        if self.regime_override is not None:
            return self.regime_override
        return classify_regime(self.params, self.s_cs, self.thresholds).kind


@dataclass
class RunReport:
    kind: str
    state: LatticeState
    current: CurrentField
    sigma_H: float
    residual: float
    longitudinal_fraction: float
    hall_fraction: float
    action: float
    action_ratio: float
    diagnostics: list = field(default_factory=list)
    absolute: bool = False  # residual left unnormalized because j vanished
    gauge_balance: float | None = None


# -- initial conditions ---------------------------------------------------

def initial_psi(spec: PsiSpec, s: LatticeState, p: PhysicalParams) -> np.ndarray:
    """Carrier field on the lattice; amplitude set by the density ``p.n``.

    Plane waves carry |psi|^2 = n on interior nodes; packets and box modes
    are scaled so that the global mean density equals n.
    """
    X, Y = s.coords()
    Lx, Ly = (s.nx - 1) * s.a, (s.ny - 1) * s.a
    if spec.kind == "plane_wave":
        psi = math.sqrt(p.n) * np.exp(1j * (spec.kx * X + spec.ky * Y))
    else:
        if spec.kind == "gaussian":
            r2 = (X - spec.x0 * Lx) ** 2 + (Y - spec.y0 * Ly) ** 2
            psi = np.exp(-r2 / (2 * spec.width**2) + 1j * (spec.kx * X + spec.ky * Y))
        else:
            psi = (np.sin(spec.mx * np.pi * X / Lx) * np.sin(spec.my * np.pi * Y / Ly)
                   ).astype(complex)
        psi[0, :] = psi[-1, :] = psi[:, 0] = psi[:, -1] = 0
        mean = np.sum(np.abs(psi) ** 2) / (s.nx * s.ny)
        psi = psi * (math.sqrt(p.n / mean) if mean > 0 else 0.0)
    psi[0, :] = psi[-1, :] = psi[:, 0] = psi[:, -1] = 0
    return psi


def gauge_function(spec: GaugeSpec, s: LatticeState, seed: int = 0) -> np.ndarray:
    X, Y = s.coords()
    Lx, Ly = (s.nx - 1) * s.a, (s.ny - 1) * s.a
    u, v = X / Lx - 0.5, Y / Ly - 0.5
    if spec.lam == "linear":
        lam = u * Lx
    elif spec.lam == "saddle":
        lam = u * v * math.sqrt(Lx * Ly)
    else:
        rng = np.random.default_rng(seed)
        lam = np.zeros_like(X)
        for kx in range(1, 4):
            for ky in range(1, 4):
                c, ph1, ph2 = rng.normal() / (kx * kx + ky * ky), *rng.uniform(0, 2 * np.pi, 2)
                lam += c * np.cos(kx * np.pi * X / Lx + ph1) * np.cos(ky * np.pi * Y / Ly + ph2)
        lam *= 0.1 * math.sqrt(Lx * Ly)
    return spec.amplitude * lam


def initial_gauge(cfg: SimConfig, s: LatticeState, band: float | None = None):
    spec, p = cfg.initial_A, cfg.params
    if spec.kind == "zero":
        z = np.zeros(s.shape)
        return z, z.copy()
    if spec.kind == "uniform_e":
        tau = p.tau if spec.tau_gauge is None else spec.tau_gauge
        return np.full(s.shape, spec.E1 * tau), np.full(s.shape, spec.E2 * tau)
    lam = gauge_function(spec, s, cfg.seed)
    if band:
        from ..constraint_edge import boundary_representative
        return boundary_representative(lam, s, band)
    return np.gradient(lam, s.a, axis=1), np.gradient(lam, s.a, axis=0)


def new_state(cfg: SimConfig) -> LatticeState:
    s = LatticeState(cfg.nx, cfg.ny, cfg.a, cfg.dt)
    s.psi = initial_psi(cfg.initial_psi, s, cfg.params)
    return s


# -- residuals ------------------------------------------------------------

def _inner(f: np.ndarray, margin: int) -> np.ndarray:
    return f[interior_mask(f.shape, margin)]


def ohm_residual_classical(j: CurrentField, E1, E2, sigma: ConductivityTensor,
                           margin: int = 2, zero_tol: float = 0.0) -> tuple[float, bool]:
    """||j - sigma_L E - sigma_H eps E||_inf / ||j||_inf over nodes ``margin`` deep.

    Returns (residual, absolute); ``absolute`` is True when ||j||_inf is at
    most ``zero_tol`` and the residual is reported unnormalized.
    """
    E1 = np.broadcast_to(E1, j.j1.shape)
    E2 = np.broadcast_to(E2, j.j1.shape)
    t1, t2 = sigma.apply(E1, E2)
    r = np.hypot(_inner(j.j1 - t1, margin), _inner(j.j2 - t2, margin))
    jmax = float(np.max(np.hypot(_inner(j.j1, margin), _inner(j.j2, margin))))
    if jmax <= zero_tol:
        return float(np.max(r)), True
    return float(np.max(r)) / jmax, False


def _projections(j1, j2, E1, E2):
    """(longitudinal, Hall) fractions: |<j,E>| and |<j,eps E>| over ||j|| ||E||."""
    nj = math.sqrt(float(np.sum(j1 * j1 + j2 * j2)))
    nE = math.sqrt(float(np.sum(E1 * E1 + E2 * E2)))
    if nj == 0 or nE == 0:
        return 0.0, 0.0
    lon = abs(float(np.sum(j1 * E1 + j2 * E2))) / (nj * nE)
    hall = abs(float(np.sum(-j1 * E2 + j2 * E1))) / (nj * nE)
    return lon, hall


def hall_residual(j: CurrentField, E1, E2, sigma_H: float, sign: int = 1,
                  margin: int = 1, zero_tol: float = 0.0) -> tuple[float, float, float, bool]:
    """Residual of j = sigma_H eps E and the (longitudinal, Hall) fractions of j.

    Returns (residual, longitudinal, hall, absolute).
    """
    t = ConductivityTensor(0.0, sign * sigma_H)
    res, absolute = ohm_residual_classical(j, E1, E2, t, margin, zero_tol)
    m = interior_mask(j.j1.shape, margin)
    lon, hall = _projections(j.j1[m], j.j2[m], E1[m], E2[m])
    return res, lon, hall, absolute


# -- runs -----------------------------------------------------------------

def _check_regime(cfg: SimConfig, expected: str):
    kind = cfg.regime()
    if kind != expected:
        warnings.warn(f"{expected} run in the {kind} regime", RegimeWarning, stacklevel=3)


def drift_velocity(p: PhysicalParams, E1: float, E2: float, t: float | None = None):
    """Drift velocity of mu dv/dt = e(E + v x B) - mu v/tau from rest.

    The field vector points along -z for B > 0 (B = d2 A1 - d1 A2), which
    yields j = sigma_L E + sigma_H eps E in the steady state. ``t=None``
    returns the steady state.
    """
    wc, g = p.e * p.B / p.mu, 1.0 / p.tau
    M = np.array([[-g, -wc], [wc, -g]])
    f = p.e / p.mu * np.array([E1, E2])
    v_inf = -np.linalg.solve(M, f)
    if t is None:
        return v_inf
    return v_inf - expm(M * t) @ v_inf


def classical_gauge_run(cfg: SimConfig) -> RunReport:
    """Drift plane wave in the A = E tau gauge, checked against the Drude tensor.

    The drift velocity relaxes from rest over ``steps`` steps of ``dt``;
    the carrier field is sqrt(n) exp(i mu v.x/hbar) and the current uses
    the free definition.
    """
    _check_regime(cfg, CLASSICAL)
    p, spec = cfg.params, cfg.initial_A
    if spec.kind != "uniform_e":
        raise ParameterError("classical run needs a uniform_e initial gauge field")
    s = LatticeState(cfg.nx, cfg.ny, cfg.a, cfg.dt)
    s.A1, s.A2 = initial_gauge(cfg, s)
    E1, E2 = spec.E1, spec.E2
    s.E1[:], s.E2[:] = E1, E2
    sigma = conductivity_classical(p)
    X, Y = s.coords()
    diagnostics = []

    def evaluate(t):
        v = drift_velocity(p, E1, E2, t)
        s.psi = math.sqrt(p.n) * np.exp(1j * p.mu * (v[0] * X + v[1] * Y) / p.hbar)
        s.__post_init__()
        return current_density(s, p, FREE)

    for k in range(cfg.steps + 1):
        s.t = k * cfg.dt
        j = evaluate(s.t)
        res, absolute = ohm_residual_classical(j, s.E1, s.E2, sigma)
        m = interior_mask(s.shape, 2)
        _, hall = _projections(j.j1[m], j.j2[m], s.E1[m], s.E2[m])
        diagnostics.append(dict(t=s.t, norm=s.norm(), S_cs=0.0, action_ratio=0.0,
                                ohm_residual=res, hall_fraction=hall))
    m = interior_mask(s.shape, 2)
    lon, hall = _projections(j.j1[m], j.j2[m], s.E1[m], s.E2[m])
    # gauge-term bookkeeping: j - (e^2 n/mu) A - sigma_H eps E with A = E tau
    k = p.e**2 * p.n / p.mu
    g = ConductivityTensor(0.0, sigma.sigma_H)
    bal1, bal2 = g.apply(s.E1, s.E2)
    balance = CurrentField(j.j1 - k * s.A1 - bal1, j.j2 - k * s.A2 - bal2, FREE)
    jmax = max(float(np.max(_inner(j.magnitude(), 2))), 1e-300)
    return RunReport("classical", s, j, sigma.sigma_H, res, lon, hall, 0.0, 0.0,
                     diagnostics, absolute,
                     gauge_balance=float(np.max(_inner(balance.magnitude(), 2))) / jmax)


def quantum_sigma(cfg: SimConfig) -> float:
    """Hall conductivity driving a quantum run, in the units of ``cfg.params``."""
    p = cfg.params
    if p.B == 0:
        raise ParameterError("quantum run needs a non-zero field")
    nu = filling(p)
    if cfg.sigma_H_mode == "quantized":
        nu = snap_sigma_H(nu)
        if nu == 0:
            raise InsulatorError("no Hall channel: system insulating")
    return nu * conductance_quantum(p)


def quantum_run(cfg: SimConfig, history: list | None = None) -> RunReport:
    """Coupled carrier / Chern-Simons evolution with the gauge-term current.

    Each macro step advances psi with A frozen and then A with psi frozen.
    The diamagnetic part of the current already carries the e^2 n A / mu
    term of the gauge equation, so it is not added a second time. A
    pure-gauge initial field is replaced by its representative supported
    within ``gauge_band`` (default l_B) of the boundary. When ``history``
    is a list, every (A1, A2) slice is appended to it.
    """
    _check_regime(cfg, QUANTUM)
    p = cfg.params
    sigma = quantum_sigma(cfg)
    s = new_state(cfg)
    band = magnetic_length(p) if cfg.gauge_band is None else cfg.gauge_band
    s.A1, s.A2 = initial_gauge(cfg, s, band if cfg.initial_A.kind == "pure_gauge" else None)
    acc = ActionAccumulator(sigma, s.a, p.hbar)
    j = current_density(s, p, WITH_GAUGE_TERM)
    if history is not None:
        history.append((s.A1.copy(), s.A2.copy()))
    worst = lon_worst = 0.0
    res = lon = 0.0
    hall = 1.0
    absolute = False
    diagnostics = [dict(t=s.t, norm=s.norm(), S_cs=0.0, action_ratio=0.0,
                        ohm_residual=0.0, hall_fraction=0.0)]
    for _ in range(cfg.steps):
        old = (s.A1.copy(), s.A2.copy())
        step_psi(s, p, method=cfg.psi_stepper, stability_factor=cfg.stability_factor,
                 H=hamiltonian(s, p))
        j_star = current_density(s, p, WITH_GAUGE_TERM)
        step_gauge(s, j_star, p, sigma, density=0.0, sign=cfg.sign, method=cfg.gauge_stepper)
        s.t += cfg.dt
        s.E1 = -(s.A1 - old[0]) / cfg.dt
        s.E2 = -(s.A2 - old[1]) / cfg.dt
        j_new = current_density(s, p, WITH_GAUGE_TERM)
        jm = (j + j_new).scaled(0.5)
        # currents below round-off of the natural scale e hbar rho / (mu a) count as zero
        floor = 1e-12 * p.e * p.hbar * float(s.density().max()) / (p.mu * s.a)
        res, lon, hall, absolute = hall_residual(jm, s.E1, s.E2, sigma, cfg.sign,
                                                 zero_tol=floor)
        worst, lon_worst = max(worst, res), max(lon_worst, lon)
        acc.add(old, (s.A1, s.A2))
        if history is not None:
            history.append((s.A1.copy(), s.A2.copy()))
        diagnostics.append(dict(t=s.t, norm=s.norm(), S_cs=acc.value,
                                action_ratio=acc.action_ratio, ohm_residual=res,
                                hall_fraction=hall))
        j = j_new
    return RunReport("quantum", s, j, sigma, worst, lon_worst, hall, acc.value,
                     acc.action_ratio, diagnostics, absolute)


def run(cfg: SimConfig) -> RunReport:
    """Dispatch on the regime: classical runs for classical parameters, else quantum."""
    if cfg.regime() == CLASSICAL:
        return classical_gauge_run(cfg)
    return quantum_run(cfg)

