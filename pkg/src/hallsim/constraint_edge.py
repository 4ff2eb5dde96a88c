"""Gauss-law constraint, gradient/curl splitting and edge-current profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .dynamics.fields import CurrentField
from .dynamics.lattice import LatticeState, curl, ring_index
from .params import PhysicalParams, magnetic_length


class ConstraintError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


# -- Gauss law -------------------------------------------------------------

@dataclass
class ConstraintReport:
    residual_field: np.ndarray  # sigma_H B - e|psi|^2 on interior nodes
    inf_norm: float
    mean: float
    integrated_sigma: float | None
    pure_gauge_fraction: float | None  # ||curl part|| / ||A||, None if not requested


def _interior(f: np.ndarray) -> np.ndarray:
    return f[1:-1, 1:-1]


def gauss_residual(s: LatticeState, p: PhysicalParams, sigma_H: float,
                   with_split: bool = False) -> ConstraintReport:
    """Residual of -sigma_H eps^{mn} d_m A_n = e|psi|^2.

    eps^{mn} d_m A_n = d1 A2 - d2 A1 = -B, so the residual is
    sigma_H B - e|psi|^2, evaluated with central differences.
    """
    B = curl(s.A1, s.A2, s.a)
    res = np.zeros(s.shape)
    res[1:-1, 1:-1] = sigma_H * _interior(B) - p.e * _interior(s.density())
    inner = _interior(res)
    n_bar = float(np.mean(_interior(s.density())))
    B_bar = float(np.mean(_interior(B)))
    integrated = n_bar * p.e / B_bar if B_bar != 0 else None
    frac = None
    if with_split:
        norm_A = float(np.sqrt(np.sum(s.A1**2 + s.A2**2)))
        if norm_A > 0:
            _, (c1, c2) = helmholtz_split(s.A1, s.A2, s.a)
            frac = float(np.sqrt(np.sum(c1**2 + c2**2)) / norm_A)
        else:
            frac = 0.0
    return ConstraintReport(res, float(np.max(np.abs(inner))), float(np.mean(inner)),
                            integrated, frac)


@dataclass(frozen=True)
class IntegratedConstraint:
    n_bar: float
    B_bar: float
    sigma_implied: float
    deviation: float


def integrated_constraint(s: LatticeState, p: PhysicalParams,
                          sigma_H: float) -> IntegratedConstraint:
    """Surface-averaged constraint, sigma = n e / B, over interior nodes."""
    n_bar = float(np.mean(_interior(s.density())))
    B_bar = float(np.mean(_interior(curl(s.A1, s.A2, s.a))))
    if B_bar == 0:
        raise ConstraintError("constraint degenerate: zero mean field")
    implied = n_bar * p.e / B_bar
    return IntegratedConstraint(n_bar, B_bar, implied, abs(implied - sigma_H) / abs(sigma_H))


@dataclass(frozen=True)
class Breakdown:
    breakdown: bool
    ratio: float
    degenerate: bool = False  # True when n_bar = 0 and the check is vacuous

    def __bool__(self):
        return self.breakdown


def breakdown_check(s: LatticeState, p: PhysicalParams, sigma_H: float,
                    threshold: float = 0.1) -> Breakdown:
    n_bar = float(np.mean(_interior(s.density())))
    if n_bar == 0:
        return Breakdown(False, 0.0, degenerate=True)
    ratio = gauss_residual(s, p, sigma_H).inf_norm / (p.e * n_bar)
    return Breakdown(ratio > threshold, ratio)


def uniform_field_state(nx: int, ny: int, a: float, B0: float, sigma_H: float,
                        p: PhysicalParams, dt: float | None = None,
                        gauge_amplitude: float = 0.0) -> LatticeState:
    """Exact constraint solution: symmetric-gauge uniform B0 with |psi|^2 = sigma_H B0/e.

    A non-zero ``gauge_amplitude`` applies the gauge transformation with
    lambda = amp * sin(pi x/Lx) sin(2 pi y/Ly), which vanishes on the
    boundary; its analytic gradient exercises the O(a^2) discretization.
    """
    dt = 0.1 * p.mu * a**2 / p.hbar if dt is None else dt
    s = LatticeState(nx, ny, a, dt)
    X, Y = s.coords()
    Lx, Ly = (nx - 1) * a, (ny - 1) * a
    xc, yc = Lx / 2, Ly / 2
    A1 = 0.5 * B0 * (Y - yc)
    A2 = -0.5 * B0 * (X - xc)
    lam = np.zeros_like(X)
    if gauge_amplitude:
        kx, ky = np.pi / Lx, 2 * np.pi / Ly
        lam = gauge_amplitude * np.sin(kx * X) * np.sin(ky * Y)
        A1 = A1 + gauge_amplitude * kx * np.cos(kx * X) * np.sin(ky * Y)
        A2 = A2 + gauge_amplitude * ky * np.sin(kx * X) * np.cos(ky * Y)
    amp = math.sqrt(sigma_H * B0 / p.e)
    s.psi = amp * np.exp(1j * p.e * lam / p.hbar)
    s.A1, s.A2 = A1, A2
    s.__post_init__()
    return s


# -- gradient / curl split ------------------------------------------------

@lru_cache(maxsize=8)
def _split_operators(nx: int, ny: int, a: float):
    """Gradient from interior unknowns (lambda = 0 on the boundary) to all nodes.

    Interior nodes use central differences; boundary nodes use an odd
    reflection for the normal derivative and zero tangential derivative.
    Returns (G1, G2, W) with W the trapezoid weights of the node sum.
    """
    idx = -np.ones((ny, nx), dtype=int)
    idx[1:-1, 1:-1] = np.arange((nx - 2) * (ny - 2)).reshape(ny - 2, nx - 2)
    rows1, cols1, vals1 = [], [], []
    rows2, cols2, vals2 = [], [], []

    def add(rows, cols, vals, r, j, i, v):
        if 0 <= i < nx and 0 <= j < ny and idx[j, i] >= 0:
            rows.append(r)
            cols.append(idx[j, i])
            vals.append(v)

    for j in range(ny):
        for i in range(nx):
            r = j * nx + i
            if 0 < i < nx - 1:
                add(rows1, cols1, vals1, r, j, i + 1, 0.5 / a)
                add(rows1, cols1, vals1, r, j, i - 1, -0.5 / a)
            elif 0 < j < ny - 1:  # normal derivative at x walls, odd ghost
                add(rows1, cols1, vals1, r, j, 1 if i == 0 else nx - 2,
                    (1.0 if i == 0 else -1.0) / a)
            if 0 < j < ny - 1:
                add(rows2, cols2, vals2, r, j + 1, i, 0.5 / a)
                add(rows2, cols2, vals2, r, j - 1, i, -0.5 / a)
            elif 0 < i < nx - 1:
                add(rows2, cols2, vals2, r, 1 if j == 0 else ny - 2, i,
                    (1.0 if j == 0 else -1.0) / a)
    shape = (nx * ny, (nx - 2) * (ny - 2))
    G1 = sp.csr_matrix((vals1, (rows1, cols1)), shape=shape)
    G2 = sp.csr_matrix((vals2, (rows2, cols2)), shape=shape)
    w = np.ones((ny, nx))
    w[0, :] *= 0.5
    w[-1, :] *= 0.5
    w[:, 0] *= 0.5
    w[:, -1] *= 0.5
    return G1, G2, sp.diags(w.ravel())


def gradient(lam_interior: np.ndarray, nx: int, ny: int, a: float):
    """Discrete gradient of a field vanishing on the boundary (split convention)."""
    G1, G2, _ = _split_operators(nx, ny, a)
    v = np.asarray(lam_interior)
    if v.shape == (ny, nx):
        v = v[1:-1, 1:-1]
    v = v.ravel()
    return (G1 @ v).reshape(ny, nx), (G2 @ v).reshape(ny, nx)


def helmholtz_split(A1: np.ndarray, A2: np.ndarray, a: float, tol: float = 1e-10,
                    maxiter: int | None = None):
    """Split A into grad(lambda), lambda = 0 on the boundary, plus a remainder.

    lambda minimises the weighted node-sum ||A - grad lambda||^2, i.e. solves
    the SPD normal equations G^T W G lambda = G^T W A by conjugate gradients.
    Returns ((g1, g2), (c1, c2)) with c = A - g.
    """
    ny, nx = A1.shape
    if nx < 8 or ny < 8:
        raise ConstraintError("grid must be at least 8x8")
    G1, G2, W = _split_operators(nx, ny, a)
    K = (G1.T @ W @ G1 + G2.T @ W @ G2).tocsr()
    rhs = G1.T @ (W @ A1.ravel()) + G2.T @ (W @ A2.ravel())
    maxiter = 10 * nx * ny if maxiter is None else maxiter
    if np.linalg.norm(rhs) == 0:
        lam = np.zeros(K.shape[0])
    else:
        lam, info = cg(K, rhs, rtol=tol, atol=0.0, maxiter=maxiter)
        if info != 0:
            raise SolverError(f"conjugate gradients did not converge in {maxiter} iterations")
    g1 = (G1 @ lam).reshape(ny, nx)
    g2 = (G2 @ lam).reshape(ny, nx)
    return (g1, g2), (A1 - g1, A2 - g2)


def band_cutoff(s: LatticeState, width: float) -> np.ndarray:
    """Smooth weight: 1 on the boundary, 0 beyond ``width`` from every wall."""
    X, Y = s.coords()
    Lx, Ly = (s.nx - 1) * s.a, (s.ny - 1) * s.a

    def one(d):
        u = np.clip(d / width, 0.0, 1.0)
        return 0.5 * (1.0 + np.cos(np.pi * u))

    wx = one(np.minimum(X, Lx - X))
    wy = one(np.minimum(Y, Ly - Y))
    return 1.0 - (1.0 - wx) * (1.0 - wy)


def boundary_representative(lam: np.ndarray, s: LatticeState, width: float):
    """Gauge representative of A = grad(lam) supported within ``width`` of the edge.

    lam - lam*w vanishes on the boundary (w = 1 there), so grad(lam*w) is
    gauge-equivalent to grad(lam) under boundary-vanishing transformations.
    """
    chi = lam * band_cutoff(s, width)
    return np.gradient(chi, s.a, axis=1), np.gradient(chi, s.a, axis=0)


# -- edge profile --------------------------------------------------------

@dataclass
class EdgeProfile:
    distances: np.ndarray
    current_mass: np.ndarray
    fitted_width: float
    l_B: float


def edge_profile(j: CurrentField, s: LatticeState, p: PhysicalParams) -> EdgeProfile:
    """Bin |j| by Chebyshev distance to the boundary and fit its decay length.

    The fit is least squares on log(mean |j| per ring) against distance,
    from the peak ring over the first decade of decay.
    """
    l_B = magnetic_length(p)
    mag = j.magnitude()
    total = float(mag.sum())
    if total == 0:
        raise ConstraintError("no current to profile")
    rings = ring_index(s.shape)
    nring = int(rings.max()) + 1
    sums = np.bincount(rings.ravel(), weights=mag.ravel(), minlength=nring)
    counts = np.bincount(rings.ravel(), minlength=nring)
    distances = np.arange(nring) * s.a
    mass = sums / total
    return EdgeProfile(distances, mass, _fit_width(distances, sums / counts, s.a), l_B)


def _fit_width(d: np.ndarray, level: np.ndarray, a: float) -> float:
    k0 = int(np.argmax(level))
    peak = level[k0]
    k = k0
    while k + 1 < level.size and level[k + 1] >= peak / 10 and level[k + 1] > 0:
        k += 1
    if k == k0:
        nxt = level[k0 + 1] if k0 + 1 < level.size else 0.0
        return float(a / math.log(peak / nxt)) if nxt > 0 else 0.0
    slope = np.polyfit(d[k0:k + 1], np.log(level[k0:k + 1]), 1)[0]
    return float(-1.0 / slope) if slope < 0 else math.inf


def edge_current_fraction(profile: EdgeProfile, width: float | None = None) -> float:
    """Fraction of current mass within ``width`` (default l_B) of the edge."""
    width = profile.l_B if width is None else width
    inside = profile.distances <= width * (1 + 1e-12)
    return float(np.sum(profile.current_mass[inside]))
