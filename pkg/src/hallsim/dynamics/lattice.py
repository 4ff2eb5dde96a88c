"""Lattice state and second-order difference operators.

Fields are stored as arrays of shape ``(ny, nx)`` indexed ``[j, i]`` with
``x = i*a`` and ``y = j*a``, so a row-major ravel is x-fastest. Axis 1 is
direction 1 (x), axis 0 is direction 2 (y).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp


class LatticeError(ValueError):
    pass


@dataclass
class LatticeState:
    nx: int
    ny: int
    a: float
    dt: float
    t: float = 0.0
    psi: np.ndarray = None
    A1: np.ndarray = None
    A2: np.ndarray = None
    E1: np.ndarray = None
    E2: np.ndarray = None

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise LatticeError("grid must be at least 8x8")
        if self.a <= 0 or self.dt <= 0:
            raise LatticeError("lattice spacing and time step must be positive")
        shape = (self.ny, self.nx)
        self.psi = _field(self.psi, shape, complex)
        for name in ("A1", "A2", "E1", "E2"):
            setattr(self, name, _field(getattr(self, name), shape, float))
        # Dirichlet carrier boundary; gauge fields stay free
        self.psi[0, :] = self.psi[-1, :] = 0
        self.psi[:, 0] = self.psi[:, -1] = 0

    @property
    def shape(self):
        return (self.ny, self.nx)

    @property
    def area(self) -> float:
        """Node-sum area: every node carries a cell of size a^2."""
        return self.nx * self.ny * self.a**2

    def coords(self):
        """Meshgrid (X, Y) of node positions."""
        x = np.arange(self.nx) * self.a
        y = np.arange(self.ny) * self.a
        return np.meshgrid(x, y)

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        """Total probability sum |psi|^2 a^2."""
        return float(np.sum(self.density()) * self.a**2)

    def mean_density(self) -> float:
        """Global density n = (1/Area) sum |psi|^2 a^2."""
        return self.norm() / self.area

    def copy(self) -> "LatticeState":
        return replace(self, psi=self.psi.copy(), A1=self.A1.copy(), A2=self.A2.copy(),
                       E1=self.E1.copy(), E2=self.E2.copy())


def _field(value, shape, dtype):
    if value is None:
        return np.zeros(shape, dtype=dtype)
    arr = np.array(value, dtype=dtype)
    if arr.ndim == 0:
        arr = np.full(shape, arr, dtype=dtype)
    if arr.shape != shape:
        raise LatticeError(f"field shape {arr.shape} does not match grid {shape}")
    return arr


def interior_mask(shape, margin: int = 1) -> np.ndarray:
    m = np.zeros(shape, dtype=bool)
    m[margin:shape[0] - margin, margin:shape[1] - margin] = True
    return m


def ring_index(shape) -> np.ndarray:
    """Chebyshev distance (in nodes) to the nearest boundary node."""
    ny, nx = shape
    j, i = np.indices(shape)
    return np.minimum(np.minimum(i, nx - 1 - i), np.minimum(j, ny - 1 - j))


def d1(f: np.ndarray, a: float) -> np.ndarray:
    """Central x-derivative on interior nodes, zero on the boundary ring."""
    out = np.zeros(f.shape, dtype=f.dtype)
    out[1:-1, 1:-1] = (f[1:-1, 2:] - f[1:-1, :-2]) / (2 * a)
    return out


def d2(f: np.ndarray, a: float) -> np.ndarray:
    """Central y-derivative on interior nodes, zero on the boundary ring."""
    out = np.zeros(f.shape, dtype=f.dtype)
    out[1:-1, 1:-1] = (f[2:, 1:-1] - f[:-2, 1:-1]) / (2 * a)
    return out


def curl(A1: np.ndarray, A2: np.ndarray, a: float) -> np.ndarray:
    """Field strength B = eps_{nm} d_m A_n = d2 A1 - d1 A2 on interior nodes."""
    return d2(A1, a) - d1(A2, a)


def divergence(F1: np.ndarray, F2: np.ndarray, a: float) -> np.ndarray:
    return d1(F1, a) + d2(F2, a)


# -- sparse operators on the interior unknowns (row-major, x fastest) --

def _second_diff(m: int, a: float) -> sp.csr_matrix:
    return sp.diags([np.ones(m - 1), -2 * np.ones(m), np.ones(m - 1)], [-1, 0, 1]) / a**2


def _central_diff(m: int, a: float) -> sp.csr_matrix:
    return sp.diags([-np.ones(m - 1), np.ones(m - 1)], [-1, 1]) / (2 * a)


@dataclass
class InteriorOperators:
    """5-point Laplacian and central gradients acting on interior nodes."""

    nx: int
    ny: int
    a: float
    lap: sp.csr_matrix = field(init=False)
    D1: sp.csr_matrix = field(init=False)
    D2: sp.csr_matrix = field(init=False)

    def __post_init__(self):
        mx, my = self.nx - 2, self.ny - 2
        Ix, Iy = sp.identity(mx), sp.identity(my)
        self.lap = (sp.kron(Iy, _second_diff(mx, self.a))
                    + sp.kron(_second_diff(my, self.a), Ix)).tocsr()
        self.D1 = sp.kron(Iy, _central_diff(mx, self.a)).tocsr()
        self.D2 = sp.kron(_central_diff(my, self.a), Ix).tocsr()

    @property
    def size(self) -> int:
        return (self.nx - 2) * (self.ny - 2)

    @staticmethod
    def gather(f: np.ndarray) -> np.ndarray:
        return f[1:-1, 1:-1].ravel()

    def scatter(self, v: np.ndarray, dtype=complex) -> np.ndarray:
        out = np.zeros((self.ny, self.nx), dtype=dtype)
        out[1:-1, 1:-1] = v.reshape(self.ny - 2, self.nx - 2)
        return out


def dirichlet_mode_energy(nx: int, ny: int, a: float, mx: int = 1, my: int = 1,
                          hbar: float = 1.0, mu: float = 1.0) -> float:
    """Eigenvalue of -hbar^2/(2 mu) * (5-point Laplacian) for sine mode (mx, my)."""
    kx = (2 - 2 * np.cos(mx * np.pi / (nx - 1))) / a**2
    ky = (2 - 2 * np.cos(my * np.pi / (ny - 1))) / a**2
    return hbar**2 / (2 * mu) * (kx + ky)
