"""Chern-Simons quantization checks.

Everything here works in natural units (hbar = 1, angular momentum l = 1
unless given). The single-mode reduction keeps one conjugate pair
(A1, A2) with effective Planck constant ``4*pi*hbar/sigma_H``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SINGLE_VALUED_TOL = 1e-9
ENVELOPES = ("gaussian", "bump")


class QuantizationError(ValueError):
    pass


def snap_sigma_H(sigma_continuous: float) -> int:
    """Nearest non-negative integer; x.5 rounds up, negatives clamp to 0."""
    x = float(sigma_continuous)
    if not math.isfinite(x):
        raise QuantizationError(f"cannot snap non-finite value {x}")
    if x <= 0:
        return 0
    return int(math.floor(x + 0.5))


def single_valuedness_check(sigma_H: float, l: float = 1.0) -> bool:
    """True iff exp(2*pi*i*sigma_H*l) == 1 within ``SINGLE_VALUED_TOL``."""
    if not (math.isfinite(sigma_H) and math.isfinite(l)):
        return False
    phase = 2.0 * math.pi * sigma_H * l
    return abs(complex(math.cos(phase), math.sin(phase)) - 1.0) < SINGLE_VALUED_TOL


def radial_envelope(R: np.ndarray, kind: str = "gaussian", width: float = 0.25) -> np.ndarray:
    """Radial profile F(R) peaked at R = 1 (the l = R^2 = 1 shell)."""
    R = np.asarray(R, dtype=float)
    if kind == "gaussian":
        return np.exp(-((R - 1.0) ** 2) / (2 * width**2))
    if kind == "bump":
        s = np.clip((R - 1.0) / width, -1.0, 1.0)
        inside = np.abs(s) < 1.0
        out = np.zeros_like(R)
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out
    raise QuantizationError(f"unknown envelope {kind!r}; choose from {ENVELOPES}")


@dataclass(frozen=True)
class WavefunctionalGrid:
    R_values: np.ndarray
    phi_values: np.ndarray
    samples: np.ndarray  # shape (len(R), len(phi))
    sigma_H: float
    l: float = 1.0
    envelope: str = "gaussian"

    @property
    def dphi(self) -> float:
        return float(self.phi_values[1] - self.phi_values[0])


def phi_grid(n_points: int) -> np.ndarray:
    """Uniform grid on [0, 2*pi] including both endpoints."""
    if n_points < 2:
        raise QuantizationError("phi grid needs at least 2 points")
    return np.linspace(0.0, 2.0 * np.pi, n_points)


def build_wavefunctional(sigma_H: float, l: float = 1.0, R_grid=None, phi_values=None,
                         envelope: str = "gaussian") -> WavefunctionalGrid:
    """Sample Psi(R, phi) = F(R) exp(i sigma_H l phi) with hbar = 1."""
    R = np.linspace(0.0, 2.0, 41) if R_grid is None else np.asarray(R_grid, dtype=float)
    phi = phi_grid(256) if phi_values is None else np.asarray(phi_values, dtype=float)
    if R.size == 0 or phi.size == 0:
        raise QuantizationError("empty grid")
    if np.any(R < 0):
        raise QuantizationError("radial grid must be non-negative")
    F = radial_envelope(R, envelope)
    samples = F[:, None] * np.exp(1j * sigma_H * l * phi)[None, :]
    return WavefunctionalGrid(R, phi, samples, float(sigma_H), float(l), envelope)


def angular_momentum(w: WavefunctionalGrid, method: str = "fd") -> np.ndarray:
    """Apply L = -i d/dphi on the periodic phi circle.

    ``fd`` uses second-order central differences, ``spectral`` an FFT
    derivative that is exact for integer windings. The duplicated 2*pi
    endpoint is dropped before differencing and restored afterwards.
    """
    psi = w.samples[:, :-1]
    m = psi.shape[1]
    if method == "fd":
        d = (np.roll(psi, -1, axis=1) - np.roll(psi, 1, axis=1)) / (2 * w.dphi)
    elif method == "spectral":
        k = np.fft.fftfreq(m, d=1.0 / m)  # integer wavenumbers on the circle
        d = np.fft.ifft(1j * k[None, :] * np.fft.fft(psi, axis=1), axis=1)
    else:
        raise QuantizationError(f"unknown derivative method {method!r}")
    Lpsi = -1j * d
    return np.concatenate([Lpsi, Lpsi[:, :1]], axis=1)


def angular_momentum_residual(w: WavefunctionalGrid, method: str = "fd") -> float:
    """||L Psi - sigma_H l Psi||_inf / ||Psi||_inf."""
    if w.phi_values.size < 16:
        raise QuantizationError("degenerate grid: need at least 16 phi points")
    if not np.isclose(w.phi_values[-1] - w.phi_values[0], 2 * np.pi):
        raise QuantizationError("degenerate grid: phi must span [0, 2*pi]")
    norm = np.max(np.abs(w.samples))
    if norm == 0:
        raise QuantizationError("degenerate grid: wavefunctional vanishes")
    r = angular_momentum(w, method) - w.sigma_H * w.l * w.samples
    return float(np.max(np.abs(r)) / norm)


@dataclass(frozen=True)
class SingleModePair:
    """One conjugate gauge pair on a uniform A grid."""

    A: np.ndarray
    sigma_H: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.sigma_H == 0:
            raise QuantizationError("commutator undefined: quantization parameter vanishes")
        if self.A.size < 5 or self.spacing <= 0:
            raise QuantizationError("single-mode grid needs >= 5 increasing points")

    @classmethod
    def uniform(cls, sigma_H: float, h: float = 1e-3, half_width: float = 6.0,
                hbar: float = 1.0) -> "SingleModePair":
        n = int(round(2 * half_width / h)) + 1
        return cls(np.linspace(-half_width, half_width, n), float(sigma_H), hbar)

    @property
    def spacing(self) -> float:
        return float(self.A[1] - self.A[0])

    @property
    def hbar_eff(self) -> float:
        return 4 * math.pi * self.hbar / self.sigma_H

    def A1(self, f: np.ndarray) -> np.ndarray:
        return self.A * f

    def A2(self, f: np.ndarray) -> np.ndarray:
        # -i hbar_eff d/dA, so that [A1, A2] = +i hbar_eff
        df = np.zeros_like(f, dtype=complex)
        df[1:-1] = (f[2:] - f[:-2]) / (2 * self.spacing)
        return -1j * self.hbar_eff * df

    def commutator(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=complex)
        return self.A1(self.A2(f)) - self.A2(self.A1(f))


def _trim(pair: SingleModePair) -> slice:
    # two nodes at each end see the one-sided zero fill of A2 twice
    return slice(2, pair.A.size - 2)


def commutator_constant(pair: SingleModePair, f: np.ndarray) -> float:
    """Least-squares c in [A1, A2] f = i c f over the trimmed interior."""
    s = _trim(pair)
    f = np.asarray(f(pair.A) if callable(f) else f, dtype=complex)
    cf = pair.commutator(f)[s] / 1j
    f = f[s]
    return float(np.real(np.vdot(f, cf) / np.vdot(f, f)))


def commutator_residual(pair: SingleModePair, test_functions) -> float:
    """max_f ||[A1, A2] f - i hbar_eff f||_inf / ||f||_inf away from the ends."""
    s = _trim(pair)
    worst = 0.0
    for f in test_functions:
        f = np.asarray(f(pair.A) if callable(f) else f, dtype=complex)
        if f.shape != pair.A.shape:
            raise QuantizationError("test function does not match the A grid")
        r = pair.commutator(f)[s] - 1j * pair.hbar_eff * f[s]
        worst = max(worst, float(np.max(np.abs(r)) / np.max(np.abs(f[s]))))
    return worst


def gaussian_test_function(center: float = 0.0, width: float = 1.0):
    return lambda A: np.exp(-((A - center) ** 2) / (2 * width**2))


def default_test_functions():
    return [
        gaussian_test_function(0.0, 1.0),
        gaussian_test_function(0.5, 0.7),
        lambda A: np.exp(-(A**2) / 2) * np.cos(2 * A),
    ]


def quantize_report(sigma_in: float, n_phi: int = 256, h: float = 1e-3,
                    envelope: str = "gaussian") -> dict:
    """Run every quantization check for one continuous Hall conductivity."""
    snapped = snap_sigma_H(sigma_in)
    w = build_wavefunctional(snapped, 1.0, phi_values=phi_grid(n_phi), envelope=envelope)
    comm = None
    if snapped > 0:
        pair = SingleModePair.uniform(snapped, h=h)
        comm = commutator_residual(pair, default_test_functions())
    return {
        "sigma_in": float(sigma_in),
        "sigma_snapped": snapped,
        "single_valued": single_valuedness_check(sigma_in, 1.0),
        "angular_residual": angular_momentum_residual(w),
        "commutator_residual": comm,
    }
