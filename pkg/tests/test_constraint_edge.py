import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hallsim.constraint_edge import (ConstraintError, EdgeProfile, band_cutoff,
                                     boundary_representative, breakdown_check,
                                     edge_current_fraction, edge_profile, gauss_residual,
                                     gradient, helmholtz_split, integrated_constraint,
                                     uniform_field_state)
from hallsim.dynamics import CurrentField, LatticeState
from hallsim.dynamics.lattice import ring_index
from hallsim.params import PhysicalParams
from conftest import slope


def grid(N=32):
    a = 1.0 / (N - 1)
    return LatticeState(N, N, a, 0.1 * a * a)


def test_empty_state_residual(natural):
    r = gauss_residual(grid(), natural, 1.0)
    assert r.inf_norm == 0.0 and not r.residual_field.any()


def test_exact_solution_order(natural):
    Ns = np.array([32, 64, 128])
    res = []
    for N in Ns:
        s = uniform_field_state(N, N, 1 / (N - 1), 10.0, 1.0, natural, gauge_amplitude=0.05)
        res.append(gauss_residual(s, natural, 1.0).inf_norm)
        assert integrated_constraint(s, natural, 1.0).deviation < 1e-6
    assert 1.8 <= slope(1 / (Ns - 1), res) <= 2.2
    s = uniform_field_state(32, 32, 1 / 31, 10.0, 1.0, natural)
    assert gauss_residual(s, natural, 1.0).inf_norm < 1e-12


def test_gradient_field_has_no_curl(natural):
    errs = []
    for N in (32, 64):
        s = grid(N)
        X, Y = s.coords()
        s.A1 = np.pi * np.cos(np.pi * X) * np.sin(2 * np.pi * Y)
        s.A2 = 2 * np.pi * np.sin(np.pi * X) * np.cos(2 * np.pi * Y)
        errs.append(gauss_residual(s, natural, 1.0).inf_norm)
    assert errs[1] < errs[0] / 3.5


def test_integrated_constraint(natural):
    s = uniform_field_state(32, 32, 1 / 31, 0.5, 1.0, natural)
    ic = integrated_constraint(s, natural, 1.0)
    assert ic.n_bar == pytest.approx(0.5) and ic.B_bar == pytest.approx(0.5)
    assert ic.sigma_implied == pytest.approx(1.0) and ic.deviation < 1e-12
    t = s.copy()
    t.psi = s.psi * np.sqrt(2)
    t.A1, t.A2 = 2 * s.A1, 2 * s.A2
    assert integrated_constraint(t, natural, 1.0).sigma_implied == pytest.approx(
        ic.sigma_implied, rel=1e-12)
    with pytest.raises(ConstraintError, match="constraint degenerate: zero mean field"):
        integrated_constraint(grid(), natural, 1.0)


def test_report_integrated_sigma_nonnegative(natural):
    s = uniform_field_state(16, 16, 1 / 15, 3.0, 2.0, natural)
    rep = gauss_residual(s, natural, 2.0, with_split=True)
    assert rep.integrated_sigma == pytest.approx(2.0)
    assert rep.pure_gauge_fraction > 0.99


def test_helmholtz_pure_gauge():
    s = grid(40)
    X, Y = s.coords()
    lam = np.sin(np.pi * X) * np.sin(3 * np.pi * Y) + X * Y * (1 - X) * (1 - Y)
    g1, g2 = gradient(lam, s.nx, s.ny, s.a)
    (G1, G2), (c1, c2) = helmholtz_split(g1, g2, s.a)
    assert np.sqrt(np.sum(c1**2 + c2**2)) < 1e-8
    assert np.abs(G1 - g1).max() < 1e-8


def test_helmholtz_symmetric_gauge():
    s = uniform_field_state(40, 40, 1 / 39, 2.0, 1.0, PhysicalParams())
    (g1, g2), _ = helmholtz_split(s.A1, s.A2, s.a)
    assert np.sqrt(np.sum(g1**2 + g2**2)) < 1e-8


def test_helmholtz_zero():
    z = np.zeros((10, 12))
    (g1, g2), (c1, c2) = helmholtz_split(z, z, 0.1)
    assert not (g1.any() or g2.any() or c1.any() or c2.any())
    with pytest.raises(ConstraintError):
        helmholtz_split(np.zeros((4, 4)), np.zeros((4, 4)), 0.1)


@settings(max_examples=20, deadline=None)
@given(arrays(float, (2, 12, 10), elements=st.floats(-10, 10)))
def test_helmholtz_reconstruction(A):
    (g1, g2), (c1, c2) = helmholtz_split(A[0], A[1], 0.1)
    assert np.abs(A[0] - g1 - c1).max() < 1e-10
    assert np.abs(A[1] - g2 - c2).max() < 1e-10


def test_gradient_part_gauss_residual(natural):
    s = uniform_field_state(32, 32, 1 / 31, 4.0, 1.0, natural, gauge_amplitude=0.1)
    (g1, g2), _ = helmholtz_split(s.A1, s.A2, s.a)
    t = s.copy()
    t.A1, t.A2 = g1, g2
    r = gauss_residual(t, natural, 1.0).residual_field[1:-1, 1:-1]
    rho = s.density()[1:-1, 1:-1]
    assert np.abs(r + rho).max() < 1e-2 * rho.max()


def test_boundary_representative():
    s = grid(48)
    X, Y = s.coords()
    lam = X - 0.5 + 0.3 * Y**2
    w = 0.15
    r1, r2 = boundary_representative(lam, s, w)
    far = ring_index(s.shape) * s.a > w + s.a
    assert not r1[far].any() and not r2[far].any()
    # lam - lam*w vanishes on the boundary, so the two differ by an admissible gauge
    diff = lam * (1 - band_cutoff(s, w))
    assert np.abs(diff[[0, -1], :]).max() == 0 and np.abs(diff[:, [0, -1]]).max() == 0


def current(mag):
    return CurrentField(mag, np.zeros_like(mag), "a")


def test_edge_delta(natural):
    s = grid(24)
    mag = (ring_index(s.shape) == 0).astype(float)
    prof = edge_profile(current(mag), s, natural)
    assert prof.fitted_width <= s.a
    assert edge_current_fraction(prof) == 1.0


def test_edge_uniform(natural):
    s = grid(41)
    p = PhysicalParams(B=100.0)
    prof = edge_profile(current(np.ones(s.shape)), s, p)
    band = ring_index(s.shape) * s.a <= 0.1 * (1 + 1e-12)
    assert edge_current_fraction(prof) == pytest.approx(band.mean(), abs=1e-12)
    assert prof.current_mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(prof.distances) > 0) and prof.distances[0] == 0


@pytest.mark.parametrize("w0", [0.03, 0.05, 0.1])
def test_edge_fit_recovery(natural, w0):
    s = grid(64)
    d = ring_index(s.shape) * s.a
    prof = edge_profile(current(np.exp(-d / w0)), s, natural)
    assert prof.fitted_width == pytest.approx(w0, rel=0.1)


def test_fit_scale_equivariance(natural):
    widths = []
    for c in (1.0, 2.0):
        s = LatticeState(40, 40, c / 39, 1e-6)
        d = ring_index(s.shape) * s.a
        widths.append(edge_profile(current(np.exp(-(d / c) / 0.07) * (1 + d / c)), s,
                                   natural).fitted_width)
    assert widths[1] == pytest.approx(2 * widths[0], rel=1e-9)


def test_fraction_counting():
    prof = EdgeProfile(np.arange(6) * 0.1, np.full(6, 1 / 6), 0.0, 0.25)
    assert abs(edge_current_fraction(prof) - 0.5) <= 1 / 6
    prof = EdgeProfile(np.arange(3) * 0.1, np.array([1.0, 0.0, 0.0]), 0.0, 0.05)
    assert edge_current_fraction(prof) == 1.0


def test_fraction_monotone_in_field(natural):
    s = grid(32)
    rng = np.random.default_rng(2)
    j = current(rng.uniform(size=s.shape))
    fr = [edge_current_fraction(edge_profile(j, s, PhysicalParams(B=B)))
          for B in (1, 10, 100, 1000)]
    assert all(a >= b for a, b in zip(fr, fr[1:]))


def test_no_current(natural):
    s = grid(16)
    with pytest.raises(ConstraintError, match="no current to profile"):
        edge_profile(current(np.zeros(s.shape)), s, natural)


def test_breakdown(natural):
    b = breakdown_check(grid(), natural, 1.0)
    assert not b and b.degenerate
    s = uniform_field_state(32, 32, 1 / 31, 10.0, 1.0, natural)
    assert not breakdown_check(s, natural, 1.0, 0.1)
    t = grid(32)
    X, Y = t.coords()
    t.psi = np.full(t.shape, 10.0 + 0j)
    t.A1, t.A2 = np.ones(t.shape), 2 * X
    t.__post_init__()
    assert breakdown_check(t, natural, 1.0, 0.1)
