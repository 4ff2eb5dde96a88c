import math

import pytest
from hypothesis import given, strategies as st
from scipy import constants as sc

from hallsim.params import (ParameterError, PhysicalParams, UnitSystem, conductance_quantum,
                            cyclotron_frequency, hall_parameter, magnetic_length, si_electron)

pos = st.floats(1e-3, 1e3)


def test_natural_requires_unit_constants():
    with pytest.raises(ParameterError):
        PhysicalParams(e=2.0)


@pytest.mark.parametrize("field", ["e", "hbar", "mu", "tau"])
def test_positive_fields(field):
    with pytest.raises(ParameterError, match=f"{field} must be positive"):
        PhysicalParams(units="si", **{field: 0.0})


def test_negative_field_rejected():
    with pytest.raises(ParameterError, match="B must be non-negative"):
        PhysicalParams(B=-1.0)


def test_cyclotron_frequency():
    assert cyclotron_frequency(PhysicalParams()) == 1.0
    assert cyclotron_frequency(PhysicalParams(B=0.0)) == 0.0
    p = PhysicalParams(e=1.602e-19, mu=9.109e-31, B=10.0, units="si")
    assert abs(cyclotron_frequency(p) - 1.7588e12) < 1e8


def test_hall_parameter():
    assert hall_parameter(PhysicalParams(B=2.0, tau=0.5)) == 1.0
    assert hall_parameter(PhysicalParams(B=0.0)) == 0.0
    assert hall_parameter(PhysicalParams(B=50.0)) == 50.0


def test_magnetic_length():
    assert magnetic_length(PhysicalParams()) == 1.0
    assert magnetic_length(PhysicalParams(B=4.0)) == 0.5
    assert abs(magnetic_length(si_electron(B=10.0)) - 8.11e-9) < 1e-11
    with pytest.raises(ParameterError, match="magnetic length undefined at zero field"):
        magnetic_length(PhysicalParams(B=0.0))


def test_conductance_quantum():
    assert conductance_quantum(PhysicalParams()) == 1.0
    assert math.isclose(conductance_quantum(si_electron()), sc.e**2 / sc.h, rel_tol=1e-12)


@given(pos, pos, pos)
def test_magnetic_length_identity(B, tau, n):
    p = PhysicalParams(B=B, tau=tau, n=n)
    assert math.isclose(magnetic_length(p) ** 2 * p.e * p.B, p.hbar, rel_tol=1e-14)


@given(pos, pos)
def test_hall_parameter_linear(B, tau):
    p = PhysicalParams(B=B, tau=tau)
    assert math.isclose(hall_parameter(p.with_(B=2 * B)), 2 * hall_parameter(p), rel_tol=1e-14)
    assert math.isclose(hall_parameter(p.with_(tau=2 * tau)), 2 * hall_parameter(p),
                        rel_tol=1e-14)


@given(st.floats(1e-14, 1e-10), st.floats(1e10, 1e18), st.floats(0.01, 100))
def test_unit_round_trip(tau, n, B):
    p = si_electron(tau=tau, n=n, B=B)
    u = UnitSystem.for_params(p)
    q = u.to_si(u.to_natural(p))
    for name in ("e", "hbar", "mu", "tau", "n", "B"):
        assert math.isclose(getattr(q, name), getattr(p, name), rel_tol=1e-12)


def test_unit_mismatch_rejected():
    p = si_electron()
    with pytest.raises(ParameterError):
        UnitSystem.si(mass=2 * sc.m_e).to_natural(p)
