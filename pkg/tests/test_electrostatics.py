"""Tests for the depletion-approximation device model"""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from scripts.device import BiasPoint, DeviceSimulator, DopantType, LayerRole, LayerSpec, DeviceStack
from scripts.exceptions import DomainError
from scripts.units import EPS_0, PER_CM3, Q_E


def test_builtin_voltage_in_expected_band(stack):
    v_bi = DeviceSimulator.builtin_voltage(stack)
    assert 2.85 <= v_bi <= 3.05
    assert v_bi == pytest.approx(3.0018, abs=2e-3)


def test_depletion_width_at_zero_bias(material):
    x_n = DeviceSimulator.depletion_width(0.0, 9e14, 2.95, material)
    assert x_n == pytest.approx(1.9, rel=0.03)
    assert x_n == pytest.approx(1.8707, rel=1e-3)


def test_depletion_width_grows_with_sqrt_of_potential(material):
    x0 = DeviceSimulator.depletion_width(0.0, 9e14, 2.95, material)
    x10 = DeviceSimulator.depletion_width(10.0, 9e14, 2.95, material)
    assert x10 == pytest.approx(3.919, rel=1e-3)
    assert x10 / x0 == pytest.approx(np.sqrt(12.95 / 2.95), rel=1e-12)


def test_forward_flooded_junction_rejected(material):
    with pytest.raises(DomainError):
        DeviceSimulator.depletion_width(-3.5, 9e14, 2.95, material)


def test_full_width_reduces_to_one_sided_form(material):
    for n_d in (1e14, 9e14, 1e15):
        n_a = 1e4 * n_d
        full = DeviceSimulator.depletion_width_full(5.0, n_a, n_d, 2.95, material)
        reduced = DeviceSimulator.depletion_width(5.0, n_d, 2.95, material)
        assert full == pytest.approx(reduced, rel=1e-4)


def test_lorentz_factor():
    assert DeviceSimulator.lorentz_local_field(3.0, 9.66) == pytest.approx(11.66)


def test_electron_density_from_current():
    n_e = DeviceSimulator.electron_density_from_current(1.602e-4, 1e7)
    assert n_e == pytest.approx(1.0e8, rel=1e-3)
    with pytest.raises(DomainError):
        DeviceSimulator.electron_density_from_current(1e-4, 0.0)


@pytest.mark.parametrize("voltage, expected", [(10.0, 15.47), (20.0, 25.48), (30.0, 35.34)])
def test_local_field_at_shallow_emitter(simulator, stack, voltage, expected):
    e_local = simulator.local_field_at(stack, BiasPoint(voltage), 1.61)
    assert e_local == pytest.approx(expected, rel=0.05)


def test_punch_through_between_10_and_12_volts(simulator, stack):
    assert not simulator.field_profile(stack, BiasPoint(10.5)).punch_through
    assert simulator.field_profile(stack, BiasPoint(11.5)).punch_through


@pytest.mark.parametrize("voltage", [0.0, 5.0, 20.0, 30.0])
def test_field_integrates_to_total_potential(simulator, stack, voltage):
    profile = simulator.field_profile(stack, BiasPoint(voltage))
    # MV/m · μm = V
    area = trapezoid(profile.e_macro, profile.positions_um)
    assert area == pytest.approx(voltage + profile.v_bi, rel=1e-3)


def test_zero_field_at_flat_band(simulator, stack):
    v_bi = DeviceSimulator.builtin_voltage(stack)
    profile = simulator.field_profile(stack, BiasPoint(-v_bi))
    assert profile.x_n_um == 0.0
    assert np.all(profile.e_macro == 0.0)
    assert np.all(profile.e_local == 0.0)


def test_field_is_nonnegative_and_nonincreasing(simulator, stack):
    profile = simulator.field_profile(stack, BiasPoint(7.0))
    assert np.all(profile.e_macro >= 0)
    assert np.all(np.diff(profile.e_macro) <= 1e-12)


def test_band_diagram_offset_by_bandgap(simulator, stack):
    bands = simulator.band_diagram(stack, BiasPoint(10.0))
    assert bands.valence_ev[0] == 0.0
    np.testing.assert_allclose(bands.conduction_ev - bands.valence_ev, stack.material.bandgap_ev)
    assert np.all(np.diff(bands.valence_ev) <= 1e-12)


def test_carrier_profile_steps_at_depletion_edge(simulator, stack):
    carriers = simulator.carrier_profile(stack, BiasPoint(0.0))
    inside = carriers.positions_um < carriers.x_n_um
    assert np.all(carriers.electron_cm3[inside] == 0.0)
    assert np.all(carriers.electron_cm3[~inside] == stack.n_d_cm3)

    punched = simulator.carrier_profile(stack, BiasPoint(30.0))
    assert punched.punch_through
    assert np.all(punched.electron_cm3 == 0.0)


def test_stack_rejects_wrong_layer_order():
    with pytest.raises(DomainError):
        DeviceStack(layers=[
            LayerSpec(LayerRole.INTRINSIC_N, DopantType.DONOR, 9e14, 4.1),
            LayerSpec(LayerRole.P_CONTACT, DopantType.ACCEPTOR, 2e19, 2.0),
        ])


def test_stack_rejects_weak_contact():
    with pytest.raises(DomainError):
        DeviceStack(layers=[
            LayerSpec(LayerRole.P_CONTACT, DopantType.ACCEPTOR, 1e16, 2.0),
            LayerSpec(LayerRole.INTRINSIC_N, DopantType.DONOR, 9e14, 4.1),
        ])


def test_with_intrinsic_doping_keeps_other_layers(stack):
    other = stack.with_intrinsic_doping(7e14)
    assert other.n_d_cm3 == 7e14
    assert other.n_a_cm3 == stack.n_a_cm3
    assert other.intrinsic_width_um == stack.intrinsic_width_um


def test_carrier_profile_flat_band_is_undepleted(simulator, stack):
    v_bi = DeviceSimulator.builtin_voltage(stack)
    carriers = simulator.carrier_profile(stack, BiasPoint(-v_bi))
    assert carriers.x_n_um == 0.0
    assert np.all(carriers.electron_cm3 == stack.n_d_cm3)
    assert carriers.at(0.0) == stack.n_d_cm3


@pytest.mark.parametrize("voltage", [5.0, 10.0])
def test_field_slope_matches_space_charge(simulator, stack, voltage):
    profile = simulator.field_profile(stack, BiasPoint(voltage))
    x = profile.positions_um
    depleted = (x[:-1] < profile.x_n_um) & (x[1:] < profile.x_n_um)
    slopes = np.diff(profile.e_macro)[depleted] / np.diff(x)[depleted]
    # C/m³ over F/m gives V/m², rescaled to MV/m per μm
    expected = Q_E * stack.n_d_cm3 * PER_CM3 / (EPS_0 * stack.material.eps_r) * 1e-12
    np.testing.assert_allclose(np.abs(slopes), expected, rtol=1e-2)


@pytest.mark.parametrize("voltage", [10.0, 30.0])
def test_valence_band_gradient_is_field(simulator, stack, voltage):
    profile = simulator.field_profile(stack, BiasPoint(voltage))
    bands = simulator.band_diagram(stack, BiasPoint(voltage))
    x = bands.positions_um
    step = x[1] - x[0]
    interior = (x > x[0]) & (x < x[-1]) & (x < profile.x_n_um - 2 * step)
    gradient = -np.gradient(bands.valence_ev, x)
    np.testing.assert_allclose(gradient[interior], profile.e_macro[interior], rtol=1e-2)


@pytest.mark.parametrize("voltage", [0.0, 30.0])
def test_band_drop_equals_total_potential(simulator, stack, voltage):
    bands = simulator.band_diagram(stack, BiasPoint(voltage))
    v_bi = DeviceSimulator.builtin_voltage(stack)
    drop = bands.valence_ev[0] - bands.valence_ev[-1]
    assert drop == pytest.approx(voltage + v_bi, rel=5e-3)


@pytest.mark.parametrize("voltage", [0.0, 4.0, 25.0])
def test_depletion_width_halves_at_four_times_doping(material, voltage):
    x_n = DeviceSimulator.depletion_width(voltage, 9e14, 2.95, material)
    x_4n = DeviceSimulator.depletion_width(voltage, 4 * 9e14, 2.95, material)
    assert x_4n == pytest.approx(x_n / 2, rel=1e-12)


def test_lorentz_local_field_is_linear():
    e1 = np.array([0.0, 1.5, 12.0])
    e2 = np.array([3.0, -2.0, 40.0])
    combined = DeviceSimulator.lorentz_local_field(2.0 * e1 - 0.5 * e2, 9.66)
    separate = (
        2.0 * DeviceSimulator.lorentz_local_field(e1, 9.66)
        - 0.5 * DeviceSimulator.lorentz_local_field(e2, 9.66)
    )
    np.testing.assert_allclose(combined, separate, rtol=1e-12, atol=1e-12)
