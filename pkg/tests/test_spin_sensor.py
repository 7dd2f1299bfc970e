"""Tests for the spin Hamiltonian, ODMR propagation and optical models"""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from scripts.exceptions import DomainError
from scripts.inversion import LorentzianFitter
from scripts.sensor import (
    LinewidthModel,
    OpticsModel,
    PleModel,
    SpinModel,
    SpinSimulator,
    StarkModel,
    StarkParams,
    spin_operators,
)

GRID = np.round(np.arange(60.0, 80.0 + 1e-9, 0.1), 10)


@pytest.fixture
def spin(logger):
    return SpinSimulator(logger)


def test_spin_operators_are_spin_three_halves():
    s_x, s_z = spin_operators()
    np.testing.assert_allclose(np.linalg.eigvalsh(s_x), [-1.5, -0.5, 0.5, 1.5], atol=1e-12)
    np.testing.assert_allclose(s_x, s_x.conj().T)
    np.testing.assert_allclose(np.diag(s_z).real, [1.5, 0.5, -0.5, -1.5])


def test_ground_state_hamiltonian_is_hermitian(spin):
    h = spin.ground_state_hamiltonian(2e7, SpinModel())
    np.testing.assert_allclose(h, h.conj().T)


def test_transition_frequency_linear_in_field():
    model = SpinModel()
    assert model.dz_hz_per_v_m == pytest.approx(-0.035)
    assert SpinSimulator.transition_frequency_mhz(0.0, model) == pytest.approx(70.0)
    shift = SpinSimulator.transition_frequency_mhz(3.5e7, model) - 70.0
    assert shift == pytest.approx(2 * -0.035 * 3.5e7 / 1e6)


def test_zero_field_peak_at_70_mhz(spin):
    spectrum = spin.odmr_spectrum(0.0, SpinModel(), 1.0, 0.29, GRID)
    peak = spectrum.mw_frequencies_mhz[np.argmax(spectrum.transfer_population)]
    assert abs(peak - 70.0) <= 0.05
    # a π pulse transfers the whole |±1/2> population, read out with weight ½
    assert spectrum.transfer_population.max() == pytest.approx(0.5, abs=0.01)


def test_zero_field_spectrum_symmetric(spin):
    spectrum = spin.odmr_spectrum(0.0, SpinModel(), 1.0, 0.29, GRID)
    pops = spectrum.transfer_population
    np.testing.assert_allclose(pops, pops[::-1], atol=1e-6)


def test_populations_stay_in_unit_interval(spin):
    spectrum = spin.odmr_spectrum(3e7, SpinModel(), 1.0, 0.29, GRID)
    assert np.all(spectrum.transfer_population >= 0.0)
    assert np.all(spectrum.transfer_population <= 1.0)


def test_threaded_spectrum_matches_serial(logger):
    serial = SpinSimulator(logger).odmr_spectrum(1e7, SpinModel(), 1.0, 0.29, GRID[::5])
    threaded = SpinSimulator(logger, max_workers=4).odmr_spectrum(1e7, SpinModel(), 1.0, 0.29, GRID[::5])
    np.testing.assert_array_equal(serial.transfer_population, threaded.transfer_population)


def test_peak_centres_linear_in_axial_field(spin, logger):
    model = SpinModel()
    fitter = LorentzianFitter(logger)
    fields = np.linspace(0.0, 3.5e7, 5)
    centres = []
    for e_z in fields:
        spectrum = spin.odmr_spectrum(e_z, model, 1.0, 0.29, GRID)
        peak = fitter.fit_peak_window(spectrum.mw_frequencies_mhz, spectrum.transfer_population, 3.0)
        centres.append(peak['center'])
    centres = np.array(centres)

    assert np.all(np.abs(model.dz_hz_per_v_m * fields / 1e6 / model.d_mhz) <= 0.035 + 1e-12)
    slope, intercept = np.polyfit(fields, centres, 1)
    residual = centres - (slope * fields + intercept)
    total_shift = abs(centres[-1] - centres[0])
    assert np.max(np.abs(residual)) < 0.01 * total_shift


def test_odmr_rejects_bad_drive(spin):
    with pytest.raises(DomainError):
        spin.odmr_spectrum(0.0, SpinModel(), 0.0, 0.29, GRID)
    with pytest.raises(DomainError):
        spin.odmr_spectrum(0.0, SpinModel(), 1.0, 0.29, [])


def test_stark_shift_and_slope():
    params = StarkParams(d=-5.60, alpha=-0.03, f0=-0.67)
    assert StarkModel.stark_shift(0.0, params) == pytest.approx(-0.67)
    assert StarkModel.stark_shift(10.0, params) == pytest.approx(56.0 + 1.5 - 0.67)
    assert StarkModel.stark_slope(10.0, params) == pytest.approx(5.60 + 0.3)
    shifts = StarkModel.stark_shift(np.array([0.0, 10.0]), params)
    assert shifts.shape == (2,)


def test_ple_spectrum_peaks_at_both_lines():
    model = PleModel(a1_center_ghz=0.0, a1_a2_detuning_ghz=1.0, fwhm_mhz=80.0)
    counts = OpticsModel.ple_spectrum(model, [0.0, 1.0, 0.5])
    assert counts[0] == pytest.approx(counts[1])
    assert counts[0] > counts[2]


def test_working_point_on_steepest_flank():
    model = PleModel(a1_center_ghz=0.0, fwhm_mhz=80.0, amplitude_cps=2000.0)
    freq, gradient = OpticsModel.working_point(model)
    assert freq == pytest.approx(-0.080 / (2 * np.sqrt(3)), abs=1e-3)
    assert gradient == pytest.approx(2000.0 * 3 * np.sqrt(3) / 4 / 0.080, rel=1e-2)


@pytest.mark.parametrize("n_local, expected", [(0.0, 80.0), (1e12, 142.6), (1e20, 205.2)])
def test_linewidth_response(n_local, expected):
    assert OpticsModel.linewidth_response(n_local, LinewidthModel()) == pytest.approx(expected, abs=0.1)


def test_linewidth_rejects_negative_density():
    with pytest.raises(DomainError):
        OpticsModel.linewidth_response(-1.0, LinewidthModel())


def test_peak_centres_linear_for_positive_coupling(spin, logger):
    model = SpinModel()
    fitter = LorentzianFitter(logger)
    # d_z < 0, so negative axial fields push d_z·E_z/D up to +0.035
    fields = np.linspace(0.0, -3.5e7, 5)
    ratios = model.dz_hz_per_v_m * fields / 1e6 / model.d_mhz
    assert np.all(ratios >= 0.0)
    assert np.all(ratios <= 0.035 + 1e-12)

    centres = np.array([
        fitter.fit_peak_window(
            GRID, spin.odmr_spectrum(e_z, model, 1.0, 0.29, GRID).transfer_population, 3.0
        )['center']
        for e_z in fields
    ])
    expected = [SpinSimulator.transition_frequency_mhz(e_z, model) for e_z in fields]
    np.testing.assert_allclose(centres, expected, atol=0.05)
    slope, intercept = np.polyfit(fields, centres, 1)
    residual = centres - (slope * fields + intercept)
    assert np.max(np.abs(residual)) < 0.01 * abs(centres[-1] - centres[0])


def test_vanishing_drive_transfers_nothing(spin):
    spectrum = spin.odmr_spectrum(0.0, SpinModel(), 1e-4, 0.29, GRID[::10])
    assert np.max(spectrum.transfer_population) < 1e-5


def test_ple_area_matches_two_lorentzians():
    model = PleModel(a1_center_ghz=0.0, a1_a2_detuning_ghz=1.0, fwhm_mhz=80.0,
                     amplitude_cps=2000.0, background_cps=100.0)
    fwhm = model.fwhm_mhz / 1e3
    low, high = -20 * fwhm, 1.0 + 20 * fwhm
    freqs = np.linspace(low, high, 40001)
    area = trapezoid(OpticsModel.ple_spectrum(model, freqs) - model.background_cps, freqs)

    # ∫ A/(1 + (2(f-c)/Γ)²) df = A·Γ/2·atan(2(f-c)/Γ)
    def line_area(center):
        return model.amplitude_cps * fwhm / 2 * (
            np.arctan(2 * (high - center) / fwhm) - np.arctan(2 * (low - center) / fwhm)
        )

    expected = line_area(0.0) + line_area(1.0)
    assert area == pytest.approx(expected, rel=1e-2)
    # the window keeps all but the far tails of the untruncated A·π·Γ
    assert area == pytest.approx(model.amplitude_cps * np.pi * fwhm, rel=2e-2)


def test_linewidth_at_reference_doping():
    assert 200.0 <= OpticsModel.linewidth_response(9e14, LinewidthModel()) <= 210.0


def test_linewidth_monotone_over_random_pairs(rng):
    lw = LinewidthModel()
    densities = 10.0 ** rng.uniform(6.0, 18.0, size=(200, 2))
    densities[:20, 0] = 0.0
    for n1, n2 in np.sort(densities, axis=1):
        assert OpticsModel.linewidth_response(n1, lw) <= OpticsModel.linewidth_response(n2, lw)
        assert OpticsModel.linewidth_response(n1, lw) >= lw.gamma_floor_mhz
