"""
Optical Response
================
PLE doublet line shape, working point for count-rate sensing and the
phenomenological linewidth-vs-carrier-density calibration.
"""

from typing import Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..exceptions import DomainError
from .config import LinewidthModel, PleModel


class OpticsModel:
    """Forward models for PLE scans"""

    @staticmethod
    def lorentzian(freqs, center: float, fwhm: float, amplitude: float) -> np.ndarray:
        """Peak-normalised Lorentzian (same units for freqs, center, fwhm)"""
        f = np.asarray(freqs, dtype=float)
        return amplitude / (1.0 + (2.0 * (f - center) / fwhm) ** 2)

    @staticmethod
    def ple_spectrum(model: PleModel, freqs) -> np.ndarray:
        """
        Count rate of the A₁/A₂ doublet.

        Args:
            model: PLE line model (A₂ sits a1_a2_detuning above A₁)
            freqs: Laser frequencies in GHz

        Returns:
            Counts/s per frequency
        """
        fwhm_ghz = model.fwhm_mhz / 1e3
        a1 = OpticsModel.lorentzian(freqs, model.a1_center_ghz, fwhm_ghz, model.amplitude_cps)
        a2 = OpticsModel.lorentzian(
            freqs, model.a1_center_ghz + model.a1_a2_detuning_ghz, fwhm_ghz, model.amplitude_cps
        )
        return a1 + a2 + model.background_cps

    @staticmethod
    def ple_gradient(model: PleModel, freqs) -> np.ndarray:
        """d(counts/s)/df in counts/s per GHz"""
        f = np.asarray(freqs, dtype=float)
        fwhm = model.fwhm_mhz / 1e3
        total = np.zeros_like(f)
        for center in (model.a1_center_ghz, model.a1_center_ghz + model.a1_a2_detuning_ghz):
            u = 2.0 * (f - center) / fwhm
            total += -model.amplitude_cps * 2.0 * u * (2.0 / fwhm) / (1.0 + u ** 2) ** 2
        return total

    @staticmethod
    def working_point(model: PleModel) -> Tuple[float, float]:
        """
        Steepest point on the low-frequency flank of A₁.

        Args:
            model: PLE line model

        Returns:
            Tuple of (frequency in GHz, gradient in counts/s per GHz)
        """
        fwhm = model.fwhm_mhz / 1e3
        center = model.a1_center_ghz
        result = minimize_scalar(
            lambda f: -abs(OpticsModel.ple_gradient(model, [f])[0]),
            bounds=(center - fwhm, center),
            method='bounded',
            options={'xatol': fwhm * 1e-9},
        )
        freq = float(result.x)
        return freq, float(OpticsModel.ple_gradient(model, [freq])[0])

    @staticmethod
    def linewidth_response(n_local_cm3: float, lw: LinewidthModel) -> float:
        """
        Optical FWHM for a local free-carrier density.

        Logistic in log₁₀(n) with base-10 steepness per decade; tends to
        gamma_depleted at n → 0 and gamma_undepleted at n → ∞.

        Args:
            n_local_cm3: Free-carrier density in cm⁻³
            lw: Linewidth calibration

        Returns:
            FWHM in MHz
        """
        if n_local_cm3 < 0:
            raise DomainError(f"carrier density must be >= 0, got {n_local_cm3}")
        if n_local_cm3 == 0:
            weight = 0.0
        else:
            decades = np.log10(n_local_cm3) - np.log10(lw.n_half_cm3)
            # 1/(1 + 10^(-k·Δ)) written to stay finite at both ends
            weight = float(0.5 * (1.0 + np.tanh(0.5 * lw.steepness * decades * np.log(10.0))))
        gamma = lw.gamma_depleted_mhz + (lw.gamma_undepleted_mhz - lw.gamma_depleted_mhz) * weight
        return max(gamma, lw.gamma_floor_mhz)
