"""
Sensor Configuration
====================
Parameter sets of the V_Si sensor: Stark coefficients, spin model,
PLE line model, linewidth calibration, and computed ODMR spectra.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from ..exceptions import DomainError


@dataclass(frozen=True)
class StarkParams:
    """Optical Stark coefficients: Δf = -d·E - (α/2)·E² + f0"""
    d: float                    # GHz per MV/m, signed as fitted
    alpha: float                # GHz per (MV/m)²
    f0: float = 0.0             # GHz
    sigma_d: float = 0.0
    sigma_alpha: float = 0.0
    sigma_f0: float = 0.0

    def __post_init__(self):
        for name in ('sigma_d', 'sigma_alpha', 'sigma_f0'):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")

    @property
    def dipole_magnitude(self) -> float:
        """|d| as quoted in reports"""
        return abs(self.d)


@dataclass(frozen=True)
class SpinModel:
    """Spin-3/2 ground state: H = (D + d_z·E_z)·S_z²"""
    d_mhz: float = 35.0                          # half the zero-field splitting
    d_gs_hz_per_v_m: float = -0.07               # measured peak-shift gradient
    dz_hz_per_v_m: Optional[float] = None        # defaults to d_gs / 2

    def __post_init__(self):
        if self.d_mhz <= 0:
            raise DomainError(f"D must be > 0, got {self.d_mhz}")
        if self.dz_hz_per_v_m is None:
            # the |1/2>→|3/2> transition moves by 2·d_z·E_z
            object.__setattr__(self, "dz_hz_per_v_m", self.d_gs_hz_per_v_m / 2.0)

    @property
    def dimension(self) -> int:
        return 4


@dataclass(frozen=True)
class PleModel:
    """A₁/A₂ doublet seen in a PLE scan"""
    a1_center_ghz: float = 0.0
    a1_a2_detuning_ghz: float = 1.0
    fwhm_mhz: float = 80.0
    amplitude_cps: float = 2000.0
    background_cps: float = 100.0

    def __post_init__(self):
        if self.fwhm_mhz <= 0:
            raise DomainError(f"fwhm must be > 0, got {self.fwhm_mhz}")
        if self.amplitude_cps < 0:
            raise DomainError("amplitude must be >= 0")
        if self.background_cps < 0:
            raise DomainError("background must be >= 0")


@dataclass(frozen=True)
class LinewidthModel:
    """Phenomenological optical linewidth vs. local free-carrier density"""
    gamma_depleted_mhz: float = 80.0
    gamma_undepleted_mhz: float = 205.2
    gamma_floor_mhz: float = 14.0
    n_half_cm3: float = 1e12
    steepness: float = 1.0

    def __post_init__(self):
        if not self.gamma_floor_mhz <= self.gamma_depleted_mhz <= self.gamma_undepleted_mhz:
            raise DomainError("need gamma_floor <= gamma_depleted <= gamma_undepleted")
        if self.n_half_cm3 <= 0:
            raise DomainError("n_half must be > 0")
        if self.steepness <= 0:
            raise DomainError("steepness must be > 0")


@dataclass
class OdmrSpectrum:
    """Readout population per microwave frequency"""
    mw_frequencies_mhz: np.ndarray
    transfer_population: np.ndarray

    def __post_init__(self):
        pops = np.asarray(self.transfer_population)
        if np.any(pops < -1e-9) or np.any(pops > 1 + 1e-9):
            raise DomainError("ODMR populations must lie in [0, 1]")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'frequency_mhz': self.mw_frequencies_mhz,
            'population': self.transfer_population,
        })
