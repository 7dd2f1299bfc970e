"""
Inversion Results
=================
Containers for fit outputs and measured datasets consumed by the
inversion procedures.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..exceptions import DomainError, NumericalError
from ..sensor.config import StarkParams


@dataclass
class FitResult:
    """Named parameters with 1σ uncertainties and covariance"""
    names: List[str]
    values: np.ndarray
    covariance: np.ndarray
    residual_sse: float
    n_points: int = 0
    seed: Optional[int] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (len(self.names), len(self.names)):
            raise NumericalError(f"covariance shape {cov.shape} does not match {len(self.names)} parameters")
        scale = max(float(np.max(np.abs(cov))), 1e-300)
        if np.max(np.abs(cov - cov.T)) > 1e-9 * scale:
            raise NumericalError("covariance is not symmetric")
        self.covariance = 0.5 * (cov + cov.T)
        if np.any(np.diag(self.covariance) < 0):
            raise NumericalError("covariance has negative variances")

    @property
    def parameters(self) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(self.names, self.values)}

    @property
    def sigma(self) -> Dict[str, float]:
        return {
            name: float(np.sqrt(self.covariance[i, i]))
            for i, name in enumerate(self.names)
        }

    def __getitem__(self, name: str) -> float:
        return self.parameters[name]

    def to_stark_params(self) -> StarkParams:
        """Convert a Stark fit into sensor parameters"""
        sigma = self.sigma
        return StarkParams(
            d=self['d'], alpha=self['alpha'], f0=self['f0'],
            sigma_d=sigma['d'], sigma_alpha=sigma['alpha'], sigma_f0=sigma['f0'],
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'parameters': self.parameters,
            'sigma': self.sigma,
            'covariance': self.covariance.tolist(),
            'residual_sse': float(self.residual_sse),
            'n_points': int(self.n_points),
            'seed': self.seed,
            'diagnostics': self.diagnostics,
        }


@dataclass
class ThresholdEstimate:
    """Onset voltage of a Stark shift from a flat-then-line fit"""
    v_threshold: float
    sigma_v: float
    flat_level: float
    rise_slope: float
    sse: float
    sse_flat: float
    voltage_range: tuple
    onset_before_scan: bool = False
    n_resamples: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        low, high = self.voltage_range
        if not low <= self.v_threshold <= high:
            raise NumericalError(
                f"threshold {self.v_threshold} V outside scanned range [{low}, {high}] V"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'v_threshold_v': float(self.v_threshold),
            'sigma_v': float(self.sigma_v),
            'flat_level_ghz': float(self.flat_level),
            'rise_slope_ghz_per_v': float(self.rise_slope),
            'sse': float(self.sse),
            'sse_flat': float(self.sse_flat),
            'voltage_range_v': [float(v) for v in self.voltage_range],
            'onset_before_scan': bool(self.onset_before_scan),
            'n_resamples': int(self.n_resamples),
            'seed': self.seed,
        }


@dataclass
class DopingInterval:
    """Worst-case doping band from threshold and position uncertainties"""
    n_d_low_cm3: float
    n_d_mid_cm3: float
    n_d_high_cm3: float

    def contains(self, n_d_cm3: float) -> bool:
        return self.n_d_low_cm3 <= n_d_cm3 <= self.n_d_high_cm3

    def to_dict(self) -> Dict[str, float]:
        return {
            'n_d_low_cm3': float(self.n_d_low_cm3),
            'n_d_mid_cm3': float(self.n_d_mid_cm3),
            'n_d_high_cm3': float(self.n_d_high_cm3),
        }


@dataclass
class CvCurve:
    """Capacitance-voltage sweep of a contact of known area"""
    voltages_v: np.ndarray
    capacitance_f: np.ndarray
    contact_area_cm2: float

    def __post_init__(self):
        self.voltages_v = np.asarray(self.voltages_v, dtype=float)
        self.capacitance_f = np.asarray(self.capacitance_f, dtype=float)
        if self.voltages_v.shape != self.capacitance_f.shape:
            raise DomainError("voltage and capacitance arrays differ in length")
        if self.voltages_v.size < 5:
            raise DomainError("CV curve needs at least 5 samples")
        if np.any(self.capacitance_f <= 0):
            raise DomainError("capacitance must be > 0")
        if self.contact_area_cm2 <= 0:
            raise DomainError("contact area must be > 0")


@dataclass
class CountTimeSeries:
    """Photon counts per bin recorded at the working point"""
    counts: np.ndarray
    sample_rate_hz: float
    duration_s: float

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float)
        if np.any(self.counts < 0):
            raise DomainError("counts must be >= 0")
        if self.sample_rate_hz <= 0:
            raise DomainError("sample rate must be > 0")
        if abs(self.duration_s * self.sample_rate_hz - self.counts.size) > 1:
            raise DomainError(
                f"duration·rate = {self.duration_s * self.sample_rate_hz:g} "
                f"does not match {self.counts.size} samples"
            )


@dataclass
class SensitivityResult:
    """Field sensitivity from count fluctuations"""
    eta_kv_m_sqrt_hz: float
    sigma_eta: float
    per_bin_std_kv_m: np.ndarray
    n_bins: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'eta_kv_per_m_sqrt_hz': float(self.eta_kv_m_sqrt_hz),
            'sigma_eta_kv_per_m_sqrt_hz': float(self.sigma_eta),
            'n_bins': int(self.n_bins),
        }
