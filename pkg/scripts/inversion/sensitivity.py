"""
Sensitivity Estimator
=====================
Electric-field sensitivity of resonant count-rate sensing at a fixed
laser frequency on the A₁ flank.
"""

import logging
from typing import Optional

import numpy as np

from ..exceptions import DegenerateDataError, DomainError
from ..units import KV_PER_M, MV_PER_M
from .results import CountTimeSeries, SensitivityResult


class SensitivityEstimator:
    """η from the spread of 1 s field bins"""

    def __init__(self, logger: Optional[logging.Logger] = None, bin_duration_s: float = 1.0):
        self.logger = logger or logging.getLogger(__name__)
        self.bin_duration_s = bin_duration_s

    def sensitivity(
        self,
        series: CountTimeSeries,
        gradient_cps_per_ghz: float,
        d_ghz_per_mv_m: float
    ) -> SensitivityResult:
        """
        Convert count fluctuations into field fluctuations and average the
        per-bin standard deviation.

        Counts per sample become a rate by multiplying with the sample rate,
        the mean rate is removed and ΔE = Δrate / (|gradient|·|d|).

        Args:
            series: Counts per sample at the working point
            gradient_cps_per_ghz: PLE slope at the working point
            d_ghz_per_mv_m: Dipole coefficient of the emitter

        Returns:
            SensitivityResult with η in kV·m⁻¹·Hz⁻¹ᐟ²
        """
        if gradient_cps_per_ghz == 0 or d_ghz_per_mv_m == 0:
            raise DomainError("gradient and dipole coefficient must be non-zero")
        per_bin = int(round(series.sample_rate_hz * self.bin_duration_s))
        if per_bin < 2:
            raise DegenerateDataError("fewer than 2 samples per bin")
        n_bins = series.counts.size // per_bin
        if n_bins < 2:
            raise DegenerateDataError(
                f"time series of {series.duration_s:g} s holds fewer than 2 bins"
            )

        rate = series.counts * series.sample_rate_hz
        delta_rate = rate - rate.mean()
        delta_e_mv_m = delta_rate / (abs(gradient_cps_per_ghz) * abs(d_ghz_per_mv_m))
        delta_e_kv_m = delta_e_mv_m * (MV_PER_M / KV_PER_M)

        binned = delta_e_kv_m[: n_bins * per_bin].reshape(n_bins, per_bin)
        per_bin_std = binned.std(axis=1, ddof=1)
        eta = float(per_bin_std.mean())
        sigma = float(per_bin_std.std(ddof=1) / np.sqrt(n_bins))

        self.logger.info(f"✓ η = {eta:.2f} ± {sigma:.2f} kV/m/√Hz over {n_bins} bins")
        return SensitivityResult(
            eta_kv_m_sqrt_hz=eta,
            sigma_eta=sigma,
            per_bin_std_kv_m=per_bin_std,
            n_bins=n_bins,
        )
