"""
Doping Analyzer
===============
Intrinsic-layer donor density from an emitter threshold and, for
comparison, from a capacitance-voltage sweep.
"""

import logging
from typing import Optional

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P

from ..device.config import MaterialParams
from ..exceptions import DomainError
from ..units import EPS_0, PER_CM3, Q_E, UM
from .results import CvCurve, DopingInterval


class DopingAnalyzer:
    """Convert depletion thresholds and CV sweeps into N_D"""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)

    @staticmethod
    def extract_doping(
        v_threshold: float,
        x_um: float,
        v_bi: float,
        material: Optional[MaterialParams] = None
    ) -> float:
        """
        N_D = 2ε(V_th + V_bi)/(q·x²), inverting the depletion width at the
        bias where the edge reaches the emitter.

        Args:
            v_threshold: Threshold reverse voltage in V
            x_um: Emitter distance from the p-contact interface in μm
            v_bi: Built-in voltage in V
            material: Material constants

        Returns:
            N_D in cm⁻³
        """
        material = material or MaterialParams()
        if x_um <= 0:
            raise DomainError(f"emitter position must be > 0, got {x_um} μm")
        if v_threshold + v_bi <= 0:
            raise DomainError(f"V_th + V_bi must be > 0, got {v_threshold + v_bi}")
        eps = EPS_0 * material.eps_r
        return 2.0 * eps * (v_threshold + v_bi) / (Q_E * (x_um * UM) ** 2) / PER_CM3

    def doping_uncertainty(
        self,
        v_threshold: float,
        sigma_v: float,
        x_um: float,
        sigma_x_um: float,
        v_bi: float,
        material: Optional[MaterialParams] = None
    ) -> DopingInterval:
        """
        Worst-case corners: (V - σ_V, x + σ_x) for the low end and
        (V + σ_V, x - σ_x) for the high end.

        Args:
            v_threshold: Threshold voltage in V
            sigma_v: 1σ on the threshold
            x_um: Emitter position in μm
            sigma_x_um: 1σ on the position
            v_bi: Built-in voltage in V

        Returns:
            DopingInterval (low, mid, high)
        """
        if sigma_v < 0 or sigma_x_um < 0:
            raise DomainError("uncertainties must be >= 0")
        if x_um - sigma_x_um <= 0:
            raise DomainError(f"x - σ_x = {x_um - sigma_x_um} μm is not a valid position")

        interval = DopingInterval(
            n_d_low_cm3=self.extract_doping(v_threshold - sigma_v, x_um + sigma_x_um, v_bi, material),
            n_d_mid_cm3=self.extract_doping(v_threshold, x_um, v_bi, material),
            n_d_high_cm3=self.extract_doping(v_threshold + sigma_v, x_um - sigma_x_um, v_bi, material),
        )
        self.logger.info(
            f"✓ N_D = {interval.n_d_mid_cm3:.3g} cm⁻³ "
            f"[{interval.n_d_low_cm3:.3g}, {interval.n_d_high_cm3:.3g}]"
        )
        return interval

    def cv_doping(
        self,
        curve: CvCurve,
        material: Optional[MaterialParams] = None,
        window: int = 5,
        degree: int = 2
    ) -> pd.DataFrame:
        """
        Apparent doping profile N_D(V) = -2/(q·ε·A²·d(1/C²)/dV).

        The derivative comes from a local least-squares polynomial over a
        sliding window, so unevenly spaced voltages are allowed. Points
        without a full window are dropped.

        Args:
            curve: CV sweep (positive V is forward bias)
            material: Material constants
            window: Odd number of samples per local fit
            degree: Polynomial degree of the local fit

        Returns:
            DataFrame with voltage_v, inv_c2, d_inv_c2_dv, n_d_cm3, flagged
        """
        material = material or MaterialParams()
        if window % 2 == 0 or window <= degree:
            raise DomainError(f"window must be odd and > degree, got {window}")
        if curve.voltages_v.size < window:
            raise DomainError(f"CV curve shorter than the {window}-point window")

        order = np.argsort(curve.voltages_v, kind='stable')
        v = curve.voltages_v[order]
        inv_c2 = 1.0 / curve.capacitance_f[order] ** 2
        half = window // 2

        rows = []
        for i in range(half, v.size - half):
            sl = slice(i - half, i + half + 1)
            # centred abscissa keeps the local fit well conditioned
            coef = P.polyfit(v[sl] - v[i], inv_c2[sl], degree)
            rows.append((v[i], inv_c2[i], coef[1]))
        frame = pd.DataFrame(rows, columns=['voltage_v', 'inv_c2', 'd_inv_c2_dv'])

        area_m2 = curve.contact_area_cm2 * 1e-4
        eps = EPS_0 * material.eps_r
        span = float(v[-1] - v[0])
        zero = frame['d_inv_c2_dv'].abs() * span <= 1e-9 * frame['inv_c2'].abs()
        with np.errstate(divide='ignore'):
            n_d = -2.0 / (Q_E * eps * area_m2 ** 2 * frame['d_inv_c2_dv']) / PER_CM3
        frame['n_d_cm3'] = n_d.where(~zero, np.nan)
        frame['flagged'] = zero | (frame['n_d_cm3'] <= 0)

        if frame['flagged'].any():
            self.logger.warning(f"⚠ {int(frame['flagged'].sum())} CV points with non-physical slope")
        return frame
