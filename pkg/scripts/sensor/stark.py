"""
Stark Shift
===========
Quadratic optical Stark response of the A₁ line.
"""

import numpy as np

from .config import StarkParams


class StarkModel:
    """Evaluate Δf_A1 = -d·E - (α/2)·E² + f0"""

    @staticmethod
    def stark_shift(e_local, params: StarkParams):
        """
        Relative A₁ frequency for a local field.

        Args:
            e_local: Local field in MV/m (scalar or array)
            params: Stark coefficients

        Returns:
            Δf_A1 in GHz, same shape as e_local
        """
        e = np.asarray(e_local, dtype=float)
        shift = -params.d * e - 0.5 * params.alpha * e ** 2 + params.f0
        return float(shift) if shift.ndim == 0 else shift

    @staticmethod
    def stark_slope(e_local, params: StarkParams):
        """dΔf/dE in GHz per MV/m"""
        e = np.asarray(e_local, dtype=float)
        slope = -params.d - params.alpha * e
        return float(slope) if slope.ndim == 0 else slope
