"""
Stark Fitter
============
Linear least-squares extraction of (d, α, f0) and inversion of the
Stark shift back to a local field.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import statsmodels.api as sm

from ..device.config import BiasPoint, DeviceStack
from ..device.electrostatics import DeviceSimulator
from ..exceptions import DegenerateDataError, OutOfRangeError
from ..sensor.config import StarkParams
from .results import FitResult

STARK_NAMES = ['d', 'alpha', 'f0']


class StarkFitter:
    """Fit and invert Δf = -d·E - (α/2)·E² + f0"""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)

    @staticmethod
    def design_matrix(e_local: np.ndarray) -> np.ndarray:
        return np.column_stack([-e_local, -0.5 * e_local ** 2, np.ones_like(e_local)])

    def fit_stark(
        self,
        e_local: Sequence[float],
        delta_f: Sequence[float],
        sigma: Optional[Sequence[float]] = None
    ) -> FitResult:
        """
        Ordinary (or weighted) least squares for the Stark coefficients.

        Args:
            e_local: Local fields in MV/m
            delta_f: Relative A₁ frequencies in GHz
            sigma: Optional 1σ per point (GHz) for weighting

        Returns:
            FitResult with parameters d, alpha, f0
        """
        e = np.asarray(e_local, dtype=float)
        y = np.asarray(delta_f, dtype=float)
        if e.shape != y.shape:
            raise DegenerateDataError("field and frequency arrays differ in length")
        if e.size < 3 or np.unique(e).size < 3:
            self.logger.error(f"✗ Stark fit needs >= 3 distinct fields, got {np.unique(e).size}")
            raise DegenerateDataError("Stark fit needs at least 3 distinct field values")

        x = self.design_matrix(e)
        if np.linalg.matrix_rank(x) < 3:
            raise DegenerateDataError("rank-deficient Stark design matrix")

        if sigma is not None:
            weights = 1.0 / np.asarray(sigma, dtype=float) ** 2
            results = sm.WLS(y, x, weights=weights).fit()
            covariance = np.asarray(results.normalized_cov_params)
        else:
            results = sm.OLS(y, x).fit()
            if results.df_resid > 0:
                covariance = np.asarray(results.cov_params())
            else:
                self.logger.warning("⚠ Exactly determined Stark fit, covariance set to zero")
                covariance = np.zeros((3, 3))

        sse = float(np.sum(results.resid ** 2))
        fit = FitResult(
            names=list(STARK_NAMES),
            values=np.asarray(results.params),
            covariance=covariance,
            residual_sse=sse,
            n_points=int(e.size),
            diagnostics={'weighted': sigma is not None, 'df_resid': float(results.df_resid)},
        )
        self.logger.info(
            f"✓ Stark fit: |d|={fit.to_stark_params().dipole_magnitude:.3f}±{fit.sigma['d']:.3f} GHz/(MV/m), "
            f"α={fit['alpha']:.4f}±{fit.sigma['alpha']:.4f} GHz/(MV/m)², "
            f"f0={fit['f0']:.3f}±{fit.sigma['f0']:.3f} GHz"
        )
        return fit

    def fit_stark_per_doping(
        self,
        stack: DeviceStack,
        voltages: Sequence[float],
        delta_f: Sequence[float],
        x_um: float,
        dopings_cm3: Sequence[float],
        simulator: Optional[DeviceSimulator] = None
    ) -> Dict[float, FitResult]:
        """
        Repeat the Stark fit with fields computed for several intrinsic dopings.

        Args:
            stack: Reference device stack
            voltages: Reverse voltages of the measurements
            delta_f: Measured Δf_A1 in GHz
            x_um: Emitter position
            dopings_cm3: Candidate intrinsic dopings

        Returns:
            Dictionary {N_D: FitResult}
        """
        simulator = simulator or DeviceSimulator(self.logger)
        fits = {}
        for n_d in dopings_cm3:
            candidate = stack.with_intrinsic_doping(n_d)
            fields = [
                simulator.local_field_at(candidate, BiasPoint(v), x_um) for v in voltages
            ]
            self.logger.info(f"Stark fit assuming N_D = {n_d:.3g} cm⁻³")
            fits[float(n_d)] = self.fit_stark(fields, delta_f)
        return fits

    @staticmethod
    def field_roots(delta_f: float, params: StarkParams) -> Tuple[float, float]:
        """Both real solutions of -d·E - (α/2)·E² + f0 = Δf"""
        a = 0.5 * params.alpha
        b = params.d
        c = delta_f - params.f0
        if a == 0:
            if b == 0:
                raise DegenerateDataError("d and α are both zero; field not recoverable")
            root = -c / b
            return root, root
        disc = b * b - 4.0 * a * c
        if disc < 0:
            raise OutOfRangeError(
                f"Δf = {delta_f:.4g} GHz lies beyond the Stark parabola vertex"
            )
        q = -0.5 * (b + np.copysign(np.sqrt(disc), b if b != 0 else 1.0))
        if q == 0:
            return 0.0, 0.0
        return float(c / q), float(q / a)

    @staticmethod
    def reconstruct_field(delta_f: float, params: StarkParams) -> float:
        """
        Local field from a measured Stark shift.

        Picks the root continuously connected to the linear estimate
        (f0 - Δf)/d.

        Args:
            delta_f: Relative A₁ frequency in GHz
            params: Stark coefficients

        Returns:
            Local field in MV/m
        """
        r1, r2 = StarkFitter.field_roots(delta_f, params)
        if params.d == 0:
            return r1 if abs(r1) <= abs(r2) else r2
        linear = (params.f0 - delta_f) / params.d
        return r1 if abs(r1 - linear) <= abs(r2 - linear) else r2

    @staticmethod
    def reconstruct_field_flagged(delta_f: float, params: StarkParams) -> Tuple[float, bool]:
        """Reconstructed field plus a flag set when both roots are negative"""
        r1, r2 = StarkFitter.field_roots(delta_f, params)
        field = StarkFitter.reconstruct_field(delta_f, params)
        return field, (r1 < 0 and r2 < 0)
