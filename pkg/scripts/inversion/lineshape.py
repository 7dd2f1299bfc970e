"""
Line-Shape Fitting
==================
Damped Gauss-Newton (Levenberg-Marquardt) fits of single Lorentzians and
of the shared-width A₁/A₂ doublet.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DegenerateDataError, FitFailedError
from .results import FitResult

MIN_POINTS = 8
LORENTZIAN_NAMES = ['center', 'fwhm', 'amplitude', 'background']
DOUBLET_NAMES = ['a1_center', 'detuning', 'fwhm', 'amplitude_a1', 'amplitude_a2', 'background']


@dataclass
class LevenbergMarquardt:
    """Normal-equation LM with a Marquardt-scaled diagonal"""
    max_iter: int = 200
    lam0: float = 1e-3
    lam_up: float = 2.0
    lam_down: float = 3.0
    xtol: float = 1e-10
    ftol: float = 1e-14

    def solve(
        self,
        residual: Callable[[np.ndarray], np.ndarray],
        jacobian: Callable[[np.ndarray], np.ndarray],
        p0: np.ndarray,
        weights: np.ndarray
    ) -> Tuple[np.ndarray, float, int]:
        """
        Minimise Σ w·r² starting from p0.

        Returns:
            Tuple of (parameters, weighted SSE, iterations)

        Raises:
            FitFailedError: No convergence within max_iter
        """
        p = np.asarray(p0, dtype=float).copy()
        r = residual(p)
        sse = float(np.sum(weights * r ** 2))
        lam = self.lam0

        for iteration in range(1, self.max_iter + 1):
            j = jacobian(p)
            jw = j * weights[:, None]
            a = j.T @ jw
            g = -jw.T @ r
            diag = np.diag(np.maximum(np.diag(a), 1e-30))

            while True:
                try:
                    step = np.linalg.solve(a + lam * diag, g)
                except np.linalg.LinAlgError:
                    step = np.linalg.lstsq(a + lam * diag, g, rcond=None)[0]
                trial = p + step
                r_trial = residual(trial)
                sse_trial = float(np.sum(weights * r_trial ** 2))
                if np.isfinite(sse_trial) and sse_trial <= sse:
                    lam /= self.lam_down
                    break
                lam *= self.lam_up
                if lam > 1e16:
                    break

            if not (np.isfinite(sse_trial) and sse_trial <= sse):
                # no downhill step left: the current point is a minimum
                return p, sse, iteration

            small_step = np.linalg.norm(step) <= self.xtol * (np.linalg.norm(p) + self.xtol)
            small_change = sse - sse_trial <= self.ftol * max(sse, 1e-300)
            p, r, sse = trial, r_trial, sse_trial
            if small_step or small_change or sse == 0.0:
                return p, sse, iteration

        raise FitFailedError(
            f"no convergence after {self.max_iter} iterations",
            diagnostics={'parameters': p.tolist(), 'sse': sse, 'damping': lam},
        )


class LorentzianFitter:
    """Fit PLE and ODMR resonances"""

    def __init__(self, logger: Optional[logging.Logger] = None, engine: Optional[LevenbergMarquardt] = None):
        self.logger = logger or logging.getLogger(__name__)
        self.engine = engine or LevenbergMarquardt()

    @staticmethod
    def _profile(f: np.ndarray, center: float, fwhm: float) -> Tuple[np.ndarray, np.ndarray]:
        u = 2.0 * (f - center) / fwhm
        return u, 1.0 / (1.0 + u ** 2)

    @staticmethod
    def _peak_jacobian(f, center, fwhm, amplitude) -> List[np.ndarray]:
        """Columns ∂/∂center, ∂/∂fwhm, ∂/∂amplitude of A/(1+u²)"""
        u, shape = LorentzianFitter._profile(f, center, fwhm)
        return [
            amplitude * 4.0 * u * shape ** 2 / fwhm,
            amplitude * 2.0 * u ** 2 * shape ** 2 / fwhm,
            shape,
        ]

    @staticmethod
    def _weights(y: np.ndarray, sigma: Optional[Sequence[float]]) -> np.ndarray:
        if sigma is None:
            return np.ones_like(y)
        s = np.asarray(sigma, dtype=float)
        if s.shape != y.shape or np.any(s <= 0):
            raise DegenerateDataError("sigma must be positive and match the data")
        return 1.0 / s ** 2

    @staticmethod
    def _half_width_guess(f: np.ndarray, y: np.ndarray, peak: int, background: float) -> float:
        half = background + 0.5 * (y[peak] - background)
        left = peak
        while left > 0 and y[left] > half:
            left -= 1
        right = peak
        while right < y.size - 1 and y[right] > half:
            right += 1
        width = float(f[right] - f[left])
        return width if width > 0 else float(f[-1] - f[0]) / 10.0

    def _covariance(
        self, j: np.ndarray, weights: np.ndarray, sse: float, n: int, weighted: bool
    ) -> np.ndarray:
        a = j.T @ (j * weights[:, None])
        cov = np.linalg.pinv(a)
        if not weighted:
            dof = max(n - j.shape[1], 1)
            cov = cov * sse / dof
        return cov

    def _prepare(self, freqs, counts) -> Tuple[np.ndarray, np.ndarray]:
        f = np.asarray(freqs, dtype=float)
        y = np.asarray(counts, dtype=float)
        if f.shape != y.shape:
            raise DegenerateDataError("frequency and count arrays differ in length")
        if f.size < MIN_POINTS:
            raise DegenerateDataError(f"line fit needs >= {MIN_POINTS} points, got {f.size}")
        order = np.argsort(f, kind='stable')
        f, y = f[order], y[order]
        if np.ptp(y) <= 1e-12 * max(float(np.max(np.abs(y))), 1.0):
            raise FitFailedError("flat data, no resonance to fit", diagnostics={'points': int(f.size)})
        return f, y

    def fit_lorentzian(
        self,
        freqs: Sequence[float],
        counts: Sequence[float],
        sigma: Optional[Sequence[float]] = None
    ) -> FitResult:
        """
        Single Lorentzian plus constant background.

        Args:
            freqs: Frequencies (any unit; results share it)
            counts: Signal per frequency
            sigma: Optional 1σ per point

        Returns:
            FitResult with center, fwhm, amplitude, background
        """
        f, y = self._prepare(freqs, counts)
        weights = self._weights(y, sigma)

        background = float(np.percentile(y, 10))
        peak = int(np.argmax(y))
        p0 = np.array([
            f[peak],
            self._half_width_guess(f, y, peak, background),
            y[peak] - background,
            background,
        ])

        def model(p):
            _, shape = self._profile(f, p[0], p[1])
            return p[2] * shape + p[3]

        def jacobian(p):
            cols = self._peak_jacobian(f, p[0], p[1], p[2])
            return np.column_stack(cols + [np.ones_like(f)])

        params, sse, iterations = self.engine.solve(lambda p: y - model(p), lambda p: -jacobian(p), p0, weights)
        params[1] = abs(params[1])

        span = float(f[-1] - f[0])
        if not np.all(np.isfinite(params)) or params[1] >= span:
            raise FitFailedError(
                f"fitted FWHM {params[1]:.4g} not resolved by a {span:.4g} scan",
                diagnostics={'parameters': params.tolist(), 'sse': sse},
            )

        result = FitResult(
            names=list(LORENTZIAN_NAMES),
            values=params,
            covariance=self._covariance(jacobian(params), weights, sse, f.size, sigma is not None),
            residual_sse=sse,
            n_points=int(f.size),
            diagnostics={'iterations': iterations},
        )
        self.logger.debug(f"Lorentzian: center={params[0]:.6g}, FWHM={params[1]:.4g} ({iterations} it)")
        return result

    def fit_peak_window(
        self,
        freqs: Sequence[float],
        signal: Sequence[float],
        half_window: float,
        passes: int = 2
    ) -> FitResult:
        """
        Lorentzian fit restricted to a window around the strongest point.

        The window is re-centred on the fitted centre between passes so
        that it ends up symmetric about the resonance.

        Args:
            freqs: Frequencies
            signal: Signal per frequency
            half_window: Half width of the fit window (frequency units)
            passes: Number of fit/re-centre passes

        Returns:
            FitResult of the last pass
        """
        f = np.asarray(freqs, dtype=float)
        y = np.asarray(signal, dtype=float)
        center = float(f[int(np.argmax(y))])
        result = None
        for _ in range(max(1, passes)):
            mask = np.abs(f - center) <= half_window
            result = self.fit_lorentzian(f[mask], y[mask])
            center = result['center']
        return result

    def fit_ple_doublet(
        self,
        freqs_ghz: Sequence[float],
        counts: Sequence[float],
        sigma: Optional[Sequence[float]] = None,
        detuning_guess_ghz: float = 1.0
    ) -> FitResult:
        """
        Two Lorentzians sharing one width; the lower-frequency line is A₁.

        Args:
            freqs_ghz: Laser frequencies in GHz
            counts: Counts per frequency
            sigma: Optional 1σ per point
            detuning_guess_ghz: Starting A₁-A₂ splitting when only one peak stands out

        Returns:
            FitResult with a1_center, detuning, fwhm, amplitude_a1, amplitude_a2, background
        """
        f, y = self._prepare(freqs_ghz, counts)
        weights = self._weights(y, sigma)

        background = float(np.percentile(y, 10))
        first = int(np.argmax(y))
        width = self._half_width_guess(f, y, first, background)
        masked = y.copy()
        masked[np.abs(f - f[first]) < 1.5 * width] = background
        second = int(np.argmax(masked))

        if masked[second] - background > 0.2 * (y[first] - background):
            low, high = sorted((first, second), key=lambda i: f[i])
            p0 = [f[low], f[high] - f[low], width, y[low] - background, y[high] - background, background]
        else:
            p0 = [f[first], detuning_guess_ghz, width, y[first] - background, 0.1 * (y[first] - background), background]
        p0 = np.array(p0, dtype=float)

        def model(p):
            _, s1 = self._profile(f, p[0], p[2])
            _, s2 = self._profile(f, p[0] + p[1], p[2])
            return p[3] * s1 + p[4] * s2 + p[5]

        def jacobian(p):
            c1, w1, a1 = self._peak_jacobian(f, p[0], p[2], p[3])
            c2, w2, a2 = self._peak_jacobian(f, p[0] + p[1], p[2], p[4])
            return np.column_stack([c1 + c2, c2, w1 + w2, a1, a2, np.ones_like(f)])

        params, sse, iterations = self.engine.solve(lambda p: y - model(p), lambda p: -jacobian(p), p0, weights)
        params[2] = abs(params[2])
        if params[1] < 0:
            # relabel so that A₁ stays the lower line
            params = np.array([params[0] + params[1], -params[1], params[2], params[4], params[3], params[5]])
        if not np.all(np.isfinite(params)):
            raise FitFailedError("doublet fit diverged", diagnostics={'parameters': params.tolist()})

        result = FitResult(
            names=list(DOUBLET_NAMES),
            values=params,
            covariance=self._covariance(jacobian(params), weights, sse, f.size, sigma is not None),
            residual_sse=sse,
            n_points=int(f.size),
            diagnostics={'iterations': iterations},
        )
        self.logger.debug(
            f"Doublet: A1={params[0]:.4f} GHz, detuning={params[1]:.4f} GHz, FWHM={params[2] * 1e3:.1f} MHz"
        )
        return result
