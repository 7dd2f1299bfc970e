"""
Threshold Detector
==================
Locates the bias at which the depletion edge reaches an emitter, seen as
the onset of its Stark shift.

The model is continuous: Δf(V) = c + b·max(V - V_b, 0). V_b is scanned on
a grid refined between the measured voltages and the remaining linear
parameters are solved by least squares at each candidate.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DegenerateDataError, NoOnsetDetectedError
from .results import ThresholdEstimate

MIN_POINTS = 6


class ThresholdDetector:
    """Flat-then-line breakpoint fit with bootstrap uncertainty"""

    def __init__(
        self,
        logger: Optional[logging.Logger] = None,
        n_resamples: int = 200,
        refine: int = 10,
        min_improvement: float = 0.05,
        max_workers: int = 1
    ):
        self.logger = logger or logging.getLogger(__name__)
        self.n_resamples = n_resamples
        self.refine = refine
        self.min_improvement = min_improvement
        self.max_workers = max(1, int(max_workers))

    def _candidates(self, v: np.ndarray) -> np.ndarray:
        # at least two samples lie beyond the last candidate
        n = (v.size - 3) * self.refine + 1
        return np.linspace(v[0], v[-3], max(n, 2))

    @staticmethod
    def _fit_at(v: np.ndarray, y: np.ndarray, v_b: float) -> Tuple[float, float, float]:
        x = np.column_stack([np.ones_like(v), np.maximum(v - v_b, 0.0)])
        coef, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
        sse = float(np.sum((y - x @ coef) ** 2))
        return sse, float(coef[0]), float(coef[1])

    def _best_breakpoint(
        self, v: np.ndarray, y: np.ndarray, candidates: np.ndarray
    ) -> Tuple[int, float, float, float]:
        best = (0, np.inf, 0.0, 0.0)
        for i, v_b in enumerate(candidates):
            sse, c, b = self._fit_at(v, y, v_b)
            # strict comparison keeps the earliest breakpoint on ties
            if sse < best[1]:
                best = (i, sse, c, b)
        return best

    def detect_threshold(
        self,
        voltages: Sequence[float],
        delta_f: Sequence[float],
        noise_sigma: Optional[float] = None,
        seed: Optional[int] = None
    ) -> ThresholdEstimate:
        """
        Onset voltage of a Stark shift.

        Args:
            voltages: Reverse voltages (any order)
            delta_f: Δf_A1 in GHz at each voltage
            noise_sigma: Known 1σ frequency noise; switches the bootstrap
                from residual resampling to Gaussian resampling
            seed: Seed for the bootstrap

        Returns:
            ThresholdEstimate with the breakpoint and its bootstrap σ

        Raises:
            DegenerateDataError: Fewer than 6 points
            NoOnsetDetectedError: The breakpoint model is no better than a constant
        """
        v = np.asarray(voltages, dtype=float)
        y = np.asarray(delta_f, dtype=float)
        if v.size < MIN_POINTS or np.unique(v).size < MIN_POINTS:
            raise DegenerateDataError(f"threshold detection needs >= {MIN_POINTS} distinct voltages")
        order = np.argsort(v, kind='stable')
        v, y = v[order], y[order]

        sse_flat = float(np.sum((y - y.mean()) ** 2))
        candidates = self._candidates(v)
        index, sse, flat, slope = self._best_breakpoint(v, y, candidates)

        scale = max(float(np.max(np.abs(y))), 1.0)
        if sse_flat <= 1e-24 * scale ** 2 * v.size:
            raise NoOnsetDetectedError("Δf is constant over the scan")
        improvement = (sse_flat - sse) / sse_flat
        if improvement <= self.min_improvement:
            self.logger.warning(f"⚠ Breakpoint improves SSE by only {improvement:.1%}")
            raise NoOnsetDetectedError(
                f"breakpoint model improves on a constant by {improvement:.1%} "
                f"(needs > {self.min_improvement:.0%})"
            )

        v_b = float(candidates[index])
        fitted = flat + slope * np.maximum(v - v_b, 0.0)
        residuals = y - fitted
        sigma_v = self._bootstrap(v, fitted, residuals, candidates, noise_sigma, seed)

        estimate = ThresholdEstimate(
            v_threshold=v_b,
            sigma_v=sigma_v,
            flat_level=flat,
            rise_slope=slope,
            sse=sse,
            sse_flat=sse_flat,
            voltage_range=(float(v[0]), float(v[-1])),
            onset_before_scan=index == 0,
            n_resamples=self.n_resamples,
            seed=seed,
        )
        self.logger.info(f"✓ Threshold at {v_b:.3f} ± {sigma_v:.3f} V")
        return estimate

    def _bootstrap(
        self,
        v: np.ndarray,
        fitted: np.ndarray,
        residuals: np.ndarray,
        candidates: np.ndarray,
        noise_sigma: Optional[float],
        seed: Optional[int]
    ) -> float:
        if self.n_resamples < 2:
            return 0.0
        children = np.random.SeedSequence(seed).spawn(self.n_resamples)

        def resample(child: np.random.SeedSequence) -> float:
            rng = np.random.default_rng(child)
            if noise_sigma is not None:
                noise = rng.normal(0.0, noise_sigma, size=v.size)
            else:
                noise = rng.choice(residuals, size=v.size, replace=True)
            index, _, _, _ = self._best_breakpoint(v, fitted + noise, candidates)
            return float(candidates[index])

        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                breakpoints = list(pool.map(resample, children))
        else:
            breakpoints = [resample(child) for child in children]
        return float(np.std(breakpoints, ddof=1))
