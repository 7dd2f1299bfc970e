"""
Pipeline Reporter
=================
Assemble the inversion report: every quantity carries its unit and its
provenance (simulated, fitted or configured).
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..inversion.results import FitResult
from ..sensor.config import StarkParams

STARK_UNITS = {
    'd': 'GHz/(MV/m)',
    'alpha': 'GHz/(MV/m)^2',
    'f0': 'GHz',
}


def quantity(value: Any, unit: str, provenance: str, sigma: Optional[float] = None) -> Dict[str, Any]:
    """A reported number with unit and provenance"""
    entry = {'value': value, 'unit': unit, 'provenance': provenance}
    if sigma is not None:
        entry['sigma'] = sigma
    return entry


@dataclass
class PipelineReport:
    """Outcome of one inversion run"""
    seed: int
    tolerances: Dict[str, Any] = field(default_factory=dict)
    emitters: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    doping: Optional[Dict[str, Any]] = None
    cv: Optional[Dict[str, Any]] = None
    sensitivity: Optional[Dict[str, Any]] = None
    truth_comparison: Optional[Dict[str, Any]] = None
    datasets: Dict[str, Any] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        report = {
            'seed': self.seed,
            'tolerances': self.tolerances,
            'emitters': self.emitters,
            'datasets': self.datasets,
            'failures': self.failures,
        }
        for key in ('doping', 'cv', 'sensitivity', 'truth_comparison'):
            value = getattr(self, key)
            if value is not None:
                report[key] = value
        return report


class PipelineReporter:
    """Build report blocks and truth comparisons"""

    @staticmethod
    def stark_block(fit: FitResult, provenance: str = 'fitted') -> Dict[str, Any]:
        """Stark coefficients with σ, |d|, covariance and SSE (d stays signed)"""
        sigma = fit.sigma
        block = {
            name: quantity(value, STARK_UNITS[name], provenance, sigma[name])
            for name, value in fit.parameters.items()
        }
        block['d_magnitude'] = quantity(
            fit.to_stark_params().dipole_magnitude, STARK_UNITS['d'], provenance, sigma['d']
        )
        block['covariance'] = fit.covariance.tolist()
        block['residual_sse'] = quantity(fit.residual_sse, 'GHz^2', provenance)
        block['n_points'] = fit.n_points
        return block

    @staticmethod
    def reference_block(fit: FitResult, reference: StarkParams) -> Dict[str, Any]:
        """
        Compare a refit with a published parameter set.

        Args:
            fit: Stark fit under one doping hypothesis
            reference: Configured coefficients for the same doping

        Returns:
            Per coefficient: reference, fitted value, error and error in
            units of the combined σ (None when both σ are zero)
        """
        sigma = fit.sigma
        block = {}
        for name, unit in STARK_UNITS.items():
            ref_value = getattr(reference, name)
            ref_sigma = getattr(reference, f"sigma_{name}")
            error = fit[name] - ref_value
            combined = float(np.hypot(sigma[name], ref_sigma))
            block[name] = {
                'reference': quantity(ref_value, unit, 'configured', ref_sigma),
                'fitted': fit[name],
                'error': error,
                'error_sigma': error / combined if combined > 0 else None,
            }
        return block

    @staticmethod
    def compare_truth(report: PipelineReport, truth: Dict[str, Any]) -> Dict[str, Any]:
        """
        Compare fitted and extracted quantities with the generating values.

        Args:
            report: Report with fitted blocks filled in
            truth: Truth sidecar contents

        Returns:
            Comparison block keyed by emitter plus the doping check
        """
        comparison: Dict[str, Any] = {'emitters': {}}
        for name, block in report.emitters.items():
            true_emitter = truth.get('emitters', {}).get(name)
            if true_emitter is None or 'stark' not in block:
                continue
            entry = {}
            for param, true_value in true_emitter['stark'].items():
                fitted = block['stark'][param]
                entry[param] = {
                    'truth': true_value,
                    'fitted': fitted['value'],
                    'error': fitted['value'] - true_value,
                    'within_2_sigma': abs(fitted['value'] - true_value) <= 2.0 * fitted.get('sigma', 0.0),
                }
            threshold = block.get('threshold', {})
            if 'v_threshold' in threshold:
                estimate = threshold['v_threshold']
                error = estimate['value'] - true_emitter.get('threshold_v', float('nan'))
                sigma = estimate.get('sigma') or 0.0
                # the hinge underestimates a curved onset; σ covers noise only
                entry['threshold_v'] = {
                    'truth': true_emitter.get('threshold_v'),
                    'fitted': estimate['value'],
                    'sigma': sigma,
                    'error': error,
                    'error_sigma': error / sigma if sigma > 0 else None,
                }
            comparison['emitters'][name] = entry

        true_n_d = truth.get('device', {}).get('n_d_cm3')
        if report.doping is not None and true_n_d is not None:
            low = report.doping['n_d_low']['value']
            high = report.doping['n_d_high']['value']
            comparison['doping'] = {
                'truth_cm3': true_n_d,
                'interval_cm3': [low, high],
                'contains_truth': bool(low <= true_n_d <= high),
            }
        return comparison

    @staticmethod
    def emitters_to_dataframe(report: PipelineReport) -> pd.DataFrame:
        """One summary row per emitter"""
        rows = []
        for name, block in report.emitters.items():
            stark = block.get('stark', {})
            threshold = block.get('threshold', {})
            rows.append({
                'emitter': name,
                'status': '✓ OK' if 'stark' in block else '✗ FAILED',
                'd_ghz_per_mv_m': stark.get('d', {}).get('value'),
                'd_magnitude_ghz_per_mv_m': stark.get('d_magnitude', {}).get('value'),
                'sigma_d': stark.get('d', {}).get('sigma'),
                'alpha_ghz_per_mv_m2': stark.get('alpha', {}).get('value'),
                'f0_ghz': stark.get('f0', {}).get('value'),
                'threshold_status': threshold.get('status'),
                'v_threshold_v': threshold.get('v_threshold', {}).get('value'),
            })
        return pd.DataFrame(rows)
