"""
Experiment Synthesizer
======================
Forward-model datasets (PLE scans, ODMR spectra, CV curve, count time
series) with shot noise, plus the truth sidecar that generated them.

Each dataset draws from its own child of the configured seed, so adding
or removing one family never changes the others.
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from ..device.config import BiasPoint
from ..device.electrostatics import DeviceSimulator
from ..exceptions import DomainError
from ..sensor.optics import OpticsModel
from ..sensor.spin import SpinSimulator
from ..sensor.stark import StarkModel
from ..units import EPS_0, MV_PER_M, PER_CM3, Q_E, UM
from .config import EmitterSite, RunConfig

STREAMS = ('ple', 'odmr', 'cv', 'time_series')
RESPONSE_COLUMNS = [
    'emitter', 'voltage_v', 'e_local_mv_per_m', 'a1_center_ghz', 'n_local_cm3', 'fwhm_mhz',
]


def _concat(frames, columns) -> pd.DataFrame:
    if not frames:
        return pd.DataFrame(columns=columns)
    return pd.concat(frames, ignore_index=True)


@dataclass
class SyntheticDataset:
    """One synthetic experiment"""
    ple_scans: pd.DataFrame
    odmr_spectra: pd.DataFrame
    cv_curve: pd.DataFrame
    time_series: pd.DataFrame
    truth: Dict[str, Any]


class ExperimentSynthesizer:
    """Generate noisy datasets from the device and sensor forward models"""

    def __init__(
        self,
        config: RunConfig,
        logger: Optional[logging.Logger] = None,
        simulator: Optional[DeviceSimulator] = None,
        spin: Optional[SpinSimulator] = None
    ):
        self.config = config
        self.logger = logger or logging.getLogger(__name__)
        self.simulator = simulator or DeviceSimulator(self.logger, config.workbench.grid_points)
        self.spin = spin or SpinSimulator(self.logger, config.workbench.threads)

    def _generators(self) -> Dict[str, np.random.Generator]:
        children = np.random.SeedSequence(self.config.seed).spawn(len(STREAMS))
        return {name: np.random.default_rng(child) for name, child in zip(STREAMS, children)}

    @staticmethod
    def _mix(expected: np.ndarray, noisy: np.ndarray, amplitude: float) -> np.ndarray:
        if amplitude == 0:
            return expected
        return expected + amplitude * (noisy - expected)

    def threshold_voltage(self, x_um: float) -> float:
        """Bias at which the depletion edge reaches x (negative: depleted at 0 V)"""
        stack = self.config.stack
        eps = EPS_0 * stack.material.eps_r
        v_bi = self.simulator.builtin_voltage(stack)
        return Q_E * stack.n_d_cm3 * PER_CM3 * (x_um * UM) ** 2 / (2.0 * eps) - v_bi

    def emitter_response(self, site: EmitterSite) -> pd.DataFrame:
        """Noise-free A₁ centre, linewidth and local field per sweep voltage"""
        stack = self.config.stack
        params = self.config.stark[site.name]
        current = self.config.experiment.reverse_current
        rows = []
        for v in self.config.experiment.voltages_v:
            bias = BiasPoint(v)
            e_local = float(self.simulator.field_profile(stack, bias).local_at(site.x_um))
            n_local = float(self.simulator.carrier_profile(stack, bias).at(site.x_um))
            n_local += self.simulator.electron_density_from_current(current.at(v), stack.material.v_e_cm_s)
            rows.append({
                'emitter': site.name,
                'voltage_v': v,
                'e_local_mv_per_m': e_local,
                'a1_center_ghz': StarkModel.stark_shift(e_local, params),
                'n_local_cm3': n_local,
                'fwhm_mhz': OpticsModel.linewidth_response(n_local, self.config.linewidth),
            })
        return pd.DataFrame(rows, columns=RESPONSE_COLUMNS)

    def ple_scans(self, rng: np.random.Generator) -> pd.DataFrame:
        """Doublet scans per emitter and voltage, in counts per point"""
        noise = self.config.experiment.noise
        frames = []
        for site in self.config.experiment.emitters:
            response = self.emitter_response(site)
            for row in response.itertuples(index=False):
                model = dataclasses.replace(
                    self.config.ple, a1_center_ghz=row.a1_center_ghz, fwhm_mhz=row.fwhm_mhz
                )
                freqs = self.config.experiment.ple_scan.frequencies(row.a1_center_ghz)
                expected = OpticsModel.ple_spectrum(model, freqs) * noise.ple_dwell_s
                counts = self._mix(expected, rng.poisson(expected).astype(float), noise.amplitude)
                frames.append(pd.DataFrame({
                    'emitter': site.name,
                    'voltage_v': row.voltage_v,
                    'frequency_ghz': freqs,
                    'counts': counts,
                }))
        self.logger.info(f"✓ Synthesized {len(frames)} PLE scans")
        return _concat(frames, ['emitter', 'voltage_v', 'frequency_ghz', 'counts'])

    def odmr_spectra(self, rng: np.random.Generator) -> pd.DataFrame:
        """Transfer populations over the configured bias sweep"""
        settings = self.config.experiment.odmr
        noise = self.config.experiment.noise
        site = self.config.experiment.emitter(settings.emitter)
        freqs = settings.frequencies()
        frames = []
        for v in settings.voltages_v:
            e_local = self.simulator.local_field_at(self.config.stack, BiasPoint(v), site.x_um)
            spectrum = self.spin.odmr_spectrum(
                e_local * MV_PER_M, self.config.spin, settings.rabi_mhz, settings.duration_us, freqs
            )
            expected = spectrum.transfer_population
            sampled = rng.binomial(noise.odmr_shots, expected) / noise.odmr_shots
            frames.append(pd.DataFrame({
                'emitter': site.name,
                'voltage_v': v,
                'frequency_mhz': freqs,
                'population': self._mix(expected, sampled, noise.amplitude),
            }))
        self.logger.info(f"✓ Synthesized {len(frames)} ODMR spectra")
        return _concat(frames, ['emitter', 'voltage_v', 'frequency_mhz', 'population'])

    def cv_curve(self, rng: np.random.Generator) -> pd.DataFrame:
        """
        One-sided junction capacitance C = A·sqrt(q·ε·N_D / (2(V_bi - V))).

        Positive V is forward bias, as in the measured sweeps.
        """
        settings = self.config.experiment.cv
        noise = self.config.experiment.noise
        stack = self.config.stack.with_intrinsic_doping(settings.n_d_cm3)
        v_bi = self.simulator.builtin_voltage(stack)
        voltages = settings.voltages()
        if np.any(voltages >= v_bi):
            raise DomainError(f"CV sweep must stay below V_bi = {v_bi:.3f} V")

        eps = EPS_0 * stack.material.eps_r
        area_m2 = settings.contact_area_cm2 * 1e-4
        expected = area_m2 * np.sqrt(Q_E * eps * settings.n_d_cm3 * PER_CM3 / (2.0 * (v_bi - voltages)))
        scatter = expected * (1.0 + noise.cv_relative_noise * rng.standard_normal(voltages.size))
        return pd.DataFrame({
            'voltage_v': voltages,
            'capacitance_f': self._mix(expected, scatter, noise.amplitude),
        })

    def time_series(self, rng: np.random.Generator) -> pd.DataFrame:
        """Photon counts per sample at the working point"""
        settings = self.config.sensitivity
        noise = self.config.experiment.noise
        n = int(round(settings.duration_s * settings.sample_rate_hz))
        expected = np.full(n, settings.working_rate_cps / settings.sample_rate_hz)
        counts = self._mix(expected, rng.poisson(expected).astype(float), noise.amplitude)
        return pd.DataFrame({
            't_s': np.arange(n) / settings.sample_rate_hz,
            'counts': counts,
        })

    def truth(self) -> Dict[str, Any]:
        """Generating parameters for the truth sidecar"""
        stack = self.config.stack
        emitters = {}
        for site in self.config.experiment.emitters:
            params = self.config.stark[site.name]
            response = self.emitter_response(site)
            emitters[site.name] = {
                'x_um': site.x_um,
                'sigma_x_um': site.sigma_x_um,
                'stark': {'d': params.d, 'alpha': params.alpha, 'f0': params.f0},
                'threshold_v': self.threshold_voltage(site.x_um),
                'voltages_v': response['voltage_v'].tolist(),
                'e_local_mv_per_m': response['e_local_mv_per_m'].tolist(),
                'a1_center_ghz': response['a1_center_ghz'].tolist(),
                'fwhm_mhz': response['fwhm_mhz'].tolist(),
            }
        return {
            'seed': self.config.seed,
            'provenance': 'simulated',
            'device': {
                'n_d_cm3': stack.n_d_cm3,
                'n_a_cm3': stack.n_a_cm3,
                'v_bi_v': self.simulator.builtin_voltage(stack),
                'intrinsic_width_um': stack.intrinsic_width_um,
            },
            'emitters': emitters,
            'cv': dataclasses.asdict(self.config.experiment.cv),
            'sensitivity': dataclasses.asdict(self.config.sensitivity),
            'noise': dataclasses.asdict(self.config.experiment.noise),
            'spin': {'d_mhz': self.config.spin.d_mhz, 'dz_hz_per_v_m': self.config.spin.dz_hz_per_v_m},
        }

    def synthesize(self) -> SyntheticDataset:
        """Generate every dataset family from one seed"""
        rngs = self._generators()
        return SyntheticDataset(
            ple_scans=self.ple_scans(rngs['ple']),
            odmr_spectra=self.odmr_spectra(rngs['odmr']),
            cv_curve=self.cv_curve(rngs['cv']),
            time_series=self.time_series(rngs['time_series']),
            truth=self.truth(),
        )
