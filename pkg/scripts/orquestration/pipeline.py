"""
Workbench Pipeline Orchestrator
===============================
Runs the subcommands end to end: device simulation, synthetic datasets,
inversion with report, ODMR sweeps and the sensitivity estimate.
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..device import BiasPoint, DeviceSimulator
from ..exceptions import IngestionError, NoOnsetDetectedError, OutOfRangeError
from ..inversion import (
    DopingAnalyzer,
    LorentzianFitter,
    SensitivityEstimator,
    StarkFitter,
    ThresholdDetector,
)
from ..sensor import OpticsModel, SpinSimulator, StarkParams
from ..units import MV_PER_M
from ..workbench.config import RunConfig
from ..workbench.extractor import DatasetExtractor
from ..workbench.loader import FILENAMES, ArtifactLoader, PlotSpec
from ..workbench.reporter import PipelineReport, PipelineReporter, quantity
from ..workbench.synth import ExperimentSynthesizer

PathLike = Union[str, Path]

STARK_COLUMNS = [
    'emitter', 'voltage_v', 'e_local_mv_per_m', 'delta_f_ghz', 'sigma_delta_f_ghz',
    'detuning_ghz', 'fwhm_mhz',
]


class WorkbenchPipeline:
    """Complete workbench orchestrator"""

    def __init__(self, config: RunConfig, logger: logging.Logger):
        self.config = config
        self.logger = logger
        self.simulator = DeviceSimulator(logger, config.workbench.grid_points)
        self.spin = SpinSimulator(logger, config.workbench.threads)
        self.execution_stats = {
            'command': None,
            'start_time': None,
            'end_time': None,
            'artifacts_written': 0,
            'datasets_processed': 0,
            'failures': []
        }

    # ------------------------------------------------------------------
    # run bookkeeping
    # ------------------------------------------------------------------
    def _start(self, command: str):
        self.execution_stats['command'] = command
        self.execution_stats['start_time'] = datetime.now()
        self.logger.info("=" * 80)
        self.logger.info(f"VSI WORKBENCH: {command.upper()} STARTED")
        self.logger.info("=" * 80)

    def _finish(self, loader: Optional[ArtifactLoader]):
        self.execution_stats['end_time'] = datetime.now()
        if loader is not None:
            self.execution_stats['artifacts_written'] = len(loader.written)
        self._log_summary()

    def _log_summary(self):
        """Log run summary"""
        duration = (self.execution_stats['end_time'] -
                    self.execution_stats['start_time']).total_seconds()

        self.logger.info("\n" + "=" * 80)
        self.logger.info(f"VSI WORKBENCH: {str(self.execution_stats['command']).upper()} SUMMARY")
        self.logger.info("=" * 80)
        self.logger.info(f"Start time: {self.execution_stats['start_time']}")
        self.logger.info(f"End time: {self.execution_stats['end_time']}")
        self.logger.info(f"Duration: {duration:.2f} seconds")
        self.logger.info(f"Datasets processed: {self.execution_stats['datasets_processed']}")
        self.logger.info(f"Artifacts written: {self.execution_stats['artifacts_written']}")

        if self.execution_stats['failures']:
            self.logger.warning(f"⚠ Failures: {'; '.join(self.execution_stats['failures'])}")
        else:
            self.logger.info("✓ All steps completed successfully")

        self.logger.info("=" * 80)

    def _fail(self, step: str, error: Exception):
        self.execution_stats['failures'].append(f"{step}: {error}")

    # ------------------------------------------------------------------
    # simulate
    # ------------------------------------------------------------------
    def run_simulate(self, out: PathLike) -> Dict:
        """
        Field, band and carrier profiles per profile voltage.

        Args:
            out: Output directory

        Returns:
            Dictionary with execution statistics
        """
        self._start('simulate')
        loader = None
        try:
            voltages = self.config.experiment.profile_voltages_v
            if not voltages:
                self.logger.warning("⚠ Empty voltage list, nothing to simulate")
                return self.execution_stats

            loader = ArtifactLoader(out, self.logger)
            stack = self.config.stack
            fields, bands, carriers, summary = [], [], [], []
            for v in voltages:
                bias = BiasPoint(v)
                profile = self.simulator.field_profile(stack, bias)
                fields.append(profile.to_frame().assign(voltage_v=v))
                bands.append(self.simulator.band_diagram(stack, bias).to_frame().assign(voltage_v=v))
                carriers.append(self.simulator.carrier_profile(stack, bias).to_frame().assign(voltage_v=v))
                row = {
                    'voltage_v': v,
                    'x_n_um': profile.x_n_um,
                    'punch_through': bool(profile.punch_through),
                    'v_bi_v': profile.v_bi,
                }
                for site in self.config.experiment.emitters:
                    row[f'e_local_{site.name}_mv_per_m'] = float(profile.local_at(site.x_um))
                summary.append(row)
                self.logger.info(
                    f"✓ V={v:g} V: x_n={profile.x_n_um:.3f} μm"
                    + (" (punch-through)" if profile.punch_through else "")
                )

            def ordered(frames: List[pd.DataFrame]) -> pd.DataFrame:
                df = pd.concat(frames, ignore_index=True)
                return df[['voltage_v'] + [c for c in df.columns if c != 'voltage_v']]

            loader.write_csv(ordered(fields), 'field_profiles.csv', PlotSpec(
                x='position_um', y=['e_macro_mv_per_m', 'e_local_mv_per_m'],
                x_label='Position (μm)', y_label='Electric field (MV/m)',
                title='Field across the intrinsic layer', group_by='voltage_v',
            ))
            loader.write_csv(ordered(bands), 'band_diagrams.csv', PlotSpec(
                x='position_um', y=['valence_ev', 'conduction_ev'],
                x_label='Position (μm)', y_label='Energy (eV)',
                title='Band edges', group_by='voltage_v',
            ))
            loader.write_csv(ordered(carriers), 'carrier_profiles.csv', PlotSpec(
                x='position_um', y=['electron_cm3'],
                x_label='Position (μm)', y_label='Electron density (cm⁻³)',
                title='Free-electron density', group_by='voltage_v',
            ))
            summary_df = pd.DataFrame(summary)
            loader.write_csv(summary_df, 'depletion_summary.csv', PlotSpec(
                x='voltage_v', y=['x_n_um'],
                x_label='Reverse bias (V)', y_label='Depletion width (μm)',
                title='Depletion edge', kind='scatter',
            ))
            self.execution_stats['datasets_processed'] = len(voltages)
        except Exception as e:
            self.logger.error(f"✗ Simulation failed: {str(e)}")
            self._fail('simulate', e)
            raise
        finally:
            self._finish(loader)

        return self.execution_stats

    # ------------------------------------------------------------------
    # synth
    # ------------------------------------------------------------------
    def run_synth(self, out: PathLike) -> Dict:
        """Write every synthetic dataset plus the truth sidecar"""
        self._start('synth')
        loader = ArtifactLoader(out, self.logger)
        try:
            dataset = ExperimentSynthesizer(self.config, self.logger, self.simulator, self.spin).synthesize()
            loader.write_csv(dataset.ple_scans, FILENAMES['ple_scans'], PlotSpec(
                x='frequency_ghz', y=['counts'],
                x_label='Relative laser frequency (GHz)', y_label='Counts',
                title='PLE scans', group_by='voltage_v',
            ))
            loader.write_csv(dataset.odmr_spectra, FILENAMES['odmr_spectra'], PlotSpec(
                x='frequency_mhz', y=['population'],
                x_label='Microwave frequency (MHz)', y_label='Transferred population',
                title='ODMR spectra', group_by='voltage_v',
            ))
            loader.write_csv(dataset.cv_curve, FILENAMES['cv_curve'], PlotSpec(
                x='voltage_v', y=['capacitance_f'],
                x_label='Voltage (V)', y_label='Capacitance (F)', title='CV sweep',
            ))
            loader.write_csv(dataset.time_series, FILENAMES['time_series'], PlotSpec(
                x='t_s', y=['counts'],
                x_label='Time (s)', y_label='Counts per sample', title='Working-point counts',
            ))
            loader.write_json(dataset.truth, FILENAMES['truth'])
            self.execution_stats['datasets_processed'] = 4
        except Exception as e:
            self.logger.error(f"✗ Synthesis failed: {str(e)}")
            self._fail('synth', e)
            raise
        finally:
            self._finish(loader)

        return self.execution_stats

    # ------------------------------------------------------------------
    # invert
    # ------------------------------------------------------------------
    def _emitter_seed(self, index: int) -> int:
        state = np.random.SeedSequence([self.config.seed, index]).generate_state(1)
        return int(state[0])

    def stark_data_from_scans(self, scans: pd.DataFrame) -> pd.DataFrame:
        """Doublet fit of every (emitter, voltage) scan into Δf_A1 rows"""
        fitter = LorentzianFitter(self.logger)
        rows = []
        for (name, v), scan in scans.groupby(['emitter', 'voltage_v'], sort=True):
            fit = fitter.fit_ple_doublet(scan['frequency_ghz'].to_numpy(), scan['counts'].to_numpy())
            site = self.config.experiment.emitter(name)
            rows.append({
                'emitter': name,
                'voltage_v': float(v),
                'e_local_mv_per_m': self.simulator.local_field_at(self.config.stack, BiasPoint(v), site.x_um),
                'delta_f_ghz': fit['a1_center'],
                'sigma_delta_f_ghz': fit.sigma['a1_center'],
                'detuning_ghz': fit['detuning'],
                'fwhm_mhz': fit['fwhm'] * 1e3,
            })
        self.logger.info(f"✓ Fitted {len(rows)} PLE doublets")
        return pd.DataFrame(rows, columns=STARK_COLUMNS)

    def _complete_fields(self, stark: pd.DataFrame) -> pd.DataFrame:
        """Fill e_local from the configured device when only voltages are given"""
        if 'e_local_mv_per_m' in stark.columns and not stark['e_local_mv_per_m'].isna().any():
            return stark
        if 'voltage_v' not in stark.columns:
            raise IngestionError("cannot compute fields without voltages", column='voltage_v')
        stark = stark.copy()
        stark['e_local_mv_per_m'] = [
            self.simulator.local_field_at(
                self.config.stack, BiasPoint(v), self.config.experiment.emitter(name).x_um
            )
            for name, v in zip(stark['emitter'], stark['voltage_v'])
        ]
        return stark

    def _reconstruct(self, name: str, data: pd.DataFrame, params: StarkParams) -> pd.DataFrame:
        rows = []
        for row in data.itertuples(index=False):
            try:
                e_rec, both_negative = StarkFitter.reconstruct_field_flagged(row.delta_f_ghz, params)
            except OutOfRangeError as e:
                self.logger.warning(f"⚠ {name}: no real field for Δf={row.delta_f_ghz:.4f} GHz ({str(e)})")
                e_rec, both_negative = float('nan'), False
            rows.append({
                'emitter': name,
                'voltage_v': getattr(row, 'voltage_v', float('nan')),
                'e_local_mv_per_m': row.e_local_mv_per_m,
                'e_reconstructed_mv_per_m': e_rec,
                'both_roots_negative': both_negative,
            })
        return pd.DataFrame(rows)

    def stark_reference(self, n_d_cm3: float, emitter: str) -> Optional[StarkParams]:
        """Configured Stark coefficients of an emitter for one intrinsic doping"""
        for doping, table in self.config.stark_reference.items():
            if np.isclose(doping, n_d_cm3, rtol=1e-6) and emitter in table:
                return table[emitter]
        return None

    def _threshold_block(self, index: int, name: str, data: pd.DataFrame, detector: ThresholdDetector):
        if 'voltage_v' not in data.columns:
            return {'status': 'skipped', 'reason': 'no voltage column'}, None
        window = data[data['voltage_v'] <= self.config.inversion.threshold_max_voltage_v]
        seed = self._emitter_seed(index)
        try:
            estimate = detector.detect_threshold(
                window['voltage_v'].to_numpy(), window['delta_f_ghz'].to_numpy(), seed=seed
            )
        except NoOnsetDetectedError as e:
            self.logger.info(f"{name}: no onset ({str(e)})")
            return {'status': 'no_onset', 'reason': str(e), 'seed': seed}, None
        if estimate.onset_before_scan:
            self.logger.info(f"{name}: already depleted at the start of the scan")
            return {'status': 'no_onset', 'reason': 'onset before scan start', 'seed': seed}, None
        block = {
            'status': 'detected',
            'v_threshold': quantity(estimate.v_threshold, 'V', 'fitted', estimate.sigma_v),
            'flat_level': quantity(estimate.flat_level, 'GHz', 'fitted'),
            'rise_slope': quantity(estimate.rise_slope, 'GHz/V', 'fitted'),
            'voltage_range_v': list(estimate.voltage_range),
            'n_resamples': estimate.n_resamples,
            'seed': seed,
        }
        return block, estimate

    def run_invert(self, data_dir: PathLike, out: PathLike) -> Dict:
        """
        Invert a dataset directory into the pipeline report.

        Args:
            data_dir: Directory produced by synth, or schema-compatible data
            out: Output directory

        Returns:
            Dictionary with execution statistics and the report
        """
        self._start('invert')
        data_dir = Path(data_dir)
        loader = ArtifactLoader(out, self.logger)
        extractor = DatasetExtractor(self.logger)
        inversion = self.config.inversion
        report = PipelineReport(
            seed=self.config.seed,
            tolerances={
                'threshold_max_voltage_v': inversion.threshold_max_voltage_v,
                'bootstrap_resamples': inversion.bootstrap_resamples,
                'min_improvement': inversion.min_improvement,
                'cv_window': inversion.cv_window,
                'cv_degree': inversion.cv_degree,
            },
        )
        try:
            stark = self._load_stark_data(data_dir, extractor)
            loader.write_csv(stark, FILENAMES['stark_data'], PlotSpec(
                x='e_local_mv_per_m', y=['delta_f_ghz'],
                x_label='Local field (MV/m)', y_label='Δf A₁ (GHz)',
                title='Stark shift', group_by='emitter', kind='scatter',
            ))
            self._invert_emitters(stark, report, loader)
            self._invert_cv(data_dir, extractor, report, loader)
            self._invert_sensitivity(data_dir, extractor, report)

            truth = extractor.read_truth(data_dir / FILENAMES['truth'])
            if truth is not None:
                report.truth_comparison = PipelineReporter.compare_truth(report, truth)
            report.datasets = extractor.validator.summary(extractor.reports)
            report.failures = list(self.execution_stats['failures'])
            self.execution_stats['datasets_processed'] = len(extractor.reports)

            loader.write_csv(PipelineReporter.emitters_to_dataframe(report), 'emitter_summary.csv')
            loader.write_json(report.to_dict(), FILENAMES['report'])
            self.execution_stats['report'] = report
        except Exception as e:
            self.logger.error(f"✗ Inversion failed: {str(e)}")
            self._fail('invert', e)
            raise
        finally:
            self._finish(loader)

        return self.execution_stats

    def _load_stark_data(self, data_dir: Path, extractor: DatasetExtractor) -> pd.DataFrame:
        scans_path = data_dir / FILENAMES['ple_scans']
        if scans_path.is_file():
            return self.stark_data_from_scans(extractor.read_ple_scans(scans_path))
        stark_path = data_dir / FILENAMES['stark_data']
        if stark_path.is_file():
            return self._complete_fields(extractor.read_stark_data(stark_path))
        raise IngestionError(
            f"neither {FILENAMES['ple_scans']} nor {FILENAMES['stark_data']} found", path=str(data_dir)
        )

    def _invert_emitters(self, stark: pd.DataFrame, report: PipelineReport, loader: ArtifactLoader):
        inversion = self.config.inversion
        fitter = StarkFitter(self.logger)
        detector = ThresholdDetector(
            self.logger,
            n_resamples=inversion.bootstrap_resamples,
            min_improvement=inversion.min_improvement,
            max_workers=self.config.workbench.threads,
        )
        analyzer = DopingAnalyzer(self.logger)
        v_bi = self.simulator.builtin_voltage(self.config.stack)

        reconstructed = []
        for index, (name, data) in enumerate(stark.groupby('emitter', sort=True)):
            self.logger.info(f"\n{'=' * 70}")
            self.logger.info(f"Inverting emitter: {name}")
            self.logger.info(f"{'=' * 70}")
            data = data.sort_values('voltage_v') if 'voltage_v' in data.columns else data
            block: Dict[str, Any] = {}
            report.emitters[name] = block

            fit = fitter.fit_stark(data['e_local_mv_per_m'].to_numpy(), data['delta_f_ghz'].to_numpy())
            block['stark'] = PipelineReporter.stark_block(fit)
            reconstructed.append(self._reconstruct(name, data, fit.to_stark_params()))

            threshold, estimate = self._threshold_block(index, name, data, detector)
            block['threshold'] = threshold
            site = self.config.experiment.emitter(name)
            if estimate is not None:
                interval = analyzer.doping_uncertainty(
                    estimate.v_threshold, estimate.sigma_v, site.x_um, site.sigma_x_um,
                    v_bi, self.config.stack.material,
                )
                block['doping'] = {
                    'n_d_low': quantity(interval.n_d_low_cm3, 'cm^-3', 'fitted'),
                    'n_d_mid': quantity(interval.n_d_mid_cm3, 'cm^-3', 'fitted'),
                    'n_d_high': quantity(interval.n_d_high_cm3, 'cm^-3', 'fitted'),
                    'v_bi': quantity(v_bi, 'V', 'simulated'),
                    'x_um': quantity(site.x_um, 'um', 'configured', site.sigma_x_um),
                }
                if report.doping is None:
                    report.doping = dict(block['doping'], emitter=name)

            if 'voltage_v' in data.columns and inversion.doping_candidates_cm3:
                per_doping = fitter.fit_stark_per_doping(
                    self.config.stack, data['voltage_v'].to_numpy(), data['delta_f_ghz'].to_numpy(),
                    site.x_um, inversion.doping_candidates_cm3, self.simulator,
                )
                block['stark_per_doping'] = {}
                for n_d, candidate in per_doping.items():
                    entry = PipelineReporter.stark_block(candidate)
                    reference = self.stark_reference(n_d, name)
                    if reference is not None:
                        entry['reference'] = PipelineReporter.reference_block(candidate, reference)
                    block['stark_per_doping'][f"{n_d:.4g}"] = entry

        if report.doping is None:
            self.logger.warning("⚠ No emitter shows an onset; doping not extracted")
            self.execution_stats['failures'].append('doping: no emitter with a detected onset')

        loader.write_csv(pd.concat(reconstructed, ignore_index=True), 'reconstructed_fields.csv', PlotSpec(
            x='voltage_v', y=['e_local_mv_per_m', 'e_reconstructed_mv_per_m'],
            x_label='Reverse bias (V)', y_label='Local field (MV/m)',
            title='Predicted and reconstructed fields', group_by='emitter',
        ))

    def _invert_cv(
        self, data_dir: Path, extractor: DatasetExtractor, report: PipelineReport, loader: ArtifactLoader
    ):
        path = data_dir / FILENAMES['cv_curve']
        if not path.is_file():
            self.logger.info("No CV curve found; CV doping skipped")
            return
        curve = extractor.read_cv_curve(path, self.config.experiment.cv.contact_area_cm2)
        profile = DopingAnalyzer(self.logger).cv_doping(
            curve, self.config.stack.material, self.config.inversion.cv_window, self.config.inversion.cv_degree
        )
        loader.write_csv(profile, 'cv_doping.csv', PlotSpec(
            x='voltage_v', y=['n_d_cm3'],
            x_label='Voltage (V)', y_label='Apparent N_D (cm⁻³)', title='CV doping profile',
        ))
        valid = profile.loc[~profile['flagged'], 'n_d_cm3']
        report.cv = {
            'n_d_median': quantity(float(valid.median()) if len(valid) else float('nan'), 'cm^-3', 'fitted'),
            'n_points': int(len(profile)),
            'n_flagged': int(profile['flagged'].sum()),
            'contact_area': quantity(curve.contact_area_cm2, 'cm^2', 'configured'),
        }

    def sensitivity_inputs(self, report_block: Optional[Dict[str, Any]] = None) -> Tuple[float, float, str]:
        """Gradient and |d| for the sensitivity emitter, with the provenance of d"""
        settings = self.config.sensitivity
        gradient = settings.gradient_cps_per_ghz
        if gradient is None:
            _, gradient = OpticsModel.working_point(self.config.ple)
        fitted = (report_block or {}).get(settings.emitter, {}).get('stark', {}).get('d')
        if fitted is not None:
            return gradient, fitted['value'], 'fitted'
        return gradient, self.config.stark[settings.emitter].d, 'configured'

    def _invert_sensitivity(self, data_dir: Path, extractor: DatasetExtractor, report: PipelineReport):
        path = data_dir / FILENAMES['time_series']
        if not path.is_file():
            self.logger.info("No time series found; sensitivity skipped")
            return
        series = extractor.read_time_series(path)
        gradient, d, provenance = self.sensitivity_inputs(report.emitters)
        result = SensitivityEstimator(self.logger).sensitivity(series, gradient, d)
        report.sensitivity = {
            'eta': quantity(result.eta_kv_m_sqrt_hz, 'kV/m/sqrt(Hz)', 'fitted', result.sigma_eta),
            'n_bins': result.n_bins,
            'gradient': quantity(gradient, 'counts/s/GHz', 'configured'),
            'd': quantity(d, 'GHz/(MV/m)', provenance),
            'emitter': self.config.sensitivity.emitter,
        }

    # ------------------------------------------------------------------
    # odmr
    # ------------------------------------------------------------------
    def run_odmr(self, out: PathLike) -> Dict:
        """Noise-free ODMR spectra over the configured bias sweep and their peak table"""
        self._start('odmr')
        loader = ArtifactLoader(out, self.logger)
        settings = self.config.experiment.odmr
        try:
            site = self.config.experiment.emitter(settings.emitter)
            freqs = settings.frequencies()
            fitter = LorentzianFitter(self.logger)
            spectra, peaks = [], []
            for v in settings.voltages_v:
                e_local = self.simulator.local_field_at(self.config.stack, BiasPoint(v), site.x_um)
                e_z = e_local * MV_PER_M
                spectrum = self.spin.odmr_spectrum(
                    e_z, self.config.spin, settings.rabi_mhz, settings.duration_us, freqs
                )
                spectra.append(spectrum.to_frame().assign(emitter=site.name, voltage_v=v))
                peak = fitter.fit_peak_window(
                    spectrum.mw_frequencies_mhz, spectrum.transfer_population, settings.fit_half_window_mhz
                )
                peaks.append({
                    'voltage_v': v,
                    'e_local_mv_per_m': e_local,
                    'e_z_v_per_m': e_z,
                    'peak_center_mhz': peak['center'],
                    'sigma_peak_center_mhz': peak.sigma['center'],
                    'fwhm_mhz': peak['fwhm'],
                    'expected_center_mhz': self.spin.transition_frequency_mhz(e_z, self.config.spin),
                })
                self.logger.info(f"✓ V={v:g} V: ODMR peak at {peak['center']:.4f} MHz")

            if spectra:
                df = pd.concat(spectra, ignore_index=True)
                df = df[['emitter', 'voltage_v'] + [c for c in df.columns if c not in ('emitter', 'voltage_v')]]
                loader.write_csv(df, FILENAMES['odmr_spectra'], PlotSpec(
                    x='frequency_mhz', y=['population'],
                    x_label='Microwave frequency (MHz)', y_label='Transferred population',
                    title=f'ODMR spectra of {site.name}', group_by='voltage_v',
                ))
                loader.write_csv(pd.DataFrame(peaks), 'odmr_peaks.csv', PlotSpec(
                    x='e_z_v_per_m', y=['peak_center_mhz', 'expected_center_mhz'],
                    x_label='Axial field (V/m)', y_label='Peak centre (MHz)',
                    title='ODMR peak shift', kind='scatter',
                ))
            else:
                self.logger.warning("⚠ Empty ODMR voltage list, nothing to simulate")
            self.execution_stats['datasets_processed'] = len(spectra)
        except Exception as e:
            self.logger.error(f"✗ ODMR sweep failed: {str(e)}")
            self._fail('odmr', e)
            raise
        finally:
            self._finish(loader)

        return self.execution_stats

    # ------------------------------------------------------------------
    # sensitivity
    # ------------------------------------------------------------------
    def run_sensitivity(self, data: PathLike, out: PathLike) -> Dict:
        """
        η from a time-series CSV (or a directory holding time_series.csv).

        d comes from a pipeline report next to the data when one exists,
        otherwise from the configured Stark parameters.
        """
        self._start('sensitivity')
        loader = ArtifactLoader(out, self.logger)
        extractor = DatasetExtractor(self.logger)
        data = Path(data)
        try:
            path = data / FILENAMES['time_series'] if data.is_dir() else data
            series = extractor.read_time_series(path)
            report_path = path.parent / FILENAMES['report']
            emitters = None
            if report_path.is_file():
                emitters = extractor.read_json(report_path).get('emitters')
            gradient, d, provenance = self.sensitivity_inputs(emitters)
            result = SensitivityEstimator(self.logger).sensitivity(series, gradient, d)
            loader.write_json({
                'emitter': self.config.sensitivity.emitter,
                'eta': quantity(result.eta_kv_m_sqrt_hz, 'kV/m/sqrt(Hz)', 'fitted', result.sigma_eta),
                'n_bins': result.n_bins,
                'per_bin_std_kv_per_m': result.per_bin_std_kv_m,
                'gradient': quantity(gradient, 'counts/s/GHz', 'configured'),
                'd': quantity(d, 'GHz/(MV/m)', provenance),
                'seed': self.config.seed,
            }, 'sensitivity.json')
            self.execution_stats['datasets_processed'] = 1
            self.execution_stats['result'] = result
        except Exception as e:
            self.logger.error(f"✗ Sensitivity estimate failed: {str(e)}")
            self._fail('sensitivity', e)
            raise
        finally:
            self._finish(loader)

        return self.execution_stats


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure logging for the workbench.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional log file path

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger('VSI_Workbench')
    logger.setLevel(getattr(logging, log_level.upper()))

    # repeated calls replace the handlers instead of stacking them
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, log_level.upper()))
    console_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(console_formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(getattr(logging, log_level.upper()))
        file_handler.setFormatter(console_formatter)
        logger.addHandler(file_handler)

    return logger
