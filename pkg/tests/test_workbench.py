"""Tests for configuration, ingestion, artifact writing, synthesis and reporting"""

import dataclasses
import json

import numpy as np
import pandas as pd
import pytest

from scripts.exceptions import ConfigError, IngestionError
from scripts.inversion import FitResult
from scripts.sensor import OpticsModel, StarkParams
from scripts.workbench import (
    ArtifactLoader,
    DatasetExtractor,
    DatasetValidator,
    ExperimentSynthesizer,
    PipelineReport,
    PipelineReporter,
    PlotSpec,
    load_config,
)
from scripts.workbench.loader import to_jsonable
from scripts.workbench.reporter import quantity
from scripts.workbench.validator import CV_CURVE, STARK_DATA


def write_variant(tmp_path, config_path, old, new):
    text = config_path.read_text(encoding='utf-8')
    assert old in text
    path = tmp_path / 'variant.yaml'
    path.write_text(text.replace(old, new, 1), encoding='utf-8')
    return path, path.read_text(encoding='utf-8').splitlines()


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------
def test_bundled_config_loads(run_config):
    assert len(run_config.experiment.voltages_v) == 61
    assert run_config.experiment.voltages_v[-1] == 30.0
    assert run_config.seed == 20240601
    assert [site.name for site in run_config.experiment.emitters] == ['V_Si1', 'V_Si2']
    assert run_config.stack.n_d_cm3 == pytest.approx(9e14)
    assert run_config.stark['V_Si2'].d == pytest.approx(-5.60)
    assert set(run_config.stark_reference) == {7e14, 9e14, 1.1e15}
    assert run_config.stark_reference[1.1e15]['V_Si2'].d == pytest.approx(-6.71)
    assert run_config.spin.dz_hz_per_v_m == pytest.approx(-0.035)


def test_unknown_key_reports_path_and_line(tmp_path, config_path):
    path, lines = write_variant(tmp_path, config_path, '  threads: 1\n', '  threads: 1\n  thread: 2\n')
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.key == 'workbench.thread'
    assert info.value.line == lines.index('  thread: 2') + 1


def test_nested_unknown_key_reports_path_and_line(tmp_path, config_path):
    path, lines = write_variant(tmp_path, config_path, '    eps_r: 9.66\n', '    eps_r: 9.66\n    eps: 9.7\n')
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.key == 'device.material.eps'
    assert 'eps' in str(info.value)
    assert info.value.line == lines.index('    eps: 9.7') + 1


def test_dataclass_invariant_becomes_config_error(tmp_path, config_path):
    path, lines = write_variant(tmp_path, config_path, 'gamma_depleted_mhz: 80.0', 'gamma_depleted_mhz: 300.0')
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.key == 'sensor.linewidth'
    assert info.value.line == lines.index('  linewidth:') + 1


def test_unknown_sweep_key(tmp_path, config_path):
    path, lines = write_variant(
        tmp_path, config_path, 'step_v: 0.5}', 'step_v: 0.5, stride_v: 1.0}'
    )
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.key == 'experiment.voltages_v.stride_v'
    assert "unknown key 'stride_v'" in str(info.value)
    assert lines[info.value.line - 1].startswith('  voltages_v:')


def test_empty_sweep_rejected(tmp_path, config_path):
    path, _ = write_variant(tmp_path, config_path, 'step_v: 0.5}', 'step_v: -0.5}')
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.key == 'experiment.voltages_v'


def test_emitter_outside_intrinsic_layer(tmp_path, config_path):
    path, _ = write_variant(tmp_path, config_path, 'x_um: 2.71', 'x_um: 5.0')
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.key == 'experiment.emitters[1].x_um'
    assert info.value.line is not None


def test_wrong_type_is_rejected(tmp_path, config_path):
    path, _ = write_variant(tmp_path, config_path, 'bootstrap_resamples: 200', 'bootstrap_resamples: many')
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.key == 'inversion.bootstrap_resamples'


def test_yaml_syntax_error_has_line(tmp_path, config_path):
    path, _ = write_variant(tmp_path, config_path, '  threads: 1\n', '  threads: [1\n')
    with pytest.raises(ConfigError) as info:
        load_config(path, use_dotenv=False)
    assert info.value.line is not None


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'absent.yaml', use_dotenv=False)


def test_environment_and_cli_precedence(monkeypatch, config_path):
    monkeypatch.setenv('VSI_SEED', '7')
    monkeypatch.setenv('VSI_THREADS', '3')
    monkeypatch.setenv('VSI_LOG_LEVEL', 'debug')
    config = load_config(config_path, use_dotenv=False)
    assert config.seed == 7
    assert config.workbench.threads == 3
    assert config.workbench.log_level == 'DEBUG'

    config = load_config(config_path, seed=9, threads=2, use_dotenv=False)
    assert config.seed == 9
    assert config.workbench.threads == 2


@pytest.mark.parametrize("value", ['0', 'four'])
def test_bad_thread_override(monkeypatch, config_path, value):
    monkeypatch.setenv('VSI_THREADS', value)
    with pytest.raises(ConfigError):
        load_config(config_path, use_dotenv=False)


# ----------------------------------------------------------------------
# ingestion
# ----------------------------------------------------------------------
def test_missing_column(logger):
    with pytest.raises(IngestionError) as info:
        DatasetValidator(logger).validate(pd.DataFrame({'voltage_v': [0.0]}), CV_CURVE, path='cv.csv')
    assert info.value.column == 'capacitance_f'
    assert info.value.path == 'cv.csv'


def test_non_numeric_value_reports_one_based_row(logger):
    df = pd.DataFrame({'voltage_v': ['0', '1', 'x'], 'capacitance_f': [1e-12, 1e-12, 1e-12]})
    with pytest.raises(IngestionError) as info:
        DatasetValidator(logger).validate(df, CV_CURVE)
    assert info.value.column == 'voltage_v'
    assert info.value.row == 3


def test_sign_constraint(logger):
    df = pd.DataFrame({'voltage_v': [0.0, 1.0], 'capacitance_f': [1e-12, -1e-12]})
    with pytest.raises(IngestionError) as info:
        DatasetValidator(logger).validate(df, CV_CURVE)
    assert info.value.row == 2


def test_stark_data_needs_field_or_voltage(logger):
    df = pd.DataFrame({'emitter': ['V_Si1'], 'delta_f_ghz': [0.1]})
    with pytest.raises(IngestionError):
        DatasetValidator(logger).validate(df, STARK_DATA)


def test_duplicates_are_soft_findings(logger):
    validator = DatasetValidator(logger)
    df = pd.DataFrame({'voltage_v': [0.0, 0.0], 'capacitance_f': [1e-12, 1e-12]})
    report = validator.report(validator.validate(df, CV_CURVE), CV_CURVE)
    assert report.duplicate_count == 1
    assert not report.validation_passed
    assert validator.summary([report])['cv_curve']['duplicates'] == 1


def test_time_series_sample_rate(tmp_path, logger):
    path = tmp_path / 'time_series.csv'
    pd.DataFrame({'t_s': np.arange(300) / 100.0, 'counts': np.full(300, 5.0)}).to_csv(path, index=False)
    series = DatasetExtractor(logger).read_time_series(path)
    assert series.sample_rate_hz == pytest.approx(100.0)
    assert series.duration_s == pytest.approx(3.0)


def test_irregular_time_series(tmp_path, logger):
    path = tmp_path / 'time_series.csv'
    pd.DataFrame({'t_s': [0.0, 0.01, 0.02, 0.04, 0.05], 'counts': [1, 2, 3, 4, 5]}).to_csv(path, index=False)
    with pytest.raises(IngestionError) as info:
        DatasetExtractor(logger).read_time_series(path)
    assert info.value.column == 't_s'
    assert info.value.row == 4


def test_missing_dataset_and_truth(tmp_path, logger):
    extractor = DatasetExtractor(logger)
    with pytest.raises(IngestionError):
        extractor.read_ple_scans(tmp_path / 'ple_scans.csv')
    assert extractor.read_truth(tmp_path / 'truth.json') is None


def test_broken_json_reports_line(tmp_path, logger):
    path = tmp_path / 'truth.json'
    path.write_text('{\n  "seed": 1,\n  oops\n}\n', encoding='utf-8')
    with pytest.raises(IngestionError) as info:
        DatasetExtractor(logger).read_json(path)
    assert info.value.row == 3


# ----------------------------------------------------------------------
# artifacts
# ----------------------------------------------------------------------
def test_csv_written_atomically_with_plot_spec(tmp_path, logger):
    loader = ArtifactLoader(tmp_path / 'out', logger)
    df = pd.DataFrame({'voltage_v': [0.0, 1.0], 'value': [1.0 / 3.0, 2.0]})
    loader.write_csv(df, 'table.csv', PlotSpec(x='voltage_v', y=['value'], x_label='V', y_label='v', title='t'))

    out = tmp_path / 'out'
    assert sorted(p.name for p in out.iterdir()) == ['table.csv', 'table.plot.json']
    lines = (out / 'table.csv').read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'voltage_v,value'
    assert lines[1] == '0,0.3333333333'
    spec = json.loads((out / 'table.plot.json').read_text(encoding='utf-8'))
    assert spec['data'] == 'table.csv'
    assert spec['kind'] == 'line'
    assert loader.written == ['table.csv', 'table.plot.json']


def test_json_nan_becomes_null():
    data = to_jsonable({'a': float('nan'), 'b': np.int64(3), 'c': np.array([1.0, np.inf]), 'd': np.bool_(True)})
    assert data == {'a': None, 'b': 3, 'c': [1.0, None], 'd': True}


# ----------------------------------------------------------------------
# synthesis
# ----------------------------------------------------------------------
def test_noiseless_scans_match_forward_model(fast_config, logger):
    fast_config.experiment.noise.amplitude = 0.0
    synth = ExperimentSynthesizer(fast_config, logger)
    scans = synth.ple_scans(np.random.default_rng(0))

    site = fast_config.experiment.emitter('V_Si2')
    row = synth.emitter_response(site).iloc[0]
    model = dataclasses.replace(fast_config.ple, a1_center_ghz=row['a1_center_ghz'], fwhm_mhz=row['fwhm_mhz'])
    scan = scans[(scans['emitter'] == 'V_Si2') & (scans['voltage_v'] == row['voltage_v'])]
    expected = OpticsModel.ple_spectrum(model, scan['frequency_ghz'].to_numpy()) * fast_config.experiment.noise.ple_dwell_s
    np.testing.assert_array_equal(scan['counts'].to_numpy(), expected)


def test_seeded_synthesis_is_deterministic(fast_config, logger):
    first = ExperimentSynthesizer(fast_config, logger)
    second = ExperimentSynthesizer(fast_config, logger)
    pd.testing.assert_frame_equal(
        first.ple_scans(first._generators()['ple']),
        second.ple_scans(second._generators()['ple']),
    )
    pd.testing.assert_frame_equal(
        first.time_series(first._generators()['time_series']),
        second.time_series(second._generators()['time_series']),
    )


def test_deep_emitter_flat_before_depletion(run_config, logger):
    synth = ExperimentSynthesizer(run_config, logger)
    assert synth.threshold_voltage(2.71) == pytest.approx(3.19, abs=0.05)
    response = synth.emitter_response(run_config.experiment.emitter('V_Si2'))
    flat = response[response['voltage_v'] < 2.6]
    np.testing.assert_allclose(flat['a1_center_ghz'], -0.67, atol=1e-12)
    assert (response.loc[response['voltage_v'] > 5.0, 'a1_center_ghz'] > 0.0).all()


def test_truth_sidecar(run_config, logger):
    truth = ExperimentSynthesizer(run_config, logger).truth()
    assert truth['seed'] == run_config.seed
    assert truth['device']['n_d_cm3'] == pytest.approx(9e14)
    assert truth['emitters']['V_Si1']['threshold_v'] < 0.0
    assert truth['emitters']['V_Si2']['stark'] == {'d': -5.60, 'alpha': -0.03, 'f0': -0.67}


# ----------------------------------------------------------------------
# reporting
# ----------------------------------------------------------------------
def test_quantity_carries_unit_and_provenance():
    assert quantity(1.0, 'V', 'fitted') == {'value': 1.0, 'unit': 'V', 'provenance': 'fitted'}
    assert quantity(1.0, 'V', 'fitted', 0.1)['sigma'] == 0.1


def test_compare_truth():
    fit = FitResult(
        names=['d', 'alpha', 'f0'],
        values=np.array([-5.5, -0.03, -0.6]),
        covariance=np.diag([0.01, 1e-6, 0.0025]),
        residual_sse=0.2,
        n_points=61,
    )
    report = PipelineReport(seed=1)
    report.emitters['V_Si2'] = {
        'stark': PipelineReporter.stark_block(fit),
        'threshold': {'status': 'detected', 'v_threshold': quantity(2.95, 'V', 'fitted', 0.05)},
    }
    report.doping = {
        'n_d_low': {'value': 7.2e14},
        'n_d_high': {'value': 1.05e15},
    }
    truth = {
        'device': {'n_d_cm3': 9e14},
        'emitters': {'V_Si2': {'stark': {'d': -5.60, 'alpha': -0.03, 'f0': -0.67}, 'threshold_v': 3.19}},
    }

    comparison = PipelineReporter.compare_truth(report, truth)
    d = comparison['emitters']['V_Si2']['d']
    assert d['error'] == pytest.approx(0.1)
    assert d['within_2_sigma']
    assert comparison['doping']['contains_truth']
    threshold = comparison['emitters']['V_Si2']['threshold_v']
    assert threshold['error'] == pytest.approx(-0.24)
    assert threshold['error_sigma'] == pytest.approx(-4.8)

    df = PipelineReporter.emitters_to_dataframe(report)
    assert df.loc[0, 'status'] == '✓ OK'
    assert df.loc[0, 'd_magnitude_ghz_per_mv_m'] == pytest.approx(5.5)
    assert df.loc[0, 'v_threshold_v'] == pytest.approx(2.95)
    assert 'truth_comparison' not in report.to_dict()


def test_stark_block_reports_dipole_magnitude():
    fit = FitResult(
        names=['d', 'alpha', 'f0'],
        values=np.array([-5.5, -0.03, -0.6]),
        covariance=np.diag([0.01, 1e-6, 0.0025]),
        residual_sse=0.2,
        n_points=61,
    )
    block = PipelineReporter.stark_block(fit)
    assert block['d']['value'] == pytest.approx(-5.5)
    assert block['d_magnitude']['value'] == pytest.approx(5.5)
    assert block['d_magnitude']['sigma'] == pytest.approx(0.1)
    assert block['d_magnitude']['unit'] == 'GHz/(MV/m)'


def test_reference_block_errors_in_sigma():
    fit = FitResult(
        names=['d', 'alpha', 'f0'],
        values=np.array([-5.0, -0.06, -3.9]),
        covariance=np.diag([0.09, 0.0, 0.0]),
        residual_sse=0.1,
        n_points=61,
    )
    reference = StarkParams(d=-5.4, alpha=-0.06, f0=-3.9, sigma_d=0.4)
    block = PipelineReporter.reference_block(fit, reference)
    assert block['d']['reference'] == quantity(-5.4, 'GHz/(MV/m)', 'configured', 0.4)
    assert block['d']['fitted'] == pytest.approx(-5.0)
    assert block['d']['error'] == pytest.approx(0.4)
    # σ_fit = 0.3 and σ_ref = 0.4 combine to 0.5
    assert block['d']['error_sigma'] == pytest.approx(0.8)
    assert block['alpha']['error'] == pytest.approx(0.0)
    assert block['alpha']['error_sigma'] is None
