"""
Workbench Configuration
=======================
Dataclasses for experiment, inversion and runtime settings plus the YAML
loader. pydantic validates the file against the dataclasses; errors carry
the dotted key path and the 1-based line of the offending key.

Precedence for overridable values: CLI flag > environment (VSI_SEED,
VSI_THREADS, VSI_LOG_LEVEL, optionally from a .env file) > config file.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from ..device.config import DeviceStack
from ..exceptions import ConfigError
from ..sensor.config import LinewidthModel, PleModel, SpinModel, StarkParams

LOG_LEVELS = {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'}


@dataclass
class EmitterSite:
    """A V_Si center at a known depth in the intrinsic layer"""
    name: str
    x_um: float
    sigma_x_um: float = 0.25


@dataclass
class NoiseSettings:
    """Shot-noise model of the synthetic datasets (amplitude 0 = noiseless)"""
    amplitude: float = 1.0
    ple_dwell_s: float = 0.5
    odmr_shots: int = 20000
    cv_relative_noise: float = 1e-4

    def __post_init__(self):
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValueError(f"amplitude must lie in [0, 1], got {self.amplitude}")
        if self.ple_dwell_s <= 0 or self.odmr_shots < 1 or self.cv_relative_noise < 0:
            raise ValueError("dwell and shots must be positive, CV noise >= 0")


@dataclass
class PleScanSettings:
    """Laser sweep around the expected doublet"""
    half_window_ghz: float = 2.0
    step_mhz: float = 10.0
    center_offset_ghz: float = 0.5

    def frequencies(self, a1_center_ghz: float) -> np.ndarray:
        center = a1_center_ghz + self.center_offset_ghz
        n = int(round(2 * self.half_window_ghz * 1e3 / self.step_mhz)) + 1
        return center - self.half_window_ghz + np.arange(n) * self.step_mhz / 1e3


@dataclass
class OdmrSettings:
    """Microwave sweep of the ODMR subcommand"""
    emitter: str = "V_Si2"
    voltages_v: List[float] = field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
    rabi_mhz: float = 1.0
    duration_us: float = 0.29
    start_mhz: float = 60.0
    stop_mhz: float = 80.0
    step_mhz: float = 0.1
    fit_half_window_mhz: float = 3.0

    def __post_init__(self):
        if self.step_mhz <= 0 or self.stop_mhz <= self.start_mhz:
            raise ValueError("microwave sweep needs start < stop and step > 0")

    def frequencies(self) -> np.ndarray:
        n = int(round((self.stop_mhz - self.start_mhz) / self.step_mhz)) + 1
        return np.round(self.start_mhz + np.arange(n) * self.step_mhz, 10)


@dataclass
class CvSettings:
    """Synthetic capacitance-voltage sweep"""
    contact_area_cm2: float = 9e-4
    n_d_cm3: float = 8.7e14
    start_v: float = -10.0
    stop_v: float = 0.5
    step_v: float = 0.1

    def voltages(self) -> np.ndarray:
        return _sweep(self.start_v, self.stop_v, self.step_v)


@dataclass
class SensitivitySettings:
    """Working-point time series for field sensitivity"""
    emitter: str = "V_Si2"
    working_rate_cps: float = 1e4
    sample_rate_hz: float = 100.0
    duration_s: float = 60.0
    gradient_cps_per_ghz: Optional[float] = 1.25e4

    def __post_init__(self):
        if self.working_rate_cps < 0 or self.sample_rate_hz <= 0 or self.duration_s < 2:
            raise ValueError("need rate >= 0, sample rate > 0 and duration >= 2 s")


@dataclass
class ReverseCurrent:
    """Reverse current density vs. bias, interpolated linearly"""
    voltages_v: List[float] = field(default_factory=list)
    j_a_cm2: List[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.voltages_v) != len(self.j_a_cm2):
            raise ValueError("voltages_v and j_a_cm2 differ in length")
        if any(j < 0 for j in self.j_a_cm2):
            raise ValueError("current densities must be >= 0")

    def at(self, voltage: float) -> float:
        if not self.voltages_v:
            return 0.0
        return float(np.interp(voltage, self.voltages_v, self.j_a_cm2))


@dataclass
class ExperimentConfig:
    """Emitters, bias sweeps, noise and seed of one synthetic experiment"""
    emitters: List[EmitterSite]
    voltages_v: List[float]
    profile_voltages_v: List[float] = field(default_factory=lambda: [0.0, 10.0, 20.0, 30.0])
    seed: int = 20240601
    noise: NoiseSettings = field(default_factory=NoiseSettings)
    ple_scan: PleScanSettings = field(default_factory=PleScanSettings)
    odmr: OdmrSettings = field(default_factory=OdmrSettings)
    cv: CvSettings = field(default_factory=CvSettings)
    reverse_current: ReverseCurrent = field(default_factory=ReverseCurrent)

    def emitter(self, name: str) -> EmitterSite:
        for site in self.emitters:
            if site.name == name:
                return site
        raise ConfigError(f"unknown emitter '{name}'", key="experiment.emitters")


@dataclass
class InversionSettings:
    """Tunables of the inversion procedures"""
    threshold_max_voltage_v: float = 10.0
    bootstrap_resamples: int = 200
    min_improvement: float = 0.05
    cv_window: int = 5
    cv_degree: int = 2
    doping_candidates_cm3: List[float] = field(default_factory=lambda: [7e14, 9e14, 1.1e15])

    def __post_init__(self):
        if self.bootstrap_resamples < 2:
            raise ValueError("bootstrap_resamples must be >= 2")
        if self.cv_window % 2 == 0 or self.cv_window <= self.cv_degree:
            raise ValueError("cv_window must be odd and larger than cv_degree")


@dataclass
class WorkbenchConfig:
    """Runtime settings: logging, threads, grid, bias limits"""
    log_level: str = "INFO"
    log_file: Optional[str] = None
    threads: int = 1
    grid_points: int = 2000
    min_voltage_v: float = -5.0
    max_voltage_v: float = 100.0

    def __post_init__(self):
        self.log_level = str(self.log_level).upper()
        if self.log_level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {sorted(LOG_LEVELS)}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        if self.min_voltage_v >= self.max_voltage_v:
            raise ValueError("min_voltage_v must be below max_voltage_v")


@dataclass
class RunConfig:
    """Everything one subcommand needs, built from a single YAML file"""
    stack: DeviceStack
    spin: SpinModel
    ple: PleModel
    linewidth: LinewidthModel
    stark: Dict[str, StarkParams]
    sensitivity: SensitivitySettings
    experiment: ExperimentConfig
    inversion: InversionSettings = field(default_factory=InversionSettings)
    workbench: WorkbenchConfig = field(default_factory=WorkbenchConfig)
    stark_reference: Dict[float, Dict[str, StarkParams]] = field(default_factory=dict)
    source: Optional[str] = None

    @property
    def seed(self) -> int:
        return self.experiment.seed


def _sweep(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0 or stop < start:
        raise ValueError("sweep needs start <= stop and step > 0")
    n = int(round((stop - start) / step)) + 1
    return np.round(start + np.arange(n) * step, 10)


class VoltageSweep(BaseModel):
    """Inclusive `{start_v, stop_v, step_v}` shorthand for a voltage list"""
    model_config = ConfigDict(extra='forbid')

    start_v: float
    stop_v: float
    step_v: float

    def values(self) -> List[float]:
        return [float(v) for v in _sweep(self.start_v, self.stop_v, self.step_v)]


class SensorSection(BaseModel):
    """The `sensor` block of a config file"""
    model_config = ConfigDict(extra='forbid')

    stark: Dict[str, StarkParams]
    stark_reference: Dict[float, Dict[str, StarkParams]] = Field(default_factory=dict)
    spin: SpinModel = Field(default_factory=SpinModel)
    ple: PleModel = Field(default_factory=PleModel)
    linewidth: LinewidthModel = Field(default_factory=LinewidthModel)
    sensitivity: SensitivitySettings = Field(default_factory=SensitivitySettings)


class ConfigFile(BaseModel):
    """
    Shape of a workbench YAML file.

    The nested dataclasses carry no pydantic config of their own, so they
    inherit extra='forbid' from here.
    """
    model_config = ConfigDict(extra='forbid')

    device: DeviceStack
    sensor: SensorSection
    experiment: ExperimentConfig
    inversion: InversionSettings = Field(default_factory=InversionSettings)
    workbench: WorkbenchConfig = Field(default_factory=WorkbenchConfig)


_INT = TypeAdapter(int)


def _key_lines(text: str) -> Dict[str, int]:
    """Map dotted key paths to 1-based line numbers"""
    lines = {}

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                child = f"{path}.{key_node.value}" if path else str(key_node.value)
                lines[child] = key_node.start_mark.line + 1
                walk(value_node, child)
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                child = f"{path}[{i}]"
                lines[child] = item.start_mark.line + 1
                walk(item, child)

    walk(yaml.compose(text), "")
    return lines


def _dotted(loc: Sequence[Union[str, int]], prefix: str = "") -> str:
    """('experiment', 'emitters', 1, 'x_um') → experiment.emitters[1].x_um"""
    path = prefix
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path = f"{path}.{part}" if path else str(part)
    return path


def _parent(key: str) -> str:
    cut = max(key.rfind('.'), key.rfind('['))
    return key[:cut] if cut > 0 else ""


class ConfigLoader:
    """Validate a parsed YAML document into a RunConfig"""

    VOLTAGE_LISTS = ('voltages_v', 'profile_voltages_v')

    def __init__(self, lines: Optional[Dict[str, int]] = None):
        self.lines = lines or {}

    def error(self, message: str, key: str) -> ConfigError:
        path, line = key, None
        while path and line is None:
            line = self.lines.get(path)
            path = _parent(path)
        return ConfigError(message, key=key or None, line=line)

    def from_validation_error(self, exc: ValidationError, prefix: str = "") -> ConfigError:
        """First pydantic error as a ConfigError on its dotted key path"""
        first = exc.errors()[0]
        key = _dotted(first['loc'], prefix)
        if first['type'] in ('extra_forbidden', 'unexpected_keyword_argument'):
            message = f"unknown key '{first['loc'][-1]}'"
        else:
            message = first['msg']
        return self.error(message, key)

    def expand_sweeps(self, data: Dict[str, Any]):
        """Replace sweep mappings under experiment by explicit voltage lists"""
        experiment = data.get('experiment')
        if not isinstance(experiment, dict):
            return
        for key in self.VOLTAGE_LISTS:
            raw = experiment.get(key)
            if not isinstance(raw, dict):
                continue
            path = f"experiment.{key}"
            try:
                experiment[key] = VoltageSweep.model_validate(raw).values()
            except ValidationError as e:
                raise self.from_validation_error(e, path) from None
            except ValueError as e:
                raise self.error(str(e), path) from None

    def build_run(self, data: Any, source: Optional[str] = None) -> RunConfig:
        if not isinstance(data, dict):
            raise self.error("expected a mapping at the top level", "")
        self.expand_sweeps(data)
        try:
            document = ConfigFile.model_validate(data)
        except ValidationError as e:
            raise self.from_validation_error(e) from None
        except ValueError as e:
            raise self.error(str(e), "") from None

        config = RunConfig(
            stack=document.device,
            spin=document.sensor.spin,
            ple=document.sensor.ple,
            linewidth=document.sensor.linewidth,
            stark=document.sensor.stark,
            sensitivity=document.sensor.sensitivity,
            experiment=document.experiment,
            inversion=document.inversion,
            workbench=document.workbench,
            stark_reference=document.sensor.stark_reference,
            source=source,
        )
        self.check_consistency(config)
        return config

    def check_consistency(self, config: RunConfig):
        """Cross-section invariants"""
        width = config.stack.intrinsic_width_um
        for i, site in enumerate(config.experiment.emitters):
            if not 0.0 < site.x_um < width:
                raise self.error(
                    f"emitter {site.name} at {site.x_um} μm lies outside the intrinsic layer (0, {width}) μm",
                    f"experiment.emitters[{i}].x_um",
                )
            if site.name not in config.stark:
                raise self.error(f"no Stark parameters for emitter {site.name}", 'sensor.stark')

        bench = config.workbench
        for key, values in (
            ('experiment.voltages_v', config.experiment.voltages_v),
            ('experiment.profile_voltages_v', config.experiment.profile_voltages_v),
            ('experiment.odmr.voltages_v', config.experiment.odmr.voltages_v),
        ):
            for i, v in enumerate(values):
                if not bench.min_voltage_v <= v <= bench.max_voltage_v:
                    raise self.error(
                        f"{v} V outside bias limits [{bench.min_voltage_v}, {bench.max_voltage_v}] V",
                        f"{key}[{i}]",
                    )

        names = {site.name for site in config.experiment.emitters}
        if config.experiment.odmr.emitter not in names:
            raise self.error(f"unknown emitter '{config.experiment.odmr.emitter}'", 'experiment.odmr.emitter')
        if config.sensitivity.emitter not in names:
            raise self.error(f"unknown emitter '{config.sensitivity.emitter}'", 'sensor.sensitivity.emitter')


def _env_int(value: str, name: str) -> int:
    try:
        return _INT.validate_python(value)
    except ValidationError:
        raise ConfigError(f"expected an integer, got {value!r}", key=name) from None


def apply_overrides(
    config: RunConfig,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    log_level: Optional[str] = None,
    environ: Optional[Dict[str, str]] = None
) -> RunConfig:
    """
    Layer environment and CLI values over the file values.

    Args:
        config: Configuration built from the file
        seed: CLI seed (wins over VSI_SEED)
        threads: CLI thread count (wins over VSI_THREADS)
        log_level: CLI log level (wins over VSI_LOG_LEVEL)
        environ: Environment mapping (defaults to os.environ)

    Returns:
        The same config, updated in place
    """
    env = os.environ if environ is None else environ
    env_seed = env.get('VSI_SEED')
    if seed is None and env_seed not in (None, ''):
        seed = _env_int(env_seed, 'VSI_SEED')
    if seed is not None:
        config.experiment.seed = int(seed)

    env_threads = env.get('VSI_THREADS')
    if threads is None and env_threads not in (None, ''):
        threads = _env_int(env_threads, 'VSI_THREADS')
    if threads is not None:
        if threads < 1:
            raise ConfigError(f"threads must be >= 1, got {threads}", key='VSI_THREADS')
        config.workbench.threads = int(threads)

    level = log_level or env.get('VSI_LOG_LEVEL') or None
    if level:
        if level.upper() not in LOG_LEVELS:
            raise ConfigError(f"unknown log level '{level}'", key='VSI_LOG_LEVEL')
        config.workbench.log_level = level.upper()
    return config


def load_config(
    path: Union[str, Path],
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    log_level: Optional[str] = None,
    use_dotenv: bool = True
) -> RunConfig:
    """
    Read, validate and override a workbench YAML file.

    Args:
        path: YAML file
        seed: Optional CLI seed override
        threads: Optional CLI thread override
        log_level: Optional CLI log-level override
        use_dotenv: Read a .env file before consulting the environment

    Returns:
        RunConfig

    Raises:
        ConfigError: Unreadable file, YAML syntax error or invalid entry
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}") from None

    try:
        data = yaml.safe_load(text)
        lines = _key_lines(text) if data is not None else {}
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise ConfigError(
            f"invalid YAML in {path}: {getattr(e, 'problem', e)}",
            line=mark.line + 1 if mark else None,
        ) from None

    config = ConfigLoader(lines).build_run(data, source=str(path))
    if use_dotenv:
        load_dotenv()
    return apply_overrides(config, seed=seed, threads=threads, log_level=log_level)
