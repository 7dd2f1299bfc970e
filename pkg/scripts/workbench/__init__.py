"""Workbench Components - Import-only __init__.py"""

from .config import (
    EmitterSite,
    ExperimentConfig,
    InversionSettings,
    NoiseSettings,
    RunConfig,
    WorkbenchConfig,
    load_config,
)
from .validator import DatasetReport, DatasetValidator, Schema
from .extractor import DatasetExtractor
from .loader import ArtifactLoader, PlotSpec
from .synth import ExperimentSynthesizer, SyntheticDataset
from .reporter import PipelineReport, PipelineReporter

__all__ = [
    'EmitterSite',
    'ExperimentConfig',
    'InversionSettings',
    'NoiseSettings',
    'RunConfig',
    'WorkbenchConfig',
    'load_config',
    'DatasetReport',
    'DatasetValidator',
    'Schema',
    'DatasetExtractor',
    'ArtifactLoader',
    'PlotSpec',
    'ExperimentSynthesizer',
    'SyntheticDataset',
    'PipelineReport',
    'PipelineReporter',
]
