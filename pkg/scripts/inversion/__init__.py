"""Inversion Components - Import-only __init__.py"""

from .results import (
    CountTimeSeries,
    CvCurve,
    DopingInterval,
    FitResult,
    SensitivityResult,
    ThresholdEstimate,
)
from .stark_fit import StarkFitter
from .threshold import ThresholdDetector
from .doping import DopingAnalyzer
from .lineshape import LevenbergMarquardt, LorentzianFitter
from .sensitivity import SensitivityEstimator

__all__ = [
    'CountTimeSeries',
    'CvCurve',
    'DopingInterval',
    'FitResult',
    'SensitivityResult',
    'ThresholdEstimate',
    'StarkFitter',
    'ThresholdDetector',
    'DopingAnalyzer',
    'LevenbergMarquardt',
    'LorentzianFitter',
    'SensitivityEstimator',
]
