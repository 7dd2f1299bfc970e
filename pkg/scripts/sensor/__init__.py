"""Sensor Components - Import-only __init__.py"""

from .config import LinewidthModel, OdmrSpectrum, PleModel, SpinModel, StarkParams
from .optics import OpticsModel
from .spin import SpinSimulator, spin_operators
from .stark import StarkModel

__all__ = [
    'LinewidthModel',
    'OdmrSpectrum',
    'PleModel',
    'SpinModel',
    'StarkParams',
    'OpticsModel',
    'SpinSimulator',
    'spin_operators',
    'StarkModel',
]
