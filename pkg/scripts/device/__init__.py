"""Device Electrostatics Components - Import-only __init__.py"""

from .config import (
    BandDiagram,
    BiasPoint,
    CarrierProfile,
    DeviceStack,
    DopantType,
    FieldProfile,
    LayerRole,
    LayerSpec,
    MaterialParams,
    reference_device_stack,
)
from .electrostatics import DeviceSimulator

__all__ = [
    'BandDiagram',
    'BiasPoint',
    'CarrierProfile',
    'DeviceStack',
    'DopantType',
    'FieldProfile',
    'LayerRole',
    'LayerSpec',
    'MaterialParams',
    'reference_device_stack',
    'DeviceSimulator',
]
