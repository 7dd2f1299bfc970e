"""
Units
=====
Conversion constants between the API units (μm, MV/m, GHz, MHz, cm⁻³,
kV/m/√Hz) and SI. All internal math runs in SI.
"""

from scipy import constants

Q_E = constants.elementary_charge
EPS_0 = constants.epsilon_0
K_B = constants.Boltzmann

UM = 1e-6                 # μm -> m
PER_CM3 = 1e6             # cm⁻³ -> m⁻³
MV_PER_M = 1e6            # MV/m -> V/m
KV_PER_M = 1e3            # kV/m -> V/m
GHZ = 1e9
MHZ = 1e6
US = 1e-6                 # μs -> s
CM = 1e-2


def thermal_voltage(temperature_k: float) -> float:
    """kT/q in volts."""
    return K_B * temperature_k / Q_E
