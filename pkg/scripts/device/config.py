"""
Device Configuration
====================
Dataclasses describing the pin-diode stack, its bias point and the
profiles computed from it.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd

from ..exceptions import DomainError


class LayerRole(str, Enum):
    """Position of a layer in the p⁺⁺ / intrinsic / n⁺⁺ stack"""
    P_CONTACT = "p_contact"
    INTRINSIC_N = "intrinsic_n"
    N_BUFFER = "n_buffer"


class DopantType(str, Enum):
    """Kind of ionised dopant in a layer"""
    DONOR = "donor"
    ACCEPTOR = "acceptor"


_ROLE_ORDER = [LayerRole.P_CONTACT, LayerRole.INTRINSIC_N, LayerRole.N_BUFFER]
_EXPECTED_DOPANT = {
    LayerRole.P_CONTACT: DopantType.ACCEPTOR,
    LayerRole.INTRINSIC_N: DopantType.DONOR,
    LayerRole.N_BUFFER: DopantType.DONOR,
}
MIN_CONTACT_RATIO = 1e3


@dataclass(frozen=True)
class MaterialParams:
    """Material constants (defaults: 4H-SiC at room temperature)"""
    eps_r: float = 9.66
    n_i_cm3: float = 8.2e-9
    temperature_k: float = 300.0
    v_e_cm_s: float = 1e7
    bandgap_ev: float = 3.26

    def __post_init__(self):
        if self.eps_r < 1:
            raise DomainError(f"eps_r must be >= 1, got {self.eps_r}")
        if self.n_i_cm3 <= 0:
            raise DomainError(f"n_i must be > 0, got {self.n_i_cm3}")
        if self.temperature_k <= 0:
            raise DomainError(f"temperature must be > 0 K, got {self.temperature_k}")
        if self.v_e_cm_s <= 0:
            raise DomainError(f"v_e must be > 0, got {self.v_e_cm_s}")
        if self.bandgap_ev <= 0:
            raise DomainError(f"bandgap must be > 0 eV, got {self.bandgap_ev}")


@dataclass(frozen=True)
class LayerSpec:
    """One doped layer of the stack"""
    role: LayerRole
    dopant_type: DopantType
    concentration_cm3: float
    thickness_um: float

    def __post_init__(self):
        # accept plain strings from config files
        object.__setattr__(self, "role", LayerRole(self.role))
        object.__setattr__(self, "dopant_type", DopantType(self.dopant_type))
        if self.concentration_cm3 <= 0:
            raise DomainError(f"{self.role.value}: concentration must be > 0")
        if self.thickness_um <= 0:
            raise DomainError(f"{self.role.value}: thickness must be > 0")


@dataclass(frozen=True)
class DeviceStack:
    """Ordered p_contact → intrinsic_n → n_buffer layers plus material"""
    layers: List[LayerSpec]
    material: MaterialParams = field(default_factory=MaterialParams)

    def __post_init__(self):
        object.__setattr__(self, "layers", list(self.layers))
        roles = [layer.role for layer in self.layers]
        if roles.count(LayerRole.INTRINSIC_N) != 1:
            raise DomainError("stack needs exactly one intrinsic_n layer")
        if roles.count(LayerRole.P_CONTACT) != 1:
            raise DomainError("stack needs exactly one p_contact layer")
        if len(set(roles)) != len(roles):
            raise DomainError(f"duplicate layer roles: {[r.value for r in roles]}")
        order = [_ROLE_ORDER.index(r) for r in roles]
        if order != sorted(order):
            raise DomainError("layers must be ordered p_contact → intrinsic_n → n_buffer")

        for layer in self.layers:
            if layer.dopant_type != _EXPECTED_DOPANT[layer.role]:
                raise DomainError(
                    f"{layer.role.value} must be {_EXPECTED_DOPANT[layer.role].value}-doped"
                )

        if self.n_a_cm3 / self.n_d_cm3 < MIN_CONTACT_RATIO:
            raise DomainError(
                f"p_contact doping must exceed intrinsic doping by >= {MIN_CONTACT_RATIO:g}x "
                f"(got {self.n_a_cm3 / self.n_d_cm3:.3g}x)"
            )

    def layer(self, role: LayerRole) -> Optional[LayerSpec]:
        for layer in self.layers:
            if layer.role == role:
                return layer
        return None

    @property
    def n_a_cm3(self) -> float:
        return self.layer(LayerRole.P_CONTACT).concentration_cm3

    @property
    def n_d_cm3(self) -> float:
        return self.layer(LayerRole.INTRINSIC_N).concentration_cm3

    @property
    def intrinsic_width_um(self) -> float:
        return self.layer(LayerRole.INTRINSIC_N).thickness_um

    def with_intrinsic_doping(self, n_d_cm3: float) -> "DeviceStack":
        """Copy of the stack with a different intrinsic-layer doping"""
        layers = [
            LayerSpec(l.role, l.dopant_type, n_d_cm3, l.thickness_um)
            if l.role == LayerRole.INTRINSIC_N else l
            for l in self.layers
        ]
        return DeviceStack(layers=layers, material=self.material)


def reference_device_stack(material: Optional[MaterialParams] = None) -> DeviceStack:
    """The 4H-SiC pin-diode with the measured intrinsic doping of 9×10¹⁴ cm⁻³"""
    return DeviceStack(
        layers=[
            LayerSpec(LayerRole.P_CONTACT, DopantType.ACCEPTOR, 2e19, 2.0),
            LayerSpec(LayerRole.INTRINSIC_N, DopantType.DONOR, 9e14, 4.1),
            LayerSpec(LayerRole.N_BUFFER, DopantType.DONOR, 1e18, 1.0),
        ],
        material=material or MaterialParams(),
    )


@dataclass(frozen=True)
class BiasPoint:
    """Applied voltage; positive values are reverse bias"""
    reverse_voltage: float


@dataclass
class FieldProfile:
    """Macroscopic and Lorentz-corrected field across the intrinsic layer"""
    positions_um: np.ndarray
    e_macro: np.ndarray
    e_local: np.ndarray
    x_n_um: float
    punch_through: bool
    v_bi: float
    reverse_voltage: float
    e0_mv_per_m: float = 0.0
    slope_mv_per_m_um: float = 0.0
    intrinsic_width_um: float = 0.0
    local_factor: float = 1.0

    def macro_at(self, x_um) -> np.ndarray:
        """Analytic macroscopic field (MV/m) at arbitrary positions"""
        x = np.asarray(x_um, dtype=float)
        e = np.clip(self.e0_mv_per_m - self.slope_mv_per_m_um * x, 0.0, None)
        inside = (x >= 0.0) & (x <= self.intrinsic_width_um)
        return np.where(inside, e, 0.0)

    def local_at(self, x_um) -> np.ndarray:
        return self.local_factor * self.macro_at(x_um)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'position_um': self.positions_um,
            'e_macro_mv_per_m': self.e_macro,
            'e_local_mv_per_m': self.e_local,
        })


@dataclass
class BandDiagram:
    """Valence and conduction band edges (eV) across the intrinsic layer"""
    positions_um: np.ndarray
    valence_ev: np.ndarray
    conduction_ev: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'position_um': self.positions_um,
            'valence_ev': self.valence_ev,
            'conduction_ev': self.conduction_ev,
        })


@dataclass
class CarrierProfile:
    """Free-electron concentration (cm⁻³) in the step-depletion model"""
    positions_um: np.ndarray
    electron_cm3: np.ndarray
    x_n_um: float
    punch_through: bool
    n_d_cm3: float
    intrinsic_width_um: float

    def at(self, x_um) -> np.ndarray:
        """Step-model density at arbitrary positions"""
        x = np.asarray(x_um, dtype=float)
        if self.punch_through:
            return np.where(x <= self.intrinsic_width_um, 0.0, self.n_d_cm3)
        return np.where(x < self.x_n_um, 0.0, self.n_d_cm3)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'position_um': self.positions_um,
            'electron_cm3': self.electron_cm3,
        })
