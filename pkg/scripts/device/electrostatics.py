"""
Device Electrostatics
=====================
1D depletion-approximation model of the pin-diode: built-in voltage,
depletion width, field and band profiles, free-carrier profile.

Coordinates are μm from the p⁺⁺/intrinsic interface. Fields are
nonnegative magnitudes along the c-axis.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..exceptions import DomainError
from ..units import EPS_0, MV_PER_M, PER_CM3, Q_E, UM, thermal_voltage
from .config import (
    BandDiagram,
    BiasPoint,
    CarrierProfile,
    DeviceStack,
    FieldProfile,
    MaterialParams,
)


class DeviceSimulator:
    """Electrostatics of an abrupt p⁺⁺/n/n⁺⁺ junction"""

    def __init__(self, logger: Optional[logging.Logger] = None, grid_points: int = 2000):
        if grid_points < 2:
            raise DomainError(f"grid_points must be >= 2, got {grid_points}")
        self.logger = logger or logging.getLogger(__name__)
        self.grid_points = grid_points

    # ------------------------------------------------------------------
    # closed-form helpers
    # ------------------------------------------------------------------
    @staticmethod
    def builtin_voltage(stack: DeviceStack) -> float:
        """
        Abrupt-junction built-in voltage (kT/q)·ln(N_A·N_D/n_i²).

        Args:
            stack: Device stack providing N_A, N_D and n_i

        Returns:
            Built-in voltage in volts
        """
        material = stack.material
        ratio = stack.n_a_cm3 * stack.n_d_cm3 / material.n_i_cm3 ** 2
        return thermal_voltage(material.temperature_k) * float(np.log(ratio))

    @staticmethod
    def depletion_width(v: float, n_d_cm3: float, v_bi: float, material: MaterialParams) -> float:
        """
        Depletion width into the intrinsic layer for N_A ≫ N_D.

        Args:
            v: Reverse voltage in volts
            n_d_cm3: Intrinsic-layer donor concentration
            v_bi: Built-in voltage in volts
            material: Material constants (eps_r)

        Returns:
            x_n in μm
        """
        potential = v + v_bi
        if potential < 0:
            raise DomainError(
                f"junction forward-flooded: V + V_bi = {potential:.4g} V < 0"
            )
        if n_d_cm3 <= 0:
            raise DomainError(f"N_D must be > 0, got {n_d_cm3}")
        eps = EPS_0 * material.eps_r
        x_n = np.sqrt(2.0 * eps * potential / (Q_E * n_d_cm3 * PER_CM3))
        return float(x_n / UM)

    @staticmethod
    def depletion_width_full(
        v: float,
        n_a_cm3: float,
        n_d_cm3: float,
        v_bi: float,
        material: MaterialParams
    ) -> float:
        """Two-sided junction: n-side width without the N_A ≫ N_D reduction (μm)"""
        potential = v + v_bi
        if potential < 0:
            raise DomainError(
                f"junction forward-flooded: V + V_bi = {potential:.4g} V < 0"
            )
        eps = EPS_0 * material.eps_r
        n_a = n_a_cm3 * PER_CM3
        n_d = n_d_cm3 * PER_CM3
        x_n = np.sqrt(2.0 * eps * potential / Q_E * n_a / (n_d * (n_a + n_d)))
        return float(x_n / UM)

    @staticmethod
    def lorentz_local_field(e_macro, eps_r: float):
        """Field at a point defect: ((2 + eps_r)/3)·E"""
        return (2.0 + eps_r) / 3.0 * e_macro

    @staticmethod
    def electron_density_from_current(j_a_cm2: float, v_e_cm_s: float) -> float:
        """
        Free-electron density carried by a drift current, n_e = j/(q·v_e).

        Args:
            j_a_cm2: Current density in A/cm²
            v_e_cm_s: Electron drift velocity in cm/s

        Returns:
            n_e in cm⁻³
        """
        if v_e_cm_s <= 0:
            raise DomainError(f"drift velocity must be > 0, got {v_e_cm_s}")
        if j_a_cm2 < 0:
            raise DomainError(f"current density must be >= 0, got {j_a_cm2}")
        return j_a_cm2 / (Q_E * v_e_cm_s)

    @staticmethod
    def field_slope(n_d_cm3: float, material: MaterialParams) -> float:
        """|dE/dx| = q·N_D/ε in MV/m per μm"""
        slope_si = Q_E * n_d_cm3 * PER_CM3 / (EPS_0 * material.eps_r)
        return slope_si * UM / MV_PER_M

    # ------------------------------------------------------------------
    # profiles
    # ------------------------------------------------------------------
    def depletion_edge(self, stack: DeviceStack, bias: BiasPoint) -> Tuple[float, bool, float]:
        """Return (x_n in μm, punch_through, V_bi) for a bias point"""
        v_bi = self.builtin_voltage(stack)
        x_n = self.depletion_width(bias.reverse_voltage, stack.n_d_cm3, v_bi, stack.material)
        return x_n, x_n >= stack.intrinsic_width_um, v_bi

    def grid(self, stack: DeviceStack) -> np.ndarray:
        return np.linspace(0.0, stack.intrinsic_width_um, self.grid_points)

    def field_profile(self, stack: DeviceStack, bias: BiasPoint) -> FieldProfile:
        """
        Macroscopic and local field across the intrinsic layer.

        Triangular profile while the depletion edge is inside the layer,
        trapezoidal after punch-through (no penetration into the buffer).

        Args:
            stack: Device stack
            bias: Bias point

        Returns:
            FieldProfile on the uniform intrinsic-layer grid
        """
        try:
            x_n, punch_through, v_bi = self.depletion_edge(stack, bias)
        except DomainError as e:
            self.logger.error(f"✗ Field profile failed at V={bias.reverse_voltage} V: {str(e)}")
            raise

        slope = self.field_slope(stack.n_d_cm3, stack.material)
        width = stack.intrinsic_width_um
        if punch_through:
            # potential in V = MV/m·μm; offset makes the trapezoid integrate to V + V_bi
            e0 = ((bias.reverse_voltage + v_bi) + 0.5 * slope * width ** 2) / width
        else:
            e0 = slope * x_n

        positions = self.grid(stack)
        e_macro = np.clip(e0 - slope * positions, 0.0, None)
        factor = self.lorentz_local_field(1.0, stack.material.eps_r)
        e_local = self.lorentz_local_field(e_macro, stack.material.eps_r)

        self.logger.debug(
            f"V={bias.reverse_voltage:g} V: x_n={x_n:.3f} μm, punch_through={punch_through}, "
            f"E(0)={e0:.3f} MV/m"
        )
        return FieldProfile(
            positions_um=positions,
            e_macro=e_macro,
            e_local=e_local,
            x_n_um=x_n,
            punch_through=punch_through,
            v_bi=v_bi,
            reverse_voltage=bias.reverse_voltage,
            e0_mv_per_m=e0,
            slope_mv_per_m_um=slope,
            intrinsic_width_um=width,
            local_factor=factor,
        )

    def local_field_at(self, stack: DeviceStack, bias: BiasPoint, x_um: float) -> float:
        """Lorentz-corrected field (MV/m) at one emitter position"""
        return float(self.field_profile(stack, bias).local_at(x_um))

    def band_diagram(self, stack: DeviceStack, bias: BiasPoint) -> BandDiagram:
        """
        Band edges from the field profile.

        ε_V is the running integral of -e·E_macro from the p-side (ε_V(0) = 0),
        the conduction edge sits one bandgap above it.

        Args:
            stack: Device stack
            bias: Bias point

        Returns:
            BandDiagram on the same grid as field_profile
        """
        profile = self.field_profile(stack, bias)
        # MV/m · μm = V, so the integral is already in eV per electron
        valence = -cumulative_trapezoid(profile.e_macro, profile.positions_um, initial=0.0)
        conduction = valence + stack.material.bandgap_ev
        return BandDiagram(
            positions_um=profile.positions_um,
            valence_ev=valence,
            conduction_ev=conduction,
        )

    def carrier_profile(self, stack: DeviceStack, bias: BiasPoint) -> CarrierProfile:
        """
        Free-electron concentration in the step model.

        Args:
            stack: Device stack
            bias: Bias point

        Returns:
            CarrierProfile with n = 0 on [0, x_n), N_D from x_n on
        """
        try:
            x_n, punch_through, _ = self.depletion_edge(stack, bias)
        except DomainError as e:
            self.logger.error(f"✗ Carrier profile failed at V={bias.reverse_voltage} V: {str(e)}")
            raise

        positions = self.grid(stack)
        if punch_through:
            density = np.zeros_like(positions)
        else:
            density = np.where(positions < x_n, 0.0, stack.n_d_cm3)
        return CarrierProfile(
            positions_um=positions,
            electron_cm3=density,
            x_n_um=x_n,
            punch_through=punch_through,
            n_d_cm3=stack.n_d_cm3,
            intrinsic_width_um=stack.intrinsic_width_um,
        )
