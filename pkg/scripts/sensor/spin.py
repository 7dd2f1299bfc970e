"""
Spin Simulator
==============
Spin-3/2 ground-state Hamiltonian and ODMR spectra of the V_Si center.

Basis ordering: m = +3/2, +1/2, -1/2, -3/2.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from ..exceptions import DomainError, NumericalError
from ..units import MHZ
from .config import OdmrSpectrum, SpinModel

SPIN = 1.5
M_VALUES = np.array([1.5, 0.5, -0.5, -1.5])
TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-12
STEPS_PER_PERIOD = 50


def spin_operators() -> Tuple[np.ndarray, np.ndarray]:
    """S_x and S_z for S = 3/2"""
    s_z = np.diag(M_VALUES).astype(complex)
    s_plus = np.zeros((4, 4), dtype=complex)
    for i in range(1, 4):
        m = M_VALUES[i]
        s_plus[i - 1, i] = np.sqrt(SPIN * (SPIN + 1) - m * (m + 1))
    s_x = 0.5 * (s_plus + s_plus.conj().T)
    return s_x, s_z


class SpinSimulator:
    """Hamiltonians and driven evolution of the ground-state spin"""

    def __init__(self, logger: Optional[logging.Logger] = None, max_workers: int = 1):
        self.logger = logger or logging.getLogger(__name__)
        self.max_workers = max(1, int(max_workers))
        s_x, s_z = spin_operators()
        self.s_x = s_x
        self.s_z2 = s_z @ s_z
        # projector on |±3/2>, the levels that gain one microwave quantum
        self.upper = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
        lower = np.eye(4) - self.upper
        # drive terms connecting |±1/2> and |±3/2>; the |+1/2>↔|-1/2> term rotates away
        self.s_x_rwa = self.upper @ s_x @ lower + lower @ s_x @ self.upper
        self.rho_init = 0.5 * lower
        self.readout = 0.5 * self.upper

    @staticmethod
    def ground_state_hamiltonian(e_z: float, model: SpinModel) -> np.ndarray:
        """
        H_gs = (D + d_z·E_z)·S_z² in Hz.

        Args:
            e_z: Axial field in V/m
            model: Spin model

        Returns:
            4×4 Hermitian (diagonal) matrix in Hz
        """
        _, s_z = spin_operators()
        splitting = model.d_mhz * MHZ + model.dz_hz_per_v_m * e_z
        return splitting * (s_z @ s_z)

    @staticmethod
    def transition_frequency_mhz(e_z: float, model: SpinModel) -> float:
        """|±1/2> → |±3/2> resonance, 2(D + d_z·E_z), in MHz"""
        return 2.0 * (model.d_mhz + model.dz_hz_per_v_m * e_z / MHZ)

    def rotating_frame_hamiltonian(
        self,
        e_z: float,
        model: SpinModel,
        rabi_mhz: float,
        mw_mhz: float
    ) -> np.ndarray:
        """Time-independent RWA Hamiltonian in MHz at one drive frequency"""
        h_gs = self.ground_state_hamiltonian(e_z, model) / MHZ
        # remove the common |±1/2> energy, then move |±3/2> into the drive frame
        h = h_gs - h_gs[1, 1] * np.eye(4) - mw_mhz * self.upper
        return h + rabi_mhz * self.s_x_rwa

    def _evolve(self, hamiltonian: np.ndarray, duration_us: float) -> float:
        """Readout expectation after piecewise-constant propagation"""
        if np.max(np.abs(hamiltonian - hamiltonian.conj().T)) > HERMITIAN_TOL:
            raise NumericalError("non-Hermitian Hamiltonian in ODMR propagation")

        scale = float(np.max(np.abs(np.linalg.eigvalsh(hamiltonian))))
        if scale > 0:
            n_steps = max(1, int(np.ceil(duration_us * STEPS_PER_PERIOD * scale)))
        else:
            n_steps = 1
        dt = duration_us / n_steps
        step = expm(-2j * np.pi * hamiltonian * dt)
        step_dag = step.conj().T

        rho = self.rho_init.copy()
        for _ in range(n_steps):
            rho = step @ rho @ step_dag
            if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
                raise NumericalError(f"trace drifted to {np.trace(rho).real:.12f}")
            if np.max(np.abs(rho - rho.conj().T)) > TRACE_TOL:
                raise NumericalError("density matrix lost Hermiticity")
            if np.min(np.linalg.eigvalsh(rho)) < -TRACE_TOL:
                raise NumericalError("density matrix acquired negative eigenvalues")

        return float(np.trace(self.readout @ rho).real)

    def odmr_spectrum(
        self,
        e_z: float,
        model: SpinModel,
        rabi_mhz: float,
        duration_us: float,
        mw_range_mhz: Sequence[float]
    ) -> OdmrSpectrum:
        """
        Simulated ODMR readout over a microwave sweep.

        Starts from ρ = ½(|+½⟩⟨+½| + |−½⟩⟨−½|), drives Ω·S_x in the rotating
        frame of each frequency and reads out ½(|+3/2⟩⟨+3/2| + |−3/2⟩⟨−3/2|).

        Args:
            e_z: Axial field in V/m
            model: Spin model
            rabi_mhz: Drive amplitude Ω in MHz
            duration_us: Pulse duration in μs
            mw_range_mhz: Microwave frequencies in MHz

        Returns:
            OdmrSpectrum with one population per frequency
        """
        freqs = np.asarray(list(mw_range_mhz), dtype=float)
        if rabi_mhz <= 0:
            raise DomainError(f"Rabi frequency must be > 0, got {rabi_mhz}")
        if duration_us <= 0:
            raise DomainError(f"duration must be > 0, got {duration_us}")
        if freqs.size == 0:
            raise DomainError("empty microwave frequency list")

        def simulate(mw: float) -> float:
            h = self.rotating_frame_hamiltonian(e_z, model, rabi_mhz, mw)
            return self._evolve(h, duration_us)

        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                populations = list(pool.map(simulate, freqs))
        else:
            populations = [simulate(mw) for mw in freqs]

        self.logger.debug(
            f"ODMR: E_z={e_z:.4g} V/m, {freqs.size} frequencies, "
            f"resonance {self.transition_frequency_mhz(e_z, model):.4f} MHz"
        )
        return OdmrSpectrum(
            mw_frequencies_mhz=freqs,
            transfer_population=np.clip(np.array(populations), 0.0, 1.0),
        )
