"""Free-field Hamiltonian on the mode grid and exact time evolution.

The Hamiltonian is diagonal in the occupation basis: each tuple carries the
excitation energy sum_m hbar*omega_m*n_m. The zero-point energy is kept as a
scalar side channel (finite only because the grid is finite) and is never
mixed into operator applications. Time evolution is the exact diagonal phase
rotation, not a numerical integrator.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .fock import MultiModeState, require_normalized
from .medium import Medium


@dataclass(frozen=True)
class EnergyReport:
    """Energy split into excitation part and grid zero-point energy."""

    excitation_energy: float
    zero_point_energy: float
    total: float


def _tuple_frequency_sum(occ, omegas: np.ndarray) -> float:
    """sum_m omega_m n_m for one occupation tuple."""
    return float(sum(omegas[i] * n for i, n in occ))


def zero_point_energy(universe: Any, medium: Medium) -> float:
    """sum over all enumerated modes of hbar*omega/2."""
    return float(0.5 * medium.hbar * np.sum(universe.omegas(medium)))


def apply_hamiltonian(state: MultiModeState, medium: Medium) -> MultiModeState:
    """Excitation part of H applied to the state (ZPE handled separately)."""
    omegas = state.universe.omegas(medium)
    return replace(
        state,
        amplitudes={
            occ: amp * medium.hbar * _tuple_frequency_sum(occ, omegas)
            for occ, amp in state.amplitudes.items()
        },
    )


def energy_expectation(state: MultiModeState, medium: Medium, include_zpe: bool = True) -> EnergyReport:
    """<H> split into sum hbar*omega_m <n_m> and the grid ZPE.

    ``total`` includes the ZPE only when ``include_zpe`` is set; the
    zero-point value itself depends on grid and medium alone.
    """
    require_normalized(state)
    omegas = state.universe.omegas(medium)
    excitation = medium.hbar * sum(
        _tuple_frequency_sum(occ, omegas) * abs(amp) ** 2
        for occ, amp in state.amplitudes.items()
    )
    zpe = zero_point_energy(state.universe, medium)
    return EnergyReport(
        excitation_energy=float(excitation),
        zero_point_energy=zpe,
        total=float(excitation + (zpe if include_zpe else 0.0)),
    )


def evolve(state: MultiModeState, medium: Medium, t: float) -> MultiModeState:
    """Schrodinger evolution by the diagonal Hamiltonian for time t.

    Each tuple picks up exp(-i * sum_m omega_m n_m * t); hbar cancels in the
    phase. Norm is exactly preserved and evolve(t1) o evolve(t2) = evolve(t1+t2).
    """
    omegas = state.universe.omegas(medium)
    return replace(
        state,
        amplitudes={
            occ: amp * cmath.exp(-1j * _tuple_frequency_sum(occ, omegas) * t)
            for occ, amp in state.amplitudes.items()
        },
    )
