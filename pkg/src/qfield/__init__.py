"""Quantized electromagnetic field on a discretized mode grid.

The package builds truncated multimode Fock spaces over 1D (direction,
polarization, frequency) or 3D (wave vector, polarization) mode grids,
exposes the electric/magnetic field observables and free-field Hamiltonian,
and ships a verification suite that checks the construction against
Maxwell's equations, the Heisenberg equation of motion and the
energy-functional/photon-number equivalence.
"""

from .fock import (
    MultiModeState,
    TruncationWarning,
    annihilate,
    commutator_test,
    create,
    fock_state,
    inner,
    state_from_json,
    state_to_json,
    vacuum,
)
from .hamiltonian import EnergyReport, apply_hamiltonian, energy_expectation, evolve, zero_point_energy
from .maxwell3d import (
    KGrid,
    KModeId,
    LatticeUniverse,
    divergence_check,
    field_expectation_3d,
    hamiltonian_3d_expectation,
    polarization_basis,
)
from .medium import Medium, dispersion_k, dispersion_omega, natural_units, vacuum_si
from .modes import (
    Direction,
    FrequencyGrid,
    GridUniverse,
    ModeId,
    continuum_to_grid_amplitude,
    enumerate_modes,
    mode_label,
    orthogonality_period,
    parse_mode_label,
)
from .observables import (
    FieldSample,
    ModeFunctionPair,
    PolarizationBasis1D,
    coherent_state,
    default_basis,
    field_expectation,
    field_profile,
    mode_functions,
    write_field_csv,
)
from .verify import ResidualReport, run_suite

__version__ = "0.1.0"
