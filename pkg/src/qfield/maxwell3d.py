"""Three-dimensional field quantization on a Cartesian wave-vector lattice.

Modes are labeled by an integer lattice vector (times the spacing Delta_k)
and a polarization; the lattice is symmetric under k -> -k and excludes the
origin. Field operators follow the exp(-i k.r) convention,

    E(r) = sum_k,lam  i (Dk)^{3/2} (2 pi)^{-3/2} sqrt(hbar w_k / 2 eps)
           e^{-i k.r} a_klam e_klam + h.c.

with B carrying the extra factor sqrt(eps*mu) and direction -(khat x e_klam).
Under this sign convention a coherent excitation of the mode labeled k
transports along -khat at speed 1/sqrt(eps*mu); Maxwell's equations hold
either way and are what the verification suite checks.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, TextIO

import numpy as np

from .fock import MultiModeState, first_moments, require_normalized, second_moments
from .hamiltonian import EnergyReport, energy_expectation, evolve
from .medium import Medium, dispersion_omega
from .observables import _quadratic_expectation, _fmt, _Moments

Z_HAT = np.array([0.0, 0.0, 1.0])
X_HAT = np.array([1.0, 0.0, 0.0])

_POLE_TOL = 1e-9


@dataclass(frozen=True)
class KGrid:
    """Cubic lattice of wave vectors: Delta_k * (i, j, l), 0 < max(|i|,|j|,|l|) <= N."""

    k_spacing: float
    half_extent: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.k_spacing) and self.k_spacing > 0):
            raise ValueError(f"k_spacing must be > 0, got {self.k_spacing}")
        if self.half_extent < 1:
            raise ValueError(f"half_extent must be >= 1, got {self.half_extent}")

    @property
    def lattice_points(self) -> tuple[tuple[int, int, int], ...]:
        n = self.half_extent
        return tuple(
            (i, j, l)
            for i in range(-n, n + 1)
            for j in range(-n, n + 1)
            for l in range(-n, n + 1)
            if (i, j, l) != (0, 0, 0)
        )


@dataclass(frozen=True, order=True)
class KModeId:
    """One lattice mode: integer wave-vector triple and polarization."""

    nx: int
    ny: int
    nz: int
    polarization: int

    def __post_init__(self) -> None:
        if self.polarization not in (1, 2):
            raise ValueError(f"polarization must be 1 or 2, got {self.polarization}")
        if (self.nx, self.ny, self.nz) == (0, 0, 0):
            raise ValueError("zero wave vector carries no propagating mode")

    def k_vector(self, grid: KGrid) -> np.ndarray:
        return grid.k_spacing * np.array([self.nx, self.ny, self.nz], dtype=float)


def polarization_basis(k: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic transverse orthonormal pair (e1, e2) with right-handed (e1, e2, khat).

    e1 = normalize(khat x zhat) away from the z axis, e1 = xhat on it;
    e2 = khat x e1.
    """
    k = np.asarray(k, dtype=float)
    norm = float(np.linalg.norm(k))
    if norm == 0.0:
        raise ValueError("polarization basis undefined for k = 0")
    khat = k / norm
    cross_z = np.cross(khat, Z_HAT)
    cross_norm = float(np.linalg.norm(cross_z))
    e1 = cross_z / cross_norm if cross_norm > _POLE_TOL else X_HAT.copy()
    e2 = np.cross(khat, e1)
    return e1, e2


@dataclass(frozen=True)
class LatticeUniverse:
    """Ordered universe of (k, polarization) modes over a KGrid."""

    grid: KGrid

    @cached_property
    def modes(self) -> tuple[KModeId, ...]:
        return tuple(
            KModeId(i, j, l, pol)
            for (i, j, l) in self.grid.lattice_points
            for pol in (1, 2)
        )

    @cached_property
    def _index(self) -> dict[KModeId, int]:
        return {mode: i for i, mode in enumerate(self.modes)}

    @property
    def size(self) -> int:
        return len(self.modes)

    def index(self, mode: KModeId) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise KeyError(f"mode {mode} not in this universe") from None

    @cached_property
    def k_vectors(self) -> np.ndarray:
        return np.array([m.k_vector(self.grid) for m in self.modes])

    def omegas(self, medium: Medium) -> np.ndarray:
        magnitudes = np.linalg.norm(self.k_vectors, axis=1)
        return np.array([dispersion_omega(medium, k) for k in magnitudes])

    def label(self, index: int) -> str:
        m = self.modes[index]
        return f"k[{m.nx},{m.ny},{m.nz}]p{m.polarization}"

    def mode_from_label(self, label: str) -> KModeId:
        match = re.match(r"^k\[(-?\d+),(-?\d+),(-?\d+)\]p([12])$", label)
        if match is None:
            raise ValueError(f"not a lattice mode label: {label!r}")
        return KModeId(int(match.group(1)), int(match.group(2)), int(match.group(3)), int(match.group(4)))


@dataclass(frozen=True)
class FieldSample3D:
    """Field expectation values at one (r, t) point."""

    e_field: np.ndarray
    b_field: np.ndarray
    r: np.ndarray
    t: float
    e_sq: float | None = None
    b_sq: float | None = None


def mode_geometry_3d(
    universe: LatticeUniverse, medium: Medium
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-mode amplitude i*C_k, wave vectors, E directions, B directions.

    C_k = (Delta_k)^{3/2} (2 pi)^{-3/2} sqrt(hbar*omega_k / (2 eps)); the B
    direction is -(khat x e), so that expectation values obey Maxwell's
    equations for every lattice mode.
    """
    omegas = universe.omegas(medium)
    kvecs = universe.k_vectors
    measure = universe.grid.k_spacing ** 1.5 / (2.0 * math.pi) ** 1.5
    n = universe.size
    amp = np.zeros(n, dtype=complex)
    evec = np.zeros((n, 3))
    bvec = np.zeros((n, 3))
    for i, mode in enumerate(universe.modes):
        e1, e2 = polarization_basis(kvecs[i])
        e = e1 if mode.polarization == 1 else e2
        khat = kvecs[i] / np.linalg.norm(kvecs[i])
        amp[i] = 1j * measure * math.sqrt(medium.hbar * omegas[i] / (2.0 * medium.epsilon))
        evec[i] = e
        bvec[i] = -np.cross(khat, e)
    return amp, kvecs, evec, bvec


def _coefficients_at_points(
    geometry: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    medium: Medium,
    points: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """E and B coefficient tensors of shape (points, modes, 3)."""
    amp, kvecs, evec, bvec = geometry
    phase = np.exp(-1j * points @ kvecs.T)
    f = phase * amp[None, :]
    e_coeff = f[:, :, None] * evec[None, :, :]
    b_coeff = (medium.refractive_scale * f)[:, :, None] * bvec[None, :, :]
    return e_coeff, b_coeff


def field_expectation_3d(
    state: MultiModeState,
    r: Sequence[float],
    t: float,
    medium: Medium,
    with_squares: bool = False,
) -> FieldSample3D:
    """<E(r)> and <B(r)> on the state evolved to time t."""
    require_normalized(state)
    geometry = mode_geometry_3d(state.universe, medium)
    psi = evolve(state, medium, t)
    m = first_moments(psi)
    point = np.asarray(r, dtype=float).reshape(1, 3)
    e_coeff, b_coeff = _coefficients_at_points(geometry, medium, point)
    e_field = 2.0 * np.real(m @ e_coeff[0])
    b_field = 2.0 * np.real(m @ b_coeff[0])
    e_sq = b_sq = None
    if with_squares:
        S, N = second_moments(psi)
        e_sq = _quadratic_expectation(e_coeff[0], S, N)
        b_sq = _quadratic_expectation(b_coeff[0], S, N)
    return FieldSample3D(
        e_field=e_field, b_field=b_field, r=np.asarray(r, dtype=float), t=t, e_sq=e_sq, b_sq=b_sq
    )


def fields_on_points(
    state: MultiModeState,
    points: np.ndarray,
    t: float,
    medium: Medium,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized <E>, <B> (points x 3) at one time; same values as pointwise calls."""
    require_normalized(state)
    geometry = mode_geometry_3d(state.universe, medium)
    psi = evolve(state, medium, t)
    m = first_moments(psi)
    amp, kvecs, evec, bvec = geometry
    phase = np.exp(-1j * points @ kvecs.T)
    weighted = phase * (amp * m)[None, :]
    e_field = 2.0 * np.real(weighted @ evec)
    b_field = 2.0 * np.real((medium.refractive_scale * weighted) @ bvec)
    return e_field, b_field


def hamiltonian_3d_expectation(state: MultiModeState, medium: Medium, include_zpe: bool = True) -> EnergyReport:
    """sum_k,lam hbar*omega_k <n_klam> plus the finite-lattice ZPE."""
    return energy_expectation(state, medium, include_zpe=include_zpe)


def divergence_check(
    state: MultiModeState,
    r_grid: tuple[np.ndarray, np.ndarray, np.ndarray],
    medium: Medium,
    t: float = 0.0,
) -> float:
    """Max central-difference |div| of <E> and <B>, normalized by the gradient scale.

    The grid must be uniform with at least three points per axis; a zero field
    returns 0 by convention.
    """
    axes = [np.asarray(a, dtype=float) for a in r_grid]
    shape = tuple(len(a) for a in axes)
    if any(n < 3 for n in shape):
        raise ValueError("need at least 3 points per axis for central differences")
    spacings = []
    for a in axes:
        steps = np.diff(a)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
            raise ValueError("sampling grid must be uniform")
        spacings.append(float(steps[0]))

    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    points = mesh.reshape(-1, 3)
    e_field, b_field = fields_on_points(state, points, t, medium)

    worst = 0.0
    for field in (e_field, b_field):
        f = field.reshape(*shape, 3)
        # partial[i][j] = d f_j / d r_i on the interior of the grid
        partial = np.empty((3, 3) + tuple(n - 2 for n in shape))
        for i in range(3):
            lo = [slice(1, -1)] * 3
            hi = [slice(1, -1)] * 3
            lo[i] = slice(0, -2)
            hi[i] = slice(2, None)
            for j in range(3):
                partial[i, j] = (f[tuple(hi) + (j,)] - f[tuple(lo) + (j,)]) / (2 * spacings[i])
        div = partial[0, 0] + partial[1, 1] + partial[2, 2]
        grad_scale = float(np.max(np.abs(partial)))
        if grad_scale == 0.0:
            continue
        worst = max(worst, float(np.max(np.abs(div))) / grad_scale)
    return worst


def field_profile_3d(
    state: MultiModeState,
    r_points: np.ndarray,
    t_grid: Sequence[float],
    medium: Medium,
    with_squares: bool = False,
) -> list[FieldSample3D]:
    """Samples over given positions (r-major) and times (minor)."""
    if len(r_points) == 0 or len(t_grid) == 0:
        raise ValueError("sampling grids must be nonempty")
    require_normalized(state)
    geometry = mode_geometry_3d(state.universe, medium)
    samples: list[FieldSample3D] = []
    per_time: list[tuple[float, _Moments]] = []
    for t in t_grid:
        psi = evolve(state, medium, t)
        m = first_moments(psi)
        if with_squares:
            S, N = second_moments(psi)
            per_time.append((t, _Moments(m=m, S=S, N=N)))
        else:
            per_time.append((t, _Moments(m=m)))
    points = np.asarray(r_points, dtype=float).reshape(-1, 3)
    e_coeff, b_coeff = _coefficients_at_points(geometry, medium, points)
    for p_index, r in enumerate(points):
        for t, moments in per_time:
            ec = e_coeff[p_index]
            bc = b_coeff[p_index]
            e_field = 2.0 * np.real(moments.m @ ec)
            b_field = 2.0 * np.real(moments.m @ bc)
            e_sq = b_sq = None
            if moments.S is not None:
                e_sq = _quadratic_expectation(ec, moments.S, moments.N)
                b_sq = _quadratic_expectation(bc, moments.S, moments.N)
            samples.append(
                FieldSample3D(e_field=e_field, b_field=b_field, r=r, t=t, e_sq=e_sq, b_sq=b_sq)
            )
    return samples


def write_field_csv_3d(samples: Sequence[FieldSample3D], stream: TextIO) -> None:
    """CSV with columns r_x,r_y,r_z,t,Ex,...,Bz and optional E2,B2 (%.17g)."""
    with_squares = bool(samples) and samples[0].e_sq is not None
    header = "r_x,r_y,r_z,t,Ex,Ey,Ez,Bx,By,Bz" + (",E2,B2" if with_squares else "")
    stream.write(header + "\n")
    for s in samples:
        row = [*s.r, s.t, *s.e_field, *s.b_field]
        if with_squares:
            row.extend([s.e_sq, s.b_sq])
        stream.write(",".join(_fmt(v) for v in row) + "\n")
