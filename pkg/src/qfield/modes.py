"""Discretized photon modes for propagation along one axis.

Photons running along the x axis are labeled by a direction (L or R), a
polarization (1 or 2) and a positive angular frequency. The continuum of
frequencies is replaced by a uniform grid; grid ladder operators carry unit
commutators and relate to the delta-normalized continuum operators through
the factor returned by :func:`continuum_to_grid_amplitude`.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .medium import Medium


class Direction(enum.Enum):
    L = "L"
    R = "R"

    def __lt__(self, other: "Direction") -> bool:
        return self.value < other.value

    @property
    def sign(self) -> int:
        """Sign of the propagation axis: -1 for left-movers, +1 for right-movers."""
        return -1 if self is Direction.L else 1


POLARIZATIONS = (1, 2)


@dataclass(frozen=True, order=True)
class ModeId:
    """One photon mode: (direction, polarization, frequency-bin index)."""

    direction: Direction
    polarization: int
    freq_index: int

    def __post_init__(self) -> None:
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be 1 or 2, got {self.polarization}")
        if self.freq_index < 0:
            raise ValueError(f"freq_index must be >= 0, got {self.freq_index}")


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of strictly positive angular frequencies.

    omega_m = omega_min + m * delta_omega for m in [0, count).
    """

    omega_min: float
    delta_omega: float
    count: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega_min) and self.omega_min > 0):
            raise ValueError(f"omega_min must be > 0, got {self.omega_min}")
        if not (math.isfinite(self.delta_omega) and self.delta_omega > 0):
            raise ValueError(f"delta_omega must be > 0, got {self.delta_omega}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    def omega(self, index: int) -> float:
        if not 0 <= index < self.count:
            raise IndexError(f"frequency index {index} outside [0, {self.count})")
        return self.omega_min + index * self.delta_omega

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_min + self.delta_omega * np.arange(self.count)


def enumerate_modes(grid: FrequencyGrid) -> tuple[ModeId, ...]:
    """All 2*2*count modes of the grid in canonical (direction, pol, freq) order."""
    return tuple(
        ModeId(direction, pol, m)
        for direction in (Direction.L, Direction.R)
        for pol in POLARIZATIONS
        for m in range(grid.count)
    )


def continuum_to_grid_amplitude(grid: FrequencyGrid) -> float:
    """Scale factor 1/sqrt(delta_omega) between continuum and grid operators.

    A delta-normalized continuum operator evaluated on a grid point relates to
    the unit-commutator grid operator as a(omega_m) ~ a_m / sqrt(delta_omega),
    so that integrals over omega become plain sums over m.
    """
    return 1.0 / math.sqrt(grid.delta_omega)


def orthogonality_period(grid: FrequencyGrid, medium: Medium) -> float:
    """Spatial period D = 2*pi/Delta_k over which grid plane waves are orthogonal."""
    delta_k = medium.refractive_scale * grid.delta_omega
    return 2.0 * math.pi / delta_k


_LABEL_RE = re.compile(r"^([LR])([12])@ω=(.+)$")


def mode_label(mode: ModeId, grid: FrequencyGrid) -> str:
    """Serialized form of a mode, e.g. ``L1@ω=2.5``."""
    return f"{mode.direction.value}{mode.polarization}@ω={grid.omega(mode.freq_index)!r}"


def parse_mode_label(label: str, grid: FrequencyGrid) -> ModeId:
    """Inverse of :func:`mode_label`; the frequency must match a grid point exactly."""
    m = _LABEL_RE.match(label)
    if m is None:
        raise ValueError(f"not a mode label: {label!r}")
    omega = float(m.group(3))
    for index in range(grid.count):
        if grid.omega(index) == omega:
            return ModeId(Direction(m.group(1)), int(m.group(2)), index)
    raise ValueError(f"frequency {omega!r} is not on the grid")


@dataclass(frozen=True)
class GridUniverse:
    """Ordered universe of 1D modes backing multimode Fock states."""

    grid: FrequencyGrid

    @cached_property
    def modes(self) -> tuple[ModeId, ...]:
        return enumerate_modes(self.grid)

    @cached_property
    def _index(self) -> dict[ModeId, int]:
        return {mode: i for i, mode in enumerate(self.modes)}

    @property
    def size(self) -> int:
        return len(self.modes)

    def index(self, mode: ModeId) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise KeyError(f"mode {mode} not in this universe") from None

    def omegas(self, medium: Medium) -> np.ndarray:
        """Angular frequency of every mode, in canonical order."""
        return np.array([self.grid.omega(m.freq_index) for m in self.modes])

    def label(self, index: int) -> str:
        return mode_label(self.modes[index], self.grid)

    def mode_from_label(self, label: str) -> ModeId:
        return parse_mode_label(label, self.grid)
