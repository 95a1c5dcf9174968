"""Physical constants of the host medium and its dispersion relation.

The medium is non-dispersive, non-absorbing and homogeneous: it is fully
described by a permittivity, a permeability, the reduced Planck constant and
the transverse quantization area. Plane waves in such a medium obey the
linear dispersion relation omega = k / sqrt(epsilon * mu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# SI values (exact/CODATA); used only by the vacuum preset.
_EPSILON_0 = 8.8541878128e-12  # F/m
_MU_0 = 1.25663706212e-6       # H/m
_HBAR = 1.054571817e-34        # J s


@dataclass(frozen=True)
class Medium:
    """Immutable bundle of medium constants.

    epsilon, mu : absolute permittivity and permeability
    hbar        : reduced Planck constant in the working unit system
    area        : transverse area A over which the 1D field energy is defined
    """

    epsilon: float
    mu: float
    hbar: float
    area: float

    def __post_init__(self) -> None:
        for name in ("epsilon", "mu", "hbar", "area"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"Medium.{name} must be a finite positive number, got {value!r}")

    @property
    def phase_speed(self) -> float:
        """Propagation speed 1/sqrt(epsilon*mu)."""
        return 1.0 / math.sqrt(self.epsilon * self.mu)

    @property
    def refractive_scale(self) -> float:
        """sqrt(epsilon*mu), the ratio k/omega."""
        return math.sqrt(self.epsilon * self.mu)


def natural_units() -> Medium:
    """Medium with hbar = epsilon = mu = A = 1 (default for verification runs)."""
    return Medium(epsilon=1.0, mu=1.0, hbar=1.0, area=1.0)


def vacuum_si(area: float = 1.0) -> Medium:
    """Free space in SI units with a given transverse area in m^2."""
    return Medium(epsilon=_EPSILON_0, mu=_MU_0, hbar=_HBAR, area=area)


def dispersion_omega(medium: Medium, k_magnitude: float) -> float:
    """Angular frequency of a plane wave with wave number ``k_magnitude``."""
    if k_magnitude < 0:
        raise ValueError(f"wave number must be >= 0, got {k_magnitude}")
    return k_magnitude / medium.refractive_scale


def dispersion_k(medium: Medium, omega: float) -> float:
    """Wave number of a plane wave with angular frequency ``omega``.

    Inverse of :func:`dispersion_omega`.
    """
    if omega < 0:
        raise ValueError(f"angular frequency must be >= 0, got {omega}")
    return omega * medium.refractive_scale
