"""Electric and magnetic field observables for 1D propagation.

Every mode (X, lambda, omega_m) contributes a plane-wave coefficient pair
(f, g) to the field operators,

    E(x) = sum_modes f(x) a + h.c.   (along e_lambda)
    B(x) = sum_modes g(x) a + h.c.   (along sign(X) * x_hat x e_lambda)

with f = i*kappa*exp(i*sign(X)*k*x), g = sqrt(eps*mu)*f and the per-mode
amplitude kappa = sqrt(hbar*omega*Delta_k / (4*pi*eps*A)). The magnetic
direction follows the right-hand rule of the propagation direction, which is
what makes the expectation values solve Maxwell's equations for both left-
and right-movers. Time dependence enters by evolving the state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence, TextIO

import numpy as np

from .fock import (
    MultiModeState,
    first_moments,
    normalized,
    require_normalized,
    second_moments,
    vacuum,
    _with_occupation,
    VACUUM_OCC,
    OccupationTuple,
)
from .hamiltonian import evolve
from .medium import Medium, dispersion_k
from .modes import Direction, FrequencyGrid, GridUniverse, ModeId

X_HAT = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class PolarizationBasis1D:
    """Two unit vectors orthogonal to x and to each other."""

    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self) -> None:
        for name, e in (("e1", self.e1), ("e2", self.e2)):
            if abs(np.linalg.norm(e) - 1.0) > 1e-12:
                raise ValueError(f"{name} is not a unit vector")
            if abs(float(e[0])) > 1e-12:
                raise ValueError(f"{name} is not orthogonal to the x axis")
        if abs(float(self.e1 @ self.e2)) > 1e-12:
            raise ValueError("e1 and e2 are not orthogonal")

    def vector(self, polarization: int) -> np.ndarray:
        return self.e1 if polarization == 1 else self.e2


def default_basis() -> PolarizationBasis1D:
    """e1 along y, e2 along z."""
    return PolarizationBasis1D(np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]))


@dataclass(frozen=True)
class ModeFunctionPair:
    """Electric (f) and magnetic (g) coefficient of one mode at one position."""

    f: complex
    g: complex
    mode: ModeId
    x: float


@dataclass(frozen=True)
class FieldSample:
    """Field expectation values at one space-time point."""

    e_field: np.ndarray
    b_field: np.ndarray
    x: float
    t: float
    e_sq: float | None = None
    b_sq: float | None = None


def _kappa(omega: float, medium: Medium, grid: FrequencyGrid) -> float:
    """Per-mode field amplitude sqrt(hbar*omega*Delta_k/(4*pi*eps*A)).

    Delta_k = sqrt(eps*mu)*Delta_omega is the k-space measure of one grid bin;
    with it, the spatial energy functional reproduces hbar*omega per photon in
    any medium (and the amplitude reduces to sqrt(hbar*omega*Delta_omega/4piA)
    in natural units).
    """
    delta_k = medium.refractive_scale * grid.delta_omega
    return math.sqrt(medium.hbar * omega * delta_k / (4.0 * math.pi * medium.epsilon * medium.area))


def mode_functions(
    mode: ModeId,
    x: float,
    medium: Medium,
    grid: FrequencyGrid,
    branch_check: bool = False,
) -> ModeFunctionPair:
    """Plane-wave coefficients (f, g) of one mode at position x.

    L modes carry exp(-i*k*x), R modes exp(+i*k*x); both satisfy the
    first-order consistency system d_x f = -+ i*omega*g,
    d_x g = -+ i*eps*mu*omega*f (upper sign for L). With ``branch_check`` the
    residuals of that system are verified in closed form and by central
    differences before returning.
    """
    omega = grid.omega(mode.freq_index)
    k = dispersion_k(medium, omega)
    sign = mode.direction.sign
    f = 1j * _kappa(omega, medium, grid) * np.exp(1j * sign * k * x)
    g = medium.refractive_scale * f
    if branch_check:
        scale = abs(omega * f)
        dfdx = 1j * sign * k * f
        dgdx = 1j * sign * k * g
        res_f = abs(dfdx - sign * 1j * omega * g)
        res_g = abs(dgdx - sign * 1j * medium.epsilon * medium.mu * omega * f)
        if max(res_f, res_g) > 1e-12 * scale:
            raise ValueError(f"analytic mode-function residual {max(res_f, res_g):.3e} too large")
        dx = 1e-3 / k if k > 0 else 1e-3
        fp = 1j * _kappa(omega, medium, grid) * np.exp(1j * sign * k * (x + dx))
        fm = 1j * _kappa(omega, medium, grid) * np.exp(1j * sign * k * (x - dx))
        fd_res = abs((fp - fm) / (2 * dx) - sign * 1j * omega * g)
        if fd_res > max(1e-12, (k * dx) ** 2) * scale * max(1.0, medium.refractive_scale):
            raise ValueError(f"finite-difference mode-function residual {fd_res:.3e} too large")
    return ModeFunctionPair(f=complex(f), g=complex(g), mode=mode, x=x)


def _mode_geometry(
    universe: GridUniverse, medium: Medium, basis: PolarizationBasis1D
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-mode amplitude i*kappa, signed wave number, E direction, B direction."""
    n = universe.size
    amp = np.zeros(n, dtype=complex)
    wave = np.zeros(n)
    evec = np.zeros((n, 3))
    bvec = np.zeros((n, 3))
    for i, mode in enumerate(universe.modes):
        omega = universe.grid.omega(mode.freq_index)
        k = dispersion_k(medium, omega)
        sign = mode.direction.sign
        amp[i] = 1j * _kappa(omega, medium, universe.grid)
        wave[i] = sign * k
        e = basis.vector(mode.polarization)
        evec[i] = e
        bvec[i] = sign * np.cross(X_HAT, e)
    return amp, wave, evec, bvec


def _coefficients_at(
    geometry: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    medium: Medium,
    x: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Complex vector coefficients (modes x 3) of E and B at position x."""
    amp, wave, evec, bvec = geometry
    f = amp * np.exp(1j * wave * x)
    e_coeff = f[:, None] * evec
    b_coeff = (medium.refractive_scale * f)[:, None] * bvec
    return e_coeff, b_coeff


def _quadratic_expectation(coeff: np.ndarray, S: np.ndarray, N: np.ndarray) -> float:
    """<(sum_i c_i a_i + h.c.)^2> summed over the three axes, vacuum term included."""
    s_part = np.einsum("ia,ij,ja->", coeff, S, coeff)
    n_part = np.einsum("ia,ij,ja->", coeff.conj(), N, coeff)
    vac = float(np.sum(np.abs(coeff) ** 2))
    return float(2.0 * s_part.real + 2.0 * n_part.real + vac)


@dataclass(frozen=True)
class _Moments:
    m: np.ndarray
    S: np.ndarray | None = None
    N: np.ndarray | None = None


def _moments_at(state: MultiModeState, medium: Medium, t: float, with_squares: bool) -> _Moments:
    psi = evolve(state, medium, t)
    m = first_moments(psi)
    if not with_squares:
        return _Moments(m=m)
    S, N = second_moments(psi)
    return _Moments(m=m, S=S, N=N)


def _sample_at(
    geometry: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    medium: Medium,
    moments: _Moments,
    x: float,
    t: float,
) -> FieldSample:
    e_coeff, b_coeff = _coefficients_at(geometry, medium, x)
    e_field = 2.0 * np.real(moments.m @ e_coeff)
    b_field = 2.0 * np.real(moments.m @ b_coeff)
    e_sq = b_sq = None
    if moments.S is not None:
        e_sq = _quadratic_expectation(e_coeff, moments.S, moments.N)
        b_sq = _quadratic_expectation(b_coeff, moments.S, moments.N)
    return FieldSample(e_field=e_field, b_field=b_field, x=x, t=t, e_sq=e_sq, b_sq=b_sq)


def field_expectation(
    state: MultiModeState,
    x: float,
    t: float,
    medium: Medium,
    basis: PolarizationBasis1D | None = None,
    with_squares: bool = False,
) -> FieldSample:
    """<E(x)> and <B(x)> on the state evolved to time t.

    With ``with_squares`` the sample additionally carries <E.E> and <B.B>,
    vacuum contributions included.
    """
    require_normalized(state)
    basis = basis or default_basis()
    geometry = _mode_geometry(state.universe, medium, basis)
    moments = _moments_at(state, medium, t, with_squares)
    return _sample_at(geometry, medium, moments, x, t)


def field_profile(
    state: MultiModeState,
    x_grid: Sequence[float],
    t_grid: Sequence[float],
    medium: Medium,
    basis: PolarizationBasis1D | None = None,
    with_squares: bool = False,
) -> list[FieldSample]:
    """Field samples over a space-time grid, x-major, t-minor.

    Values are identical to pointwise :func:`field_expectation` calls; the
    state is evolved once per time rather than once per sample.
    """
    if len(x_grid) == 0 or len(t_grid) == 0:
        raise ValueError("sampling grids must be nonempty")
    if any(b <= a for a, b in zip(x_grid, list(x_grid)[1:])):
        raise ValueError("x grid must be strictly increasing")
    if any(b <= a for a, b in zip(t_grid, list(t_grid)[1:])):
        raise ValueError("t grid must be strictly increasing")
    require_normalized(state)
    basis = basis or default_basis()
    geometry = _mode_geometry(state.universe, medium, basis)
    per_time = [_moments_at(state, medium, t, with_squares) for t in t_grid]
    return [
        _sample_at(geometry, medium, moments, x, t)
        for x in x_grid
        for t, moments in zip(t_grid, per_time)
    ]


def coherent_state(
    universe: Any,
    n_max: int,
    amplitudes: Iterable[tuple[Any, complex]] | dict[Any, complex],
    loss_budget: float = 1e-8,
) -> MultiModeState:
    """Product coherent state with <a_m> = alpha_m, built as truncated Poisson series.

    The state is renormalized after the cap; construction is rejected when the
    total truncated probability exceeds ``loss_budget``, reporting the cap
    that would suffice.
    """
    items = list(amplitudes.items()) if isinstance(amplitudes, dict) else list(amplitudes)
    resolved: list[tuple[int, complex]] = []
    seen: set[int] = set()
    for mode, alpha in items:
        index = mode if isinstance(mode, int) else universe.index(mode)
        if index in seen:
            raise ValueError(f"mode index {index} listed twice")
        seen.add(index)
        resolved.append((index, complex(alpha)))

    total_kept = 1.0
    per_mode: list[tuple[int, np.ndarray]] = []
    for index, alpha in resolved:
        weights = np.array(
            [abs(alpha) ** (2 * n) / math.factorial(n) for n in range(n_max + 1)]
        )
        kept = math.exp(-abs(alpha) ** 2) * float(np.sum(weights))
        total_kept *= min(kept, 1.0)
        coeffs = np.array(
            [
                math.exp(-abs(alpha) ** 2 / 2.0) * alpha**n / math.sqrt(math.factorial(n))
                for n in range(n_max + 1)
            ],
            dtype=complex,
        )
        per_mode.append((index, coeffs))
    loss = 1.0 - total_kept
    if loss > loss_budget:
        needed = _required_cap(resolved, loss_budget)
        raise ValueError(
            f"coherent-state truncation loss {loss:.3e} exceeds budget {loss_budget:.3e}; "
            f"n_max >= {needed} would suffice"
        )

    amplitudes_map: dict[OccupationTuple, complex] = {VACUUM_OCC: 1.0 + 0.0j}
    for index, coeffs in per_mode:
        grown: dict[OccupationTuple, complex] = {}
        for occ, amp in amplitudes_map.items():
            for n, c in enumerate(coeffs):
                if c == 0:
                    continue
                grown[_with_occupation(occ, index, n)] = amp * c
        amplitudes_map = grown

    state = MultiModeState(universe, n_max, amplitudes_map, truncated_weight=max(loss, 0.0))
    if not state.amplitudes:
        return vacuum(universe, n_max)
    return normalized(state)


def _required_cap(resolved: list[tuple[int, complex]], budget: float) -> int:
    """Smallest per-mode cap whose combined Poisson tail fits the budget."""
    per_mode_budget = budget / max(len(resolved), 1)
    worst = 0
    for _, alpha in resolved:
        mean = abs(alpha) ** 2
        term = math.exp(-mean)
        cumulative = term
        cap = 0
        while 1.0 - cumulative > per_mode_budget and cap < 1000:
            cap += 1
            term *= mean / cap
            cumulative += term
        worst = max(worst, cap)
    return worst


def _fmt(value: float) -> str:
    return "%.17g" % value


def write_field_csv(samples: Sequence[FieldSample], stream: TextIO) -> None:
    """CSV with columns x,t,Ex,Ey,Ez,Bx,By,Bz and, when present, E2,B2.

    All values use %.17g so float64 round-trips exactly.
    """
    with_squares = bool(samples) and samples[0].e_sq is not None
    header = "x,t,Ex,Ey,Ez,Bx,By,Bz" + (",E2,B2" if with_squares else "")
    stream.write(header + "\n")
    for s in samples:
        row = [s.x, s.t, *s.e_field, *s.b_field]
        if with_squares:
            row.extend([s.e_sq, s.b_sq])
        stream.write(",".join(_fmt(v) for v in row) + "\n")
