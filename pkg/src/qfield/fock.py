"""Truncated multimode Fock space with sparse state vectors.

States live over an ordered universe of modes (1D grid modes or 3D lattice
modes) and are stored as a sparse map from occupation tuples to complex
amplitudes. Each mode holds at most ``n_max`` photons; amplitude that a
creation operator would push past the cap is dropped and the lost squared
amplitude is tracked on the resulting state.

Ladder operators return unnormalized states, matching the raw sqrt(n)
algebra; callers normalize when they need a physical state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Any, Iterable

import numpy as np

# Occupation tuples: ((mode_index, photons), ...) sorted by mode index,
# entries with zero photons omitted.
OccupationTuple = tuple[tuple[int, int], ...]

VACUUM_OCC: OccupationTuple = ()

# Amplitudes below this fraction of the largest one are dropped after each
# operation; keeps the sparse map from accumulating rounding dust.
PRUNE_EPS = 1e-15

# Per-operation truncation loss above this squared-amplitude threshold is
# reported as a warning.
DEFAULT_LOSS_WARNING = 1e-10


class TruncationWarning(UserWarning):
    """A ladder operation dropped non-negligible amplitude at the photon cap."""


def occupation_of(occ: OccupationTuple, index: int) -> int:
    for i, n in occ:
        if i == index:
            return n
    return 0


def _with_occupation(occ: OccupationTuple, index: int, n: int) -> OccupationTuple:
    entries = [(i, c) for i, c in occ if i != index]
    if n:
        entries.append((index, n))
    entries.sort()
    return tuple(entries)


@dataclass(frozen=True, eq=False)
class MultiModeState:
    """Sparse complex vector over truncated multimode occupation tuples."""

    universe: Any
    n_max: int
    amplitudes: dict[OccupationTuple, complex]
    truncated_weight: float = 0.0

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def max_occupation(self) -> int:
        return max((n for occ in self.amplitudes for _, n in occ), default=0)

    def mode_indices(self) -> set[int]:
        """Indices of modes occupied in at least one basis tuple."""
        return {i for occ in self.amplitudes for i, _ in occ}

    def __repr__(self) -> str:  # keep test failures readable
        terms = len(self.amplitudes)
        return f"<MultiModeState {terms} tuples, n_max={self.n_max}, norm={self.norm:.6g}>"


def _prune(amplitudes: dict[OccupationTuple, complex]) -> tuple[dict[OccupationTuple, complex], float]:
    if not amplitudes:
        return {}, 0.0
    cutoff = PRUNE_EPS * max(abs(a) for a in amplitudes.values())
    kept: dict[OccupationTuple, complex] = {}
    lost = 0.0
    for occ, amp in amplitudes.items():
        if abs(amp) > cutoff:
            kept[occ] = amp
        else:
            lost += abs(amp) ** 2
    return kept, lost


def _same_universe(a: MultiModeState, b: MultiModeState) -> None:
    if a.universe is not b.universe and a.universe != b.universe:
        raise ValueError("states live over different mode universes")


def vacuum(universe: Any, n_max: int) -> MultiModeState:
    """The ground state |0>: all occupations zero, amplitude one."""
    return MultiModeState(universe, n_max, {VACUUM_OCC: 1.0 + 0.0j})


def fock_state(universe: Any, n_max: int, occupations: dict[Any, int]) -> MultiModeState:
    """Product number state with the given photons per mode (modes or indices)."""
    occ: OccupationTuple = VACUUM_OCC
    for mode, n in occupations.items():
        index = mode if isinstance(mode, int) else universe.index(mode)
        if not 0 <= n <= n_max:
            raise ValueError(f"occupation {n} outside [0, n_max={n_max}]")
        if occupation_of(occ, index):
            raise ValueError(f"mode index {index} listed twice")
        occ = _with_occupation(occ, index, n)
    return MultiModeState(universe, n_max, {occ: 1.0 + 0.0j})


def _resolve(universe: Any, mode: Any) -> int:
    return mode if isinstance(mode, int) else universe.index(mode)


def create(
    state: MultiModeState,
    mode: Any,
    loss_warning_threshold: float = DEFAULT_LOSS_WARNING,
) -> MultiModeState:
    """Apply the raising operator: |..n..> -> sqrt(n+1) |..n+1..| (unnormalized).

    Tuples that would exceed the cap are dropped; their squared amplitude is
    accumulated on the result and reported via TruncationWarning when it
    exceeds ``loss_warning_threshold``.
    """
    index = _resolve(state.universe, mode)
    out: dict[OccupationTuple, complex] = {}
    lost = 0.0
    for occ, amp in state.amplitudes.items():
        n = occupation_of(occ, index)
        if n + 1 > state.n_max:
            lost += abs(amp) ** 2
            continue
        new_occ = _with_occupation(occ, index, n + 1)
        out[new_occ] = out.get(new_occ, 0.0) + amp * math.sqrt(n + 1)
    if lost > loss_warning_threshold:
        warnings.warn(
            f"creation on mode index {index} dropped squared amplitude {lost:.3e} at cap "
            f"n_max={state.n_max}",
            TruncationWarning,
            stacklevel=2,
        )
    out, pruned = _prune(out)
    return MultiModeState(state.universe, state.n_max, out, state.truncated_weight + lost + pruned)


def annihilate(state: MultiModeState, mode: Any) -> MultiModeState:
    """Apply the lowering operator: |..n..> -> sqrt(n) |..n-1..> (unnormalized)."""
    index = _resolve(state.universe, mode)
    out: dict[OccupationTuple, complex] = {}
    for occ, amp in state.amplitudes.items():
        n = occupation_of(occ, index)
        if n == 0:
            continue
        new_occ = _with_occupation(occ, index, n - 1)
        out[new_occ] = out.get(new_occ, 0.0) + amp * math.sqrt(n)
    out, pruned = _prune(out)
    return MultiModeState(state.universe, state.n_max, out, state.truncated_weight + pruned)


def inner(a: MultiModeState, b: MultiModeState) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    _same_universe(a, b)
    if len(a.amplitudes) > len(b.amplitudes):
        return complex(np.conj(inner(b, a)))
    total = 0.0 + 0.0j
    for occ, amp in a.amplitudes.items():
        other = b.amplitudes.get(occ)
        if other is not None:
            total += amp.conjugate() * other
    return total


def scale(state: MultiModeState, factor: complex) -> MultiModeState:
    return replace(
        state,
        amplitudes={occ: factor * amp for occ, amp in state.amplitudes.items()},
    )


def add(a: MultiModeState, b: MultiModeState, ca: complex = 1.0, cb: complex = 1.0) -> MultiModeState:
    """Linear combination ca*a + cb*b (unnormalized)."""
    _same_universe(a, b)
    if a.n_max != b.n_max:
        raise ValueError("states have different photon caps")
    out = {occ: ca * amp for occ, amp in a.amplitudes.items()}
    for occ, amp in b.amplitudes.items():
        out[occ] = out.get(occ, 0.0) + cb * amp
    out, pruned = _prune(out)
    return MultiModeState(a.universe, a.n_max, out, a.truncated_weight + b.truncated_weight + pruned)


def normalized(state: MultiModeState) -> MultiModeState:
    n = state.norm
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return scale(state, 1.0 / n)


def require_normalized(state: MultiModeState, tol: float = 1e-8) -> None:
    if abs(state.norm - 1.0) > tol:
        raise ValueError(f"state is not normalized: ||psi|| = {state.norm!r}")


def with_cap(state: MultiModeState, n_max: int) -> MultiModeState:
    """Same amplitudes under a different cap (must not truncate)."""
    if state.max_occupation() > n_max:
        raise ValueError("cap increase only; lowering would truncate")
    return replace(state, n_max=n_max)


def mode_occupation(state: MultiModeState, mode: Any) -> float:
    """Expectation of the number operator of one mode, <a_m^dag a_m>."""
    index = _resolve(state.universe, mode)
    return sum(occupation_of(occ, index) * abs(amp) ** 2 for occ, amp in state.amplitudes.items())


def total_photons(state: MultiModeState) -> float:
    return sum(sum(n for _, n in occ) * abs(amp) ** 2 for occ, amp in state.amplitudes.items())


def commutator_test(mode_a: Any, mode_b: Any, probe: MultiModeState) -> complex:
    """<probe| [a_a, a_b^dag] |probe>; equals delta_ab for probes below the cap.

    Probes touching the cap are rejected: the finite-dimensional identity
    provably fails there.
    """
    if probe.max_occupation() >= probe.n_max:
        raise ValueError("probe touches the photon cap; commutator identity would be corrupted")
    forward = annihilate(create(probe, mode_b), mode_a)
    backward = create(annihilate(probe, mode_a), mode_b)
    return inner(probe, add(forward, backward, 1.0, -1.0))


def first_moments(state: MultiModeState) -> np.ndarray:
    """<a_i> for every mode i in canonical order."""
    out = np.zeros(state.universe.size, dtype=complex)
    for i in sorted(state.mode_indices()):
        out[i] = inner(state, annihilate(state, i))
    return out


def second_moments(state: MultiModeState) -> tuple[np.ndarray, np.ndarray]:
    """Matrices S_ij = <a_i a_j> and N_ij = <a_i^dag a_j>.

    Both are exact on the truncated state: only lowering operators are
    applied. S is symmetric, N Hermitian with real diagonal <n_i>.
    """
    size = state.universe.size
    S = np.zeros((size, size), dtype=complex)
    N = np.zeros((size, size), dtype=complex)
    active = sorted(state.mode_indices())
    lowered = {i: annihilate(state, i) for i in active}
    for i in active:
        for j in active:
            if j <= i:
                S[i, j] = inner(state, annihilate(lowered[j], i))
                S[j, i] = S[i, j]
            N[i, j] = inner(lowered[i], lowered[j])
    return S, N


def apply_linear_combination(state: MultiModeState, coefficients: np.ndarray) -> MultiModeState:
    """Apply sum_i (c_i a_i + conj(c_i) a_i^dag) with one extra unit of headroom.

    The result lives under cap n_max + 1 so a single application is exact for
    any in-cap input; used for quadratic observables and commutators.
    """
    lifted = with_cap(state, state.n_max + 1)
    terms: dict[OccupationTuple, complex] = {}
    for i, c in enumerate(coefficients):
        if c == 0:
            continue
        part = add(scale(annihilate(lifted, i), c), scale(create(lifted, i), np.conj(c)))
        for occ, amp in part.amplitudes.items():
            terms[occ] = terms.get(occ, 0.0) + amp
    terms, pruned = _prune(terms)
    return MultiModeState(state.universe, state.n_max + 1, terms, state.truncated_weight + pruned)


def random_state(
    universe: Any,
    n_max: int,
    rng: np.random.Generator,
    modes: Iterable[int] | None = None,
    max_terms: int = 8,
    max_occupation: int | None = None,
) -> MultiModeState:
    """Normalized pseudo-random state, by default kept strictly below the cap."""
    indices = list(modes) if modes is not None else list(range(universe.size))
    cap = n_max - 1 if max_occupation is None else max_occupation
    if cap < 0:
        raise ValueError("no room below the cap")
    amplitudes: dict[OccupationTuple, complex] = {}
    n_terms = int(rng.integers(1, max_terms + 1))
    for _ in range(n_terms):
        occ: OccupationTuple = VACUUM_OCC
        for i in indices:
            n = int(rng.integers(0, cap + 1))
            if n:
                occ = _with_occupation(occ, i, n)
        amplitudes[occ] = complex(rng.normal(), rng.normal())
    state = MultiModeState(universe, n_max, amplitudes)
    return normalized(state)


# --- JSON serialization -----------------------------------------------------
#
# A state document is a list of rows:
#   {"occupations": [[mode-label, count], ...], "re": float, "im": float}
# sorted canonically; float64 values round-trip exactly through json.


def state_to_json(state: MultiModeState) -> list[dict[str, Any]]:
    rows = []
    for occ in sorted(state.amplitudes):
        amp = complex(state.amplitudes[occ])
        rows.append(
            {
                "occupations": [[state.universe.label(i), n] for i, n in occ],
                "re": amp.real,
                "im": amp.imag,
            }
        )
    return rows


def state_from_json(document: list[dict[str, Any]], universe: Any, n_max: int) -> MultiModeState:
    amplitudes: dict[OccupationTuple, complex] = {}
    for row in document:
        occ: OccupationTuple = VACUUM_OCC
        for label, n in row["occupations"]:
            index = universe.index(universe.mode_from_label(label))
            occ = _with_occupation(occ, index, int(n))
        if occ in amplitudes:
            raise ValueError(f"duplicate occupation tuple in document: {occ}")
        amplitudes[occ] = complex(row["re"], row["im"])
    return MultiModeState(universe, n_max, amplitudes)
