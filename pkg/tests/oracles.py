"""Independent reference implementations used to freeze expected test values.

Everything here is deliberately built from scratch (dense kron matrices,
direct series sums, raw finite differences) so the sparse library code is
checked against a second route, not against itself.
"""

from __future__ import annotations

import math

import numpy as np


class DenseFock:
    """Dense multimode ladder algebra on (cap+1)^n_modes dimensions."""

    def __init__(self, n_modes: int, cap: int):
        self.n_modes = n_modes
        self.cap = cap
        self.local = cap + 1
        self.dim = self.local**n_modes
        a_local = np.zeros((self.local, self.local), dtype=complex)
        for n in range(1, self.local):
            a_local[n - 1, n] = math.sqrt(n)
        eye = np.eye(self.local)
        self.a: list[np.ndarray] = []
        for i in range(n_modes):
            ops = [eye] * n_modes
            ops[i] = a_local
            m = ops[0]
            for op in ops[1:]:
                m = np.kron(m, op)
            self.a.append(m)

    def index(self, occupations: dict[int, int]) -> int:
        idx = 0
        for i in range(self.n_modes):
            n = occupations.get(i, 0)
            assert 0 <= n <= self.cap
            idx = idx * self.local + n
        return idx

    def vector(self, amplitudes: dict[tuple[tuple[int, int], ...], complex]) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        for occ, amp in amplitudes.items():
            v[self.index(dict(occ))] = amp
        return v

    def number(self, i: int) -> np.ndarray:
        return self.a[i].conj().T @ self.a[i]

    def hamiltonian(self, omegas, hbar: float = 1.0) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for i, omega in enumerate(omegas):
            h += hbar * omega * self.number(i)
        return h

    def field_operator(self, coefficients) -> np.ndarray:
        """sum_i c_i a_i + conj(c_i) a_i^dag as a dense matrix."""
        op = np.zeros((self.dim, self.dim), dtype=complex)
        for i, c in enumerate(coefficients):
            op += c * self.a[i] + np.conj(c) * self.a[i].conj().T
        return op


def poisson_truncated(alpha: complex, cap: int) -> tuple[np.ndarray, float]:
    """Renormalized truncated coherent amplitudes and the truncated tail mass."""
    coeffs = np.array(
        [
            math.exp(-abs(alpha) ** 2 / 2) * alpha**n / math.sqrt(math.factorial(n))
            for n in range(cap + 1)
        ],
        dtype=complex,
    )
    kept = float(np.sum(np.abs(coeffs) ** 2))
    return coeffs / math.sqrt(kept), 1.0 - kept


def coherent_mean_n(alpha: complex, cap: int) -> float:
    """<n> of the renormalized truncated coherent state, by direct series sum."""
    coeffs, _ = poisson_truncated(alpha, cap)
    return float(sum(n * abs(c) ** 2 for n, c in enumerate(coeffs)))


def coherent_mean_a(alpha: complex, cap: int) -> complex:
    """<a> of the renormalized truncated coherent state, by direct series sum."""
    coeffs, _ = poisson_truncated(alpha, cap)
    return complex(
        sum(np.conj(coeffs[n]) * coeffs[n + 1] * math.sqrt(n + 1) for n in range(cap))
    )


def closed_form_field_1d(
    alpha: complex,
    omega: float,
    direction: str,
    x: float,
    t: float,
    medium_epsilon: float = 1.0,
    medium_mu: float = 1.0,
    hbar: float = 1.0,
    area: float = 1.0,
    delta_omega: float = 1.0,
    polarization_vec=(0.0, 1.0, 0.0),
) -> tuple[np.ndarray, np.ndarray]:
    """<E>, <B> of a single-mode coherent state from the plane-wave closed form."""
    refr = math.sqrt(medium_epsilon * medium_mu)
    k = omega * refr
    kappa = math.sqrt(hbar * omega * (refr * delta_omega) / (4 * math.pi * medium_epsilon * area))
    sign = -1.0 if direction == "L" else 1.0
    scalar = 2.0 * (1j * kappa * np.exp(1j * sign * k * x) * alpha * np.exp(-1j * omega * t)).real
    e_dir = np.asarray(polarization_vec, dtype=float)
    b_dir = sign * np.cross([1.0, 0.0, 0.0], e_dir)
    return scalar * e_dir, refr * scalar * b_dir


def central_difference(f, x: float, dx: float) -> float:
    return (f(x + dx) - f(x - dx)) / (2 * dx)
