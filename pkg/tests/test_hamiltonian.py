import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfield.fock import add, fock_state, inner, normalized, random_state, vacuum
from qfield.hamiltonian import (
    apply_hamiltonian,
    energy_expectation,
    evolve,
    zero_point_energy,
)
from qfield.medium import Medium, natural_units
from qfield.modes import Direction, FrequencyGrid, GridUniverse, ModeId
from qfield.observables import coherent_state

from oracles import DenseFock, coherent_mean_n


@pytest.fixture
def universe3():
    # omegas 1, 2, 3
    return GridUniverse(FrequencyGrid(1.0, 1.0, 3))


def test_apply_hamiltonian_on_vacuum(universe3, medium):
    out = apply_hamiltonian(vacuum(universe3, 2), medium)
    assert all(amp == 0 for amp in out.amplitudes.values())


def test_apply_hamiltonian_single_photon(universe3, medium):
    mode = ModeId(Direction.L, 1, 1)  # omega = 2
    state = fock_state(universe3, 2, {mode: 1})
    out = apply_hamiltonian(state, medium)
    (amp,) = out.amplitudes.values()
    assert amp == pytest.approx(2.0)


def test_apply_hamiltonian_superposition_hand_sum(universe3, medium):
    # (|1_a> + |2_b>)/sqrt(2) with omega_a = 1, omega_b = 3 -> (1|1_a> + 6|2_b>)/sqrt(2)
    a = ModeId(Direction.L, 1, 0)
    b = ModeId(Direction.R, 2, 2)
    psi = normalized(
        add(fock_state(universe3, 3, {a: 1}), fock_state(universe3, 3, {b: 2}), 1.0, 1.0)
    )
    out = apply_hamiltonian(psi, medium)
    ia, ib = universe3.index(a), universe3.index(b)
    assert out.amplitudes[((ia, 1),)] == pytest.approx(1.0 / math.sqrt(2))
    assert out.amplitudes[((ib, 2),)] == pytest.approx(6.0 / math.sqrt(2))


def test_energy_vacuum_zero(universe3, medium):
    report = energy_expectation(vacuum(universe3, 2), medium, include_zpe=False)
    assert report.excitation_energy == 0.0
    assert report.total == 0.0


def test_energy_fock_example(universe3, medium):
    # |3> at omega = 2 -> 6
    state = fock_state(universe3, 3, {ModeId(Direction.R, 1, 1): 3})
    report = energy_expectation(state, medium, include_zpe=False)
    assert report.excitation_energy == pytest.approx(6.0, rel=1e-14)


def test_energy_scales_with_hbar(universe3):
    med = Medium(epsilon=1.0, mu=1.0, hbar=2.5, area=1.0)
    state = fock_state(universe3, 2, {ModeId(Direction.L, 1, 0): 2})
    report = energy_expectation(state, med, include_zpe=False)
    assert report.excitation_energy == pytest.approx(5.0, rel=1e-14)


def test_energy_coherent_against_series_oracle(universe1, medium):
    cap = 40
    alpha = 1.5
    state = coherent_state(universe1, cap, [(ModeId(Direction.L, 1, 0), alpha)])
    report = energy_expectation(state, medium, include_zpe=False)
    oracle = coherent_mean_n(alpha, cap)  # hbar*omega = 1
    assert report.excitation_energy == pytest.approx(oracle, rel=1e-12)
    assert report.excitation_energy == pytest.approx(abs(alpha) ** 2, rel=1e-10)


def test_zero_point_energy_depends_only_on_grid(universe3, medium):
    zpe = zero_point_energy(universe3, medium)
    # 4 labels per frequency, omegas 1, 2, 3
    assert zpe == pytest.approx(0.5 * 4 * (1 + 2 + 3), rel=1e-14)
    report_a = energy_expectation(vacuum(universe3, 2), medium)
    report_b = energy_expectation(fock_state(universe3, 2, {0: 1}), medium)
    assert report_a.zero_point_energy == report_b.zero_point_energy == zpe


def test_energy_rejects_unnormalized(universe3, medium):
    bad = add(vacuum(universe3, 2), vacuum(universe3, 2), 1.0, 1.0)  # norm 2
    with pytest.raises(ValueError):
        energy_expectation(bad, medium)


def test_evolve_vacuum_invariant(universe3, medium):
    vac = vacuum(universe3, 2)
    out = evolve(vac, medium, 17.3)
    assert out.amplitudes == {(): pytest.approx(1.0)}


def test_evolve_periodicity(universe3, medium):
    mode = ModeId(Direction.L, 1, 1)  # omega = 2
    psi = fock_state(universe3, 2, {mode: 1})
    out = evolve(psi, medium, 2 * math.pi / 2.0)
    assert abs(inner(psi, out)) == pytest.approx(1.0, abs=1e-13)


@given(t=st.floats(min_value=1e-3, max_value=1e3))
def test_evolve_norm_preserved(t, universe3, medium):
    rng = np.random.default_rng(12)
    psi = random_state(universe3, 3, rng, modes=[0, 1, 2])
    assert abs(evolve(psi, medium, t).norm - 1.0) <= 1e-13


def test_evolve_group_law(universe3, medium):
    rng = np.random.default_rng(9)
    psi = random_state(universe3, 3, rng)
    one = evolve(evolve(psi, medium, 0.7), medium, 1.9)
    two = evolve(psi, medium, 2.6)
    fidelity = abs(inner(one, two))
    assert fidelity == pytest.approx(1.0, abs=1e-12)
    # amplitudes agree, not only up to phase
    for occ, amp in one.amplitudes.items():
        assert amp == pytest.approx(two.amplitudes[occ], abs=1e-12)


def test_occupations_constant_under_evolution(universe3, medium):
    from qfield.fock import mode_occupation

    rng = np.random.default_rng(21)
    psi = random_state(universe3, 3, rng)
    for t in (0.1, 1.0, 10.0, 100.0):
        rolled = evolve(psi, medium, t)
        for i in range(universe3.size):
            assert mode_occupation(rolled, i) == pytest.approx(
                mode_occupation(psi, i), abs=1e-14
            )


def test_energy_conserved_under_evolution(universe3, medium):
    rng = np.random.default_rng(33)
    psi = random_state(universe3, 3, rng)
    before = energy_expectation(psi, medium).total
    after = energy_expectation(evolve(psi, medium, 7.7), medium).total
    assert after == pytest.approx(before, rel=1e-12)


def test_hermiticity_against_dense_oracle(universe1, medium):
    cap = 4
    dense = DenseFock(universe1.size, cap)
    h_dense = dense.hamiltonian(universe1.omegas(medium))
    rng = np.random.default_rng(14)
    for _ in range(10):
        phi = random_state(universe1, cap, rng, modes=[0, 1])
        psi = random_state(universe1, cap, rng, modes=[0, 1])
        lhs = inner(phi, apply_hamiltonian(psi, medium))
        rhs = np.conj(inner(psi, apply_hamiltonian(phi, medium)))
        assert lhs == pytest.approx(rhs, abs=1e-12)
        # cross-check one side against the dense matrix
        vp, vq = dense.vector(phi.amplitudes), dense.vector(psi.amplitudes)
        assert lhs == pytest.approx(complex(vp.conj() @ (h_dense @ vq)), abs=1e-12)


def test_evolve_against_dense_oracle(universe1, medium):
    cap = 3
    dense = DenseFock(universe1.size, cap)
    h_dense = dense.hamiltonian(universe1.omegas(medium))
    rng = np.random.default_rng(8)
    psi = random_state(universe1, cap, rng, modes=[0, 1])
    t = 0.83
    evolved = evolve(psi, medium, t)
    phases = np.exp(-1j * np.diag(h_dense).real * t)
    expected = phases * dense.vector(psi.amplitudes)
    assert np.allclose(dense.vector(evolved.amplitudes), expected, atol=1e-13)
