import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfield.fock import fock_state, vacuum
from qfield.maxwell3d import (
    FieldSample3D,
    KGrid,
    KModeId,
    LatticeUniverse,
    divergence_check,
    field_expectation_3d,
    field_profile_3d,
    fields_on_points,
    hamiltonian_3d_expectation,
    mode_geometry_3d,
    polarization_basis,
    write_field_csv_3d,
)
from qfield.medium import Medium, natural_units
from qfield.observables import coherent_state


@pytest.fixture
def lattice1():
    return LatticeUniverse(KGrid(1.0, 1))


# --- lattice ------------------------------------------------------------------


def test_lattice_counts():
    assert len(KGrid(1.0, 1).lattice_points) == 26
    assert len(KGrid(0.5, 2).lattice_points) == 124
    assert LatticeUniverse(KGrid(1.0, 2)).size == 248


def test_lattice_excludes_origin_and_is_symmetric():
    points = KGrid(1.0, 2).lattice_points
    assert (0, 0, 0) not in points
    point_set = set(points)
    assert all((-i, -j, -l) in point_set for (i, j, l) in points)


def test_lattice_order_deterministic():
    assert KGrid(1.0, 1).lattice_points == KGrid(1.0, 1).lattice_points
    uni = LatticeUniverse(KGrid(1.0, 1))
    assert uni.modes == LatticeUniverse(KGrid(1.0, 1)).modes


def test_mode_labels_round_trip(lattice1):
    for i in range(lattice1.size):
        label = lattice1.label(i)
        assert lattice1.index(lattice1.mode_from_label(label)) == i


def test_kmode_validation():
    with pytest.raises(ValueError):
        KModeId(0, 0, 0, 1)
    with pytest.raises(ValueError):
        KModeId(1, 0, 0, 3)


def test_omegas_follow_dispersion(lattice1):
    med = Medium(epsilon=4.0, mu=1.0, hbar=1.0, area=1.0)
    omegas = lattice1.omegas(med)
    k_mags = np.linalg.norm(lattice1.k_vectors, axis=1)
    assert np.allclose(omegas, k_mags / 2.0)


# --- polarization bases ----------------------------------------------------------


def test_polarization_axis_cases():
    e1, e2 = polarization_basis([0.0, 0.0, 5.0])
    assert np.allclose(e1, [1.0, 0.0, 0.0])
    assert np.allclose(e2, [0.0, 1.0, 0.0])
    # hand cross-product check: khat x zhat = (0,-1,0), e2 = khat x e1 = (0,0,-1)
    e1, e2 = polarization_basis([3.0, 0.0, 0.0])
    assert np.allclose(e1, [0.0, -1.0, 0.0])
    assert np.allclose(e2, [0.0, 0.0, -1.0])


def test_polarization_zero_k_rejected():
    with pytest.raises(ValueError):
        polarization_basis([0.0, 0.0, 0.0])


@given(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)).filter(
    lambda k: math.sqrt(k[0] ** 2 + k[1] ** 2 + k[2] ** 2) > 1e-3
    # away from the z-axis pole, where the rule intentionally snaps e1 to xhat
    and math.hypot(k[0], k[1]) > 1e-6 * math.sqrt(k[0] ** 2 + k[1] ** 2 + k[2] ** 2)
))
def test_polarization_invariants(k):
    e1, e2 = polarization_basis(k)
    khat = np.asarray(k) / np.linalg.norm(k)
    assert abs(np.linalg.norm(e1) - 1) < 1e-13
    assert abs(np.linalg.norm(e2) - 1) < 1e-13
    assert abs(e1 @ e2) < 1e-13
    assert abs(khat @ e1) < 1e-13
    assert abs(khat @ e2) < 1e-13
    assert np.max(np.abs(np.cross(e1, e2) - khat)) < 1e-13


def test_polarization_deterministic():
    k = [0.3, -1.2, 0.7]
    first = polarization_basis(k)
    second = polarization_basis(k)
    assert np.array_equal(first[0], second[0]) and np.array_equal(first[1], second[1])


def test_polarization_near_pole_snaps_to_xhat():
    # within the 1e-9 pole band around the z axis the rule fixes e1 = xhat,
    # leaving khat . e1 of the order of the band width
    e1, e2 = polarization_basis([5e-10, 0.0, 1.0])
    assert np.array_equal(e1, [1.0, 0.0, 0.0])
    khat = np.array([5e-10, 0.0, 1.0]) / np.linalg.norm([5e-10, 0.0, 1.0])
    assert abs(khat @ e1) <= 1e-9


# --- fields -------------------------------------------------------------------------


def test_vacuum_field_zero_3d(lattice1, medium):
    s = field_expectation_3d(vacuum(lattice1, 2), [0.1, 0.2, 0.3], 0.5, medium)
    assert np.all(s.e_field == 0.0) and np.all(s.b_field == 0.0)


def test_b_to_e_amplitude_ratio(lattice1):
    for eps, mu in [(1.0, 1.0), (4.0, 1.0), (2.0, 5.0)]:
        med = Medium(epsilon=eps, mu=mu, hbar=1.0, area=1.0)
        state = coherent_state(lattice1, 10, [(KModeId(1, 0, 0, 1), 0.9)])
        s = field_expectation_3d(state, [0.37, -0.2, 0.11], 0.23, med)
        assert np.linalg.norm(s.b_field) == pytest.approx(
            math.sqrt(eps * mu) * np.linalg.norm(s.e_field), rel=1e-12
        )


def test_coherent_field_closed_form_3d(lattice1, medium):
    # <E>(r, t) = 2 Re[i C alpha e^{-i(k.r + w t)}] e_k1 for a single coherent mode
    mode = KModeId(1, 1, 1, 1)
    alpha = 0.4
    state = coherent_state(lattice1, 8, [(mode, alpha)])
    kvec = mode.k_vector(lattice1.grid)
    omega = np.linalg.norm(kvec)
    e1, _ = polarization_basis(kvec)
    c = (1.0 / (2 * math.pi) ** 1.5) * math.sqrt(omega / 2.0)  # Dk = 1
    for r, t in [([0.0, 0.0, 0.0], 0.0), ([0.3, -0.1, 0.5], 0.8)]:
        s = field_expectation_3d(state, r, t, medium)
        phase = np.exp(-1j * (kvec @ np.asarray(r) + omega * t))
        expected = 2 * (1j * c * alpha * phase).real * e1
        assert np.allclose(s.e_field, expected, atol=1e-10)


def test_transport_along_minus_khat(lattice1, medium):
    # e^{-i k.r} convention: the mode labeled k carries its wave along -khat
    mode = KModeId(1, 1, 0, 1)
    state = coherent_state(lattice1, 10, [(mode, 0.7)])
    khat = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    r0 = np.array([0.2, 0.1, 0.3])
    delta = 0.41
    s0 = field_expectation_3d(state, r0, 0.0, medium)
    s_minus = field_expectation_3d(state, r0 - khat * delta, delta, medium)
    s_plus = field_expectation_3d(state, r0 + khat * delta, delta, medium)
    assert np.allclose(s0.e_field, s_minus.e_field, atol=1e-12)
    assert np.allclose(s0.b_field, s_minus.b_field, atol=1e-12)
    assert not np.allclose(s0.e_field, s_plus.e_field, atol=1e-4)


def test_fields_on_points_matches_pointwise(lattice1, medium):
    state = coherent_state(lattice1, 10, [(KModeId(1, -1, 0, 2), 0.5)])
    points = np.array([[0.0, 0.0, 0.0], [0.2, 0.3, -0.4], [1.0, 0.5, 0.25]])
    e_batch, b_batch = fields_on_points(state, points, 0.35, medium)
    for p, e_row, b_row in zip(points, e_batch, b_batch):
        s = field_expectation_3d(state, p, 0.35, medium)
        assert np.allclose(e_row, s.e_field, atol=1e-14)
        assert np.allclose(b_row, s.b_field, atol=1e-14)


def test_field_squares_exceed_vacuum(lattice1, medium):
    vac = field_expectation_3d(vacuum(lattice1, 2), [0, 0, 0], 0.0, medium, with_squares=True)
    one = field_expectation_3d(
        fock_state(lattice1, 2, {KModeId(0, 1, 0, 1): 1}), [0, 0, 0], 0.0, medium, with_squares=True
    )
    assert vac.e_sq > 0
    assert one.e_sq > vac.e_sq


# --- energies -----------------------------------------------------------------------


def test_single_photon_energy(lattice1, medium):
    mode = KModeId(1, -2 if lattice1.grid.half_extent >= 2 else 0, 0, 1)
    state = fock_state(lattice1, 2, {mode: 1})
    omega = np.linalg.norm(mode.k_vector(lattice1.grid))
    report = hamiltonian_3d_expectation(state, medium, include_zpe=False)
    assert report.excitation_energy == pytest.approx(omega, rel=1e-14)


def test_vacuum_energy_and_additivity(lattice1, medium):
    assert hamiltonian_3d_expectation(vacuum(lattice1, 2), medium, include_zpe=False).excitation_energy == 0.0
    a = KModeId(1, 0, 0, 1)
    b = KModeId(0, 1, 1, 2)
    two = fock_state(lattice1, 2, {a: 1, b: 1})
    report = hamiltonian_3d_expectation(two, medium, include_zpe=False)
    expected = np.linalg.norm(a.k_vector(lattice1.grid)) + np.linalg.norm(b.k_vector(lattice1.grid))
    assert report.excitation_energy == pytest.approx(expected, rel=1e-14)


# --- divergence -----------------------------------------------------------------------


def _axes(center, h, n=5):
    return tuple(center[i] + h * (np.arange(n) - n // 2) for i in range(3))


def test_divergence_vacuum_is_zero(lattice1, medium):
    assert divergence_check(vacuum(lattice1, 2), _axes([0.1, 0.2, 0.3], 1e-3), medium) == 0.0


def test_divergence_axis_aligned_plane_wave_exact(lattice1, medium):
    # k along z with either polarization: the FD divergence cancels identically
    state = coherent_state(lattice1, 2, [(KModeId(0, 0, 1, 1), 0.05)])
    residual = divergence_check(state, _axes([0.3, 0.2, 0.1], 1e-3), medium)
    assert residual <= 1e-10


def test_divergence_second_order_convergence(medium):
    # k = (1, 2, 0) makes the discrete divergence error visible at O(h^2)
    uni = LatticeUniverse(KGrid(1.0, 2))
    state = coherent_state(uni, 2, [(KModeId(1, 2, 0, 1), 0.05)])
    residuals = [
        divergence_check(state, _axes([0.3, 0.2, 0.1], h), medium) for h in (2e-3, 1e-3, 5e-4)
    ]
    assert residuals[0] > residuals[1] > residuals[2] > 0
    assert residuals[0] / residuals[1] == pytest.approx(4.0, rel=0.05)
    assert residuals[1] / residuals[2] == pytest.approx(4.0, rel=0.05)


def test_divergence_grid_validation(lattice1, medium):
    state = vacuum(lattice1, 2)
    with pytest.raises(ValueError):
        divergence_check(state, (np.array([0.0, 1.0]),) * 3, medium)
    bad = (np.array([0.0, 1.0, 3.0]), np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        divergence_check(state, bad, medium)


# --- profiles and CSV ------------------------------------------------------------------


def test_profile_3d_matches_pointwise(lattice1, medium):
    state = coherent_state(lattice1, 10, [(KModeId(1, 0, 0, 1), 0.6)])
    points = np.array([[0.0, 0.0, 0.0], [0.3, 0.2, 0.1]])
    samples = field_profile_3d(state, points, [0.0, 0.4], medium)
    assert [(tuple(s.r), s.t) for s in samples] == [
        ((0.0, 0.0, 0.0), 0.0),
        ((0.0, 0.0, 0.0), 0.4),
        ((0.3, 0.2, 0.1), 0.0),
        ((0.3, 0.2, 0.1), 0.4),
    ]
    for s in samples:
        direct = field_expectation_3d(state, s.r, s.t, medium)
        assert np.allclose(s.e_field, direct.e_field, atol=1e-14)


def test_csv_3d_round_trip(lattice1, medium):
    state = coherent_state(lattice1, 10, [(KModeId(1, 0, 0, 1), 0.6)])
    samples = field_profile_3d(state, np.array([[0.1, 0.2, 0.3]]), [0.0], medium, with_squares=True)
    buffer = io.StringIO()
    write_field_csv_3d(samples, buffer)
    lines = buffer.getvalue().strip().split("\n")
    assert lines[0] == "r_x,r_y,r_z,t,Ex,Ey,Ez,Bx,By,Bz,E2,B2"
    values = [float(v) for v in lines[1].split(",")]
    assert values[:3] == [0.1, 0.2, 0.3]
    assert values[4:7] == list(samples[0].e_field)
