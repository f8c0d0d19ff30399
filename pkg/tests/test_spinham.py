import numpy as np
import pytest

from st1sim import (TripletHamiltonianParams, field_scan, r12_estimate,
                    transition_frequencies, zeeman, zfs_hamiltonian)
from st1sim.constants import MU_B_MHZ_PER_MT
from st1sim.spinham import eigensystem, hamiltonian

from oracles import triplet_eigenvalues_axial, triplet_eigenvalues_cubic


def test_zfs_zero_params():
    assert np.allclose(zfs_hamiltonian(0.0, 0.0), 0.0)


def test_zfs_hermitian_traceless_closed_eigenvalues():
    rng = np.random.default_rng(3)
    for _ in range(20):
        d = rng.uniform(0, 3000)
        e = rng.uniform(0, d / 2 if d else 1)
        h = zfs_hamiltonian(d, e)
        assert np.max(np.abs(h - h.conj().T)) <= 1e-12
        assert abs(np.trace(h)) <= 1e-12 * max(d, 1.0)
        vals = np.linalg.eigvalsh(h)
        expected = np.sort([-2 * d / 3, d / 3 - e, d / 3 + e])
        assert np.max(np.abs(vals - expected)) <= 1e-10


@pytest.mark.parametrize("d,e,expected", [
    (1134.7, 139.0, (278.0, 995.7, 1273.7)),
    (1128.0, 139.0, (278.0, 989.0, 1267.0)),
])
def test_zero_field_transitions(d, e, expected):
    freqs = transition_frequencies(TripletHamiltonianParams(d, e))
    assert np.max(np.abs(freqs - np.array(expected))) <= 1e-6


def test_zero_field_sum_rule():
    f1, f2, f3 = transition_frequencies(TripletHamiltonianParams(987.3, 55.5))
    assert f1 + f2 == pytest.approx(f3, abs=1e-9)


def test_zeeman_zero_field():
    assert np.allclose(zeeman(2.0, (0, 0, 0)), 0.0)


def test_zeeman_diagonal_element():
    h = zeeman(2.0, (0, 0, 1.0))
    assert h[0, 0].real == pytest.approx(2 * MU_B_MHZ_PER_MT, abs=1e-9)
    assert h[0, 0].real == pytest.approx(27.99, abs=0.01)


def test_axial_rotation_invariance():
    # with E = 0, rotating B about z cannot change the spectrum
    p0 = TripletHamiltonianParams(1000.0, 0.0, 2.0, (3.0, 0.0, 9.0))
    vals0 = eigensystem(p0).values
    for phi in (0.3, 1.2, 2.9):
        b = (3.0 * np.cos(phi), 3.0 * np.sin(phi), 9.0)
        vals = eigensystem(p0.with_field(b)).values
        assert np.max(np.abs(vals - vals0)) <= 1e-10


def test_transitions_axial_closed_form():
    # field along z with Zeeman energy 300 MHz
    g = 2.0
    bz = 300.0 / (g * MU_B_MHZ_PER_MT)
    p = TripletHamiltonianParams(1128.0, 139.0, g, (0.0, 0.0, bz))
    freqs = transition_frequencies(p)
    ev = triplet_eigenvalues_axial(1128.0, 139.0, 300.0)
    expected = np.sort([ev[1] - ev[0], ev[2] - ev[1], ev[2] - ev[0]])
    assert np.max(np.abs(freqs - expected)) <= 1e-6
    s = np.hypot(139.0, 300.0)
    assert np.allclose(np.sort([2 * s, 1128.0 - s, 1128.0 + s]), expected)


def test_large_field_slope():
    # the largest transition grows with slope 2 g mu_B / h
    p = TripletHamiltonianParams(1134.7, 139.0, 2.0)
    b1, b2 = 400.0, 401.0
    f1 = transition_frequencies(p.with_field((0, 0, b1)))[-1]
    f2 = transition_frequencies(p.with_field((0, 0, b2)))[-1]
    assert (f2 - f1) / (b2 - b1) == pytest.approx(2 * 2.0 * MU_B_MHZ_PER_MT, rel=1e-3)


def test_field_scan_consistency_and_symmetry():
    g = 2.0
    b = 300.0 / (g * MU_B_MHZ_PER_MT)
    p = TripletHamiltonianParams(1128.0, 139.0, g, (0.0, 0.0, b))
    scan = field_scan(p, "theta", [0.0])
    assert np.allclose(scan[0, 1:], transition_frequencies(p), atol=1e-10)
    plus = field_scan(p, "theta", np.linspace(0.05, 1.5, 7))
    minus = field_scan(p, "theta", -np.linspace(0.05, 1.5, 7))
    assert np.max(np.abs(plus[:, 1:] - minus[:, 1:])) <= 1e-9


def test_field_scan_matches_characteristic_polynomial():
    g = 2.0
    b = 300.0 / (g * MU_B_MHZ_PER_MT)
    p = TripletHamiltonianParams(1128.0, 139.0, g, (0.0, 0.0, b))
    angles = np.linspace(0.0, np.pi, 10)
    scan = field_scan(p, "theta", angles)
    for row in scan:
        ang = row[0]
        ev = triplet_eigenvalues_cubic(1128.0, 139.0, g,
                                       (b * np.sin(ang), 0.0, b * np.cos(ang)))
        expected = np.sort([ev[1] - ev[0], ev[2] - ev[1], ev[2] - ev[0]])
        assert np.max(np.abs(row[1:] - expected)) <= 1e-6


def test_phi_scan_matches_characteristic_polynomial():
    g = 2.0
    b = 300.0 / (g * MU_B_MHZ_PER_MT)
    p = TripletHamiltonianParams(1128.0, 139.0, g, (0.0, 0.0, b))
    angles = np.linspace(0.0, 2 * np.pi, 10)
    scan = field_scan(p, "phi", angles)
    for row in scan:
        ang = row[0]
        ev = triplet_eigenvalues_cubic(1128.0, 139.0, g,
                                       (b * np.cos(ang), b * np.sin(ang), 0.0))
        expected = np.sort([ev[1] - ev[0], ev[2] - ev[1], ev[2] - ev[0]])
        assert np.max(np.abs(row[1:] - expected)) <= 1e-6


def test_spectrum_invariant_under_e_flip_with_rotation():
    # flipping the sign of E equals rotating B by 90 degrees about z
    d, e, g = 1100.0, 120.0, 2.0
    b = np.array([4.0, 1.5, 7.0])
    h_flip = zfs_hamiltonian(d, 0) - e * (zfs_hamiltonian(0, 1.0)) + zeeman(g, b)
    b_rot = np.array([-b[1], b[0], b[2]])
    h_rot = zfs_hamiltonian(d, e) + zeeman(g, b_rot)
    assert np.max(np.abs(np.linalg.eigvalsh(h_flip) - np.linalg.eigvalsh(h_rot))) <= 1e-10


def test_transition_continuity_in_field():
    p = TripletHamiltonianParams(1134.7, 139.0, 2.0)
    lipschitz = 2 * p.g * MU_B_MHZ_PER_MT * 1.01
    direction = np.array([0.3, 0.2, 0.93])
    direction /= np.linalg.norm(direction)
    grid = np.linspace(0.0, 60.0, 601)
    freqs = np.array([transition_frequencies(p.with_field(direction * b)) for b in grid])
    steps = np.abs(np.diff(freqs, axis=0)).max(axis=1)
    assert np.all(steps <= lipschitz * np.diff(grid))


def test_field_unit_validation():
    with pytest.raises(ValueError):
        TripletHamiltonianParams(100.0, 200.0)  # E > D
    with pytest.raises(ValueError):
        TripletHamiltonianParams(100.0, 10.0, g=3.0)
    with pytest.raises(ValueError):
        TripletHamiltonianParams(100.0, 10.0, b_field=(np.inf, 0, 0))


def test_eigensystem_invariants():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = TripletHamiltonianParams(rng.uniform(500, 2000), rng.uniform(0, 200),
                                     2.0, tuple(rng.uniform(-30, 30, 3)))
        sys = eigensystem(p)
        assert np.all(np.diff(sys.values) >= 0)
        gram = sys.vectors.conj().T @ sys.vectors
        assert np.max(np.abs(gram - np.eye(3))) <= 1e-10
        assert sys.values.sum() == pytest.approx(np.trace(hamiltonian(p)).real, abs=1e-9)


# -- spin-spin separation ------------------------------------------------------

def test_r12_reference_values():
    assert r12_estimate(1134.7).r12_angstrom == pytest.approx(4.0, abs=0.5)
    assert r12_estimate(2870.0).r12_angstrom == pytest.approx(3.0, abs=0.4)


def test_r12_cube_root_scaling():
    r = r12_estimate(1134.7).r12_angstrom
    assert r12_estimate(1134.7 / 8).r12_angstrom == pytest.approx(2 * r, rel=1e-9)


def test_r12_monotone_and_validated():
    assert r12_estimate(2000.0).r12_angstrom < r12_estimate(1000.0).r12_angstrom
    with pytest.raises(ValueError):
        r12_estimate(0.0)
