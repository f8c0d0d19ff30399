import numpy as np
import pytest

from st1sim import (HyperfineParams, TripletHamiltonianParams,
                    electronuclear_hamiltonian, fermi_dipolar,
                    hyperfine_resonances, invert_fermi_dipolar, lac_center,
                    lac_map, mixing_coefficients, spin_density)
from st1sim.constants import CARBON_13, MU_B_MHZ_PER_MT, AtomicConstants
from st1sim.hyperfine import I2, lac_center_basic
from st1sim.spinham import SX

from oracles import zero_field_first_order_splittings


def test_hamiltonian_hermitian_trace():
    rng = np.random.default_rng(23)
    for _ in range(10):
        base = TripletHamiltonianParams(rng.uniform(800, 1500), rng.uniform(0, 250),
                                        2.0, tuple(rng.uniform(-50, 50, 3)))
        hp = HyperfineParams(base, rng.uniform(-150, 150), rng.uniform(-150, 150),
                             rng.uniform(-150, 150), nuclear_zeeman_enabled=True)
        h = electronuclear_hamiltonian(hp)
        assert np.max(np.abs(h - h.conj().T)) <= 1e-12
        assert np.linalg.eigvalsh(h).sum() == pytest.approx(np.trace(h).real, abs=1e-9)


def test_zero_coupling_doubles_triplet_spectrum(ref_spin):
    hp = HyperfineParams(ref_spin.with_field((3.0, 0.0, 11.0)), 0.0, 0.0, 0.0)
    vals = np.linalg.eigvalsh(electronuclear_hamiltonian(hp))
    # each triplet eigenvalue appears exactly twice
    assert np.max(np.abs(vals[::2] - vals[1::2])) <= 1e-9


def test_zero_field_hyperfine_suppressed(ref_hyperfine):
    # at B = 0 all first-order hyperfine corrections vanish (the zero-field
    # states carry no spin expectation); the dense 6x6 shows exactly
    # degenerate doublets whose centers are only shifted at second order
    vals = np.linalg.eigvalsh(electronuclear_hamiltonian(ref_hyperfine))
    splittings = vals[1::2] - vals[::2]
    assert np.max(np.abs(splittings - zero_field_first_order_splittings(
        ref_hyperfine.a_xx, ref_hyperfine.a_yy, ref_hyperfine.a_zz))) <= 1e-9
    d, e = ref_hyperfine.base.d, ref_hyperfine.base.e
    centers = 0.5 * (vals[::2] + vals[1::2])
    bare = np.sort([-2 * d / 3, d / 3 - e, d / 3 + e])
    shift = np.abs(centers - bare)
    assert shift.max() > 1.0            # the coupling does move the centers
    assert shift.max() < 40.0           # but only at second order, ~A^2/gap


def test_high_field_product_states(ref_hyperfine):
    hp = ref_hyperfine.with_field((0.0, 0.0, 100.0))
    _, vecs = np.linalg.eigh(electronuclear_hamiltonian(hp))
    best = np.abs(vecs).max(axis=0)
    assert np.all(best >= 0.99)


def test_nuclear_zeeman_is_small_and_off_by_default(ref_spin):
    on = HyperfineParams.axial(ref_spin.with_field((0, 0, 40.0)), -117.0, -94.0,
                               nuclear_zeeman_enabled=True)
    off = HyperfineParams.axial(ref_spin.with_field((0, 0, 40.0)), -117.0, -94.0)
    assert off.nuclear_zeeman_enabled is False
    dv = np.linalg.eigvalsh(electronuclear_hamiltonian(on)) - \
        np.linalg.eigvalsh(electronuclear_hamiltonian(off))
    assert 0 < np.max(np.abs(dv)) < 0.5  # sub-MHz at 40 mT


def test_a_perp_accessor(ref_spin):
    with pytest.raises(ValueError):
        HyperfineParams(ref_spin, -94.0, -90.0, -117.0).a_perp
    assert HyperfineParams(ref_spin, -94.0, -94.0, -117.0).a_perp == -94.0


# -- resonances ---------------------------------------------------------------

def test_zero_field_resonances_unpolarized_drive(ref_spin):
    hp = HyperfineParams.axial(ref_spin, 0.0, 0.0)
    table = hyperfine_resonances(hp, (1.0, 2000.0), drive="iso")
    freqs = np.unique(np.round(table[:, 0], 6))
    assert np.allclose(freqs, [278.0, 995.7, 1273.7], atol=1e-6)


def test_zero_field_single_line_with_x_drive(ref_spin):
    # Sx only connects |0> to one zero-field eigenstate; the other two lines
    # carry no x-drive intensity
    hp = HyperfineParams.axial(ref_spin, 0.0, 0.0)
    table = hyperfine_resonances(hp, (1.0, 2000.0), drive="x")
    assert np.allclose(table[:, 0], 1273.7, atol=1e-6)


def test_resonance_splittings_near_lac(ref_hyperfine):
    hp = ref_hyperfine.with_field((0.0, 0.0, 40.0))
    table = hyperfine_resonances(hp, (0.0, 3000.0), drive="x", threshold=1e-3)
    low = table[table[:, 0] < 500.0]
    high = table[table[:, 0] > 1800.0]
    # both branch groups split by more than 100 MHz (A_zz scale)
    assert np.ptp(low[:, 0]) > 100.0
    assert np.ptp(high[:, 0]) > 100.0
    # strongest pair separations, frozen from dense diagonalization
    lo2 = low[np.argsort(low[:, 1])][-2:, 0]
    hi2 = high[np.argsort(high[:, 1])][-2:, 0]
    assert abs(lo2[1] - lo2[0]) == pytest.approx(97.1, abs=1.0)
    assert abs(hi2[1] - hi2[0]) == pytest.approx(157.9, abs=1.0)


def test_resonance_multiset_stable_under_degenerate_relabeling(ref_spin):
    # mixing the degenerate partners by hand must not change the
    # (frequency, intensity) multiset
    hp = HyperfineParams.axial(ref_spin, 0.0, 0.0)
    h = electronuclear_hamiltonian(hp)
    w, v = np.linalg.eigh(h)
    rng = np.random.default_rng(1)
    op = np.kron(SX, I2)

    def table(vecs):
        rows = []
        for i in range(6):
            for j in range(i + 1, 6):
                f = w[j] - w[i]
                if f < 1.0:
                    continue
                rows.append((round(f, 9), abs(vecs[:, i].conj() @ op @ vecs[:, j]) ** 2))
        agg = {}
        for f, inten in rows:
            agg[f] = agg.get(f, 0.0) + inten
        return agg

    mixed = v.astype(complex).copy()
    for k in range(0, 6, 2):
        phi = rng.uniform(0, 2 * np.pi)
        u = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
        mixed[:, k:k + 2] = mixed[:, k:k + 2] @ u
    base_t, mixed_t = table(v), table(mixed)
    assert set(base_t) == set(mixed_t)
    for f in base_t:
        assert base_t[f] == pytest.approx(mixed_t[f], abs=1e-9)


def test_resonances_empty_window(ref_hyperfine):
    with pytest.raises(ValueError):
        hyperfine_resonances(ref_hyperfine, (100.0, 100.0))


# -- level anti-crossing -------------------------------------------------------

def test_lac_map_continuity_and_tracking(ref_hyperfine):
    grid = np.linspace(1.0, 60.0, 240)
    lmap = lac_map(ref_hyperfine, grid)
    assert lmap.min_overlap >= 0.9
    slope_bound = 1.05 * ref_hyperfine.base.g * MU_B_MHZ_PER_MT
    steps = np.abs(np.diff(lmap.energies, axis=0)).max(axis=1)
    assert np.all(steps <= slope_bound * np.diff(grid) + 1e-9)


def test_major_lac_center_and_gap(ref_hyperfine):
    center, gap = lac_center(ref_hyperfine, 35.0, 50.0)
    assert center == pytest.approx(40.5, abs=2.0)
    assert gap > 0
    assert gap == pytest.approx(np.sqrt(2) * abs(ref_hyperfine.a_perp), abs=2.0)


def test_minor_lac_much_smaller(ref_hyperfine):
    _, major_gap = lac_center(ref_hyperfine, 35.0, 50.0)
    center, gap = lac_center(ref_hyperfine, 30.0, 45.0, pair="minor")
    assert 0.0 < gap < major_gap / 10.0


def test_high_field_branch_slopes(ref_hyperfine):
    lmap = lac_map(ref_hyperfine, np.linspace(150.0, 160.0, 11))
    slopes = (lmap.energies[-1] - lmap.energies[0]) / 10.0
    unit = ref_hyperfine.base.g * MU_B_MHZ_PER_MT
    expected = np.sort([-1.0, -1.0, 0.0, 0.0, 1.0, 1.0])
    assert np.max(np.abs(np.sort(slopes / unit) - expected)) < 0.02


# -- mixing coefficients -------------------------------------------------------

def test_mixing_equal_weights_at_center(ref_hyperfine):
    center = lac_center_basic(ref_hyperfine)
    mc = mixing_coefficients(ref_hyperfine, center)
    assert mc.alpha == pytest.approx(2 ** -0.5, abs=1e-12)
    assert mc.beta == pytest.approx(2 ** -0.5, abs=1e-12)


def test_mixing_adiabatic_limits(ref_hyperfine):
    lo = mixing_coefficients(ref_hyperfine, 10.0)
    hi = mixing_coefficients(ref_hyperfine, 80.0)
    assert lo.alpha > 0.99 and lo.beta < 0.15
    assert hi.beta > 0.99 and hi.alpha < 0.15


def test_mixing_normalization_random_fields(ref_hyperfine):
    rng = np.random.default_rng(9)
    for bz in rng.uniform(0.0, 100.0, 100):
        mc = mixing_coefficients(ref_hyperfine, float(bz))
        assert mc.alpha**2 + mc.beta**2 == pytest.approx(1.0, abs=1e-12)


def test_mixing_energies_near_full_model(ref_hyperfine):
    # basic-model 2x2 eigenvalues track the full 6x6 m=-1/2 pair to within
    # the neglected |E| + |A_zz - A_perp| scale (they agree to ~2 MHz here)
    center = lac_center_basic(ref_hyperfine)
    mc = mixing_coefficients(ref_hyperfine, center)
    h = electronuclear_hamiltonian(ref_hyperfine.with_field((0, 0, center)))
    w, v = np.linalg.eigh(h)
    weight = np.abs(v[4, :]) ** 2 + np.abs(v[3, :]) ** 2
    pair = np.sort(w[np.argsort(weight)[-2:]])
    bound = abs(ref_hyperfine.base.e) + abs(ref_hyperfine.a_zz - ref_hyperfine.a_perp)
    assert abs(mc.energy_lower - pair[0]) < 25.0 < bound
    assert abs(mc.energy_upper - pair[1]) < 25.0 < bound


# -- contact/dipolar decomposition ---------------------------------------------

def test_fermi_dipolar_reference_values():
    f, d = fermi_dipolar(-117.0, -94.0)
    assert f == pytest.approx(-101.6667, abs=1e-3)
    assert d == pytest.approx(-7.6667, abs=1e-3)
    # inside the measured bands f = -101(2), d = -7.8(9)
    assert abs(f - (-101.0)) < 2.0
    assert abs(d - (-7.8)) < 0.9


def test_fermi_dipolar_isotropic():
    f, d = fermi_dipolar(-50.0, -50.0)
    assert f == -50.0 and d == 0.0


def test_fermi_dipolar_round_trip():
    for conv in ("standard", "printed"):
        f, d = fermi_dipolar(-117.0, -94.0, conv)
        azz, aperp = invert_fermi_dipolar(f, d, conv)
        assert azz == pytest.approx(-117.0, abs=1e-12)
        assert aperp == pytest.approx(-94.0, abs=1e-12)


def test_fermi_dipolar_printed_convention_differs():
    f_std, d_std = fermi_dipolar(-117.0, -94.0, "standard")
    f_pr, d_pr = fermi_dipolar(-117.0, -94.0, "printed")
    assert d_pr == pytest.approx(d_std, abs=1e-12)
    assert f_pr == pytest.approx(-109.3333, abs=1e-3)
    assert f_pr != pytest.approx(f_std, abs=1.0)


# -- spin density ---------------------------------------------------------------

def test_spin_density_reference_triple():
    res = spin_density(*fermi_dipolar(-117.0, -94.0))
    assert res.c_s_sq == pytest.approx(0.27, abs=0.05)
    assert res.c_p_sq == pytest.approx(0.73, abs=0.05)
    assert res.eta == pytest.approx(0.10, abs=0.03)


def test_spin_density_pure_s():
    res = spin_density(-80.0, 0.0)
    assert res.c_s_sq == 1.0 and res.c_p_sq == 0.0


def test_spin_density_scaling():
    a = spin_density(-101.67, -7.67)
    b = spin_density(-101.67 * 0.5, -7.67 * 0.5)
    assert b.eta == pytest.approx(0.5 * a.eta, rel=1e-12)
    assert b.c_s_sq == pytest.approx(a.c_s_sq, rel=1e-12)
    assert b.c_p_sq == pytest.approx(a.c_p_sq, rel=1e-12)


def test_spin_density_rejects_empty_couplings():
    with pytest.raises(ValueError):
        spin_density(0.0, 0.0)


def test_atomic_constants_round_trip():
    alt = AtomicConstants.from_unit_couplings("alt", 3200.0, 91.0)
    assert alt.a_2s_mhz == pytest.approx(3200.0, rel=1e-12)
    assert alt.b_2p_mhz == pytest.approx(91.0, rel=1e-12)
    assert CARBON_13.a_2s_mhz == pytest.approx(3777.0, rel=1e-12)
