import numpy as np
import pytest

from st1sim import RateParams, build_onp_model
from st1sim.onp import (E_DN, E_UP, G_DN, G_UP, MINUS_DN, MIXED_I, MIXED_II,
                        TPLUS_DN, TPLUS_UP, ZERO_UP, OnpModel, cycle_polarization,
                        decay_to_ground, ground_start, polarize, predictions,
                        propagate, readout, readout_contrast, settle_time,
                        signal_contrast, steady_state, transient)
from st1sim.ratemodel import Populations
from st1sim.ratemodel import propagate as propagate5


def test_generator_columns_sum_to_zero(ref_onp):
    for pump_on in (True, False):
        k = ref_onp.generator(pump_on)
        assert np.max(np.abs(k.sum(axis=0))) <= 1e-15


def test_mixing_normalization_enforced():
    with pytest.raises(ValueError):
        build_onp_model(0.01, 0.005, 0.0004, 0.001, alpha=0.9, beta=0.8)


def test_mixed_state_lifetime(ref_onp):
    assert ref_onp.mixed_lifetime == pytest.approx(1428.57, abs=0.01)
    # matches the quoted round number at the 5% level
    assert ref_onp.mixed_lifetime == pytest.approx(1400.0, rel=0.05)


def test_mixed_state_decay_rates_from_matrix_elements(ref_onp):
    # |I> -> G(+1/2) proceeds through its |-1,+1/2> component only
    k = ref_onp.generator()
    a2, b2 = ref_onp.alpha**2, ref_onp.beta**2
    assert k[G_UP, MIXED_I] == pytest.approx(a2 * ref_onp.gamma_minus, rel=1e-12)
    assert k[G_DN, MIXED_I] == pytest.approx(b2 * ref_onp.gamma_zero, rel=1e-12)
    assert k[G_UP, MIXED_II] == pytest.approx(b2 * ref_onp.gamma_minus, rel=1e-12)
    assert k[G_DN, MIXED_II] == pytest.approx(a2 * ref_onp.gamma_zero, rel=1e-12)
    # population rates into the mixed states
    assert k[MIXED_I, E_UP] == pytest.approx(a2 * ref_onp.gamma, rel=1e-12)
    assert k[MIXED_I, E_DN] == pytest.approx(b2 * ref_onp.gamma, rel=1e-12)


def test_unmixed_limit_blocks_nuclear_sectors():
    m = build_onp_model(0.01, 0.005, 0.0004, 0.001, alpha=1.0)
    k = m.generator()
    up = [G_UP, E_UP, TPLUS_UP, ZERO_UP, MIXED_I]
    dn = [G_DN, E_DN, TPLUS_DN, MIXED_II, MINUS_DN]
    assert np.max(np.abs(k[np.ix_(up, dn)])) == 0.0
    assert np.max(np.abs(k[np.ix_(dn, up)])) == 0.0
    # polarization dynamics frozen: no spin-flip channel
    res = polarize(m)
    assert res.polarization == pytest.approx(0.0, abs=1e-12)


def test_unmixed_limit_matches_five_level_sectors():
    # with alpha = 1 each nuclear sector is exactly a five-level system
    m = build_onp_model(1 / 170, 1 / 200, 1 / 2500, 1 / 1000, alpha=1.0,
                        pump=0.08, radiative=0.1)
    p_up = RateParams(0.08, 0.1, 1 / 170, 1 / 170, 1 / 170,
                      1 / 200, 1 / 1000, 1 / 2500)
    n0 = np.zeros(10)
    n0[G_UP] = 1.0
    for t in (37.0, 400.0, 5200.0):
        ten = propagate(m, n0, t)
        five = propagate5(p_up, Populations.all_ground(), t).as_array()
        sector = [ten[G_UP], ten[E_UP], ten[TPLUS_UP], ten[MIXED_I], ten[ZERO_UP]]
        assert np.max(np.abs(np.array(sector) - five)) <= 1e-9


def test_population_conserved_over_schedule(ref_onp):
    times, rows = transient(ref_onp, [(20000.0, True), (15000.0, False),
                                      (20000.0, True)], n_per_segment=60)
    assert np.max(np.abs(rows.sum(axis=1) - 1.0)) <= 1e-9


def test_polarization_reference_value(ref_onp):
    res = polarize(ref_onp)
    assert res.polarization == pytest.approx(0.60, abs=0.10)
    assert res.polarization > 0  # toward the +1/2 manifold


def test_polarization_decay_shortcut_matches_propagation(ref_onp):
    pumped = propagate(ref_onp, ground_start(), 50000.0)
    exact = decay_to_ground(ref_onp, pumped)
    brute = propagate(ref_onp, pumped, 400000.0, pump_on=False)
    assert brute[2:].sum() < 1e-9
    assert np.max(np.abs(exact[:2] - brute[:2])) <= 1e-9


def test_symmetric_decay_rates_remove_polarization(ref_onp):
    sym = build_onp_model(1 / 170, 1 / 200, 1 / 1000, 1 / 1000, alpha=2 ** -0.5,
                          pump=0.1, radiative=0.1)
    res = polarize(sym)
    assert abs(res.polarization) <= 1e-12
    assert abs(res.polarization) < polarize(ref_onp).polarization


def test_no_pump_leaves_polarization(ref_onp):
    n0 = ground_start(0.8)
    frozen = OnpModel(ref_onp.gamma, ref_onp.gamma_plus, ref_onp.gamma_zero,
                      ref_onp.gamma_minus, ref_onp.alpha, ref_onp.beta,
                      pump=0.0, radiative=ref_onp.radiative)
    res = polarize(frozen, 20000.0, initial=n0)
    assert res.polarization == pytest.approx(0.6, abs=1e-12)


def test_readout_contrast_band(ref_onp):
    f_up, f_dn, contrast = readout_contrast(ref_onp)
    assert f_up < f_dn  # the polarized (+1/2) state reads out dark
    assert contrast == pytest.approx(0.07, abs=0.03)


def test_settle_time_band(ref_onp):
    t = settle_time(ref_onp)
    assert 4000.0 <= t <= 10000.0


def test_signal_contrast_is_product(ref_onp):
    pol = polarize(ref_onp).polarization
    _, _, contrast = readout_contrast(ref_onp)
    assert signal_contrast(ref_onp) == pytest.approx(pol * contrast, rel=1e-12)
    assert signal_contrast(ref_onp) == pytest.approx(0.04, abs=0.02)


def test_zero_polarization_zero_signal():
    sym = build_onp_model(1 / 170, 1 / 500, 1 / 900, 1 / 900, alpha=2 ** -0.5,
                          pump=0.1, radiative=0.1)
    assert abs(signal_contrast(sym)) <= 1e-12


def test_first_cycle_polarization(ref_onp):
    first = cycle_polarization(ref_onp, n_cycles=1)[0]
    assert first >= 0.5


def test_cycle_convergence(ref_onp):
    pols = cycle_polarization(ref_onp, n_cycles=12)
    assert abs(pols[-1] - pols[-2]) < 1e-6


def test_fully_symmetric_model_stays_unpolarized():
    sym = build_onp_model(1 / 170, 1 / 200, 1 / 800, 1 / 800, alpha=2 ** -0.5,
                          pump=0.1, radiative=0.1)
    pols = cycle_polarization(sym, n_cycles=3)
    assert np.max(np.abs(pols)) <= 1e-12


def test_polarization_antisymmetry():
    # exchanging gamma_zero <-> gamma_minus mirrors the level scheme and
    # must flip the sign of the polarization exactly
    a = build_onp_model(1 / 170, 1 / 200, 1 / 2500, 1 / 1000, alpha=0.6,
                        pump=0.07, radiative=0.1)
    b = build_onp_model(1 / 170, 1 / 200, 1 / 1000, 1 / 2500, alpha=0.6,
                        pump=0.07, radiative=0.1)
    pa = polarize(a).polarization
    pb = polarize(b).polarization
    assert pa == pytest.approx(-pb, abs=1e-12)


def test_steady_state_unique_from_random_inits(ref_onp):
    ss = steady_state(ref_onp)
    rng = np.random.default_rng(31)
    for _ in range(10):
        n0 = rng.dirichlet(np.ones(10))
        out = propagate(ref_onp, n0, 300000.0)
        assert np.max(np.abs(out - ss)) <= 1e-6


def test_transient_reaches_first_cycle_polarization(ref_onp):
    times, rows = transient(ref_onp, [(50000.0, True), (300000.0, False)],
                            n_per_segment=150)
    n_up, n_dn = rows[-1, G_UP], rows[-1, G_DN]
    assert (n_up - n_dn) / (n_up + n_dn) >= 0.5


def test_predictions_bundle(ref_onp):
    res = predictions(ref_onp)
    assert res.polarization == pytest.approx(0.579, abs=0.01)
    assert res.readout_contrast == pytest.approx(0.087, abs=0.01)
    assert res.signal_contrast == pytest.approx(res.polarization * res.readout_contrast,
                                                rel=1e-12)
    assert res.settle_time_ns is not None and res.steady_state.sum() == pytest.approx(1.0, abs=1e-9)


def test_readout_monotone_in_horizon(ref_onp):
    assert readout(ref_onp, "up", 20000.0) > readout(ref_onp, "up", 10000.0)
