import numpy as np
import pytest

from st1sim import (HyperfineParams, RateParams, TripletHamiltonianParams,
                    build_onp_model)


@pytest.fixture
def ref_rates():
    """Reference optical-cycle parameters: saturated pump, 10 ns radiative
    lifetime, equal shelving at (170 ns)^-1, decay times 200/1000/2500 ns."""
    return RateParams.from_lifetimes(10.0, 10.0, (170.0, 170.0, 170.0),
                                     (200.0, 1000.0, 2500.0))


@pytest.fixture
def ref_spin():
    return TripletHamiltonianParams(1134.7, 139.0, 2.0)


@pytest.fixture
def ref_hyperfine(ref_spin):
    return HyperfineParams.axial(ref_spin, -117.0, -94.0)


@pytest.fixture
def ref_onp():
    return build_onp_model(1 / 170, 1 / 200, 1 / 2500, 1 / 1000,
                           alpha=2 ** -0.5, pump=0.1, radiative=0.1)


def random_rate_params(rng: np.random.Generator) -> RateParams:
    """Random but physically plausible rate sets for oracle sweeps."""
    return RateParams(
        pump=rng.uniform(0.01, 0.2),
        radiative=rng.uniform(0.02, 0.2),
        pop_plus=rng.uniform(0.001, 0.02),
        pop_minus=rng.uniform(0.001, 0.02),
        pop_zero=rng.uniform(0.001, 0.02),
        dec_plus=rng.uniform(0.0002, 0.01),
        dec_minus=rng.uniform(0.0002, 0.01),
        dec_zero=rng.uniform(0.0002, 0.01),
    )
