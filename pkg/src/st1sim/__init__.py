"""st1sim: photophysics and spin physics of the ST1 diamond color center.

Forward models (five-level optical cycle, triplet and electro-nuclear spin
Hamiltonians, ten-level nuclear-polarization dynamics) and the matching
parameter-estimation tools (multi-exponential decays, photon correlations,
resonance maps).
"""

from .constants import CARBON_13, AtomicConstants
from .fitting import (FitReport, Trace, assign_lifetimes, fit_g2, fit_hyperfine,
                      fit_multiexp, fit_shared_lifetimes, goodness_of_fit,
                      model_select)
from .hyperfine import (HyperfineParams, MixingCoefficients, SpinDensityResult,
                        electronuclear_hamiltonian, fermi_dipolar,
                        hyperfine_resonances, invert_fermi_dipolar, lac_center,
                        lac_map, mixing_coefficients, spin_density)
from .onp import OnpModel, OnpResult, build_onp_model, polarize, readout, signal_contrast
from .ratemodel import (Populations, RateMatrix, RateParams, RecoverySolution,
                        analytic_recovery, build_rate_matrix, g2_curve, propagate,
                        propagate_grid, pulse_response_profile, recovery_solution,
                        simulate_recovery, steady_state)
from .spinham import (EigenSystem, SpinSeparationEstimate, TripletHamiltonianParams,
                      field_scan, r12_estimate, transition_frequencies,
                      zeeman, zfs_hamiltonian)

__version__ = "0.1.0"
