"""Physical constants and atomic reference data.

Frequency-unit conventions used across the package: energies in MHz,
magnetic fields in mT, times in ns, rates in 1/ns.
"""

from __future__ import annotations

from dataclasses import dataclass

import scipy.constants as _sc

# Electron Zeeman conversion, mu_B/h in MHz/mT.
MU_B_MHZ_PER_MT = 13.996245

# Nuclear Zeeman conversion, mu_N/h in MHz/mT.
MU_N_MHZ_PER_MT = _sc.physical_constants["nuclear magneton"][0] / _sc.h / 1e9

# Free-electron g-factor (isotropic).
G_E = 2.0023

# 13C nuclear g-factor.
G_N_C13 = 1.4048

H_PLANCK = _sc.h                 # J s
MU_0 = _sc.mu_0                  # T m / A
MU_B_SI = _sc.physical_constants["Bohr magneton"][0]      # J / T
MU_N_SI = _sc.physical_constants["nuclear magneton"][0]   # J / T

ANGSTROM = 1e-10


def fermi_contact_unit_coupling(g_n: float = G_N_C13) -> float:
    """Fermi-contact coupling in Hz per unit spin density per unit |phi(0)|^2 (1/m^3)."""
    return (8 * _sc.pi / 3) * (MU_0 / (4 * _sc.pi)) * G_E * MU_B_SI * g_n * MU_N_SI / H_PLANCK


def dipolar_unit_coupling(g_n: float = G_N_C13) -> float:
    """Dipolar coupling in Hz per unit spin density per unit <1/r^3> (1/m^3)."""
    return (2 / 5) * (MU_0 / (4 * _sc.pi)) * G_E * MU_B_SI * g_n * MU_N_SI / H_PLANCK


@dataclass(frozen=True)
class AtomicConstants:
    """Atomic-orbital reference values used in the spin-density analysis.

    phi_s0_sq is |phi_2s(0)|^2 at the nucleus and r3_p is <phi_2p|1/r^3|phi_2p>,
    both in 1/m^3. The equivalent per-unit-spin-density hyperfine couplings
    are available as properties.
    """

    name: str
    phi_s0_sq: float
    r3_p: float
    g_n: float = G_N_C13
    source: str = ""

    def __post_init__(self):
        if self.phi_s0_sq <= 0 or self.r3_p <= 0:
            raise ValueError("atomic orbital expectation values must be positive")

    @property
    def a_2s_mhz(self) -> float:
        """Isotropic coupling for unit 2s spin density, MHz."""
        return fermi_contact_unit_coupling(self.g_n) * self.phi_s0_sq / 1e6

    @property
    def b_2p_mhz(self) -> float:
        """Dipolar coupling for unit 2p spin density, MHz."""
        return dipolar_unit_coupling(self.g_n) * self.r3_p / 1e6

    @classmethod
    def from_unit_couplings(cls, name, a_2s_mhz, b_2p_mhz, g_n=G_N_C13, source=""):
        """Build from tabulated per-unit-density couplings (MHz)."""
        return cls(
            name=name,
            phi_s0_sq=a_2s_mhz * 1e6 / fermi_contact_unit_coupling(g_n),
            r3_p=b_2p_mhz * 1e6 / dipolar_unit_coupling(g_n),
            g_n=g_n,
            source=source,
        )


# Restricted-SCF per-unit-density couplings for atomic carbon 2s/2p, the
# values in standard ESR tabulations used for defects in diamond.
CARBON_13 = AtomicConstants.from_unit_couplings(
    name="carbon13-scf",
    a_2s_mhz=3777.0,
    b_2p_mhz=107.4,
    g_n=G_N_C13,
    source="restricted Hartree-Fock atomic-carbon tabulation (2s/2p, 13C)",
)
