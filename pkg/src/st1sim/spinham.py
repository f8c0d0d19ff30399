"""Triplet (S=1) spin Hamiltonian: zero-field splitting plus electron Zeeman.

Basis convention: |+1>, |0>, |-1> with the standard dimensionless S=1
matrices; energies in MHz, magnetic fields in mT. At zero field the
eigenstates are |0> and |+-> = (|+1> +- |-1>)/sqrt(2) with energies
-2D/3 and D/3 +- E, so the three transitions are 2E, D-E and D+E.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import ANGSTROM, G_E, H_PLANCK, MU_0, MU_B_MHZ_PER_MT, MU_B_SI

_SQRT2 = np.sqrt(2.0)

SX = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _SQRT2
SY = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _SQRT2
SZ = np.diag([1.0, 0.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class TripletHamiltonianParams:
    """Zero-field splitting magnitudes D >= E >= 0 (MHz), isotropic g and B (mT).

    The signs of D and E are not experimentally determined; the positive
    convention is used throughout.
    """

    d: float
    e: float
    g: float = 2.0
    b_field: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (self.d >= self.e >= 0):
            raise ValueError("require D >= E >= 0 (magnitude convention)")
        if not 1.5 <= self.g <= 2.5:
            raise ValueError("g outside the sane range [1.5, 2.5]")
        b = np.asarray(self.b_field, dtype=float)
        if b.shape != (3,) or not np.all(np.isfinite(b)):
            raise ValueError("b_field must be a finite 3-vector in mT")
        object.__setattr__(self, "b_field", tuple(float(x) for x in b))

    def with_field(self, b_field) -> "TripletHamiltonianParams":
        return TripletHamiltonianParams(self.d, self.e, self.g, tuple(b_field))


def zfs_hamiltonian(d: float, e: float) -> np.ndarray:
    """Zero-field-splitting term D(Sz^2 - S(S+1)/3) + E(Sx^2 - Sy^2), MHz.

    Traceless Hermitian; eigenvalues are exactly {-2D/3, D/3 - E, D/3 + E}.
    """
    return (d * (SZ @ SZ - (2.0 / 3.0) * np.eye(3)) + e * (SX @ SX - SY @ SY)).real.astype(
        complex)


def zeeman(g: float, b_field) -> np.ndarray:
    """Electron Zeeman term g (mu_B/h) B.S for B in mT; result in MHz."""
    bx, by, bz = np.asarray(b_field, dtype=float)
    return g * MU_B_MHZ_PER_MT * (bx * SX + by * SY + bz * SZ)


def hamiltonian(params: TripletHamiltonianParams) -> np.ndarray:
    return zfs_hamiltonian(params.d, params.e) + zeeman(params.g, params.b_field)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues (MHz) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)
        self.vectors.setflags(write=False)
        if np.any(np.diff(self.values) < 0):
            raise ValueError("eigenvalues must be ascending")
        gram = self.vectors.conj().T @ self.vectors
        if np.max(np.abs(gram - np.eye(len(self.values)))) > 1e-10:
            raise ValueError("eigenvectors not orthonormal")


def diagonalize(h: np.ndarray) -> EigenSystem:
    """Dense Hermitian diagonalization with a trace sanity check."""
    values, vectors = np.linalg.eigh(h)
    if abs(values.sum() - np.trace(h).real) > 1e-9:
        raise ValueError("eigenvalue sum does not match the trace")
    return EigenSystem(values, vectors)


def eigensystem(params: TripletHamiltonianParams) -> EigenSystem:
    return diagonalize(hamiltonian(params))


def transition_frequencies(params: TripletHamiltonianParams) -> np.ndarray:
    """The three pairwise eigenvalue differences, sorted ascending (MHz)."""
    v = eigensystem(params).values
    return np.sort([v[1] - v[0], v[2] - v[1], v[2] - v[0]])


def field_scan(params: TripletHamiltonianParams, axis: str, angles) -> np.ndarray:
    """Transition frequencies while rotating B at fixed magnitude.

    axis="theta" sweeps in the x-z plane (B = B(sin t, 0, cos t)); axis="phi"
    sweeps in the x-y plane (B = B(cos p, sin p, 0)). Returns (n, 4) rows of
    (angle, f1, f2, f3).
    """
    angles = np.asarray(angles, dtype=float)
    b_mag = float(np.linalg.norm(params.b_field))
    out = np.empty((len(angles), 4))
    for i, ang in enumerate(angles):
        if axis == "theta":
            b = (b_mag * np.sin(ang), 0.0, b_mag * np.cos(ang))
        elif axis == "phi":
            b = (b_mag * np.cos(ang), b_mag * np.sin(ang), 0.0)
        else:
            raise ValueError("axis must be 'theta' or 'phi'")
        out[i, 0] = ang
        out[i, 1:] = transition_frequencies(params.with_field(b))
    return out


@dataclass(frozen=True)
class SpinSeparationEstimate:
    """Point-dipole upper bound on the separation of the two unpaired spins."""

    r12_angstrom: float
    inv_r3: float = field(default=0.0)  # <1/r^3> in 1/m^3

    def __post_init__(self):
        if self.r12_angstrom <= 0:
            raise ValueError("separation must be positive")


def r12_estimate(d_mhz: float) -> SpinSeparationEstimate:
    """Crude spin-spin separation bound from the D parameter.

    Inverts D = (3/2) g_e^2 mu_B^2 (mu_0/4pi) <1/r^3> / h with the angular
    factor set to one (point-dipole simplification), then r = <1/r^3>^(-1/3).
    Monotone decreasing in D; r(D/8) = 2 r(D) exactly.
    """
    if d_mhz <= 0:
        raise ValueError("D must be positive")
    prefactor = 1.5 * G_E**2 * MU_B_SI**2 * (MU_0 / (4 * np.pi)) / H_PLANCK  # Hz m^3
    inv_r3 = d_mhz * 1e6 / prefactor
    return SpinSeparationEstimate(r12_angstrom=inv_r3 ** (-1 / 3) / ANGSTROM,
                                  inv_r3=inv_r3)
