"""Electro-nuclear (S=1 x I=1/2) Hamiltonian and hyperfine analysis.

Product basis ordering: (m_s, m_I) = (+1,up), (+1,dn), (0,up), (0,dn),
(-1,up), (-1,dn), i.e. kron(electron, nucleus). The diagonal hyperfine
tensor couples through A_xx SxIx + A_yy SyIy + A_zz SzIz; the nuclear and
defect frames are taken coincident. Energies MHz, fields mT.

Near B_z ~ D/(g mu_B) the |-1,up> and |0,dn> levels anti-cross (both carry
electro-nuclear projection m = -1/2) and are mixed by the transverse
hyperfine coupling; the resulting mixed states drive optical nuclear
polarization (see the onp module).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .constants import CARBON_13, G_N_C13, MU_B_MHZ_PER_MT, MU_N_MHZ_PER_MT, AtomicConstants
from .spinham import SX, SY, SZ, TripletHamiltonianParams, zfs_hamiltonian, zeeman

IX = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
IY = np.array([[0, -0.5j], [0.5j, 0]], dtype=complex)
IZ = np.diag([0.5, -0.5]).astype(complex)
I2 = np.eye(2, dtype=complex)
E3 = np.eye(3, dtype=complex)

# indices of the product-basis kets involved in the two anti-crossings
_KET_MINUS1_UP = 4
_KET_ZERO_DN = 3
_KET_ZERO_UP = 2
_KET_MINUS1_DN = 5


@dataclass(frozen=True)
class HyperfineParams:
    """Triplet parameters plus a diagonal hyperfine tensor (MHz).

    nuclear_zeeman_enabled adds -g_n (mu_N/h) B.I (off by default; it is a
    sub-MHz correction at the fields of interest).
    """

    base: TripletHamiltonianParams
    a_xx: float
    a_yy: float
    a_zz: float
    nuclear_zeeman_enabled: bool = False
    g_n: float = G_N_C13

    @property
    def a_perp(self) -> float:
        if abs(self.a_xx - self.a_yy) >= 1e-6:
            raise ValueError("a_perp undefined: A_xx and A_yy differ")
        return self.a_xx

    @classmethod
    def axial(cls, base, a_zz, a_perp, **kw) -> "HyperfineParams":
        return cls(base, a_perp, a_perp, a_zz, **kw)

    def with_field(self, b_field) -> "HyperfineParams":
        return HyperfineParams(self.base.with_field(b_field), self.a_xx, self.a_yy,
                               self.a_zz, self.nuclear_zeeman_enabled, self.g_n)


def electronuclear_hamiltonian(params: HyperfineParams) -> np.ndarray:
    """6x6 Hermitian matrix: (ZFS + Zeeman) x 1 + S.A.I [+ nuclear Zeeman]."""
    h3 = zfs_hamiltonian(params.base.d, params.base.e) + zeeman(params.base.g,
                                                                params.base.b_field)
    h = np.kron(h3, I2)
    h += params.a_xx * np.kron(SX, IX)
    h += params.a_yy * np.kron(SY, IY)
    h += params.a_zz * np.kron(SZ, IZ)
    if params.nuclear_zeeman_enabled:
        bx, by, bz = params.base.b_field
        h -= params.g_n * MU_N_MHZ_PER_MT * np.kron(E3, bx * IX + by * IY + bz * IZ)
    return h


_DRIVES = {
    "x": (np.kron(SX, I2),),
    "y": (np.kron(SY, I2),),
    "z": (np.kron(SZ, I2),),
}
_DRIVES["iso"] = _DRIVES["x"] + _DRIVES["y"] + _DRIVES["z"]


def hyperfine_resonances(params: HyperfineParams, window=(0.0, np.inf),
                         drive: str = "x", threshold: float = 1e-4) -> np.ndarray:
    """Spin resonances with relative drive intensities.

    All eigenpair differences inside the frequency window, with intensity
    |<i|S_drive x 1|j>|^2 normalized to the strongest line; lines below the
    relative threshold are dropped. drive="iso" sums the three Cartesian
    drive intensities (unpolarized microwave field); the default "x" kills
    zero-field lines that only couple through Sy or Sz.
    Returns (n, 2) rows of (frequency MHz, relative intensity), sorted by
    frequency.
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError("empty frequency window")
    ops = _DRIVES[drive]
    w, v = np.linalg.eigh(electronuclear_hamiltonian(params))
    freqs, weights = [], []
    for i in range(6):
        for j in range(i + 1, 6):
            f = w[j] - w[i]
            if not lo <= f <= hi:
                continue
            inten = sum(abs(v[:, i].conj() @ (op @ v[:, j])) ** 2 for op in ops)
            freqs.append(f)
            weights.append(inten)
    if not freqs:
        return np.empty((0, 2))
    freqs = np.asarray(freqs)
    weights = np.asarray(weights)
    peak = weights.max()
    if peak > 0:
        weights = weights / peak
    keep = weights >= threshold
    order = np.argsort(freqs[keep])
    return np.column_stack([freqs[keep][order], weights[keep][order]])


@dataclass(frozen=True)
class LacMap:
    """Branch-tracked eigenvalues over a field sweep.

    energies[k] holds the six branch energies at fields_mt[k]; branches are
    matched between adjacent fields by eigenvector overlap, falling back to
    ascending order when the best overlap drops below 0.5.
    min_overlap records the weakest adjacent-step match encountered.
    """

    fields_mt: np.ndarray
    energies: np.ndarray
    min_overlap: float

    def __post_init__(self):
        self.fields_mt.setflags(write=False)
        self.energies.setflags(write=False)


def lac_map(params: HyperfineParams, bz_grid) -> LacMap:
    """Eigenvalue branches along a B_z sweep with overlap continuation."""
    bz_grid = np.asarray(bz_grid, dtype=float)
    if np.any(np.diff(bz_grid) <= 0):
        raise ValueError("field grid must be strictly increasing")
    energies = np.empty((len(bz_grid), 6))
    prev_vecs = None
    min_overlap = 1.0
    for k, bz in enumerate(bz_grid):
        w, v = np.linalg.eigh(electronuclear_hamiltonian(params.with_field((0, 0, bz))))
        if prev_vecs is None:
            perm = np.arange(6)
        else:
            overlap = np.abs(prev_vecs.conj().T @ v)
            rows, cols = linear_sum_assignment(-overlap)
            perm = np.empty(6, dtype=int)
            perm[rows] = cols
            matched = overlap[rows, cols].min()
            min_overlap = min(min_overlap, float(matched))
            if matched < 0.5:
                perm = np.arange(6)  # fall back to plain ascending order
        energies[k] = w[perm]
        prev_vecs = v[:, perm]
    return LacMap(bz_grid.copy(), energies, min_overlap)


def _pair_gap(params: HyperfineParams, bz: float, kets: tuple[int, int]) -> float:
    """Gap between the two eigenstates with the most weight on the given kets."""
    w, v = np.linalg.eigh(electronuclear_hamiltonian(params.with_field((0, 0, bz))))
    weight = np.abs(v[kets[0], :]) ** 2 + np.abs(v[kets[1], :]) ** 2
    a, b = np.sort(np.argsort(weight)[-2:])
    return float(w[b] - w[a])


def lac_center(params: HyperfineParams, b_lo: float, b_hi: float,
               pair: str = "major", n_scan: int = 200) -> tuple[float, float]:
    """Locate an anti-crossing: field of minimum gap and the gap itself.

    pair="major" targets the m=-1/2 pair {|-1,up>, |0,dn>} mixed by the
    transverse hyperfine coupling (gap of order sqrt(2) A_perp); "minor"
    targets the {|0,up>, |-1,dn>} pair whose much smaller gap is induced by
    the crystal-field E term.
    """
    kets = {"major": (_KET_MINUS1_UP, _KET_ZERO_DN),
            "minor": (_KET_ZERO_UP, _KET_MINUS1_DN)}[pair]
    grid = np.linspace(b_lo, b_hi, n_scan)
    gaps = [_pair_gap(params, bz, kets) for bz in grid]
    k = int(np.argmin(gaps))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, n_scan - 1)]
    res = minimize_scalar(lambda bz: _pair_gap(params, bz, kets),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6})
    return float(res.x), float(res.fun)


@dataclass(frozen=True)
class MixingCoefficients:
    """Weights of the anti-crossing mixed states in the basic two-level model.

    The mixed states are alpha|-1,up> + beta|0,dn> and alpha|0,dn> -
    beta|-1,up>; alpha and beta are reported as nonnegative weights
    (only their squares enter rate models) with alpha^2 + beta^2 = 1.
    energy_upper/lower are the two-level eigenvalues in MHz.
    """

    alpha: float
    beta: float
    energy_upper: float
    energy_lower: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("weights must be nonnegative")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > 1e-12:
            raise ValueError("alpha^2 + beta^2 must equal 1")


def _basic_block(params: HyperfineParams, bz: float):
    """Two-level block over {|-1,up>, |0,dn>}: E ignored, isotropic A = A_perp."""
    a_iso = params.a_perp
    d = params.base.d
    zeta = params.base.g * MU_B_MHZ_PER_MT * bz
    h11 = d / 3.0 - zeta - a_iso / 2.0   # <-1,up|
    h22 = -2.0 * d / 3.0                 # <0,dn|
    coupling = abs(a_iso) / np.sqrt(2.0)
    return h11, h22, coupling


def lac_center_basic(params: HyperfineParams) -> float:
    """Field (mT) where the basic-model detuning vanishes (alpha = beta)."""
    a_iso = params.a_perp
    return (params.base.d - a_iso / 2.0) / (params.base.g * MU_B_MHZ_PER_MT)


def mixing_coefficients(params: HyperfineParams, bz: float) -> MixingCoefficients:
    """Diagonalize the basic-model two-level block at a field bz (mT).

    alpha follows the branch that starts as |-1,up> below the anti-crossing
    and rotates into |0,dn> above it: (alpha, beta) -> (1, 0) far below and
    (0, 1) far above, with alpha = beta = 2^-1/2 at the center.
    """
    h11, h22, coupling = _basic_block(params, bz)
    delta = 0.5 * (h11 - h22)
    mean = 0.5 * (h11 + h22)
    rad = np.hypot(delta, coupling)
    theta = np.arctan2(coupling, delta)  # in [0, pi] for coupling >= 0
    alpha = float(np.cos(theta / 2.0))
    beta = float(np.sin(theta / 2.0))
    return MixingCoefficients(alpha=alpha, beta=beta,
                              energy_upper=float(mean + rad),
                              energy_lower=float(mean - rad))


# ---------------------------------------------------------------------------
# Fermi-contact / dipolar decomposition and spin density
# ---------------------------------------------------------------------------

def fermi_dipolar(a_zz: float, a_perp: float, convention: str = "standard"):
    """Split an axial hyperfine tensor into Fermi contact f and dipolar d.

    The standard axial decomposition A_zz = f + 2d, A_perp = f - d gives
    f = (A_zz + 2 A_perp)/3 and d = (A_zz - A_perp)/3. The alternative
    convention="printed" uses A_zz = f + d, A_perp = f - 2d instead; it is
    kept selectable for comparison but does not reproduce the measured
    decomposition of this defect.
    """
    if convention == "standard":
        f = (a_zz + 2.0 * a_perp) / 3.0
        d = (a_zz - a_perp) / 3.0
    elif convention == "printed":
        d = (a_zz - a_perp) / 3.0
        f = a_zz - d
    else:
        raise ValueError("convention must be 'standard' or 'printed'")
    return f, d


def invert_fermi_dipolar(f: float, d: float, convention: str = "standard"):
    """Reconstruct (A_zz, A_perp) from (f, d); exact inverse of fermi_dipolar."""
    if convention == "standard":
        return f + 2.0 * d, f - d
    if convention == "printed":
        return f + d, f - 2.0 * d
    raise ValueError("convention must be 'standard' or 'printed'")


@dataclass(frozen=True)
class SpinDensityResult:
    """Orbital composition of the unpaired spin density at the nucleus.

    c_s_sq and c_p_sq are the normalized 2s/2p weights of the local orbital,
    eta the fraction of total spin density on the site.
    """

    f: float
    d: float
    c_s_sq: float
    c_p_sq: float
    eta: float

    def __post_init__(self):
        if abs(self.c_s_sq + self.c_p_sq - 1.0) > 1e-9:
            raise ValueError("orbital weights must sum to 1")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")


def spin_density(f: float, d: float,
                 constants: AtomicConstants = CARBON_13) -> SpinDensityResult:
    """Invert the contact/dipolar couplings for orbital weights and density.

    |c_s|^2 eta = |f| / a_2s and |c_p|^2 eta = |d| / b_2p with the tabulated
    per-unit-density couplings; eta is their sum and the weights are
    normalized. Magnitudes are used because the measured couplings carry a
    common negative sign for this nucleus.
    """
    if constants.a_2s_mhz <= 0 or constants.b_2p_mhz <= 0:
        raise ValueError("atomic constants must be positive")
    s_part = abs(f) / constants.a_2s_mhz
    p_part = abs(d) / constants.b_2p_mhz
    eta = s_part + p_part
    if eta == 0:
        raise ValueError("f and d are both zero")
    return SpinDensityResult(f=f, d=d, c_s_sq=s_part / eta, c_p_sq=p_part / eta,
                             eta=eta)
