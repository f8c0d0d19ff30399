"""Ten-level rate model for optical nuclear spin polarization and readout.

The electro-nuclear level set couples the five-level optical cycle to a
spin-1/2 nucleus near the triplet level anti-crossing. Ground and excited
singlets split into nuclear doublets (G, E with m_I = +-1/2); the triplet
sublevels become |+1,+-1/2>, the unmixed shelves |0,+1/2> and |-1,-1/2>,
and the two anti-crossing mixed states
    |I>  = alpha|-1,+1/2> + beta|0,-1/2>
    |II> = alpha|0,-1/2>  - beta|-1,+1/2>.
Optical pumping and radiative decay preserve m_I; intersystem crossing into
and out of the mixed states carries |alpha|^2 / |beta|^2 branching weights,
which provides the nuclear spin-flip channel. Electron spin relaxation
between triplet sublevels is neglected (extension hook: add rates to the
generator returned by build_onp_model).

Level order used everywhere:
    0 G_up, 1 G_dn, 2 E_up, 3 E_dn, 4 T+_up, 5 T+_dn,
    6 |0,up>, 7 |I>, 8 |II>, 9 |-1,dn>.
Times ns, rates 1/ns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

LEVELS = ("g_up", "g_dn", "e_up", "e_dn", "tplus_up", "tplus_dn",
          "zero_up", "mixed_i", "mixed_ii", "minus_dn")

G_UP, G_DN, E_UP, E_DN = 0, 1, 2, 3
TPLUS_UP, TPLUS_DN, ZERO_UP, MIXED_I, MIXED_II, MINUS_DN = 4, 5, 6, 7, 8, 9

TRIPLET = (TPLUS_UP, TPLUS_DN, ZERO_UP, MIXED_I, MIXED_II, MINUS_DN)

# default readout integration horizon, ns (about twice the settling time)
READOUT_HORIZON = 15_000.0
SETTLE_THRESHOLD = 0.005


@dataclass(frozen=True)
class OnpModel:
    """Rates (1/ns) and mixing weights of the ten-level model.

    gamma is the per-sublevel triplet population rate far from the
    anti-crossing; gamma_plus/zero/minus the triplet decay rates; alpha and
    beta the mixed-state weights with alpha^2 + beta^2 = 1.
    """

    gamma: float
    gamma_plus: float
    gamma_zero: float
    gamma_minus: float
    alpha: float
    beta: float
    pump: float
    radiative: float

    def __post_init__(self):
        rates = [self.gamma, self.gamma_plus, self.gamma_zero, self.gamma_minus,
                 self.pump, self.radiative]
        if min(rates) < 0 or not all(np.isfinite(rates)):
            raise ValueError("rates must be finite and nonnegative")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > 1e-9:
            raise ValueError("mixing weights must satisfy alpha^2 + beta^2 = 1")

    @property
    def mixed_lifetime(self) -> float:
        """Lifetime of either mixed state, 1/(a^2 g_minus + b^2 g_zero) etc."""
        return 1.0 / (self.alpha**2 * self.gamma_minus + self.beta**2 * self.gamma_zero)

    def generator(self, pump_on: bool = True) -> np.ndarray:
        """Column-stochastic generator K with dn/dt = K n; columns sum to zero."""
        a2, b2 = self.alpha**2, self.beta**2
        g = self.gamma
        k = np.zeros((10, 10))

        def add(dst, src, rate):
            k[dst, src] += rate
            k[src, src] -= rate

        if pump_on and self.pump > 0:
            add(E_UP, G_UP, self.pump)
            add(E_DN, G_DN, self.pump)
        add(G_UP, E_UP, self.radiative)
        add(G_DN, E_DN, self.radiative)
        # shelving, m_I preserved; mixed states pick up branching weights
        add(TPLUS_UP, E_UP, g)
        add(TPLUS_DN, E_DN, g)
        add(ZERO_UP, E_UP, g)
        add(MINUS_DN, E_DN, g)
        add(MIXED_I, E_UP, a2 * g)
        add(MIXED_I, E_DN, b2 * g)
        add(MIXED_II, E_UP, b2 * g)
        add(MIXED_II, E_DN, a2 * g)
        # triplet decay back to the ground doublet
        add(G_UP, TPLUS_UP, self.gamma_plus)
        add(G_DN, TPLUS_DN, self.gamma_plus)
        add(G_UP, ZERO_UP, self.gamma_zero)
        add(G_DN, MINUS_DN, self.gamma_minus)
        add(G_UP, MIXED_I, a2 * self.gamma_minus)
        add(G_DN, MIXED_I, b2 * self.gamma_zero)
        add(G_UP, MIXED_II, b2 * self.gamma_minus)
        add(G_DN, MIXED_II, a2 * self.gamma_zero)
        return k


def build_onp_model(population_rate, decay_plus, decay_zero, decay_minus,
                    alpha, beta=None, pump=0.1, radiative=0.1) -> OnpModel:
    """Construct the model; beta defaults to sqrt(1 - alpha^2)."""
    if beta is None:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1] when beta is derived")
        beta = float(np.sqrt(1.0 - alpha**2))
    return OnpModel(gamma=population_rate, gamma_plus=decay_plus,
                    gamma_zero=decay_zero, gamma_minus=decay_minus,
                    alpha=alpha, beta=beta, pump=pump, radiative=radiative)


@dataclass(frozen=True)
class OnpResult:
    """Predictions of the ten-level model; optional fields are filled by
    whichever operation produced the result."""

    steady_state: np.ndarray | None = None
    n_up: float | None = None
    n_dn: float | None = None
    polarization: float | None = None
    fluorescence_up: float | None = None
    fluorescence_dn: float | None = None
    readout_contrast: float | None = None
    signal_contrast: float | None = None
    settle_time_ns: float | None = None


def ground_start(up: float = 0.5) -> np.ndarray:
    """Population vector with everything in the ground doublet."""
    if not 0.0 <= up <= 1.0:
        raise ValueError("up fraction must lie in [0, 1]")
    n = np.zeros(10)
    n[G_UP] = up
    n[G_DN] = 1.0 - up
    return n


def propagate(model: OnpModel, n0, t: float, pump_on: bool = True) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return expm(model.generator(pump_on) * t) @ np.asarray(n0, dtype=float)


def steady_state(model: OnpModel, n0=None) -> np.ndarray:
    """Stationary distribution under pumping (null space of the generator)."""
    k = model.generator(pump_on=True)
    # unique stationary vector when the chain is irreducible (alpha*beta != 0)
    w, v = np.linalg.eig(k)
    idx = int(np.argmin(np.abs(w)))
    vec = np.real(v[:, idx])
    vec = np.where(np.abs(vec) < 1e-14, 0.0, vec)
    if vec.sum() == 0:
        raise ValueError("degenerate stationary space")
    vec = vec / vec.sum()
    if vec.min() < -1e-9:
        raise ValueError("no nonnegative stationary vector (reducible chain?)")
    return np.clip(vec, 0.0, None)


def decay_to_ground(model: OnpModel, n) -> np.ndarray:
    """Final ground-doublet populations after complete pump-off decay.

    Uses the absorbing-chain branching fractions: for transient states T and
    ground-absorption rates R, the absorption probabilities are R (-T)^-1.
    Equivalent to propagating with the pump off until the excited and
    triplet occupancy is below 1e-9, but exact.
    """
    n = np.asarray(n, dtype=float)
    k = model.generator(pump_on=False)
    transient = [i for i in range(10) if i not in (G_UP, G_DN)]
    t_block = k[np.ix_(transient, transient)]
    r_block = k[np.ix_([G_UP, G_DN], transient)]
    absorb = r_block @ np.linalg.solve(-t_block, n[transient])
    out = np.zeros(10)
    out[G_UP] = n[G_UP] + absorb[0]
    out[G_DN] = n[G_DN] + absorb[1]
    return out


def polarize(model: OnpModel, pump_duration: float = 50_000.0,
             initial=None) -> OnpResult:
    """Pump to the optical steady state, release, and report the nuclear
    polarization (n_up - n_dn)/(n_up + n_dn) of the ground doublet."""
    n0 = ground_start() if initial is None else np.asarray(initial, dtype=float)
    pumped = propagate(model, n0, pump_duration, pump_on=True)
    final = decay_to_ground(model, pumped)
    n_up, n_dn = final[G_UP], final[G_DN]
    pol = (n_up - n_dn) / (n_up + n_dn)
    return OnpResult(steady_state=pumped, n_up=n_up, n_dn=n_dn, polarization=pol)


def _augmented_generator(model: OnpModel) -> np.ndarray:
    """Pump-on generator with an extra row accumulating the E occupancy."""
    k = np.zeros((11, 11))
    k[:10, :10] = model.generator(pump_on=True)
    k[10, E_UP] = 1.0
    k[10, E_DN] = 1.0
    return k


def readout(model: OnpModel, initial: str = "up",
            horizon: float = READOUT_HORIZON) -> float:
    """Integrated fluorescence while pumping from a definite nuclear state.

    Returns radiative_rate * integral of the excited-state occupancy over
    [0, horizon]; the horizon should exceed the settling time.
    """
    start = {"up": G_UP, "dn": G_DN}[initial]
    z = np.zeros(11)
    z[start] = 1.0
    zt = expm(_augmented_generator(model) * horizon) @ z
    return model.radiative * zt[10]


def readout_contrast(model: OnpModel, horizon: float = READOUT_HORIZON):
    """Fluorescence integrals per initial nuclear state and their contrast.

    Contrast is (F_dn - F_up) normalized by the mean of the two signals; the
    basic model assigns the +1/2 state (which feeds the long-lived shelf)
    the lower fluorescence, so the polarized state reads out dark.
    """
    f_up = readout(model, "up", horizon)
    f_dn = readout(model, "dn", horizon)
    contrast = (f_dn - f_up) / ((f_dn + f_up) / 2.0)
    return f_up, f_dn, contrast


def settle_time(model: OnpModel, initial: str = "up",
                threshold: float = SETTLE_THRESHOLD,
                horizon: float = 30_000.0, n_steps: int = 6000) -> float:
    """Time for the readout fluorescence to stay within threshold of steady.

    Measured on the pump-on transient starting from the given ground nuclear
    state (default the +1/2 state that the model polarizes into).
    """
    ss = steady_state(model)
    f_ss = ss[E_UP] + ss[E_DN]
    times = np.linspace(0.0, horizon, n_steps + 1)
    step = expm(model.generator(pump_on=True) * (times[1] - times[0]))
    n = ground_start(1.0 if initial == "up" else 0.0)
    dev = np.empty(n_steps + 1)
    for i in range(n_steps + 1):
        dev[i] = abs(n[E_UP] + n[E_DN] - f_ss) / f_ss
        if i < n_steps:
            n = step @ n
    outside = np.nonzero(dev > threshold)[0]
    if outside.size and outside[-1] + 1 > n_steps:
        raise ValueError("did not settle within the horizon")
    return float(times[outside[-1] + 1]) if outside.size else 0.0


def signal_contrast(model: OnpModel, pump_duration: float = 50_000.0,
                    horizon: float = READOUT_HORIZON) -> float:
    """Nuclear-spin signal: polarization times readout contrast."""
    pol = polarize(model, pump_duration).polarization
    return pol * readout_contrast(model, horizon)[2]


def predictions(model: OnpModel, pump_duration: float = 50_000.0,
                horizon: float = READOUT_HORIZON) -> OnpResult:
    """All headline predictions in one result."""
    pol = polarize(model, pump_duration)
    f_up, f_dn, contrast = readout_contrast(model, horizon)
    return OnpResult(
        steady_state=steady_state(model),
        n_up=pol.n_up,
        n_dn=pol.n_dn,
        polarization=pol.polarization,
        fluorescence_up=f_up,
        fluorescence_dn=f_dn,
        readout_contrast=contrast,
        signal_contrast=pol.polarization * contrast,
        settle_time_ns=settle_time(model),
    )


def transient(model: OnpModel, schedule, n_per_segment: int = 200):
    """Population traces over an alternating pump/dark schedule.

    schedule is a sequence of (duration_ns, pump_on) segments. Returns
    (times, populations) with populations of shape (n_times, 10).
    """
    if not schedule:
        raise ValueError("schedule must not be empty")
    n = ground_start()
    times = [0.0]
    rows = [n.copy()]
    t0 = 0.0
    for duration, pump_on in schedule:
        if duration <= 0:
            raise ValueError("segment durations must be positive")
        step = expm(model.generator(bool(pump_on)) * (duration / n_per_segment))
        for _ in range(n_per_segment):
            n = step @ n
            t0 += duration / n_per_segment
            times.append(t0)
            rows.append(n.copy())
    return np.asarray(times), np.asarray(rows)


def cycle_polarization(model: OnpModel, pump_duration: float = 50_000.0,
                       n_cycles: int = 1, initial=None) -> list[float]:
    """Ground-doublet polarization after each pump/full-decay cycle."""
    n = ground_start() if initial is None else np.asarray(initial, dtype=float)
    out = []
    for _ in range(n_cycles):
        n = decay_to_ground(model, propagate(model, n, pump_duration, pump_on=True))
        out.append(float((n[G_UP] - n[G_DN]) / (n[G_UP] + n[G_DN])))
    return out
