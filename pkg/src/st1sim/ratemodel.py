"""Five-level optical-cycle rate equations.

The model has a singlet ground state G, a singlet excited state E and three
metastable triplet sublevels |+>, |->, |0>. Optical pumping cycles G <-> E;
intersystem crossing shelves population from E into the triplet sublevels,
which decay back to G with sublevel-dependent lifetimes. Populations are
ordered (G, E, +, -, 0) throughout; times are ns, rates 1/ns.

Propagation eliminates G through population conservation, leaving a linear
system dm/dt = A m + b for m = (n_E, n_+, n_-, n_0). The inhomogeneous term
is folded into an augmented generator, so the pump-off (singular-A) case
needs no special handling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

LEVELS = ("ground", "excited", "plus", "minus", "zero")
TRIPLET_LEVELS = ("plus", "minus", "zero")


@dataclass(frozen=True)
class RateParams:
    """Transition rates of the five-level optical cycle, in 1/ns.

    pump drives G->E, radiative is the spontaneous E->G rate, pop_* are the
    intersystem-crossing rates E->|*> and dec_* the triplet decay rates
    |*>->G. The lifetime of a level is the reciprocal of the sum of its
    outgoing rates.
    """

    pump: float
    radiative: float
    pop_plus: float
    pop_minus: float
    pop_zero: float
    dec_plus: float
    dec_minus: float
    dec_zero: float

    def __post_init__(self):
        vals = [self.pump, self.radiative, self.pop_plus, self.pop_minus,
                self.pop_zero, self.dec_plus, self.dec_minus, self.dec_zero]
        if not all(np.isfinite(vals)):
            raise ValueError("rates must be finite")
        if min(vals) < 0:
            raise ValueError("rates must be nonnegative")
        if self.radiative <= 0:
            raise ValueError("radiative rate must be positive")

    @classmethod
    def from_lifetimes(cls, pump_ns, radiative_ns, population_ns, decay_ns):
        """Convenience constructor with times in ns instead of rates.

        population_ns and decay_ns are (plus, minus, zero) triples; pump_ns
        of 0 or inf means the pump is off.
        """
        inv = lambda t: 0.0 if (t == 0 or np.isinf(t)) else 1.0 / t
        p, m, z = population_ns
        dp, dm, dz = decay_ns
        return cls(inv(pump_ns), 1.0 / radiative_ns, inv(p), inv(m), inv(z),
                   inv(dp), inv(dm), inv(dz))

    @property
    def population_rates(self) -> np.ndarray:
        return np.array([self.pop_plus, self.pop_minus, self.pop_zero])

    @property
    def decay_rates(self) -> np.ndarray:
        return np.array([self.dec_plus, self.dec_minus, self.dec_zero])

    @property
    def gamma_et(self) -> float:
        """Total shelving rate out of E into the triplet."""
        return self.pop_plus + self.pop_minus + self.pop_zero

    @property
    def gamma_total(self) -> float:
        """Total decay rate of E (radiative plus shelving)."""
        return self.radiative + self.gamma_et

    @property
    def excited_lifetime(self) -> float:
        return 1.0 / self.gamma_total

    @property
    def triplet_lifetimes(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 1.0 / self.decay_rates

    def with_pump(self, pump: float) -> "RateParams":
        return RateParams(pump, self.radiative, self.pop_plus, self.pop_minus,
                          self.pop_zero, self.dec_plus, self.dec_minus, self.dec_zero)


@dataclass(frozen=True)
class Populations:
    """Occupation of (G, E, +, -, 0); dimensionless, sums to one."""

    ground: float
    excited: float
    plus: float
    minus: float
    zero: float

    def __post_init__(self):
        v = self.as_array()
        if v.min() < -1e-12:
            raise ValueError(f"negative population: {v.min()}")
        if abs(v.sum() - 1.0) > 1e-9:
            raise ValueError(f"populations must sum to 1, got {v.sum()}")

    def as_array(self) -> np.ndarray:
        return np.array([self.ground, self.excited, self.plus, self.minus, self.zero])

    @classmethod
    def from_array(cls, v) -> "Populations":
        v = np.asarray(v, dtype=float)
        if v.shape != (5,):
            raise ValueError("expected 5 components")
        # clamp numerically tiny negatives to zero on output
        v = np.where((v < 0) & (v > -1e-12), 0.0, v)
        return cls(*v)

    @classmethod
    def all_ground(cls) -> "Populations":
        return cls(1.0, 0.0, 0.0, 0.0, 0.0)

    def swapped(self, a: str, b: str) -> "Populations":
        """Exchange the occupation of two triplet sublevels (ideal pi-pulse)."""
        if a not in TRIPLET_LEVELS or b not in TRIPLET_LEVELS or a == b:
            raise ValueError(f"swap needs two distinct triplet levels, got {a!r}, {b!r}")
        d = {lvl: getattr(self, lvl) for lvl in LEVELS}
        d[a], d[b] = d[b], d[a]
        return Populations(**d)


@dataclass(frozen=True)
class RateMatrix:
    """Reduced system dm/dt = A m + b for m = (n_E, n_+, n_-, n_0)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a.setflags(write=False)
        self.b.setflags(write=False)


def build_rate_matrix(params: RateParams) -> RateMatrix:
    """Eliminate n_G by conservation and return the reduced (A, b)."""
    gp = params.pump
    a = np.array([
        [-(gp + params.gamma_total), -gp, -gp, -gp],
        [params.pop_plus, -params.dec_plus, 0.0, 0.0],
        [params.pop_minus, 0.0, -params.dec_minus, 0.0],
        [params.pop_zero, 0.0, 0.0, -params.dec_zero],
    ])
    b = np.array([gp, 0.0, 0.0, 0.0])
    return RateMatrix(a, b)


def _augmented(params: RateParams, integrate_excited: bool = False) -> np.ndarray:
    """Generator for z = (m, 1[, integral of n_E])."""
    rm = build_rate_matrix(params)
    n = 6 if integrate_excited else 5
    m = np.zeros((n, n))
    m[:4, :4] = rm.a
    m[:4, 4] = rm.b
    if integrate_excited:
        m[5, 0] = 1.0
    return m


def _embed(m: np.ndarray, total: float) -> np.ndarray:
    return np.concatenate([[total - m.sum()], m])


def propagate(params: RateParams, initial: Populations, t: float) -> Populations:
    """Evolve the populations for a time t >= 0 (matrix-exponential solution)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return initial
    v = initial.as_array()
    z = np.concatenate([v[1:], [1.0]])
    zt = expm(_augmented(params) * t) @ z
    return Populations.from_array(_embed(zt[:4], v.sum()))


def propagate_grid(params: RateParams, initial: Populations, times) -> np.ndarray:
    """Populations on a sorted time grid; returns an (n, 5) array.

    Uses exact stepwise propagators between grid points (the generator is
    constant, so the products compose exactly).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a nonempty 1-d grid")
    if times.min() < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted and nonnegative")
    gen = _augmented(params)
    v = initial.as_array()
    z = np.concatenate([v[1:], [1.0]])
    out = np.empty((len(times), 5))
    prev = 0.0
    for i, t in enumerate(times):
        if t != prev:
            z = expm(gen * (t - prev)) @ z
            prev = t
        out[i] = _embed(z[:4], v.sum())
    return out


def steady_state(params: RateParams) -> Populations:
    """Stationary populations under continuous pumping.

    With the pump off all population ends up in G. Under equal population
    rates the triplet occupations are proportional to their lifetimes.
    """
    if params.pump == 0:
        return Populations.all_ground()
    rm = build_rate_matrix(params)
    try:
        m = np.linalg.solve(rm.a, -rm.b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("no unique steady state (disconnected level?)") from exc
    return Populations.from_array(_embed(m, 1.0))


def fluorescence_rate(params: RateParams, pops: Populations) -> float:
    """Instantaneous fluorescence, radiative rate times excited population."""
    return params.radiative * pops.excited


def g2_curve(params: RateParams, tau_grid) -> np.ndarray:
    """Second-order photon correlation g2(tau) on a sorted delay grid.

    g2(tau) is the excited population at delay tau, starting from G after a
    detection event, normalized by the steady-state excited population.
    Returns an (n, 2) array of (tau, g2).
    """
    if params.pump <= 0:
        raise ValueError("g2 undefined for zero pump (steady excited population is 0)")
    tau_grid = np.asarray(tau_grid, dtype=float)
    if np.any(tau_grid < 0):
        raise ValueError("delays must be nonnegative")
    ref = steady_state(params).excited
    traj = propagate_grid(params, Populations.all_ground(), tau_grid)
    return np.column_stack([tau_grid, traj[:, 1] / ref])


# ---------------------------------------------------------------------------
# Ground-state recovery
# ---------------------------------------------------------------------------

# Rates closer than this (1/ns) to the total E decay use the degenerate branch.
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class RecoverySolution:
    """Closed-form expansion of n_G during a dark interval.

    n_G(t) = constant + gamma_amplitude * exp(-gamma_total t)
             + sum_i level_amplitudes[i] * exp(-level_rates[i] t)
             + linear_coeff * t * exp(-gamma_total t)

    The linear term only appears when a triplet decay rate is degenerate
    with gamma_total. Level order is (plus, minus, zero).
    """

    constant: float
    gamma_total: float
    gamma_amplitude: float
    level_rates: np.ndarray
    level_amplitudes: np.ndarray
    linear_coeff: float

    def __post_init__(self):
        self.level_rates.setflags(write=False)
        self.level_amplitudes.setflags(write=False)

    @property
    def c1(self) -> float:
        """Amplitude of the fast exp(-gamma_total t) term per unit n_G(0)."""
        ng0 = self.evaluate(0.0)
        return self.gamma_amplitude / ng0 if ng0 else np.nan

    @property
    def c0(self) -> float:
        """Constant term per unit n_G(0); the t->inf limit of n_G is constant."""
        ng0 = self.evaluate(0.0)
        return self.constant / ng0 if ng0 else np.nan

    def evaluate(self, t) -> np.ndarray | float:
        t = np.asarray(t, dtype=float)
        out = self.constant + self.gamma_amplitude * np.exp(-self.gamma_total * t)
        for rate, amp in zip(self.level_rates, self.level_amplitudes):
            out = out + amp * np.exp(-rate * t)
        if self.linear_coeff:
            out = out + self.linear_coeff * t * np.exp(-self.gamma_total * t)
        return out if out.ndim else float(out)


def recovery_solution(params: RateParams, swap: tuple[str, str] | None = None,
                      initial: Populations | None = None) -> RecoverySolution:
    """Exact dark-interval (pump off) expansion of the ground population.

    The initial populations default to the steady state under params.pump;
    swap exchanges two triplet sublevels first (ideal pi-pulse). An ideal
    swap exchanges the amplitudes of the affected exponentials while leaving
    all decay constants unchanged.
    """
    n0 = steady_state(params) if initial is None else initial
    if swap is not None:
        n0 = n0.swapped(*swap)
    gam = params.gamma_total
    ne0 = n0.excited
    pop = params.population_rates
    dec = params.decay_rates
    trip0 = np.array([n0.plus, n0.minus, n0.zero])

    gamma_amp = -ne0
    level_amp = np.zeros(3)
    linear = 0.0
    for i in range(3):
        if abs(gam - dec[i]) < DEGENERACY_TOL:
            # limiting branch: the cross term becomes t*exp(-gamma_total t)
            level_amp[i] = -trip0[i]
            linear -= pop[i] * ne0
        else:
            cross = pop[i] * ne0 / (gam - dec[i])
            level_amp[i] = -(trip0[i] + cross)
            gamma_amp += cross
    return RecoverySolution(
        constant=float(n0.as_array().sum()),
        gamma_total=gam,
        gamma_amplitude=gamma_amp,
        level_rates=dec.copy(),
        level_amplitudes=level_amp,
        linear_coeff=linear,
    )


def analytic_recovery(params: RateParams, dark_time,
                      swap: tuple[str, str] | None = None):
    """Ground-state population after a dark interval, from the closed form."""
    if np.any(np.asarray(dark_time) < 0):
        raise ValueError("dark_time must be nonnegative")
    return recovery_solution(params, swap=swap).evaluate(dark_time)


def integrated_fluorescence(params: RateParams, initial: Populations,
                            window: float) -> float:
    """Integral of the fluorescence rate over [0, window] under pumping."""
    if window < 0:
        raise ValueError("window must be nonnegative")
    v = initial.as_array()
    z = np.concatenate([v[1:], [1.0], [0.0]])
    zt = expm(_augmented(params, integrate_excited=True) * window) @ z
    return params.radiative * zt[5]


def simulate_recovery(params: RateParams, pulse_len: float, dark_times,
                      readout_window: float = 200.0,
                      swap: tuple[str, str] | None = None) -> np.ndarray:
    """Numeric ground-state-recovery pipeline.

    Pump from the ground state for pulse_len, optionally swap two triplet
    sublevels, evolve in the dark for each dark time, then integrate the
    fluorescence over the readout window under pumping. Returns (n, 2) rows
    of (dark_time, integrated signal). The integrated signal tracks the
    analytic ground-population recovery up to scale and offset for readout
    windows up to about 200 ns.
    """
    dark_times = np.asarray(dark_times, dtype=float)
    if dark_times.size == 0:
        raise ValueError("dark_times must not be empty")
    if np.any(dark_times < 0) or np.any(np.diff(dark_times) < 0):
        raise ValueError("dark_times must be sorted and nonnegative")
    finite = params.triplet_lifetimes[np.isfinite(params.triplet_lifetimes)]
    tau_max = float(finite.max()) if finite.size else 0.0
    if pulse_len < 5 * tau_max:
        warnings.warn("pulse_len shorter than ~5 triplet lifetimes; initial state "
                      "will not reach steady state", stacklevel=2)
    pumped = propagate(params, Populations.all_ground(), pulse_len)
    if swap is not None:
        pumped = pumped.swapped(*swap)
    dark = params.with_pump(0.0)
    traj = propagate_grid(dark, pumped, dark_times)
    signal = np.array([
        integrated_fluorescence(params, Populations.from_array(row), readout_window)
        for row in traj
    ])
    return np.column_stack([dark_times, signal])


def pulse_response_profile(params: RateParams, pulse_len: float,
                           window_len: float, n_points: int = 250) -> np.ndarray:
    """Sliding-window integrated fluorescence during a single long pulse.

    The emitter starts in G, the pump switches on at t=0, and a fixed-length
    integration window slides across the response, starting at the rising
    edge. Returns (n, 2) rows of (window offset, integrated signal). A
    double-exponential fit of the profile recovers a short time constant
    close to the reciprocal total shelving rate.
    """
    if not 0 < window_len < pulse_len:
        raise ValueError("need 0 < window_len < pulse_len")
    offsets = np.linspace(0.0, pulse_len - window_len, n_points)
    gen = _augmented(params, integrate_excited=True)
    z = np.array([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    ts = np.unique(np.concatenate([offsets, offsets + window_len]))
    cumulative = {}
    prev = None
    for t in ts:
        if prev is None:
            if t > 0:
                z = expm(gen * t) @ z
        else:
            z = expm(gen * (t - prev)) @ z
        cumulative[t] = z[5]
        prev = t
    signal = params.radiative * np.array(
        [cumulative[o + window_len] - cumulative[o] for o in offsets])
    return np.column_stack([offsets, signal])
