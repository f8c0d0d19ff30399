"""Parameter estimation: multi-exponential fits, correlation-function fits,
resonance-map fits and lifetime assignment.

Weighted least squares throughout, with a trust-region damped least-squares
optimizer (scipy.optimize.least_squares). Exponential time constants are
optimized in log space with variable projection: at every candidate set of
time constants the amplitudes (and baseline) are the exact weighted linear
least-squares solution. Goodness of fit is the regularized upper incomplete
gamma function Q(nu/2, chi2/2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.special import gammaincc

from . import hyperfine as hf
from . import ratemodel as rm
from .spinham import SX as _SX

_SX_OP = np.kron(_SX, np.eye(2, dtype=complex))

TAU_COLLAPSE_REL = 0.01          # two time constants this close flag a degenerate fit
AMBIGUITY_REL = 0.05             # assignment score separation below this is ambiguous


@dataclass(frozen=True)
class Trace:
    """A measured curve: abscissa x, ordinate y, optional per-point sigma."""

    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("abscissa must be strictly increasing")
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            object.__setattr__(self, "sigma", s)
            if s.shape != x.shape:
                raise ValueError("sigma length mismatch")
            if np.any(s <= 0):
                raise ValueError("sigma must be positive")

    def weights(self, poisson_default: bool = True) -> np.ndarray:
        """1/sigma; Poisson shot noise (floor 1 count) when sigma is absent."""
        if self.sigma is not None:
            return 1.0 / self.sigma
        if poisson_default:
            return 1.0 / np.sqrt(np.maximum(self.y, 1.0))
        return np.ones_like(self.y)


@dataclass(frozen=True)
class FitReport:
    """Fit outcome: estimates, 1-sigma uncertainties and fit quality."""

    model: str
    params: dict
    uncertainties: dict
    chi2: float
    nu: int
    q: float
    converged: bool
    n_iter: int
    flags: tuple = ()

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("degrees of freedom must be positive")


def goodness_of_fit(chi2: float, nu: int) -> float:
    """Q(nu/2, chi2/2), the probability of exceeding chi2 by chance.

    Regularized upper incomplete gamma function (series expansion for small
    arguments, continued fraction for large); Q(0, nu) = 1 and Q decreases
    monotonically with chi2.
    """
    if nu < 1:
        raise ValueError("nu must be a positive integer")
    if chi2 < 0:
        raise ValueError("chi2 must be nonnegative")
    return float(gammaincc(nu / 2.0, chi2 / 2.0))


# ---------------------------------------------------------------------------
# Multi-exponential fits (variable projection)
# ---------------------------------------------------------------------------

def _exp_design(t: np.ndarray, taus: np.ndarray, rising: bool,
                baseline: bool) -> np.ndarray:
    cols = [np.ones_like(t)] if baseline else []
    for tau in taus:
        e = np.exp(-np.clip(t / tau, 0.0, 700.0))
        cols.append(1.0 - e if rising else e)
    return np.column_stack(cols)


def _tau_bounds(t: np.ndarray) -> tuple[float, float]:
    positive = t[t > 0]
    lo = positive.min() * 0.5 if positive.size else 1e-6
    return np.log(lo), np.log(t.max() * 3.0)


def _tau_starts(t, n_comp, n_starts, seed):
    lo, hi = _tau_bounds(t)
    base = np.linspace(lo, hi, n_comp + 2)[1:-1]
    rng = np.random.default_rng(seed)
    starts = [base]
    for _ in range(n_starts - 1):
        starts.append(np.clip(base + rng.normal(0.0, 0.7, n_comp), lo + 1e-9, hi - 1e-9))
    return starts, (lo, hi)


def _numeric_covariance(resid_fn, x_opt, chi2, nu):
    """Scaled covariance from a central-difference Jacobian at the optimum."""
    x_opt = np.asarray(x_opt, dtype=float)
    n = len(x_opt)
    cols = []
    for i in range(n):
        h = 1e-6 * max(abs(x_opt[i]), 1e-3)
        xp, xm = x_opt.copy(), x_opt.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((resid_fn(xp) - resid_fn(xm)) / (2 * h))
    jac = np.column_stack(cols)
    try:
        cov = np.linalg.pinv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return np.full((n, n), np.nan)
    return cov * (chi2 / nu if nu > 0 else 1.0)


def fit_multiexp(trace: Trace, n_components: int, baseline: bool = True,
                 rising: bool = True, n_starts: int = 5, seed: int = 0,
                 max_nfev: int = 2000) -> FitReport:
    """Fit y = c0 + sum_i A_i (1 - exp(-t/tau_i)) (or pure decays).

    Time constants are optimized in log space with multi-start seeding
    (log-spaced across the data span plus jittered restarts); amplitudes are
    solved exactly at every step (variable projection). Poisson weights
    sigma = sqrt(max(y, 1)) apply when the trace carries no sigma. Two time
    constants within 1% of each other flag the fit as degenerate.
    """
    if not 1 <= n_components <= 3:
        raise ValueError("n_components must be 1, 2 or 3")
    n_free = 2 * n_components + (1 if baseline else 0)
    if len(trace.x) < n_free + 1:
        raise ValueError("not enough points for the requested model")
    t, y = trace.x, trace.y
    w = trace.weights()

    def solve_amps(taus):
        phi = _exp_design(t, taus, rising, baseline) * w[:, None]
        amps, *_ = np.linalg.lstsq(phi, y * w, rcond=None)
        return amps, phi

    def vp_resid(log_tau):
        amps, phi = solve_amps(np.exp(log_tau))
        return phi @ amps - y * w

    starts, (lo, hi) = _tau_starts(t, n_components, n_starts, seed)
    best = None
    total_nfev = 0
    for x0 in starts:
        try:
            res = least_squares(vp_resid, x0, method="trf", bounds=(lo, hi),
                                xtol=1e-12, ftol=1e-10, max_nfev=max_nfev)
        except Exception:
            continue
        total_nfev += res.nfev
        chi2 = 2.0 * res.cost
        if best is None or chi2 < best[0]:
            best = (chi2, res)
    if best is None:
        raise RuntimeError("all multi-start fits failed")
    chi2, res = best
    taus = np.exp(res.x)
    order = np.argsort(taus)
    taus = taus[order]
    amps_all, _ = solve_amps(taus)
    c0 = amps_all[0] if baseline else 0.0
    amps = amps_all[1:] if baseline else amps_all

    flags = []
    if not res.success:
        flags.append("non-convergence: iteration limit or stalled step")
    for i in range(n_components - 1):
        if abs(taus[i + 1] - taus[i]) < TAU_COLLAPSE_REL * taus[i + 1]:
            flags.append("degenerate: two time constants within 1%")
            break

    nu = len(t) - n_free
    params = {}
    if baseline:
        params["baseline"] = float(c0)
    for i in range(n_components):
        params[f"amp{i + 1}"] = float(amps[i])
        params[f"tau{i + 1}"] = float(taus[i])
    names = list(params)

    def full_resid(vec):
        d = dict(zip(names, vec))
        cur_taus = np.array([d[f"tau{i + 1}"] for i in range(n_components)])
        cur_amps = np.array([d[f"amp{i + 1}"] for i in range(n_components)])
        phi = _exp_design(t, cur_taus, rising, baseline=False)
        model = phi @ cur_amps + (d["baseline"] if baseline else 0.0)
        return (model - y) * w

    cov = _numeric_covariance(full_resid, [params[k] for k in names], chi2, nu)
    uncertainties = {k: float(np.sqrt(max(cov[i, i], 0.0)))
                     for i, k in enumerate(names)}
    return FitReport(
        model=f"multiexp{n_components}" + ("_rise" if rising else "_decay"),
        params=params,
        uncertainties=uncertainties,
        chi2=float(chi2),
        nu=nu,
        q=goodness_of_fit(chi2, nu),
        converged=res.success,
        n_iter=int(total_nfev),
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class ModelSelection:
    """Outcome of comparing 1-, 2- and 3-component fits."""

    chosen: int
    reports: dict
    flags: tuple = ()


def model_select(trace: Trace, baseline: bool = True, rising: bool = True,
                 q_threshold: float = 1e-10, small_amp_frac: float = 0.10,
                 seed: int = 0) -> ModelSelection:
    """Fit 1..3 components, discard models with Q below threshold and prefer
    the fewest components among the acceptable ones.

    Triple fits whose smallest amplitude is below small_amp_frac of the
    others are flagged (the extra component is not doing real work). When
    every model is rejected the best-Q model is returned with a warning
    flag.
    """
    reports = {}
    flags = []
    for n in (1, 2, 3):
        try:
            reports[n] = fit_multiexp(trace, n, baseline=baseline, rising=rising,
                                      seed=seed)
        except ValueError:
            continue
    if not reports:
        raise ValueError("trace too short for any exponential model")
    acceptable = [n for n, rep in reports.items() if rep.q >= q_threshold]
    if acceptable:
        chosen = min(acceptable)
    else:
        chosen = max(reports, key=lambda n: reports[n].q)
        flags.append("all models rejected by goodness of fit; returning best Q")
    if 3 in reports:
        amps = np.abs([reports[3].params[f"amp{i}"] for i in (1, 2, 3)])
        if amps.min() < small_amp_frac * np.median(amps):
            flags.append("triple fit has one much smaller amplitude")
            if chosen == 3 and 2 in acceptable:
                chosen = 2
    return ModelSelection(chosen=chosen, reports=reports, flags=tuple(flags))


@dataclass(frozen=True)
class SharedLifetimeFit:
    """Joint fit of several curves sharing one set of time constants.

    amplitudes[r, k] is the amplitude of time constant k in curve r;
    amplitude_sigmas holds the matching linear-solve uncertainties.
    """

    taus: np.ndarray
    tau_sigmas: np.ndarray
    amplitudes: np.ndarray
    amplitude_sigmas: np.ndarray
    baselines: np.ndarray
    chi2: float
    nu: int
    q: float
    converged: bool


def fit_shared_lifetimes(traces, n_components: int, baseline: bool = True,
                         rising: bool = True, n_starts: int = 8,
                         seed: int = 0) -> SharedLifetimeFit:
    """Variable-projection fit of shared time constants across curves.

    Physically motivated by pulse protocols that permute amplitudes between
    curves while leaving the decay constants untouched; sharing the
    constants makes every component well determined as long as it carries a
    large amplitude in at least one curve.
    """
    traces = list(traces)
    if len(traces) < 1:
        raise ValueError("need at least one trace")
    t = traces[0].x
    for tr in traces[1:]:
        if not np.array_equal(tr.x, t):
            raise ValueError("shared-lifetime fits need a common abscissa")
    ws = [tr.weights() for tr in traces]
    ys = [tr.y for tr in traces]

    def solve_all(taus):
        phi = _exp_design(t, taus, rising, baseline)
        resids, amps, covs = [], [], []
        for y, w in zip(ys, ws):
            pw = phi * w[:, None]
            a, *_ = np.linalg.lstsq(pw, y * w, rcond=None)
            amps.append(a)
            resids.append(pw @ a - y * w)
            covs.append(np.linalg.pinv(pw.T @ pw))
        return amps, covs, np.concatenate(resids)

    def vp_resid(log_tau):
        return solve_all(np.exp(log_tau))[2]

    starts, (lo, hi) = _tau_starts(t, n_components, n_starts, seed)
    best = None
    for x0 in starts:
        res = least_squares(vp_resid, x0, method="trf", bounds=(lo, hi),
                            xtol=1e-12, ftol=1e-10)
        chi2 = 2.0 * res.cost
        if best is None or chi2 < best[0]:
            best = (chi2, res)
    chi2, res = best
    order = np.argsort(np.exp(res.x))
    taus = np.exp(res.x)[order]
    amps, covs, _ = solve_all(taus)
    k0 = 1 if baseline else 0
    amplitudes = np.array([a[k0:][order] for a in amps])
    amp_sig = np.array([np.sqrt(np.diag(c))[k0:][order] for c in covs])
    baselines = np.array([a[0] if baseline else 0.0 for a in amps])
    n_free = n_components + len(traces) * (n_components + (1 if baseline else 0))
    nu = len(t) * len(traces) - n_free

    # tau uncertainties from the projected 1-d profile (numeric, scaled)
    cov = _numeric_covariance(lambda lx: solve_all(np.exp(lx))[2],
                              np.log(taus), chi2, nu)
    tau_sig = taus * np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return SharedLifetimeFit(
        taus=taus, tau_sigmas=tau_sig, amplitudes=amplitudes,
        amplitude_sigmas=amp_sig, baselines=baselines, chi2=float(chi2),
        nu=nu, q=goodness_of_fit(chi2, nu), converged=res.success,
    )


# ---------------------------------------------------------------------------
# Photon-correlation fit
# ---------------------------------------------------------------------------

def fit_g2(trace: Trace, decay_rates, radiative: float,
           initial: tuple[float, float] | None = None,
           seed: int = 0) -> FitReport:
    """Fit the five-level g2 with two free parameters: pump and total
    shelving rate (split equally over the triplet sublevels).

    The triplet decay rates and the radiative rate are held fixed (they are
    known from independent measurements). Dimensionless correlation data is
    fit unweighted unless the trace carries sigmas.
    """
    decay = np.asarray(decay_rates, dtype=float)
    if decay.shape != (3,) or decay.min() <= 0:
        raise ValueError("need three positive triplet decay rates")
    w = trace.weights(poisson_default=False)
    taus = trace.x

    def model(pump, gamma_et):
        params = rm.RateParams(pump, radiative, gamma_et / 3, gamma_et / 3,
                               gamma_et / 3, *decay)
        return rm.g2_curve(params, taus)[:, 1]

    def resid(logx):
        pump, gamma_et = np.exp(logx)
        return (model(pump, gamma_et) - trace.y) * w

    if initial is None:
        initial = (radiative / 3.0, 1.0 / 80.0)
    res = least_squares(resid, np.log(initial), method="trf",
                        bounds=(np.log(1e-8), np.log(1e3)), xtol=1e-12, ftol=1e-12)
    pump, gamma_et = np.exp(res.x)
    chi2 = 2.0 * res.cost
    nu = len(taus) - 2
    cov = _numeric_covariance(
        lambda v: (model(v[0], v[1]) - trace.y) * w, [pump, gamma_et], chi2, nu)
    flags = () if res.success else ("non-convergence",)
    return FitReport(
        model="g2_5level",
        params={"pump": float(pump), "gamma_et": float(gamma_et)},
        uncertainties={"pump": float(np.sqrt(max(cov[0, 0], 0))),
                       "gamma_et": float(np.sqrt(max(cov[1, 1], 0)))},
        chi2=float(chi2), nu=nu, q=goodness_of_fit(chi2, nu),
        converged=res.success, n_iter=int(res.nfev), flags=flags,
    )


# ---------------------------------------------------------------------------
# Hyperfine resonance-map fit
# ---------------------------------------------------------------------------

def _visible_pairs(w, v, op, window, threshold):
    """Eigenvalue pairs whose x-drive lines fall in the window and clear the
    relative intensity threshold; mirrors hyperfine_resonances."""
    lo, hi = window
    pairs, freqs, weights = [], [], []
    for i in range(6):
        for j in range(i + 1, 6):
            f = w[j] - w[i]
            if not lo <= f <= hi:
                continue
            pairs.append((i, j))
            freqs.append(f)
            weights.append(abs(v[:, i].conj() @ (op @ v[:, j])) ** 2)
    if not freqs:
        return [], np.empty(0)
    weights = np.asarray(weights)
    peak = weights.max()
    keep = weights >= threshold * peak if peak > 0 else weights >= threshold
    pairs = [p for p, k in zip(pairs, keep) if k]
    return pairs, np.asarray(freqs)[keep]


def fit_hyperfine(points, initial: dict, fit_g: bool = True,
                  intensity_threshold: float = 1e-4) -> FitReport:
    """Least-squares spin-Hamiltonian fit to (B_z, frequency) resonances.

    A coarse pass matches each measured frequency to the nearest visible
    model resonance at its field (this can misassociate where branches
    cross); polish passes then freeze each point's eigenvalue-pair
    association and re-solve the resulting smooth problem until the
    associations stop changing. initial supplies starting values for d, e,
    a_zz, a_perp and g.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 5:
        raise ValueError("need at least 5 (B_z, frequency) points")
    n_params = 5 if fit_g else 4
    if len(pts) <= n_params:
        raise ValueError("need more points than free parameters")
    flags = []
    if np.unique(pts[:, 0]).size == 1:
        flags.append("rank-deficient geometry: all points at a single field")
    fields = np.unique(pts[:, 0])
    fmin, fmax = pts[:, 1].min(), pts[:, 1].max()
    window = (max(fmin - 300.0, 0.0), fmax + 300.0)
    names = ["d", "e", "a_zz", "a_perp"] + (["g"] if fit_g else [])
    x0 = np.array([initial[k] for k in names])
    g_fixed = initial.get("g", 2.0)

    def build(vec):
        d = dict(zip(names, vec))
        base = hf.TripletHamiltonianParams(d["d"], d["e"], d.get("g", g_fixed))
        return hf.HyperfineParams.axial(base, d["a_zz"], d["a_perp"])

    def eigensystems(vec):
        params = build(vec)
        out = {}
        for bz in fields:
            h = hf.electronuclear_hamiltonian(params.with_field((0, 0, bz)))
            out[bz] = np.linalg.eigh(h)
        return out

    def resid(vec):
        try:
            systems = eigensystems(vec)
        except ValueError:
            return np.full(len(pts), 1e6)
        op = _SX_OP
        out = np.empty(len(pts))
        for bz, (w, v) in systems.items():
            pairs, freqs = _visible_pairs(w, v, op, window, intensity_threshold)
            sel = pts[:, 0] == bz
            if not freqs.size:
                out[sel] = 1e6
                continue
            out[sel] = [np.min(np.abs(freqs - f)) for f in pts[sel, 1]]
        return out

    def associations(vec):
        systems = eigensystems(vec)
        op = _SX_OP
        assoc = []
        for bz, f in pts:
            w, v = systems[bz]
            pairs, freqs = _visible_pairs(w, v, op, window, intensity_threshold)
            if not freqs.size:
                assoc.append((0, 0))
                continue
            assoc.append(pairs[int(np.argmin(np.abs(freqs - f)))])
        return tuple(assoc)

    def fixed_resid(vec, assoc):
        try:
            systems = eigensystems(vec)
        except ValueError:
            return np.full(len(pts), 1e6)
        out = np.empty(len(pts))
        for k, (bz, f) in enumerate(pts):
            w, _ = systems[bz]
            i, j = assoc[k]
            out[k] = (w[j] - w[i]) - f
        return out

    lo = [x0[0] * 0.7, 1.0, -abs(x0[2]) * 3 - 1, -abs(x0[3]) * 3 - 1]
    hi = [x0[0] * 1.3, x0[0] * 0.6, abs(x0[2]) * 3 + 1, abs(x0[3]) * 3 + 1]
    if fit_g:
        lo.append(1.5)
        hi.append(2.5)
    res = least_squares(resid, x0, method="trf", bounds=(lo, hi),
                        xtol=1e-10, ftol=1e-10, diff_step=1e-4)
    assoc = associations(res.x)
    for _ in range(4):
        res = least_squares(fixed_resid, res.x, args=(assoc,), method="trf",
                            bounds=(lo, hi), xtol=1e-12, ftol=1e-12,
                            diff_step=1e-6)
        new_assoc = associations(res.x)
        if new_assoc == assoc:
            break
        assoc = new_assoc
    chi2 = 2.0 * res.cost
    nu = len(pts) - len(names)
    cov = _numeric_covariance(lambda v: fixed_resid(v, assoc), res.x, chi2, nu)
    params = {k: float(v) for k, v in zip(names, res.x)}
    if not fit_g:
        params["g"] = float(g_fixed)
    unc = {k: float(np.sqrt(max(cov[i, i], 0))) for i, k in enumerate(names)}
    if not res.success:
        flags.append("non-convergence")
    return FitReport(
        model="hyperfine_map", params=params, uncertainties=unc,
        chi2=float(chi2), nu=nu, q=goodness_of_fit(chi2, nu),
        converged=res.success, n_iter=int(res.nfev), flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# Lifetime assignment from pulse-variant amplitude patterns
# ---------------------------------------------------------------------------

_LEVELS = ("plus", "minus", "zero")


def _swap_map(swap):
    if swap is None:
        return {}
    a, b = swap
    if a not in _LEVELS or b not in _LEVELS or a == b:
        raise ValueError(f"invalid swap {swap!r}")
    return {a: b, b: a}


@dataclass(frozen=True)
class LifetimeAssignment:
    """Mapping of clustered time constants to triplet sublevels."""

    mapping: dict | None
    cluster_taus: tuple
    ambiguous: bool
    scores: tuple = ()
    note: str = ""

    def tau_of(self, level: str) -> float:
        if self.mapping is None:
            raise ValueError("no assignment available")
        inv = {v: k for k, v in self.mapping.items()}
        return inv[level]


def _extract_components(report: FitReport):
    """(tau, amp, amp_sigma) triples from a multiexp FitReport."""
    out = []
    for i in itertools.count(1):
        key = f"tau{i}"
        if key not in report.params:
            break
        out.append((report.params[key], report.params[f"amp{i}"],
                    report.uncertainties.get(f"amp{i}", 0.0)))
    return out


def assign_lifetimes(entries, cluster_tol: float = 0.30,
                     significance: float = 2.0) -> LifetimeAssignment:
    """Assign clustered time constants to triplet sublevels.

    entries is a sequence of (swap, report) pairs where swap names the two
    sublevels exchanged by the pulse before the decay (None for the plain
    measurement) and report is a multi-exponential FitReport. Time constants
    from all reports are clustered within the relative tolerance; a
    permutation of {plus, minus, zero} over the clusters is then scored by
    how well a single set of per-level base amplitudes, permuted per pulse
    and rescaled per report, reproduces the observed amplitudes (weighted
    log-domain least squares, components below the significance cut
    skipped).

    A plain measurement plus a single pulse is structurally ambiguous (the
    amplitude table cannot distinguish an assignment from its twin with the
    two pulsed levels relabelled); two pulses on different transitions
    resolve it. The assignment is reported ambiguous when the two best
    permutations score within a few percent or when clustering does not
    yield exactly three groups.
    """
    entries = [(_swap_map(swap), report) for swap, report in entries]
    if len(entries) < 2:
        raise ValueError("need at least two reports sharing time constants")
    comps = []  # (tau, amp, sigma, entry index)
    for idx, (_, report) in enumerate(entries):
        for tau, amp, sig in _extract_components(report):
            comps.append((tau, amp, sig, idx))
    comps.sort(key=lambda c: c[0])

    clusters: list[list] = []
    for comp in comps:
        if clusters and comp[0] <= clusters[-1][-1][0] * (1.0 + cluster_tol):
            clusters[-1].append(comp)
        else:
            clusters.append([comp])
    centers = tuple(float(np.exp(np.mean([np.log(c[0]) for c in group])))
                    for group in clusters)
    if len(clusters) != 3:
        return LifetimeAssignment(mapping=None, cluster_taus=centers,
                                  ambiguous=True,
                                  note=f"expected 3 time-constant clusters, got {len(clusters)}")

    n_unknowns = 3 + len(entries)  # per-level base amps, per-report scales
    scored = []
    for perm in itertools.permutations(_LEVELS):
        rows, rhs, wts = [], [], []
        for ci, group in enumerate(clusters):
            for tau, amp, sig, idx in group:
                if amp <= 0 or (sig > 0 and amp <= significance * sig):
                    continue
                swap_map = entries[idx][0]
                level = perm[ci]
                source = swap_map.get(level, level)
                row = np.zeros(n_unknowns)
                row[_LEVELS.index(source)] = 1.0
                row[3 + idx] = 1.0
                rows.append(row)
                rhs.append(np.log(amp))
                wts.append(amp / sig if sig > 0 else 1.0)
        if len(rows) < 4:
            scored.append((np.inf, perm))
            continue
        arr = np.array(rows) * np.array(wts)[:, None]
        vec = np.array(rhs) * np.array(wts)
        sol, *_ = np.linalg.lstsq(arr, vec, rcond=None)
        scored.append((float(((arr @ sol - vec) ** 2).sum()), perm))
    scored.sort(key=lambda s: s[0])
    best, runner = scored[0], scored[1]
    ambiguous = not np.isfinite(best[0]) or (
        runner[0] - best[0] <= 1e-9 + AMBIGUITY_REL * max(best[0], 1e-12))
    mapping = {centers[i]: best[1][i] for i in range(3)}
    return LifetimeAssignment(mapping=mapping, cluster_taus=centers,
                              ambiguous=ambiguous,
                              scores=tuple(s[0] for s in scored))


def reports_from_shared(fit: SharedLifetimeFit):
    """Per-curve FitReports carrying the shared time constants, for
    assign_lifetimes."""
    out = []
    n_curves, n_comp = fit.amplitudes.shape
    for r in range(n_curves):
        params = {"baseline": float(fit.baselines[r])}
        unc = {"baseline": 0.0}
        for k in range(n_comp):
            params[f"amp{k + 1}"] = float(fit.amplitudes[r, k])
            params[f"tau{k + 1}"] = float(fit.taus[k])
            unc[f"amp{k + 1}"] = float(fit.amplitude_sigmas[r, k])
            unc[f"tau{k + 1}"] = float(fit.tau_sigmas[k])
        out.append(FitReport(model="multiexp_shared", params=params,
                             uncertainties=unc, chi2=fit.chi2, nu=fit.nu,
                             q=fit.q, converged=fit.converged, n_iter=0))
    return out
