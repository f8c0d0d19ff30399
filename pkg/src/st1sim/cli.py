"""Command-line interface: simulation, fitting and analysis workflows.

Exit codes: 0 success, 1 usage error, 2 malformed config/data, 3 fit
non-convergence. Output is deterministic: CSV numbers carry 12 significant
digits, JSON keys have a fixed order, and every stochastic code path is
controlled by --seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import fitting, hyperfine, onp, ratemodel, spinham
from .config import ConfigError, RunConfig, load_config

SWAP_NAMES = {
    "none": None,
    "plus-zero": ("plus", "zero"),
    "minus-zero": ("minus", "zero"),
    "plus-minus": ("plus", "minus"),
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class ConvergenceError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Data ingestion and result emission
# ---------------------------------------------------------------------------

_SCHEMAS = {
    "time-series": ("t_ns", "counts", "sigma"),
    "spectrum": ("freq_MHz", "signal", "sigma"),
}


def _read_rows(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataError(f"{path}: empty file")
    return rows


def _numeric(path, rows, n_cols):
    out = np.empty((len(rows), n_cols))
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise DataError(f"{path}: line {i + 2}: expected {n_cols} columns, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError as exc:
                raise DataError(f"{path}: line {i + 2}: non-numeric cell {cell!r}") from exc
    return out


def load_trace(path, schema: str = "time-series") -> fitting.Trace:
    """Load a two- or three-column curve; rows sorted, duplicates rejected."""
    if schema not in _SCHEMAS:
        raise DataError(f"unknown schema {schema!r}")
    names = _SCHEMAS[schema]
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if header not in (list(names[:2]), list(names)):
        raise DataError(f"{path}: header {header} does not match schema {schema!r} "
                        f"(expected {','.join(names[:2])}[,{names[2]}])")
    data = _numeric(path, rows[1:], len(header))
    order = np.argsort(data[:, 0], kind="stable")
    data = data[order]
    if np.any(np.diff(data[:, 0]) == 0):
        raise DataError(f"{path}: duplicate abscissa values")
    sigma = data[:, 2] if data.shape[1] == 3 else None
    try:
        return fitting.Trace(data[:, 0], data[:, 1], sigma)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def load_resonances(path) -> np.ndarray:
    """Load (Bz_mT, freq_MHz) rows; several lines per field are expected."""
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if header != ["Bz_mT", "freq_MHz"]:
        raise DataError(f"{path}: header {header} must be Bz_mT,freq_MHz")
    data = _numeric(path, rows[1:], 2)
    order = np.lexsort((data[:, 1], data[:, 0]))
    data = data[order]
    dup = np.all(np.diff(data, axis=0) == 0, axis=1)
    if np.any(dup):
        raise DataError(f"{path}: duplicate (Bz, freq) rows")
    return data


def format_csv(header, rows) -> str:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"


def report_to_dict(report: fitting.FitReport) -> dict:
    status = "ok" if report.converged and not report.flags else ";".join(
        report.flags or ("non-convergence",))
    return {
        "model": report.model,
        "params": report.params,
        "uncertainties": report.uncertainties,
        "chi2": report.chi2,
        "nu": report.nu,
        "Q": report.q,
        "status": status,
    }


def emit_results(results, fmt: str, path=None) -> str:
    """Serialize results (CSV table or JSON object) and optionally write them.

    CSV input is a (header, rows) pair; anything else is JSON-serialized
    with stable key order. Returns the emitted text.
    """
    if fmt == "csv":
        header, rows = results
        text = format_csv(header, rows)
    elif fmt == "json":
        if isinstance(results, fitting.FitReport):
            results = report_to_dict(results)
        text = json.dumps(results, indent=2) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise DataError(f"cannot write {path}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return text


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _need(cfg: RunConfig, block: str):
    value = getattr(cfg, block)
    if value is None:
        raise DataError(f"config is missing the [{block}] block")
    return value


def _grid(args):
    if args.linear:
        return np.linspace(args.tmin, args.tmax, args.points)
    lo = args.tmin if args.tmin > 0 else args.tmax / 1000.0
    return np.geomspace(lo, args.tmax, args.points)


def _add_common(p, config=True):
    if config:
        p.add_argument("--config", default=None, help="config file or preset name")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dry-run", action="store_true",
                   help="validate inputs and exit without computing")


def _load(args) -> RunConfig:
    if args.config is None:
        raise UsageError("this subcommand needs --config")
    return load_config(args.config)


def build_parser() -> _Parser:
    parser = _Parser(prog="st1sim", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True)

    sim = top.add_parser("simulate", help="forward simulations").add_subparsers(
        dest="cmd", required=True)
    fit = top.add_parser("fit", help="parameter estimation").add_subparsers(
        dest="cmd", required=True)
    ana = top.add_parser("analyze", help="closed-form analyses").add_subparsers(
        dest="cmd", required=True)

    p = sim.add_parser("rate", help="analytic ground-state recovery curves")
    _add_common(p)
    p.add_argument("--tmin", type=float, default=10.0)
    p.add_argument("--tmax", type=float, default=14000.0)
    p.add_argument("--points", type=int, default=140)
    p.add_argument("--linear", action="store_true")

    p = sim.add_parser("g2", help="photon autocorrelation curve")
    _add_common(p)
    p.add_argument("--tmax", type=float, default=20000.0)
    p.add_argument("--points", type=int, default=200)

    p = sim.add_parser("recovery", help="numeric pulsed recovery pipeline")
    _add_common(p)
    p.add_argument("--pulse-len", type=float, default=20000.0)
    p.add_argument("--window", type=float, default=200.0)
    p.add_argument("--swap", choices=sorted(SWAP_NAMES), default="none")
    p.add_argument("--tmin", type=float, default=10.0)
    p.add_argument("--tmax", type=float, default=14000.0)
    p.add_argument("--points", type=int, default=140)
    p.add_argument("--linear", action="store_true")

    p = sim.add_parser("pulse-response", help="sliding-window pulse profile")
    _add_common(p)
    p.add_argument("--pulse-len", type=float, default=6000.0)
    p.add_argument("--window", type=float, default=150.0)
    p.add_argument("--points", type=int, default=250)

    p = sim.add_parser("field-scan", help="transition frequencies vs field angle")
    _add_common(p)
    p.add_argument("--axis", choices=("theta", "phi"), default="theta")
    p.add_argument("--points", type=int, default=181)

    p = sim.add_parser("lac-map", help="hyperfine level map vs B_z")
    _add_common(p)
    p.add_argument("--bmin", type=float, default=0.0)
    p.add_argument("--bmax", type=float, default=60.0)
    p.add_argument("--points", type=int, default=121)

    p = sim.add_parser("resonances", help="resonance map vs B_z")
    _add_common(p)
    p.add_argument("--bmin", type=float, default=20.0)
    p.add_argument("--bmax", type=float, default=60.0)
    p.add_argument("--points", type=int, default=81)
    p.add_argument("--fmin", type=float, default=0.0)
    p.add_argument("--fmax", type=float, default=2000.0)
    p.add_argument("--drive", choices=("x", "y", "z", "iso"), default="x")
    p.add_argument("--threshold", type=float, default=1e-4)

    p = sim.add_parser("onp", help="nuclear polarization and readout predictions")
    _add_common(p)
    p.add_argument("--pump-duration", type=float, default=50000.0)
    p.add_argument("--horizon", type=float, default=onp.READOUT_HORIZON)

    p = fit.add_parser("multiexp", help="multi-exponential fit with model selection")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", choices=sorted(_SCHEMAS), default="time-series")
    p.add_argument("--components", choices=("auto", "1", "2", "3"), default=None)
    p.add_argument("--decay", action="store_true", help="fit pure decays instead of recoveries")
    p.add_argument("--no-baseline", action="store_true")

    p = fit.add_parser("g2", help="pump and shelving rate from g2 data")
    _add_common(p)
    p.add_argument("--data", required=True)

    p = fit.add_parser("hyperfine", help="spin-Hamiltonian fit to a resonance map")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--fix-g", action="store_true")

    p = fit.add_parser("assign-lifetimes", help="assign time constants to sublevels")
    _add_common(p)
    p.add_argument("--trace", action="append", required=True, metavar="LABEL=PATH",
                   help="labelled curve, label one of " + "/".join(sorted(SWAP_NAMES)))

    p = ana.add_parser("fermi-dipolar", help="contact/dipolar decomposition")
    _add_common(p, config=False)
    p.add_argument("--azz", type=float, required=True)
    p.add_argument("--aperp", type=float, required=True)
    p.add_argument("--convention", choices=("standard", "printed"), default="standard")

    p = ana.add_parser("spin-density", help="orbital weights and site density")
    _add_common(p)
    p.add_argument("--f", type=float, required=True, dest="f_mhz")
    p.add_argument("--d", type=float, required=True, dest="d_mhz")

    p = ana.add_parser("r12", help="spin-spin separation bound from D")
    _add_common(p, config=False)
    p.add_argument("--d", type=float, required=True, dest="d_mhz")

    return parser


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    cmd = args.cmd
    if cmd in ("rate", "g2", "recovery", "pulse-response"):
        cfg = _load(args)
        rates = _need(cfg, "rates")
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        if cmd == "rate":
            grid = _grid(args)
            cols = [grid]
            header = ["dark_ns"]
            for name in ("none", "plus-zero", "minus-zero", "plus-minus"):
                cols.append(ratemodel.analytic_recovery(rates, grid, SWAP_NAMES[name]))
                header.append("nG_" + name.replace("-", "_"))
            emit_results((header, np.column_stack(cols)), "csv", args.out)
        elif cmd == "g2":
            taus = np.linspace(0.0, args.tmax, args.points)
            curve = ratemodel.g2_curve(rates, taus)
            emit_results((["tau_ns", "g2"], curve), "csv", args.out)
        elif cmd == "recovery":
            curve = ratemodel.simulate_recovery(
                rates, args.pulse_len, _grid(args), args.window,
                SWAP_NAMES[args.swap])
            emit_results((["dark_ns", "signal"], curve), "csv", args.out)
        else:
            prof = ratemodel.pulse_response_profile(
                rates, args.pulse_len, args.window, args.points)
            emit_results((["offset_ns", "signal"], prof), "csv", args.out)
        return 0

    if cmd == "field-scan":
        cfg = _load(args)
        spin = _need(cfg, "spin")
        if np.linalg.norm(spin.b_field) == 0:
            raise DataError("field-scan needs a nonzero b_field in [spin]")
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        span = np.pi if args.axis == "theta" else 2 * np.pi
        table = spinham.field_scan(spin, args.axis, np.linspace(0.0, span, args.points))
        emit_results((["angle_rad", "f1_MHz", "f2_MHz", "f3_MHz"], table),
                     "csv", args.out)
        return 0

    if cmd in ("lac-map", "resonances"):
        cfg = _load(args)
        hyper = _need(cfg, "hyperfine")
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        if cmd == "lac-map":
            grid = np.linspace(args.bmin, args.bmax, args.points)
            if grid[0] == 0.0:
                grid[0] = 1e-6  # strictly increasing from zero field
            lmap = hyperfine.lac_map(hyper, grid)
            header = ["Bz_mT"] + [f"E{k + 1}_MHz" for k in range(6)]
            emit_results((header, np.column_stack([lmap.fields_mt, lmap.energies])),
                         "csv", args.out)
        else:
            rows = []
            for bz in np.linspace(args.bmin, args.bmax, args.points):
                table = hyperfine.hyperfine_resonances(
                    hyper.with_field((0, 0, bz)), (args.fmin, args.fmax),
                    drive=args.drive, threshold=args.threshold)
                for freq, inten in table:
                    rows.append((bz, freq, inten))
            emit_results((["Bz_mT", "freq_MHz", "intensity"], np.array(rows)),
                         "csv", args.out)
        return 0

    # onp predictions
    cfg = _load(args)
    model = _need(cfg, "onp")
    if args.dry_run:
        print("dry-run: inputs ok")
        return 0
    res = onp.predictions(model, args.pump_duration, args.horizon)
    payload = {
        "polarization": res.polarization,
        "n_up": res.n_up,
        "n_dn": res.n_dn,
        "fluorescence_up": res.fluorescence_up,
        "fluorescence_dn": res.fluorescence_dn,
        "readout_contrast": res.readout_contrast,
        "signal_contrast": res.signal_contrast,
        "settle_time_ns": res.settle_time_ns,
        "steady_state": dict(zip(onp.LEVELS, map(float, res.steady_state))),
    }
    emit_results(payload, "json", args.out)
    return 0


def _check_convergence(report: fitting.FitReport):
    if not report.converged:
        raise ConvergenceError(f"{report.model}: fit did not converge")


def _cmd_fit(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.cmd == "multiexp":
        trace = load_trace(args.data, args.schema)
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        components = args.components or cfg.fit.components
        rising = cfg.fit.rising and not args.decay
        baseline = cfg.fit.baseline and not args.no_baseline
        if components == "auto":
            sel = fitting.model_select(trace, baseline=baseline, rising=rising,
                                       seed=args.seed)
            for n in sorted(sel.reports):
                rep = sel.reports[n]
                print(f"n={n}: chi2={rep.chi2:.6g} nu={rep.nu} Q={rep.q:.3g}")
            print(f"selected: {sel.chosen}" + (f"  [{'; '.join(sel.flags)}]" if sel.flags else ""))
            report = sel.reports[sel.chosen]
        else:
            report = fitting.fit_multiexp(trace, int(components), baseline=baseline,
                                          rising=rising, seed=args.seed)
        _check_convergence(report)
        emit_results(report, "json", args.out)
        return 0

    if args.cmd == "g2":
        rates = _need(cfg, "rates")
        trace = load_trace(args.data, "time-series")
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        report = fitting.fit_g2(trace, rates.decay_rates, rates.radiative,
                                seed=args.seed)
        _check_convergence(report)
        emit_results(report, "json", args.out)
        return 0

    if args.cmd == "hyperfine":
        hyper = _need(cfg, "hyperfine")
        points = load_resonances(args.data)
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        initial = {"d": hyper.base.d, "e": hyper.base.e, "a_zz": hyper.a_zz,
                   "a_perp": hyper.a_perp, "g": hyper.base.g}
        report = fitting.fit_hyperfine(points, initial, fit_g=not args.fix_g)
        _check_convergence(report)
        emit_results(report, "json", args.out)
        return 0

    # assign-lifetimes
    labelled = {}
    for item in args.trace:
        if "=" not in item:
            raise UsageError(f"--trace expects LABEL=PATH, got {item!r}")
        label, path = item.split("=", 1)
        if label not in SWAP_NAMES:
            raise UsageError(f"unknown trace label {label!r}")
        if label in labelled:
            raise UsageError(f"duplicate trace label {label!r}")
        labelled[label] = load_trace(path, "time-series")
    if len(labelled) < 2:
        raise DataError("assign-lifetimes needs at least two labelled traces")
    if args.dry_run:
        print("dry-run: inputs ok")
        return 0
    traces = list(labelled.values())
    shared = fitting.fit_shared_lifetimes(traces, 3, rising=cfg.fit.rising,
                                          baseline=cfg.fit.baseline,
                                          seed=args.seed)
    if not shared.converged:
        raise ConvergenceError("shared-lifetime fit did not converge")
    reports = fitting.reports_from_shared(shared)
    entries = [(SWAP_NAMES[label], rep)
               for label, rep in zip(labelled, reports)]
    assignment = fitting.assign_lifetimes(entries)
    payload = {
        "taus_ns": [float(t) for t in shared.taus],
        "assignment": {f"{tau:.12g}": level
                       for tau, level in (assignment.mapping or {}).items()},
        "ambiguous": assignment.ambiguous,
        "note": assignment.note,
        "chi2": shared.chi2,
        "nu": shared.nu,
        "Q": shared.q,
    }
    emit_results(payload, "json", args.out)
    return 0


def _cmd_analyze(args) -> int:
    if args.cmd == "fermi-dipolar":
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        f, d = hyperfine.fermi_dipolar(args.azz, args.aperp, args.convention)
        print(f"f = {f:.6g} MHz")
        print(f"d = {d:.6g} MHz")
        if args.out:
            emit_results({"f_MHz": f, "d_MHz": d}, "json", args.out)
        return 0

    if args.cmd == "spin-density":
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.dry_run:
            print("dry-run: inputs ok")
            return 0
        res = hyperfine.spin_density(args.f_mhz, args.d_mhz, cfg.atomic)
        print(f"|c_s|^2 = {res.c_s_sq:.4g}")
        print(f"|c_p|^2 = {res.c_p_sq:.4g}")
        print(f"eta = {res.eta:.4g}")
        if args.out:
            emit_results({"c_s_sq": res.c_s_sq, "c_p_sq": res.c_p_sq,
                          "eta": res.eta}, "json", args.out)
        return 0

    if args.dry_run:
        print("dry-run: inputs ok")
        return 0
    est = spinham.r12_estimate(args.d_mhz)
    print(f"r12 <= {est.r12_angstrom:.4g} angstrom")
    if args.out:
        emit_results({"r12_angstrom": est.r12_angstrom}, "json", args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.group == "simulate":
            return _cmd_simulate(args)
        if args.group == "fit":
            return _cmd_fit(args)
        return _cmd_analyze(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ConfigError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
