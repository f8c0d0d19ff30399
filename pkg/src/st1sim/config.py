"""Run configuration: sectioned key/value files with explicit units.

INI-style sections mirror the model parameter blocks ([rates], [spin],
[hyperfine], [onp], [atomic_constants], [fit]). Unknown sections or keys are
rejected; time and field quantities require a unit declaration. Rate values
accept the reciprocal shorthand "1/170" for (170 time units)^-1.

Named presets ship with the package (optical_rates.cfg, spin_params.cfg,
onp_basic.cfg); load_config() resolves plain names against the working
directory, the ST1SIM_CONFIG_DIR environment variable and finally the
packaged presets.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .constants import G_N_C13, MU_B_MHZ_PER_MT, AtomicConstants, CARBON_13
from .hyperfine import HyperfineParams
from .onp import OnpModel
from .ratemodel import RateParams
from .spinham import TripletHamiltonianParams

ENV_CONFIG_DIR = "ST1SIM_CONFIG_DIR"

_SCHEMA = {
    "rates": {"time_unit", "pump_rate", "radiative_rate",
              "population_rate_plus", "population_rate_minus", "population_rate_zero",
              "decay_rate_plus", "decay_rate_minus", "decay_rate_zero"},
    "spin": {"d_mhz", "e_mhz", "g", "field_unit", "b_field"},
    "hyperfine": {"a_zz_mhz", "a_perp_mhz", "a_xx_mhz", "a_yy_mhz",
                  "nuclear_zeeman", "g_n"},
    "onp": {"time_unit", "population_rate", "decay_rate_plus", "decay_rate_zero",
            "decay_rate_minus", "alpha", "beta", "pump_rate", "radiative_rate"},
    "atomic_constants": {"name", "a_2s_mhz", "b_2p_mhz", "g_n", "source"},
    "fit": {"components", "baseline", "rising", "seed", "n_starts"},
}

_TIME_SCALE = {"ns": 1.0, "us": 1e-3}  # rate multipliers to 1/ns


class ConfigError(Exception):
    """Malformed configuration (maps to the data-error exit code)."""


def _number(section: str, key: str, text: str) -> float:
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse number {text!r}") from exc


def _flag(section: str, key: str, text: str) -> bool:
    val = text.strip().lower()
    if val in ("on", "true", "yes", "1"):
        return True
    if val in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"[{section}] {key}: expected on/off, got {text!r}")


@dataclass(frozen=True)
class FitOptions:
    components: str = "auto"
    baseline: bool = True
    rising: bool = True
    seed: int = 0
    n_starts: int = 5

    def __post_init__(self):
        if self.components not in ("auto", "1", "2", "3"):
            raise ConfigError(f"[fit] components must be auto/1/2/3, got {self.components!r}")


@dataclass(frozen=True)
class RunConfig:
    rates: RateParams | None = None
    spin: TripletHamiltonianParams | None = None
    hyperfine: HyperfineParams | None = None
    onp: OnpModel | None = None
    atomic: AtomicConstants = CARBON_13
    fit: FitOptions = field(default_factory=FitOptions)

    def to_text(self) -> str:
        """Canonical serialization; parsing it back reproduces this config."""
        lines = []
        if self.rates is not None:
            r = self.rates
            lines += ["[rates]", "time_unit = ns",
                      f"pump_rate = {r.pump!r}",
                      f"radiative_rate = {r.radiative!r}",
                      f"population_rate_plus = {r.pop_plus!r}",
                      f"population_rate_minus = {r.pop_minus!r}",
                      f"population_rate_zero = {r.pop_zero!r}",
                      f"decay_rate_plus = {r.dec_plus!r}",
                      f"decay_rate_minus = {r.dec_minus!r}",
                      f"decay_rate_zero = {r.dec_zero!r}", ""]
        if self.spin is not None:
            s = self.spin
            bx, by, bz = s.b_field
            lines += ["[spin]", f"d_mhz = {s.d!r}", f"e_mhz = {s.e!r}",
                      f"g = {s.g!r}", "field_unit = mT",
                      f"b_field = {bx!r}, {by!r}, {bz!r}", ""]
        if self.hyperfine is not None:
            h = self.hyperfine
            lines += ["[hyperfine]", f"a_xx_mhz = {h.a_xx!r}",
                      f"a_yy_mhz = {h.a_yy!r}", f"a_zz_mhz = {h.a_zz!r}",
                      f"nuclear_zeeman = {'on' if h.nuclear_zeeman_enabled else 'off'}",
                      f"g_n = {h.g_n!r}", ""]
        if self.onp is not None:
            o = self.onp
            lines += ["[onp]", "time_unit = ns",
                      f"population_rate = {o.gamma!r}",
                      f"decay_rate_plus = {o.gamma_plus!r}",
                      f"decay_rate_zero = {o.gamma_zero!r}",
                      f"decay_rate_minus = {o.gamma_minus!r}",
                      f"alpha = {o.alpha!r}", f"beta = {o.beta!r}",
                      f"pump_rate = {o.pump!r}",
                      f"radiative_rate = {o.radiative!r}", ""]
        a = self.atomic
        lines += ["[atomic_constants]", f"name = {a.name}",
                  f"a_2s_mhz = {a.a_2s_mhz!r}", f"b_2p_mhz = {a.b_2p_mhz!r}",
                  f"g_n = {a.g_n!r}"]
        if a.source:
            lines.append(f"source = {a.source}")
        lines.append("")
        f = self.fit
        lines += ["[fit]", f"components = {f.components}",
                  f"baseline = {'on' if f.baseline else 'off'}",
                  f"rising = {'on' if f.rising else 'off'}",
                  f"seed = {f.seed}", f"n_starts = {f.n_starts}", ""]
        return "\n".join(lines)


def _require(parser, section, key):
    if not parser.has_option(section, key):
        raise ConfigError(f"[{section}] missing required key {key!r}")
    return parser.get(section, key)


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")

    rates = spin = hyper = onp_model = None
    atomic = CARBON_13
    fit = FitOptions()

    if parser.has_section("rates"):
        sec = "rates"
        unit = _require(parser, sec, "time_unit").strip()
        if unit not in _TIME_SCALE:
            raise ConfigError(f"[rates] time_unit must be ns or us, got {unit!r}")
        scale = _TIME_SCALE[unit]
        get = lambda key, default=0.0: (
            _number(sec, key, parser.get(sec, key)) * scale
            if parser.has_option(sec, key) else default)
        try:
            rates = RateParams(
                pump=get("pump_rate"),
                radiative=_number(sec, "radiative_rate",
                                  _require(parser, sec, "radiative_rate")) * scale,
                pop_plus=get("population_rate_plus"),
                pop_minus=get("population_rate_minus"),
                pop_zero=get("population_rate_zero"),
                dec_plus=get("decay_rate_plus"),
                dec_minus=get("decay_rate_minus"),
                dec_zero=get("decay_rate_zero"),
            )
        except ValueError as exc:
            raise ConfigError(f"[rates] {exc}") from exc

    if parser.has_section("spin"):
        sec = "spin"
        d = _number(sec, "d_mhz", _require(parser, sec, "d_mhz"))
        e = _number(sec, "e_mhz", _require(parser, sec, "e_mhz"))
        g = _number(sec, "g", parser.get(sec, "g")) if parser.has_option(sec, "g") else 2.0
        b = (0.0, 0.0, 0.0)
        if parser.has_option(sec, "b_field"):
            unit = _require(parser, sec, "field_unit").strip()
            parts = parser.get(sec, "b_field").split(",")
            if len(parts) != 3:
                raise ConfigError("[spin] b_field must be three comma-separated values")
            vec = [_number(sec, "b_field", p) for p in parts]
            if unit == "mT":
                b = tuple(vec)
            elif unit == "MHz":
                # field quoted as g mu_B |B| / h; convert per component
                b = tuple(v / (g * MU_B_MHZ_PER_MT) for v in vec)
            else:
                raise ConfigError(f"[spin] field_unit must be mT or MHz, got {unit!r}")
        try:
            spin = TripletHamiltonianParams(d, e, g, b)
        except ValueError as exc:
            raise ConfigError(f"[spin] {exc}") from exc

    if parser.has_section("hyperfine"):
        sec = "hyperfine"
        if spin is None:
            raise ConfigError("[hyperfine] requires a [spin] section")
        num = lambda key: _number(sec, key, parser.get(sec, key))
        if parser.has_option(sec, "a_perp_mhz"):
            if parser.has_option(sec, "a_xx_mhz") or parser.has_option(sec, "a_yy_mhz"):
                raise ConfigError("[hyperfine] give either a_perp_mhz or a_xx/a_yy, not both")
            a_xx = a_yy = num("a_perp_mhz")
        else:
            a_xx = num("a_xx_mhz") if parser.has_option(sec, "a_xx_mhz") else 0.0
            a_yy = num("a_yy_mhz") if parser.has_option(sec, "a_yy_mhz") else 0.0
        a_zz = num("a_zz_mhz") if parser.has_option(sec, "a_zz_mhz") else 0.0
        nz = _flag(sec, "nuclear_zeeman", parser.get(sec, "nuclear_zeeman")) \
            if parser.has_option(sec, "nuclear_zeeman") else False
        g_n = num("g_n") if parser.has_option(sec, "g_n") else G_N_C13
        hyper = HyperfineParams(spin, a_xx, a_yy, a_zz, nz, g_n)

    if parser.has_section("onp"):
        sec = "onp"
        unit = _require(parser, sec, "time_unit").strip()
        if unit not in _TIME_SCALE:
            raise ConfigError(f"[onp] time_unit must be ns or us, got {unit!r}")
        scale = _TIME_SCALE[unit]
        num = lambda key: _number(sec, key, _require(parser, sec, key))
        alpha = num("alpha")
        beta = (_number(sec, "beta", parser.get(sec, "beta"))
                if parser.has_option(sec, "beta") else None)
        try:
            onp_model = OnpModel(
                gamma=num("population_rate") * scale,
                gamma_plus=num("decay_rate_plus") * scale,
                gamma_zero=num("decay_rate_zero") * scale,
                gamma_minus=num("decay_rate_minus") * scale,
                alpha=alpha,
                beta=beta if beta is not None else float((1.0 - alpha**2) ** 0.5),
                pump=num("pump_rate") * scale,
                radiative=num("radiative_rate") * scale,
            )
        except ValueError as exc:
            raise ConfigError(f"[onp] {exc}") from exc

    if parser.has_section("atomic_constants"):
        sec = "atomic_constants"
        num = lambda key: _number(sec, key, _require(parser, sec, key))
        atomic = AtomicConstants.from_unit_couplings(
            name=_require(parser, sec, "name").strip(),
            a_2s_mhz=num("a_2s_mhz"),
            b_2p_mhz=num("b_2p_mhz"),
            g_n=_number(sec, "g_n", parser.get(sec, "g_n"))
            if parser.has_option(sec, "g_n") else G_N_C13,
            source=parser.get(sec, "source").strip()
            if parser.has_option(sec, "source") else "",
        )

    if parser.has_section("fit"):
        sec = "fit"
        kw = {}
        if parser.has_option(sec, "components"):
            kw["components"] = parser.get(sec, "components").strip()
        for key in ("baseline", "rising"):
            if parser.has_option(sec, key):
                kw[key] = _flag(sec, key, parser.get(sec, key))
        for key in ("seed", "n_starts"):
            if parser.has_option(sec, key):
                kw[key] = int(_number(sec, key, parser.get(sec, key)))
        fit = FitOptions(**kw)

    return RunConfig(rates=rates, spin=spin, hyperfine=hyper, onp=onp_model,
                     atomic=atomic, fit=fit)


def load_config(name_or_path: str | Path) -> RunConfig:
    """Load a config by path, by name in ST1SIM_CONFIG_DIR, or by preset name."""
    candidate = Path(name_or_path)
    if candidate.exists():
        return parse_config(candidate.read_text())
    env_dir = os.environ.get(ENV_CONFIG_DIR)
    if env_dir:
        alt = Path(env_dir) / candidate.name
        if alt.exists():
            return parse_config(alt.read_text())
    preset = resources.files("st1sim.presets").joinpath(candidate.name)
    if preset.is_file():
        return parse_config(preset.read_text())
    raise ConfigError(f"config not found: {name_or_path}")
