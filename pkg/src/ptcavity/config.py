"""JSON experiment configuration.

A config file is a single JSON object with an optional ``scenario`` name and
flat sections.  Every key is optional; unknown keys are rejected.  All
lengths are in wavelengths.

    {
      "scenario": "fig2",
      "run":        {"round_trips": 60, "power_floor": 1e-12, "snapshots": [], "jobs": 1},
      "cavity":     {"f": 1e5, "L": 95000, "f1": 1e5, "loss": 0.18,
                     "transmittance": 0.01, "detuning": 0.0, "linear_gain": false},
      "gain":       {"g_p": 0.2, "w_p": 483, "s": null},
      "excitation": {"w_e": 40, "t_p": 5, "tau_p": 1, "amplitude": 1, "x0": 0},
      "grid":       {"n": 4096, "width": 2048},
      "canonical":  {"dt": null, "periods": 3, "every": 10},
      "sweep":      {"parameter": "gain.s", "start": 0, "stop": 483, "count": 11}
    }

``gain.s = null`` means w_p / 2.  ``excitation.w_e = "matched"`` means the
TEM00 waist of the emulated oscillator.
"""
import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .cavity import CavityConfig, Excitation, GainProfile, Grid
from .errors import ConfigError, PTCavityError

SCENARIOS = ("fig2", "hermitian-control", "matched-waist", "modes", "canonical", "sweep")
SPECTRAL_SCENARIOS = ("fig2", "hermitian-control", "matched-waist", "sweep")

DEFAULTS = {
    "run": {"round_trips": 60, "power_floor": 1e-12, "snapshots": [], "jobs": 1},
    "cavity": {
        "f": 1.0e5,
        "L": 0.95e5,
        "f1": 1.0e5,
        "loss": 0.18,
        "transmittance": 0.01,
        "detuning": 0.0,
        "linear_gain": False,
        "edge_tol": 1e-6,
    },
    "gain": {"g_p": 0.2, "w_p": 483.0, "s": None},
    "excitation": {"w_e": 40.0, "t_p": 5.0, "tau_p": 1.0, "amplitude": 1.0, "x0": 0.0},
    "grid": {"n": 4096, "width": 2048.0},
    "canonical": {"dt": None, "periods": 3.0, "every": 10},
    "sweep": {"parameter": "gain.s", "start": 0.0, "stop": None, "count": 11},
}

# scenario presets, applied before user values
PRESETS = {
    "hermitian-control": {"gain": {"s": 0.0}, "excitation": {"x0": 10.0}},
    "matched-waist": {"excitation": {"w_e": "matched"}},
}


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved experiment: scenario, cavity and run settings."""

    scenario: str
    cavity: CavityConfig
    round_trips: int = 60
    power_floor: float = 1e-12
    snapshots: tuple = ()
    jobs: int = 1
    canonical_dt: float = None
    canonical_periods: float = 3.0
    canonical_every: int = 10
    sweep: SweepAxis = None
    raw: dict = field(default=None, compare=False, hash=False, repr=False)

    def to_dict(self):
        """The resolved configuration as a JSON-ready dict."""
        return copy.deepcopy(self.raw)


def _merge(base, update, where):
    for key, value in update.items():
        if key not in base:
            loc = f"{where}.{key}" if where else key
            raise ConfigError(f"unknown configuration key '{loc}'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"section '{key}' must be an object")
            _merge(base[key], value, key)
        else:
            base[key] = value


def _number(section, key, value, kind=float, positive=False, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{section}.{key}' must be a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"'{section}.{key}' must be an integer, got {value!r}")
        value = int(value)
    else:
        value = float(value)
    if not np.isfinite(value):
        raise ConfigError(f"'{section}.{key}' must be finite")
    if positive and not value > 0:
        raise ConfigError(f"'{section}.{key}' must be positive, got {value!r}")
    return value


def resolve(user):
    """Apply scenario presets and defaults to a parsed config dict."""
    if not isinstance(user, dict):
        raise ConfigError("configuration must be a JSON object")
    user = copy.deepcopy(user)
    scenario = user.pop("scenario", "fig2")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario '{scenario}' (expected one of {', '.join(SCENARIOS)})")
    cfg = copy.deepcopy(DEFAULTS)
    _merge(cfg, PRESETS.get(scenario, {}), "")
    _merge(cfg, user, "")

    try:
        c, g, e, gr = cfg["cavity"], cfg["gain"], cfg["excitation"], cfg["grid"]
        w_p = _number("gain", "w_p", g["w_p"], positive=True)
        s = w_p / 2.0 if g["s"] is None else _number("gain", "s", g["s"])
        g["s"] = s
        gain = GainProfile(_number("gain", "g_p", g["g_p"]), w_p, s)
        if not isinstance(c["linear_gain"], bool):
            raise ConfigError("'cavity.linear_gain' must be true or false")
        grid = Grid(_number("grid", "n", gr["n"], int, positive=True),
                    _number("grid", "width", gr["width"], positive=True))
        base = CavityConfig(
            f=_number("cavity", "f", c["f"], positive=True),
            L=_number("cavity", "L", c["L"], positive=True),
            f1=_number("cavity", "f1", c["f1"], positive=True),
            loss=_number("cavity", "loss", c["loss"]),
            transmittance=_number("cavity", "transmittance", c["transmittance"]),
            gain=gain,
            detuning=_number("cavity", "detuning", c["detuning"]),
            grid=grid,
            linear_gain=c["linear_gain"],
            edge_tol=_number("cavity", "edge_tol", c["edge_tol"], positive=True),
        )
        w_e = e["w_e"]
        if w_e == "matched":
            w_e = base.oscillator_params().waist
            e["w_e"] = w_e
        exc = Excitation(
            w_e=_number("excitation", "w_e", w_e, positive=True),
            t_p=_number("excitation", "t_p", e["t_p"]),
            tau_p=_number("excitation", "tau_p", e["tau_p"]),
            amplitude=_number("excitation", "amplitude", e["amplitude"]),
            x0=_number("excitation", "x0", e["x0"]),
        )
        cavity = base.with_(excitation=exc)
    except ConfigError:
        raise
    except (PTCavityError, ValueError) as err:
        raise ConfigError(str(err)) from err

    r = cfg["run"]
    snaps = r["snapshots"]
    if not isinstance(snaps, list):
        raise ConfigError("'run.snapshots' must be a list of round-trip indices")
    snaps = tuple(sorted({_number("run", "snapshots", v, int) for v in snaps}))
    round_trips = _number("run", "round_trips", r["round_trips"], int, positive=True)

    k = cfg["canonical"]
    sweep = None
    if scenario == "sweep":
        sw = cfg["sweep"]
        name = sw["parameter"]
        if not isinstance(name, str) or name.count(".") != 1:
            raise ConfigError("'sweep.parameter' must look like 'section.key'")
        sec, key = name.split(".")
        if sec not in ("cavity", "gain", "excitation") or key not in DEFAULTS[sec]:
            raise ConfigError(f"cannot sweep over '{name}'")
        stop = sw["stop"]
        if stop is None:
            stop = w_p if name == "gain.s" else None
        if stop is None:
            raise ConfigError("'sweep.stop' is required for this parameter")
        count = _number("sweep", "count", sw["count"], int, positive=True)
        start = _number("sweep", "start", sw["start"])
        stop = _number("sweep", "stop", stop)
        sw["stop"] = stop
        values = tuple(float(v) for v in np.linspace(start, stop, count))
        sweep = SweepAxis(name, values)

    if scenario in SPECTRAL_SCENARIOS:
        period = 2.0 * np.pi / cavity.oscillator_params().omega
        needed = exc.t_p + 3.0 * exc.tau_p + 3.0 * period
        if round_trips < needed:
            raise ConfigError(
                f"'run.round_trips' = {round_trips} is too short: scenario '{scenario}' "
                f"needs at least {int(np.ceil(needed))} (excitation end + 3 periods)"
            )

    resolved = {"scenario": scenario, **cfg}
    return ExperimentSpec(
        scenario=scenario,
        cavity=cavity,
        round_trips=round_trips,
        power_floor=_number("run", "power_floor", r["power_floor"]),
        snapshots=snaps,
        jobs=_number("run", "jobs", r["jobs"], int, positive=True),
        canonical_dt=_number("canonical", "dt", k["dt"], positive=True, allow_none=True),
        canonical_periods=_number("canonical", "periods", k["periods"], positive=True),
        canonical_every=_number("canonical", "every", k["every"], int, positive=True),
        sweep=sweep,
        raw=resolved,
    )


def loads(text):
    """Parse and resolve a config from a JSON string."""
    if not text.strip():
        return resolve({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"JSON parse error at line {err.lineno}, column {err.colno}: {err.msg}") from err
    return resolve(data)


def load_config(path):
    """Read, validate and resolve a JSON config file (an empty file means all defaults)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read config '{path}': {err}") from err
    return loads(text)


def apply_override(raw, parameter, value):
    """Copy of a resolved config dict with ``section.key`` set to ``value``."""
    out = copy.deepcopy(raw)
    sec, key = parameter.split(".")
    out[sec][key] = value
    return out
