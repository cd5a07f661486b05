"""Scenario configuration: INI-style sections of ``key = value`` pairs.

Every key has a type, a default and a one-line description; ``describe()``
renders the whole schema for ``--help-config``.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass

from .worldline import BUILTIN_KINDS, R_MIN

TASKS = ("verify", "flux", "sweep", "simulate", "fields")
SUITES = ("moments", "field", "stress", "flux", "balance")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(" ", "").split(",") if x)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    parse.__name__ = "|".join(options)
    return parse


def _gauge(text: str) -> str:
    kind, _, args = text.partition(":")
    if kind not in ("zero", "sin", "poly"):
        raise ValueError("expected zero, sin:AMP,FREQ or poly:C0,C1,...")
    if kind == "sin" and len(_floats(args)) != 2:
        raise ValueError("sin needs amplitude and frequency")
    if kind == "poly":
        _floats(args)
    return text


_TYPE_NAMES = {float: "float", int: "int", str: "text", _floats: "float list", _ints: "int list",
               _names: "name list", _gauge: "gauge"}

# section -> key -> (parser, default, description)
SCHEMA: dict[str, dict[str, tuple]] = {
    "scenario": {
        "name": (str, "unnamed", "label echoed in reports"),
        "task": (_choice(*TASKS), "verify", "task run by the 'run' subcommand"),
        "seed": (int, "7", "seed for random sample points"),
        "workers": (int, "1", "threads for independent sweep radii"),
    },
    "trajectory": {
        "kind": (_choice(*BUILTIN_KINDS), "hyperbolic", "built-in worldline"),
        "velocity": (_floats, "0,0,0,0,0", "uniform: spatial six-velocity components"),
        "g": (float, "1.0", "hyperbolic: proper acceleration"),
        "axis": (int, "1", "hyperbolic: spatial axis of motion"),
        "radius": (float, "1.0", "circular/helical: orbit radius"),
        "beta": (float, "0.5", "circular/helical: orbital speed"),
        "drift": (float, "0.0", "helical: drift speed parameter along axis 3"),
    },
    "charge": {"e": (float, "1.0", "charge")},
    "constants": {
        "m": (float, "1.0", "renormalized mass constant"),
        "mu": (float, "0.0", "spin constant"),
        "nu": (_gauge, "zero", "gauge function: zero | sin:AMP,FREQ | poly:C0,C1,..."),
    },
    "quadrature": {
        "n_theta": (_ints, "6,6,6", "sphere nodes per polar angle"),
        "n_phi": (int, "12", "sphere nodes in azimuth"),
        "moment_nodes": (int, "24", "nodes per axis for the moment identities"),
        "epsrel": (float, "1e-11", "relative tolerance of proper-time quadrature"),
        "max_panels": (int, "2000", "panel limit of proper-time quadrature"),
    },
    "flux": {
        "r": (float, "0.7", "tube radius"),
        "r_alt": (float, "2.0", "second radius for the distance-independence check"),
        "tau0": (float, "0.0", "start of the proper-time window"),
        "tau1": (float, "1.0", "end of the proper-time window"),
    },
    "sweep": {
        "method": (_choice("tube", "hyperplane"), "tube", "tube: flux between tau0 and tau1; "
                   "hyperplane: bound momentum ahead of z(tau)"),
        "radii": (_floats, "0.25,0.5,1,2,4,8", "geometric sequence of at least five radii"),
        "expected": (_floats, "-3,-2,-1", "exponents the fit must recover"),
        "tau0": (float, "0.0", "tube: start of window"),
        "tau1": (float, "1.0", "tube: end of window"),
        "tau": (float, "0.0", "hyperplane: proper time of the reference event"),
        "far": (float, "64.0", "hyperplane: distance where integration starts"),
        "hyperplane_nodes": (int, "4", "hyperplane: sphere nodes per axis"),
    },
    "fields": {
        "samples": (int, "50", "random field points for the convergence study"),
        "stress_samples": (int, "20", "random field points for the stress-energy split"),
        "h_ratio": (float, "0.04", "largest stencil step as a fraction of r"),
        "tau0": (float, "0.0", "retarded times are drawn from [tau0, tau1]"),
        "tau1": (float, "1.0", ""),
        "r_min": (float, "0.5", "retarded distances are drawn from [r_min, r_max]"),
        "r_max": (float, "2.0", ""),
    },
    "balance": {
        "taus": (_floats, "0.1,0.5,0.9", "proper times at which balance checks run"),
        "fd_step": (float, "0.02", "finite-difference step along the worldline"),
    },
    "simulate": {
        "start": (_choice("rest", "trajectory"), "rest", "initial state: at rest, or the trajectory state"),
        "start_tau": (float, "0.0", "trajectory start: proper time"),
        "rest_acceleration": (_floats, "0,0,0,0,0", "rest start: spatial acceleration"),
        "force": (_choice("none", "lab", "covariant"), "none",
                  "lab: constant spatial force in the lab; covariant: constant six-force"),
        "force_vector": (_floats, "0,0,0,0,0", "five (lab) or six (covariant) components"),
        "tau_end": (float, "5.0", "end of integration"),
        "rtol": (float, "1e-12", "integrator relative tolerance"),
        "atol": (float, "1e-12", "integrator absolute tolerance"),
        "output_step": (float, "0.1", "spacing of reported rows"),
        "drift_bound": (float, "1e-7", "largest constraint drift allowed before projection"),
        "expect": (_choice("none", "constant_force", "uniform", "runaway"), "none",
                   "analytic comparison applied to the run"),
        "expect_tol": (float, "1e-8", "tolerance of the analytic comparison"),
    },
    "verify": {"suites": (_names, ",".join(SUITES), "suites run by the verify task")},
    "tolerances": {
        "moments": (float, "1e-10", "moment identities, relative"),
        "order": (float, "0.3", "allowed deviation of observed stencil orders from 4"),
        "reconstruction": (float, "1e-12", "radiative + bound = total, relative"),
        "null": (float, "1e-11", "k.T for the radiative and r^-5 grades, relative"),
        "rescaling": (float, "1e-10", "grade exponents under r -> 2r"),
        "p_rad": (float, "1e-7", "numeric vs closed radiative fluxes"),
        "p_bnd": (float, "1e-6", "numeric vs closed bound momentum"),
        "M_bnd": (float, "1e-5", "numeric vs closed bound angular momentum"),
        "r_independence": (float, "1e-6", "radiative flux at two radii"),
        "exponent": (float, "0.02", "fitted exponents"),
        "spin": (float, "1e-4", "fitted r^-1 spin coefficient"),
        "nu": (float, "1e-13", "gauge-function independence of the momentum"),
        "angular": (float, "1e-9", "wedge-system residual"),
        "chain": (float, "1e-8", "scalar consistency chain"),
        "identity": (float, "1e-12", "spin-square and rest-mass identities"),
        "closure": (float, "1e-8", "total momentum and angular momentum balance"),
    },
}

QUICK_NOTE = ("--quick: proper-time and integrator tolerances x100 looser, random sample counts "
              "divided by 5, balance checks at the first listed proper time only")


@dataclass
class Scenario:
    values: dict[str, dict[str, object]]
    raw: dict[str, dict[str, str]]
    quick: bool = False

    def __getitem__(self, key: str):
        section, _, name = key.partition(".")
        return self.values[section][name]

    def echo(self) -> dict[str, dict[str, str]]:
        return {s: dict(sorted(kv.items())) for s, kv in sorted(self.raw.items())}


def _line_of(text: str, section: str, key: str | None) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if key is not None and current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return i
    return None


def _where(text, section, key=None) -> str:
    line = _line_of(text, section, key)
    return f"line {line}: " if line else ""


def load(text: str = "", overrides=(), quick: bool = False) -> Scenario:
    """Parse, apply ``section.key=value`` overrides, and validate."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).replace("\n", " ")) from None
    for sec in parser.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"{_where(text, sec)}unknown section [{sec}]")
        for key in parser[sec]:
            if key not in SCHEMA[sec]:
                raise ConfigError(f"{_where(text, sec, key)}unknown key '{key}' in [{sec}]")
    raw = {s: {k: spec[1] for k, spec in keys.items()} for s, keys in SCHEMA.items()}
    for sec in parser.sections():
        raw[sec].update(parser[sec])
    for item in overrides:
        name, eq, value = item.partition("=")
        sec, dot, key = name.strip().partition(".")
        if not eq or not dot:
            raise ConfigError(f"override '{item}' is not section.key=value")
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"override '{item}' names an unknown key")
        raw[sec][key] = value.strip()
    values: dict[str, dict[str, object]] = {}
    for sec, keys in SCHEMA.items():
        values[sec] = {}
        for key, (parse, _, _) in keys.items():
            try:
                values[sec][key] = parse(raw[sec][key])
            except ValueError as exc:
                raise ConfigError(f"{_where(text, sec, key)}[{sec}] {key} = {raw[sec][key]!r}: {exc}") from None
    sc = Scenario(values, raw, quick)
    _validate(sc, text)
    if quick:
        _apply_quick(sc)
    return sc


def _validate(sc: Scenario, text: str) -> None:
    def fail(sec, key, msg):
        raise ConfigError(f"{_where(text, sec, key)}[{sec}] {key}: {msg}")

    for key, value in sc.values["tolerances"].items():
        if not value > 0.0:
            fail("tolerances", key, "tolerances must be positive")
    for sec, key in (("quadrature", "epsrel"), ("simulate", "rtol"), ("simulate", "atol"),
                     ("simulate", "drift_bound"), ("simulate", "expect_tol"), ("balance", "fd_step"),
                     ("fields", "h_ratio"), ("simulate", "output_step")):
        if not sc[f"{sec}.{key}"] > 0.0:
            fail(sec, key, "must be positive")
    for sec, key in (("flux", "r"), ("flux", "r_alt"), ("fields", "r_min")):
        if sc[f"{sec}.{key}"] < 10.0 * R_MIN:
            fail(sec, key, f"radius must be at least {10 * R_MIN:g}")
    if min(sc["sweep.radii"], default=0.0) < 10.0 * R_MIN:
        fail("sweep", "radii", f"radii must be at least {10 * R_MIN:g}")
    for sec, lo, hi in (("flux", "tau0", "tau1"), ("sweep", "tau0", "tau1"), ("fields", "tau0", "tau1")):
        if not sc[f"{sec}.{lo}"] < sc[f"{sec}.{hi}"]:
            fail(sec, hi, f"{lo} < {hi} required")
    if not sc["fields.r_min"] < sc["fields.r_max"]:
        fail("fields", "r_max", "r_min < r_max required")
    if sc["fields.h_ratio"] >= 0.1:
        fail("fields", "h_ratio", "stencil must stay within a tenth of the retarded distance")
    if not sc["simulate.tau_end"] > sc["simulate.start_tau"]:
        fail("simulate", "tau_end", "must exceed start_tau")
    if len(sc["quadrature.n_theta"]) != 3 or min(sc["quadrature.n_theta"]) < 1 or sc["quadrature.n_phi"] < 1:
        fail("quadrature", "n_theta", "three positive node counts required")
    if sc["quadrature.max_panels"] < 1:
        fail("quadrature", "max_panels", "must be positive")
    if len(sc["trajectory.velocity"]) != 5:
        fail("trajectory", "velocity", "five components required")
    if len(sc["simulate.rest_acceleration"]) != 5:
        fail("simulate", "rest_acceleration", "five components required")
    nforce = {"none": None, "lab": 5, "covariant": 6}[sc["simulate.force"]]
    if nforce and len(sc["simulate.force_vector"]) != nforce:
        fail("simulate", "force_vector", f"{nforce} components required")
    for s in sc["verify.suites"]:
        if s not in SUITES:
            fail("verify", "suites", f"unknown suite '{s}'")
    radii = sc["sweep.radii"]
    if len(radii) < 5:
        fail("sweep", "radii", "at least five radii required")
    ratios = [b / a for a, b in zip(radii, radii[1:])]
    if max(ratios) - min(ratios) > 1e-9 * ratios[0] or ratios[0] <= 1.0:
        fail("sweep", "radii", "radii must be an increasing geometric sequence")
    if radii[-1] / radii[0] < 10.0:
        fail("sweep", "radii", "radii must span at least one decade")
    if sc["scenario.workers"] < 1:
        fail("scenario", "workers", "must be positive")


def _apply_quick(sc: Scenario) -> None:
    v = sc.values
    v["quadrature"]["epsrel"] = min(1e-6, v["quadrature"]["epsrel"] * 100)
    v["simulate"]["rtol"] *= 100
    v["simulate"]["atol"] *= 100
    v["fields"]["samples"] = max(2, v["fields"]["samples"] // 5)
    v["fields"]["stress_samples"] = max(2, v["fields"]["stress_samples"] // 5)
    v["balance"]["taus"] = v["balance"]["taus"][:1]


def describe() -> str:
    lines = ["Scenario files are INI text: [section] headers and key = value lines.",
             "Any key can be overridden with --set section.key=value.", QUICK_NOTE, ""]
    for sec, keys in SCHEMA.items():
        lines.append(f"[{sec}]")
        for key, (parse, default, desc) in keys.items():
            tname = _TYPE_NAMES.get(parse, parse.__name__)
            lines.append(f"  {key} = {default}    ({tname}) {desc}".rstrip())
        lines.append("")
    return "\n".join(lines)
