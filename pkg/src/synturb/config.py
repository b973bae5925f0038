"""Run configuration: a sectioned INI text with unit-suffixed keys.

Example::

    [params]
    alpha = 1.2
    beta = 0.45
    u0_velocity = 1.0
    c0_dimensionless = 1.0
    ell0_length = 1.0
    ell1_length = 0.001
    dim = 2

    [run]
    experiment = kraichnan-limit
    seed = 7

    [schedule]
    epsilons = 0.4, 0.2, 0.1
    k_prefactor_wavenumber = 0.3
    k_exponent = -0.5
    l_prefactor_length = 100
    kappa_prefactor_diffusivity = 0.02

``[experiment]`` holds the preset-specific knobs.  ``e0_amplitude`` and
``a_rate`` in ``[params]`` bypass the ``u0``/``c0`` construction.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from typing import Optional

from .params import SpectrumParams, classify_regime, make_params

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ConstraintError",
    "RunConfig",
    "Schedule",
    "parse_config",
    "merge_config_text",
    "build_params",
]

EXPERIMENTS = ("structure", "richardson", "four-thirds", "kraichnan-limit", "dissipation", "boundary")


class ConfigError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        loc = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(loc + message)


class ConstraintError(ValueError):
    """An eps-schedule leaves a regime constraint above threshold."""

    def __init__(self, violations):
        self.violations = violations
        names = ", ".join(f"{v['name']} = {v['value']:.4g}" for v in violations)
        super().__init__(f"schedule violates regime constraints: {names}")


def _locate(text, section, key):
    sec = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]", s)
        if m:
            sec = m.group(1).strip()
            continue
        if sec == section:
            m = re.match(r"\s*([^=:#;]+?)\s*[=:]\s*", line)
            if m and m.group(1).lower() == key:
                return i, m.end() + 1
    return None, None


def _typed(v: str):
    s = v.strip()
    low = s.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", ""):
        return None
    if "," in s:
        return [_typed(p) for p in s.split(",")]
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


@dataclass(frozen=True)
class Schedule:
    """``K(eps) = k0 eps^kx``, ``L(eps) = l0 eps^lx``, ``kappa~(eps) = c0 eps^cx``."""

    epsilons: tuple
    k_prefactor: float
    k_exponent: float = 0.0
    l_prefactor: Optional[float] = None
    l_exponent: float = 0.0
    kappa_prefactor: float = 0.0
    kappa_exponent: float = 0.0
    threshold: float = 0.1
    infinite_outer_scale: bool = False

    def K(self, eps):
        return self.k_prefactor * eps**self.k_exponent

    def L(self, eps):
        return None if self.l_prefactor is None else self.l_prefactor * eps**self.l_exponent

    def kappa_tilde(self, eps):
        return self.kappa_prefactor * eps**self.kappa_exponent

    @property
    def smallest(self):
        return min(self.epsilons)

    def audit(self, params: SpectrumParams):
        """Regime report and every constraint evaluated at the smallest eps."""
        rep = classify_regime(params, self.kappa_prefactor > 0, l_infinite=self.infinite_outer_scale,
                              kappa_zero=self.kappa_prefactor == 0)
        e = self.smallest
        L = self.L(e)
        rows = rep.audit(e, self.K(e), L if L is not None else 1.0, self.kappa_tilde(e),
                         self.threshold)
        return rep, rows

    def check(self, params: SpectrumParams):
        rep, rows = self.audit(params)
        bad = [r for r in rows if not r["ok"]]
        if bad:
            raise ConstraintError(bad)
        return rep, rows

    def to_dict(self):
        return {
            "epsilons": list(self.epsilons), "k_prefactor": self.k_prefactor,
            "k_exponent": self.k_exponent, "l_prefactor": self.l_prefactor,
            "l_exponent": self.l_exponent, "kappa_prefactor": self.kappa_prefactor,
            "kappa_exponent": self.kappa_exponent, "threshold": self.threshold,
            "infinite_outer_scale": self.infinite_outer_scale,
        }


_PARAM_KEYS = {
    "alpha", "beta", "u0_velocity", "c0_dimensionless", "ell0_length", "ell1_length", "dim",
    "e0_amplitude", "a_rate",
}
_SCHEDULE_KEYS = {
    "epsilons", "k_prefactor_wavenumber", "k_exponent", "l_prefactor_length", "l_exponent",
    "kappa_prefactor_diffusivity", "kappa_exponent", "threshold", "infinite_outer_scale",
}


@dataclass
class RunConfig:
    params: dict
    experiment: str
    seed: int = 0
    threads: Optional[int] = None
    knobs: dict = field(default_factory=dict)
    schedule: Optional[Schedule] = None
    source: str = ""

    def spectrum(self) -> SpectrumParams:
        return build_params(self.params)

    def knob(self, key, default=None):
        return self.knobs.get(key, default)

    def to_dict(self) -> dict:
        return {
            "params": dict(self.params), "experiment": self.experiment, "seed": self.seed,
            "threads": self.threads, "knobs": dict(self.knobs),
            "schedule": self.schedule.to_dict() if self.schedule else None,
        }


def build_params(d: dict) -> SpectrumParams:
    alpha, beta = d["alpha"], d["beta"]
    dim = int(d.get("dim", 2))
    ell0 = float(d.get("ell0_length", 1.0))
    ell1 = float(d.get("ell1_length", 1e-3))
    if d.get("e0_amplitude") is not None or d.get("a_rate") is not None:
        if d.get("e0_amplitude") is None or d.get("a_rate") is None:
            raise ConfigError("give both e0_amplitude and a_rate, or neither")
        return SpectrumParams(alpha, beta, float(d["e0_amplitude"]), float(d["a_rate"]),
                              ell0, ell1, dim)
    return make_params(alpha, beta, float(d.get("u0_velocity", 1.0)),
                       float(d.get("c0_dimensionless", 1.0)), ell0, ell1, dim)


def _parser():
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str.lower
    return cp


def merge_config_text(*texts: str) -> str:
    """Later texts override keys of earlier ones (section by section)."""
    cp = _parser()
    for t in texts:
        if t:
            _read(cp, t)
    out = []
    for sec in cp.sections():
        out.append(f"[{sec}]")
        for k, v in cp.items(sec):
            out.append(f"{k} = {v}")
        out.append("")
    return "\n".join(out)


def _read(cp, text):
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside any [section]", exc.lineno, 1) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r}", exc.lineno, 1) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section {exc.section!r}", exc.lineno, 1) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse {line!r}", lineno, 1) from None


def parse_config(text: str) -> RunConfig:
    cp = _parser()
    _read(cp, text)

    def sect(name, allowed=None, required=()):
        if not cp.has_section(name):
            if required:
                raise ConfigError(f"missing section [{name}]")
            return {}
        out = {}
        for k, v in cp.items(name):
            if allowed is not None and k not in allowed:
                ln, col = _locate(text, name, k)
                raise ConfigError(f"unknown key {k!r} in [{name}]", ln, col)
            out[k] = _typed(v)
        for k in required:
            if k not in out:
                raise ConfigError(f"missing key {k!r} in [{name}]")
        return out

    params = sect("params", _PARAM_KEYS, ("alpha", "beta"))
    for k, v in params.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            ln, col = _locate(text, "params", k)
            raise ConfigError(f"{k} must be a number, got {v!r}", ln, col)
    run = sect("run", {"experiment", "seed", "threads"}, ("experiment",))
    exp = run["experiment"]
    if exp not in EXPERIMENTS:
        ln, col = _locate(text, "run", "experiment")
        raise ConfigError(f"unknown experiment {exp!r}; choose from {', '.join(EXPERIMENTS)}", ln, col)
    seed = run.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        ln, col = _locate(text, "run", "seed")
        raise ConfigError("seed must be a non-negative integer", ln, col)
    threads = run.get("threads")
    knobs = sect("experiment")
    sched = None
    s = sect("schedule", _SCHEDULE_KEYS)
    if s:
        eps = s.get("epsilons")
        eps = tuple(float(e) for e in (eps if isinstance(eps, list) else [eps]))
        if any(b >= a for a, b in zip(eps, eps[1:])):
            ln, col = _locate(text, "schedule", "epsilons")
            raise ConfigError("epsilons must be strictly decreasing", ln, col)
        if "k_prefactor_wavenumber" not in s:
            raise ConfigError("missing key 'k_prefactor_wavenumber' in [schedule]")
        sched = Schedule(
            epsilons=eps,
            k_prefactor=float(s["k_prefactor_wavenumber"]),
            k_exponent=float(s.get("k_exponent", 0.0)),
            l_prefactor=None if s.get("l_prefactor_length") is None else float(s["l_prefactor_length"]),
            l_exponent=float(s.get("l_exponent", 0.0)),
            kappa_prefactor=float(s.get("kappa_prefactor_diffusivity", 0.0)),
            kappa_exponent=float(s.get("kappa_exponent", 0.0)),
            threshold=float(s.get("threshold", 0.1)),
            infinite_outer_scale=bool(s.get("infinite_outer_scale", False)),
        )
    return RunConfig(params=params, experiment=exp, seed=seed, threads=threads, knobs=knobs,
                     schedule=sched, source=text)
