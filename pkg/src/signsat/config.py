"""Run configuration files.

INI syntax (``[section]`` headers, ``key = value`` lines, ``#`` or ``;``
comments). Every key is typed and validated against :data:`SCHEMA`; errors
carry the file name and line number. Reals are parsed with ``float`` so any
17-digit rendering round-trips exactly.

Example::

    [run]
    seed = 42

    [design]
    kind = uniform_example
    beta = 1.0, 0.5
    link = logistic

    [simulate]
    n = 1000
"""

from __future__ import annotations

import configparser
import copy
import re
from dataclasses import dataclass
from typing import Any, Optional

from . import dgp, geometry, maxscore, sstest
from .errors import ConfigError, PreconditionError
from .links import parse_link


@dataclass(frozen=True)
class Setting:
    kind: str
    default: Any = None
    choices: tuple = ()


_METHODS = maxscore.METHODS

SCHEMA = {
    "run": {
        "seed": Setting("int", 0),
    },
    "design": {
        "kind": Setting("choice", "uniform_example", ("uniform_example", "chamberlain")),
        "beta": Setting("vector", (1.0, 0.5)),
        "link": Setting("link", "logistic"),
        "fixed_effect": Setting("choice", "normal", ("normal", "location_shift")),
        "fe_mean": Setting("float", 0.0),
        "fe_sd": Setting("float", 1.0),
        "fe_shift": Setting("vector", None),
        "w_low": Setting("float", -1.0),
        "w_high": Setting("float", 1.0),
        "z_low": Setting("float", -1.0),
        "z_high": Setting("float", 1.0),
    },
    "simulate": {
        "n": Setting("int", 1000),
    },
    "maxscore": {
        "input": Setting("str", None),
        "method": Setting("choice", maxscore.EXACT, _METHODS),
        "samples": Setting("int", 2000),
    },
    "sstest": {
        "input": Setting("str", None),
        "alpha": Setting("float", 0.05),
        "b_reps": Setting("int", 199),
        "direction": Setting("choice", "both", ("upper", "lower", "both")),
        "optimizer": Setting("choice", maxscore.EXACT, _METHODS),
        "boundary_convention": Setting("choice", sstest.GEQ, (sstest.GEQ, sstest.VERBATIM)),
        "draws_out": Setting("str", None),
    },
    "idscan": {
        "b_grid": Setting("vectors", ()),
        "method": Setting("choice", "analytic", ("analytic", "montecarlo")),
        "draws": Setting("int", 1_000_000),
    },
    "geom": {
        "link": Setting("link", "periodic_gdot(a=2.0)"),
        "s": Setting("float", None),
        "t": Setting("float", None),
        "window": Setting("window", None),
        "grid": Setting("window", (-10.0, 10.0, 401)),
        "margin": Setting("float", geometry.DEFAULT_MARGIN),
        "floor": Setting("float", geometry.DEFAULT_FLOOR),
        "deltas": Setting("vector", None),
        "epsilon": Setting("bool", False),
    },
    "mc_study": {
        "n": Setting("int", 500),
        "trials": Setting("int", 100),
        "test": Setting("choice", "upper", ("upper", "lower", "both")),
        "alpha": Setting("float", 0.05),
        "b_reps": Setting("int", 199),
        "optimizer": Setting("choice", maxscore.EXACT, _METHODS),
        "boundary_convention": Setting("choice", sstest.GEQ, (sstest.GEQ, sstest.VERBATIM)),
    },
}


def _parse_value(setting: Setting, text: str):
    text = text.strip()
    kind = setting.kind
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(f"expected a boolean, got {text!r}")
        if kind == "str":
            return text
        if kind == "choice":
            if text not in setting.choices:
                raise ValueError(f"expected one of {', '.join(setting.choices)}; got {text!r}")
            return text
        if kind == "vector":
            parts = [p for p in re.split(r"[,\s]+", text) if p]
            if not parts:
                raise ValueError("empty vector")
            return tuple(float(p) for p in parts)
        if kind == "vectors":
            rows = [r for r in text.split(";") if r.strip()]
            return tuple(tuple(float(p) for p in re.split(r"[,\s]+", r.strip()) if p) for r in rows)
        if kind == "window":
            parts = [p for p in re.split(r"[,\s]+", text) if p]
            if len(parts) != 3:
                raise ValueError("a window is 'low, high, points'")
            return (float(parts[0]), float(parts[1]), int(parts[2]))
        if kind == "link":
            return parse_link(text).label
    except ValueError as exc:
        raise ValueError(str(exc)) from None
    raise AssertionError(kind)


def _line_index(text: str):
    """``(section, key) -> line`` and ``section -> line`` for diagnostics."""
    where = {}
    section = None
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            where.setdefault((section, None), no)
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip().lower()), no)
    return where


class RunConfig:
    """Validated settings, section by section, with their source lines."""

    def __init__(self, values: dict, lines: Optional[dict] = None, path: Optional[str] = None):
        self.values = values
        self.lines = lines or {}
        self.path = path

    def __getitem__(self, section):
        return self.values[section]

    def error(self, section, key, message):
        line = self.lines.get((section, key)) or self.lines.get((section, None))
        return ConfigError(f"[{section}] {key}: {message}", line=line, path=self.path)

    def override(self, section: str, key: str, value) -> None:
        """Set ``section.key`` from a command-line flag (string or typed value)."""
        setting = SCHEMA[section][key]
        if isinstance(value, str):
            try:
                value = _parse_value(setting, value)
            except ValueError as exc:
                raise ConfigError(f"--{key.replace('_', '-')}: {exc}") from None
        self.values[section][key] = value
        self.lines.pop((section, key), None)

    def echo(self, sections=None) -> dict:
        """Plain nested dict of the effective settings (optionally a subset)."""
        out = {}
        for sec, items in self.values.items():
            if sections is not None and sec not in sections:
                continue
            out[sec] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in items.items()}
            for k, v in out[sec].items():
                if isinstance(v, list):
                    out[sec][k] = [list(x) if isinstance(x, tuple) else x for x in v]
        return out


def defaults() -> RunConfig:
    values = {sec: {k: copy.deepcopy(s.default) for k, s in keys.items()} for sec, keys in SCHEMA.items()}
    return RunConfig(values)


def parse_config(text: str, path: Optional[str] = None) -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
        strict=True,
    )
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("expected a [section] header first", line=exc.lineno, path=path) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message.split(":")[-1].strip() if hasattr(exc, "message") else str(exc),
                          line=exc.lineno, path=path) from None
    except configparser.ParsingError as exc:
        lineno, bad = exc.errors[0]
        raise ConfigError(f"cannot parse {bad.strip()!r}", line=lineno, path=path) from None

    lines = _line_index(text)
    cfg = defaults()
    cfg.lines = lines
    cfg.path = path
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", line=lines.get((section, None)), path=path)
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise cfg.error(section, key, "unknown key")
            try:
                cfg.values[section][key] = _parse_value(SCHEMA[section][key], raw)
            except ValueError as exc:
                raise cfg.error(section, key, str(exc)) from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=str(path)) from None
    return parse_config(text, str(path))


# -- builders -------------------------------------------------------------------


def build_design(cfg: RunConfig) -> dgp.PanelDesign:
    sec = cfg["design"]
    beta = sec["beta"]
    link = parse_link(sec["link"])
    if sec["fixed_effect"] == "normal":
        fe = dgp.NormalEffect(sec["fe_mean"], sec["fe_sd"])
    else:
        shift = sec["fe_shift"]
        if shift is None:
            raise cfg.error("design", "fixed_effect", "location_shift needs fe_shift")
        if len(shift) != len(beta):
            raise cfg.error("design", "fe_shift", f"length {len(shift)} does not match beta")
        fe = dgp.LocationShiftEffect(tuple(shift), sec["fe_sd"])
    try:
        if sec["kind"] == "uniform_example":
            law = dgp.UniformDifference(len(beta), sec["w_low"], sec["w_high"])
            return dgp.PanelDesign(beta, law, fe, link)
        if len(beta) < 2:
            raise cfg.error("design", "beta", "the chamberlain design needs at least two coefficients")
        z = dgp.UniformBox(sec["z_low"], sec["z_high"], len(beta) - 1)
        return dgp.chamberlain_design(beta, z, link, fe)
    except PreconditionError as exc:
        raise cfg.error("design", "beta", str(exc)) from None


def make_test_config(cfg: RunConfig, section: str, seed: int, threads: int = 1,
                direction: Optional[str] = None) -> sstest.TestConfig:
    sec = cfg[section]
    try:
        return sstest.TestConfig(
            alpha=sec["alpha"], b_reps=sec["b_reps"],
            direction=direction or sec.get("direction", sec.get("test")),
            seed=seed, optimizer=sec["optimizer"],
            boundary_convention=sec["boundary_convention"], threads=threads,
        )
    except PreconditionError as exc:
        raise cfg.error(section, "alpha", str(exc)) from None

