"""Scenario configuration: TOML files, presets, validation and hashing.

A config names a ``scenario``. Preset scenarios supply every parameter and
the file may override individual keys; ``custom`` requires ``kind`` plus
the full parameter set for that kind. See docs/config.md for the schema.
"""

from __future__ import annotations

import copy
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .. import molecular as mol
from .. import vsystem as vs
from ..field_states import planck_mean_occupation
from ..units import fs_to_au
from . import presets


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.message = message
        self.key = key
        self.line = line
        where = []
        if key:
            where.append(f"key '{key}'")
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


FLOAT, INT, STR = "float", "int", "str"

MODE_SCHEMA = {
    "omega": FLOAT, "lambda_e": FLOAT, "lambda_f": FLOAT, "n_max": INT, "field": STR,
    "n_bar": FLOAT, "wavelength_nm": FLOAT, "temperature_K": FLOAT, "phase": FLOAT,
    "fock_n": INT,
}
VSYSTEM_SCHEMA = {
    "omega_g": FLOAT, "omega_e": FLOAT, "omega_f": FLOAT, "t_final": FLOAT, "periods": FLOAT,
    "dt": FLOAT, "cap": INT, "topology": STR, "modes": [MODE_SCHEMA],
}
GRID_SCHEMA = {"r_min": FLOAT, "r_max": FLOAT, "n_points": INT}
SURFACE_SCHEMA = {"D": FLOAT, "b": FLOAT, "r0": FLOAT, "T_shift": FLOAT}
MOLECULAR_SCHEMA = {
    "grid": GRID_SCHEMA, "ground": SURFACE_SCHEMA, "excited": SURFACE_SCHEMA,
    "reduced_mass": FLOAT, "lambda": FLOAT, "field": STR, "n_bar": FLOAT,
    "wavelength_nm": FLOAT, "temperature_K": FLOAT, "n_max": INT, "phase": FLOAT,
    "fock_n": INT, "omega_field": (FLOAT, STR), "midpoint_levels": [INT], "dt": FLOAT,
    "t_final": FLOAT, "sample_every": INT, "snapshot_times_fs": [FLOAT],
    "projection_count": INT, "cap": INT,
}
OUTPUT_SCHEMA = {"dir": STR, "formats": [STR]}
TOP_SCHEMA = {
    "scenario": STR, "kind": STR, "vsystem": VSYSTEM_SCHEMA, "molecular": MOLECULAR_SCHEMA,
    "output": OUTPUT_SCHEMA,
}

SCENARIOS = tuple(presets.PRESETS) + ("custom",)
KINDS = ("vsystem", "molecular")
FIELD_KINDS = ("thermal", "coherent", "fock", "cat")
FORMATS = ("tsv", "bin")

REQUIRED = {
    "vsystem": ["omega_g", "omega_e", "omega_f", "modes"],
    "vsystem.modes": ["omega", "lambda_e", "lambda_f", "n_max", "field"],
    "molecular": ["grid", "ground", "excited", "lambda", "field", "n_max", "dt", "t_final"],
    "molecular.grid": ["r_min", "r_max", "n_points"],
    "molecular.ground": ["D", "b", "r0", "T_shift"],
    "molecular.excited": ["D", "b", "r0", "T_shift"],
}
NON_NEGATIVE = {"lambda_e", "lambda_f", "lambda", "n_bar", "fock_n"}
POSITIVE = {"t_final", "periods", "dt", "cap", "omega", "wavelength_nm", "temperature_K",
            "reduced_mass", "sample_every", "projection_count", "n_points"}


@dataclass
class ScenarioConfig:
    scenario: str
    kind: str
    system: Any
    settings: dict
    output_dir: str | None = None
    formats: tuple[str, ...] = FORMATS
    projection_count: int = 15
    source: str | None = None
    derived: dict = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        return config_hash(self.settings)


def config_hash(settings: dict) -> str:
    payload = {k: v for k, v in settings.items() if k != "output"}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _locate(text: str | None, key: str | None) -> int | None:
    if not text or not key:
        return None
    leaf = re.sub(r"\[\d+\]", "", key).split(".")[-1]
    m = re.search(rf"^\s*{re.escape(leaf)}\s*=", text, re.MULTILINE)
    if m is None:
        m = re.search(rf"^\s*\[+\s*[\w.]*{re.escape(leaf)}\s*\]+", text, re.MULTILINE)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _check_type(value, kind, path):
    kinds = kind if isinstance(kind, tuple) else (kind,)
    for k in kinds:
        if k == FLOAT and isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        if k == INT and isinstance(value, int) and not isinstance(value, bool):
            return value
        if k == STR and isinstance(value, str):
            return value
    raise ConfigError(f"expected {' or '.join(kinds)}, got {type(value).__name__}", path)


def _check_schema(data, schema, path=""):
    if not isinstance(data, dict):
        raise ConfigError("expected a table", path or None)
    out = {}
    for key, value in data.items():
        sub = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError("unknown key", sub)
        spec = schema[key]
        if isinstance(spec, dict):
            out[key] = _check_schema(value, spec, sub)
        elif isinstance(spec, list):
            if not isinstance(value, list):
                raise ConfigError("expected a list", sub)
            item = spec[0]
            if isinstance(item, dict):
                out[key] = [_check_schema(v, item, f"{sub}[{i}]") for i, v in enumerate(value)]
            else:
                out[key] = [_check_type(v, item, f"{sub}[{i}]") for i, v in enumerate(value)]
        else:
            value = _check_type(value, spec, sub)
            leaf = key
            if leaf in NON_NEGATIVE and value < 0:
                raise ConfigError(f"must be >= 0, got {value}", sub)
            if leaf in POSITIVE and value <= 0:
                raise ConfigError(f"must be > 0, got {value}", sub)
            out[key] = value
    return out


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    if ("wavelength_nm" in over or "temperature_K" in over) and "n_bar" not in over:
        out.pop("n_bar", None)
    for k, v in over.items():
        if k == "modes" and isinstance(v, list) and isinstance(out.get(k), list):
            modes = out[k]
            if len(v) > len(modes):
                raise ConfigError(f"preset has {len(modes)} mode(s), override lists {len(v)}", k)
            for i, m in enumerate(v):
                modes[i] = _merge(modes[i], m)
        elif isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _require(section: dict, keys, path):
    missing = [k for k in keys if k not in section]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}", path)


def _n_bar(sec: dict, path: str) -> float:
    has_planck = "wavelength_nm" in sec or "temperature_K" in sec
    if has_planck:
        if "n_bar" in sec:
            raise ConfigError("give either n_bar or wavelength_nm/temperature_K, not both", path)
        _require(sec, ["wavelength_nm", "temperature_K"], path)
        return planck_mean_occupation(sec["wavelength_nm"], sec["temperature_K"])
    if sec.get("field") == "fock" and "fock_n" in sec:
        return float(sec["fock_n"])
    if "n_bar" not in sec:
        raise ConfigError("missing required keys: n_bar (or wavelength_nm and temperature_K)", path)
    return sec["n_bar"]


def _field_kind(sec, path):
    if sec["field"] not in FIELD_KINDS:
        raise ConfigError(f"field must be one of {FIELD_KINDS}, got {sec['field']!r}", f"{path}.field")
    return sec["field"]


def build_vconfig(sec: dict) -> tuple[vs.VConfig, dict]:
    _require(sec, REQUIRED["vsystem"], "vsystem")
    modes = []
    for i, m in enumerate(sec["modes"]):
        p = f"vsystem.modes[{i}]"
        _require(m, REQUIRED["vsystem.modes"], p)
        modes.append(vs.ModeConfig(
            omega=m["omega"], lambda_e=m["lambda_e"], lambda_f=m["lambda_f"], n_max=m["n_max"],
            field=_field_kind(m, p), n_bar=_n_bar(m, p), phase=m.get("phase", 0.0),
            fock_n=m.get("fock_n")))
    if "t_final" in sec and "periods" in sec:
        raise ConfigError("give either t_final or periods, not both", "vsystem.periods")
    if "t_final" not in sec and "periods" not in sec:
        raise ConfigError("missing required keys: t_final (or periods)", "vsystem")
    try:
        cfg = vs.VConfig(sec["omega_g"], sec["omega_e"], sec["omega_f"], tuple(modes),
                         t_final=sec.get("t_final", 1.0), dt=sec.get("dt"),
                         cap=sec.get("cap", vs.qc.DEFAULT_DIM_CAP))
        derived = {"rabi_period": vs.rabi_period(cfg)}
        if "periods" in sec:
            cfg = vs.VConfig(cfg.omega_g, cfg.omega_e, cfg.omega_f, cfg.modes,
                             t_final=sec["periods"] * derived["rabi_period"], dt=cfg.dt, cap=cfg.cap)
    except ValueError as exc:
        raise ConfigError(str(exc), "vsystem") from exc
    derived["n_bar"] = [m.n_bar for m in modes]
    return cfg, derived


def _surface(sec, mass, name):
    return mol.MorseSurface(sec["D"], sec["b"], sec["r0"], sec["T_shift"], reduced_mass=mass,
                            name=name)


def build_molconfig(sec: dict) -> tuple[mol.MolConfig, dict]:
    _require(sec, REQUIRED["molecular"], "molecular")
    for sub in ("grid", "ground", "excited"):
        _require(sec[sub], REQUIRED[f"molecular.{sub}"], f"molecular.{sub}")
    mass = sec.get("reduced_mass", mol.LI2_REDUCED_MASS)
    try:
        grid = mol.Grid(sec["grid"]["r_min"], sec["grid"]["r_max"], sec["grid"]["n_points"])
        cfg = mol.MolConfig(
            grid=grid, ground=_surface(sec["ground"], mass, "g"),
            excited=_surface(sec["excited"], mass, "e"), lam=sec["lambda"],
            field=_field_kind(sec, "molecular"), n_bar=_n_bar(sec, "molecular"),
            n_max=sec["n_max"], phase=sec.get("phase", 0.0), fock_n=sec.get("fock_n"),
            omega_field=sec.get("omega_field", "midpoint"),
            midpoint_levels=tuple(sec.get("midpoint_levels", (3, 4))), dt=sec["dt"],
            t_final=sec["t_final"], sample_every=sec.get("sample_every", 10),
            snapshot_times=tuple(fs_to_au(t) for t in sec.get("snapshot_times_fs", ())),
            cap=sec.get("cap", mol.qc.DEFAULT_DIM_CAP))
    except ValueError as exc:
        raise ConfigError(str(exc), "molecular") from exc
    return cfg, {"n_bar": cfg.n_bar}


def from_dict(data: dict, source: str | None = None) -> ScenarioConfig:
    try:
        data = _check_schema(data, TOP_SCHEMA)
        if "scenario" not in data:
            raise ConfigError("missing required keys: scenario (one of " + ", ".join(SCENARIOS) + ")")
        scen = data["scenario"]
        if scen not in SCENARIOS:
            raise ConfigError(f"unknown scenario {scen!r}; choose from {', '.join(SCENARIOS)}",
                              "scenario")
        if scen == "custom":
            if "kind" not in data:
                raise ConfigError("custom scenario needs 'kind' (vsystem or molecular)", "kind")
            kind = data["kind"]
            if kind not in KINDS:
                raise ConfigError(f"kind must be one of {KINDS}", "kind")
            settings = data
        else:
            base = presets.preset_settings(scen)
            kind = base["kind"]
            if data.get("kind", kind) != kind:
                raise ConfigError(f"preset {scen} has kind {kind}", "kind")
            settings = _merge(base, data)
        other = "molecular" if kind == "vsystem" else "vsystem"
        if other in settings:
            raise ConfigError(f"section [{other}] not allowed for kind {kind}", other)
        if kind not in settings:
            raise ConfigError(f"missing required section [{kind}] with keys: "
                              + ", ".join(REQUIRED[kind]), kind)
        sec = settings[kind]
        system, derived = build_vconfig(sec) if kind == "vsystem" else build_molconfig(sec)
        out = settings.get("output", {})
        formats = tuple(out.get("formats", FORMATS))
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown output formats {bad}; allowed {FORMATS}", "output.formats")
        return ScenarioConfig(
            scenario=scen, kind=kind, system=system, settings=settings,
            output_dir=out.get("dir"), formats=formats,
            projection_count=sec.get("projection_count", 15) if kind == "molecular" else 15,
            source=source, derived=derived)
    except ConfigError as exc:
        if exc.line is None and source is not None:
            line = _locate(source, exc.key)
            if line is not None:
                raise ConfigError(exc.message, exc.key, line) from None
        raise


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return from_dict(data, source=text)


def from_preset(name: str, overrides: dict | None = None) -> ScenarioConfig:
    data = {"scenario": name}
    if overrides:
        data = _merge(data, overrides)
    return from_dict(data)


def set_path(settings: dict, path: str, value) -> list[dict]:
    """Set a dotted parameter path in a copy of ``settings``.

    List elements are addressed by index; ``*`` applies to every element.
    Returns the updated copy.
    """
    out = copy.deepcopy(settings)
    parts = path.split(".")
    if not parts or not all(parts):
        raise ConfigError("empty parameter path", path)

    def walk(node, i, schema):
        key = parts[i]
        if isinstance(node, list):
            targets = range(len(node)) if key == "*" else [_index(key, len(node))]
            for j in targets:
                walk_item(node, j, i, schema)
            return
        if key not in schema:
            raise ConfigError("parameter path does not resolve", path)
        spec = schema[key]
        if i == len(parts) - 1:
            if isinstance(spec, (dict, list)):
                raise ConfigError("parameter path must end at a scalar", path)
            node[key] = value
            return
        if key not in node:
            if isinstance(spec, dict):
                node[key] = {}
            else:
                raise ConfigError("parameter path does not resolve", path)
        walk(node[key], i + 1, spec)

    def walk_item(lst, j, i, schema):
        item_schema = schema[0]
        if i == len(parts) - 1:
            raise ConfigError("parameter path must end at a scalar", path)
        walk(lst[j], i + 1, item_schema)

    def _index(key, n):
        try:
            j = int(key)
        except ValueError:
            raise ConfigError(f"expected list index, got {key!r}", path) from None
        if not 0 <= j < n:
            raise ConfigError(f"index {j} out of range for {n} elements", path)
        return j

    walk(out, 0, TOP_SCHEMA)
    return out
