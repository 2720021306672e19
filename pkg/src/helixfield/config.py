"""Run configuration: TOML files, ``--set`` overrides, defaults, validation.

Every key is checked against the defaults of the chosen subcommand (and,
for ``compare``, the chosen mode); unknown keys are rejected with their
dotted path.  The resolved configuration, with every default filled in,
is what gets written to the run manifest.
"""
from __future__ import annotations

import copy
import json
import math
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .errors import ConfigError, CourantError
from .initial import InitialCondition
from .waves import WaveParams

MAX_COUPLING = 10.0
GAUGE_COURANT_LIMIT = 0.5

FIELD_GROUPS = {
    "wave": ("c",),
    "dh": ("u", "A0", "A1"),
    "th": ("u", "W0", "W1"),
}

_GAUSS = {"type": "gaussian", "center": 0.5, "width": 0.05, "amplitude": 1.0}
# small-amplitude charged matter: a Gaussian lump with phase rotation u_t = -i omega u
_MATTER = {**_GAUSS, "amplitude": 0.1, "omega": 50.0}

_LATTICE = {"nx": 256, "dx": None, "dt": None}
_OUTPUT = {"output_dir": None}
_SERIES = {"steps": 200, "stride": 50, "long_format": False}
_DH = {"e": 0.1, "ceiling": 1e6, "iterations": 2}
_TH = {"g": 1.0, "ceiling": 1e6, "iterations": 3}

SUBCOMMAND_DEFAULTS = {
    "simulate-wave": {**_LATTICE, **_OUTPUT, **_SERIES, "a": 1.0, "initial": ("wave", {"c": _GAUSS})},
    "simulate-dh": {**_LATTICE, **_OUTPUT, **_SERIES, **_DH, "initial": ("dh", {"u": _MATTER})},
    "simulate-th": {
        **_LATTICE,
        **_OUTPUT,
        **_SERIES,
        **_TH,
        "initial": ("th", {"u": {**_GAUSS, "amplitude": 0.1}, "W1": {**_GAUSS, "amplitude": 0.1, "direction": [0.0, 1.0, 0.0]}}),
    },
    "rotate-demo": {**_OUTPUT, "axes": ["x", "y"], "angle": math.pi / 2, "vector": [1.0, 0.0, 0.0]},
    "coords": {
        **_OUTPUT,
        "matrix": [[0.05, 0.10, 0.85], [0.15, 0.60, 0.05], [0.80, 0.30, 0.10]],
        "tol_angle": 0.15,
    },
    "fractal": {**_OUTPUT, "mode": "TH", "generations": 3, "formats": ["dot", "json"]},
}

_SMALL_TH = ("th", {"u": {**_GAUSS, "amplitude": 0.1}, "W1": {**_GAUSS, "center": 0.6, "amplitude": 0.1, "direction": [0.0, 1.0, 0.0]}})

COMPARE_DEFAULTS = {
    "su2-homomorphism": {"pairs": 1000, "seed": 0, "tolerances": {"homomorphism": 1e-9, "double_cover": 1e-12}},
    "wave-convergence": {
        **_LATTICE,
        "a": 1.0,
        "steps": 200,
        "halvings": 1,
        "initial": ("wave", {"c": _GAUSS}),
        "tolerances": {"ratio_min": 3.5, "ratio_max": 4.5},
    },
    "wave-energy": {**_LATTICE, "a": 1.0, "steps": 10000, "initial": ("wave", {"c": _GAUSS}), "tolerances": {"drift": 1e-6}},
    "dh-superposition": {
        **_LATTICE,
        **_DH,
        "steps": 500,
        "state_a": ("dh", {"A0": {**_GAUSS, "center": 0.4}}),
        "state_b": ("dh", {"A1": {**_GAUSS, "center": 0.6}}),
        "tolerances": {"residual": 1e-10},
    },
    "dh-conservation": {
        **_LATTICE,
        **_DH,
        "steps": 1000,
        "initial": ("dh", {"u": _MATTER}),
        "tolerances": {"charge_drift": 1e-4, "energy_drift": 1e-3},
    },
    "dh-gauge": {
        **_LATTICE,
        **_DH,
        "steps": 200,
        "windings": 1,
        "initial": ("dh", {"u": _MATTER, "A1": {**_GAUSS, "center": 0.3, "amplitude": 0.1}}),
        "tolerances": {"relative": 1e-6},
    },
    "th-superposition": {
        **_LATTICE,
        **_TH,
        "couplings": [0.0, 0.25, 0.5, 1.0],
        "steps": 200,
        "state_a": ("th", {"W0": {**_GAUSS, "center": 0.45, "direction": [1.0, 0.0, 0.0]}}),
        "state_b": ("th", {"W1": {**_GAUSS, "center": 0.55, "direction": [0.0, 1.0, 0.0]}}),
        "tolerances": {"linear_residual": 1e-10, "nonlinear_factor": 100.0},
    },
    "abelian-limit": {
        **_LATTICE,
        **_TH,
        "couplings": [0.0, 1e-6, 1e-3],
        "steps": 500,
        "initial": _SMALL_TH,
        "tolerances": {"exact": 1e-12, "weak": 1e-4, "weak_coupling_max": 1e-6},
    },
    "th-rotation": {**_LATTICE, **_TH, "steps": 300, "seed": 0, "initial": _SMALL_TH, "tolerances": {"covariance": 1e-9}},
    "th-energy": {**_LATTICE, **_TH, "steps": 1000, "initial": _SMALL_TH, "tolerances": {"drift": 1e-2}},
    "fractal-counts": {"max_generations": 12},
}

SUBCOMMANDS = tuple(SUBCOMMAND_DEFAULTS) + ("compare",)


def load_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    if path.suffix == ".json":
        doc = json.loads(text)
        # a run manifest carries the resolved config under "config"
        return doc["config"] if "config" in doc and "tool" in doc else doc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"{path}: {exc}") from exc


def parse_override(item: str) -> tuple[list[str], object]:
    if "=" not in item:
        raise ConfigError(item, "override must look like key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key.split("."), value


def apply_overrides(raw: dict, overrides) -> dict:
    raw = copy.deepcopy(raw)
    for path, value in overrides:
        node = raw
        for part in path[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(".".join(path), "cannot override inside a non-table value")
        if path[-1] == "type" and node.get("type") != value:
            # a new descriptor type starts from its own defaults
            kept = {k: node[k] for k in ("motion", "omega") if k in node}
            node.clear()
            node.update(kept)
        node[path[-1]] = value
    return raw


def _number(key, value, integer=False, positive=False, allow_none=False):
    if value is None and allow_none:
        return None
    ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if integer:
        ok = ok and float(value).is_integer()
    if not ok or not math.isfinite(value):
        raise ConfigError(key, f"expected a {'whole' if integer else 'finite'} number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(key, "must be positive")
    return int(value) if integer else float(value)


def _field_group(key, family, value, default):
    if value is None:
        value = default
    if not isinstance(value, dict):
        raise ConfigError(key, "must be a table of fields")
    names = FIELD_GROUPS[family]
    resolved = {}
    for name in value:
        if name not in names:
            raise ConfigError(f"{key}.{name}", f"unknown field; expected one of {list(names)}")
    for name in names:
        desc = value.get(name, {"type": "zero"})
        if not isinstance(desc, dict):
            raise ConfigError(f"{key}.{name}", "must be a table")
        desc = dict(desc)
        motion = desc.pop("motion", "standing")
        if motion not in ("standing", "right", "left"):
            raise ConfigError(f"{key}.{name}.motion", "must be 'standing', 'right' or 'left'")
        complex_matter = family == "dh" and name == "u"
        omega = desc.pop("omega", 0.0)
        if not complex_matter and omega != 0.0:
            raise ConfigError(f"{key}.{name}.omega", "only the complex matter field takes a phase rotation rate")
        vector = family != "dh"
        ic = InitialCondition.parse(desc, f"{key}.{name}", vector=vector)
        entry = {**ic.to_dict(vector), "motion": motion}
        if complex_matter:
            entry["omega"] = _number(f"{key}.{name}.omega", omega)
        resolved[name] = entry
    return resolved


def _resolve_table(prefix, raw, defaults):
    if not isinstance(raw, dict):
        raise ConfigError(prefix or "config", "must be a table")
    for k in raw:
        if k not in defaults:
            raise ConfigError(f"{prefix}{k}", "unknown key")
    out = {}
    for k, default in defaults.items():
        key = f"{prefix}{k}"
        value = raw.get(k)
        if isinstance(default, tuple):
            out[k] = _field_group(key, default[0], value, default[1])
            continue
        if isinstance(default, dict):
            out[k] = _resolve_table(f"{key}.", {} if value is None else value, default)
            continue
        if value is None:
            out[k] = copy.deepcopy(default)
            continue
        if k == "output_dir":
            if not isinstance(value, str) or not value:
                raise ConfigError(key, "expected a non-empty path string")
            out[k] = value
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(key, "expected true or false")
            out[k] = value
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise ConfigError(key, "expected a string")
            out[k] = value
        elif isinstance(default, int) or k in ("nx", "steps", "stride", "seed", "pairs"):
            out[k] = _number(key, value, integer=True)
        elif isinstance(default, float) or default is None:
            out[k] = _number(key, value)
        elif isinstance(default, list):
            if not isinstance(value, list):
                raise ConfigError(key, "expected a list")
            out[k] = value
        else:
            out[k] = value
    return out


def resolve(subcommand: str, raw: dict) -> dict:
    raw = dict(raw)
    if subcommand not in SUBCOMMANDS:
        raise ConfigError("subcommand", f"unknown subcommand {subcommand!r}")
    raw.pop("subcommand", None)
    if subcommand == "compare":
        mode = raw.pop("mode", None)
        if mode not in COMPARE_DEFAULTS:
            raise ConfigError("mode", f"expected one of {sorted(COMPARE_DEFAULTS)}, got {mode!r}")
        defaults = {**COMPARE_DEFAULTS[mode], **_OUTPUT}
        cfg = {"subcommand": subcommand, "mode": mode, **_resolve_table("", raw, defaults)}
    else:
        cfg = {"subcommand": subcommand, **_resolve_table("", raw, SUBCOMMAND_DEFAULTS[subcommand])}
    _check_semantics(cfg)
    return cfg


def _check_semantics(cfg: dict) -> None:
    for k in ("steps", "stride", "pairs", "max_generations", "generations", "halvings", "windings"):
        if k in cfg and cfg[k] < 0:
            raise ConfigError(k, "must be >= 0")
    if cfg.get("stride", 1) < 1:
        raise ConfigError("stride", "must be >= 1")
    if cfg.get("max_generations", 0) > 20:
        raise ConfigError("max_generations", "trees beyond 20 generations are not supported")
    for k in ("e", "g"):
        if k in cfg and abs(cfg[k]) > MAX_COUPLING:
            raise ConfigError(k, f"coupling magnitude must not exceed {MAX_COUPLING}")
    if "couplings" in cfg:
        for i, c in enumerate(cfg["couplings"]):
            c = _number(f"couplings[{i}]", c)
            if abs(c) > MAX_COUPLING:
                raise ConfigError(f"couplings[{i}]", f"coupling magnitude must not exceed {MAX_COUPLING}")
        cfg["couplings"] = [float(c) for c in cfg["couplings"]]
    if "nx" in cfg:
        gauge = any(k in cfg for k in ("e", "g"))
        lattice(cfg, courant_limit=GAUGE_COURANT_LIMIT if gauge else 1.0)
    if cfg["subcommand"] == "rotate-demo":
        axes = cfg["axes"]
        if len(axes) != 2 or any(a not in ("x", "y", "z") for a in axes):
            raise ConfigError("axes", "expected two of 'x', 'y', 'z'")
        if len(cfg["vector"]) != 3:
            raise ConfigError("vector", "must have 3 components")
        cfg["vector"] = [_number(f"vector[{i}]", c) for i, c in enumerate(cfg["vector"])]
    if cfg["subcommand"] == "coords":
        m = np.asarray(cfg["matrix"], dtype=float) if _is_matrix(cfg["matrix"]) else None
        if m is None:
            raise ConfigError("matrix", "must be a 3x3 table of finite numbers")
        if not 0 < cfg["tol_angle"] < math.pi / 4:
            raise ConfigError("tol_angle", "must lie in (0, pi/4)")
    if cfg["subcommand"] == "fractal":
        if cfg["mode"] not in ("TH", "DH"):
            raise ConfigError("mode", "must be 'TH' or 'DH'")
        for f in cfg["formats"]:
            if f not in ("dot", "json"):
                raise ConfigError("formats", f"unknown format {f!r}")


def _is_matrix(m) -> bool:
    try:
        a = np.asarray(m, dtype=float)
    except (TypeError, ValueError):
        return False
    return a.shape == (3, 3) and bool(np.all(np.isfinite(a)))


def lattice(cfg: dict, courant_limit: float = 1.0) -> WaveParams:
    """Lattice from ``nx``/``dx``/``dt``; defaults give unit length and Courant 0.5."""
    nx = cfg["nx"]
    if nx < 3:
        raise ConfigError("nx", "need at least 3 sites")
    a = cfg.get("a", 1.0)
    dx = cfg["dx"] if cfg["dx"] is not None else 1.0 / nx
    dt = cfg["dt"] if cfg["dt"] is not None else 0.5 * dx / abs(a)
    if dx <= 0:
        raise ConfigError("dx", "must be positive")
    if dt <= 0:
        raise ConfigError("dt", "must be positive")
    try:
        params = WaveParams(a=a, nx=nx, dx=dx, dt=dt)
    except CourantError as exc:
        raise ConfigError("dt", str(exc)) from exc
    if params.courant > courant_limit:
        raise ConfigError("dt", f"Courant number {params.courant:.6g} exceeds {courant_limit} for coupled gauge runs")
    return params
