"""Run configuration: one JSON document, validated against a fixed key schema."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..errors import ContractError

COMMANDS = ("algebra-check", "kinematics-check", "evolve", "limit-study")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


# ``None`` marks a leaf; a dict lists the allowed sub-keys.
SCHEMA: dict[str, Any] = {
    "command": None,
    "lattice": {"N": None},
    "params": {
        "alpha": None, "D": None, "k": None, "nu": None, "delta": None, "b": None, "a": None,
        "m_max": None, "j": None, "R": {"a1": None, "k1": None, "a2": None, "k2": None},
    },
    "fields": {"f": None, "X": None, "initial": None},
    "integrator": {"dt": None, "t_end": None, "guard_eps": None, "backend": None, "record_every": None},
    "hopf": {"N": None, "m_max": None, "j": None},
    "study": {"kind": None, "N": None, "modes": None, "n": None, "T": None, "reference_M": None},
    "output": None,
    "tolerances": None,
    "seed": None,
    "samples": None,
    "fault_injection": {"relation": None, "perturbation": None},
}

DEFAULT_TOLERANCES = {
    "algebra": 1e-11,
    "kinematics": 1e-10,
    "fp_ehrenfest": 1e-10,
    "conservation": 1e-12,
    "drift": 1e-8,
    "backend": 1e-10,
    "split": 1e-9,
    "phase_rotation": 1e-8,
}

DEFAULTS: dict[str, dict] = {
    "algebra-check": {
        "lattice": {"N": [8, 12, 16]},
        "params": {"alpha": [0.0, 0.7], "m_max": 3, "j": [1, 2, 3], "delta": [1, 2], "b": [1, 2], "a": 0.5},
        "hopf": {"N": [6, 8], "m_max": 3, "j": [1, 2, 3]},
    },
    "kinematics-check": {
        "lattice": {"N": [8, 16]},
        "params": {"alpha": [0.0, 0.7], "D": [0.0, 0.3], "k": [2, 4]},
        "fields": {"f": "cos", "X": "sin"},
        "samples": 5,
    },
    "evolve": {
        "lattice": {"N": 64},
        "params": {"alpha": 0.0, "D": 0.1, "k": 2, "R": {"a1": 1.0, "k1": 0, "a2": 0.0, "k2": 0}},
        "fields": {"initial": {"preset": "gaussian-bump"}},
        "integrator": {"dt": 1e-3, "t_end": 0.5, "backend": "stencil", "record_every": 10},
    },
    "limit-study": {
        "params": {"alpha": 0.3, "k": 2, "D": 0.0},
        "study": {"kind": "operator", "N": [16, 32, 64, 128, 256], "modes": [-2, -1, 0, 1, 2], "n": 1,
                  "T": 0.2, "reference_M": 512},
    },
}


def _check_keys(doc, schema, path=""):
    if not isinstance(doc, dict):
        raise ConfigError(f"{path or 'config'} must be an object")
    for key, value in doc.items():
        where = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"unknown config key {where!r}")
        sub = schema[key]
        if isinstance(sub, dict):
            _check_keys(value, sub, where)


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_override(text: str) -> tuple[list[str], Any]:
    """``a.b=value``; the value is read as JSON when possible, else kept as a string."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_override(doc: dict, path: list[str], value) -> dict:
    doc = copy.deepcopy(doc)
    node = doc
    for p in path[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {'.'.join(path)}: {p} is not an object")
    node[path[-1]] = value
    return doc


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration document for one command."""

    doc: dict

    @property
    def command(self) -> str:
        return self.doc["command"]

    def get(self, section: str, key: str | None = None, default=None):
        sec = self.doc.get(section, {} if key else default)
        if key is None:
            return sec
        return sec.get(key, default) if isinstance(sec, dict) else default

    @property
    def seed(self) -> int:
        return int(self.doc.get("seed", 0))

    @property
    def tolerances(self) -> dict:
        return {**DEFAULT_TOLERANCES, **self.doc.get("tolerances", {})}

    @property
    def output(self) -> Path | None:
        out = self.doc.get("output")
        return Path(out) if out else None

    def to_json(self) -> dict:
        return copy.deepcopy(self.doc)

    @classmethod
    def build(cls, command: str | None = None, doc: dict | None = None, overrides=(), seed=None,
              output=None) -> "RunConfig":
        doc = dict(doc or {})
        _check_keys(doc, SCHEMA)
        command = command or doc.get("command")
        if command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
        if doc.get("command") not in (None, command):
            raise ConfigError(f"config is for {doc['command']!r}, invoked as {command!r}")
        user = dict(doc)
        for text in overrides:
            path, value = parse_override(text)
            user = apply_override(user, path, value)
        full = _merge(DEFAULTS[command], user)
        full["command"] = command
        nu = user.get("params", {}).get("nu") if isinstance(user.get("params"), dict) else None
        if nu is not None:
            k = user["params"].get("k")
            if k is not None and any(kk != 2 * nu for kk in as_list(k)):
                raise ConfigError("params.k must equal 2 * params.nu")
            full["params"]["k"] = 2 * nu
        if seed is not None:
            full["seed"] = int(seed)
        full.setdefault("seed", 0)
        if output is not None:
            full["output"] = str(output)
        _check_keys(full, SCHEMA)
        tol = full.get("tolerances", {})
        if not isinstance(tol, dict) or any(k not in DEFAULT_TOLERANCES for k in tol):
            raise ConfigError(f"tolerances must be an object with keys from {sorted(DEFAULT_TOLERANCES)}")
        cfg = cls(full)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path, command: str | None = None, **kw) -> "RunConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.build(command, doc, **kw)

    def validate(self):
        """Re-check the parameter constraints owned by the library modules."""
        for N in as_list(self.get("lattice", "N", [])) + as_list(self.get("hopf", "N", [])) \
                + as_list(self.get("study", "N", [])):
            if not isinstance(N, int) or N < 2:
                raise ConfigError(f"lattice size must be an integer >= 2, got {N!r}")
        params = self.get("params")
        if self.command == "evolve":
            for key in ("N", ):
                if not isinstance(self.get("lattice", key), int):
                    raise ConfigError("evolve needs a single lattice.N")
            integ = self.get("integrator")
            if float(integ.get("dt", 1)) <= 0:
                raise ConfigError("integrator.dt must be positive")
            if integ.get("guard_eps") is not None and float(integ["guard_eps"]) <= 0:
                raise ConfigError("integrator.guard_eps must be positive")
            if integ.get("backend", "stencil") not in ("stencil", "spectral"):
                raise ConfigError("integrator.backend must be 'stencil' or 'spectral'")
            for key in ("alpha", "D", "k"):
                if isinstance(params.get(key), list):
                    raise ConfigError(f"evolve needs a scalar params.{key}")
            try:
                from ..dynamics import RShift
                RShift(**self.get("params", "R", {}))
            except (ContractError, TypeError) as exc:
                raise ConfigError(str(exc)) from exc
        fault = self.doc.get("fault_injection")
        if fault is not None and "perturbation" in fault:
            float(fault["perturbation"])


def as_list(x) -> list:
    if x is None:
        return []
    return list(x) if isinstance(x, (list, tuple)) else [x]
