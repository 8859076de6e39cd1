"""Scenario files: strict JSON schema and conversion to model objects."""

from __future__ import annotations

import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .equilibria import find_ede_roots
from .model import AttitudePolicy, ModelParams, ScaledState
from .simulate import near_ede_initial

DEFAULT_PARAMS = {"R0": 4.0, "v": 50.0, "h": 0.0, "epsilon": 5e-4}

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}

AXIS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "min", "max", "n"],
    "properties": {
        "name": {"type": "string"},
        "min": _num,
        "max": _num,
        "n": {"type": "integer", "minimum": 1},
        "scale": {"enum": ["linear", "log"]},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["policy"],
    "properties": {
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"R0": _pos, "v": _nonneg, "h": _nonneg,
                           "epsilon": {"type": "number", "exclusiveMinimum": 0,
                                       "exclusiveMaximum": 1}},
        },
        "policy": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family", "Sigma"],
            "properties": {
                "family": {"enum": ["constant", "monotone_exp", "peaked"]},
                "Sigma": _nonneg,
                "a": _pos,
                "d": _num,
                "omega0": _nonneg,
            },
        },
        "simulation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["initial"],
            "properties": {
                "T_end": _pos,
                "max_T_end": _pos,
                "rtol": _pos,
                "atol": _pos,
                "record_stride": _pos,
                "method": {"enum": ["LSODA", "Radau", "BDF"]},
                "initial": {
                    "oneOf": [
                        {"type": "array", "items": _nonneg, "minItems": 6, "maxItems": 6},
                        {"const": "near_ede"},
                    ]
                },
            },
        },
        "sweep": {"type": "array", "items": AXIS_SCHEMA, "minItems": 1, "maxItems": 2},
        "levels": {"type": "array", "items": _pos},
    },
}


class ConfigError(ValueError):
    """Malformed or invalid scenario (CLI exit code 2)."""


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    n: int
    scale: str = "linear"

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.n)
        return np.linspace(self.min, self.max, self.n)


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams
    policy: AttitudePolicy
    raw: dict
    sweep: tuple[Axis, ...] = ()

    @property
    def simulation(self) -> dict | None:
        return self.raw.get("simulation")


def _where(err: jsonschema.ValidationError) -> str:
    path = "/".join(str(p) for p in err.absolute_path)
    return path or "<root>"


def validate(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        raise ConfigError(f"config error at '{_where(e)}': {e.message}")


def parse(doc: dict) -> ScenarioConfig:
    """Validate a decoded document and build the model objects it describes."""
    validate(doc)
    p = {**DEFAULT_PARAMS, **doc.get("params", {})}
    pol = doc["policy"]
    fam = pol["family"]
    try:
        params = ModelParams(R0=p["R0"], v=p["v"], h=p["h"], epsilon=p["epsilon"])
        if fam == "constant":
            policy = AttitudePolicy.constant(pol["Sigma"], pol.get("omega0", 0.0))
        elif fam == "monotone_exp":
            policy = AttitudePolicy.monotone_exp(pol["Sigma"], _need(pol, "a"))
        else:
            policy = AttitudePolicy.peaked(pol["Sigma"], _need(pol, "a"), _need(pol, "d"))
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"config error at 'params/policy': {exc}") from None
    for extra in ("omega0",) if fam != "constant" else ("a", "d"):
        if extra in pol:
            raise ConfigError(f"config error at 'policy/{extra}': not used by family {fam!r}")
    axes = tuple(Axis(**ax) for ax in doc.get("sweep", ()))
    for k, ax in enumerate(axes):
        if ax.scale == "log" and ax.min <= 0:
            raise ConfigError(f"config error at 'sweep/{k}/min': log axis needs min > 0")
    return ScenarioConfig(params, policy, doc, axes)


def _need(pol: dict, key: str):
    if key not in pol:
        raise ConfigError(f"config error at 'policy/{key}': required for family "
                          f"{pol['family']!r}")
    return pol[key]


def load(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}") from None
    return parse(doc)


def initial_state(cfg: ScenarioConfig):
    """Initial state from the simulation block; ``"near_ede"`` uses the smallest root."""
    ini = cfg.simulation["initial"]
    if ini == "near_ede":
        roots = find_ede_roots(cfg.params, cfg.policy)
        if not roots:
            raise ConfigError("config error at 'simulation/initial': no endemic "
                              "equilibrium to start near")
        return near_ede_initial(cfg.params, cfg.policy, roots[0].Y)
    return ScaledState(*map(float, ini))
