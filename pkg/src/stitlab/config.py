"""Experiment configuration: TOML loading, schema validation, hashing.

Every run is fully determined by (config, master seed); the hash of the
canonical config JSON is recorded in every output artifact.
"""
from __future__ import annotations

import hashlib
import json
import sys

import jsonschema

from .errors import ConfigError
from .geometry import Polygon, Polyhedron, box, rectangle

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_MEASURE_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"enum": ["discrete", "isotropic"]},
        "atoms": {"type": "array", "items": {"type": "array"}},
    },
    "required": ["type"],
    "additionalProperties": False,
}

_WINDOW = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 6}

_SCHEMAS = {
    "simulate": {
        "type": "object",
        "properties": {
            "measure": _MEASURE_SCHEMA,
            "simulate": {
                "type": "object",
                "properties": {
                    "dimension": {"enum": [2, 3]},
                    "t": {"type": "number", "exclusiveMinimum": 0},
                    "window": _WINDOW,
                    "seed": {"type": "integer"},
                    "max_cells": {"type": "integer", "minimum": 1},
                    "out": {"type": "string"},
                    "svg": {"type": "string"},
                },
                "required": ["dimension", "t", "window", "seed"],
                "additionalProperties": False,
            },
        },
        "required": ["measure", "simulate"],
    },
    "palm": {
        "type": "object",
        "properties": {
            "palm": {
                "type": "object",
                "properties": {
                    "d": {"type": "integer", "minimum": 2},
                    "j": {"enum": [0, 1]},
                    "t": {"type": "number", "exclusiveMinimum": 0},
                    "samples": {"type": "integer", "minimum": 1},
                    "seed": {"type": "integer"},
                    "out": {"type": "string"},
                },
                "required": ["d", "j", "t", "samples", "seed"],
                "additionalProperties": False,
            },
        },
        "required": ["palm"],
    },
    "mecke": {
        "type": "object",
        "properties": {
            "measure": _MEASURE_SCHEMA,
            "mecke": {
                "type": "object",
                "properties": {
                    "variant": {"enum": ["simple", "nested"]},
                    "horizon": {"type": "number", "exclusiveMinimum": 0},
                    "window": _WINDOW,
                    "inner": _WINDOW,
                    "reps": {"type": "integer", "minimum": 2},
                    "target_count": {"type": "integer", "minimum": 0},
                    "grid_points": {"type": "integer", "minimum": 3},
                    "inner_mc": {"type": "integer", "minimum": 1},
                    "seed": {"type": "integer"},
                    "out": {"type": "string"},
                },
                "required": ["variant", "horizon", "window", "inner", "reps", "seed"],
                "additionalProperties": False,
            },
        },
        "required": ["measure", "mecke"],
    },
    "verify": {
        "type": "object",
        "properties": {
            "verify": {
                "type": "object",
                "properties": {
                    "seed": {"type": "integer"},
                    "criteria": {"type": "array", "items": {"type": "integer",
                                                            "minimum": 1, "maximum": 9}},
                    "out": {"type": "string"},
                    "markdown": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "required": ["verify"],
    },
}


def load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def validate(config: dict, command: str) -> None:
    """Schema-check a config for a subcommand; ConfigError carries the path."""
    schema = _SCHEMAS.get(command)
    if schema is None:
        raise ConfigError(f"no config schema for command {command!r}")
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {err.message}")


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def window_from_spec(spec) -> Polygon | Polyhedron:
    """[x0,y0,x1,y1] for a rectangle, [x0,y0,z0,x1,y1,z1] for a box."""
    vals = [float(v) for v in spec]
    if len(vals) == 4:
        return rectangle(vals[0], vals[1], vals[2], vals[3])
    if len(vals) == 6:
        return box(*vals)
    raise ConfigError("window must have 4 (planar) or 6 (spatial) numbers")
