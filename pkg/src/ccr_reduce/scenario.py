"""Scenario files: a versioned JSON schema, loading and semantic validation."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import InvalidArgument
from .suites import REGISTRY, SUITES

SCHEMA_VERSION = 1

_vec4 = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}
_pair = {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "name", "grid", "suites"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "abstract"}}},
                {"type": "object", "additionalProperties": False, "required": ["kind", "n", "extent"],
                 "properties": {"kind": {"const": "gb"}, "n": {"type": "integer", "minimum": 3},
                                "extent": {"type": "number", "exclusiveMinimum": 0},
                                "exclusion": {"type": "number", "minimum": 0},
                                "window": {"type": "number", "exclusiveMinimum": 0}}},
            ]
        },
        "quadrature": {
            "type": "object", "additionalProperties": False, "required": ["extent", "levels"],
            "properties": {"extent": {"type": "number", "exclusiveMinimum": 0},
                           "window": {"type": "number", "exclusiveMinimum": 0},
                           "levels": {"type": "array", "items": {"type": "integer", "minimum": 3}, "minItems": 1}},
        },
        "regions": {
            "type": "array",
            "items": {"type": "object", "additionalProperties": False, "required": ["name", "center", "halfwidths"],
                      "properties": {"name": {"type": "string", "minLength": 1}, "center": _vec4,
                                     "halfwidths": _vec4}},
        },
        "order": {"type": "array", "items": _pair},
        "spacelike": {"type": "array", "items": _pair},
        "actions": {
            "type": "array",
            "items": {
                "type": "object", "additionalProperties": False, "required": ["name", "map"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "translation": _vec4,
                    "rotation": {"type": "array", "minItems": 3, "maxItems": 3,
                                 "items": {"type": "array", "items": {"type": "number"}, "minItems": 3,
                                           "maxItems": 3}},
                    "map": {"type": "object", "additionalProperties": {"type": "string"}},
                },
                "oneOf": [{"required": ["translation"]}, {"required": ["rotation"]}],
            },
        },
        "samples": {"type": "integer", "minimum": 1},
        "fock": {"type": "object", "additionalProperties": False,
                 "properties": {"points": {"enum": [2, 4, 6]}, "extent": {"type": "number", "exclusiveMinimum": 0},
                                "N": {"type": "integer", "minimum": 1, "maximum": 3}}},
        "global_local": {"type": "object", "additionalProperties": False,
                         "properties": {"n": {"type": "integer", "minimum": 3},
                                        "extent": {"type": "number", "exclusiveMinimum": 0},
                                        "halfwidths": _vec4,
                                        "spatial": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                                        "times": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                                        "samples": {"type": "integer", "minimum": 1}}},
        "suites": {"type": "array", "items": {"type": "string"}},
        "instances": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
    },
}


def validate(data: dict) -> dict:
    """Schema and cross-reference validation; raises :class:`InvalidArgument`."""
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidArgument(f"scenario {where}: {exc.message}") from None
    unknown = [s for s in data["suites"] if s not in SUITES]
    if unknown:
        raise InvalidArgument(f"unknown suite identifiers: {unknown}; known: {sorted(SUITES)}")
    for key in ("instances", "tolerances"):
        bad = [k for k in data.get(key, {}) if k not in REGISTRY]
        if bad:
            raise InvalidArgument(f"{key} name unknown checks: {bad}")
    names = [r["name"] for r in data.get("regions", [])]
    if len(set(names)) != len(names):
        raise InvalidArgument("duplicate region names")
    known = set(names)
    for key in ("order", "spacelike"):
        for a, b in data.get(key, []):
            if a not in known or b not in known:
                raise InvalidArgument(f"{key} refers to an undeclared region: {[a, b]}")
    for act in data.get("actions", []):
        bad = [r for pair in act["map"].items() for r in pair if r not in known]
        if bad:
            raise InvalidArgument(f"action {act['name']!r} refers to undeclared regions {bad}")
    if data["grid"]["kind"] == "abstract":
        grid_suites = [s for s in data["suites"] if any(REGISTRY[c].needs_grid for c in SUITES[s])]
        if grid_suites:
            raise InvalidArgument(f"suites {grid_suites} need a momentum grid")
    return data


def load(path) -> dict:
    """Read and validate a scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidArgument(f"cannot read scenario: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"scenario is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidArgument("scenario must be a JSON object")
    return validate(data)


def bundled(name: str) -> dict:
    """A scenario shipped with the package, e.g. ``"gb_small"``."""
    ref = resources.files("ccr_reduce") / "scenarios" / f"{name}.json"
    if not ref.is_file():
        raise InvalidArgument(f"no bundled scenario {name!r}")
    return validate(json.loads(ref.read_text()))


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("ccr_reduce") / "scenarios" / f"{name}.json"))
