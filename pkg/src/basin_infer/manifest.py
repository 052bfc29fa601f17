"""Run manifests: everything needed to replay a restart experiment."""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any

import jsonschema

SCHEMA_VERSION = 1

_BETA = {"type": "object", "properties": {"alpha": {"type": "number", "exclusiveMinimum": 0},
                                          "beta": {"type": "number", "exclusiveMinimum": 0}},
         "additionalProperties": False}

PRIORS_SCHEMA = {
    "type": "object",
    "properties": {
        "beta": _BETA,
        "eps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "minItems": 1},
        "spike_slab": {"type": "object", "required": ["p"],
                       "properties": {"p": {"type": "number", "minimum": 0, "maximum": 1}, "slab": _BETA},
                       "additionalProperties": False},
        "mfm": {"type": "object",
                "properties": {"family": {"enum": ["geometric", "zt_poisson", "custom"]},
                               "theta": {"type": "number", "exclusiveMinimum": 0},
                               "alpha": {"type": "number", "exclusiveMinimum": 0},
                               "k_max": {"type": "integer", "minimum": 2},
                               "pmf": {"type": "array", "items": {"type": "number", "minimum": 0}}},
                "additionalProperties": False},
    },
    "additionalProperties": False,
}

_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 1}

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["problem", "n"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "problem": {
            "type": "object", "required": ["kind"],
            "properties": {
                "kind": {"enum": ["double_well", "quadratic", "rotation", "affine_picard", "mixed_logit"]},
                "center": _VEC, "A": {"type": "array"}, "b": _VEC,
                "model": {"type": "object",
                          "required": ["delta", "price_coefs", "ownership", "costs"],
                          "properties": {"J": {"type": "integer", "minimum": 1}, "delta": _VEC,
                                         "price_coefs": _VEC, "ownership": {"type": "array"},
                                         "costs": _VEC}},
                "margin_cap": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "domain": {
            "type": "object", "required": ["kind"],
            "properties": {"kind": {"enum": ["box", "ball", "all"]}, "lower": _VEC, "upper": _VEC,
                           "center": _VEC, "radius": {"type": "number", "exclusiveMinimum": 0},
                           "dim": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
        "solver": {
            "type": "object",
            "properties": {"h": {"type": "number", "exclusiveMinimum": 0},
                           "residual_tol": {"type": "number", "exclusiveMinimum": 0},
                           "stall_window": {"type": "integer", "minimum": 1},
                           "max_steps": {"type": "integer", "minimum": 1},
                           "blowup_norm": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
        "sampler": {
            "type": "object",
            "properties": {"kind": {"enum": ["uniform_domain", "uniform_box"]},
                           "lower": _VEC, "upper": _VEC},
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
        "n": {"type": "integer", "minimum": 1},
        "eps_obs": {"type": "number", "exclusiveMinimum": 0},
        "priors": PRIORS_SCHEMA,
        "timestamp": {"type": "string"},
    },
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Invalid or unreadable configuration; maps to CLI exit code 2."""


def _validate(doc: Any, schema: dict, what: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{what}: at {where}: {exc.message}") from None


def read_json(path, what: str = "config") -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"{what}: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what}: malformed JSON in {path}: {exc}") from None


def load_manifest(path) -> dict[str, Any]:
    doc = read_json(path, "manifest")
    validate_manifest(doc)
    return doc


def validate_manifest(doc: Any) -> None:
    _validate(doc, MANIFEST_SCHEMA, "manifest")
    prob = doc["problem"]
    if prob["kind"] == "mixed_logit" and "model" not in prob:
        raise ConfigError("manifest: at problem: mixed_logit needs a 'model'")
    if prob["kind"] != "mixed_logit" and "domain" not in doc:
        raise ConfigError("manifest: 'domain' is required for this problem kind")


def validate_priors(doc: Any) -> None:
    _validate(doc, PRIORS_SCHEMA, "prior spec")


def apply_overrides(doc: dict[str, Any], **overrides) -> dict[str, Any]:
    """Copy of the manifest with non-None CLI overrides applied."""
    out = copy.deepcopy(doc)
    out.setdefault("schema_version", SCHEMA_VERSION)
    for key, val in overrides.items():
        if val is not None:
            out[key] = val
    validate_manifest(out)
    return out


def dumps(obj: Any) -> str:
    """Canonical JSON text used for every artifact the CLI writes."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def canonical(obj: Any) -> Any:
    """Drop timestamp fields so replays compare equal."""
    if isinstance(obj, dict):
        return {k: canonical(v) for k, v in obj.items() if k != "timestamp"}
    if isinstance(obj, list):
        return [canonical(v) for v in obj]
    return obj
