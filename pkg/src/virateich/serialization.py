"""JSON schemas and loaders for the command-line inputs.

Validation uses ``jsonschema``; the first failure is reported as a
:class:`SchemaError` carrying the dotted path of the offending field.
"""

from __future__ import annotations

import json

import jsonschema
import numpy as np

from .coframe import CoframeGrid, Grid2D, geometric_heights, make_example_coframe
from .diffeo import DiffeoLift
from .errors import InvalidInputError, SchemaError
from .hill import BoundaryConnection
from .spectral import PeriodicFn
from .teich import FNPoint
from .trumpet import TrumpetPoint

NUMBER_ARRAY = {"type": "array", "items": {"type": "number"}, "minItems": 1}

PERIODIC_FN = {
    "type": "object",
    "required": ["n", "values"],
    "properties": {
        "n": {"type": "integer", "minimum": 16},
        "weight": {"type": "integer"},
        "values": NUMBER_ARRAY,
    },
}

CONNECTION = {
    "type": "object",
    "required": ["a", "s", "u"],
    "properties": {"a": PERIODIC_FN, "s": PERIODIC_FN, "u": PERIODIC_FN},
}

DIFFEO = {
    "type": "object",
    "required": ["phi"],
    "properties": {"phi": PERIODIC_FN, "winding": {"type": "integer"}},
}

TRUMPET = {
    "type": "object",
    "required": ["ell", "F"],
    "properties": {"ell": {"type": "number", "exclusiveMinimum": 0}, "F": DIFFEO},
}

FN_POINT = {
    "type": "object",
    "required": ["g", "interior", "boundary"],
    "properties": {
        "g": {"type": "integer", "minimum": 0},
        "r": {"type": "integer", "minimum": 0},
        "interior": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
        "boundary": {"type": "array", "items": TRUMPET},
    },
}

COMPONENT_ROWS = {"type": "array", "items": NUMBER_ARRAY, "minItems": 5}

COFRAME = {
    "type": "object",
    "oneOf": [
        {
            "required": ["nx", "y", "data"],
            "properties": {
                "nx": {"type": "integer", "minimum": 16},
                "y": NUMBER_ARRAY,
                "data": {
                    "type": "object",
                    "required": ["a1x", "a1y", "a2x", "a2y", "kx", "ky"],
                    "properties": {k: COMPONENT_ROWS for k in ("a1x", "a1y", "a2x", "a2y", "kx", "ky")},
                },
            },
        },
        {
            "required": ["example", "nx"],
            "properties": {
                "example": {"enum": ["half_plane", "disk", "cylinder", "fefferman_graham"]},
                "nx": {"type": "integer", "minimum": 16},
                "y": NUMBER_ARRAY,
                "y_min": {"type": "number", "exclusiveMinimum": 0},
                "y_max": {"type": "number", "exclusiveMinimum": 0},
                "ell": {"type": "number", "exclusiveMinimum": 0},
                "T": PERIODIC_FN,
            },
        },
    ],
}


def _path(error):
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def validate(data, schema):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise SchemaError(_path(err), err.message)
    return data


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InvalidInputError(f"{path}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_periodic(data, weight=None):
    validate(data, PERIODIC_FN)
    f = PeriodicFn.from_dict(data)
    return f if weight is None else PeriodicFn(f.values, weight)


def load_potential(data):
    return load_periodic(data, weight=2)


def load_connection(data):
    validate(data, CONNECTION)
    A = BoundaryConnection.from_dict(data)
    return A


def load_diffeo(data):
    validate(data, DIFFEO)
    return DiffeoLift.from_dict(data)


def load_trumpet(data):
    validate(data, TRUMPET)
    return TrumpetPoint.from_dict(data)


def load_fn_point(data):
    validate(data, FN_POINT)
    return FNPoint.from_dict(data)


def load_coframe(data):
    validate(data, COFRAME)
    if "data" in data:
        return CoframeGrid.from_dict(data)
    if "y" in data:
        y = np.asarray(data["y"], dtype=float)
    else:
        y = geometric_heights(data.get("y_min", 1e-3), data.get("y_max", 0.5))
    grid2d = Grid2D(data["nx"], y)
    T = load_potential(data["T"]) if "T" in data else None
    return make_example_coframe(data["example"], grid2d, ell=data.get("ell", 1.0), T=T)


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
