"""Serialization helpers and run-config validation."""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import jsonschema
import numpy as np

OUTPUT_ENV = "SESLAB_OUTPUT_DIR"
DEFAULT_OUTPUT = "seslab_output"


class ConfigError(ValueError):
    """Malformed run configuration; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def format_value(v):
    """Shortest round-trip text for floats; other scalars via ``str``."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row.get(k) for k in header]
            w.writerow([format_value(v) for v in row])
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        # JSON has no inf/nan; keep them readable and reversible
        return f if math.isfinite(f) else repr(f)
    return obj


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def output_dir(flag=None):
    return Path(flag or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int = {"type": "integer", "minimum": 1}
_vec = {"type": "array", "items": _num, "minItems": 1}
_mat = {"type": "array", "items": _vec}

_MODEL = {"b": _vec, "nu": _vec, "rho": _vec, "weights": _mat, "topology": {
    "type": "string", "enum": ["complete", "dyad", "star"]}}

COMMAND_FIELDS = {
    "simulate": {**_MODEL, "x0": _num, "y0": _vec, "t_end": _pos, "n_samples": _int,
                 "rtol": _pos, "atol": _pos},
    "equilibrium": {**_MODEL, "method": {"type": "string", "enum": ["auto", "numerical"]}},
    "stability": {**_MODEL, "oracle_trials": {"type": "integer", "minimum": 0},
                  "oracle_scale": _pos},
    "aggregate": {"n": {"type": "integer", "minimum": 2}, "t_end": _pos, "x0": _pos,
                  "y0": _num, "guess_ba": _pos, "guess_p": _num},
    "ocp": {"delta": _pos, "mu": {"type": "number", "minimum": 0}, "beta_el": _pos,
            "x0": _pos, "t_end": _pos, "n_grid": {"type": "integer", "minimum": 4}},
    "game": {"mode": {"type": "string", "enum": ["continuous", "discrete"]},
             "nu1": _num, "nu2": _num, "rho_L": _num, "rho_H": _num, "nu_L": _num,
             "nu_H": _num},
    "learn": {"nu1": _num, "nu2": _num, "b1": _pos, "b2": _pos, "x0": {"type": "number",
              "minimum": 0}, "y1": _num, "y2": _num, "rho1": _num, "rho2": _num,
              "t_end": _pos, "n_samples": _int},
    "sweep": {"figure": {"type": "string"}, "n": {"type": "integer", "minimum": 0}},
}

_COMMON = {"seed": {"type": "integer"}, "output_dir": {"type": "string"},
           "preset": {"type": "string"}}


def schema_for(command):
    props = {**_COMMON, **COMMAND_FIELDS[command]}
    return {"type": "object", "properties": props, "additionalProperties": False}


def validate_config(command, cfg):
    """Raise ConfigError with a dotted field path on the first schema violation."""
    if command not in COMMAND_FIELDS:
        raise ConfigError(f"unknown command {command!r}")
    validator = jsonschema.Draft202012Validator(schema_for(command))
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.absolute_path)
        if err.validator == "additionalProperties":
            extra = sorted(set(cfg) - set(schema_for(command)["properties"]))
            path = extra[0] if extra else path
            raise ConfigError("unknown key", path)
        raise ConfigError(err.message, path or "<root>")
    return cfg


def load_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}", str(path)) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("top level must be an object", "<root>")
    return cfg
