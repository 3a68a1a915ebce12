"""Orbit JSON files (schema v1) and sample CSV output.

Floats are written with 17 significant digits so every value round-trips
exactly, and the writer is canonical (fixed key order, fixed layout), so
write -> read -> write is byte-identical. No timestamps or host data are
stored.
"""

import json
import math

import numpy as np

from .model import ModelParams, energy
from .trajectory import FourierTrajectory, evaluate

SCHEMA_VERSION = 1

__all__ = ["SCHEMA_VERSION", "OrbitFileError", "OrbitFile", "dumps", "loads",
           "write_orbit", "read_orbit", "sample_rows", "write_sample_csv"]


class OrbitFileError(ValueError):
    """Malformed or unsupported orbit file."""


class OrbitFile:
    def __init__(self, trajectory: FourierTrajectory, params: ModelParams = ModelParams(),
                 provenance: dict = None):
        self.trajectory = trajectory
        self.params = params
        self.provenance = dict(provenance or {})

    @property
    def omega(self):
        return self.trajectory.omega

    @property
    def k(self):
        return self.trajectory.k

    def to_obj(self) -> dict:
        tr = self.trajectory
        return {
            "schema_version": SCHEMA_VERSION,
            "omega": tr.omega,
            "k": tr.k,
            "params": {"m": self.params.m, "J": self.params.J, "g": self.params.g},
            "a": [float(v) for v in tr.a],
            "b": [float(v) for v in tr.b],
            "provenance": self.provenance,
        }


def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise OrbitFileError(f"cannot serialize non-finite value {v!r}")
    text = "%.17g" % v
    # keep floats recognisable as floats once parsed back
    if all(ch not in text for ch in ".eEn"):
        text += ".0"
    return text


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(key))}: {_encode(val, indent, level + 1)}"
                 for key, val in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(orbit: OrbitFile) -> str:
    return _encode(orbit.to_obj(), 2, 0) + "\n"


def _field(obj, key, kind):
    if key not in obj:
        raise OrbitFileError(f"missing field {key!r}")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise OrbitFileError(f"field {key!r} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise OrbitFileError(f"field {key!r} must be an integer")
        return value
    if not isinstance(value, kind):
        raise OrbitFileError(f"field {key!r} has the wrong type")
    return value


def _float_list(obj, key):
    values = _field(obj, key, list)
    if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
        raise OrbitFileError(f"field {key!r} must be a list of numbers")
    return [float(v) for v in values]


def loads(text: str) -> OrbitFile:
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise OrbitFileError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise OrbitFileError("orbit file must hold a JSON object")
    version = _field(obj, "schema_version", int)
    if version != SCHEMA_VERSION:
        raise OrbitFileError(f"unsupported schema_version {version}")
    raw = _field(obj, "params", dict)
    a, b = _float_list(obj, "a"), _float_list(obj, "b")
    if len(a) < 1 or len(a) != len(b):
        raise OrbitFileError("coefficient arrays must have equal length >= 1")
    try:
        params = ModelParams(_field(raw, "m", float), _field(raw, "J", float),
                             _field(raw, "g", float))
        tr = FourierTrajectory(_field(obj, "omega", float), _field(obj, "k", int), a, b)
    except ValueError as exc:
        if isinstance(exc, OrbitFileError):
            raise
        raise OrbitFileError(str(exc)) from exc
    provenance = obj.get("provenance", {})
    if not isinstance(provenance, dict):
        raise OrbitFileError("provenance must be an object")
    return OrbitFile(tr, params, provenance)


def write_orbit(path, orbit: OrbitFile):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(orbit))


def read_orbit(path) -> OrbitFile:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise OrbitFileError(f"cannot read {path}: {exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise OrbitFileError(f"{path} is not UTF-8 text") from exc
    return loads(text)


SAMPLE_HEADER = ("t", "x", "phi", "xdot", "phidot", "energy")


def sample_rows(orbit: OrbitFile, points: int) -> np.ndarray:
    """Rows ``t, x, phi, xdot, phidot, energy`` at ``t_i = i omega / points``, i = 0..points."""
    if points < 1:
        raise ValueError(f"points must be >= 1, got {points}")
    tr = orbit.trajectory
    t = np.arange(points + 1) * (tr.omega / points)
    s, _ = evaluate(tr, t)
    e = energy(orbit.params, s)
    return np.column_stack([t, s.x, s.phi, s.xdot, s.phidot, e])


def write_sample_csv(path, rows: np.ndarray):
    lines = [",".join(SAMPLE_HEADER)]
    lines.extend(",".join("%.17g" % v for v in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
