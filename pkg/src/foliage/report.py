"""Machine-readable reports: canonical JSON text and its schema."""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .config import DEFAULTS, Thresholds
from .exterior import BasicForm
from .fourier import FourierScalar

SCHEMA_ID = "foliage-report/1"
REPORT_KINDS = ("cohomology", "identities", "lefschetz")

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": SCHEMA_ID,
    "type": "object",
    "required": ["schema", "kind", "model", "K", "thresholds", "result", "ok"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "kind": {"enum": list(REPORT_KINDS)},
        "model": {
            "type": "object",
            "required": ["name", "n", "flags"],
            "properties": {
                "name": {"type": "string"},
                "n": {"type": "integer", "minimum": 1},
                "flags": {"type": "object", "additionalProperties": {"type": "boolean"}},
            },
        },
        "K": {"type": "integer", "minimum": 0},
        "deformation": {"type": ["array", "null"]},
        "thresholds": {
            "type": "object",
            "required": [f.name for f in dataclasses.fields(Thresholds)],
            "additionalProperties": {"type": "number"},
        },
        "result": {"type": "object"},
        "ok": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types; forms become ``{word: [[mode, re, im], ...]}``."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, BasicForm):
        return {w.label(): to_jsonable(f) for w, f in sorted(obj.terms.items())}
    if isinstance(obj, FourierScalar):
        return [[list(m), c.real, c.imag] for m, c in sorted(obj.terms.items())]
    if isinstance(obj, enum.Enum):
        return obj.name
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(map(str, k))
    return str(k)


def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g") if x != int(x) or abs(x) >= 1e17 else format(x, ".1f")


def dumps(obj: Any, indent: int = 2) -> str:
    """Canonical JSON: sorted keys, floats at 17 significant digits."""
    return _emit(to_jsonable(obj), 0, indent) + "\n"


def _emit(v, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, dict):
        if not v:
            return "{}"
        body = ",\n".join(f"{pad}{_string(k)}: {_emit(v[k], level + 1, indent)}" for k in sorted(v))
        return "{\n" + body + "\n" + end + "}"
    if isinstance(v, list):
        if not v:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in v):
            return "[" + ", ".join(_emit(x, level + 1, indent) for x in v) + "]"
        return "[\n" + ",\n".join(pad + _emit(x, level + 1, indent) for x in v) + "\n" + end + "]"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _float(v)
    if v is None:
        return "null"
    return _string(v)


def _string(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def build_report(kind: str, model, K: int, result: Any, ok: bool, *, thresholds: Thresholds = DEFAULTS,
                 notes: list[str] | None = None) -> dict:
    info = model.describe()
    doc = {
        "schema": SCHEMA_ID,
        "kind": kind,
        "model": info,
        "K": K,
        "deformation": info["params"].get("deformation"),
        "thresholds": dataclasses.asdict(thresholds),
        "result": to_jsonable(result),
        "ok": bool(ok),
        "notes": list(notes or []),
    }
    doc = to_jsonable(doc)
    validate_report(doc)
    return doc


def validate_report(doc: dict) -> None:
    jsonschema.validate(doc, SCHEMA)


def write_report(doc: dict, path: str | Path | None) -> str:
    text = dumps(doc)
    if path is not None and str(path) != "-":
        Path(path).write_text(text)
    return text


__all__ = ["REPORT_KINDS", "SCHEMA", "SCHEMA_ID", "build_report", "dumps", "to_jsonable", "validate_report", "write_report"]
