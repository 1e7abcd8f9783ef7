"""Deterministic JSON text: insertion-ordered keys, floats with 17 significant digits."""

from __future__ import annotations

import json
import math

import numpy as np

__all__ = ["dumps", "compact", "to_plain"]


def to_plain(obj):
    """Convert numpy scalars/arrays and enums to plain Python values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        # JSON has no representation; keep the key set stable with null
        return "null"
    text = format(x, ".17g")
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def _encode(obj, indent: int, depth: int) -> str:
    pad = "\n" + " " * (indent * (depth + 1))
    end = "\n" + " " * (indent * depth)
    if obj is None or isinstance(obj, (bool, str)) or (isinstance(obj, int) and not isinstance(obj, bool)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_encode(v, indent, depth + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [_encode(v, indent, depth + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(to_plain(obj), indent, 0) + "\n"


def compact(obj) -> str:
    """Single-line form used for error reports on stderr."""
    return json.dumps(to_plain(obj), separators=(",", ":"))
