"""Deterministic JSON output; floats carry 17 significant digits."""

import json
import math

import numpy as np


def _float(x):
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    # keep floats distinguishable from integers after parsing
    return text if any(ch in text for ch in ".e") else text + ".0"


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k), ensure_ascii=False) + ": " + _encode(v, indent, level + 1)
                 for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Serialize ``obj`` with insertion-ordered keys; always newline-terminated."""
    return _encode(obj, indent, 0) + "\n"
