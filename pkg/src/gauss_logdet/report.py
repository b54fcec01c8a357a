"""Canonical JSON reports.

Floats are written in their shortest round-trip form, so a report parses
back to the same values and re-serializes to the same bytes. Non-finite floats
become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

import json
import math

import numpy as np

__all__ = ["dumps", "loads", "format_float"]

_INDENT = "  "


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return repr(x)


def _emit(obj, depth, out):
    pad = _INDENT * (depth + 1)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(key), ensure_ascii=False)}: ")
            _emit(value, depth + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(_INDENT * depth + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(pad)
            _emit(value, depth + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(_INDENT * depth + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    out = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def loads(text):
    return json.loads(text)
