"""Deterministic JSON rendering for reports: sorted keys, floats to 6 decimals."""

from __future__ import annotations

import json
import math

SCHEMA_VERSION = 1


def _render(obj, out: list[str]) -> None:
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append("null" if not math.isfinite(obj) else f"{obj:.6f}")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for k, key in enumerate(sorted(obj)):
            if k:
                out.append(", ")
            out.append(json.dumps(str(key), ensure_ascii=False) + ": ")
            _render(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(", ")
            _render(item, out)
        out.append("]")
    else:
        # numpy scalars and the like
        if hasattr(obj, "item"):
            _render(obj.item(), out)
        else:
            raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def dumps(obj) -> str:
    out: list[str] = []
    _render(obj, out)
    return "".join(out) + "\n"
