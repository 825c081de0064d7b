"""Deterministic JSON serialization for result documents.

Key order is insertion order (the builders construct documents in a fixed
order) and floats are rendered with 17 significant digits, so a value
round-trips exactly and identical inputs hash identically.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

__all__ = ["render_json", "sha256_file"]


def _render_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    text = format(x, ".17g")
    # Keep a numeric token that parses back as float.
    return text


def _render(obj, pieces: list[str]) -> None:
    if obj is None:
        pieces.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, str):
        pieces.append(_escape(obj))
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(_render_float(float(obj)))
    elif isinstance(obj, dict):
        pieces.append("{")
        for idx, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if idx:
                pieces.append(",")
            pieces.append(_escape(key))
            pieces.append(":")
            _render(value, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        pieces.append("[")
        for idx, value in enumerate(obj):
            if idx:
                pieces.append(",")
            _render(value, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _escape(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def render_json(obj) -> str:
    """Serialize to a deterministic JSON string (no trailing newline)."""
    pieces: list[str] = []
    _render(obj, pieces)
    return "".join(pieces)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
