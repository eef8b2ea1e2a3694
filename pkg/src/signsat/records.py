"""Structured output: JSON records with fixed 17-digit float rendering, and
run manifests.

``json.dumps`` prints floats with ``repr`` (shortest round trip); outputs here
use ``%.17g`` instead so that every real has the same rendering rule in CSV
and record outputs alike.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import __version__


def fmt_real(x) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_real(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating, bool)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def manifest(command: str, config: dict, outputs: list) -> dict:
    """Everything needed to regenerate ``outputs``; deliberately no timestamps
    or thread counts, which would make reruns differ byte for byte."""
    return {
        "tool": "signsat",
        "version": __version__,
        "command": command,
        "config": config,
        "outputs": list(outputs),
    }


def write_text(path, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def write_manifest(path, command: str, config: dict, outputs: list) -> str:
    target = f"{path}.manifest.json"
    write_text(target, dumps(manifest(command, config, outputs)) + "\n")
    return target
