"""Portable CSV/JSON writers with fixed number formatting.

Floats are written with 9 significant digits so golden files compare
byte-for-byte across platforms.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np


def fmt(x: object) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return ""
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return format(x, ".9g")
    return str(x)


def _round9(obj: object) -> object:
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return None
        return float(format(x, ".9g"))
    return obj


def dumps(obj: object) -> str:
    """JSON with insertion-ordered keys and 9-significant-digit floats."""
    return json.dumps(_round9(obj), indent=2, ensure_ascii=False) + "\n"


def write_json(path: Path, obj: object) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_histogram(path: Path, hist: np.ndarray, bin_width: float = 1.0) -> None:
    """``bin_lower_edge,count`` rows; the last row is the overflow bin."""
    write_csv(path, ("bin_lower_edge", "count"), ((i * bin_width, c) for i, c in enumerate(hist)))
