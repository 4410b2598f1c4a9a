"""Arbitrary-precision sRGB -> CIELab reference, independent of the package.

Run as a script to regenerate ``tests/data/lab_golden.csv``.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

PRIMARIES = [("0.64", "0.33"), ("0.30", "0.60"), ("0.15", "0.06")]
WHITE = ("0.3127", "0.3290")
GOLDEN = Path(__file__).resolve().parent.parent / "data" / "lab_golden.csv"


def _xyz(x: str, y: str) -> list:
    x, y = mp.mpf(x), mp.mpf(y)
    return [x / y, mp.mpf(1), (1 - x - y) / y]


def rgb_to_xyz_matrix() -> mp.matrix:
    cols = mp.matrix([_xyz(*p) for p in PRIMARIES]).T
    scale = mp.lu_solve(cols, mp.matrix(_xyz(*WHITE)))
    return cols * mp.diag(scale)


_M = rgb_to_xyz_matrix()
_WN = mp.matrix(_xyz(*WHITE))


def _linear(c8: int) -> mp.mpf:
    c = mp.mpf(c8) / 255
    return c / mp.mpf("12.92") if c <= mp.mpf("0.04045") else ((c + mp.mpf("0.055")) / mp.mpf("1.055")) ** mp.mpf("2.4")


def _f(t: mp.mpf) -> mp.mpf:
    eps = mp.mpf(216) / 24389
    kappa = mp.mpf(24389) / 27
    return mp.cbrt(t) if t > eps else (kappa * t + 16) / 116


def lab(r: int, g: int, b: int) -> tuple:
    xyz = _M * mp.matrix([_linear(r), _linear(g), _linear(b)])
    fx, fy, fz = (_f(xyz[i] / _WN[i]) for i in range(3))
    return 116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)


def golden_colors() -> list[tuple[int, int, int]]:
    """Cube corners, a gray ramp and pseudo-random colors from a fixed LCG."""
    out = [(r, g, b) for r in (0, 255) for g in (0, 255) for b in (0, 255)]
    out += [(v, v, v) for v in (1, 10, 11, 64, 118, 128, 200, 254)]
    state = 12345
    while len(out) < 64:
        rgb = []
        for _ in range(3):
            state = (1103515245 * state + 12345) % 2**31
            rgb.append(state >> 23)
        out.append(tuple(rgb))
    return out


def write_golden(path: Path = GOLDEN) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "g", "b", "L", "a_star", "b_star"])
        for rgb in golden_colors():
            w.writerow([*rgb, *(mp.nstr(v, 15, min_fixed=-30, max_fixed=30) for v in lab(*rgb))])


if __name__ == "__main__":
    write_golden(Path(sys.argv[1]) if len(sys.argv) > 1 else GOLDEN)


# Published 4-decimal sRGB matrix and white point; precise enough for
# Monte-Carlo checks and shares no code with the package.
IEC_MATRIX = [
    [0.4124, 0.3576, 0.1805],
    [0.2126, 0.7152, 0.0722],
    [0.0193, 0.1192, 0.9505],
]
IEC_WHITE = [0.9505, 1.0, 1.089]


def lab_float(rgb8):
    """Vectorized reference conversion for ``(N, 3)`` uint8 input."""
    import numpy as np

    c = np.asarray(rgb8, dtype=np.float64) / 255.0
    lin = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = lin @ np.array(IEC_MATRIX).T / np.array(IEC_WHITE)
    f = np.where(xyz > (6 / 29) ** 3, np.cbrt(xyz), xyz / (3 * (6 / 29) ** 2) + 4 / 29)
    return np.stack([116 * f[:, 1] - 16, 500 * (f[:, 0] - f[:, 1]), 200 * (f[:, 1] - f[:, 2])], axis=1)
