"""sRGB (8-bit) to CIELab conversion and CIE76 color distance.

The conversion chain is the usual one: inverse sRGB companding to linear
RGB, a linear map to CIE XYZ relative to the D65 white (2 degree
observer), then the CIE 1976 L*a*b* transform.  The RGB->XYZ matrix is
derived from the sRGB primaries and the D65 chromaticity in exact rational
arithmetic, so white lands on the neutral axis and grays have a* = b* = 0
up to float rounding.

Images are handled as ``numpy`` arrays: ``uint8`` of shape ``(H, W, 3)``
for sRGB and ``float64`` of shape ``(H, W, 3)`` for Lab.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError

#: Bumped whenever a change here alters Lab output; part of the cache key.
COLORSPACE_VERSION = "srgb-d65-cie76/1"

_PRIMARIES = {
    "r": (Fraction("0.64"), Fraction("0.33")),
    "g": (Fraction("0.30"), Fraction("0.60")),
    "b": (Fraction("0.15"), Fraction("0.06")),
}
_WHITE_XY = (Fraction("0.3127"), Fraction("0.3290"))

# CIE exact constants: (6/29)**3 and (29/3)**3
LAB_EPSILON = Fraction(216, 24389)
LAB_KAPPA = Fraction(24389, 27)


class Srgb8(NamedTuple):
    r: int
    g: int
    b: int


class LabColor(NamedTuple):
    l_star: float
    a_star: float
    b_star: float


def _xyz_from_xy(x: Fraction, y: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    return x / y, Fraction(1), (1 - x - y) / y


def _solve3(m: list[list[Fraction]], v: list[Fraction]) -> list[Fraction]:
    # Cramer's rule; the matrix is fixed and well conditioned.
    def det(a: list[list[Fraction]]) -> Fraction:
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )

    d = det(m)
    out = []
    for col in range(3):
        mc = [row[:] for row in m]
        for i in range(3):
            mc[i][col] = v[i]
        out.append(det(mc) / d)
    return out


def _rgb_to_xyz_matrix() -> tuple[list[list[Fraction]], tuple[Fraction, Fraction, Fraction]]:
    cols = [_xyz_from_xy(*_PRIMARIES[c]) for c in "rgb"]
    p = [[cols[j][i] for j in range(3)] for i in range(3)]
    white = _xyz_from_xy(*_WHITE_XY)
    scale = _solve3(p, list(white))
    m = [[p[i][j] * scale[j] for j in range(3)] for i in range(3)]
    return m, white


_M_EXACT, _WHITE_EXACT = _rgb_to_xyz_matrix()
RGB_TO_XYZ = np.array([[float(v) for v in row] for row in _M_EXACT])
WHITE_D65 = np.array([float(v) for v in _WHITE_EXACT])

_EPS = float(LAB_EPSILON)
_KAPPA = float(LAB_KAPPA)


def _linearize(c: np.ndarray) -> np.ndarray:
    c = c / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


# 8-bit input has only 256 levels per channel
_LINEAR_LUT = _linearize(np.arange(256, dtype=np.float64))


def _f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _EPS, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)


def srgb_to_lab_array(rgb: np.ndarray) -> np.ndarray:
    """Convert an ``(..., 3)`` array of 8-bit sRGB values to CIELab.

    Any integer dtype is accepted; values must lie in [0, 255].
    """
    rgb = np.asarray(rgb)
    if rgb.shape[-1] != 3:
        raise ValueError(f"expected trailing axis of size 3, got shape {rgb.shape}")
    if rgb.size and (rgb.min() < 0 or rgb.max() > 255):
        raise ValueError("sRGB channel values must lie in [0, 255]")
    lin = _LINEAR_LUT[rgb.astype(np.intp)]
    r, g, b = lin[..., 0], lin[..., 1], lin[..., 2]
    # explicit elementwise products keep results independent of pixel position
    m = RGB_TO_XYZ
    fx = _f((m[0, 0] * r + m[0, 1] * g + m[0, 2] * b) / WHITE_D65[0])
    fy = _f((m[1, 0] * r + m[1, 1] * g + m[1, 2] * b) / WHITE_D65[1])
    fz = _f((m[2, 0] * r + m[2, 1] * g + m[2, 2] * b) / WHITE_D65[2])
    lab = np.empty(lin.shape, dtype=np.float64)
    lab[..., 0] = 116.0 * fy - 16.0
    lab[..., 1] = 500.0 * (fx - fy)
    lab[..., 2] = 200.0 * (fy - fz)
    return lab


def srgb_to_lab(pixel: Srgb8 | tuple[int, int, int]) -> LabColor:
    r, g, b = (int(c) for c in pixel)
    for c in (r, g, b):
        if not 0 <= c <= 255:
            raise ValueError(f"channel value {c} outside [0, 255]")
    lab = srgb_to_lab_array(np.array([r, g, b]))
    return LabColor(float(lab[0]), float(lab[1]), float(lab[2]))


def delta_e(c1: tuple[float, float, float], c2: tuple[float, float, float]) -> float:
    """CIE76 color difference: Euclidean distance in Lab."""
    dl = c1[0] - c2[0]
    da = c1[1] - c2[1]
    db = c1[2] - c2[2]
    return float(np.sqrt(dl * dl + da * da + db * db))


def delta_e_array(lab1: np.ndarray, lab2: np.ndarray) -> np.ndarray:
    """Elementwise CIE76 distance between two ``(..., 3)`` Lab arrays.

    Channels are combined in a fixed L, a, b order so that swapping the
    arguments gives bit-identical results.
    """
    dl = lab1[..., 0] - lab2[..., 0]
    da = lab1[..., 1] - lab2[..., 1]
    db = lab1[..., 2] - lab2[..., 2]
    return np.sqrt(dl * dl + da * da + db * db)


def to_srgb8(img: Image.Image) -> np.ndarray:
    """Flatten a PIL image to an opaque ``(H, W, 3)`` uint8 sRGB array.

    Transparency is composited over white; embedded ICC profiles are ignored.
    """
    has_alpha = img.mode in ("RGBA", "LA", "PA", "RGBa", "La") or (
        img.mode == "P" and "transparency" in img.info
    )
    if has_alpha:
        rgba = np.asarray(img.convert("RGBA"), dtype=np.uint32)
        alpha = rgba[..., 3:4]
        rgb = (rgba[..., :3] * alpha + 255 * (255 - alpha) + 127) // 255
        return rgb.astype(np.uint8)
    if img.mode in ("I;16", "I;16B", "I;16L", "I"):
        # 16-bit grayscale: keep the top byte instead of clipping
        arr = np.asarray(img, dtype=np.uint32)
        gray = (arr >> 8).astype(np.uint8) if arr.max() > 255 else arr.astype(np.uint8)
        return np.repeat(gray[..., None], 3, axis=2)
    return np.asarray(img.convert("RGB"), dtype=np.uint8).copy()


def load_srgb(path: str | Path) -> np.ndarray:
    """Decode an image file into an ``(H, W, 3)`` uint8 sRGB array."""
    try:
        with Image.open(path) as img:
            img.load()
            return to_srgb8(img)
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc


def load_lab(path: str | Path) -> np.ndarray:
    return srgb_to_lab_array(load_srgb(path))
