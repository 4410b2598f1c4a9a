"""Color-temperature and image-size robustness harnesses.

Lighting is simulated by scaling each sRGB channel by the black-body color
of the chosen temperature (normalized by 255).  Size changes use a
separable cubic convolution resampler (Keys kernel, a = -0.5) whose
support widens with the downscale factor, the way common image libraries
antialias when shrinking.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
from scipy import sparse

from .colorspace import Srgb8, load_srgb, srgb_to_lab_array
from .contrast import DistanceStats, analyze_image
from .errors import InvalidTarget, OutOfRange

KELVIN_MIN = 1000
KELVIN_MAX = 10000
KELVIN_STEP = 100

# Black-body sRGB colors, 10 degree observer, D65 white, max channel = 255;
# out-of-gamut chromaticities desaturated toward white before normalizing.
_BLACKBODY_ROWS = (
    (1000, 255, 56, 0), (1100, 255, 71, 0), (1200, 255, 83, 0), (1300, 255, 93, 0),
    (1400, 255, 101, 0), (1500, 255, 109, 0), (1600, 255, 115, 0), (1700, 255, 121, 0),
    (1800, 255, 126, 0), (1900, 255, 131, 0), (2000, 255, 137, 18), (2100, 255, 142, 33),
    (2200, 255, 147, 45), (2300, 255, 152, 54), (2400, 255, 157, 63), (2500, 255, 161, 72),
    (2600, 255, 165, 79), (2700, 255, 169, 87), (2800, 255, 173, 94), (2900, 255, 177, 101),
    (3000, 255, 180, 107), (3100, 255, 184, 114), (3200, 255, 187, 120), (3300, 255, 190, 126),
    (3400, 255, 193, 132), (3500, 255, 196, 137), (3600, 255, 199, 143), (3700, 255, 201, 148),
    (3800, 255, 204, 153), (3900, 255, 206, 159), (4000, 255, 209, 163), (4100, 255, 211, 168),
    (4200, 255, 213, 173), (4300, 255, 215, 177), (4400, 255, 217, 182), (4500, 255, 219, 186),
    (4600, 255, 221, 190), (4700, 255, 223, 194), (4800, 255, 225, 198), (4900, 255, 227, 202),
    (5000, 255, 228, 206), (5100, 255, 230, 210), (5200, 255, 232, 213), (5300, 255, 233, 217),
    (5400, 255, 235, 220), (5500, 255, 236, 224), (5600, 255, 238, 227), (5700, 255, 239, 230),
    (5800, 255, 240, 233), (5900, 255, 242, 236), (6000, 255, 243, 239), (6100, 255, 244, 242),
    (6200, 255, 245, 245), (6300, 255, 246, 248), (6400, 255, 248, 251), (6500, 255, 249, 253),
    (6600, 254, 249, 255), (6700, 252, 247, 255), (6800, 249, 246, 255), (6900, 247, 245, 255),
    (7000, 245, 243, 255), (7100, 243, 242, 255), (7200, 240, 241, 255), (7300, 239, 240, 255),
    (7400, 237, 239, 255), (7500, 235, 238, 255), (7600, 233, 237, 255), (7700, 231, 236, 255),
    (7800, 230, 235, 255), (7900, 228, 234, 255), (8000, 227, 233, 255), (8100, 225, 232, 255),
    (8200, 224, 231, 255), (8300, 222, 230, 255), (8400, 221, 229, 255), (8500, 220, 229, 255),
    (8600, 218, 228, 255), (8700, 217, 227, 255), (8800, 216, 226, 255), (8900, 215, 226, 255),
    (9000, 214, 225, 255), (9100, 212, 224, 255), (9200, 211, 224, 255), (9300, 210, 223, 255),
    (9400, 209, 223, 255), (9500, 208, 222, 255), (9600, 207, 221, 255), (9700, 207, 221, 255),
    (9800, 206, 220, 255), (9900, 205, 220, 255), (10000, 204, 219, 255),)
BLACKBODY_TABLE = np.array([row[1:] for row in _BLACKBODY_ROWS], dtype=np.int64)

DEFAULT_KELVINS = tuple(range(1500, 10001, 850))
DEFAULT_WIDTHS = tuple(range(100, 1501, 100))

CUBIC_A = -0.5


def blackbody_rgb(kelvin: float) -> Srgb8:
    """Black-body color at ``kelvin``, linearly interpolated at 100 K spacing."""
    if not KELVIN_MIN <= kelvin <= KELVIN_MAX:
        raise OutOfRange(f"{kelvin} K outside [{KELVIN_MIN}, {KELVIN_MAX}] K")
    pos = (kelvin - KELVIN_MIN) / KELVIN_STEP
    lo = min(int(math.floor(pos)), len(BLACKBODY_TABLE) - 1)
    frac = pos - lo
    if frac == 0.0:
        return Srgb8(*(int(v) for v in BLACKBODY_TABLE[lo]))
    row = BLACKBODY_TABLE[lo] + frac * (BLACKBODY_TABLE[lo + 1] - BLACKBODY_TABLE[lo])
    return Srgb8(*(int(math.floor(v + 0.5)) for v in row))


def temperature_factors(kelvin: float) -> tuple[float, float, float]:
    r, g, b = blackbody_rgb(kelvin)
    return r / 255, g / 255, b / 255


def apply_temperature(img_srgb: np.ndarray, kelvin: float) -> np.ndarray:
    """Scale each channel by the black-body color at ``kelvin`` over 255.

    Integer arithmetic with round-half-up, so e.g. white at 1500 K maps to
    the table row exactly.
    """
    rgb = np.asarray(blackbody_rgb(kelvin), dtype=np.int64)
    img = np.asarray(img_srgb, dtype=np.int64)
    out = (2 * img * rgb + 255) // 510
    return np.clip(out, 0, 255).astype(np.uint8)


def cubic_kernel(x: np.ndarray, a: float = CUBIC_A) -> np.ndarray:
    x = np.abs(np.asarray(x, dtype=np.float64))
    x2, x3 = x * x, x * x * x
    near = (a + 2) * x3 - (a + 3) * x2 + 1
    far = a * x3 - 5 * a * x2 + 8 * a * x - 4 * a
    return np.where(x < 1, near, np.where(x < 2, far, 0.0))


def resample_weights(in_size: int, out_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Tap indices and normalized weights, each of shape ``(out_size, taps)``.

    Pixel ``i`` covers ``[i, i+1)``; taps falling outside the input are
    dropped and the remaining weights renormalized.
    """
    scale = in_size / out_size
    fscale = max(scale, 1.0)
    support = 2.0 * fscale
    taps = int(math.ceil(support)) * 2 + 1
    centers = (np.arange(out_size) + 0.5) * scale
    first = np.floor(centers - support + 0.5).astype(np.int64)
    idx = first[:, None] + np.arange(taps)[None, :]
    w = cubic_kernel((idx + 0.5 - centers[:, None]) / fscale)
    w[(idx < 0) | (idx >= in_size)] = 0.0
    w /= w.sum(axis=1, keepdims=True)
    return np.clip(idx, 0, in_size - 1), w


def _resample_axis(img: np.ndarray, out_size: int, axis: int) -> np.ndarray:
    in_size = img.shape[axis]
    if in_size == out_size:
        return img
    idx, w = resample_weights(in_size, out_size)
    rows = np.repeat(np.arange(out_size), idx.shape[1])
    # duplicate (row, col) entries from clipped taps carry zero weight and are summed away
    matrix = sparse.csr_matrix((w.ravel(), (rows, idx.ravel())), shape=(out_size, in_size))
    moved = np.moveaxis(img, axis, 0)
    flat = np.ascontiguousarray(moved).reshape(in_size, -1)
    out = (matrix @ flat).reshape((out_size,) + moved.shape[1:])
    return np.moveaxis(out, 0, axis)


def target_shape(height: int, width: int, target_width: int) -> tuple[int, int]:
    """New ``(height, width)`` with the longer side set to ``target_width``."""
    if width >= height:
        return max(1, int(math.floor(height * target_width / width + 0.5))), target_width
    return target_width, max(1, int(math.floor(width * target_width / height + 0.5)))


def resize_bicubic(img_srgb: np.ndarray, target_width: int) -> np.ndarray:
    """Resize so the longer side equals ``target_width``, keeping aspect."""
    if target_width < 2:
        raise InvalidTarget(f"target width must be >= 2, got {target_width}")
    img = np.asarray(img_srgb)
    h, w = img.shape[:2]
    new_h, new_w = target_shape(h, w, target_width)
    if (new_h, new_w) == (h, w):
        return img.astype(np.uint8, copy=True)
    out = _resample_axis(img.astype(np.float64), new_w, axis=1)
    out = _resample_axis(out, new_h, axis=0)
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def _source(img: str | Path | np.ndarray) -> np.ndarray:
    if isinstance(img, (str, Path)):
        return load_srgb(img)
    return np.asarray(img, dtype=np.uint8)


def temperature_sweep(
    img: str | Path | np.ndarray, kelvins: Iterable[float] = DEFAULT_KELVINS
) -> list[tuple[float, DistanceStats]]:
    kelvins = list(kelvins)
    if not kelvins:
        raise ValueError("empty temperature list")
    for k in kelvins:
        blackbody_rgb(k)
    srgb = _source(img)
    return [(k, analyze_image(srgb_to_lab_array(apply_temperature(srgb, k)))) for k in kelvins]


def size_sweep(
    img: str | Path | np.ndarray, widths: Sequence[int] = DEFAULT_WIDTHS
) -> list[tuple[int, DistanceStats]]:
    widths = list(widths)
    if not widths:
        raise ValueError("empty width list")
    for w in widths:
        if w < 2:
            raise InvalidTarget(f"target width must be >= 2, got {w}")
    srgb = _source(img)
    return [(w, analyze_image(srgb_to_lab_array(resize_bicubic(srgb, w)))) for w in widths]
