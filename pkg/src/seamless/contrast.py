"""Adjacent-pixel color distances and the seamlessness statistic.

For an image with pixels on a grid, every horizontal neighbour pair
``(x, y)-(x+1, y)`` and every vertical pair ``(x, y)-(x, y+1)`` contributes
one CIE76 distance ``d``.  Seamlessness is

    S = (std(d) - mean(d)) / (std(d) + mean(d))

with the population standard deviation.  ``S`` is undefined when every
distance is zero (a solid image); that case is reported as degenerate.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .colorspace import delta_e_array
from .errors import EmptyImage, EmptyStream

ADJACENCY_VERSION = "4-neighbour-right-down/1"

HIST_BIN_WIDTH = 1.0
HIST_BINS = 400  # regular bins covering [0, 400)
HIST_LEN = HIST_BINS + 1  # plus one overflow bin

_CHUNK = 1 << 16


class StreamingMoments:
    """Running count, mean and sum of squared deviations.

    Batches are reduced with a two-pass sweep and merged into the running
    totals with the pairwise update of Chan, Golub and LeVeque, which stays
    accurate over millions of samples.
    """

    def __init__(self) -> None:
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def push(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def update(self, batch: np.ndarray) -> None:
        batch = np.asarray(batch, dtype=np.float64).ravel()
        nb = batch.size
        if nb == 0:
            return
        lo, hi = float(batch.min()), float(batch.max())
        if lo == hi:
            # a constant batch has exactly zero spread; rounding in the sum must not invent any
            mb, m2b = lo, 0.0
        else:
            mb = min(max(float(batch.mean()), lo), hi)
            m2b = float(np.square(batch - mb).sum())
        if self.n == 0:
            self.n, self.mean, self.m2 = nb, mb, m2b
            return
        n = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self.m2 += m2b + delta * delta * self.n * nb / n
        self.n = n

    @property
    def variance(self) -> float:
        return self.m2 / self.n if self.n else math.nan

    @property
    def std(self) -> float:
        return math.sqrt(max(self.variance, 0.0))


@dataclass(frozen=True, eq=False)
class DistanceStats:
    n_pairs: int
    d_mean: float
    d_std: float
    histogram: np.ndarray = field(repr=False)
    s: float | None

    @property
    def degenerate(self) -> bool:
        return self.s is None

    def to_dict(self) -> dict:
        """Summary fields in a fixed order (histogram excluded)."""
        return {
            "n_pairs": self.n_pairs,
            "d_mean": self.d_mean,
            "d_std": self.d_std,
            "s": self.s,
            "degenerate": self.degenerate,
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DistanceStats):
            return NotImplemented
        return (
            self.n_pairs == other.n_pairs
            and self.d_mean == other.d_mean
            and self.d_std == other.d_std
            and self.s == other.s
            and np.array_equal(self.histogram, other.histogram)
        )


def seamlessness_value(d_mean: float, d_std: float) -> float | None:
    total = d_std + d_mean
    if total <= 0.0:
        return None
    s = (d_std - d_mean) / total
    return min(1.0, max(-1.0, s))


def histogram_of(distances: np.ndarray) -> np.ndarray:
    bins = np.floor(np.asarray(distances) / HIST_BIN_WIDTH)
    bins = np.clip(bins, 0, HIST_BINS).astype(np.intp)
    return np.bincount(bins, minlength=HIST_LEN).astype(np.int64)


def _chunks(stream: Iterable | np.ndarray) -> Iterable[np.ndarray]:
    if isinstance(stream, np.ndarray):
        flat = stream.ravel()
        for start in range(0, flat.size, _CHUNK):
            yield flat[start : start + _CHUNK]
        return
    pending: list[float] = []
    for item in stream:
        if np.ndim(item) == 0:
            pending.append(float(item))
            if len(pending) >= _CHUNK:
                yield np.asarray(pending)
                pending = []
        else:
            if pending:
                yield np.asarray(pending)
                pending = []
            yield np.asarray(item, dtype=np.float64).ravel()
    if pending:
        yield np.asarray(pending)


def seamlessness(stream: Iterable | np.ndarray) -> DistanceStats:
    """Summarize a stream of distances in one pass.

    ``stream`` may be an array, an iterable of scalars, or an iterable of
    array chunks.
    """
    moments = StreamingMoments()
    hist = np.zeros(HIST_LEN, dtype=np.int64)
    for chunk in _chunks(stream):
        if chunk.size == 0:
            continue
        moments.update(chunk)
        hist += histogram_of(chunk)
    if moments.n == 0:
        raise EmptyStream("no distances to summarize")
    d_mean, d_std = moments.mean, moments.std
    return DistanceStats(
        n_pairs=moments.n,
        d_mean=d_mean,
        d_std=d_std,
        histogram=hist,
        s=seamlessness_value(d_mean, d_std),
    )


def check_lab_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) Lab array, got shape {img.shape}")
    h, w = img.shape[:2]
    if h * w < 2:
        raise EmptyImage(f"{w}x{h} image has no adjacent pixel pair")
    return img


def expected_pair_count(width: int, height: int) -> int:
    return 2 * width * height - width - height


def adjacent_distances(img: np.ndarray) -> np.ndarray:
    """All 4-neighbour distances: horizontal pairs row-major, then vertical."""
    img = check_lab_image(img)
    horiz = delta_e_array(img[:, :-1], img[:, 1:])
    vert = delta_e_array(img[:-1, :], img[1:, :])
    return np.concatenate([horiz.ravel(), vert.ravel()])


def analyze_image(img: np.ndarray) -> DistanceStats:
    """Distance statistics and seamlessness of one Lab image.

    Distances are accumulated in sorted order, so the result depends only on
    the multiset of adjacent distances and is bit-identical under rotations
    and flips of the image.
    """
    d = adjacent_distances(img)
    d.sort()
    return seamlessness(d)


def histogram_rows(hist: np.ndarray) -> list[tuple[float, float]]:
    """``(bin_lower_edge, count)`` rows; the last row is the overflow bin."""
    return [(i * HIST_BIN_WIDTH, hist[i]) for i in range(len(hist))]
