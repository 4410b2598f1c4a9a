"""Randomized baselines for the adjacent-distance distribution.

Two null models are provided:

* ``SHUFFLE_PIXELS`` relocates the pixels uniformly at random, keeping the
  exact multiset of colors but destroying the geometry.
* ``UNIFORM_RGB`` replaces every pixel with an independent color drawn
  uniformly from the 256**3 sRGB cube.

Randomness comes from numpy's PCG64 bit generator.  Realization ``i`` of a
run seeded with ``seed`` draws from ``PCG64(SeedSequence([seed, i]))``, so
realizations are independent of evaluation order and can be recomputed on
their own.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .colorspace import srgb_to_lab_array
from .contrast import HIST_LEN, DistanceStats, analyze_image, check_lab_image

DEFAULT_SAMPLES = 100


class NullModelKind(str, enum.Enum):
    SHUFFLE_PIXELS = "shuffle"
    UNIFORM_RGB = "uniform"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def shuffle_pixels(img: np.ndarray, seed: int) -> np.ndarray:
    img = np.asarray(img)
    h, w = img.shape[:2]
    flat = img.reshape(h * w, -1)
    perm = make_rng(seed).permutation(h * w)
    return flat[perm].reshape(img.shape)


def uniform_rgb_srgb(width: int, height: int, seed: int) -> np.ndarray:
    if width * height < 1:
        raise ValueError("image must have at least one pixel")
    return make_rng(seed).integers(0, 256, size=(height, width, 3), dtype=np.uint8)


def uniform_rgb(width: int, height: int, seed: int) -> np.ndarray:
    return srgb_to_lab_array(uniform_rgb_srgb(width, height, seed))


@dataclass(frozen=True)
class NullStats:
    """Moments and histogram averaged over null-model realizations."""

    kind: NullModelKind
    samples: int
    seed: int
    n_pairs: int
    n_degenerate: int
    d_mean: float | None
    d_std: float | None
    s: float | None
    histogram: np.ndarray = field(repr=False)

    @property
    def degenerate(self) -> bool:
        return self.s is None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "samples": self.samples,
            "seed": self.seed,
            "n_pairs": self.n_pairs,
            "n_degenerate": self.n_degenerate,
            "d_mean": self.d_mean,
            "d_std": self.d_std,
            "s": self.s,
            "degenerate": self.degenerate,
        }


def realization(img: np.ndarray, kind: NullModelKind, seed: int, index: int) -> np.ndarray:
    """The ``index``-th randomized version of ``img`` for ``seed``."""
    # a realization's seed is the pair (seed, index)
    sub = int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])
    if kind is NullModelKind.SHUFFLE_PIXELS:
        return shuffle_pixels(img, sub)
    h, w = img.shape[:2]
    return uniform_rgb(w, h, sub)


def null_realizations(
    img: np.ndarray, kind: NullModelKind, samples: int, seed: int
) -> list[DistanceStats]:
    img = check_lab_image(img)
    kind = NullModelKind(kind)
    return [analyze_image(realization(img, kind, seed, i)) for i in range(samples)]


def null_distribution(
    img: np.ndarray,
    kind: NullModelKind,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> NullStats:
    """Average the distance statistics of ``samples`` randomized images.

    Histograms are averaged bin-wise over all realizations; ``d_mean``,
    ``d_std`` and ``s`` are averaged over non-degenerate realizations only.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    kind = NullModelKind(kind)
    runs = null_realizations(img, kind, samples, seed)
    hist = np.zeros(HIST_LEN, dtype=np.float64)
    for r in runs:
        hist += r.histogram
    hist /= samples
    good = [r for r in runs if not r.degenerate]
    if good:
        d_mean = float(np.mean([r.d_mean for r in good]))
        d_std = float(np.mean([r.d_std for r in good]))
        s = float(np.mean([r.s for r in good]))
    else:
        d_mean = d_std = s = None
    return NullStats(
        kind=kind,
        samples=samples,
        seed=seed,
        n_pairs=runs[0].n_pairs,
        n_degenerate=samples - len(good),
        d_mean=d_mean,
        d_std=d_std,
        s=s,
        histogram=hist,
    )
