"""Synthetic paintings and corpora with controlled seamlessness.

Two image families are tuned by bisection on a noise amplitude:

* mosaic + noise: flat rectangular patches (high S) blended with i.i.d.
  Gaussian pixel noise; S falls from roughly 0.5-0.8 toward -0.3 as the
  noise grows;
* checkerboard + noise: a two-color checkerboard (S = -1) blended with the
  same noise; S rises toward -0.3.

A target of exactly -1 yields a plain checkerboard.  The module also
renders the large, smoothly structured scenes used for size-robustness
checks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .colorspace import srgb_to_lab_array
from .contrast import analyze_image
from .corpus import MANIFEST_COLUMNS
from .errors import TargetUnreachable
from .nullmodels import make_rng

NOISE_MAX = 800.0
TARGET_TOL = 0.05
_SEARCH_TOL = 0.01


def checkerboard(width: int, height: int, cell: int = 1,
                 c1=(255, 255, 255), c2=(0, 0, 0)) -> np.ndarray:
    yy, xx = np.indices((height, width))
    mask = ((yy // cell + xx // cell) % 2).astype(bool)
    return np.where(mask[..., None], np.array(c2, np.uint8), np.array(c1, np.uint8)).astype(np.uint8)


def solid(width: int, height: int, color=(128, 128, 128)) -> np.ndarray:
    return np.broadcast_to(np.array(color, np.uint8), (height, width, 3)).copy()


def measure_s(img_srgb: np.ndarray) -> float | None:
    return analyze_image(srgb_to_lab_array(img_srgb)).s


def _quantize(x: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(x + 0.5), 0, 255).astype(np.uint8)


def _mosaic_base(rng: np.random.Generator, width: int, height: int, patch: int) -> np.ndarray:
    ny, nx = -(-height // patch), -(-width // patch)
    cols = rng.uniform(30, 225, (ny, nx, 3))
    return np.kron(cols, np.ones((patch, patch, 1)))[:height, :width]


def _checker_base(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    c1, c2 = rng.uniform(30, 225, 3), rng.uniform(30, 225, 3)
    while np.abs(c1 - c2).max() < 20:
        c2 = rng.uniform(30, 225, 3)
    mask = (np.indices((height, width)).sum(0) % 2).astype(bool)
    return np.where(mask[..., None], c2, c1)


def _tune(base: np.ndarray, noise: np.ndarray, target: float) -> tuple[np.ndarray, float] | None:
    """Bisect the noise amplitude until S is within tolerance of ``target``."""
    lo, hi = 0.0, NOISE_MAX
    s_lo = measure_s(_quantize(base))
    s_hi = measure_s(_quantize(base + hi * noise))
    if s_lo is None or s_hi is None:
        return None
    if not min(s_lo, s_hi) <= target <= max(s_lo, s_hi):
        # out of this family's range; the nearer end may still be close enough
        a = 0.0 if abs(s_lo - target) <= abs(s_hi - target) else hi
        return _quantize(base + a * noise), (s_lo if a == 0.0 else s_hi)
    rising = s_hi > s_lo
    best: tuple[np.ndarray, float] | None = None
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        img = _quantize(base + mid * noise)
        s = measure_s(img)
        if s is None:
            return None
        if best is None or abs(s - target) < abs(best[1] - target):
            best = (img, s)
        if abs(s - target) <= _SEARCH_TOL:
            break
        if (s < target) == rising:
            lo = mid
        else:
            hi = mid
    return best


def image_for_target(
    target: float,
    rng: np.random.Generator,
    width: int = 48,
    height: int = 48,
    patch: int = 16,
) -> tuple[np.ndarray, str, float]:
    """Render an image whose measured S lies within 0.05 of ``target``.

    Returns ``(image, style, measured_s)``.
    """
    if target == -1.0:
        img = checkerboard(width, height, 1, (200, 60, 40), (40, 90, 200))
        return img, "checker", -1.0
    if not -1.0 <= target <= 1.0:
        raise TargetUnreachable(f"target {target} outside [-1, 1]")
    noise = rng.standard_normal((height, width, 3))
    families = [("mosaic", lambda p=patch: _mosaic_base(rng, width, height, p))]
    families.append(("checker", lambda: _checker_base(rng, width, height)))
    for p in (32, 64):
        if p > patch and p <= max(width, height) // 2:
            families.append(("mosaic", lambda p=p: _mosaic_base(rng, width, height, p)))
    best = None
    for style, make in families:
        found = _tune(make(), noise, target)
        if found is not None and abs(found[1] - target) <= TARGET_TOL:
            return found[0], style, found[1]
        if found is not None and (best is None or abs(found[1] - target) < abs(best[2] - target)):
            best = (found[0], style, found[1])
    raise TargetUnreachable(
        f"target S={target:.3f} not reachable at {width}x{height}"
        + ("" if best is None else f" (closest {best[2]:.3f})")
    )


@dataclass
class CorpusSpec:
    """Parameters of a synthetic corpus.

    Per painting the target S is ``s_base + s_slope * t + s_trend * (year -
    year_range[0]) + noise``, where ``t`` is normalized career time,
    ``s_base`` is drawn per artist from ``s_base_range`` and ``s_slope``
    from a normal distribution; targets are clipped to ``s_clip``.
    """

    n_artists: int = 10
    paintings_per_artist: tuple[int, int] = (5, 20)
    total_paintings: int | None = None
    year_range: tuple[int, int] = (1850, 1950)
    career_length: tuple[int, int] = (10, 40)
    s_base_range: tuple[float, float] = (-0.2, 0.4)
    s_slope_mean: float = 0.0
    s_slope_sd: float = 0.2
    s_trend: float = 0.0
    s_noise: float = 0.05
    s_clip: tuple[float, float] = (-0.9, 0.7)
    width: int = 48
    height: int = 48
    patch_sizes: tuple[int, ...] = (8, 16)
    techniques: tuple[str, ...] = ("oil", "tempera", "fresco")
    genres: tuple[str, ...] = ("portrait", "landscape", "still life", "genre painting")
    dataset: str = "synthetic"

    @classmethod
    def from_dict(cls, data: dict) -> CorpusSpec:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown corpus spec fields: {sorted(unknown)}")
        cooked = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        return cls(**cooked)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GeneratedPainting:
    painting_id: str
    artist_id: str
    year: int
    technique: str
    genre: str
    file_path: str
    target_s: float
    measured_s: float
    style: str


@dataclass
class GeneratedCorpus:
    manifest: Path
    targets: Path
    paintings: list[GeneratedPainting] = field(default_factory=list)


def _painting_counts(spec: CorpusSpec, rng: np.random.Generator) -> list[int]:
    lo, hi = spec.paintings_per_artist
    counts = rng.integers(lo, hi + 1, size=spec.n_artists)
    if spec.total_paintings is None:
        return [int(c) for c in counts]
    # rescale to the requested total with largest-remainder rounding
    raw = counts / counts.sum() * spec.total_paintings
    out = np.floor(raw).astype(int)
    order = np.argsort(-(raw - out), kind="stable")
    out[order[: spec.total_paintings - out.sum()]] += 1
    return [int(c) for c in out]


def generate_synthetic_corpus(spec: CorpusSpec, seed: int, out_dir: str | Path) -> GeneratedCorpus:
    """Write PNG images, ``manifest.csv`` and ``targets.csv`` under ``out_dir``."""
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    rng = make_rng(seed, 0)
    counts = _painting_counts(spec, rng)
    y0, y1 = spec.year_range
    corpus = GeneratedCorpus(out / "manifest.csv", out / "targets.csv")
    for a, count in enumerate(counts):
        artist = f"artist{a:03d}"
        arng = make_rng(seed, 1, a)
        length = int(arng.integers(spec.career_length[0], spec.career_length[1] + 1))
        length = min(length, y1 - y0)
        start = int(arng.integers(y0, y1 - length + 1))
        base = float(arng.uniform(*spec.s_base_range))
        slope = float(arng.normal(spec.s_slope_mean, spec.s_slope_sd))
        patch = int(arng.choice(spec.patch_sizes))
        years = sorted(int(y) for y in arng.integers(start, start + length + 1, size=count))
        if count >= 2 and length > 0:
            years[0], years[-1] = start, start + length
        for i, year in enumerate(years):
            prng = make_rng(seed, 2, a, i)
            t = (year - start) / length if length else 0.0
            target = base + slope * t + spec.s_trend * (year - y0) + prng.normal(0, spec.s_noise)
            target = float(np.clip(target, *spec.s_clip))
            img, style, measured = image_for_target(target, prng, spec.width, spec.height, patch)
            pid = f"{artist}-p{i:03d}"
            rel = f"images/{pid}.png"
            Image.fromarray(img).save(out / rel, optimize=False)
            corpus.paintings.append(
                GeneratedPainting(
                    painting_id=pid,
                    artist_id=artist,
                    year=year,
                    technique=str(prng.choice(spec.techniques)),
                    genre=str(prng.choice(spec.genres)),
                    file_path=rel,
                    target_s=target,
                    measured_s=measured,
                    style=style,
                )
            )
    with open(corpus.manifest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_COLUMNS)
        for p in corpus.paintings:
            w.writerow([p.painting_id, p.artist_id, p.artist_id, p.painting_id, p.year,
                        p.technique, p.genre, spec.dataset, p.file_path])
    with open(corpus.targets, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("painting_id", "target_s", "measured_s", "style"))
        for p in corpus.paintings:
            w.writerow([p.painting_id, repr(p.target_s), repr(p.measured_s), p.style])
    return corpus


# ------------------------------------------------------------ size fixtures

FIXTURE_WIDTH = 2000
FIXTURE_HEIGHT = 1500


def _blur3(img: np.ndarray, r: int) -> np.ndarray:
    """Three passes of a separable box filter, a cheap Gaussian."""
    for axis in (0, 1):
        for _ in range(3):
            pad = [(0, 0)] * img.ndim
            pad[axis] = (r + 1, r)
            c = np.cumsum(np.pad(img, pad, mode="edge"), axis=axis)
            hi = [slice(None)] * img.ndim
            lo = [slice(None)] * img.ndim
            hi[axis] = slice(2 * r + 1, None)
            lo[axis] = slice(0, -(2 * r + 1))
            img = (c[tuple(hi)] - c[tuple(lo)]) / (2 * r + 1)
    return img


def soft_mosaic(rng: np.random.Generator, width: int = FIXTURE_WIDTH,
                height: int = FIXTURE_HEIGHT, n: int = 10) -> np.ndarray:
    """Rectangular color fields with softened borders and gentle shading."""
    xs = np.sort(rng.uniform(0, width, n))
    ys = np.sort(rng.uniform(0, height, n))
    xb = np.searchsorted(xs, np.arange(width) + 0.5)
    yb = np.searchsorted(ys, np.arange(height) + 0.5)
    cols = rng.uniform(0, 255, (n + 1, n + 1, 3))
    img = _blur3(cols[yb[:, None], xb[None, :]], max(1, round(0.004 * width / 1.7)))
    yy, xx = np.mgrid[0:height, 0:width] / width
    img += 15 * np.sin(2 * np.pi * (1.3 * xx + 0.7 * yy) + rng.uniform(0, 2 * np.pi))[..., None]
    return _quantize(img)


def brush_strokes(rng: np.random.Generator, width: int = FIXTURE_WIDTH,
                  height: int = FIXTURE_HEIGHT, n: int = 600) -> np.ndarray:
    """Overlapping elongated strokes of random color on a flat ground."""
    img = np.empty((height, width, 3))
    img[:] = rng.uniform(60, 200, 3)
    for _ in range(n):
        cx, cy = rng.uniform(0, width), rng.uniform(0, height)
        th = rng.uniform(0, math.pi)
        length = rng.uniform(0.01, 0.05) * width
        thick = rng.uniform(0.003, 0.008) * width
        color = rng.uniform(0, 255, 3)
        reach = int(1.7 * length) + 1
        x0, x1 = max(0, int(cx) - reach), min(width, int(cx) + reach)
        y0, y1 = max(0, int(cy) - reach), min(height, int(cy) + reach)
        if x1 <= x0 or y1 <= y0:
            continue
        yy, xx = np.mgrid[y0:y1, x0:x1]
        u = (xx - cx) * math.cos(th) + (yy - cy) * math.sin(th)
        v = -(xx - cx) * math.sin(th) + (yy - cy) * math.cos(th)
        a = (0.85 * np.exp(-((u / length) ** 4) - (v / thick) ** 4))[..., None]
        img[y0:y1, x0:x1] = img[y0:y1, x0:x1] * (1 - a) + a * color
    return _quantize(img)


def smooth_field(rng: np.random.Generator, width: int = FIXTURE_WIDTH,
                 height: int = FIXTURE_HEIGHT, k: int = 24) -> np.ndarray:
    """Sum of random plane waves with a 1/sqrt(f) amplitude falloff."""
    yy, xx = np.mgrid[0:height, 0:width] / width
    img = np.full((height, width, 3), 128.0)
    for _ in range(k):
        f = rng.uniform(1, 25)
        th = rng.uniform(0, 2 * math.pi)
        phase = rng.uniform(0, 2 * math.pi)
        amp = rng.normal(0, 40, 3) / math.sqrt(f)
        img += amp * np.sin(2 * math.pi * f * (xx * math.cos(th) + yy * math.sin(th)) + phase)[..., None]
    return _quantize(img)


FIXTURE_SCENES = {
    "soft_mosaic": soft_mosaic,
    "brush_strokes": brush_strokes,
    "smooth_field": smooth_field,
}


def fixture_suite(seed: int = 0) -> dict[str, np.ndarray]:
    """The size-robustness scenes, rendered at 2000x1500."""
    return {name: make(make_rng(seed, 3, i)) for i, (name, make) in enumerate(FIXTURE_SCENES.items())}
