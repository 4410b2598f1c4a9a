"""Per-artist individuality scores over a processed corpus.

* diversity: population standard deviation of an artist's S values;
* metamorphosality (mu): z-score, within the modern population, of the
  slope of S against career time normalized to [0, 1];
* singularity (nu): fraction of an artist's paintings whose S lies more
  than one standard deviation above their contemporaries (same year +/- 5),
  minus the fraction lying more than one below.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .corpus import PaintingRecord, included
from .errors import DegenerateAbscissae, SingleYearCareer, ZeroSpread, ZeroVariance
from .stats import mean_std, ols, pearson

MODERN_CUTOFF = 1800
MIN_DISTINCT_YEARS = 5
MIN_PAINTINGS_NU = 41  # "more than 40 paintings"
WINDOW_HALF_WIDTH = 5
MIN_WINDOW = 30
Z_THRESHOLD = 1.0


@dataclass
class ArtistProfile:
    artist_id: str
    paintings: list[tuple[int, float, str]]  # (year, s, painting_id), sorted
    slope: float | None = None
    mu: float | None = None
    nu: float | None = None
    frac_high: float | None = None
    frac_low: float | None = None
    n_defined: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def n_paintings(self) -> int:
        return len(self.paintings)

    @property
    def first_year(self) -> int:
        return self.paintings[0][0]

    @property
    def last_year(self) -> int:
        return self.paintings[-1][0]

    @property
    def distinct_years(self) -> int:
        return len({y for y, _, _ in self.paintings})

    @property
    def midpoint(self) -> float:
        return (self.first_year + self.last_year) / 2

    @property
    def diversity(self) -> float | None:
        if self.n_paintings < 2:
            return None
        return mean_std([s for _, s, _ in self.paintings])[1]


def build_profiles(records: Iterable[PaintingRecord]) -> list[ArtistProfile]:
    by_artist: dict[str, list[tuple[int, float, str]]] = defaultdict(list)
    for r in included(records):
        by_artist[r.artist_id].append((r.year, r.s, r.painting_id))
    return [ArtistProfile(a, sorted(p)) for a, p in sorted(by_artist.items())]


def career_normalize(paintings: Sequence[tuple[int, float]]) -> list[tuple[float, float]]:
    years = [y for y, _ in paintings]
    first, last = min(years), max(years)
    if first == last:
        raise SingleYearCareer(f"career confined to {first}")
    span = last - first
    return [((y - first) / span, s) for y, s in paintings]


@dataclass
class MetamorphosalitySummary:
    n_eligible: int
    mean_slope: float | None
    std_slope: float | None
    note: str | None = None


def metamorphosality(
    profiles: Sequence[ArtistProfile],
    modern_cutoff: float = MODERN_CUTOFF,
    min_years: int = MIN_DISTINCT_YEARS,
) -> MetamorphosalitySummary:
    """Fill ``slope`` (>= ``min_years`` distinct years) and ``mu`` (modern only).

    An artist is modern when the career midpoint is at or after
    ``modern_cutoff``.
    """
    eligible: list[ArtistProfile] = []
    for p in profiles:
        p.slope = p.mu = None
        if p.distinct_years < min_years:
            continue
        try:
            p.slope = ols(career_normalize([(y, s) for y, s, _ in p.paintings])).slope
        except (DegenerateAbscissae, SingleYearCareer) as exc:
            p.notes.append(f"slope skipped: {exc}")
            continue
        if p.midpoint >= modern_cutoff:
            eligible.append(p)
    if not eligible:
        return MetamorphosalitySummary(0, None, None, "no eligible artists")
    slopes = [p.slope for p in eligible]
    mean, std = mean_std(slopes)
    if len(eligible) < 2 or std == 0.0:
        note = f"{ZeroSpread.__name__}: slope spread is zero, mu undefined"
        return MetamorphosalitySummary(len(eligible), mean, std, note)
    for p in eligible:
        p.mu = (p.slope - mean) / std
    return MetamorphosalitySummary(len(eligible), mean, std)


@dataclass(frozen=True)
class SingularityVerdict:
    painting_id: str
    artist_id: str
    year: int
    s: float
    window_n: int
    z: float | None

    @property
    def band(self) -> str:
        if self.z is None:
            return "undefined"
        if self.z > Z_THRESHOLD:
            return "high"
        if self.z < -Z_THRESHOLD:
            return "low"
        return "typical"


def _year_moments(values: list[float]) -> tuple[int, float, float]:
    v = np.sort(np.asarray(values, dtype=np.float64))
    m = float(v.mean())
    return v.size, m, float(np.square(v - m).sum())


def _merge(a: tuple[int, float, float], b: tuple[int, float, float]) -> tuple[int, float, float]:
    na, ma, qa = a
    nb, mb, qb = b
    if na == 0:
        return b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, qa + qb + delta * delta * na * nb / n


def singularity_verdicts(
    records: Iterable[PaintingRecord],
    half_width: int = WINDOW_HALF_WIDTH,
    min_window: int = MIN_WINDOW,
) -> list[SingularityVerdict]:
    """z-score of each painting against its contemporaries.

    Contemporaries are all other included paintings, by any artist, dated
    within ``half_width`` years.  The scored painting itself is left out.
    """
    recs = sorted(included(records), key=lambda r: r.painting_id)
    by_year: dict[int, list[float]] = defaultdict(list)
    for r in recs:
        by_year[r.year].append(r.s)
    year_mom = {y: _year_moments(v) for y, v in by_year.items()}
    window_mom: dict[int, tuple[int, float, float]] = {}
    for y in year_mom:
        acc = (0, 0.0, 0.0)
        for yy in range(y - half_width, y + half_width + 1):
            if yy in year_mom:
                acc = _merge(acc, year_mom[yy])
        window_mom[y] = acc

    out = []
    for r in recs:
        n, mean, m2 = window_mom[r.year]
        n_ex = n - 1
        z = None
        if n_ex >= max(min_window, 1):
            mean_ex = (n * mean - r.s) / n_ex
            m2_ex = max(m2 - (r.s - mean) * (r.s - mean_ex), 0.0)
            std_ex = math.sqrt(m2_ex / n_ex)
            if std_ex > 1e-12:
                z = (r.s - mean_ex) / std_ex
        out.append(SingularityVerdict(r.painting_id, r.artist_id, r.year, r.s, n_ex, z))
    return out


def singularity(
    records: Sequence[PaintingRecord],
    profiles: Sequence[ArtistProfile],
    half_width: int = WINDOW_HALF_WIDTH,
    min_window: int = MIN_WINDOW,
    min_paintings: int = MIN_PAINTINGS_NU,
) -> list[SingularityVerdict]:
    """Score every painting and fill ``nu`` for prolific artists.

    ``nu`` is computed over an artist's z-defined paintings only and only
    for artists with at least ``min_paintings`` paintings.
    """
    verdicts = singularity_verdicts(records, half_width, min_window)
    by_artist: dict[str, list[SingularityVerdict]] = defaultdict(list)
    for v in verdicts:
        by_artist[v.artist_id].append(v)
    for p in profiles:
        p.nu = p.frac_high = p.frac_low = None
        defined = [v for v in by_artist.get(p.artist_id, []) if v.z is not None]
        p.n_defined = len(defined)
        if p.n_paintings < min_paintings or not defined:
            continue
        high = sum(v.band == "high" for v in defined)
        low = sum(v.band == "low" for v in defined)
        p.frac_high = high / len(defined)
        p.frac_low = low / len(defined)
        p.nu = p.frac_high - p.frac_low
    return verdicts


@dataclass
class DiversityReport:
    rows: list[tuple[str, int, float | None]]
    correlation: float | None
    note: str | None = None


def diversity_report(profiles: Sequence[ArtistProfile]) -> DiversityReport:
    """Per-artist diversity and its Pearson correlation with painting count."""
    rows = [(p.artist_id, p.n_paintings, p.diversity) for p in profiles]
    pts = [(n, d) for _, n, d in rows if d is not None]
    try:
        r = pearson(pts)
        note = None
    except ZeroVariance as exc:
        r, note = None, f"{ZeroVariance.__name__}: {exc}"
    return DiversityReport(rows, r, note)
