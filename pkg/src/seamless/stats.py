"""Small statistical kernel: OLS, two-sample KS, Pearson, z-scores.

Population (not sample) standard deviations are used throughout.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAbscissae, EmptySample, ZeroSpread, ZeroVariance


@dataclass(frozen=True)
class OlsFit:
    slope: float
    intercept: float
    n: int


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float


def _xy(points: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def ols(points: Sequence[tuple[float, float]]) -> OlsFit:
    x, y = _xy(points)
    if x.size < 2 or np.all(x == x[0]):
        raise DegenerateAbscissae("need at least two distinct x values")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    return OlsFit(slope=slope, intercept=float(ym - slope * xm), n=int(x.size))


def pearson(points: Sequence[tuple[float, float]]) -> float:
    x, y = _xy(points)
    if x.size < 2:
        raise ZeroVariance("need at least two points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(np.dot(dx, dx)), float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("a coordinate has zero variance")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Two-pass mean and population standard deviation."""
    v = np.asarray(values, dtype=np.float64)
    if v.min() == v.max():
        return float(v[0]), 0.0
    m = float(v.mean())
    return m, math.sqrt(float(np.mean(np.square(v - m))))


def zscore(x: float, population: Sequence[float]) -> float:
    if len(population) < 2:
        raise ZeroSpread("population needs at least two values")
    m, sd = mean_std(population)
    if sd == 0.0:
        raise ZeroSpread("population standard deviation is zero")
    return (x - m) / sd


def kolmogorov_sf(lam: float) -> float:
    """Survival function Q(lam) of the asymptotic Kolmogorov distribution.

    Uses the alternating series 2 * sum (-1)^(k-1) exp(-2 k^2 lam^2) for
    lam >= 1, stopping once terms drop below 1e-16.  For small lam that
    series converges poorly, so the equivalent theta-function form
    1 - sqrt(2 pi)/lam * sum exp(-(2k-1)^2 pi^2 / (8 lam^2)) is used instead.
    """
    if lam <= 0.0:
        return 1.0
    if lam < 1.0:
        acc = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8 * lam * lam))
            acc += term
            if term < 1e-16:
                break
            k += 1
        p = 1.0 - math.sqrt(2 * math.pi) / lam * acc
    else:
        acc = 0.0
        k = 1
        while True:
            term = math.exp(-2.0 * k * k * lam * lam)
            acc += term if k % 2 else -term
            if term < 1e-16:
                break
            k += 1
        p = 2.0 * acc
    return min(1.0, max(0.0, p))


def ks_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """Largest gap between the two empirical CDFs over the pooled values."""
    xa = np.sort(np.asarray(a, dtype=np.float64))
    xb = np.sort(np.asarray(b, dtype=np.float64))
    if xa.size == 0 or xb.size == 0:
        raise EmptySample("both samples must be nonempty")
    grid = np.unique(np.concatenate([xa, xb]))
    ca = np.searchsorted(xa, grid, side="right") / xa.size
    cb = np.searchsorted(xb, grid, side="right") / xb.size
    return float(np.max(np.abs(ca - cb)))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> KsResult:
    d = ks_statistic(a, b)
    n_eff = len(a) * len(b) / (len(a) + len(b))
    return KsResult(statistic=d, p_value=kolmogorov_sf(math.sqrt(n_eff) * d))
