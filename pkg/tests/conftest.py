import sys
from pathlib import Path

import numpy as np
import pytest

TESTS = Path(__file__).resolve().parent
DATA = TESTS / "data"
sys.path.insert(0, str(TESTS))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def stats_with_s(s):
    """DistanceStats carrying a chosen S (moments are placeholders)."""
    from seamless.contrast import HIST_LEN, DistanceStats

    return DistanceStats(n_pairs=1, d_mean=1.0, d_std=1.0, histogram=np.zeros(HIST_LEN, np.int64), s=s)


def record(pid, artist, year, s, **kw):
    from seamless.corpus import PaintingRecord

    rec = PaintingRecord(painting_id=pid, artist_id=artist, year=year, file_path=f"{pid}.png", **kw)
    rec.stats = stats_with_s(s)
    return rec


@pytest.fixture(scope="session")
def trend_corpus(tmp_path_factory):
    """About 100 generated paintings whose S drifts by 0.001 per year from 1300."""
    from seamless.synth import CorpusSpec, generate_synthetic_corpus

    spec = CorpusSpec(
        n_artists=8,
        paintings_per_artist=(10, 16),
        total_paintings=100,
        year_range=(1300, 1700),
        career_length=(100, 300),
        s_base_range=(0.0, 0.0),
        s_slope_sd=0.0,
        s_trend=0.001,
        s_noise=0.05,
    )
    out = tmp_path_factory.mktemp("trend")
    return generate_synthetic_corpus(spec, 17, out)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "VERDICTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.VERDICTS):
        terminalreporter.write_line(line)
