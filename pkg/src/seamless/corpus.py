"""Corpus ingestion, cached batch analysis, and time-series aggregation.

A corpus is described by a manifest (CSV with a header, or JSONL) with the
columns ``painting_id, artist_id, artist_name, title, year, technique,
genre, dataset, file_path``.  ``year`` must be a single integer; ranges or
"c. 1595" style dates have to be resolved before ingestion.  ``file_path``
is relative to the images root.

Per-image statistics are cached in an append-only JSONL store keyed by the
SHA-256 of the image bytes plus a parameter version string, so reruns only
decode new or changed files.
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import itertools
import json
import logging
import math
import os
import threading
from collections import defaultdict
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .colorspace import COLORSPACE_VERSION, load_lab
from .contrast import ADJACENCY_VERSION, HIST_LEN, DistanceStats, analyze_image
from .errors import DecodeError, DuplicateId, SchemaError, SeamlessError, StoreCorruption
from .stats import KsResult, ks_two_sample, mean_std

log = logging.getLogger(__name__)

PARAMS_VERSION = f"{COLORSPACE_VERSION};{ADJACENCY_VERSION};hist1x{HIST_LEN}"

MANIFEST_COLUMNS = (
    "painting_id",
    "artist_id",
    "artist_name",
    "title",
    "year",
    "technique",
    "genre",
    "dataset",
    "file_path",
)
REQUIRED_COLUMNS = ("painting_id", "artist_id", "year", "file_path")

MIN_YEAR = 1300
DEFAULT_BUCKET = 10
DEFAULT_MIN_GROUP = 20


@dataclass
class PaintingRecord:
    painting_id: str
    artist_id: str
    year: int | None
    file_path: str
    artist_name: str = ""
    title: str = ""
    technique: str | None = None
    genre: str | None = None
    dataset: str = ""
    row: int = 0
    issues: list[str] = field(default_factory=list)
    stats: DistanceStats | None = None
    content_hash: str | None = None
    failure: str | None = None

    @property
    def s(self) -> float | None:
        return None if self.stats is None else self.stats.s

    @property
    def year_ok(self) -> bool:
        return self.year is not None and MIN_YEAR <= self.year <= datetime.date.today().year

    @property
    def included(self) -> bool:
        """True when the record may enter an aggregate."""
        return self.year_ok and self.s is not None and self.failure is None

    @property
    def status(self) -> str:
        if self.failure is not None:
            return "failed"
        if self.stats is None:
            return "pending"
        return "degenerate" if self.stats.degenerate else "ok"


def _parse_year(raw: object) -> int | None:
    if isinstance(raw, int) and not isinstance(raw, bool):
        return raw
    text = str(raw if raw is not None else "").strip()
    try:
        return int(text)
    except ValueError:
        return None


def _record_from_row(row: dict, line: int, root: Path) -> PaintingRecord:
    for col in REQUIRED_COLUMNS:
        value = row.get(col)
        if value is None or (col != "year" and str(value).strip() == ""):
            raise SchemaError(f"missing required field {col!r}", row=line)

    def opt(col: str) -> str | None:
        v = row.get(col)
        v = "" if v is None else str(v).strip()
        return v or None

    rec = PaintingRecord(
        painting_id=str(row["painting_id"]).strip(),
        artist_id=str(row["artist_id"]).strip(),
        year=_parse_year(row["year"]),
        file_path=str(row["file_path"]).strip(),
        artist_name=opt("artist_name") or "",
        title=opt("title") or "",
        technique=opt("technique"),
        genre=opt("genre"),
        dataset=opt("dataset") or "",
        row=line,
    )
    if rec.year is None:
        rec.issues.append(f"unparseable year {row['year']!r}")
    elif rec.year < MIN_YEAR:
        rec.issues.append(f"year {rec.year} before {MIN_YEAR}: excluded from aggregates")
    elif rec.year > datetime.date.today().year:
        rec.issues.append(f"year {rec.year} in the future: excluded from aggregates")
    if not (root / rec.file_path).is_file():
        rec.issues.append(f"missing file {rec.file_path}")
    return rec


def _iter_rows(path: Path) -> Iterable[tuple[int, dict]]:
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"invalid JSON: {exc.msg}", row=line_no) from exc
                if not isinstance(obj, dict):
                    raise SchemaError("expected a JSON object", row=line_no)
                yield line_no, obj
        return
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if header and missing:
            raise SchemaError(f"header lacks required columns {missing}", row=1)
        for row in reader:
            if None in row:
                raise SchemaError("more fields than header columns", row=reader.line_num)
            yield reader.line_num, row


def load_manifest(path: str | Path, images_root: str | Path | None = None) -> list[PaintingRecord]:
    """Parse and validate a manifest.

    Structural problems raise ``SchemaError`` carrying the line number.
    Unparseable years, pre-1300 dates and missing image files do not raise;
    they are listed in each record's ``issues`` and keep the record out of
    aggregates.
    """
    path = Path(path)
    root = Path(images_root) if images_root is not None else path.parent
    records: list[PaintingRecord] = []
    seen: dict[str, int] = {}
    for line, row in _iter_rows(path):
        rec = _record_from_row(row, line, root)
        if rec.painting_id in seen:
            raise DuplicateId(
                f"painting_id {rec.painting_id!r} already used on row {seen[rec.painting_id]}",
                row=line,
            )
        seen[rec.painting_id] = line
        records.append(rec)
    return records


def manifest_issues(records: Iterable[PaintingRecord]) -> list[tuple[int, str, str]]:
    return [(r.row, r.painting_id, issue) for r in records for issue in r.issues]


# ---------------------------------------------------------------- results store


def file_hash(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def stats_to_entry(content_hash: str, stats: DistanceStats, params: str = PARAMS_VERSION) -> dict:
    hist = [int(c) for c in stats.histogram]
    while hist and hist[-1] == 0:
        hist.pop()
    return {
        "content_hash": content_hash,
        "params": params,
        "n_pairs": stats.n_pairs,
        "d_mean": stats.d_mean,
        "d_std": stats.d_std,
        "s": stats.s,
        "histogram": hist,
    }


def entry_to_stats(entry: dict) -> DistanceStats:
    hist = np.zeros(HIST_LEN, dtype=np.int64)
    counts = entry["histogram"]
    hist[: len(counts)] = counts
    return DistanceStats(
        n_pairs=int(entry["n_pairs"]),
        d_mean=float(entry["d_mean"]),
        d_std=float(entry["d_std"]),
        histogram=hist,
        s=None if entry["s"] is None else float(entry["s"]),
    )


class ResultsStore:
    """Append-only JSONL cache of per-image statistics.

    Each line holds one ``(content_hash, params)`` entry.  A torn final line
    left by a crash is dropped on open; any other unreadable line raises
    ``StoreCorruption``.
    """

    def __init__(self, path: str | Path, params: str = PARAMS_VERSION) -> None:
        self.path = Path(path)
        self.params = params
        self._entries: dict[tuple[str, str], dict] = {}
        self._lock = threading.Lock()
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        data = self.path.read_bytes()
        lines = data.split(b"\n")
        tail = lines.pop()  # bytes after the last newline; empty unless a write was torn
        for i, raw in enumerate(lines, start=1):
            if raw.strip():
                try:
                    self._add(json.loads(raw))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise StoreCorruption(f"{self.path}: bad entry on line {i}: {exc}") from exc
        if not tail.strip():
            return
        try:
            self._add(json.loads(tail))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            log.warning("dropping torn final line of %s", self.path)
            with open(self.path, "r+b") as fh:
                fh.truncate(len(data) - len(tail))
        else:
            with open(self.path, "ab") as fh:
                fh.write(b"\n")

    def _add(self, entry: dict) -> None:
        entry_to_stats(entry)
        self._entries[(entry["content_hash"], entry["params"])] = entry

    def __len__(self) -> int:
        return sum(1 for (_, p) in self._entries if p == self.params)

    def __contains__(self, content_hash: str) -> bool:
        return (content_hash, self.params) in self._entries

    def get(self, content_hash: str) -> DistanceStats | None:
        entry = self._entries.get((content_hash, self.params))
        return None if entry is None else entry_to_stats(entry)

    def put(self, content_hash: str, stats: DistanceStats) -> None:
        key = (content_hash, self.params)
        with self._lock:
            if key in self._entries:
                return
            entry = stats_to_entry(content_hash, stats, self.params)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, separators=(",", ":")) + "\n")
                fh.flush()
            self._entries[key] = entry

    def compact(self) -> int:
        """Rewrite the store with one line per entry, sorted by key."""
        with self._lock:
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                for key in sorted(self._entries):
                    fh.write(json.dumps(self._entries[key], separators=(",", ":")) + "\n")
            os.replace(tmp, self.path)
            return len(self._entries)


# ---------------------------------------------------------------- batch run


@dataclass
class RunReport:
    store: ResultsStore
    n_records: int = 0
    n_decoded: int = 0
    n_cached: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)
    n_degenerate: int = 0

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "n_decoded": self.n_decoded,
            "n_cached": self.n_cached,
            "n_degenerate": self.n_degenerate,
            "n_failed": len(self.failures),
            "failures": [{"painting_id": p, "error": e} for p, e in self.failures],
        }


def analyze_file(path: str) -> DistanceStats | str:
    """Worker entry point: stats for one file, or an error message."""
    try:
        return analyze_image(load_lab(path))
    except DecodeError as exc:
        return f"decode error: {exc}"
    except SeamlessError as exc:
        return f"{type(exc).__name__}: {exc}"


def process_corpus(
    records: Sequence[PaintingRecord],
    store: ResultsStore,
    parallelism: int = 1,
    images_root: str | Path = ".",
    progress_every: int = 1000,
) -> RunReport:
    """Attach stats to every record, decoding only cache misses.

    Per-file failures are recorded on the record and in the report; they
    never abort the batch.  Results are written to the store in submission
    order, so the store and all exports are independent of ``parallelism``.
    """
    root = Path(images_root)
    report = RunReport(store=store, n_records=len(records))
    todo: dict[str, str] = {}  # content hash -> path, first occurrence wins
    for rec in records:
        rec.stats = rec.failure = None
        path = root / rec.file_path
        try:
            rec.content_hash = file_hash(path)
        except OSError as exc:
            rec.content_hash = None
            rec.failure = f"unreadable: {exc.strerror or exc}"
            continue
        if rec.content_hash not in store and rec.content_hash not in todo:
            todo[rec.content_hash] = str(path)

    errors: dict[str, str] = {}
    items = list(todo.items())
    log.info("%d records, %d images to decode, parallelism %d", len(records), len(items), parallelism)

    def consume(results: Iterable[DistanceStats | str]) -> None:
        for i, ((h, _), res) in enumerate(zip(items, results), start=1):
            report.n_decoded += 1
            if isinstance(res, str):
                errors[h] = res
            else:
                store.put(h, res)
            if progress_every and i % progress_every == 0:
                log.info("analyzed %d/%d images", i, len(items))

    paths = [p for _, p in items]
    if parallelism <= 1 or len(items) <= 1:
        consume(map(analyze_file, paths))
    else:
        chunk = max(1, min(64, len(paths) // (parallelism * 4)))
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            consume(pool.map(analyze_file, paths, chunksize=chunk))

    for rec in records:
        if rec.failure is not None:
            report.failures.append((rec.painting_id, rec.failure))
            continue
        if rec.content_hash in errors:
            rec.failure = errors[rec.content_hash]
            report.failures.append((rec.painting_id, rec.failure))
            continue
        rec.stats = store.get(rec.content_hash)
        if rec.content_hash not in todo:
            report.n_cached += 1
        if rec.stats is not None and rec.stats.degenerate:
            report.n_degenerate += 1
    log.info(
        "done: %d decoded, %d cache hits, %d failed, %d degenerate",
        report.n_decoded,
        report.n_cached,
        len(report.failures),
        report.n_degenerate,
    )
    return report


# ---------------------------------------------------------------- aggregation


@dataclass(frozen=True)
class TimeSeriesPoint:
    period_start: int
    n: int
    s_mean: float
    s_sem: float
    s_std: float


def included(records: Iterable[PaintingRecord]) -> list[PaintingRecord]:
    return [r for r in records if r.included]


def _series(pairs: Iterable[tuple[int, float]], bucket: int) -> list[TimeSeriesPoint]:
    groups: dict[int, list[float]] = defaultdict(list)
    for year, s in pairs:
        groups[(year // bucket) * bucket].append(s)
    out = []
    for start in sorted(groups):
        values = sorted(groups[start])
        mean, std = mean_std(values)
        n = len(values)
        out.append(TimeSeriesPoint(start, n, mean, std / math.sqrt(n), std))
    return out


def timeseries(records: Iterable[PaintingRecord], bucket: int = DEFAULT_BUCKET) -> list[TimeSeriesPoint]:
    """Per-period mean, spread and standard error of S.

    Periods start at multiples of ``bucket`` years; empty periods are
    omitted.  Values within a period are summed in sorted order, so the
    result does not depend on record order.
    """
    if bucket < 1:
        raise ValueError("bucket must be >= 1")
    return _series(((r.year, r.s) for r in included(records)), bucket)


@dataclass(frozen=True)
class KsPair:
    group_a: str
    group_b: str
    n_a: int
    n_b: int
    result: KsResult | None
    status: str = "ok"


@dataclass
class GroupComparison:
    grouping: str
    series: dict[str, list[TimeSeriesPoint]]
    pairs: list[KsPair]


def group_compare(
    records: Iterable[PaintingRecord],
    grouping: str = "technique",
    year_window: tuple[int, int] | None = None,
    min_size: int = DEFAULT_MIN_GROUP,
    bucket: int = DEFAULT_BUCKET,
) -> GroupComparison:
    """Per-group S time series plus all-pairs two-sample KS tests.

    KS tests use the records inside ``year_window`` (inclusive); pairs where
    either group has fewer than ``min_size`` values are reported with status
    ``group_too_small`` instead of a result.
    """
    if grouping not in ("technique", "genre"):
        raise ValueError(f"unknown grouping {grouping!r}")
    by_group: dict[str, list[PaintingRecord]] = defaultdict(list)
    for r in included(records):
        key = getattr(r, grouping)
        if key:
            by_group[key].append(r)
    series = {g: _series(((r.year, r.s) for r in rs), bucket) for g, rs in sorted(by_group.items())}

    def window(rs: list[PaintingRecord]) -> list[float]:
        if year_window is None:
            return sorted(r.s for r in rs)
        lo, hi = year_window
        return sorted(r.s for r in rs if lo <= r.year <= hi)

    samples = {g: window(rs) for g, rs in by_group.items()}
    pairs = []
    for a, b in itertools.combinations(sorted(samples), 2):
        xa, xb = samples[a], samples[b]
        if len(xa) < min_size or len(xb) < min_size:
            pairs.append(KsPair(a, b, len(xa), len(xb), None, "group_too_small"))
        else:
            pairs.append(KsPair(a, b, len(xa), len(xb), ks_two_sample(xa, xb)))
    return GroupComparison(grouping, series, pairs)
