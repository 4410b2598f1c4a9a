"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(undecodable image, degenerate result, manifest violation), 3 internal
error.  Failures print one JSON object to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import yaml

from . import corpus as corpus_mod
from . import stylometry as stylo
from .colorspace import load_srgb, srgb_to_lab_array
from .contrast import HIST_BIN_WIDTH, analyze_image
from .errors import DecodeError, EmptyImage, SchemaError, SeamlessError
from .exports import write_csv, write_histogram, write_json
from .nullmodels import DEFAULT_SAMPLES, NullModelKind, null_distribution
from .robustness import DEFAULT_KELVINS, DEFAULT_WIDTHS, size_sweep, temperature_sweep

log = logging.getLogger("seamless")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    def __init__(self, kind: str, message: str, **extra: object) -> None:
        super().__init__(message)
        self.kind = kind
        self.extra = extra


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text}") from exc


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise UsageError("--seed is required for stochastic subcommands")
    return int(args.seed)


def _decode(path: str):
    try:
        return load_srgb(path)
    except DecodeError as exc:
        raise DataError("DecodeError", str(exc)) from exc


# ---------------------------------------------------------------- subcommands


def cmd_analyze(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    srgb = _decode(args.image)
    try:
        stats = analyze_image(srgb_to_lab_array(srgb))
    except EmptyImage as exc:
        raise DataError("EmptyImage", str(exc)) from exc
    payload = {"image_id": Path(args.image).stem, "width": srgb.shape[1], "height": srgb.shape[0]}
    payload.update(stats.to_dict())
    write_json(out / "stats.json", payload)
    write_histogram(out / "histogram.csv", stats.histogram, HIST_BIN_WIDTH)
    if stats.degenerate:
        raise DataError("Degenerate", "all adjacent distances are zero; S is undefined", degenerate=True)
    return EXIT_OK


def cmd_null(args: argparse.Namespace) -> int:
    seed = _require_seed(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    out = _out_dir(args)
    srgb = _decode(args.image)
    try:
        res = null_distribution(srgb_to_lab_array(srgb), NullModelKind(args.kind), args.samples, seed)
    except EmptyImage as exc:
        raise DataError("EmptyImage", str(exc)) from exc
    payload = {"image_id": Path(args.image).stem}
    payload.update(res.to_dict())
    write_json(out / "null_stats.json", payload)
    write_histogram(out / "null_histogram.csv", res.histogram, HIST_BIN_WIDTH)
    return EXIT_OK


def cmd_robustness(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    srgb = _decode(args.image)
    try:
        if args.mode == "temperature":
            grid = args.grid or list(DEFAULT_KELVINS)
            rows = temperature_sweep(srgb, grid)
        else:
            grid = args.grid or list(DEFAULT_WIDTHS)
            rows = size_sweep(srgb, grid)
    except SeamlessError as exc:
        raise UsageError(str(exc)) from exc
    image_id = Path(args.image).stem
    write_csv(
        out / f"robustness_{args.mode}.csv",
        ("image_id", "parameter", "s", "d_mean", "d_std"),
        ((image_id, p, st.s, st.d_mean, st.d_std) for p, st in rows),
    )
    return EXIT_OK


def _load_records(args: argparse.Namespace) -> list[corpus_mod.PaintingRecord]:
    try:
        return corpus_mod.load_manifest(args.manifest, args.images_root)
    except SchemaError as exc:
        raise DataError(type(exc).__name__, str(exc), row=exc.row) from exc
    except OSError as exc:
        raise DataError("ManifestUnreadable", str(exc)) from exc


def _images_root(args: argparse.Namespace) -> Path:
    return Path(args.images_root) if args.images_root else Path(args.manifest).parent


def cmd_corpus(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    records = _load_records(args)
    store = corpus_mod.ResultsStore(args.store or out / "store.jsonl")
    report = corpus_mod.process_corpus(records, store, args.parallelism, _images_root(args))
    log.info("re-decoded %d images, %d cache hits", report.n_decoded, report.n_cached)

    series = corpus_mod.timeseries(records, args.bucket)
    write_csv(out / "fig5c.csv", ("year", "n", "s_mean", "s_sem"),
              ((p.period_start, p.n, p.s_mean, p.s_sem) for p in series))
    write_csv(out / "fig5d.csv", ("year", "s_std"), ((p.period_start, p.s_std) for p in series))
    window = tuple(args.ks_window) if args.ks_window else None
    if window is not None and len(window) != 2:
        raise UsageError("--ks-window takes START,END")
    cmp = corpus_mod.group_compare(records, args.grouping, window, args.min_group, args.bucket)
    write_csv(
        out / "fig6.csv",
        ("group", "year", "n", "s_mean", "s_sem"),
        ((g, p.period_start, p.n, p.s_mean, p.s_sem) for g, pts in cmp.series.items() for p in pts),
    )
    write_csv(
        out / "ks_pairs.csv",
        ("group_a", "group_b", "statistic", "p_value", "n_a", "n_b", "status"),
        (
            (k.group_a, k.group_b, k.result and k.result.statistic, k.result and k.result.p_value,
             k.n_a, k.n_b, k.status)
            for k in cmp.pairs
        ),
    )
    write_csv(
        out / "records.csv",
        ("painting_id", "artist_id", "year", "status", "s", "d_mean", "d_std", "n_pairs"),
        (
            (r.painting_id, r.artist_id, r.year, r.status, r.s,
             r.stats and r.stats.d_mean, r.stats and r.stats.d_std, r.stats and r.stats.n_pairs)
            for r in sorted(records, key=lambda r: r.painting_id)
        ),
    )
    summary = report.to_dict()
    summary["manifest_issues"] = [
        {"row": row, "painting_id": pid, "issue": issue} for row, pid, issue in corpus_mod.manifest_issues(records)
    ]
    write_json(out / "run_report.json", summary)
    return EXIT_OK


def cmd_stylometry(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    records = _load_records(args)
    store = corpus_mod.ResultsStore(args.store)
    root = _images_root(args)
    missing = 0
    for rec in records:
        try:
            rec.content_hash = corpus_mod.file_hash(root / rec.file_path)
        except OSError:
            rec.failure = "unreadable"
            continue
        rec.stats = store.get(rec.content_hash)
        missing += rec.stats is None
    if missing:
        log.warning("%d records have no cached stats; run `seamless corpus` first", missing)

    profiles = stylo.build_profiles(records)
    meta = stylo.metamorphosality(profiles, args.modern_cutoff, args.min_years)
    verdicts = stylo.singularity(records, profiles, args.window, args.min_window, args.min_paintings)
    div = stylo.diversity_report(profiles)

    write_csv(
        out / "metamorphosality.csv",
        ("artist_id", "slope", "mu", "n_paintings", "distinct_years"),
        ((p.artist_id, p.slope, p.mu, p.n_paintings, p.distinct_years) for p in profiles),
    )
    write_csv(
        out / "singularity.csv",
        ("artist_id", "nu", "frac_high", "frac_low", "n_defined"),
        ((p.artist_id, p.nu, p.frac_high, p.frac_low, p.n_defined) for p in profiles),
    )
    write_csv(
        out / "verdicts.csv",
        ("painting_id", "z", "band", "window_n"),
        ((v.painting_id, v.z, v.band, v.window_n) for v in verdicts),
    )
    write_csv(out / "diversity.csv", ("artist_id", "painting_count", "diversity"), div.rows)
    write_json(
        out / "stylometry_summary.json",
        {
            "n_artists": len(profiles),
            "n_modern_eligible": meta.n_eligible,
            "mean_slope": meta.mean_slope,
            "std_slope": meta.std_slope,
            "metamorphosality_note": meta.note,
            "diversity_count_pearson": div.correlation,
            "diversity_note": div.note,
            "records_without_stats": missing,
            "thresholds": {
                "modern_cutoff": args.modern_cutoff,
                "min_years": args.min_years,
                "window": args.window,
                "min_window": args.min_window,
                "min_paintings": args.min_paintings,
            },
        },
    )
    return EXIT_OK


def cmd_gen_fixtures(args: argparse.Namespace) -> int:
    from PIL import Image

    from . import synth

    seed = _require_seed(args)
    out = _out_dir(args)
    spec_data = {}
    if args.spec:
        spec_data = _read_mapping(args.spec)
    try:
        spec = synth.CorpusSpec.from_dict(spec_data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad corpus spec: {exc}") from exc
    try:
        synth.generate_synthetic_corpus(spec, seed, out)
    except SeamlessError as exc:
        raise DataError(type(exc).__name__, str(exc)) from exc
    if args.size_suite:
        (out / "size_suite").mkdir(exist_ok=True)
        for name, img in synth.fixture_suite(seed).items():
            Image.fromarray(img).save(out / "size_suite" / f"{name}.png")
    return EXIT_OK


def cmd_compact(args: argparse.Namespace) -> int:
    n = corpus_mod.ResultsStore(args.store).compact()
    log.info("store compacted to %d entries", n)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _read_mapping(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError(f"{path} must hold a mapping")
    return data


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON/YAML file whose keys mirror the subcommand's flags")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser = _Parser(prog="seamless", description="Seamlessness analysis of painting images.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    p = add("analyze", "S, moments and distance histogram of one image")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = add("null", "averaged null-model statistics")
    p.add_argument("image")
    p.add_argument("--kind", choices=[k.value for k in NullModelKind], default="shuffle")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_null)

    p = add("robustness", "S under color-temperature or size sweeps")
    p.add_argument("image")
    p.add_argument("--mode", choices=["temperature", "size"], required=True)
    p.add_argument("--grid", type=_int_list, help="comma-separated kelvins or widths")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_robustness)

    def corpus_inputs(p: argparse.ArgumentParser) -> None:
        p.add_argument("--manifest", required=True)
        p.add_argument("--images-root", help="directory file_path is relative to (default: manifest dir)")
        p.add_argument("--out", required=True)

    p = add("corpus", "batch-analyze a manifest and export time series")
    corpus_inputs(p)
    p.add_argument("--store", help="results store (default: OUT/store.jsonl)")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--bucket", type=int, default=corpus_mod.DEFAULT_BUCKET)
    p.add_argument("--grouping", choices=["technique", "genre"], default="technique")
    p.add_argument("--min-group", type=int, default=corpus_mod.DEFAULT_MIN_GROUP)
    p.add_argument("--ks-window", type=_int_list, help="START,END years for the KS tests")
    p.set_defaults(func=cmd_corpus)

    p = add("stylometry", "metamorphosality, singularity and diversity")
    corpus_inputs(p)
    p.add_argument("--store", required=True)
    p.add_argument("--modern-cutoff", type=int, default=stylo.MODERN_CUTOFF)
    p.add_argument("--min-years", type=int, default=stylo.MIN_DISTINCT_YEARS)
    p.add_argument("--window", type=int, default=stylo.WINDOW_HALF_WIDTH, help="half-width in years")
    p.add_argument("--min-window", type=int, default=stylo.MIN_WINDOW)
    p.add_argument("--min-paintings", type=int, default=stylo.MIN_PAINTINGS_NU)
    p.set_defaults(func=cmd_stylometry)

    p = add("gen-fixtures", "write a synthetic corpus with controlled S")
    p.add_argument("--spec", help="JSON/YAML corpus spec (fields of CorpusSpec)")
    p.add_argument("--seed", type=int)
    p.add_argument("--size-suite", action="store_true", help="also write the size-robustness scenes")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_fixtures)

    p = add("compact", "rewrite a results store without duplicates")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_compact)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    config = _read_mapping(known.config)
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in sub_action.choices.items():
        section = config.get(name, {})
        flat = {k: v for k, v in config.items() if k not in sub_action.choices}
        values = {k.replace("-", "_"): v for k, v in {**flat, **section}.items()}
        dests = {a.dest for a in sp._actions}
        for key, value in values.items():
            if key in dests:
                action = next(a for a in sp._actions if a.dest == key)
                if isinstance(value, list) and action.type is _int_list:
                    value = [int(v) for v in value]
                sp.set_defaults(**{key: value})
                action.required = False


def _emit_error(kind: str, message: str, code: int, **extra: object) -> int:
    payload = {"error": kind, "message": message, "exit_code": code}
    payload.update(extra)
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _emit_error("UsageError", str(exc), EXIT_USAGE)
    level = logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)
    try:
        return args.func(args)
    except UsageError as exc:
        return _emit_error("UsageError", str(exc), EXIT_USAGE)
    except DataError as exc:
        return _emit_error(exc.kind, str(exc), EXIT_DATA, **exc.extra)
    except SeamlessError as exc:
        return _emit_error(type(exc).__name__, str(exc), EXIT_DATA)
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        return _emit_error("InternalError", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
