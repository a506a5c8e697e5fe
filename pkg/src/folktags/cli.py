"""Command-line front end wiring ingestion, statistics, weighting,
classification and simulation into reproducible experiments.

Every command prints an effective-config header (`# key=value`, defaults
included) sufficient to reproduce the run, writes deterministic outputs,
and exits 0 only when no error occurred.  Files written by a failing run
are removed so partial outputs never survive.

Commands that read bookmark data accept either a raw input file (JSONL or
TSV, re-ingested each run) or a previously written cache file; exactly one
of the two must be given.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import IO

from .classifier import (
    LCC_EF_MERGE,
    TrainConfig,
    evaluate,
    load_labels,
    write_grid_csv,
    write_runs_csv,
)
from .core import Folksonomy, normalize_tag
from .ingest import (
    FORMATS,
    GOODREADS_AUTO_TAGS,
    IngestReport,
    ParseLog,
    build_folksonomy,
    parse_stream,
)
from .simulator import POLICIES, SimConfig, describe, export, generate
from .stats import (
    ENTITY_KINDS,
    RUB_RELATIONS,
    avg_distinct_tags,
    format_availability,
    novelty_curve,
    rank_usage_curve,
    rub_comparison,
    write_averages_csv,
    write_novelty_csv,
    write_rank_usage_csv,
    write_rub_csv,
)
from .weighting import Scheme

__all__ = ["main"]

CACHE_FORMAT_VERSION = 1
DEFAULT_SCHEMES = "tf,tf-irf,tf-iuf,tf-ibf"
DEFAULT_SIZES = "300,600,1200"


class _OutputTracker:
    """Records files opened for writing so a failed run can remove them."""

    def __init__(self) -> None:
        self.paths: list[Path] = []

    def open(self, path: Path) -> IO[str]:
        path.parent.mkdir(parents=True, exist_ok=True)
        self.paths.append(path)
        return open(path, "w", encoding="utf-8", newline="")

    def cleanup(self) -> None:
        for path in self.paths:
            path.unlink(missing_ok=True)


def _parse_sizes(text: str) -> list[int]:
    sizes = [int(part) for part in text.split(",") if part.strip()]
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive integers")
    return sizes


def _parse_schemes(text: str) -> list[Scheme]:
    schemes = [Scheme.parse(part.strip()) for part in text.split(",") if part.strip()]
    if not schemes:
        raise ValueError("at least one scheme required")
    if len(set(schemes)) != len(schemes):
        raise ValueError("duplicate scheme")
    return schemes


def _auto_tags(args: argparse.Namespace) -> frozenset[str]:
    tags: set[str] = set()
    if args.strip_goodreads:
        tags |= GOODREADS_AUTO_TAGS
    if args.auto_tags:
        tags |= {
            normalize_tag(part)
            for part in args.auto_tags.split(",")
            if normalize_tag(part)
        }
    return frozenset(tags)


def _write_cache(folksonomy: Folksonomy, out: IO[str]) -> None:
    doc = {
        "format_version": CACHE_FORMAT_VERSION,
        "bookmarks": [
            {"user": b.user, "resource": b.resource, "tags": sorted(b.tags)}
            for b in folksonomy.bookmarks
        ],
    }
    json.dump(doc, out, ensure_ascii=False, separators=(",", ":"))
    out.write("\n")


def _load_cache(path: Path) -> Folksonomy:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("format_version") != CACHE_FORMAT_VERSION:
        raise ValueError(
            f"{path}: not a cache file with format_version={CACHE_FORMAT_VERSION}"
        )
    folksonomy = Folksonomy()
    for record in doc["bookmarks"]:
        folksonomy.add_bookmark(record["user"], record["resource"], record["tags"])
    return folksonomy


def _ingest_file(
    path: Path, fmt: str, auto_tags: frozenset[str]
) -> tuple[Folksonomy, IngestReport, ParseLog]:
    log = ParseLog()
    with open(path, encoding="utf-8") as fh:
        records = list(parse_stream(fh, format=fmt, log=log))
    folksonomy, report = build_folksonomy(
        records, auto_tags=auto_tags, malformed_lines=log.n_malformed
    )
    return folksonomy, report, log


def _report_malformed(path: Path, log: ParseLog) -> None:
    for lineno, message in log.malformed:
        print(f"{path}:{lineno}: {message}", file=sys.stderr)


def _load_input(args: argparse.Namespace) -> Folksonomy:
    """Resolve the input/--cache pair into a folksonomy; strict on errors."""
    if (args.input is None) == (args.cache is None):
        raise ValueError("exactly one of an input file or --cache is required")
    if args.cache is not None:
        return _load_cache(Path(args.cache))
    folksonomy, _, log = _ingest_file(Path(args.input), args.format, _auto_tags(args))
    if log.n_malformed:
        _report_malformed(Path(args.input), log)
        raise ValueError(f"{log.n_malformed} malformed lines in {args.input}")
    return folksonomy


def _header(command: str, pairs: list[tuple[str, object]]) -> None:
    print(f"# command={command}")
    for key, value in pairs:
        print(f"# {key}={value}")


def _input_pairs(args: argparse.Namespace) -> list[tuple[str, object]]:
    return [
        ("input", args.input or ""),
        ("cache", args.cache or ""),
        ("format", args.format),
        ("strip_goodreads", args.strip_goodreads),
        ("auto_tags", ",".join(sorted(_auto_tags(args)))),
    ]


def cmd_ingest(args: argparse.Namespace, tracker: _OutputTracker) -> int:
    _header("ingest", [
        ("input", args.input),
        ("format", args.format),
        ("strip_goodreads", args.strip_goodreads),
        ("auto_tags", ",".join(sorted(_auto_tags(args)))),
        ("cache_out", args.cache_out or ""),
    ])
    folksonomy, report, log = _ingest_file(
        Path(args.input), args.format, _auto_tags(args)
    )
    if log.n_malformed:
        _report_malformed(Path(args.input), log)
        return 1
    print(format_availability(report))
    if args.cache_out:
        with tracker.open(Path(args.cache_out)) as out:
            _write_cache(folksonomy, out)
    return 0


def cmd_stats(args: argparse.Namespace, tracker: _OutputTracker) -> int:
    _header("stats", _input_pairs(args) + [
        ("max_rank", args.max_rank),
        ("out_dir", args.out_dir),
    ])
    folksonomy = _load_input(args)
    out_dir = Path(args.out_dir)
    for kind in ENTITY_KINDS:
        with tracker.open(out_dir / f"rank_usage_{kind}.csv") as out:
            write_rank_usage_csv(rank_usage_curve(folksonomy, kind), out)
    with tracker.open(out_dir / "rub.csv") as out:
        write_rub_csv(rub_comparison(folksonomy), out)
    with tracker.open(out_dir / "novelty.csv") as out:
        write_novelty_csv(novelty_curve(folksonomy, max_rank=args.max_rank), out)
    with tracker.open(out_dir / "averages.csv") as out:
        write_averages_csv(avg_distinct_tags(folksonomy), out)
    return 0


def cmd_classify(args: argparse.Namespace, tracker: _OutputTracker) -> int:
    schemes = _parse_schemes(args.schemes)
    sizes = _parse_sizes(args.sizes)
    _header("classify", _input_pairs(args) + [
        ("labels", args.labels),
        ("lcc_merge_ef", args.lcc_merge_ef),
        ("schemes", ",".join(s.value for s in schemes)),
        ("sizes", ",".join(str(s) for s in sizes)),
        ("runs", args.runs),
        ("seed", args.seed),
        ("normalize", not args.no_normalize),
        ("jobs", args.jobs),
        ("out_dir", args.out_dir),
    ])
    folksonomy = _load_input(args)
    merge = LCC_EF_MERGE if args.lcc_merge_ef else None
    with open(args.labels, encoding="utf-8") as fh:
        labels = load_labels(fh, merge=merge)
    kept = labels.restrict_to(folksonomy)
    print(f"# labels_kept={len(kept.labels)} labels_dropped={len(labels.labels) - len(kept.labels)}")
    grid = evaluate(
        folksonomy,
        kept,
        schemes=schemes,
        sizes=sizes,
        runs=args.runs,
        seed=args.seed,
        config=TrainConfig(),
        normalize=not args.no_normalize,
        jobs=args.jobs,
    )
    out_dir = Path(args.out_dir)
    with tracker.open(out_dir / "accuracy_grid.csv") as out:
        write_grid_csv(grid, out)
    with tracker.open(out_dir / "accuracy_runs.csv") as out:
        write_runs_csv(grid, out)
    write_grid_csv(grid, sys.stdout)
    return 0


def cmd_simulate(args: argparse.Namespace, tracker: _OutputTracker) -> int:
    config = SimConfig(
        policy=args.policy,
        n_users=args.n_users,
        n_resources=args.n_resources,
        n_categories=args.n_categories,
        bookmarks_per_user=args.bookmarks_per_user,
        tags_per_bookmark=args.tags_per_bookmark,
        vocab_size=args.vocab_size,
        zipf_exponent=args.zipf_exponent,
        suggestion_acceptance=args.acceptance,
        n_suggestions=args.n_suggestions,
        signal_strength=args.signal_strength,
        seed=args.seed,
    )
    _header("simulate", [(k, getattr(config, k)) for k in (
        "policy", "n_users", "n_resources", "n_categories", "bookmarks_per_user",
        "tags_per_bookmark", "vocab_size", "zipf_exponent", "suggestion_acceptance",
        "n_suggestions", "signal_strength", "seed",
    )] + [("out_dir", args.out_dir)])
    folksonomy, labels = generate(config)
    out_dir = Path(args.out_dir)
    with tracker.open(out_dir / "bookmarks.jsonl") as bookmarks_out, tracker.open(
        out_dir / "labels.tsv"
    ) as labels_out:
        export(folksonomy, labels, bookmarks_out, labels_out)
    summary = describe(folksonomy)
    print(f"n_users={folksonomy.n_users}")
    print(f"n_resources={folksonomy.n_resources}")
    print(f"n_bookmarks={folksonomy.n_bookmarks}")
    print(f"n_tags={folksonomy.n_tags}")
    print(f"labeled_resources={len(labels.labels)}")
    print(f"avg_tags_per_resource={summary.avg_tags_per_resource:.6f}")
    print(f"avg_tags_per_user={summary.avg_tags_per_user:.6f}")
    print(f"avg_tags_per_bookmark={summary.avg_tags_per_bookmark:.6f}")
    print(f"top_decile_bookmark_coverage={summary.top_decile_bookmark_coverage:.6f}")
    if summary.mean_novelty_ranks_2_50 is None:
        print("mean_novelty_ranks_2_50=none")
    else:
        print(f"mean_novelty_ranks_2_50={summary.mean_novelty_ranks_2_50:.6f}")
    for relation in RUB_RELATIONS:
        print(f"rub_{relation}={summary.rub_fractions[relation]:.6f}")
    return 0


def _add_input_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?", help="bookmark file (JSONL or TSV)")
    parser.add_argument("--cache", help="read bookmarks from a cache file instead")
    parser.add_argument("--format", choices=FORMATS, default="jsonl")
    parser.add_argument(
        "--strip-goodreads",
        action="store_true",
        help="drop reading-state auto tags (read, currently-reading, to-read)",
    )
    parser.add_argument(
        "--auto-tags", default="", help="extra auto tags to strip, comma-separated"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folktags",
        description="Tag-distribution analytics and classification experiments "
        "over social-bookmarking data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse a bookmark file and report availability")
    p_ingest.add_argument("input", help="bookmark file (JSONL or TSV)")
    p_ingest.add_argument("--format", choices=FORMATS, default="jsonl")
    p_ingest.add_argument("--strip-goodreads", action="store_true")
    p_ingest.add_argument("--auto-tags", default="")
    p_ingest.add_argument(
        "--cache-out", default="", help="also write a reusable cache file"
    )
    p_ingest.set_defaults(func=cmd_ingest, cache=None)

    p_stats = sub.add_parser("stats", help="export distribution analyses as CSV")
    _add_input_options(p_stats)
    p_stats.add_argument("--max-rank", type=int, default=100)
    p_stats.add_argument("--out-dir", default=".")
    p_stats.set_defaults(func=cmd_stats)

    p_classify = sub.add_parser(
        "classify", help="run the scheme-by-size classification experiment"
    )
    _add_input_options(p_classify)
    p_classify.add_argument("--labels", required=True, help="resource\\tcategory TSV")
    p_classify.add_argument("--lcc-merge-ef", action="store_true",
                            help="fold label category F into E before training")
    p_classify.add_argument("--schemes", default=DEFAULT_SCHEMES)
    p_classify.add_argument("--sizes", default=DEFAULT_SIZES)
    p_classify.add_argument("--runs", type=int, default=6)
    p_classify.add_argument("--seed", type=int, default=0)
    p_classify.add_argument("--no-normalize", action="store_true")
    p_classify.add_argument("--jobs", type=int, default=1)
    p_classify.add_argument("--out-dir", default=".")
    p_classify.set_defaults(func=cmd_classify)

    p_sim = sub.add_parser("simulate", help="generate a synthetic labeled corpus")
    p_sim.add_argument("--policy", choices=POLICIES, default="none")
    p_sim.add_argument("--n-users", type=int, default=SimConfig.n_users)
    p_sim.add_argument("--n-resources", type=int, default=SimConfig.n_resources)
    p_sim.add_argument("--n-categories", type=int, default=SimConfig.n_categories)
    p_sim.add_argument(
        "--bookmarks-per-user", type=float, default=SimConfig.bookmarks_per_user
    )
    p_sim.add_argument(
        "--tags-per-bookmark", type=float, default=SimConfig.tags_per_bookmark
    )
    p_sim.add_argument("--vocab-size", type=int, default=SimConfig.vocab_size)
    p_sim.add_argument("--zipf-exponent", type=float, default=SimConfig.zipf_exponent)
    p_sim.add_argument(
        "--acceptance", type=float, default=SimConfig.suggestion_acceptance
    )
    p_sim.add_argument("--n-suggestions", type=int, default=SimConfig.n_suggestions)
    p_sim.add_argument(
        "--signal-strength", type=float, default=SimConfig.signal_strength
    )
    p_sim.add_argument("--seed", type=int, default=SimConfig.seed)
    p_sim.add_argument("--out-dir", default=".")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    tracker = _OutputTracker()
    try:
        return args.func(args, tracker)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        tracker.cleanup()
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
