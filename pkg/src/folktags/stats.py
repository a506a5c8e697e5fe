"""Dataset analyses over a folksonomy: availability, distinct-tag averages,
tag rank-usage curves, pairwise rf/uf/bf relation fractions, and per-rank
tag-novelty curves.  All operations are pure reads over an immutable
Folksonomy and safe to run in parallel.

Every analysis can be exported as CSV (header row, comma separator,
6-decimal reals) so the output stays plot-tool agnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

from .core import Folksonomy
from .ingest import IngestReport

__all__ = [
    "ENTITY_KINDS",
    "RUB_RELATIONS",
    "NoveltyCurve",
    "RankUsageCurve",
    "RubComparison",
    "availability_rows",
    "avg_distinct_tags",
    "format_availability",
    "mean_novelty",
    "novelty_curve",
    "rank_usage_curve",
    "rub_comparison",
    "top_decile_coverage",
    "write_averages_csv",
    "write_novelty_csv",
    "write_rank_usage_csv",
    "write_rub_csv",
]

ENTITY_KINDS = ("resources", "users", "bookmarks")

# Fixed order of the nine pairwise relations between a tag's bf, uf and rf.
RUB_RELATIONS = ("b>u", "b=u", "b<u", "r>u", "r=u", "r<u", "b>r", "b=r", "b<r")


@dataclass(frozen=True)
class RankUsageCurve:
    """Per-tag coverage by rank: tags sorted by descending coverage count.

    Point i is (rank_percent, coverage_percent) where rank_percent is
    100*(i+1)/n_tags and coverage_percent is the percent of entities of the
    chosen kind containing that tag.
    """

    entity_kind: str
    points: list[tuple[float, float]]


@dataclass(frozen=True)
class RubComparison:
    """Fractions of tags in each pairwise relation between bf, uf and rf."""

    fractions: dict[str, float]


@dataclass(frozen=True)
class NoveltyCurve:
    """Mean fraction of never-seen-before tags per bookmark rank.

    Each point is (bookmark_rank, mean_novelty, n_resources) where the mean
    runs over the resources that have a bookmark at that rank.
    """

    points: list[tuple[int, float, int]]


def _require_non_empty(folksonomy: Folksonomy) -> None:
    if folksonomy.n_bookmarks == 0:
        raise ValueError("operation requires a non-empty folksonomy")


def avg_distinct_tags(folksonomy: Folksonomy) -> tuple[float, float, float]:
    """Mean distinct-tag counts (per resource, per user, per bookmark)."""
    _require_non_empty(folksonomy)
    per_resource = sum(len(t) for t in folksonomy.resource_tags.values())
    per_user = sum(len(t) for t in folksonomy.user_tags.values())
    per_bookmark = sum(len(b.tags) for b in folksonomy.bookmarks)
    return (
        per_resource / folksonomy.n_resources,
        per_user / folksonomy.n_users,
        per_bookmark / folksonomy.n_bookmarks,
    )


def _kind_counts(folksonomy: Folksonomy, entity_kind: str) -> tuple[dict[str, int], int]:
    if entity_kind == "resources":
        return folksonomy.rf, folksonomy.n_resources
    if entity_kind == "users":
        return folksonomy.uf, folksonomy.n_users
    if entity_kind == "bookmarks":
        return folksonomy.bf, folksonomy.n_bookmarks
    raise ValueError(f"unknown entity kind {entity_kind!r}; expected one of {ENTITY_KINDS}")


def rank_usage_curve(folksonomy: Folksonomy, entity_kind: str) -> RankUsageCurve:
    """Coverage percent per tag rank for one entity kind.

    Tags are ranked by the same count being plotted (descending, ties broken
    by tag id), so e.g. a tag present on half of all resources yields a
    coverage of 50 on the resources curve.
    """
    _require_non_empty(folksonomy)
    counts, total = _kind_counts(folksonomy, entity_kind)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    n = len(ranked)
    points = [
        (100.0 * (i + 1) / n, 100.0 * count / total)
        for i, (_, count) in enumerate(ranked)
    ]
    return RankUsageCurve(entity_kind=entity_kind, points=points)


def top_decile_coverage(curve: RankUsageCurve) -> float:
    """Share of total coverage mass held by the top 10% of ranked tags.

    Returns a value in (0, 1]; higher means a head-heavier distribution.
    """
    coverages = [c for _, c in curve.points]
    head = max(1, math.ceil(0.1 * len(coverages)))
    total = sum(coverages)
    return sum(coverages[:head]) / total


def rub_comparison(folksonomy: Folksonomy) -> RubComparison:
    """Fractions of tags whose bf/uf/rf stand in each pairwise relation."""
    _require_non_empty(folksonomy)
    tallies = dict.fromkeys(RUB_RELATIONS, 0)
    for tag in folksonomy.tags():
        rf, uf, bf = folksonomy.frequencies(tag)
        tallies["b>u" if bf > uf else "b=u" if bf == uf else "b<u"] += 1
        tallies["r>u" if rf > uf else "r=u" if rf == uf else "r<u"] += 1
        tallies["b>r" if bf > rf else "b=r" if bf == rf else "b<r"] += 1
    n = folksonomy.n_tags
    return RubComparison(fractions={rel: tallies[rel] / n for rel in RUB_RELATIONS})


def novelty_curve(folksonomy: Folksonomy, max_rank: int = 100) -> NoveltyCurve:
    """Mean ratio of new tags per bookmark rank, over all resources.

    A bookmark at rank k (its seq + 1) contributes the fraction of its tags
    not present in any of the resource's earlier bookmarks.  Resources with
    fewer than k bookmarks simply stop contributing at rank k.
    """
    if max_rank < 1:
        raise ValueError("max_rank must be >= 1")
    sums = [0.0] * max_rank
    counts = [0] * max_rank
    for resource in folksonomy.resource_tags:
        seen: set[str] = set()
        for bookmark in folksonomy.resource_bookmarks(resource):
            rank = bookmark.seq + 1
            if rank > max_rank:
                break
            new = len(bookmark.tags - seen)
            sums[rank - 1] += new / len(bookmark.tags)
            counts[rank - 1] += 1
            seen |= bookmark.tags
    points = [
        (rank, sums[rank - 1] / counts[rank - 1], counts[rank - 1])
        for rank in range(1, max_rank + 1)
        if counts[rank - 1] > 0
    ]
    return NoveltyCurve(points=points)


def mean_novelty(curve: NoveltyCurve, min_rank: int = 2, max_rank: int = 50) -> float:
    """Unweighted mean of per-rank novelty over ranks in [min_rank, max_rank].

    Raises ValueError when the curve has no point in that range (e.g. no
    resource carries more than one bookmark).
    """
    values = [m for rank, m, _ in curve.points if min_rank <= rank <= max_rank]
    if not values:
        raise ValueError(f"no novelty points in rank range [{min_rank}, {max_rank}]")
    return sum(values) / len(values)


def availability_rows(report: IngestReport) -> list[tuple[str, int, int, str]]:
    """Availability table rows (kind, annotated, total, percent to 2 decimals)."""
    rows = []
    for kind, availability in (
        ("users", report.users),
        ("bookmarks", report.bookmarks),
        ("resources", report.resources),
    ):
        rows.append(
            (kind, availability.annotated, availability.total, f"{availability.percent:.2f}")
        )
    return rows


def format_availability(report: IngestReport) -> str:
    """Printable availability table, one row per entity kind."""
    lines = [f"{'kind':<10} {'annotated':>14} {'total':>14} {'percent':>8}"]
    for kind, annotated, total, percent in availability_rows(report):
        lines.append(f"{kind:<10} {annotated:>14,} {total:>14,} {percent:>8}")
    lines.append(f"distinct tags: {report.distinct_tags:,}")
    lines.append(f"auto tags stripped: {report.auto_tags_stripped:,}")
    if report.malformed_lines:
        lines.append(f"malformed lines skipped: {report.malformed_lines:,}")
    return "\n".join(lines)


def write_rank_usage_csv(curve: RankUsageCurve, out: IO[str]) -> None:
    out.write("rank_percent,coverage_percent\n")
    for rank_percent, coverage_percent in curve.points:
        out.write(f"{rank_percent:.6f},{coverage_percent:.6f}\n")


def write_rub_csv(comparison: RubComparison, out: IO[str]) -> None:
    out.write("relation,fraction\n")
    for relation in RUB_RELATIONS:
        out.write(f"{relation},{comparison.fractions[relation]:.6f}\n")


def write_novelty_csv(curve: NoveltyCurve, out: IO[str]) -> None:
    out.write("bookmark_rank,mean_novelty,n_resources\n")
    for rank, mean_novelty, n_resources in curve.points:
        out.write(f"{rank},{mean_novelty:.6f},{n_resources}\n")


def write_averages_csv(averages: tuple[float, float, float], out: IO[str]) -> None:
    out.write("item,avg_distinct_tags\n")
    for item, value in zip(("per_resource", "per_user", "per_bookmark"), averages):
        out.write(f"{item},{value:.6f}\n")
