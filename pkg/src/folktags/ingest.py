"""Stream bookmark records from files into a Folksonomy.

Two line-oriented interchange formats are supported (UTF-8, ``\\n`` line
endings):

* ``jsonl`` -- one JSON object per line with fields ``user``, ``resource``,
  ``tags`` (array of strings, may be empty or omitted) and optional ``seq``
  (non-negative integer or timestamp string).
* ``tsv`` -- tab-separated ``user``, ``resource``, comma-joined tags,
  optional ``seq``.  Commas are illegal inside tags in TSV; use JSONL when
  tags may contain commas.

Filtering rules applied while building a folksonomy:

* a configurable set of auto-attached tags (e.g. reading-state tags added
  by the bookmarking site itself) is stripped from every record first,
* records left with no tags are counted as non-annotated and excluded, so
  the resulting store only ever holds annotated bookmarks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Union

from .core import Folksonomy, normalize_tag

__all__ = [
    "GOODREADS_AUTO_TAGS",
    "Availability",
    "IngestReport",
    "ParseLog",
    "RawRecord",
    "build_folksonomy",
    "dump_jsonl",
    "filter_popular",
    "parse_stream",
]

# Reading-state tags attached automatically by GoodReads-style sites.
GOODREADS_AUTO_TAGS = frozenset({"read", "currently-reading", "to-read"})

FORMATS = ("jsonl", "tsv")


@dataclass(frozen=True)
class RawRecord:
    """One bookmark record as read from a file, before any filtering."""

    user: str
    resource: str
    tags: tuple[str, ...]
    order_hint: Union[int, str, None] = None


@dataclass
class ParseLog:
    """Collects per-line recoverable parse errors as (line_number, message)."""

    malformed: list[tuple[int, str]] = field(default_factory=list)

    def add(self, lineno: int, message: str) -> None:
        self.malformed.append((lineno, message))

    @property
    def n_malformed(self) -> int:
        return len(self.malformed)


@dataclass(frozen=True)
class Availability:
    """Annotated-vs-total counts for one entity kind."""

    annotated: int
    total: int

    @property
    def percent(self) -> float:
        """Percent annotated; 0.0 when the total is zero."""
        if self.total == 0:
            return 0.0
        return 100.0 * self.annotated / self.total


@dataclass(frozen=True)
class IngestReport:
    """Summary of one ingest run: availability per entity kind plus tallies."""

    users: Availability
    bookmarks: Availability
    resources: Availability
    distinct_tags: int
    auto_tags_stripped: int
    malformed_lines: int = 0


def _decode(line: Union[str, bytes]) -> str:
    if isinstance(line, bytes):
        return line.decode("utf-8")
    return line


def _parse_order_hint(raw: str) -> Union[int, str]:
    try:
        value = int(raw)
    except ValueError:
        return raw
    if value < 0:
        raise ValueError(f"negative order hint {value}")
    return value


def _parse_tsv_line(line: str) -> RawRecord:
    cols = line.split("\t")
    if not 3 <= len(cols) <= 4:
        raise ValueError(f"expected 3 or 4 tab-separated columns, got {len(cols)}")
    user, resource, tag_field = cols[0], cols[1], cols[2]
    if not user or not resource:
        raise ValueError("empty user or resource field")
    tags = tuple(t for t in (part.strip() for part in tag_field.split(",")) if t)
    order_hint = None
    if len(cols) == 4 and cols[3].strip():
        order_hint = _parse_order_hint(cols[3].strip())
    return RawRecord(user, resource, tags, order_hint)


def _parse_jsonl_line(line: str) -> RawRecord:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    user = obj.get("user")
    resource = obj.get("resource")
    if not isinstance(user, str) or not user:
        raise ValueError("missing or empty 'user'")
    if not isinstance(resource, str) or not resource:
        raise ValueError("missing or empty 'resource'")
    raw_tags = obj.get("tags", [])
    if not isinstance(raw_tags, list) or any(not isinstance(t, str) for t in raw_tags):
        raise ValueError("'tags' must be an array of strings")
    order_hint: Union[int, str, None] = None
    if "seq" in obj and obj["seq"] is not None:
        seq = obj["seq"]
        if isinstance(seq, bool) or not isinstance(seq, (int, str)):
            raise ValueError("'seq' must be a non-negative integer or string")
        if isinstance(seq, int) and seq < 0:
            raise ValueError(f"negative order hint {seq}")
        order_hint = seq
    return RawRecord(user, resource, tuple(raw_tags), order_hint)


def parse_stream(
    stream: Union[IO[bytes], IO[str], Iterable[Union[str, bytes]]],
    format: str = "jsonl",
    log: ParseLog | None = None,
) -> Iterator[RawRecord]:
    """Yield RawRecords from a line-oriented stream in file order.

    Malformed lines are recorded in ``log`` (line number, message) and
    skipped; they never silently vanish.  Blank lines are ignored.  An
    unreadable stream raises the underlying I/O error.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    parse_line = _parse_tsv_line if format == "tsv" else _parse_jsonl_line
    for lineno, raw in enumerate(stream, start=1):
        try:
            line = _decode(raw).rstrip("\n").rstrip("\r")
        except UnicodeDecodeError as exc:
            if log is not None:
                log.add(lineno, f"invalid UTF-8: {exc}")
            continue
        if not line.strip():
            continue
        try:
            yield parse_line(line)
        except (ValueError, json.JSONDecodeError) as exc:
            if log is not None:
                log.add(lineno, str(exc))


def _order_key(record: RawRecord):
    hint = record.order_hint
    # Sorting mixed int/str hints is refused rather than guessed at.
    return ((0, hint, "") if isinstance(hint, int) else (1, 0, hint))


def build_folksonomy(
    records: Iterable[RawRecord],
    auto_tags: frozenset[str] | set[str] = frozenset(),
    malformed_lines: int = 0,
) -> tuple[Folksonomy, IngestReport]:
    """Build a Folksonomy from records, applying auto-tag and empty filtering.

    ``auto_tags`` (normalized strings) are removed from every record before
    the empty check.  Records whose tag list is empty after stripping are
    counted as non-annotated and excluded.  Surviving records are inserted
    in order-hint order when every one of them carries a hint, else in file
    order.  Report totals cover all records; annotated counts cover the
    inserted ones.  Deterministic for a fixed record sequence and tag set.
    """
    auto = {normalize_tag(t) for t in auto_tags}
    total_bookmarks = 0
    total_users: set[str] = set()
    total_resources: set[str] = set()
    stripped = 0
    kept: list[tuple[RawRecord, tuple[str, ...]]] = []

    for record in records:
        total_bookmarks += 1
        total_users.add(record.user)
        total_resources.add(record.resource)
        normalized = [t for t in (normalize_tag(raw) for raw in record.tags) if t]
        remaining = tuple(t for t in normalized if t not in auto)
        stripped += len(normalized) - len(remaining)
        if remaining:
            kept.append((record, remaining))

    if kept and all(rec.order_hint is not None for rec, _ in kept):
        int_hints = sum(isinstance(rec.order_hint, int) for rec, _ in kept)
        if int_hints not in (0, len(kept)):
            raise ValueError("order hints mix integers and timestamp strings")
        kept.sort(key=lambda pair: _order_key(pair[0]))

    folksonomy = Folksonomy()
    for record, tags in kept:
        folksonomy.add_bookmark(record.user, record.resource, tags)

    report = IngestReport(
        users=Availability(folksonomy.n_users, len(total_users)),
        bookmarks=Availability(folksonomy.n_bookmarks, total_bookmarks),
        resources=Availability(folksonomy.n_resources, len(total_resources)),
        distinct_tags=folksonomy.n_tags,
        auto_tags_stripped=stripped,
        malformed_lines=malformed_lines,
    )
    return folksonomy, report


def filter_popular(folksonomy: Folksonomy, min_users: int) -> set[str]:
    """Resources annotated by at least ``min_users`` distinct users."""
    if min_users < 1:
        raise ValueError("min_users must be >= 1")
    users_per_resource: dict[str, set[str]] = {}
    for bookmark in folksonomy.bookmarks:
        users_per_resource.setdefault(bookmark.resource, set()).add(bookmark.user)
    return {r for r, users in users_per_resource.items() if len(users) >= min_users}


def dump_jsonl(folksonomy: Folksonomy, out: IO[str]) -> None:
    """Write all bookmarks as JSONL in insertion order (tags sorted).

    Re-ingesting the output reproduces the folksonomy, including per-resource
    bookmark ordering.
    """
    for bookmark in folksonomy.bookmarks:
        obj = {
            "user": bookmark.user,
            "resource": bookmark.resource,
            "tags": sorted(bookmark.tags),
        }
        out.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
        out.write("\n")
