"""Parsing, filtering, reporting, and round-trip behavior of ingestion."""

from __future__ import annotations

import io
import json

import pytest
from conftest import bookmarks_st, build
from hypothesis import given

from folktags.ingest import (
    GOODREADS_AUTO_TAGS,
    ParseLog,
    RawRecord,
    build_folksonomy,
    dump_jsonl,
    filter_popular,
    parse_stream,
)


def parse_all(lines, fmt):
    log = ParseLog()
    records = list(parse_stream(lines, format=fmt, log=log))
    return records, log


# --- TSV parsing ----------------------------------------------------------


def test_tsv_basic_line():
    records, log = parse_all(["u1\tr1\ta,b,c\t"], "tsv")
    assert records == [RawRecord("u1", "r1", ("a", "b", "c"), None)]
    assert log.n_malformed == 0


def test_tsv_untagged_line():
    records, _ = parse_all(["u1\tr1\t\t"], "tsv")
    assert records == [RawRecord("u1", "r1", (), None)]


def test_tsv_order_hints():
    records, _ = parse_all(["u1\tr1\ta\t7", "u2\tr2\tb\t2024-05-01T10:00:00"], "tsv")
    assert records[0].order_hint == 7
    assert records[1].order_hint == "2024-05-01T10:00:00"


def test_tsv_malformed_lines_counted_with_numbers():
    lines = ["u1\tr1\ta", "no tabs here", "\tr1\ta", "u1\tr1\ta\t-1"]
    records, log = parse_all(lines, "tsv")
    assert len(records) == 1
    assert [lineno for lineno, _ in log.malformed] == [2, 3, 4]


def test_three_line_file_one_malformed():
    lines = ["u1\tr1\ta", "garbage", "u2\tr2\tb"]
    records, log = parse_all(lines, "tsv")
    assert len(records) == 2
    assert log.n_malformed == 1


# --- JSONL parsing --------------------------------------------------------


def test_jsonl_basic():
    line = json.dumps({"user": "u1", "resource": "r1", "tags": ["a", "b"]})
    records, log = parse_all([line], "jsonl")
    assert records == [RawRecord("u1", "r1", ("a", "b"), None)]
    assert log.n_malformed == 0


def test_jsonl_missing_tags_is_untagged():
    records, _ = parse_all([json.dumps({"user": "u1", "resource": "r1"})], "jsonl")
    assert records[0].tags == ()


def test_jsonl_malformed_variants():
    lines = [
        "not json",
        json.dumps({"resource": "r1", "tags": []}),
        json.dumps({"user": "", "resource": "r1", "tags": []}),
        json.dumps({"user": "u1", "resource": "r1", "tags": "a"}),
        json.dumps({"user": "u1", "resource": "r1", "tags": [1]}),
        json.dumps({"user": "u1", "resource": "r1", "tags": [], "seq": -1}),
        json.dumps({"user": "u1", "resource": "r1", "tags": [], "seq": True}),
    ]
    records, log = parse_all(lines, "jsonl")
    assert records == []
    assert len(log.malformed) == len(lines)


def test_blank_lines_skipped():
    records, log = parse_all(["", "  ", "u1\tr1\ta"], "tsv")
    assert len(records) == 1
    assert log.n_malformed == 0


def test_bytes_lines_accepted():
    records, _ = parse_all([b"u1\tr1\ta,b"], "tsv")
    assert records[0].tags == ("a", "b")


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        list(parse_stream(["x"], format="csv"))


# --- build_folksonomy -----------------------------------------------------


def test_auto_tag_stripping():
    records = [RawRecord("u1", "r1", ("to-read", "fantasy"), None)]
    f, report = build_folksonomy(records, auto_tags=GOODREADS_AUTO_TAGS)
    assert f.resource_tags["r1"] == {"fantasy": 1}
    assert report.auto_tags_stripped == 1


def test_only_auto_tags_record_excluded():
    records = [
        RawRecord("u1", "r1", ("to-read",), None),
        RawRecord("u2", "r2", ("fantasy",), None),
    ]
    f, report = build_folksonomy(records, auto_tags=GOODREADS_AUTO_TAGS)
    assert f.n_bookmarks == 1
    assert report.bookmarks.annotated == 1
    assert report.bookmarks.total == 2
    assert "to-read" not in f.tags()


def test_report_counts_hand_built_file():
    records = [RawRecord(f"u{i}", f"r{i % 3}", ("a",) if i < 87 else (), None) for i in range(100)]
    f, report = build_folksonomy(records)
    assert report.bookmarks.annotated == 87
    assert report.bookmarks.total == 100
    assert f"{report.bookmarks.percent:.2f}" == "87.00"
    assert report.bookmarks.annotated + (100 - 87) == report.bookmarks.total


def test_empty_input_reports_zero_percent():
    _, report = build_folksonomy([])
    assert report.users.percent == 0.0
    assert report.bookmarks.total == 0


def test_totals_include_unannotated_entities():
    records = [
        RawRecord("u1", "r1", ("a",), None),
        RawRecord("u2", "r2", (), None),
    ]
    f, report = build_folksonomy(records)
    assert report.users.total == 2 and report.users.annotated == 1
    assert report.resources.total == 2 and report.resources.annotated == 1
    assert f.n_users == 1 and f.n_resources == 1


def test_order_hint_sorting():
    records = [
        RawRecord("u1", "r1", ("late",), 5),
        RawRecord("u2", "r1", ("early",), 1),
    ]
    f, _ = build_folksonomy(records)
    assert [b.user for b in f.resource_bookmarks("r1")] == ["u2", "u1"]


def test_order_hint_string_sorting():
    records = [
        RawRecord("u1", "r1", ("late",), "2024-06-01"),
        RawRecord("u2", "r1", ("early",), "2024-01-01"),
    ]
    f, _ = build_folksonomy(records)
    assert [b.user for b in f.resource_bookmarks("r1")] == ["u2", "u1"]


def test_partial_order_hints_keep_file_order():
    records = [
        RawRecord("u1", "r1", ("first",), 5),
        RawRecord("u2", "r1", ("second",), None),
    ]
    f, _ = build_folksonomy(records)
    assert [b.user for b in f.resource_bookmarks("r1")] == ["u1", "u2"]


def test_mixed_hint_types_rejected():
    records = [
        RawRecord("u1", "r1", ("a",), 5),
        RawRecord("u2", "r1", ("b",), "2024-01-01"),
    ]
    with pytest.raises(ValueError):
        build_folksonomy(records)


def test_order_hint_sort_is_stable():
    records = [
        RawRecord("u1", "r1", ("a",), 1),
        RawRecord("u2", "r1", ("b",), 1),
        RawRecord("u3", "r1", ("c",), 1),
    ]
    f, _ = build_folksonomy(records)
    assert [b.user for b in f.resource_bookmarks("r1")] == ["u1", "u2", "u3"]


# --- filter_popular -------------------------------------------------------


def test_filter_popular_threshold():
    records = [RawRecord(f"u{i}", "big", ("a",), None) for i in range(100)]
    records.append(RawRecord("u0", "small", ("a",), None))
    f, _ = build_folksonomy(records)
    assert filter_popular(f, 100) == {"big"}
    assert filter_popular(f, 2) == {"big"}


def test_filter_popular_counts_distinct_users():
    records = [RawRecord("u1", "r1", ("a",), None)] * 3
    f, _ = build_folksonomy(records)
    assert filter_popular(f, 2) == set()


def test_filter_popular_validates_threshold(worked_example):
    with pytest.raises(ValueError):
        filter_popular(worked_example, 0)


@given(bookmarks_st)
def test_filter_popular_matches_brute_force(bookmarks):
    f = build(bookmarks)
    users_per_resource: dict[str, set[str]] = {}
    for user, resource, _ in bookmarks:
        users_per_resource.setdefault(resource, set()).add(user)
    for threshold in (1, 2, 3):
        expected = {r for r, users in users_per_resource.items() if len(users) >= threshold}
        assert filter_popular(f, threshold) == expected


# --- round trip -----------------------------------------------------------


@given(bookmarks_st)
def test_dump_parse_round_trip(bookmarks):
    f = build(bookmarks)
    out = io.StringIO()
    dump_jsonl(f, out)
    records, log = parse_all(out.getvalue().splitlines(), "jsonl")
    assert log.n_malformed == 0
    g, _ = build_folksonomy(records)
    assert g.n_bookmarks == f.n_bookmarks
    assert {t: g.frequencies(t) for t in g.tags()} == {
        t: f.frequencies(t) for t in f.tags()
    }
    assert g.resource_tags == f.resource_tags
