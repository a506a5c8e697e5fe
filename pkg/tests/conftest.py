"""Shared fixtures, random-corpus strategies, and brute-force oracles.

The oracles recount every index directly from a plain bookmark list so the
incremental bookkeeping in the library can be checked against an
independent implementation.
"""

from __future__ import annotations

import pytest
from hypothesis import strategies as st

from folktags.core import Folksonomy

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance summary")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# --- strategies ---------------------------------------------------------

# Small id/tag spaces force heavy collisions, which is where incremental
# index bugs would hide.
tags_st = st.frozensets(
    st.text(alphabet="abcdefg", min_size=1, max_size=3), min_size=1, max_size=4
)
users_st = st.sampled_from([f"u{i}" for i in range(6)])
resources_st = st.sampled_from([f"r{i}" for i in range(6)])
bookmark_st = st.tuples(users_st, resources_st, tags_st)
bookmarks_st = st.lists(bookmark_st, min_size=1, max_size=30)


def build(bookmarks: list[tuple[str, str, frozenset[str]]]) -> Folksonomy:
    folksonomy = Folksonomy()
    for user, resource, tags in bookmarks:
        folksonomy.add_bookmark(user, resource, tags)
    return folksonomy


# --- brute-force oracles -------------------------------------------------


def brute_frequencies(
    bookmarks: list[tuple[str, str, frozenset[str]]], tag: str
) -> tuple[int, int, int]:
    rf = len({r for _, r, tags in bookmarks if tag in tags})
    uf = len({u for u, _, tags in bookmarks if tag in tags})
    bf = sum(1 for _, _, tags in bookmarks if tag in tags)
    return rf, uf, bf


def brute_tf(
    bookmarks: list[tuple[str, str, frozenset[str]]], tag: str, resource: str
) -> int:
    return sum(1 for _, r, tags in bookmarks if r == resource and tag in tags)


def brute_resource_tags(
    bookmarks: list[tuple[str, str, frozenset[str]]], resource: str
) -> dict[str, int]:
    counts: dict[str, int] = {}
    for _, r, tags in bookmarks:
        if r == resource:
            for tag in tags:
                counts[tag] = counts.get(tag, 0) + 1
    return counts


def all_tags(bookmarks: list[tuple[str, str, frozenset[str]]]) -> set[str]:
    return {tag for _, _, tags in bookmarks for tag in tags}


# --- fixtures ------------------------------------------------------------


@pytest.fixture
def worked_example() -> Folksonomy:
    """Two users annotating one shared resource; small enough to hand-check."""
    folksonomy = Folksonomy()
    folksonomy.add_bookmark("u1", "r1", ["social-tagging", "research", "paper"])
    folksonomy.add_bookmark(
        "u2", "r1", ["classification", "paper", "social-tagging", "social-bookmarking"]
    )
    return folksonomy
