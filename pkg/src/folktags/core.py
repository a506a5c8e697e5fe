"""In-memory folksonomy triple store with incremental tag-frequency indices.

A folksonomy is the aggregate of bookmarks, where each bookmark is one
annotation event: a user attaches a set of tags to a resource.  This module
stores the raw bookmark list together with every derived count the rest of
the toolkit consumes:

* ``rf`` -- in how many distinct resources a tag appears,
* ``uf`` -- how many distinct users have used a tag,
* ``bf`` -- in how many bookmarks a tag appears,
* per-resource and per-user aggregated tag counts (the weighted tag union
  of a resource, and the personomy of a user).

Indices are maintained incrementally on insert and always agree with a
from-scratch recount of the bookmark list.  Construction is single-writer;
once built, a Folksonomy is treated as immutable and may be shared freely
across threads for read-only queries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

__all__ = [
    "Bookmark",
    "Folksonomy",
    "NonAnnotatedBookmarkError",
    "TagFrequencies",
    "normalize_tag",
]


class NonAnnotatedBookmarkError(ValueError):
    """Raised when a bookmark with an empty tag set reaches the store.

    Untagged bookmarks are filtered during ingest and must never be stored.
    """


def normalize_tag(raw: str) -> str:
    """Normalize a raw tag string into a tag id.

    Unicode-aware lowercasing plus surrounding-whitespace trim.  No stemming
    and no synonym merging: tags are otherwise opaque strings.
    """
    return raw.strip().lower()


class TagFrequencies(NamedTuple):
    """The three distinct-entity counts of one tag."""

    rf: int
    uf: int
    bf: int


@dataclass(frozen=True)
class Bookmark:
    """One annotation event: (user, resource, tag set).

    ``seq`` is the 0-based position of this bookmark within its resource's
    bookmark list; (resource, seq) pairs are unique within one Folksonomy.
    """

    user: str
    resource: str
    tags: frozenset[str]
    seq: int


@dataclass
class Folksonomy:
    """Append-only bookmark store with incremental frequency indices.

    Attributes:
        bookmarks: all stored bookmarks, in insertion order.
        rf: tag id -> number of distinct resources containing the tag.
        uf: tag id -> number of distinct users who used the tag.
        bf: tag id -> number of bookmarks containing the tag.
        resource_tags: resource id -> {tag id -> number of that resource's
            bookmarks containing the tag} (the resource's weighted tag union).
        user_tags: user id -> {tag id -> number of that user's bookmarks
            containing the tag} (the user's personomy).
    """

    bookmarks: list[Bookmark] = field(default_factory=list)
    rf: dict[str, int] = field(default_factory=dict)
    uf: dict[str, int] = field(default_factory=dict)
    bf: dict[str, int] = field(default_factory=dict)
    resource_tags: dict[str, dict[str, int]] = field(default_factory=dict)
    user_tags: dict[str, dict[str, int]] = field(default_factory=dict)
    _resource_bookmarks: dict[str, list[int]] = field(default_factory=dict, repr=False)

    @property
    def n_users(self) -> int:
        """Number of distinct users with at least one stored bookmark."""
        return len(self.user_tags)

    @property
    def n_resources(self) -> int:
        """Number of distinct resources with at least one stored bookmark."""
        return len(self.resource_tags)

    @property
    def n_bookmarks(self) -> int:
        return len(self.bookmarks)

    @property
    def n_tags(self) -> int:
        """Number of distinct tags across all stored bookmarks."""
        return len(self.bf)

    def tags(self) -> Iterable[str]:
        return self.bf.keys()

    def add_bookmark(self, user: str, resource: str, tags: Iterable[str]) -> int:
        """Append one bookmark and update all indices incrementally.

        Tags are normalized and deduplicated; tags that normalize to the
        empty string are dropped.  Returns the index of the new bookmark in
        ``bookmarks``.

        Raises:
            NonAnnotatedBookmarkError: if no tags remain after normalization.
            ValueError: if user or resource is empty.
        """
        if not user or not resource:
            raise ValueError("bookmark requires non-empty user and resource ids")
        tag_set = frozenset(t for t in (normalize_tag(raw) for raw in tags) if t)
        if not tag_set:
            raise NonAnnotatedBookmarkError(
                f"non-annotated bookmark ({user!r}, {resource!r}) rejected"
            )

        per_resource = self.resource_tags.setdefault(resource, {})
        per_user = self.user_tags.setdefault(user, {})
        # Sorted iteration keeps index insertion order independent of
        # per-process hash randomization; downstream float reductions sum
        # these dicts in insertion order, so this is what makes repeated
        # runs byte-identical across processes.
        for t in sorted(tag_set):
            self.bf[t] = self.bf.get(t, 0) + 1
            if t not in per_resource:
                self.rf[t] = self.rf.get(t, 0) + 1
            per_resource[t] = per_resource.get(t, 0) + 1
            if t not in per_user:
                self.uf[t] = self.uf.get(t, 0) + 1
            per_user[t] = per_user.get(t, 0) + 1

        order = self._resource_bookmarks.setdefault(resource, [])
        index = len(self.bookmarks)
        self.bookmarks.append(Bookmark(user, resource, tag_set, seq=len(order)))
        order.append(index)
        return index

    def tf(self, tag: str, resource: str) -> int:
        """Number of the resource's bookmarks whose tag set contains ``tag``.

        Unknown tags or resources yield 0.
        """
        per_resource = self.resource_tags.get(resource)
        if per_resource is None:
            return 0
        return per_resource.get(tag, 0)

    def frequencies(self, tag: str) -> TagFrequencies:
        """The (rf, uf, bf) counts of a tag; all zero for unknown tags."""
        return TagFrequencies(
            self.rf.get(tag, 0), self.uf.get(tag, 0), self.bf.get(tag, 0)
        )

    def resource_bookmarks(self, resource: str) -> list[Bookmark]:
        """The resource's bookmarks in seq order (empty for unknown resources)."""
        return [self.bookmarks[i] for i in self._resource_bookmarks.get(resource, [])]
