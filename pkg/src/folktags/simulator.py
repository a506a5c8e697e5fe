"""Synthetic folksonomy generator for studying tag-suggestion policies.

The generator produces a labeled bookmark corpus in which every tag slot is
filled from one of three sources: a suggestion list (policy-dependent), a
small category-specific signal pool, or a global Zipf-distributed
vocabulary.  Three policies are supported:

* ``none``: taggers never see suggestions.
* ``resource_suggest``: taggers are shown the resource's most-used tags so
  far and accept one with probability ``suggestion_acceptance``.
* ``personomy_suggest``: same, but the list holds the tagger's own
  most-used tags across all their bookmarks.

Randomness is split into two independent streams seeded from the config
seed: a structure stream (who bookmarks what, how many tags each bookmark
gets) and a content stream (which tags fill the slots).  Policies never
touch the structure stream, and every tag slot consumes exactly four
content-stream draws regardless of policy or branch, so runs with the same
seed are structurally paired and a ``suggestion_acceptance`` of zero
reproduces the ``none`` corpus byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .classifier import LabeledSet
from .core import Folksonomy
from .ingest import dump_jsonl
from .stats import (
    avg_distinct_tags,
    mean_novelty,
    novelty_curve,
    rank_usage_curve,
    rub_comparison,
    top_decile_coverage,
)

__all__ = ["POLICIES", "SimConfig", "SimSummary", "describe", "export", "generate"]

POLICIES = ("none", "resource_suggest", "personomy_suggest")


@dataclass(frozen=True)
class SimConfig:
    """Generator parameters; defaults give a desk-scale corpus in seconds.

    ``bookmarks_per_user`` and ``tags_per_bookmark`` are means of shifted
    Poisson draws (1 + Poisson(mean - 1)), so every user bookmarks at least
    once and every bookmark carries at least one tag slot.
    ``signal_strength`` is the probability that a non-suggested slot draws
    from the resource's category pool instead of the global vocabulary.
    """

    policy: str = "none"
    n_users: int = 2000
    n_resources: int = 2000
    n_categories: int = 10
    bookmarks_per_user: float = 4.0
    tags_per_bookmark: float = 2.46
    vocab_size: int = 5000
    zipf_exponent: float = 1.0
    suggestion_acceptance: float = 0.5
    n_suggestions: int = 10
    signal_strength: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}; choose from {POLICIES}")
        for name in ("n_users", "n_resources", "n_categories", "vocab_size", "n_suggestions"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.vocab_size < 2 * self.n_categories:
            raise ValueError("vocab_size must be at least twice n_categories")
        for name in ("bookmarks_per_user", "tags_per_bookmark"):
            if getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be >= 1.0")
        for name in ("suggestion_acceptance", "signal_strength"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.zipf_exponent <= 0:
            raise ValueError("zipf_exponent must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class SimSummary:
    """Headline statistics of a generated (or ingested) corpus."""

    avg_tags_per_resource: float
    avg_tags_per_user: float
    avg_tags_per_bookmark: float
    rub_fractions: dict[str, float] = field(repr=False)
    top_decile_bookmark_coverage: float = 0.0
    mean_novelty_ranks_2_50: float | None = None


def _top_tags(counts: dict[str, int], limit: int) -> list[str]:
    """Most-used tags, count descending, ties by tag id ascending."""
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [tag for tag, _ in ranked[:limit]]


def generate(config: SimConfig) -> tuple[Folksonomy, LabeledSet]:
    """Generate a corpus and the category label of every bookmarked resource.

    Users are processed in id order and their bookmarks in draw order, so a
    resource's bookmark sequence reflects simulated time.  Suggestion lists
    are computed from state before the bookmark being filled.  Slots within
    a bookmark may collide; the bookmark stores the distinct tag set.
    """
    rs = np.random.default_rng([config.seed, 0])
    rt = np.random.default_rng([config.seed, 1])
    k = config.n_categories
    pool = config.vocab_size // (2 * k)
    pool_base = config.vocab_size - k * pool

    categories = rs.integers(0, k, size=config.n_resources)
    per_user = 1 + rs.poisson(config.bookmarks_per_user - 1.0, size=config.n_users)
    total = int(per_user.sum())
    resource_choice = rs.integers(0, config.n_resources, size=total)
    slots_per_bookmark = 1 + rs.poisson(config.tags_per_bookmark - 1.0, size=total)

    ranks = np.arange(1, config.vocab_size + 1, dtype=np.float64)
    zipf = ranks ** (-config.zipf_exponent)
    cum = np.cumsum(zipf / zipf.sum())

    folksonomy = Folksonomy()
    resource_counts: dict[int, dict[str, int]] = {}
    user_counts: dict[int, dict[str, int]] = {}

    b = 0
    for u in range(config.n_users):
        user = f"u{u:04d}"
        for _ in range(int(per_user[u])):
            r = int(resource_choice[b])
            slots = int(slots_per_bookmark[b])
            b += 1
            resource = f"r{r:05d}"

            if config.policy == "resource_suggest":
                suggestions = _top_tags(resource_counts.get(r, {}), config.n_suggestions)
            elif config.policy == "personomy_suggest":
                suggestions = _top_tags(user_counts.get(u, {}), config.n_suggestions)
            else:
                suggestions = []

            tags = []
            for _ in range(slots):
                u_accept, u_pick, u_coin, u_tag = rt.random(4)
                if suggestions and u_accept < config.suggestion_acceptance:
                    tag = suggestions[int(u_pick * len(suggestions))]
                elif u_coin < config.signal_strength:
                    tag_id = pool_base + int(categories[r]) * pool + int(u_tag * pool)
                    tag = f"t{tag_id:05d}"
                else:
                    tag_id = min(
                        int(np.searchsorted(cum, u_tag, side="right")),
                        config.vocab_size - 1,
                    )
                    tag = f"t{tag_id:05d}"
                tags.append(tag)

            folksonomy.add_bookmark(user, resource, tags)
            if config.policy != "none":
                for tag in set(tags):
                    if config.policy == "resource_suggest":
                        bucket = resource_counts.setdefault(r, {})
                    else:
                        bucket = user_counts.setdefault(u, {})
                    bucket[tag] = bucket.get(tag, 0) + 1

    labels = {
        f"r{i:05d}": f"c{int(categories[i])}" for i in range(config.n_resources)
    }
    return folksonomy, LabeledSet.from_labels(labels).restrict_to(folksonomy)


def describe(folksonomy: Folksonomy) -> SimSummary:
    """Summarize a corpus for quick policy comparisons."""
    per_resource, per_user, per_bookmark = avg_distinct_tags(folksonomy)
    curve = rank_usage_curve(folksonomy, "bookmarks")
    try:
        novelty = mean_novelty(novelty_curve(folksonomy))
    except ValueError:
        novelty = None
    return SimSummary(
        avg_tags_per_resource=per_resource,
        avg_tags_per_user=per_user,
        avg_tags_per_bookmark=per_bookmark,
        rub_fractions=rub_comparison(folksonomy).fractions,
        top_decile_bookmark_coverage=top_decile_coverage(curve),
        mean_novelty_ranks_2_50=novelty,
    )


def export(
    folksonomy: Folksonomy,
    labels: LabeledSet,
    bookmarks_out: IO[str],
    labels_out: IO[str],
) -> None:
    """Write the corpus as ingestable JSONL plus a resource-category TSV."""
    dump_jsonl(folksonomy, bookmarks_out)
    for resource in sorted(labels.labels):
        labels_out.write(f"{resource}\t{labels.labels[resource]}\n")
