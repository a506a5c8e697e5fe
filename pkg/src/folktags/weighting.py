"""Sparse resource vectors under tag-frequency weighting schemes.

The baseline scheme TF weights a tag by the number of the resource's
bookmarks containing it.  The three inverse-frequency variants additionally
multiply by how rare the tag is across the whole collection, measured along
one of the three entity dimensions a tagging system offers:

* TF-IRF -- inverse of the number of distinct resources containing the tag,
* TF-IUF -- inverse of the number of distinct users who used the tag,
* TF-IBF -- inverse of the number of bookmarks containing the tag.

The inverse factor is ln(total/containing): highest for tags confined to a
few entities and exactly zero for a tag present in every entity, so
ubiquitous tags drop out of the vector entirely.  Frequencies are taken
over the entire folksonomy, not only labeled resources.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import IO, Iterable

from .core import Folksonomy

__all__ = [
    "Scheme",
    "WeightedVector",
    "dump_vectors",
    "inverse_frequency",
    "vectorize",
]


class Scheme(enum.Enum):
    """Exhaustive set of supported weighting schemes."""

    TF = "tf"
    TF_IRF = "tf-irf"
    TF_IUF = "tf-iuf"
    TF_IBF = "tf-ibf"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class WeightedVector:
    """Sparse tag -> weight representation of one resource.

    Zero-weight entries are never stored; with L2 normalization enabled the
    Euclidean norm of a non-empty vector is 1.
    """

    resource: str
    entries: dict[str, float]
    scheme: Scheme

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))


def inverse_frequency(n_tag: int, n_total: int) -> float:
    """ln(n_total / n_tag): zero when the tag occurs in every entity.

    Strictly decreasing in n_tag for a fixed n_total.  Raises ValueError
    outside the domain 1 <= n_tag <= n_total.
    """
    if n_tag < 1 or n_tag > n_total:
        raise ValueError(f"n_tag must satisfy 1 <= n_tag <= n_total, got {n_tag}/{n_total}")
    return math.log(n_total / n_tag)


def vectorize(
    folksonomy: Folksonomy,
    resource: str,
    scheme: Scheme,
    normalize: bool = True,
) -> WeightedVector:
    """Weighted tag vector of one resource under the chosen scheme.

    Raises KeyError for resources absent from the folksonomy.  Tags whose
    weight is zero (present in every entity of the scheme's dimension) are
    dropped; the remaining entries are L2-normalized unless disabled.
    """
    tag_counts = folksonomy.resource_tags.get(resource)
    if tag_counts is None:
        raise KeyError(f"unknown resource {resource!r}")

    if scheme is Scheme.TF:
        entries = {tag: float(tf) for tag, tf in tag_counts.items()}
    else:
        if scheme is Scheme.TF_IRF:
            counts, total = folksonomy.rf, folksonomy.n_resources
        elif scheme is Scheme.TF_IUF:
            counts, total = folksonomy.uf, folksonomy.n_users
        else:
            counts, total = folksonomy.bf, folksonomy.n_bookmarks
        entries = {}
        for tag, tf in tag_counts.items():
            weight = tf * inverse_frequency(counts[tag], total)
            if weight > 0.0:
                entries[tag] = weight

    if normalize and entries:
        norm = math.sqrt(sum(w * w for w in entries.values()))
        entries = {tag: w / norm for tag, w in entries.items()}
    return WeightedVector(resource=resource, entries=entries, scheme=scheme)


def dump_vectors(vectors: Iterable[WeightedVector], out: IO[str]) -> None:
    """One line per resource: resource id, then tag:weight pairs by tag id."""
    for vector in vectors:
        pairs = " ".join(
            f"{tag}:{weight:.6f}" for tag, weight in sorted(vector.entries.items())
        )
        out.write(f"{vector.resource} {pairs}".rstrip())
        out.write("\n")
