"""Folksonomy analytics: ingest bookmark corpora, study their tag
distributions, weight tags for resource classification, and simulate
tag-suggestion policies.
"""

from .classifier import (
    AccuracyGrid,
    LabeledSet,
    LinearModel,
    TrainConfig,
    evaluate,
    load_labels,
    predict,
    predict_batch,
    train,
)
from .core import (
    Bookmark,
    Folksonomy,
    NonAnnotatedBookmarkError,
    TagFrequencies,
    normalize_tag,
)
from .ingest import IngestReport, build_folksonomy, filter_popular, parse_stream
from .simulator import SimConfig, SimSummary, describe, generate
from .stats import (
    avg_distinct_tags,
    mean_novelty,
    novelty_curve,
    rank_usage_curve,
    rub_comparison,
    top_decile_coverage,
)
from .weighting import Scheme, WeightedVector, inverse_frequency, vectorize

__version__ = "0.1.0"

__all__ = [
    "AccuracyGrid",
    "Bookmark",
    "Folksonomy",
    "IngestReport",
    "LabeledSet",
    "LinearModel",
    "NonAnnotatedBookmarkError",
    "Scheme",
    "SimConfig",
    "SimSummary",
    "TagFrequencies",
    "TrainConfig",
    "WeightedVector",
    "avg_distinct_tags",
    "build_folksonomy",
    "describe",
    "evaluate",
    "filter_popular",
    "generate",
    "inverse_frequency",
    "load_labels",
    "mean_novelty",
    "normalize_tag",
    "novelty_curve",
    "parse_stream",
    "predict",
    "predict_batch",
    "rank_usage_curve",
    "rub_comparison",
    "top_decile_coverage",
    "train",
    "vectorize",
]
