"""Multiclass linear classification of resources from weighted tag vectors.

The trainer minimizes the regularized multiclass hinge objective

    F(W) = lam/2 * ||W||_F^2
         + (1/n) * sum_i [ max_c (w_c . x_i + [c != y_i]) - w_{y_i} . x_i ]

by projected stochastic subgradient descent with the step schedule
eta_t = 1/(lam*(t+1)), iterating the weight matrix as a scalar times a
table so each step costs O(classes * nnz).  A one-vs-rest binary-hinge
variant is available through the config.  Training is deterministic for a
fixed (data, config, seed).

``evaluate`` runs the repeated-subsampling protocol: for each training-set
size it draws ``runs`` seeded samples without replacement, trains one model
per weighting scheme on each sample (schemes share the exact same splits),
scores on all remaining labeled resources, and aggregates a scheme-by-size
accuracy grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from numba import njit

from .core import Folksonomy
from .weighting import Scheme, WeightedVector, vectorize

__all__ = [
    "LCC_EF_MERGE",
    "AccuracyGrid",
    "LabeledSet",
    "LinearModel",
    "TrainConfig",
    "evaluate",
    "load_labels",
    "multiclass_hinge_objective",
    "multiclass_hinge_subgradient",
    "predict",
    "predict_batch",
    "train",
    "write_grid_csv",
    "write_runs_csv",
]

# Category merge applied when loading Library-of-Congress-style labels with
# the E/F merge preset enabled.
LCC_EF_MERGE = {"F": "E"}

LOSSES = ("crammer_singer", "one_vs_rest")
SCHEDULES = ("pegasos",)


@dataclass(frozen=True)
class LabeledSet:
    """Ground-truth category per resource, plus category display names."""

    labels: dict[str, str]
    categories: dict[str, str]

    @classmethod
    def from_labels(
        cls, labels: dict[str, str], names: dict[str, str] | None = None
    ) -> "LabeledSet":
        categories = {c: c for c in sorted(set(labels.values()))}
        if names:
            categories.update({c: names[c] for c in categories if c in names})
        return cls(labels=dict(labels), categories=categories)

    def restrict_to(self, folksonomy: Folksonomy) -> "LabeledSet":
        """Drop labels for resources absent from the folksonomy."""
        kept = {r: c for r, c in self.labels.items() if r in folksonomy.resource_tags}
        return LabeledSet.from_labels(kept, names=self.categories)


def load_labels(
    stream: Iterable[str], merge: dict[str, str] | None = None
) -> LabeledSet:
    """Read a resource-to-category TSV (two columns) into a LabeledSet.

    ``merge`` remaps category ids before storing (e.g. LCC_EF_MERGE folds
    category F into E).  Conflicting duplicate resources are an error.
    """
    labels: dict[str, str] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0] or not cols[1]:
            raise ValueError(f"labels line {lineno}: expected 'resource<TAB>category'")
        resource, category = cols
        if merge:
            category = merge.get(category, category)
        if labels.get(resource, category) != category:
            raise ValueError(f"labels line {lineno}: conflicting category for {resource!r}")
        labels[resource] = category
    return LabeledSet.from_labels(labels)


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of the subgradient trainer.

    When ``lam`` is unset it defaults to 1/(c*n) for n training examples,
    and ``c`` in turn defaults to 0.01*n; both remain overridable.
    """

    c: float | None = None
    lam: float | None = None
    epochs: int = 50
    seed: int = 42
    schedule: str = "pegasos"
    loss: str = "crammer_singer"
    projection: bool = True

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.lam is not None and self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.c is not None and self.c <= 0:
            raise ValueError("c must be positive")

    def resolve_lam(self, n: int) -> float:
        if self.lam is not None:
            return self.lam
        c = self.c if self.c is not None else 0.01 * n
        return 1.0 / (c * n)


@dataclass
class LinearModel:
    """Per-category weight vectors over a tag vocabulary fixed at training."""

    categories: list[str]
    vocab: dict[str, int]
    weights: np.ndarray
    scheme: Scheme
    config: TrainConfig
    lam: float
    objective_history: list[float] = field(default_factory=list)


@njit(cache=True, nogil=True)
def _cs_epoch(V, indptr, indices, data, y, order, lam, s, sqnorm, t, project):
    """One epoch of multiclass-hinge updates on W represented as s*V."""
    n_classes = V.shape[0]
    inv_lam = 1.0 / lam
    raw = np.empty(n_classes)
    for oi in range(order.shape[0]):
        i = order[oi]
        t += 1
        eta = 1.0 / (lam * (t + 1.0))
        start = indptr[i]
        end = indptr[i + 1]
        yi = y[i]
        best = 0
        best_score = -1e300
        for c in range(n_classes):
            acc = 0.0
            for p in range(start, end):
                acc += V[c, indices[p]] * data[p]
            raw[c] = acc
            score = s * acc
            if c != yi:
                score += 1.0
            if score > best_score:
                best_score = score
                best = c
        shrink = 1.0 - eta * lam
        s_new = s * shrink
        sqnorm *= shrink * shrink
        if best != yi:
            xx = 0.0
            for p in range(start, end):
                xx += data[p] * data[p]
            sqnorm += 2.0 * eta * shrink * s * (raw[yi] - raw[best]) + 2.0 * eta * eta * xx
            coef = eta / s_new
            for p in range(start, end):
                j = indices[p]
                V[yi, j] += coef * data[p]
                V[best, j] -= coef * data[p]
        s = s_new
        if project and sqnorm > inv_lam:
            s *= math.sqrt(inv_lam / sqnorm)
            sqnorm = inv_lam
        if abs(s) < 1e-32:
            for c in range(n_classes):
                for j in range(V.shape[1]):
                    V[c, j] *= s
            s = 1.0
    return s, sqnorm, t


@njit(cache=True, nogil=True)
def _binary_epoch(v, indptr, indices, data, ybin, order, lam, s, sqnorm, t, project):
    """One epoch of binary-hinge updates on w represented as s*v."""
    inv_lam = 1.0 / lam
    for oi in range(order.shape[0]):
        i = order[oi]
        t += 1
        eta = 1.0 / (lam * (t + 1.0))
        start = indptr[i]
        end = indptr[i + 1]
        acc = 0.0
        for p in range(start, end):
            acc += v[indices[p]] * data[p]
        shrink = 1.0 - eta * lam
        s_new = s * shrink
        sqnorm *= shrink * shrink
        if ybin[i] * s * acc < 1.0:
            xx = 0.0
            for p in range(start, end):
                xx += data[p] * data[p]
            sqnorm += 2.0 * eta * ybin[i] * shrink * s * acc + eta * eta * xx
            coef = eta * ybin[i] / s_new
            for p in range(start, end):
                v[indices[p]] += coef * data[p]
        s = s_new
        if project and sqnorm > inv_lam:
            s *= math.sqrt(inv_lam / sqnorm)
            sqnorm = inv_lam
        if abs(s) < 1e-32:
            for j in range(v.shape[0]):
                v[j] *= s
            s = 1.0
    return s, sqnorm, t


def multiclass_hinge_objective(W: np.ndarray, X, y: np.ndarray, lam: float) -> float:
    """Regularized multiclass hinge objective at W over (X, y)."""
    n = X.shape[0]
    scores = np.asarray(X @ W.T)
    rows = np.arange(n)
    margins = scores + 1.0
    margins[rows, y] -= 1.0
    loss = margins.max(axis=1) - scores[rows, y]
    return 0.5 * lam * float((W * W).sum()) + float(loss.mean())


def multiclass_hinge_subgradient(W: np.ndarray, X, y: np.ndarray, lam: float) -> np.ndarray:
    """Full-batch subgradient of the multiclass hinge objective at W.

    At differentiable points (unique margin argmax per example) this is the
    gradient and matches central finite differences of the objective.
    """
    n, k = X.shape[0], W.shape[0]
    scores = np.asarray(X @ W.T)
    rows = np.arange(n)
    margins = scores + 1.0
    margins[rows, y] -= 1.0
    best = margins.argmax(axis=1)
    pull = sp.coo_matrix(
        (np.ones(n), (rows, best)), shape=(n, k)
    ) - sp.coo_matrix((np.ones(n), (rows, y)), shape=(n, k))
    return lam * W + np.asarray((pull.T @ X)) / n


def _binary_objective_sum(W: np.ndarray, X, y: np.ndarray, lam: float) -> float:
    """Sum over categories of the one-vs-rest binary hinge objectives."""
    scores = np.asarray(X @ W.T)
    Y = np.full(scores.shape, -1.0)
    Y[np.arange(X.shape[0]), y] = 1.0
    hinge = np.maximum(0.0, 1.0 - Y * scores)
    return 0.5 * lam * float((W * W).sum()) + float(hinge.sum(axis=1).mean())


def _build_csr(
    entry_dicts: Sequence[dict[str, float]], vocab: dict[str, int]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR arrays for a list of sparse tag->weight rows, columns by vocab.

    Tags missing from the vocabulary are skipped.  Row indices ascend
    because vocabulary columns follow sorted tag order.
    """
    indptr = np.zeros(len(entry_dicts) + 1, dtype=np.int64)
    cols: list[int] = []
    vals: list[float] = []
    for i, entries in enumerate(entry_dicts):
        row = sorted(
            (vocab[tag], weight) for tag, weight in entries.items() if tag in vocab
        )
        cols.extend(c for c, _ in row)
        vals.extend(v for _, v in row)
        indptr[i + 1] = len(cols)
    return indptr, np.asarray(cols, dtype=np.int64), np.asarray(vals, dtype=np.float64)


def _fit_arrays(
    indptr: np.ndarray,
    indices: np.ndarray,
    data: np.ndarray,
    y: np.ndarray,
    train_rows: np.ndarray,
    n_classes: int,
    n_features: int,
    config: TrainConfig,
) -> tuple[np.ndarray, float, list[float]]:
    """Run the configured trainer over the given CSR rows.

    ``train_rows`` selects (and orders) the rows used for training; epoch
    permutations are composed with it so training over a row subset of a
    larger matrix is float-identical to training on an extracted copy.
    """
    n = train_rows.shape[0]
    lam = config.resolve_lam(n)
    X_train = sp.csr_matrix(
        (data, indices, indptr), shape=(len(indptr) - 1, n_features)
    )[train_rows]
    y_train = y[train_rows]

    if config.loss == "crammer_singer":
        V = np.zeros((n_classes, n_features))
        s, sqnorm, t = 1.0, 0.0, np.int64(0)
        rng = np.random.default_rng(config.seed)
        history = [multiclass_hinge_objective(np.zeros((n_classes, n_features)), X_train, y_train, lam)]
        for _ in range(config.epochs):
            order = train_rows[rng.permutation(n)]
            s, sqnorm, t = _cs_epoch(
                V, indptr, indices, data, y, order, lam, s, sqnorm, t, config.projection
            )
            history.append(multiclass_hinge_objective(s * V, X_train, y_train, lam))
        return s * V, lam, history

    # one-vs-rest: one binary hinge problem per category, epoch-synchronous
    # so the summed objective can be recorded per epoch.
    V = np.zeros((n_classes, n_features))
    state = [(1.0, 0.0, np.int64(0)) for _ in range(n_classes)]
    rngs = [np.random.default_rng([config.seed, c]) for c in range(n_classes)]
    ybin_all = np.full((n_classes, y.shape[0]), -1.0)
    for c in range(n_classes):
        ybin_all[c, y == c] = 1.0

    def scaled() -> np.ndarray:
        return V * np.array([s for s, _, _ in state])[:, None]

    history = [_binary_objective_sum(scaled(), X_train, y_train, lam)]
    for _ in range(config.epochs):
        for c in range(n_classes):
            order = train_rows[rngs[c].permutation(n)]
            s, sqnorm, t = state[c]
            s, sqnorm, t = _binary_epoch(
                V[c], indptr, indices, data, ybin_all[c], order, lam, s, sqnorm, t,
                config.projection,
            )
            state[c] = (s, sqnorm, t)
        history.append(_binary_objective_sum(scaled(), X_train, y_train, lam))
    return scaled(), lam, history


def train(
    vectors: Sequence[WeightedVector],
    labels: LabeledSet,
    config: TrainConfig | None = None,
) -> LinearModel:
    """Train a linear model on weighted vectors with known categories.

    All vectors must share one scheme and be labeled; at least two distinct
    categories must be present.
    """
    config = config or TrainConfig()
    if not vectors:
        raise ValueError("empty training set")
    schemes = {v.scheme for v in vectors}
    if len(schemes) > 1:
        raise ValueError(f"training vectors mix schemes: {sorted(s.value for s in schemes)}")
    missing = [v.resource for v in vectors if v.resource not in labels.labels]
    if missing:
        raise ValueError(f"unlabeled training resources: {missing[:3]}...")

    categories = sorted({labels.labels[v.resource] for v in vectors})
    if len(categories) < 2:
        raise ValueError("training set must contain at least two categories")
    cat_index = {c: i for i, c in enumerate(categories)}

    tags = sorted({tag for v in vectors for tag in v.entries})
    vocab = {tag: j for j, tag in enumerate(tags)}
    indptr, indices, data = _build_csr([v.entries for v in vectors], vocab)
    y = np.asarray([cat_index[labels.labels[v.resource]] for v in vectors], dtype=np.int64)

    weights, lam, history = _fit_arrays(
        indptr, indices, data, y,
        train_rows=np.arange(len(vectors), dtype=np.int64),
        n_classes=len(categories), n_features=len(tags), config=config,
    )
    return LinearModel(
        categories=categories, vocab=vocab, weights=weights,
        scheme=next(iter(schemes)), config=config, lam=lam,
        objective_history=history,
    )


def predict(model: LinearModel, vector: WeightedVector) -> str:
    """Predicted category: argmax of per-category scores, ties by category id.

    Tags outside the training vocabulary contribute nothing.
    """
    cols = []
    vals = []
    for tag, weight in sorted(vector.entries.items()):
        j = model.vocab.get(tag)
        if j is not None:
            cols.append(j)
            vals.append(weight)
    if cols:
        scores = model.weights[:, cols] @ np.asarray(vals)
    else:
        scores = np.zeros(len(model.categories))
    return model.categories[int(np.argmax(scores))]


def predict_batch(model: LinearModel, vectors: Sequence[WeightedVector]) -> list[str]:
    """Predict many vectors at once (same decision rule as ``predict``)."""
    indptr, indices, data = _build_csr([v.entries for v in vectors], model.vocab)
    X = sp.csr_matrix((data, indices, indptr), shape=(len(vectors), len(model.vocab)))
    scores = np.asarray(X @ model.weights.T)
    return [model.categories[i] for i in scores.argmax(axis=1)]


@dataclass(frozen=True)
class AccuracyGrid:
    """Scheme-by-training-size accuracy means with per-run values."""

    schemes: tuple[Scheme, ...]
    sizes: tuple[int, ...]
    runs: int
    seed: int
    values: dict[tuple[Scheme, int], tuple[float, ...]]

    def mean(self, scheme: Scheme, size: int) -> float:
        cell = self.values[(scheme, size)]
        return sum(cell) / len(cell)

    def scheme_mean(self, scheme: Scheme) -> float:
        """Grand mean of a scheme's accuracy over every (size, run) cell."""
        cells = [v for (s, _), vals in self.values.items() if s is scheme for v in vals]
        return sum(cells) / len(cells)


def _evaluate_cell(
    size: int,
    run: int,
    seed: int,
    labeled: list[str],
    y_all: np.ndarray,
    matrices: dict[Scheme, tuple[np.ndarray, np.ndarray, np.ndarray]],
    n_features: dict[Scheme, int],
    config: TrainConfig,
) -> dict[Scheme, float]:
    rng = np.random.default_rng([seed, size, run])
    train_rows = rng.choice(len(labeled), size=size, replace=False).astype(np.int64)
    train_mask = np.zeros(len(labeled), dtype=bool)
    train_mask[train_rows] = True
    test_rows = np.flatnonzero(~train_mask).astype(np.int64)

    # Categories absent from this sample must not be predictable, exactly as
    # if the model had been trained on extracted vectors.
    present = sorted(set(y_all[train_rows].tolist()))
    remap = {g: l for l, g in enumerate(present)}
    y_local = np.asarray([remap.get(g, -1) for g in y_all], dtype=np.int64)

    accuracies: dict[Scheme, float] = {}
    for scheme, (indptr, indices, data) in matrices.items():
        weights, _, _ = _fit_arrays(
            indptr, indices, data, y_local, train_rows,
            n_classes=len(present), n_features=n_features[scheme], config=config,
        )
        X = sp.csr_matrix(
            (data, indices, indptr), shape=(len(labeled), n_features[scheme])
        )[test_rows]
        predicted = np.asarray(X @ weights.T).argmax(axis=1)
        accuracies[scheme] = float((predicted == y_local[test_rows]).mean())
    return accuracies


def evaluate(
    folksonomy: Folksonomy,
    labels: LabeledSet,
    schemes: Sequence[Scheme],
    sizes: Sequence[int],
    runs: int = 6,
    seed: int = 0,
    config: TrainConfig | None = None,
    normalize: bool = True,
    jobs: int = 1,
) -> AccuracyGrid:
    """Repeated-subsampling accuracy grid over schemes and training sizes.

    For each (size, run) a training sample is drawn without replacement,
    seeded by (seed, size, run); the remaining labeled resources form the
    test set.  All schemes are evaluated on identical splits.  Results are
    independent of ``jobs``.
    """
    config = config or TrainConfig()
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    if not schemes:
        raise ValueError("at least one scheme required")

    missing = [r for r in labels.labels if r not in folksonomy.resource_tags]
    if missing:
        raise ValueError(
            f"{len(missing)} labeled resources absent from the folksonomy "
            f"(e.g. {missing[:3]}); restrict the label set first"
        )
    labeled = sorted(labels.labels)
    if max(sizes) >= len(labeled):
        raise ValueError(
            f"largest training size {max(sizes)} must be smaller than the "
            f"number of labeled resources ({len(labeled)})"
        )

    categories = sorted(labels.categories)
    cat_index = {c: i for i, c in enumerate(categories)}
    y_all = np.asarray([cat_index[labels.labels[r]] for r in labeled], dtype=np.int64)

    matrices: dict[Scheme, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    n_features: dict[Scheme, int] = {}
    for scheme in schemes:
        entry_dicts = [
            vectorize(folksonomy, r, scheme, normalize=normalize).entries for r in labeled
        ]
        tags = sorted({tag for entries in entry_dicts for tag in entries})
        vocab = {tag: j for j, tag in enumerate(tags)}
        matrices[scheme] = _build_csr(entry_dicts, vocab)
        n_features[scheme] = len(tags)

    cells = [(size, run) for size in sizes for run in range(runs)]

    def run_cell(cell: tuple[int, int]) -> dict[Scheme, float]:
        size, run = cell
        return _evaluate_cell(
            size, run, seed, labeled, y_all, matrices, n_features, config
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(cell) for cell in cells]

    values: dict[tuple[Scheme, int], tuple[float, ...]] = {}
    for scheme in schemes:
        for size in sizes:
            per_run = tuple(
                results[i][scheme]
                for i, (s, _) in enumerate(cells)
                if s == size
            )
            values[(scheme, size)] = per_run
    return AccuracyGrid(
        schemes=tuple(schemes), sizes=tuple(sizes), runs=runs, seed=seed, values=values
    )


def write_grid_csv(grid: AccuracyGrid, out: IO[str]) -> None:
    """Scheme-by-size grid of mean accuracies."""
    out.write("scheme," + ",".join(str(s) for s in grid.sizes) + "\n")
    for scheme in grid.schemes:
        means = ",".join(f"{grid.mean(scheme, size):.6f}" for size in grid.sizes)
        out.write(f"{scheme.value},{means}\n")


def write_runs_csv(grid: AccuracyGrid, out: IO[str]) -> None:
    """Long-format per-run accuracies."""
    out.write("scheme,size,run,accuracy\n")
    for scheme in grid.schemes:
        for size in grid.sizes:
            for run, accuracy in enumerate(grid.values[(scheme, size)]):
                out.write(f"{scheme.value},{size},{run},{accuracy:.6f}\n")
