"""Prototype classifier over chaotic-neuron features.

Training averages the flattened per-instance feature matrices of each
class into one mean representation vector; prediction assigns the class
whose prototype has the highest cosine similarity with the test
instance's features. Includes macro-F1 evaluation and the initial-activity
(q) grid search with five-fold cross validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chaosfex import (
    NeurochaosConfig,
    normalize_instances,
    normalize_series,
    transform_instances,
)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between u and v; 0 if either has zero norm."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.size} vs {v.size}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


@dataclass
class ChaosNetModel:
    """Per-class mean representation vectors plus the transform that built them.

    normalization None means each series is rescaled by its own min/max
    (the stock convention); a (lo, hi) pair applies those fixed bounds to
    every series.
    """

    prototypes: np.ndarray  # (n_classes, 4 * instance_length)
    config: NeurochaosConfig
    normalization: tuple | None = None

    def __post_init__(self):
        self.prototypes = np.asarray(self.prototypes, dtype=float)
        if self.prototypes.ndim != 2 or self.prototypes.shape[0] < 2:
            raise ValueError("model needs >= 2 prototype vectors of equal length")
        if not np.all(np.isfinite(self.prototypes)):
            raise ValueError("prototype vectors must be finite")

    @property
    def n_classes(self) -> int:
        return self.prototypes.shape[0]

    @property
    def instance_length(self) -> int:
        return self.prototypes.shape[1] // 4


@dataclass
class EvaluationReport:
    macro_f1: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    confusion: np.ndarray  # confusion[true, predicted]


def _confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray, n_classes: int) -> np.ndarray:
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (y_true, y_pred), 1)
    return conf


def classification_report(
    y_true: np.ndarray, y_pred: np.ndarray, n_classes: int
) -> EvaluationReport:
    """Per-class precision/recall/F1 and macro F1, with 0/0 ratios mapped to 0."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    conf = _confusion_matrix(y_true, y_pred, n_classes)
    tp = np.diag(conf).astype(float)
    pred_tot = conf.sum(axis=0).astype(float)
    true_tot = conf.sum(axis=1).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(pred_tot > 0, tp / pred_tot, 0.0)
        recall = np.where(true_tot > 0, tp / true_tot, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)
    return EvaluationReport(float(f1.mean()), precision, recall, f1, conf)


def macro_f1_score(y_true: np.ndarray, y_pred: np.ndarray, n_classes: int) -> float:
    return classification_report(y_true, y_pred, n_classes).macro_f1


def _flat_features(instances: np.ndarray, config: NeurochaosConfig) -> np.ndarray:
    features, _ = transform_instances(instances, config)
    return features.reshape(features.shape[0], -1)


def _apply_normalization(x: np.ndarray, normalization: tuple | None) -> np.ndarray:
    if normalization is None:
        return normalize_instances(x)
    return normalize_series(x, *normalization)


def fit(
    instances: np.ndarray,
    labels: np.ndarray,
    config: NeurochaosConfig,
    normalization: tuple | None = None,
) -> ChaosNetModel:
    """Build per-class prototypes from labeled instances.

    Instances are raw series of equal length; labels must be 0..Z-1 with
    every class populated. By default each series is min-max rescaled by
    its own range before the neuron; pass (lo, hi) to apply fixed bounds
    instead.
    """
    x = np.asarray(instances, dtype=float)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ValueError("expected (m, n) instances with one label per row")
    n_classes = int(y.max()) + 1 if y.size else 0
    if n_classes < 2:
        raise ValueError("need at least two classes")
    counts = np.bincount(y, minlength=n_classes)
    if (counts == 0).any():
        raise ValueError(f"empty class(es): {np.flatnonzero(counts == 0).tolist()}")
    if normalization is not None:
        normalization = (float(normalization[0]), float(normalization[1]))
    flat = _flat_features(_apply_normalization(x, normalization), config)
    prototypes = np.empty((n_classes, flat.shape[1]))
    for k in range(n_classes):
        prototypes[k] = flat[y == k].mean(axis=0)
    return ChaosNetModel(prototypes, config, normalization)


def _predict_flat(model: ChaosNetModel, flat: np.ndarray) -> np.ndarray:
    # Cosine similarity against each prototype; zero-norm rows or prototypes
    # contribute similarity 0. Ties resolve to the smallest class index via
    # argmax's first-occurrence rule.
    pnorm = np.linalg.norm(model.prototypes, axis=1)
    vnorm = np.linalg.norm(flat, axis=1)
    sims = flat @ model.prototypes.T
    denom = np.outer(vnorm, pnorm)
    sims = np.divide(sims, denom, out=np.zeros_like(sims), where=denom > 0)
    return sims.argmax(axis=1)


def predict_batch(model: ChaosNetModel, instances: np.ndarray) -> np.ndarray:
    """Predicted class labels for (m, n) raw instances."""
    x = np.asarray(instances, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.instance_length:
        raise ValueError(
            f"instance length {x.shape[-1]} does not match model length "
            f"{model.instance_length}"
        )
    flat = _flat_features(_apply_normalization(x, model.normalization), model.config)
    return _predict_flat(model, flat)


def predict(model: ChaosNetModel, instance: np.ndarray) -> int:
    """Predicted class label for one raw instance."""
    x = np.asarray(instance, dtype=float).ravel()
    return int(predict_batch(model, x[None, :])[0])


def evaluate(model: ChaosNetModel, instances: np.ndarray, labels: np.ndarray) -> EvaluationReport:
    """Score the model on labeled test instances."""
    y = np.asarray(labels, dtype=np.int64)
    if y.size == 0:
        raise ValueError("empty test set")
    preds = predict_batch(model, instances)
    return classification_report(y, preds, model.n_classes)


@dataclass
class QSearchResult:
    """Grid-search outcome: every maximizer is kept, the smallest is the default."""

    best_q: float
    best_score: float
    maximizers: np.ndarray
    scores: list = field(default_factory=list)  # (q, mean CV macro F1) per grid point


def default_q_grid() -> np.ndarray:
    return np.round(np.arange(0.01, 0.985, 0.01), 2)


def stratified_folds(labels: np.ndarray, n_folds: int, seed: int) -> list[np.ndarray]:
    """Contiguous per-class chunks of a seeded shuffle, merged across classes."""
    y = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(n_folds)]
    for k in np.unique(y):
        idx = np.flatnonzero(y == k)
        if idx.size < n_folds:
            raise ValueError(
                f"class {k} has {idx.size} instances, fewer than {n_folds} folds"
            )
        rng.shuffle(idx)
        for f, chunk in enumerate(np.array_split(idx, n_folds)):
            folds[f].append(chunk)
    return [np.sort(np.concatenate(parts)) for parts in folds]


def tune_q(
    instances: np.ndarray,
    labels: np.ndarray,
    grid: np.ndarray | None = None,
    b: float = 0.499,
    epsilon: float = 0.171,
    max_iter: int = 10000,
    n_folds: int = 5,
    seed: int = 0,
) -> QSearchResult:
    """Five-fold cross-validated grid search over the initial activity q.

    Folds are fixed across the grid, and normalization (per-series min-max)
    does not depend on q, so each instance is rescaled once and transformed
    once per grid point.
    """
    if grid is None:
        grid = default_q_grid()
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("q grid is empty")
    x = np.asarray(instances, dtype=float)
    y = np.asarray(labels, dtype=np.int64)
    n_classes = int(y.max()) + 1
    folds = stratified_folds(y, n_folds, seed)
    xn = normalize_instances(x)

    scores = []
    for q in grid:
        config = NeurochaosConfig(q=float(q), b=b, epsilon=epsilon, max_iter=max_iter)
        flat = _flat_features(xn, config)
        fold_scores = []
        for f in range(n_folds):
            val_idx = folds[f]
            train_mask = np.ones(y.size, dtype=bool)
            train_mask[val_idx] = False
            prototypes = np.empty((n_classes, flat.shape[1]))
            for k in range(n_classes):
                rows = flat[train_mask & (y == k)]
                if rows.shape[0] == 0:
                    raise ValueError(f"fold {f} left class {k} empty")
                prototypes[k] = rows.mean(axis=0)
            model = ChaosNetModel(prototypes, config)
            preds = _predict_flat(model, flat[val_idx])
            fold_scores.append(macro_f1_score(y[val_idx], preds, n_classes))
        scores.append((float(q), float(np.mean(fold_scores))))

    values = np.array([s for _, s in scores])
    best_score = float(values.max())
    maximizers = np.array([q for (q, s) in scores if np.isclose(s, best_score, atol=1e-12)])
    return QSearchResult(float(maximizers.min()), best_score, maximizers, scores)


def save_model(model: ChaosNetModel, path) -> None:
    """Persist prototypes plus the transform header as a flat npz blob.

    Per-series normalization is encoded as a NaN bounds pair.
    """
    bounds = model.normalization if model.normalization else (np.nan, np.nan)
    np.savez(
        path,
        prototypes=model.prototypes,
        normalization=np.asarray(bounds, dtype=float),
        neuron=np.array(
            [model.config.q, model.config.b, model.config.epsilon, model.config.max_iter]
        ),
    )


def load_model(path) -> ChaosNetModel:
    with np.load(path) as blob:
        q, b, eps, max_iter = blob["neuron"]
        lo, hi = blob["normalization"]
        config = NeurochaosConfig(q=float(q), b=float(b), epsilon=float(eps), max_iter=int(max_iter))
        normalization = None if np.isnan(lo) else (float(lo), float(hi))
        return ChaosNetModel(blob["prototypes"], config, normalization)
