"""Interpretable classifiers over expert-labeled recipe pairs.

Features per pair are the three view scores (semantic average, nutrition
average, ingredient overlap); the label is the experts' agreed
similar/not-similar verdict. Two model families: L2-regularized logistic
regression fit by damped Newton iterations, and a random forest of
Gini-split CART trees. Feature importances (absolute coefficients, or
accumulated impurity decrease) are normalized to percentages so the
dominant view is directly readable.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FEATURE_NAMES = ("semantic", "nutritional", "lexical")


@dataclass(frozen=True)
class LabeledPair:
    main_id: str
    secondary_id: str
    features: tuple[float, float, float]  # (sem_avg, nutr_avg, lexical)
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        for value in self.features:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"feature {value!r} outside [0, 1]")


def as_arrays(pairs: Sequence[LabeledPair]) -> tuple[np.ndarray, np.ndarray]:
    features = np.array([p.features for p in pairs], dtype=float)
    labels = np.array([p.label for p in pairs], dtype=int)
    return features, labels


# --- logistic regression ----------------------------------------------------


@dataclass
class LogisticModel:
    coefficients: np.ndarray
    intercept: float
    converged: bool
    iterations: int


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _logistic_loss(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float) -> float:
    # mean log-loss, so duplicating the dataset leaves the optimum unchanged
    z = X @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(w, w))


def train_logistic(
    X: np.ndarray,
    y: np.ndarray,
    l2_strength: float = 0.01,
    max_iter: int = 100,
    tolerance: float = 1e-8,
) -> LogisticModel:
    """Fit by damped Newton steps on the L2-regularized log-loss.

    The intercept is not penalized, so with zero features it recovers the
    log-odds of the class prior. Converged means the gradient norm dropped
    below the tolerance within max_iter iterations.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("training data must contain both classes")
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p = _sigmoid(X @ w + b)
        residual = (p - y) / n
        grad = np.concatenate([X.T @ residual + l2_strength * w, [residual.sum()]])
        if float(np.linalg.norm(grad)) < tolerance:
            converged = True
            iterations -= 1
            break
        s = np.maximum(p * (1.0 - p), 1e-12) / n
        Xs = X * s[:, None]
        hessian = np.zeros((d + 1, d + 1))
        hessian[:d, :d] = X.T @ Xs + l2_strength * np.eye(d)
        hessian[:d, d] = Xs.sum(axis=0)
        hessian[d, :d] = Xs.sum(axis=0)
        hessian[d, d] = s.sum()
        step = np.linalg.solve(hessian, grad)
        loss = _logistic_loss(X, y, w, b, l2_strength)
        scale = 1.0
        for _ in range(30):
            w_new = w - scale * step[:d]
            b_new = b - scale * step[d]
            if _logistic_loss(X, y, w_new, b_new, l2_strength) <= loss:
                break
            scale /= 2.0
        w = w - scale * step[:d]
        b = float(b - scale * step[d])
    return LogisticModel(coefficients=w, intercept=b, converged=converged, iterations=iterations)


def predict_logistic_proba(model: LogisticModel, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return _sigmoid(X @ model.coefficients + model.intercept)


def predict_logistic(model: LogisticModel, X: np.ndarray) -> np.ndarray:
    """Labels at the 0.5 probability threshold."""
    return (predict_logistic_proba(model, X) >= 0.5).astype(int)


# --- CART / random forest ---------------------------------------------------


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    prediction: int = 0


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    fractions = counts / total
    return float(1.0 - np.sum(fractions**2))


@dataclass
class DecisionTree:
    max_features: int | None = None
    min_leaf: int = 1
    seed: int = 0
    root: _Node = field(init=False, repr=False)
    importances: np.ndarray = field(init=False, repr=False)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        rng = np.random.default_rng(self.seed)
        self.importances = np.zeros(X.shape[1])
        self.root = self._build(X, y, np.arange(len(y)), rng, len(y))
        return self

    def _build(
        self, X: np.ndarray, y: np.ndarray, idx: np.ndarray, rng: np.random.Generator, n_total: int
    ) -> _Node:
        labels = y[idx]
        counts = np.bincount(labels, minlength=2)
        node = _Node(prediction=int(np.argmax(counts)))
        impurity = _gini(counts)
        if impurity == 0.0 or len(idx) < 2 * self.min_leaf:
            return node
        n_features = X.shape[1]
        k = self.max_features or n_features
        candidates = sorted(rng.choice(n_features, size=min(k, n_features), replace=False))
        best = self._best_split(X, labels, idx, candidates, impurity)
        if best is None:
            return node
        feature, threshold, decrease = best
        node.feature = feature
        node.threshold = threshold
        self.importances[feature] += (len(idx) / n_total) * decrease
        mask = X[idx, feature] <= threshold
        node.left = self._build(X, y, idx[mask], rng, n_total)
        node.right = self._build(X, y, idx[~mask], rng, n_total)
        return node

    def _best_split(
        self,
        X: np.ndarray,
        labels: np.ndarray,
        idx: np.ndarray,
        candidates: Iterable[int],
        impurity: float,
    ) -> tuple[int, float, float] | None:
        n = len(idx)
        best: tuple[int, float, float] | None = None
        for feature in candidates:
            values = X[idx, feature]
            order = np.argsort(values, kind="stable")
            sorted_values = values[order]
            sorted_labels = labels[order]
            ones_left = np.cumsum(sorted_labels)
            total_ones = ones_left[-1]
            for split in range(self.min_leaf, n - self.min_leaf + 1):
                if split < 1 or split >= n:
                    continue
                if sorted_values[split - 1] == sorted_values[split]:
                    continue
                left_ones = ones_left[split - 1]
                left = np.array([split - left_ones, left_ones])
                right = np.array([(n - split) - (total_ones - left_ones), total_ones - left_ones])
                weighted = (split * _gini(left) + (n - split) * _gini(right)) / n
                decrease = impurity - weighted
                if best is None or decrease > best[2] + 1e-15:
                    threshold = (sorted_values[split - 1] + sorted_values[split]) / 2.0
                    best = (feature, threshold, decrease)
        if best is None or best[2] <= 0.0:
            return None
        return best

    def predict_one(self, x: np.ndarray) -> int:
        node = self.root
        while node.left is not None and node.right is not None:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.prediction

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.predict_one(row) for row in X], dtype=int)


@dataclass
class ForestModel:
    trees: list[DecisionTree]
    importances: np.ndarray
    seed: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        votes = np.stack([tree.predict(X) for tree in self.trees])
        return (votes.mean(axis=0) > 0.5).astype(int)


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    trees: int = 100,
    max_features: int | None = 1,
    min_leaf: int = 1,
    seed: int = 0,
    bootstrap: bool = True,
) -> ForestModel:
    """Bootstrap-aggregated CART trees with Gini-decrease importances.

    Per-tree seeds derive from the master seed, so a fixed seed reproduces
    the forest bit for bit. Importances are the impurity decreases summed
    per feature over the forest, normalized to 1.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain both classes")
    sequences = np.random.SeedSequence(seed).spawn(trees)
    fitted: list[DecisionTree] = []
    totals = np.zeros(X.shape[1])
    n = len(y)
    for sequence in sequences:
        rng = np.random.default_rng(sequence)
        tree_seed = int(rng.integers(0, 2**32))
        idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        tree = DecisionTree(max_features=max_features, min_leaf=min_leaf, seed=tree_seed)
        tree.fit(X[idx], y[idx])
        fitted.append(tree)
        totals += tree.importances
    total = totals.sum()
    if total <= 0.0:
        raise ValueError("no informative splits; cannot attribute importance")
    return ForestModel(trees=fitted, importances=totals / total, seed=seed)


# --- evaluation -------------------------------------------------------------


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass
class CVReport:
    accuracy_mean: float
    accuracy_std: float
    per_class: dict[int, ClassMetrics]
    folds: int
    seed: int


def stratified_folds(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Index partition with every class spread round-robin over k folds."""
    y = np.asarray(y, dtype=int)
    if len(y) < k:
        raise ValueError(f"need at least {k} rows for {k} folds")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        if len(members) < k:
            raise ValueError(
                f"class {cls} has {len(members)} rows; cannot stratify into {k} folds"
            )
        rng.shuffle(members)
        for position, index in enumerate(members):
            folds[position % k].append(int(index))
    return [np.sort(np.array(fold, dtype=int)) for fold in folds]


def _fit_predict(kind: str, X_train, y_train, X_test, config: dict) -> np.ndarray:
    if kind == "logistic":
        model = train_logistic(
            X_train,
            y_train,
            l2_strength=config.get("l2_strength", 0.01),
            max_iter=config.get("max_iter", 100),
            tolerance=config.get("tolerance", 1e-8),
        )
        return predict_logistic(model, X_test)
    if kind == "forest":
        model = train_forest(
            X_train,
            y_train,
            trees=config.get("trees", 100),
            max_features=config.get("max_features", 1),
            min_leaf=config.get("min_leaf", 1),
            seed=config.get("seed", 0),
            bootstrap=config.get("bootstrap", True),
        )
        return model.predict(X_test)
    raise ValueError(f"unknown model kind {kind!r}")


def cross_validate(
    kind: str,
    X: np.ndarray,
    y: np.ndarray,
    k: int = 5,
    seed: int = 0,
    **config,
) -> CVReport:
    """Stratified k-fold CV; per-class metrics pool out-of-fold predictions."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    folds = stratified_folds(y, k, seed)
    accuracies = []
    pooled = np.full(len(y), -1, dtype=int)
    for test_idx in folds:
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        predictions = _fit_predict(
            kind, X[train_mask], y[train_mask], X[test_idx], {**config, "seed": seed}
        )
        pooled[test_idx] = predictions
        accuracies.append(float(np.mean(predictions == y[test_idx])))
    per_class = {}
    for cls in (0, 1):
        predicted = pooled == cls
        actual = y == cls
        tp = int(np.sum(predicted & actual))
        precision = tp / predicted.sum() if predicted.sum() else 0.0
        recall = tp / actual.sum() if actual.sum() else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[cls] = ClassMetrics(precision=precision, recall=recall, f1=f1)
    return CVReport(
        accuracy_mean=float(np.mean(accuracies)),
        accuracy_std=float(np.std(accuracies)),
        per_class=per_class,
        folds=k,
        seed=seed,
    )


def normalized_importance(values: Sequence[float]) -> list[float]:
    """Absolute shares as percentages: 100 * |v_i| / sum |v_j|."""
    if len(values) == 0:
        raise ValueError("no values")
    magnitudes = [abs(float(v)) for v in values]
    total = sum(magnitudes)
    if total == 0.0:
        raise ValueError("all values are zero")
    return [100.0 * m / total for m in magnitudes]


# --- ground truth -----------------------------------------------------------


VERDICT_LABELS = {"similar": 1, "not_similar": 0}


def build_ground_truth(
    judgments: dict[tuple[str, str], dict[str, str]],
    score_lookup: dict[tuple[str, str], tuple[float, float, float]],
) -> tuple[list[LabeledPair], list[tuple[str, str]]]:
    """Labeled pairs from unanimous expert verdicts, joined with features.

    judgments maps a canonical pair to {expert_id: verdict}. Only pairs
    judged by every participating expert with one unanimous verdict become
    ground truth. Pairs lacking score-table features are excluded and
    reported separately.
    """
    experts = sorted({expert for verdicts in judgments.values() for expert in verdicts})
    if len(experts) < 2:
        raise ValueError("ground truth requires judgments from at least 2 experts")
    labeled: list[LabeledPair] = []
    missing_scores: list[tuple[str, str]] = []
    for pair in sorted(judgments):
        verdicts = judgments[pair]
        if len(verdicts) < len(experts):
            continue
        unique = set(verdicts.values())
        if len(unique) != 1:
            continue
        verdict = unique.pop()
        features = score_lookup.get(pair)
        if features is None:
            missing_scores.append(pair)
            continue
        labeled.append(
            LabeledPair(
                main_id=pair[0],
                secondary_id=pair[1],
                features=features,
                label=VERDICT_LABELS[verdict],
            )
        )
    if not labeled:
        logger.warning("no unanimously judged pairs with scores; ground truth is empty")
    return labeled, missing_scores


def write_ground_truth(pairs: Iterable[tuple[str, str, int]], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("main_id", "secondary_id", "label"))
    for main_id, secondary_id, label in pairs:
        writer.writerow((main_id, secondary_id, label))


def read_ground_truth(stream: IO[str]) -> list[tuple[str, str, int]]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["main_id", "secondary_id", "label"]:
        raise ValueError(f"unexpected ground truth header: {header}")
    rows = []
    for row in reader:
        if not row:
            continue
        label = int(row[2])
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {row[2]!r}")
        rows.append((row[0], row[1], label))
    return rows


# --- report -----------------------------------------------------------------


def write_model_report(
    stream: IO[str],
    kind: str,
    report: CVReport,
    importance_raw: Sequence[float],
    importance_pct: Sequence[float],
    extra: dict[str, str] | None = None,
) -> None:
    """Long-format CSV: CV metrics, per-class metrics, importances."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("section", "name", "value"))
    writer.writerow(("model", "kind", kind))
    writer.writerow(("cv", "folds", report.folds))
    writer.writerow(("cv", "seed", report.seed))
    writer.writerow(("cv", "accuracy_mean", f"{report.accuracy_mean:.6f}"))
    writer.writerow(("cv", "accuracy_std", f"{report.accuracy_std:.6f}"))
    for cls in sorted(report.per_class):
        metrics = report.per_class[cls]
        writer.writerow((f"class_{cls}", "precision", f"{metrics.precision:.6f}"))
        writer.writerow((f"class_{cls}", "recall", f"{metrics.recall:.6f}"))
        writer.writerow((f"class_{cls}", "f1", f"{metrics.f1:.6f}"))
    for name, raw, pct in zip(FEATURE_NAMES, importance_raw, importance_pct):
        writer.writerow(("importance_raw", name, f"{raw:.6f}"))
        writer.writerow(("importance_pct", name, f"{pct:.6f}"))
    for key, value in (extra or {}).items():
        writer.writerow(("extra", key, value))
