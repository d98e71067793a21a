"""Accuracy, confusion counts, ROC curves and AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers import labels_from_scores, score_rows
from .errors import SingleClassError
from .ingest import select_columns


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int


@dataclass(frozen=True)
class EvalReport:
    n_test: int
    accuracy: float
    confusion: Confusion
    roc: tuple[tuple[float, float], ...]
    auc: float

    def to_dict(self) -> dict:
        return {
            "n_test": self.n_test,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "confusion": vars(self.confusion),
        }

    def roc_csv(self) -> str:
        return "fpr,tpr\n" + "".join(f"{f!r},{t!r}\n" for f, t in self.roc)


def _both_classes(y):
    if not (np.any(y == 1) and np.any(y == 0)):
        raise SingleClassError("need at least one positive and one negative label")


def accuracy(predicted_labels, true_labels) -> float:
    pred = np.asarray(predicted_labels)
    true = np.asarray(true_labels)
    if pred.shape != true.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {true.shape}")
    if pred.size == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    return int(np.sum(pred == true)) / pred.size


def confusion(predicted_labels, true_labels) -> Confusion:
    pred = np.asarray(predicted_labels)
    true = np.asarray(true_labels)
    return Confusion(
        tp=int(np.sum((pred == 1) & (true == 1))),
        fp=int(np.sum((pred == 1) & (true == 0))),
        tn=int(np.sum((pred == 0) & (true == 0))),
        fn=int(np.sum((pred == 0) & (true == 1))),
    )


def roc_curve(scores, true_labels) -> list[tuple[float, float]]:
    """ROC points from (0, 0) to (1, 1), one per distinct score.

    Samples sharing a score enter together, so a tie block contributes one
    diagonal segment.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(true_labels)
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    _both_classes(y)
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    n_pos = int(np.sum(y == 1))
    n_neg = y.size - n_pos
    tps = np.cumsum(y == 1)
    fps = np.cumsum(y == 0)
    block_ends = np.r_[np.flatnonzero(np.diff(s) != 0), y.size - 1]
    points = [(0.0, 0.0)]
    points += [(fps[i] / n_neg, tps[i] / n_pos) for i in block_ends]
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    return [(float(f), float(t)) for f, t in points]


def auc(roc_points) -> float:
    """Trapezoidal area under an ROC point sequence."""
    pts = np.asarray(roc_points, dtype=np.float64)
    fpr, tpr = pts[:, 0], pts[:, 1]
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def auc_pairwise_oracle(scores, true_labels) -> float:
    """Share of positive-negative pairs ranked correctly, ties counting half."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(true_labels)
    _both_classes(y)
    pos = s[y == 1][:, None]
    neg = s[y == 0][None, :]
    wins = np.sum(pos > neg) + 0.5 * np.sum(pos == neg)
    return float(wins / (pos.size * neg.size))


def evaluate_scores(scores, predicted_labels, true_labels) -> EvalReport:
    true = np.asarray(true_labels)
    if true.size == 0:
        raise ValueError("cannot evaluate on an empty test set")
    points = roc_curve(scores, true)
    return EvalReport(
        n_test=int(true.size),
        accuracy=accuracy(predicted_labels, true),
        confusion=confusion(predicted_labels, true),
        roc=tuple(points),
        auc=auc(points),
    )


def evaluate(model, test_dataset) -> EvalReport:
    """Score a labeled dataset with ``model`` at the model's native threshold."""
    ds = select_columns(test_dataset, model.feature_ids)
    scores = score_rows(model, ds.rows)
    return evaluate_scores(scores, labels_from_scores(model, scores), ds.labels)
