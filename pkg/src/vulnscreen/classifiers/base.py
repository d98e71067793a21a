"""Shared train/score interface over the six classifier kinds."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import SingleClassError
from . import knn, linear, naive_bayes, tree

# listing order doubles as the final tie-break in model selection
KINDS = ("LogisticRegression", "DecisionTree", "RandomForest", "KNN", "LinearSVM", "GaussianNB")

DEFAULT_HYPERPARAMETERS = {
    "LogisticRegression": {"lam": 1e-4, "learning_rate": 0.1, "max_iter": 5000, "tol": 1e-6},
    "LinearSVM": {"lam": 1e-3, "epochs": 200},
    "GaussianNB": {},
    "KNN": {"k": 5},
    "DecisionTree": {"max_depth": 10, "min_samples_leaf": 2, "min_impurity_decrease": 1e-7},
    "RandomForest": {
        "n_trees": 100,
        "max_features": "sqrt",
        "bootstrap": True,
        "max_depth": 10,
        "min_samples_leaf": 2,
        "min_impurity_decrease": 1e-7,
    },
}
STANDARDIZE_DEFAULT = {
    "LogisticRegression": True,
    "LinearSVM": True,
    "KNN": True,
    "GaussianNB": False,
    "DecisionTree": False,
    "RandomForest": False,
}
MARGIN_KINDS = frozenset({"LinearSVM"})
_SEEDED = frozenset({"LinearSVM", "RandomForest"})

_FIT = {
    "LogisticRegression": linear.fit_logistic,
    "LinearSVM": linear.fit_svm,
    "GaussianNB": naive_bayes.fit_gaussian_nb,
    "KNN": knn.fit_knn,
    "DecisionTree": tree.fit_tree,
    "RandomForest": tree.fit_forest,
}
_SCORE = {
    "LogisticRegression": linear.score_logistic,
    "LinearSVM": linear.score_svm,
    "GaussianNB": naive_bayes.score_gaussian_nb,
    "KNN": knn.score_knn,
    "DecisionTree": tree.score_trees,
    "RandomForest": tree.score_trees,
}


def _check_ranges(kind: str, hp: dict):
    positive = {"learning_rate", "lam", "k", "n_trees", "max_depth", "min_samples_leaf", "epochs", "max_iter"}
    for key, val in hp.items():
        if key in positive and not (isinstance(val, (int, float)) and val > 0):
            raise ValueError(f"{kind}: hyperparameter {key} must be > 0, got {val!r}")


@dataclass(frozen=True)
class TrainConfig:
    kind: str
    seed: int = 42
    hyperparameters: dict = field(default_factory=dict)
    standardize: bool | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}; choose from {KINDS}")
        unknown = set(self.hyperparameters) - set(DEFAULT_HYPERPARAMETERS[self.kind])
        if unknown:
            raise ValueError(f"{self.kind}: unknown hyperparameters {sorted(unknown)}")
        _check_ranges(self.kind, self.hyperparameters)

    @property
    def resolved(self) -> dict:
        return {**DEFAULT_HYPERPARAMETERS[self.kind], **self.hyperparameters}

    @property
    def uses_standardization(self) -> bool:
        return STANDARDIZE_DEFAULT[self.kind] if self.standardize is None else bool(self.standardize)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "hyperparameters": self.resolved,
            "standardize": self.uses_standardization,
        }


@dataclass(frozen=True, eq=False)
class TrainedModel:
    kind: str
    feature_ids: tuple[str, ...]
    parameters: dict
    standardization: tuple[np.ndarray, np.ndarray] | None
    schema_fingerprint: str
    config: TrainConfig
    notes: tuple[str, ...] = ()

    @property
    def threshold(self) -> float:
        return 0.0 if self.kind in MARGIN_KINDS else 0.5


@dataclass(frozen=True)
class Prediction:
    score: float
    label: int
    probability: float


def fit_standardizer(X) -> tuple[np.ndarray, np.ndarray]:
    """Column means and population standard deviations (1 where < 1e-12)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        return np.zeros(0), np.ones(0)
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale < 1e-12, 1.0, scale)
    return mean, scale


def apply_standardizer(standardization, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if standardization is None:
        return X
    mean, scale = standardization
    return (X - mean) / scale


def train(X, y, config: TrainConfig, feature_ids=None, schema_fingerprint: str = "") -> TrainedModel:
    """Fit one classifier; a pure function of ``(X, y, config)``."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"X has shape {X.shape} but y has {y.shape[0]} entries")
    if config.kind not in ("DecisionTree", "RandomForest") and not (np.any(y == 0) and np.any(y == 1)):
        raise SingleClassError(f"{config.kind} needs both classes in the training data")
    if feature_ids is None:
        feature_ids = tuple(f"x{j}" for j in range(X.shape[1]))
    if len(feature_ids) != X.shape[1]:
        raise ValueError("feature_ids length does not match X columns")
    stdz = fit_standardizer(X) if config.uses_standardization else None
    hp = config.resolved
    if config.kind in _SEEDED:
        hp["seed"] = config.seed
    params, notes = _FIT[config.kind](apply_standardizer(stdz, X), y, **hp)
    for note in notes:
        warnings.warn(f"{config.kind}: {note}")
    return TrainedModel(config.kind, tuple(feature_ids), params, stdz, schema_fingerprint, config, tuple(notes))


def score_rows(model: TrainedModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(model.feature_ids):
        raise ValueError(f"expected {len(model.feature_ids)} feature columns, got shape {X.shape}")
    return _SCORE[model.kind](model.parameters, apply_standardizer(model.standardization, X))


def labels_from_scores(model: TrainedModel, scores) -> np.ndarray:
    # boundary goes to 0 (healthy)
    return (np.asarray(scores) > model.threshold).astype(np.int64)


def _probability(model: TrainedModel, score: float) -> float:
    if model.kind in MARGIN_KINDS:
        # logistic squashing of the margin, display only
        return float(0.5 * (1.0 + np.tanh(0.5 * score)))
    return float(score)


def predict(model: TrainedModel, row, schema_fingerprint: str | None = None) -> Prediction:
    if schema_fingerprint is not None and model.schema_fingerprint and schema_fingerprint != model.schema_fingerprint:
        warnings.warn(
            f"schema fingerprint {schema_fingerprint} differs from the model's {model.schema_fingerprint}"
        )
    row = np.asarray(row, dtype=np.float64).reshape(1, -1)
    score = float(score_rows(model, row)[0])
    return Prediction(score, int(score > model.threshold), _probability(model, score))


def predict_many(model: TrainedModel, X) -> list[Prediction]:
    scores = score_rows(model, X)
    return [Prediction(float(s), int(s > model.threshold), _probability(model, float(s))) for s in scores]


def contributions(model: TrainedModel, row) -> np.ndarray | None:
    """Per-feature attribution for one raw row; ``None`` for KNN.

    Linear kinds: ``|w_j * x_j|`` on the standardized row. Trees and forests:
    impurity decrease along the row's decision path. Naive Bayes: absolute
    per-feature log-likelihood ratio.
    """
    x = apply_standardizer(model.standardization, np.asarray(row, dtype=np.float64).reshape(1, -1))[0]
    if model.kind in ("LogisticRegression", "LinearSVM"):
        return np.abs(model.parameters["w"] * x)
    if model.kind in ("DecisionTree", "RandomForest"):
        return tree.path_contributions(model.parameters, x)
    if model.kind == "GaussianNB":
        return np.abs(naive_bayes.log_likelihood_ratios(model.parameters, x))
    return None
