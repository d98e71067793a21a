from .base import (
    DEFAULT_HYPERPARAMETERS,
    KINDS,
    Prediction,
    TrainConfig,
    TrainedModel,
    apply_standardizer,
    contributions,
    fit_standardizer,
    labels_from_scores,
    predict,
    predict_many,
    score_rows,
    train,
)
from .knn import knn_score
from .persistence import dumps_model, load_model, save_model

__all__ = [
    "DEFAULT_HYPERPARAMETERS",
    "KINDS",
    "Prediction",
    "TrainConfig",
    "TrainedModel",
    "apply_standardizer",
    "contributions",
    "dumps_model",
    "fit_standardizer",
    "knn_score",
    "labels_from_scores",
    "load_model",
    "predict",
    "predict_many",
    "save_model",
    "score_rows",
    "train",
]
