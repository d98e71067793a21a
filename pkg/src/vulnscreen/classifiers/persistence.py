"""Versioned JSON model files.

Layout (``model_version: 1``)::

    {"model_version": 1, "kind": ..., "feature_ids": [...],
     "schema_fingerprint": ..., "train_config": {...},
     "standardization": {"mean": [...], "scale": [...]} | null,
     "parameters": {...}, "notes": [...]}

Arrays are stored as ``{"dtype": "float64", "data": [...]}``. Tree kinds
store ``parameters.trees`` as a list of preorder node lists, one node per
``[feature, threshold, left, right, value, n_node, impurity]``. Floats are
written with ``repr`` precision, so loading reproduces every bit.
"""

import json
from pathlib import Path

import numpy as np

from ..errors import DataError
from .base import TrainConfig, TrainedModel
from .tree import TREE_ARRAYS

MODEL_VERSION = 1
_INT_FIELDS = {"feature", "left", "right", "n_node"}


def _encode(value):
    if isinstance(value, np.ndarray):
        return {"dtype": str(value.dtype), "data": value.tolist()}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _decode(value):
    if isinstance(value, dict) and set(value) == {"dtype", "data"}:
        return np.array(value["data"], dtype=value["dtype"])
    return value


def model_to_dict(model: TrainedModel) -> dict:
    params = {}
    for key, val in model.parameters.items():
        if key == "trees":
            params["trees"] = [
                [list(node) for node in zip(*(t[name].tolist() for name in TREE_ARRAYS))] for t in val
            ]
        else:
            params[key] = _encode(val)
    cfg = model.config
    return {
        "model_version": MODEL_VERSION,
        "kind": model.kind,
        "feature_ids": list(model.feature_ids),
        "schema_fingerprint": model.schema_fingerprint,
        "train_config": {
            "kind": cfg.kind,
            "seed": cfg.seed,
            "hyperparameters": cfg.hyperparameters,
            "standardize": cfg.standardize,
        },
        "standardization": None
        if model.standardization is None
        else {"mean": model.standardization[0].tolist(), "scale": model.standardization[1].tolist()},
        "parameters": params,
        "notes": list(model.notes),
    }


def model_from_dict(doc: dict) -> TrainedModel:
    if doc.get("model_version") != MODEL_VERSION:
        raise DataError(f"unsupported model_version {doc.get('model_version')!r}")
    params = {}
    for key, val in doc["parameters"].items():
        if key == "trees":
            trees = []
            for nodes in val:
                cols = list(zip(*nodes))
                trees.append(
                    {
                        name: np.array(col, dtype=np.int64 if name in _INT_FIELDS else np.float64)
                        for name, col in zip(TREE_ARRAYS, cols)
                    }
                )
            params["trees"] = trees
        else:
            params[key] = _decode(val)
    cfg = doc["train_config"]
    stdz = doc["standardization"]
    return TrainedModel(
        kind=doc["kind"],
        feature_ids=tuple(doc["feature_ids"]),
        parameters=params,
        standardization=None
        if stdz is None
        else (np.array(stdz["mean"], dtype=np.float64), np.array(stdz["scale"], dtype=np.float64)),
        schema_fingerprint=doc["schema_fingerprint"],
        config=TrainConfig(cfg["kind"], cfg["seed"], dict(cfg["hyperparameters"]), cfg["standardize"]),
        notes=tuple(doc.get("notes", ())),
    )


def dumps_model(model: TrainedModel) -> str:
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path) -> TrainedModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"cannot parse model file {path}: {exc}") from exc
    return model_from_dict(doc)
