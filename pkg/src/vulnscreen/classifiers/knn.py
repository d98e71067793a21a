"""k-nearest-neighbours scoring by positive fraction among the k closest rows."""

import numpy as np


def fit_knn(X, y, k=5):
    X = np.array(X, dtype=np.float64)
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k={k} must lie in [1, n_train={X.shape[0]}]")
    return {"X": X, "y": np.array(y, dtype=np.float64), "k": int(k)}, []


def knn_score(params, x, k=None):
    """Score one standardized query row.

    Squared Euclidean distances are compared exactly; equal distances keep
    training-row order (stable sort), so lower indices win ties.
    """
    k = params["k"] if k is None else int(k)
    Xtr = params["X"]
    if k > Xtr.shape[0]:
        raise ValueError(f"k={k} exceeds the {Xtr.shape[0]} training rows")
    d = ((Xtr - np.asarray(x, dtype=np.float64)) ** 2).sum(axis=1)
    nearest = np.argsort(d, kind="stable")[:k]
    return float(params["y"][nearest].sum() / k)


def score_knn(params, X):
    X = np.asarray(X, dtype=np.float64)
    return np.array([knn_score(params, row) for row in X])
