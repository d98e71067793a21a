"""Gaussian naive Bayes with log-space posteriors."""

import numpy as np

VAR_FLOOR = 1e-9


def fit_gaussian_nb(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    means, variances, priors = [], [], []
    for c in (0, 1):
        Xc = X[y == c]
        priors.append(Xc.shape[0] / X.shape[0])
        means.append(Xc.mean(axis=0))
        variances.append(Xc.var(axis=0))
    variances = np.array(variances)
    max_var = float(X.var(axis=0).max()) if X.shape[1] else 0.0
    floor = max(VAR_FLOOR * max_var, VAR_FLOOR)
    return {
        "mean": np.array(means),
        "var": np.maximum(variances, floor),
        "log_prior": np.log(np.array(priors)),
    }, []


def _joint_log_likelihood(params, X):
    X = np.asarray(X, dtype=np.float64)
    mean, var = params["mean"], params["var"]
    jll = np.empty((X.shape[0], 2))
    for c in (0, 1):
        ll = -0.5 * (np.log(2.0 * np.pi * var[c]) + (X - mean[c]) ** 2 / var[c])
        jll[:, c] = params["log_prior"][c] + ll.sum(axis=1)
    return jll


def score_gaussian_nb(params, X):
    jll = _joint_log_likelihood(params, X)
    top = jll.max(axis=1, keepdims=True)
    log_norm = top[:, 0] + np.log(np.exp(jll - top).sum(axis=1))
    return np.exp(jll[:, 1] - log_norm)


def log_likelihood_ratios(params, x):
    """Per-feature log p(x_j | addicted) - log p(x_j | healthy)."""
    x = np.asarray(x, dtype=np.float64)
    mean, var = params["mean"], params["var"]
    ll = -0.5 * (np.log(2.0 * np.pi * var) + (x - mean) ** 2 / var)
    return ll[1] - ll[0]
