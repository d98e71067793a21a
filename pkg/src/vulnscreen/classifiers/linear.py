"""Logistic regression (full-batch gradient descent) and a Pegasos linear SVM."""

import numpy as np
from numba import njit

from .._rng import nb_below, new_state


@njit(cache=True)
def linear_margin(X, w, b):
    n, p = X.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(p):
            s += X[i, j] * w[j]
        out[i] = s + b
    return out


@njit(cache=True)
def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@njit(cache=True)
def logistic_objective(w, b, X, y, lam):
    """Mean negative log-likelihood plus (lam/2)||w||^2; the bias is not penalized."""
    z = linear_margin(X, w, b)
    n = X.shape[0]
    total = 0.0
    for i in range(n):
        # log(1 + e^z) - y z, stable for either sign of z
        zi = z[i]
        if zi > 0:
            total += zi + np.log1p(np.exp(-zi)) - y[i] * zi
        else:
            total += np.log1p(np.exp(zi)) - y[i] * zi
    return total / n + 0.5 * lam * np.sum(w * w)


@njit(cache=True)
def logistic_gradient(w, b, X, y, lam):
    n, p = X.shape
    z = linear_margin(X, w, b)
    gw = lam * w
    gb = 0.0
    for i in range(n):
        r = (_sigmoid(z[i]) - y[i]) / n
        gb += r
        for j in range(p):
            gw[j] += r * X[i, j]
    return gw, gb


@njit(cache=True)
def _gd(X, y, lam, lr, max_iter, tol):
    p = X.shape[1]
    w = np.zeros(p)
    b = 0.0
    for it in range(max_iter):
        gw, gb = logistic_gradient(w, b, X, y, lam)
        gnorm = abs(gb)
        for j in range(p):
            if abs(gw[j]) > gnorm:
                gnorm = abs(gw[j])
        if gnorm < tol:
            return w, b, it, True
        for j in range(p):
            w[j] -= lr * gw[j]
        b -= lr * gb
    return w, b, max_iter, False


def fit_logistic(X, y, lam=1e-4, learning_rate=0.1, max_iter=5000, tol=1e-6):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w, b, iters, converged = _gd(X, y, float(lam), float(learning_rate), int(max_iter), float(tol))
    params = {"w": w, "b": float(b), "iterations": int(iters)}
    notes = [] if converged else [f"gradient descent stopped at max_iter={max_iter} before reaching tol={tol}"]
    return params, notes


def score_logistic(params, X):
    return _sigmoid(linear_margin(np.ascontiguousarray(X, dtype=np.float64), params["w"], params["b"]))


@njit(cache=True)
def hinge_objective(w, b, X, s, lam):
    """(lam/2)(||w||^2 + b^2) + mean hinge loss, with labels s in {-1, +1}."""
    z = linear_margin(X, w, b)
    loss = 0.0
    for i in range(X.shape[0]):
        m = 1.0 - s[i] * z[i]
        if m > 0:
            loss += m
    return loss / X.shape[0] + 0.5 * lam * (np.sum(w * w) + b * b)


@njit(cache=True)
def _pegasos(X, s, lam, epochs, state):
    n, p = X.shape
    w = np.zeros(p)
    b = 0.0
    # running mean of every iterate; this is the returned model
    w_avg = np.zeros(p)
    b_avg = 0.0
    order = np.arange(n)
    trace = np.empty(epochs)
    t = 0
    for e in range(epochs):
        for i in range(n - 1, 0, -1):
            j = nb_below(state, i + 1)
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp
        for k in range(n):
            i = order[k]
            t += 1
            eta = 1.0 / (lam * t)
            z = b
            for j in range(p):
                z += w[j] * X[i, j]
            shrink = 1.0 - eta * lam
            for j in range(p):
                w[j] *= shrink
            b *= shrink
            if s[i] * z < 1.0:
                for j in range(p):
                    w[j] += eta * s[i] * X[i, j]
                b += eta * s[i]
            for j in range(p):
                w_avg[j] += (w[j] - w_avg[j]) / t
            b_avg += (b - b_avg) / t
        trace[e] = hinge_objective(w_avg, b_avg, X, s, lam)
    return w_avg, b_avg, trace


def pegasos(X, y, lam=1e-3, epochs=200, seed=0):
    """Run Pegasos; returns ``(w, b, objective_at_each_epoch_end)``.

    Steps are ``1/(lam t)`` on single rows; the returned ``(w, b)`` is the
    running average of all iterates, whose objective settles monotonically
    where the last iterate keeps jumping. The bias is the weight of an
    implicit constant feature, so it shares the regularizer. Each epoch
    visits the rows in a fresh SplitMix64 Fisher-Yates order drawn from
    ``seed``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    s = np.where(np.asarray(y) == 1, 1.0, -1.0)
    return _pegasos(X, s, float(lam), int(epochs), new_state(seed))


def fit_svm(X, y, lam=1e-3, epochs=200, seed=0):
    w, b, trace = pegasos(X, y, lam, epochs, seed)
    return {"w": w, "b": float(b), "final_objective": float(trace[-1])}, []


def score_svm(params, X):
    return linear_margin(np.ascontiguousarray(X, dtype=np.float64), params["w"], params["b"])
