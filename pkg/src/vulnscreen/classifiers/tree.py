"""CART classification trees (Gini impurity) and a soft-voting random forest.

Trees are stored as flat preorder arrays: ``feature`` (-1 at leaves),
``threshold``, ``left``, ``right``, ``value`` (positive fraction),
``n_node`` and ``impurity``. A row goes left when ``x[feature] <= threshold``.
"""

import math

import numpy as np
from numba import njit

from .._rng import derive_seeds, nb_below, new_state

TREE_ARRAYS = ("feature", "threshold", "left", "right", "value", "n_node", "impurity")
_TIE = 1e-12


@njit(cache=True)
def _gini(pos, n):
    if n == 0:
        return 0.0
    q = pos / n
    return 2.0 * q * (1.0 - q)


@njit(cache=True)
def _best_split(X, y, idx, start, end, features, min_leaf):
    """Best (feature, threshold, decrease) over ``features`` for rows idx[start:end].

    Features are scanned in the given (ascending) order and thresholds in
    ascending order; a candidate replaces the incumbent only if it is better
    by more than 1e-12, so ties go to the lowest feature, then threshold.
    """
    m = end - start
    pos_total = 0.0
    for k in range(start, end):
        pos_total += y[idx[k]]
    parent = _gini(pos_total, m)
    best_f = -1
    best_thr = 0.0
    best_dec = -np.inf
    vals = np.empty(m)
    labs = np.empty(m)
    for f in features:
        for k in range(m):
            vals[k] = X[idx[start + k], f]
        order = np.argsort(vals, kind="mergesort")
        for k in range(m):
            labs[k] = y[idx[start + order[k]]]
        pos_left = 0.0
        for k in range(m - 1):
            pos_left += labs[k]
            a = vals[order[k]]
            b = vals[order[k + 1]]
            if not a < b:
                continue
            n_left = k + 1
            n_right = m - n_left
            if n_left < min_leaf or n_right < min_leaf:
                continue
            dec = parent - (n_left / m) * _gini(pos_left, n_left) - (n_right / m) * _gini(
                pos_total - pos_left, n_right
            )
            if dec > best_dec + _TIE:
                best_dec = dec
                best_f = f
                best_thr = 0.5 * (a + b)
    return best_f, best_thr, best_dec


@njit(cache=True)
def _grow(X, y, rows, max_depth, min_leaf, min_decrease, n_candidates, state):
    """Grow one tree on ``rows`` (duplicates allowed, as in a bootstrap sample).

    ``n_candidates < p`` draws that many features per node without
    replacement: a partial Fisher-Yates pass over a permutation of 0..p-1
    that persists from node to node; its first ``n_candidates`` entries,
    sorted, are the candidates.
    """
    n = rows.shape[0]
    p = X.shape[1]
    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap)
    n_node = np.zeros(cap, np.int64)
    impurity = np.zeros(cap)

    idx = rows.copy()
    perm = np.arange(p)
    # stack entries: start, end, depth, parent, side (0 root, 1 left, 2 right)
    stack = np.empty((cap, 5), np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    stack[0, 3] = -1
    stack[0, 4] = 0
    top = 1
    count = 0
    while top > 0:
        top -= 1
        start = stack[top, 0]
        end = stack[top, 1]
        depth = stack[top, 2]
        parent = stack[top, 3]
        side = stack[top, 4]
        node = count
        count += 1
        if side == 1:
            left[parent] = node
        elif side == 2:
            right[parent] = node
        m = end - start
        pos = 0.0
        for k in range(start, end):
            pos += y[idx[k]]
        n_node[node] = m
        value[node] = pos / m
        impurity[node] = _gini(pos, m)
        if depth >= max_depth or m < 2 * min_leaf or impurity[node] == 0.0:
            continue
        if n_candidates < p:
            for i in range(n_candidates):
                j = i + nb_below(state, p - i)
                tmp = perm[i]
                perm[i] = perm[j]
                perm[j] = tmp
            features = np.sort(perm[:n_candidates].copy())
        else:
            features = np.arange(p)
        f, thr, dec = _best_split(X, y, idx, start, end, features, min_leaf)
        if f < 0 or dec < min_decrease:
            continue
        # partition idx[start:end] so rows with x <= thr come first
        lo = start
        hi = end - 1
        while lo <= hi:
            if X[idx[lo], f] <= thr:
                lo += 1
            else:
                tmp = idx[lo]
                idx[lo] = idx[hi]
                idx[hi] = tmp
                hi -= 1
        feature[node] = f
        threshold[node] = thr
        # push right first so the left subtree is numbered first (preorder)
        stack[top, 0] = lo
        stack[top, 1] = end
        stack[top, 2] = depth + 1
        stack[top, 3] = node
        stack[top, 4] = 2
        top += 1
        stack[top, 0] = start
        stack[top, 1] = lo
        stack[top, 2] = depth + 1
        stack[top, 3] = node
        stack[top, 4] = 1
        top += 1
    return (
        feature[:count].copy(),
        threshold[:count].copy(),
        left[:count].copy(),
        right[:count].copy(),
        value[:count].copy(),
        n_node[:count].copy(),
        impurity[:count].copy(),
    )


@njit(cache=True)
def _bootstrap(n, state):
    rows = np.empty(n, np.int64)
    for i in range(n):
        rows[i] = nb_below(state, n)
    return rows


@njit(cache=True)
def tree_scores(X, feature, threshold, left, right, value):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


def grow_tree(X, y, rows=None, max_depth=10, min_samples_leaf=2, min_impurity_decrease=1e-7,
              max_features=None, seed=0):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if rows is None:
        rows = np.arange(X.shape[0], dtype=np.int64)
    p = X.shape[1]
    k = p if max_features is None else max(1, min(p, int(max_features)))
    arrays = _grow(X, y, np.asarray(rows, dtype=np.int64), int(max_depth), int(min_samples_leaf),
                   float(min_impurity_decrease), k, new_state(seed))
    return dict(zip(TREE_ARRAYS, arrays))


def fit_tree(X, y, max_depth=10, min_samples_leaf=2, min_impurity_decrease=1e-7, seed=0):
    if len(y) == 0:
        raise ValueError("cannot grow a tree on zero rows")
    tree = grow_tree(X, y, None, max_depth, min_samples_leaf, min_impurity_decrease)
    return {"trees": [tree]}, []


def fit_forest(X, y, n_trees=100, max_features="sqrt", bootstrap=True, max_depth=10,
               min_samples_leaf=2, min_impurity_decrease=1e-7, seed=0):
    """Bagged trees; tree ``i`` draws from the ``i``-th output of a stream seeded by ``seed``.

    Each tree's stream first yields its bootstrap sample (``n`` draws of
    ``below(n)``), then the per-node feature subsets.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if n == 0:
        raise ValueError("cannot grow a forest on zero rows")
    if max_features == "sqrt":
        k = max(1, math.isqrt(p))
    elif max_features is None:
        k = p
    else:
        k = max(1, min(p, int(max_features)))
    trees = []
    for tree_seed in derive_seeds(seed, int(n_trees)):
        state = new_state(tree_seed)
        rows = _bootstrap(n, state) if bootstrap else np.arange(n, dtype=np.int64)
        arrays = _grow(X, y, rows, int(max_depth), int(min_samples_leaf),
                       float(min_impurity_decrease), k, state)
        trees.append(dict(zip(TREE_ARRAYS, arrays)))
    return {"trees": trees}, []


def score_trees(params, X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    total = np.zeros(X.shape[0])
    for t in params["trees"]:
        total += tree_scores(X, t["feature"], t["threshold"], t["left"], t["right"], t["value"])
    return total / len(params["trees"])


def path_contributions(params, x):
    """Sample-weighted impurity decrease credited to each feature on x's decision paths."""
    x = np.asarray(x, dtype=np.float64)
    contrib = np.zeros(x.shape[0])
    for t in params["trees"]:
        node = 0
        while t["feature"][node] >= 0:
            f = t["feature"][node]
            lft, rgt = t["left"][node], t["right"][node]
            contrib[f] += (
                t["n_node"][node] * t["impurity"][node]
                - t["n_node"][lft] * t["impurity"][lft]
                - t["n_node"][rgt] * t["impurity"][rgt]
            )
            node = lft if x[f] <= t["threshold"][node] else rgt
    return contrib / len(params["trees"])
