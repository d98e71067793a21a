"""Independent reference computations used by the tests; none import the package."""

import math
from fractions import Fraction

import numpy as np
from scipy import integrate


def chi2_direct(observed):
    """Exact sum of (o - e)^2 / e over the table, in rational arithmetic."""
    rows = [[int(v) for v in r] for r in observed]
    row_tot = [sum(r) for r in rows]
    col_tot = [sum(c) for c in zip(*rows)]
    total = sum(row_tot)
    stat = Fraction(0)
    for i, r in enumerate(rows):
        for j, o in enumerate(r):
            e = Fraction(row_tot[i] * col_tot[j], total)
            stat += (o - e) ** 2 / e
    return float(stat)


def chi2_density(t, df):
    if t <= 0:
        return 0.0
    k = df / 2.0
    return math.exp((k - 1) * math.log(t) - t / 2 - k * math.log(2) - math.lgamma(k))


def chi2_sf_quad(x, df):
    """Survival function by adaptive quadrature of the density."""
    if x == 0:
        return 1.0
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    if x < df:
        head, _ = integrate.quad(chi2_density, 0, x, args=(df,), **opts)
        return 1.0 - head
    tail, _ = integrate.quad(chi2_density, x, np.inf, args=(df,), **opts)
    return tail


def auc_exact(scores, labels):
    """Rational pairwise AUC with ties counted as one half."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(Fraction(1) if p > q else Fraction(1, 2) if p == q else 0 for p in pos for q in neg)
    return float(wins / (len(pos) * len(neg)))


def exhaustive_root_split(X, y, min_leaf=2, min_decrease=1e-7):
    """Best root (feature, threshold) by Gini over every candidate, exact arithmetic.

    Ties go to the lowest feature, then the lowest threshold. Returns
    ``(-1, None)`` when no admissible split clears ``min_decrease``.
    """
    n = len(y)
    y = [int(v) for v in y]

    def gini(lab):
        if not lab:
            return Fraction(0)
        q = Fraction(sum(lab), len(lab))
        return 2 * q * (1 - q)

    parent = gini(y)
    if parent == 0:
        return -1, None
    best = None
    for f in range(X.shape[1]):
        col = [float(v) for v in X[:, f]]
        vals = sorted(set(col))
        for a, b in zip(vals, vals[1:]):
            thr = (a + b) / 2
            left = [v for v, x in zip(y, col) if x <= thr]
            right = [v for v, x in zip(y, col) if x > thr]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            dec = parent - Fraction(len(left), n) * gini(left) - Fraction(len(right), n) * gini(right)
            if best is None or dec > best[0]:
                best = (dec, f, thr)
    if best is None or best[0] < min_decrease:
        return -1, None
    return best[1], best[2]
