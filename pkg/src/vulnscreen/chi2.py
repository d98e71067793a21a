"""Pearson's chi-squared test of independence and the chi-square distribution.

The distribution numerics are self-contained: the survival function is the
regularized upper incomplete gamma function ``Q(df/2, x/2)``, evaluated by
its power series when ``x/2 < df/2 + 1`` and by a modified-Lentz continued
fraction otherwise.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DegenerateFeatureError, SingleClassError

DEFAULT_ALPHA = 0.05
EPS = 1e-14
MAX_ITER = 10_000
_TINY = 1e-300


@dataclass(frozen=True)
class ContingencyTable:
    observed: np.ndarray
    row_category_codes: tuple[int, ...]
    grand_total: int


@dataclass(frozen=True)
class ChiSquareResult:
    feature_id: str
    statistic: float
    df: int
    p_value: float
    critical_value: float
    reject_null: bool
    low_expected_warning: bool
    degenerate: bool = False


@dataclass(frozen=True)
class ChiSquareReport:
    """Per-feature test results in ranking order."""

    alpha: float
    results: tuple[ChiSquareResult, ...]
    warnings: tuple[str, ...] = field(default=())

    @property
    def ranking(self) -> list[tuple[str, float]]:
        return [(r.feature_id, r.statistic) for r in self.results]

    @property
    def ranked_ids(self) -> list[str]:
        return [r.feature_id for r in self.results]

    def to_tsv(self) -> str:
        lines = ["feature_id\tstatistic\tdf\tp_value\tcritical_value\treject\tlow_expected_warning"]
        for r in self.results:
            lines.append(
                f"{r.feature_id}\t{r.statistic!r}\t{r.df}\t{r.p_value!r}\t{r.critical_value!r}"
                f"\t{int(r.reject_null)}\t{int(r.low_expected_warning)}"
            )
        return "\n".join(lines) + "\n"


def build_contingency(feature_column, labels) -> ContingencyTable:
    """Tally feature codes against the two classes, dropping empty categories."""
    x = np.asarray(feature_column, dtype=np.int64)
    y = np.asarray(labels, dtype=np.int64)
    if x.size == 0 or x.shape != y.shape:
        raise ValueError("feature column and labels must be nonempty and equal length")
    if not (np.any(y == 0) and np.any(y == 1)):
        raise SingleClassError("contingency table needs both classes present")
    codes = np.unique(x)
    if codes.size < 2:
        raise DegenerateFeatureError(f"feature is constant (code {codes[0]}), df would be 0")
    observed = np.stack([np.array([np.sum((x == c) & (y == j)) for j in (0, 1)]) for c in codes])
    return ContingencyTable(observed.astype(np.int64), tuple(int(c) for c in codes), int(observed.sum()))


def expected_counts(table) -> np.ndarray:
    o = np.asarray(table.observed if isinstance(table, ContingencyTable) else table, dtype=float)
    total = o.sum()
    if total <= 0:
        raise ValueError("grand total must be positive")
    return np.outer(o.sum(axis=1), o.sum(axis=0)) / total


def chi2_statistic(table) -> float:
    o = np.asarray(table.observed if isinstance(table, ContingencyTable) else table, dtype=float)
    e = expected_counts(o)
    return float(np.sum((o - e) ** 2 / e))


def low_expected(table, threshold: float = 5.0) -> bool:
    return bool(np.any(expected_counts(table) < threshold))


def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    term = 1.0 / a
    total = term
    for n in range(1, MAX_ITER + 1):
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ConvergenceError(f"P({a}, {x}) series did not converge in {MAX_ITER} iterations")


def _upper_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by modified Lentz."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ConvergenceError(f"Q({a}, {x}) continued fraction did not converge in {MAX_ITER} iterations")


def gammainc_upper(a: float, x: float) -> float:
    if x < 0 or a <= 0:
        raise ValueError("need a > 0 and x >= 0")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return min(1.0, max(0.0, 1.0 - _lower_series(a, x)))
    return min(1.0, max(0.0, _upper_fraction(a, x)))


def chi2_sf(x: float, df: int) -> float:
    """P(X > x) for X ~ chi-square(df)."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if math.isinf(x):
        return 0.0
    return gammainc_upper(df / 2.0, x / 2.0)


def critical_value(alpha: float, df: int, upper: float = 1e6) -> float:
    """Upper-tail quantile: the x with ``chi2_sf(x, df) == alpha``, by bisection."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    lo, hi = 0.0, upper
    if not chi2_sf(hi, df) < alpha:
        raise ConvergenceError(f"no bracket for alpha={alpha}, df={df} on [0, {upper}]")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if chi2_sf(mid, df) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@functools.lru_cache(maxsize=256)
def _cached_critical(alpha: float, df: int) -> float:
    return critical_value(alpha, df)


def test_feature(dataset, feature_id: str, alpha: float = DEFAULT_ALPHA) -> ChiSquareResult:
    """Chi-squared independence test of one dataset column against the labels."""
    table = build_contingency(dataset.column(feature_id), dataset.labels)
    return _result(feature_id, table, alpha)


test_feature.__test__ = False  # keep pytest from collecting this name


def _result(feature_id: str, table: ContingencyTable, alpha: float) -> ChiSquareResult:
    stat = chi2_statistic(table)
    r, c = table.observed.shape
    df = (r - 1) * (c - 1)
    crit = _cached_critical(alpha, df)
    return ChiSquareResult(
        feature_id=feature_id,
        statistic=stat,
        df=df,
        p_value=chi2_sf(stat, df),
        critical_value=crit,
        reject_null=stat > crit,
        low_expected_warning=low_expected(table),
    )


def rank_features(dataset, alpha: float = DEFAULT_ALPHA) -> ChiSquareReport:
    """Test every column and sort by statistic, descending.

    Ties keep dataset column order. Constant columns cannot be tested; they
    are reported with ``degenerate=True`` and placed after all testable
    features.
    """
    dataset.require_both_classes()
    tested, degenerate, notes = [], [], []
    for j, fid in enumerate(dataset.feature_ids):
        try:
            table = build_contingency(dataset.rows[:, j], dataset.labels)
        except DegenerateFeatureError as exc:
            note = f"{fid}: excluded from ranking ({exc})"
            warnings.warn(note)
            notes.append(note)
            degenerate.append(ChiSquareResult(fid, 0.0, 0, 1.0, math.inf, False, False, degenerate=True))
            continue
        res = _result(fid, table, alpha)
        if res.low_expected_warning:
            notes.append(f"{fid}: expected count below 5 in at least one cell")
        tested.append((j, res))
    tested.sort(key=lambda t: (-t[1].statistic, t[0]))
    return ChiSquareReport(alpha, tuple(r for _, r in tested) + tuple(degenerate), tuple(notes))
