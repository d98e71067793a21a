"""Backward elimination over chi-squared-ranked features, and the end-to-end pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import chi2
from .classifiers import KINDS, TrainConfig, labels_from_scores, save_model, score_rows, train
from .errors import StageError, VulnscreenError
from .evaluation import EvalReport, evaluate, evaluate_scores
from .ingest import Dataset, SplitIndices, parse_csv, select_columns, stratified_split
from .schema import load_schema


@dataclass(frozen=True)
class Cell:
    n: int
    kind: str
    accuracy: float = float("nan")
    auc: float = float("nan")
    status: str = "ok"
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class Winner:
    kind: str
    n: int
    feature_ids: tuple[str, ...]
    accuracy: float
    auc: float


@dataclass(frozen=True)
class SelectionTrace:
    cells: tuple[Cell, ...]
    ranking: tuple[str, ...]
    split: SplitIndices
    kinds: tuple[str, ...]
    winner: Winner | None = None

    def cell(self, n: int, kind: str) -> Cell:
        for c in self.cells:
            if c.n == n and c.kind == kind:
                return c
        raise KeyError((n, kind))

    def accuracy_grid(self) -> dict[str, dict[int, float]]:
        grid: dict[str, dict[int, float]] = {k: {} for k in self.kinds}
        for c in self.cells:
            grid[c.kind][c.n] = c.accuracy
        return grid

    def to_tsv(self) -> str:
        lines = ["n\tkind\taccuracy\tauc\tstatus"]
        for c in self.cells:
            status = c.status if c.ok else f"{c.status}: {c.reason}"
            lines.append(f"{c.n}\t{c.kind}\t{c.accuracy!r}\t{c.auc!r}\t{status}")
        w = self.winner
        if w is not None:
            lines.append(f"# winner\t{w.kind}\tn={w.n}\taccuracy={w.accuracy!r}\tauc={w.auc!r}")
        return "\n".join(lines) + "\n"


def default_configs(seed: int = 42, kinds=KINDS) -> dict[str, TrainConfig]:
    return {k: TrainConfig(k, seed=seed) for k in kinds}


def _run_cell(train_ds: Dataset, test_ds: Dataset, n: int, feature_ids, config: TrainConfig) -> Cell:
    try:
        model = train(train_ds.rows, train_ds.labels, config, feature_ids, train_ds.schema_fingerprint)
        scores = score_rows(model, test_ds.rows)
        report = evaluate_scores(scores, labels_from_scores(model, scores), test_ds.labels)
    except (ValueError, ArithmeticError, VulnscreenError) as exc:
        return Cell(n, config.kind, status="failed", reason=str(exc))
    return Cell(n, config.kind, report.accuracy, report.auc)


def backward_eliminate(dataset: Dataset, ranking, split: SplitIndices, kinds=KINDS, base_configs=None,
                       sizes=None) -> SelectionTrace:
    """Train every kind on the top-n ranked features for n = p .. 1.

    The n-feature set is always the (n+1)-feature set minus its lowest
    ranked member. ``sizes`` restricts the sweep to a subset of n values.
    """
    ranking = tuple(ranking)
    if sorted(ranking) != sorted(dataset.feature_ids):
        raise ValueError("ranking must list every dataset feature exactly once")
    kinds = tuple(kinds)
    if not kinds:
        raise ValueError("need at least one classifier kind")
    configs = dict(default_configs(kinds=kinds) if base_configs is None else base_configs)
    train_full = dataset.subset(split.train)
    test_full = dataset.subset(split.test)
    sizes = range(len(ranking), 0, -1) if sizes is None else sorted(set(sizes), reverse=True)
    cells = []
    for n in sizes:
        feats = ranking[:n]
        tr = select_columns(train_full, feats)
        te = select_columns(test_full, feats)
        for kind in kinds:
            cells.append(_run_cell(tr, te, n, feats, configs.get(kind) or TrainConfig(kind)))
    if not any(c.ok for c in cells):
        raise VulnscreenError("every selection cell failed: " + "; ".join(c.reason for c in cells[:3]))
    trace = SelectionTrace(tuple(cells), ranking, split, kinds)
    winner = select_winner(trace)
    return SelectionTrace(trace.cells, ranking, split, kinds, winner)


def _winner_key(cell: Cell, kind_order):
    return (-cell.accuracy, cell.n, -cell.auc, kind_order.index(cell.kind))


def select_winner(trace: SelectionTrace) -> Winner:
    """Highest accuracy; ties go to fewer features, then higher AUC, then kind order."""
    ok = [c for c in trace.cells if c.ok]
    if not ok:
        raise ValueError("trace has no successful cells")
    order = list(KINDS) + [k for k in trace.kinds if k not in KINDS]
    best = min(ok, key=lambda c: _winner_key(c, order))
    return Winner(best.kind, best.n, tuple(trace.ranking[: best.n]), best.accuracy, best.auc)


@dataclass
class PipelineResult:
    model: object
    trace: SelectionTrace
    chi2_report: chi2.ChiSquareReport
    evaluation: EvalReport
    config: dict = field(default_factory=dict)

    def summary(self) -> str:
        w = self.trace.winner
        return (
            f"winner: {w.kind}\n"
            f"n_features: {w.n}\n"
            f"features: {','.join(w.feature_ids)}\n"
            f"accuracy: {self.evaluation.accuracy!r}\n"
            f"auc: {self.evaluation.auc!r}\n"
            f"n_test: {self.evaluation.n_test}\n"
        )


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (ValueError, ArithmeticError, OSError, VulnscreenError) as exc:
        raise StageError(name, exc) from exc


def run_pipeline(data, schema_path=None, seed: int = 42, alpha: float = chi2.DEFAULT_ALPHA, configs=None,
                 test_fraction: float = 1 / 3, kinds=KINDS, out_dir=None, impute: bool = False) -> PipelineResult:
    """ingest -> rank -> split -> backward elimination -> retrain winner -> evaluate.

    ``data`` is a CSV path or an already encoded :class:`Dataset`. With
    ``out_dir`` the model, trace, chi-squared report, ROC points, and a
    text summary are written there.
    """
    schema = _stage("schema", load_schema, schema_path)
    if isinstance(data, Dataset):
        dataset = data
    else:
        dataset = _stage("ingest", parse_csv, data, schema, True, impute=impute)
    report = _stage("ranking", chi2.rank_features, dataset, alpha)
    split = _stage("split", stratified_split, dataset, test_fraction, seed)
    configs = dict(default_configs(seed, kinds) if configs is None else configs)
    trace = _stage("selection", backward_eliminate, dataset, report.ranked_ids, split, kinds, configs)
    w = trace.winner
    train_ds = select_columns(dataset.subset(split.train), w.feature_ids)
    cfg = configs.get(w.kind) or TrainConfig(w.kind, seed=seed)
    model = _stage("final-train", train, train_ds.rows, train_ds.labels, cfg, w.feature_ids, dataset.schema_fingerprint)
    final = _stage("final-evaluate", evaluate, model, dataset.subset(split.test))
    effective = {
        "seed": seed,
        "alpha": alpha,
        "test_fraction": test_fraction,
        "kinds": list(kinds),
        "configs": {k: c.to_dict() for k, c in configs.items()},
    }
    result = PipelineResult(model, trace, report, final, effective)
    if out_dir is not None:
        _stage("write", write_artifacts, result, out_dir)
    return result


def write_artifacts(result: PipelineResult, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_model(result.model, out / "model.json")
    (out / "trace.tsv").write_text(result.trace.to_tsv(), encoding="utf-8")
    (out / "chi2.tsv").write_text(result.chi2_report.to_tsv(), encoding="utf-8")
    (out / "roc.csv").write_text(result.evaluation.roc_csv(), encoding="utf-8")
    (out / "summary.txt").write_text(result.summary(), encoding="utf-8")
    (out / "config.json").write_text(json.dumps(result.config, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def accuracy_curve(trace: SelectionTrace, kind: str) -> np.ndarray:
    """Accuracies for ``kind`` indexed by n (index 0 unused)."""
    curve = np.full(len(trace.ranking) + 1, np.nan)
    for c in trace.cells:
        if c.kind == kind:
            curve[c.n] = c.accuracy
    return curve
