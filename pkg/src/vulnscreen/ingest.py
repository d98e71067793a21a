"""Respondent CSV ingestion, the encoded Dataset, and the stratified split."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._rng import SplitMix64
from .errors import DataError, SingleClassError
from .schema import SurveySchema

ROW_ID_COLUMN = "row_id"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Encoded respondents: integer codes per question plus 0/1 labels.

    ``feature_ids`` names the columns of ``rows`` (schema order unless the
    dataset came out of :func:`select_columns`). ``labels`` is ``None`` for
    unlabeled data.
    """

    schema_fingerprint: str
    feature_ids: tuple[str, ...]
    rows: np.ndarray
    labels: np.ndarray | None
    row_ids: tuple[str, ...] | None = None
    rejected_lines: tuple[int, ...] = field(default=())

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1, len(self.feature_ids))
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
            if labels.shape[0] != rows.shape[0]:
                raise DataError(f"{rows.shape[0]} rows but {labels.shape[0]} labels")
            if labels.size and not np.isin(labels, (0, 1)).all():
                raise DataError("labels must be 0 or 1")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)
        if self.row_ids is not None:
            if len(self.row_ids) != rows.shape[0]:
                raise DataError("row_ids length differs from row count")
            object.__setattr__(self, "row_ids", tuple(self.row_ids))
        object.__setattr__(self, "feature_ids", tuple(self.feature_ids))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]

    def column(self, feature_id: str) -> np.ndarray:
        try:
            return self.rows[:, self.feature_ids.index(feature_id)]
        except ValueError:
            raise DataError(f"unknown feature {feature_id!r}") from None

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.schema_fingerprint,
            self.feature_ids,
            self.rows[idx],
            None if self.labels is None else self.labels[idx],
            None if self.row_ids is None else tuple(self.row_ids[i] for i in idx),
        )

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        same_labels = (self.labels is None and other.labels is None) or (
            self.labels is not None
            and other.labels is not None
            and np.array_equal(self.labels, other.labels)
        )
        return (
            self.schema_fingerprint == other.schema_fingerprint
            and self.feature_ids == other.feature_ids
            and np.array_equal(self.rows, other.rows)
            and same_labels
            and self.row_ids == other.row_ids
        )

    def require_both_classes(self):
        if self.labels is None or len(np.unique(self.labels)) < 2:
            raise SingleClassError("dataset must contain both classes")

    def check_codes(self, schema: SurveySchema):
        for j, fid in enumerate(self.feature_ids):
            m = schema.question(fid).n_categories
            col = self.rows[:, j]
            bad = np.flatnonzero((col < 0) | (col >= m))
            if bad.size:
                raise DataError(f"row {bad[0]}, column {fid}: code {col[bad[0]]} out of range [0, {m})")


def _encode_cell(schema: SurveySchema, qid: str, cell: str, line: int) -> int:
    q = schema.question(qid)
    if cell in q.categories:
        return q.categories.index(cell)
    try:
        code = int(cell)
    except ValueError:
        raise DataError(
            f"line {line}, column {qid}: unknown answer {cell!r}; expected one of {list(q.categories)}"
        ) from None
    if not 0 <= code < q.n_categories:
        raise DataError(f"line {line}, column {qid}: code {code} out of range [0, {q.n_categories})")
    return code


def _encode_label(schema: SurveySchema, cell: str, line: int) -> int:
    if cell in schema.target:
        return schema.target[cell]
    if cell in ("0", "1"):
        return int(cell)
    raise DataError(f"line {line}: unknown label {cell!r}; expected one of {schema.class_names} or 0/1")


def parse_csv(
    path,
    schema: SurveySchema,
    labeled: bool = True,
    *,
    feature_ids=None,
    strict: bool = True,
    impute: bool = False,
) -> Dataset:
    """Read a respondent CSV into an encoded :class:`Dataset`.

    Cells may hold either answer labels or numeric codes. With
    ``strict=False`` unrelated extra columns are ignored, which is how
    prediction reads a training file. Rows with a missing cell are dropped
    and reported (line numbers land in ``rejected_lines``) unless
    ``impute=True``, which fills each gap with the column's most frequent
    code.
    """
    wanted = list(schema.ids if feature_ids is None else feature_ids)
    for fid in wanted:
        schema.index(fid)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        records = [(reader.line_num, rec) for rec in reader if rec]

    missing = [c for c in wanted if c not in header]
    if labeled and schema.label_column not in header:
        missing.append(schema.label_column)
    if missing:
        raise DataError(f"{path}: missing columns {missing}")
    if strict:
        allowed = set(wanted) | {ROW_ID_COLUMN} | ({schema.label_column} if labeled else set())
        extra = [c for c in header if c not in allowed]
        if extra:
            raise DataError(f"{path}: unexpected columns {extra}")
    pos = {c: header.index(c) for c in header}

    codes, labels, row_ids, gaps, rejected = [], [], [], [], []
    for line, rec in records:
        if len(rec) != len(header):
            raise DataError(f"line {line}: expected {len(header)} fields, got {len(rec)}")
        cells = [rec[pos[c]].strip() for c in wanted]
        label_cell = rec[pos[schema.label_column]].strip() if labeled else None
        if label_cell == "" or (not impute and "" in cells):
            rejected.append(line)
            continue
        row = [-1 if cell == "" else _encode_cell(schema, fid, cell, line) for fid, cell in zip(wanted, cells)]
        codes.append(row)
        gaps.append([cell == "" for cell in cells])
        if labeled:
            labels.append(_encode_label(schema, label_cell, line))
        if ROW_ID_COLUMN in pos:
            row_ids.append(rec[pos[ROW_ID_COLUMN]])

    rows = np.array(codes, dtype=np.int64).reshape(-1, len(wanted))
    if impute and rows.size:
        mask = np.array(gaps, dtype=bool)
        for j, fid in enumerate(wanted):
            if mask[:, j].any():
                present = rows[~mask[:, j], j]
                if present.size == 0:
                    raise DataError(f"column {fid}: no values to impute from")
                counts = np.bincount(present, minlength=schema.question(fid).n_categories)
                rows[mask[:, j], j] = int(np.argmax(counts))
    if rejected:
        warnings.warn(f"{path}: rejected {len(rejected)} row(s) with missing cells at lines {rejected}")
    return Dataset(
        schema.fingerprint,
        tuple(wanted),
        rows,
        np.array(labels, dtype=np.int64) if labeled else None,
        tuple(row_ids) if ROW_ID_COLUMN in pos else None,
        tuple(rejected),
    )


def write_csv(dataset: Dataset, path, schema: SurveySchema, as_labels: bool = True) -> None:
    """Write a dataset in the format :func:`parse_csv` reads."""
    header = ([ROW_ID_COLUMN] if dataset.row_ids is not None else []) + list(dataset.feature_ids)
    if dataset.labels is not None:
        header.append(schema.label_column)
    questions = [schema.question(fid) for fid in dataset.feature_ids]
    names = schema.class_names
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, row in enumerate(dataset.rows.tolist()):
            rec = [dataset.row_ids[i]] if dataset.row_ids is not None else []
            rec += [q.categories[c] if as_labels else str(c) for q, c in zip(questions, row)]
            if dataset.labels is not None:
                lab = int(dataset.labels[i])
                rec.append(names[lab] if as_labels else str(lab))
            writer.writerow(rec)


@dataclass(frozen=True)
class SplitIndices:
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int
    test_fraction: float


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(dataset: Dataset, test_fraction: float, seed: int) -> SplitIndices:
    """Seeded per-class split with round-half-up test counts.

    Each class's indices (taken in dataset order, class 0 first) are
    Fisher-Yates shuffled from one SplitMix64 stream. The smaller side of
    the partition takes the shuffled prefix, so fractions ``f`` and ``1 - f``
    give mirrored partitions. If the per-class counts do not add up to
    ``round(n * f)`` the larger class absorbs the difference.
    """
    if not 0 < test_fraction < 1:
        raise DataError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    dataset.require_both_classes()
    labels = dataset.labels
    members = [np.flatnonzero(labels == c).tolist() for c in (0, 1)]
    for c, m in enumerate(members):
        if len(m) < 2:
            raise DataError(f"class {c} has {len(m)} member(s); need at least 2 for a split")
    k = [round_half_up(len(m) * test_fraction) for m in members]
    residual = round_half_up(dataset.n * test_fraction) - sum(k)
    if residual:
        big = 0 if len(members[0]) >= len(members[1]) else 1
        k[big] += residual
    rng = SplitMix64(seed)
    train, test = [], []
    for m, kc in zip(members, k):
        if not 1 <= kc <= len(m) - 1:
            raise DataError(f"class of size {len(m)} cannot populate both sides at fraction {test_fraction}")
        rng.shuffle(m)
        if test_fraction <= 0.5:
            test += m[:kc]
            train += m[kc:]
        else:
            train += m[: len(m) - kc]
            test += m[len(m) - kc :]
    return SplitIndices(tuple(sorted(train)), tuple(sorted(test)), int(seed), float(test_fraction))


def select_columns(dataset: Dataset, feature_ids) -> Dataset:
    """Restrict a dataset to ``feature_ids`` in the given order."""
    feature_ids = list(feature_ids)
    try:
        cols = [dataset.feature_ids.index(f) for f in feature_ids]
    except ValueError:
        unknown = [f for f in feature_ids if f not in dataset.feature_ids]
        raise DataError(f"unknown feature ids {unknown}") from None
    return Dataset(
        dataset.schema_fingerprint,
        tuple(feature_ids),
        dataset.rows[:, cols],
        dataset.labels,
        dataset.row_ids,
    )
