import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import make_dataset, tiny_schema
from vulnscreen.errors import DataError, SingleClassError
from vulnscreen.ingest import parse_csv, round_half_up, select_columns, stratified_split, write_csv
from vulnscreen.synth import generate, paper_shaped_preset


@pytest.fixture(scope="module")
def preset_ds():
    return generate(paper_shaped_preset(42))


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_parse_full_sized_csv(tmp_path, schema, preset_ds):
    p = tmp_path / "full.csv"
    write_csv(preset_ds, p, schema)
    ds = parse_csv(p, schema, labeled=True)
    assert (ds.n, ds.p) == (486, 36)
    assert ds == preset_ds


def test_header_only_gives_empty_dataset(tmp_path, schema):
    p = _write(tmp_path, ",".join(schema.ids + ["label"]) + "\n")
    ds = parse_csv(p, schema, labeled=True)
    assert ds.n == 0 and ds.p == 36


def test_out_of_range_code_names_line_and_column(tmp_path):
    s = tiny_schema([2, 3])
    p = _write(tmp_path, "Q1,Q2,label\n0,1,healthy\n1,3,addicted\n")
    with pytest.raises(DataError, match=r"line 3, column Q2"):
        parse_csv(p, s)


def test_labels_codes_and_names_mix(tmp_path):
    s = tiny_schema([2, 3])
    p = _write(tmp_path, "Q2,label,Q1\nhi,addicted,a\n0,0,1\n\"mid\",1,b\n")
    ds = parse_csv(p, s)
    assert ds.feature_ids == ("Q1", "Q2")
    assert ds.rows.tolist() == [[0, 2], [1, 0], [1, 1]]
    assert ds.labels.tolist() == [1, 0, 1]


@pytest.mark.parametrize(
    "text, pattern",
    [
        ("Q1,label\n0,healthy\n", "missing columns"),
        ("Q1,Q2,Q3,label\n0,0,0,healthy\n", "unexpected columns"),
        ("Q1,Q2,label\nmaybe,0,healthy\n", "unknown answer 'maybe'"),
        ("Q1,Q2,label\n0,0,sick\n", "unknown label"),
        ("Q1,Q2\n0,0\n", "missing columns"),
    ],
)
def test_parse_errors(tmp_path, text, pattern):
    with pytest.raises(DataError, match=pattern):
        parse_csv(_write(tmp_path, text), tiny_schema([2, 3]))


def test_missing_cell_rejects_row_by_default(tmp_path):
    p = _write(tmp_path, "Q1,Q2,label\n0,2,healthy\n1,,addicted\n1,2,addicted\n")
    with pytest.warns(UserWarning, match="lines \\[3\\]"):
        ds = parse_csv(p, tiny_schema([2, 3]))
    assert ds.n == 2 and ds.rejected_lines == (3,)


def test_impute_mode_uses_most_frequent(tmp_path):
    p = _write(tmp_path, "Q1,Q2,label\n0,2,healthy\n1,,addicted\n1,2,addicted\n0,1,healthy\n")
    ds = parse_csv(p, tiny_schema([2, 3]), impute=True)
    assert ds.rows[:, 1].tolist() == [2, 2, 2, 1]


def test_unlabeled_with_row_ids(tmp_path):
    p = _write(tmp_path, "row_id,Q1,Q2\nr7,a,lo\nr9,b,hi\n")
    ds = parse_csv(p, tiny_schema([2, 3]), labeled=False)
    assert ds.labels is None and ds.row_ids == ("r7", "r9")


@given(st.data())
def test_write_parse_round_trip(tmp_path_factory, data):
    s = tiny_schema([2, 3, 3])
    n = data.draw(st.integers(0, 20))
    rows = [[data.draw(st.integers(0, m - 1)) for m in (2, 3, 3)] for _ in range(n)]
    labels = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    ds = make_dataset(np.array(rows, dtype=np.int64).reshape(n, 3), labels, fingerprint=s.fingerprint)
    as_labels = data.draw(st.booleans())
    p = tmp_path_factory.mktemp("rt") / "x.csv"
    write_csv(ds, p, s, as_labels=as_labels)
    assert parse_csv(p, s) == ds


def test_split_486_rows(preset_ds):
    sp = stratified_split(preset_ds, 1 / 3, 42)
    assert len(sp.test) == 162 and len(sp.train) == 324
    assert set(sp.train).isdisjoint(sp.test)
    assert sorted(sp.train + sp.test) == list(range(486))


def test_split_six_rows_one_test_per_class():
    ds = make_dataset(np.zeros((6, 1)), [0, 1, 0, 1, 0, 1])
    sp = stratified_split(ds, 1 / 3, 3)
    assert sorted(ds.labels[list(sp.test)].tolist()) == [0, 1]


def test_split_deterministic(preset_ds):
    assert stratified_split(preset_ds, 1 / 3, 9) == stratified_split(preset_ds, 1 / 3, 9)
    assert stratified_split(preset_ds, 1 / 3, 9) != stratified_split(preset_ds, 1 / 3, 10)


def test_split_errors():
    with pytest.raises(SingleClassError):
        stratified_split(make_dataset(np.zeros((4, 1)), [0, 0, 0, 0]), 0.5, 1)
    with pytest.raises(DataError):
        stratified_split(make_dataset(np.zeros((4, 1)), [0, 0, 0, 1]), 0.5, 1)
    with pytest.raises(DataError):
        stratified_split(make_dataset(np.zeros((4, 1)), [0, 0, 1, 1]), 1.0, 1)


@given(st.integers(2, 60), st.integers(2, 60), st.sampled_from([0.1, 0.2, 0.25, 1 / 3, 0.4]),
       st.integers(0, 2**32))
def test_split_proportions_and_mirror(n0, n1, f, seed):
    labels = [0] * n0 + [1] * n1
    random.Random(seed).shuffle(labels)
    ds = make_dataset(np.zeros((n0 + n1, 1)), labels)
    try:
        sp = stratified_split(ds, f, seed)
    except DataError:
        return
    assert abs(len(sp.test) - (n0 + n1) * f) <= 1
    test_labels = ds.labels[list(sp.test)]
    for c, nc in ((0, n0), (1, n1)):
        assert abs(np.sum(test_labels == c) - nc * f) <= 1.5
    k = [round_half_up(nc * f) for nc in (n0, n1)]
    k_mirror = [round_half_up(nc * (1 - f)) for nc in (n0, n1)]
    if all(a + b == nc for a, b, nc in zip(k, k_mirror, (n0, n1))) \
            and sum(k) == round_half_up((n0 + n1) * f) and sum(k_mirror) == round_half_up((n0 + n1) * (1 - f)):
        mirror = stratified_split(ds, 1 - f, seed)
        assert mirror.train == sp.test and mirror.test == sp.train


def test_select_columns():
    ds = make_dataset(np.arange(12).reshape(4, 3) % 2, [0, 1, 0, 1])
    assert select_columns(ds, ds.feature_ids) == ds
    sub = select_columns(ds, ["Q3", "Q1"])
    assert sub.rows.tolist() == ds.rows[:, [2, 0]].tolist()
    with pytest.raises(DataError, match="Q99"):
        select_columns(ds, ["Q99"])


def test_select_eighteen_of_preset(preset_ds):
    sub = select_columns(preset_ds, preset_ds.feature_ids[:18])
    assert (sub.n, sub.p) == (486, 18)


@given(st.lists(st.integers(0, 9), max_size=10, unique=True), st.lists(st.sampled_from(["Q1", "Q2", "Q3"]),
                                                                        min_size=1, max_size=3, unique=True))
def test_select_columns_commutes_with_row_filter(idx, cols):
    ds = make_dataset((np.arange(30).reshape(10, 3) * 7) % 3, [0, 1] * 5)
    assert select_columns(ds.subset(idx), cols) == select_columns(ds, cols).subset(idx)


def test_dataset_invariants():
    with pytest.raises(DataError):
        make_dataset(np.zeros((2, 1)), [0, 2])
    with pytest.raises(DataError):
        make_dataset(np.zeros((2, 1)), [0])
    ds = make_dataset(np.zeros((2, 1)), [0, 1])
    with pytest.raises((ValueError, TypeError)):
        ds.rows[0, 0] = 5
