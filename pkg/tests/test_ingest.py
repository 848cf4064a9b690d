import csv
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vistream.ingest import (
    Dataset,
    DegenerateSplitError,
    EmptyDatasetError,
    Label,
    MissingClassError,
    RawComment,
    RowError,
    SchemaError,
    SplitSpec,
    balance_labels,
    load_dataset,
    save_dataset,
    split,
    subset,
)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def make(counts, start=0):
    recs = []
    for label, n in enumerate(counts):
        recs += [RawComment(f"c{label}_{i}", f"text {label} {i}", Label(label)) for i in range(n)]
    return Dataset(tuple(recs))


@pytest.mark.parametrize("raw,expected", [("0", 0), ("1", 1), ("2", 2), ("0.0", 0), ("1.0", 1), ("2.0", 2), (2.0, 2)])
def test_label_parse(raw, expected):
    assert Label.parse(raw) == expected


@pytest.mark.parametrize("raw", ["3", "-1", "1.5", "abc", "", 3])
def test_label_parse_rejects(raw):
    with pytest.raises(ValueError):
        Label.parse(raw)


def test_label_csv_form():
    assert [lab.to_csv() for lab in Label] == ["0.0", "1.0", "2.0"]


def test_load_examples(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["text", "label"], [["Nam Bắc một nhà", "2.0"], ["haha cái này vui nha", "0.0"]])
    d = load_dataset(path)
    assert [r.label for r in d] == [Label.SUPPORTIVE, Label.OTHER]
    assert d.ids == ["r0", "r1"]
    assert d.texts[0] == "Nam Bắc một nhà"
    assert d.all_labeled


def test_load_unlabelled_and_partial(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["id", "text", "label"], [["a", "x", ""], ["b", "y", "1"]])
    d = load_dataset(path)
    assert not d.all_labeled
    assert d.records[0].label is None


def test_load_empty_rows(tmp_path):
    with pytest.raises(EmptyDatasetError):
        load_dataset(write_csv(tmp_path / "d.csv", ["text", "label"], []))
    (tmp_path / "e.csv").write_text("")
    with pytest.raises(EmptyDatasetError):
        load_dataset(tmp_path / "e.csv")


def test_load_schema_error(tmp_path):
    with pytest.raises(SchemaError):
        load_dataset(write_csv(tmp_path / "d.csv", ["body", "label"], [["x", "0"]]))


def test_load_row_error_names_row(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["text", "label"], [["ok", "0"], ["bad", "7"]])
    with pytest.raises(RowError) as info:
        load_dataset(path)
    assert info.value.row == 3


def test_duplicate_ids_rejected():
    with pytest.raises(Exception, match="duplicate"):
        Dataset((RawComment("a", "x"), RawComment("a", "y")))


def test_blank_text_rejected():
    with pytest.raises(ValueError):
        RawComment("a", "   ")


vi_text = st.text(
    alphabet=st.sampled_from(list("aăâbcdđeêghiklmnoôơpqrstuưvxyàáạảãầấậẩẫèéẹẻẽìíịỉĩòóọỏõùúụủũỳýỵỷỹ ,\"'\n")),
    min_size=1,
    max_size=40,
).filter(lambda s: s.strip())


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(vi_text, st.sampled_from(list(Label)), st.one_of(st.none(), st.sampled_from(["fb", "tiktok"]))), min_size=1, max_size=20))
def test_save_load_round_trip(tmp_path_factory, rows):
    d = Dataset(tuple(RawComment(f"id{i}", t, lab, src) for i, (t, lab, src) in enumerate(rows)))
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    save_dataset(d, path)
    assert load_dataset(path) == d


def test_balance_already_balanced():
    d = make((10, 10, 10))
    out = balance_labels(d, seed=1)
    assert Counter(out.records) == Counter(d.records)


def test_balance_counts_and_blocks():
    d = make((6, 3, 3))
    out = balance_labels(d, seed=5)
    assert out.class_counts() == [3, 3, 3]
    assert [r.label for r in out] == [0] * 3 + [1] * 3 + [2] * 3
    pos = {r.id: i for i, r in enumerate(d.records)}
    block = [pos[r.id] for r in out.records[:3]]
    assert block == sorted(block)


def test_balance_deterministic():
    d = make((20, 7, 9))
    assert balance_labels(d, 3) == balance_labels(d, 3)
    assert balance_labels(d, 3) != balance_labels(d, 4)


def test_balance_missing_class():
    with pytest.raises(MissingClassError):
        balance_labels(make((4, 0, 2)), 0)


@settings(max_examples=40, deadline=None)
@given(st.tuples(*(st.integers(1, 25) for _ in range(3))), st.integers(0, 2**64 - 1))
def test_balance_properties(counts, seed):
    d = make(counts)
    out = balance_labels(d, seed)
    m = min(counts)
    assert out.class_counts() == [m, m, m]
    assert set(out.records) <= set(d.records)


def test_split_sizes():
    train, val, test = split(make((100, 100, 100)), SplitSpec(0.70, 0.15, 0.15, seed=42))
    assert train.class_counts() == [70, 70, 70]
    assert val.class_counts() == [15, 15, 15]
    assert test.class_counts() == [15, 15, 15]


def test_split_floor_cuts_exact():
    # 10 * 0.7 must cut at 7 even though 0.7 is not exact in binary
    train, val, test = split(make((10, 10, 10)), SplitSpec(0.7, 0.2, 0.1))
    assert (len(train), len(val), len(test)) == (21, 6, 3)


def test_split_deterministic():
    d = make((30, 30, 30))
    assert split(d, SplitSpec(seed=9)) == split(d, SplitSpec(seed=9))


def test_split_degenerate():
    with pytest.raises(DegenerateSplitError):
        split(make((3, 3, 3)), SplitSpec())


@pytest.mark.parametrize("fracs", [(0.5, 0.5, 0.5), (0.0, 0.5, 0.5), (1.0, 0.0, 0.0)])
def test_splitspec_validation(fracs):
    with pytest.raises(ValueError):
        SplitSpec(*fracs)


@settings(max_examples=40, deadline=None)
@given(st.tuples(*(st.integers(8, 40) for _ in range(3))), st.integers(0, 2**32))
def test_split_partitions(counts, seed):
    d = make(counts)
    parts = split(d, SplitSpec(seed=seed))
    ids = [r.id for p in parts for r in p]
    assert len(ids) == len(set(ids))
    assert sorted(ids) == sorted(d.ids)
    order = {r.id: i for i, r in enumerate(d.records)}
    for p in parts:
        idx = [order[i] for i in p.ids]
        assert idx == sorted(idx)


def test_subset_keeps_order():
    d = make((3, 3, 3))
    assert subset(d, ["c2_0", "c0_1"]).ids == ["c0_1", "c2_0"]
