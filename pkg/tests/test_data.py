import numpy as np
import pytest

from shapeboost.data import (
    load_dataset,
    load_ucr,
    save_dataset,
    stratified_kfold,
    znormalize,
)
from shapeboost.exceptions import (
    InvalidInputError,
    InvalidParameterError,
    ParseError,
    UnsupportedError,
)

from conftest import make_dataset


class TestLoadUcr:
    def test_comma_delimited(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,0.5,0.7\n2,0.1,0.2\n")
        ds = load_ucr(path)
        assert len(ds) == 2 and ds.series_length == 2
        assert ds.labels.tolist() == [1, -1]
        assert ds.label_map == {"1.0": 1, "2.0": -1}

    def test_whitespace_delimited(self, tmp_path):
        path = tmp_path / "toy.txt"
        path.write_text("  -1  0.5 0.7\n 1 0.1 0.2\n")
        ds = load_ucr(path)
        # smaller original label (-1) plays +1
        assert ds.labels.tolist() == [1, -1]

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,0.5,0.7\n2,0.1\n")
        with pytest.raises(InvalidInputError):
            load_ucr(path)

    def test_multiclass_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,0.5,0.7\n2,0.1,0.2\n3,0.3,0.4\n")
        with pytest.raises(UnsupportedError):
            load_ucr(path)

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,0.5,0.7\n2,oops,0.2\n")
        with pytest.raises(ParseError) as excinfo:
            load_ucr(path)
        assert excinfo.value.line_number == 2
        assert "line 2" in str(excinfo.value)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("\n\n")
        with pytest.raises(InvalidInputError):
            load_ucr(path)


class TestZnormalize:
    def test_constant_series_to_zero(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,1,1,1\n2,0,2,1\n")
        ds = znormalize(load_ucr(path))
        assert np.array_equal(ds.instances[0].series.values, [0.0, 0.0, 0.0])

    def test_two_point_series(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,0,2\n2,5,9\n")
        ds = znormalize(load_ucr(path))
        assert ds.instances[0].series.values == pytest.approx([-1.0, 1.0])

    def test_moments_on_random_input(self):
        ds = znormalize(make_dataset(seed=3))
        for inst in ds.instances:
            v = inst.series.values
            assert v.mean() == pytest.approx(0.0, abs=1e-10)
            assert v.std() == pytest.approx(1.0, abs=1e-10)

    def test_labels_preserved(self):
        ds = make_dataset(seed=4)
        assert znormalize(ds).labels.tolist() == ds.labels.tolist()


class TestStratifiedKfold:
    def test_exact_divisibility(self):
        ds = make_dataset(m=10)
        folds = stratified_kfold(ds, 5, seed=0)
        labels = ds.labels
        for _, val in folds:
            assert len(val) == 2
            assert sorted(labels[val]) == [-1, 1]

    def test_deterministic(self):
        ds = make_dataset(m=12)
        a = stratified_kfold(ds, 3, seed=5)
        b = stratified_kfold(ds, 3, seed=5)
        for (ta, va), (tb, vb) in zip(a, b):
            assert np.array_equal(ta, tb) and np.array_equal(va, vb)

    def test_disjoint_and_covering(self):
        ds = make_dataset(m=14)
        folds = stratified_kfold(ds, 4, seed=1)
        seen = np.concatenate([val for _, val in folds])
        assert sorted(seen) == list(range(14))
        for train, val in folds:
            assert not set(train) & set(val)
            assert sorted(np.concatenate([train, val])) == list(range(14))

    def test_balance_within_one(self):
        ds = make_dataset(m=13)
        folds = stratified_kfold(ds, 3, seed=2)
        labels = ds.labels
        for cls in (-1, 1):
            counts = [int(np.sum(labels[val] == cls)) for _, val in folds]
            assert max(counts) - min(counts) <= 1

    def test_small_class_warns(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,0,1\n1,2,3\n1,4,5\n1,6,7\n2,8,9\n")
        ds = load_ucr(path)
        with pytest.warns(UserWarning):
            stratified_kfold(ds, 3, seed=0)

    def test_bad_k_rejected(self):
        ds = make_dataset(m=6)
        with pytest.raises(InvalidParameterError):
            stratified_kfold(ds, 1, seed=0)
        with pytest.raises(InvalidParameterError):
            stratified_kfold(ds, 7, seed=0)


def test_save_load_round_trip(tmp_path):
    ds = make_dataset(seed=6)
    path = tmp_path / "toy.csv"
    save_dataset(ds, path)
    loaded = load_dataset(path)
    assert loaded.name == ds.name
    assert loaded.label_map == ds.label_map
    assert loaded.labels.tolist() == ds.labels.tolist()
    assert np.array_equal(loaded.series_matrix, ds.series_matrix)
